/*
 * Copyright 2026 The trackcheck Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Shared helpers and independent oracles for the test binaries.

#ifndef TRACKCHECK_TESTS_SUPPORT_HH
#define TRACKCHECK_TESTS_SUPPORT_HH

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "trackcheck/compose.hh"
#include "trackcheck/engine.hh"
#include "trackcheck/explore.hh"
#include "trackcheck/planner.hh"
#include "trackcheck/scenario.hh"

namespace tctest {

using namespace trackcheck;

// Two-area fixture numbering: sub-tracks 1..18 row by row, six per row.
inline Cell subTrack(int k) { return Cell{(k - 1) % 6, (k - 1) / 6}; }

inline Route subTrackRoute(std::initializer_list<std::pair<int, int>> tickAndTrack) {
  Route r;
  for (auto [t, k] : tickAndTrack) r.push_back(PlanEntry{t, subTrack(k)});
  return r;
}

inline Route route(std::initializer_list<std::tuple<int, int, int>> tickXY) {
  Route r;
  for (auto [t, x, y] : tickXY) r.push_back(PlanEntry{t, Cell{x, y}});
  return r;
}

// Consecutive ticks from `start` along `cells`.
inline Route along(int start, std::initializer_list<Cell> cells) {
  Route r;
  int t = start;
  for (Cell c : cells) r.push_back(PlanEntry{t++, c});
  return r;
}

inline FlightPlan plan(int id, Route r, int fuel = 100) { return FlightPlan{id, std::move(r), fuel}; }

// Small deterministic generator for property tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed * 0x9e3779b97f4a7c15ull + 1) {}
  std::uint64_t next() {
    s_ ^= s_ << 13;
    s_ ^= s_ >> 7;
    s_ ^= s_ << 17;
    return s_;
  }
  int uniform(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[next() % v.size()]; }

 private:
  std::uint64_t s_;
};

// Brute-force interleaver for plans that never share a cell: every order of
// the events due at each tick is enumerated explicitly and the distinct
// per-aircraft progress vectors are collected. Progress -1 is "not yet
// departed", size() is "arrived".
struct InterleavingCount {
  std::int64_t totalStates = 0;
  std::int64_t timedStates = 0;
};

inline InterleavingCount bruteForceInterleavings(const std::vector<FlightPlan>& plans, int fd) {
  const std::size_t n = plans.size();
  std::vector<int> prog(n, -1);
  std::set<std::pair<int, std::vector<int>>> seen;
  InterleavingCount out;
  auto dueTick = [&](std::size_t k) -> int {
    const auto& r = plans[k].entries;
    int p = prog[k];
    if (p >= static_cast<int>(r.size())) return -1;
    if (p < 0) return r.front().tick;
    return exitTick(r, static_cast<std::size_t>(p), fd);
  };
  int now = 0;
  for (std::size_t k = 0; k < n; ++k) now = std::min(now, plans[k].entries.front().tick);
  seen.insert({now, prog});
  out.timedStates = 1;
  for (;;) {
    int next = -1;
    for (std::size_t k = 0; k < n; ++k) {
      int d = dueTick(k);
      if (d > now && (next < 0 || d < next)) next = d;
    }
    if (next < 0) break;
    now = next;
    std::vector<std::size_t> due;
    for (std::size_t k = 0; k < n; ++k)
      if (dueTick(k) == now) due.push_back(k);
    std::sort(due.begin(), due.end());
    do {
      auto p = prog;
      seen.insert({now, p});
      for (std::size_t k : due) {
        ++p[k];
        seen.insert({now, p});
      }
    } while (std::next_permutation(due.begin(), due.end()));
    for (std::size_t k : due) ++prog[k];
    ++out.timedStates;
  }
  out.totalStates = static_cast<std::int64_t>(seen.size());
  return out;
}

// Invariant observer: mutual exclusion, conservation, time monotonicity.
struct InvariantMonitor {
  std::int64_t checked = 0;
  std::vector<std::string> violations;

  TransitionHook hook() {
    return [this](const World& w, const ModelState& from, const ModelState& to, const Event* e) {
      ++checked;
      auto fail = [&](const std::string& what) {
        if (violations.size() < 20) violations.push_back(what + " at tick " + std::to_string(to.now));
      };
      if (auto c = occupancyClash(w, to)) fail("two aircraft on " + toString(*c));
      if (to.objs.size() != w.original.size()) fail("aircraft count changed");
      for (std::size_t k = 0; k < to.objs.size(); ++k) {
        const auto& o = to.objs[k];
        if (from.objs[k].status == ObjStatus::Delivered && o.status != ObjStatus::Delivered)
          fail("delivered aircraft reappeared");
        if (o.status == ObjStatus::InTransit &&
            !w.scope.containsCell(w.topo->index(w.route(o)[o.idx].cell)))
          fail("in-transit aircraft outside scope");
      }
      if (e) {
        if (to.now != from.now) fail("event changed time");
        if (e->kind == EventKind::Move && to.objs[e->objIdx].idx != from.objs[e->objIdx].idx + 1)
          fail("move did not consume exactly one entry");
      } else if (to.now < from.now + 1) {
        fail("time did not advance by at least one tick");
      }
    };
  }
};

}  // namespace tctest

#endif  // TRACKCHECK_TESTS_SUPPORT_HH
