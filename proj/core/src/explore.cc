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

#include "trackcheck/explore.hh"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <queue>
#include <unistd.h>
#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace trackcheck {

std::string toString(VerdictKind k) {
  switch (k) {
    case VerdictKind::Compatible: return "Compatible";
    case VerdictKind::Deadlock: return "Deadlock";
    case VerdictKind::Disaster: return "Disaster";
    case VerdictKind::Timeout: return "Timeout";
  }
  return "?";
}

ExplorationStats& ExplorationStats::operator+=(const ExplorationStats& o) {
  totalStates += o.totalStates;
  timedStates += o.timedStates;
  transitions += o.transitions;
  wallMillis += o.wallMillis;
  peakResidentBytes = std::max(peakResidentBytes, o.peakResidentBytes);
  return *this;
}

namespace {

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

}  // namespace

StateKey stateKey(const ModelState& s) {
  StateKey k;
  k.reserve(16 + s.objs.size() * 12 + (s.ersDone.size() + s.startOcc.size()) * 8);
  put(k, static_cast<std::int32_t>(s.now));
  put(k, s.quietTicks);
  put(k, static_cast<std::uint8_t>(s.moved));
  put(k, static_cast<std::uint32_t>(s.objs.size()));
  for (const auto& o : s.objs) {
    put(k, static_cast<std::uint8_t>(o.status));
    put(k, o.flags);
    put(k, o.idx);
    put(k, o.planId);
    put(k, o.fuel);
  }
  put(k, static_cast<std::uint32_t>(s.ersDone.size()));
  for (auto w : s.ersDone) put(k, w);
  put(k, static_cast<std::uint32_t>(s.startOcc.size()));
  for (auto w : s.startOcc) put(k, w);
  return k;
}

std::size_t residentBytes() {
  std::ifstream in("/proc/self/statm");
  std::size_t pages = 0;
  std::size_t resident = 0;
  if (!(in >> pages >> resident)) return 0;
  return resident * static_cast<std::size_t>(sysconf(_SC_PAGESIZE));
}

std::size_t heapBytes() {
#if defined(__GLIBC__)
  auto mi = mallinfo2();
  return mi.uordblks + mi.hblkhd;
#else
  return residentBytes();
#endif
}

std::optional<StopReason> terminate(const World& w, const ModelState& s, const Limits& limits,
                                    std::chrono::steady_clock::time_point started) {
  for (const auto& o : s.objs)
    if (o.status == ObjStatus::InTransit && o.fuel <= 0) return StopReason::Disaster;
  if (limits.timeLimitMillis > 0) {
    auto el = std::chrono::steady_clock::now() - started;
    if (std::chrono::duration_cast<std::chrono::milliseconds>(el).count() >= limits.timeLimitMillis)
      return StopReason::Timeout;
  }
  if (isFinal(w, s)) return StopReason::Success;
  return std::nullopt;
}

namespace {

class Explorer {
 public:
  Explorer(const World& w, const ExploreOptions& o)
      : w_(w), opts_(o), started_(std::chrono::steady_clock::now()) {}

  ExplorationResult run(const std::vector<ModelState>& seeds);

  // Expands same-tick events from `s`; timed results go to `out`.
  void depth(const ModelState& s, std::vector<ModelState>& out);

  std::vector<Diagnosis> diagnoses;
  std::optional<int> disaster;
  bool limitHit = false;
  std::string limitReason;
  ExplorationStats stats;

 private:
  bool seeState(const StateKey& k) {
    if (!seen_.insert(k).second) return false;
    ++stats.totalStates;
    if ((stats.totalStates & 0xfff) == 0 || stats.totalStates >= opts_.limits.maxStates)
      checkLimits();
    return true;
  }
  void checkLimits();

  const World& w_;
  const ExploreOptions& opts_;
  std::chrono::steady_clock::time_point started_;
  std::unordered_set<StateKey> seen_;  // states of the tick being expanded
};

void Explorer::checkLimits() {
  stats.peakResidentBytes = std::max(stats.peakResidentBytes, residentBytes());
  if (stats.totalStates >= opts_.limits.maxStates) {
    limitHit = true;
    limitReason = "state limit " + std::to_string(opts_.limits.maxStates);
  }
  if (opts_.limits.maxMemoryMb > 0 &&
      heapBytes() >= static_cast<std::size_t>(opts_.limits.maxMemoryMb) << 20) {
    limitHit = true;
    limitReason = "memory limit " + std::to_string(opts_.limits.maxMemoryMb) + " MiB";
  }
  if (opts_.limits.timeLimitMillis > 0) {
    auto el = std::chrono::steady_clock::now() - started_;
    if (std::chrono::duration_cast<std::chrono::milliseconds>(el).count() >=
        opts_.limits.timeLimitMillis) {
      limitHit = true;
      limitReason = "time limit " + std::to_string(opts_.limits.timeLimitMillis) + " ms";
    }
  }
}

void Explorer::depth(const ModelState& s0, std::vector<ModelState>& out) {
  std::vector<ModelState> stack;
  if (seeState(stateKey(s0))) stack.push_back(s0);
  while (!stack.empty() && !disaster && !limitHit) {
    ModelState s = std::move(stack.back());
    stack.pop_back();
    Expansion ex = expand(w_, s);
    if (!ex.diagnoses.empty()) {
      diagnoses.insert(diagnoses.end(), ex.diagnoses.begin(), ex.diagnoses.end());
      continue;
    }
    if (ex.timed()) {
      out.push_back(std::move(s));
      continue;
    }
    // Children pushed in reverse so the canonical first event is expanded first.
    std::vector<Event> evs = std::move(ex.events);
    if (!opts_.reverseOrder) std::reverse(evs.begin(), evs.end());
    for (const auto& e : evs) {
      TriggerResult tr = trigger(w_, s, e);
      ++stats.transitions;
      if (opts_.hook) opts_.hook(w_, s, tr.state, &e);
      if (tr.disasterAircraft) {
        disaster = tr.disasterAircraft;
        return;
      }
      if (seeState(stateKey(tr.state))) stack.push_back(std::move(tr.state));
    }
  }
}

ExplorationResult Explorer::run(const std::vector<ModelState>& seeds) {
  ExplorationResult res;
  struct Item {
    int next;
    std::uint64_t seq;
    ModelState state;
  };
  auto later = [](const Item& a, const Item& b) {
    return std::tie(a.next, a.seq) > std::tie(b.next, b.seq);
  };
  std::priority_queue<Item, std::vector<Item>, decltype(later)> queue(later);
  std::map<int, std::unordered_set<StateKey>> timedSeen;
  std::uint64_t seq = 0;
  bool foundFinal = false;

  auto addTimed = [&](ModelState s, bool count) {
    s.startOcc.clear();
    StateKey k = stateKey(s);
    if (!timedSeen[s.now].insert(k).second) return;
    if (count) {
      ++stats.timedStates;
      if (opts_.collectTimedKeys) res.timedKeys.push_back(k);
    }
    if (isFinal(w_, s)) {
      foundFinal = true;
      return;
    }
    auto nt = nextTick(w_, s);
    if (nt) queue.push(Item{*nt, seq++, std::move(s)});
  };

  for (const auto& s0 : seeds) {
    std::vector<ModelState> timed;
    auto counted = stats.totalStates;
    depth(s0, timed);
    if (!opts_.countSeeds) stats.totalStates = counted;
    if (disaster || !diagnoses.empty()) break;
    for (auto& t : timed) addTimed(std::move(t), opts_.countSeeds);
  }

  std::optional<int> deadlockTick;
  if (!diagnoses.empty()) deadlockTick = seeds.empty() ? 0 : seeds.front().now;
  int currentTick = std::numeric_limits<int>::min();
  std::vector<ModelState> batch;
  std::uint64_t pops = 0;
  std::int64_t statesBeforeTick = stats.totalStates;
  std::int64_t timedBeforeTick = stats.timedStates;

  while (!queue.empty() && !disaster && !limitHit) {
    if (deadlockTick && queue.top().next > *deadlockTick) break;
    Item it = queue.top();
    queue.pop();
    if (it.next != currentTick) {
      currentTick = it.next;
      statesBeforeTick = stats.totalStates;
      timedBeforeTick = stats.timedStates;
      batch.clear();
      seen_.clear();
      timedSeen.erase(timedSeen.begin(), timedSeen.lower_bound(currentTick));
    }
    batch.push_back(it.state);
    std::optional<Diagnosis> stall;
    auto adv = advanceTime(w_, it.state, &stall);
    if (!adv) {
      if (stall) {
        diagnoses.push_back(*stall);
        if (!deadlockTick) deadlockTick = it.next;
      }
      continue;
    }
    if (opts_.hook) opts_.hook(w_, it.state, *adv, nullptr);
    std::size_t before = diagnoses.size();
    std::vector<ModelState> timed;
    depth(*adv, timed);
    if (diagnoses.size() > before && !deadlockTick) deadlockTick = it.next;
    for (auto& t : timed) addTimed(std::move(t), true);
    if ((++pops & 0x3f) == 0) checkLimits();
  }
  stats.peakResidentBytes = std::max(stats.peakResidentBytes, residentBytes());
  stats.wallMillis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                               started_)
                         .count();

  res.successTraceExists = foundFinal;
  if (disaster) {
    res.verdict.kind = VerdictKind::Disaster;
    res.verdict.aircraftId = *disaster;
  } else if (!diagnoses.empty()) {
    res.verdict.kind = VerdictKind::Deadlock;
    std::sort(diagnoses.begin(), diagnoses.end());
    diagnoses.erase(std::unique(diagnoses.begin(), diagnoses.end()), diagnoses.end());
    res.verdict.diagnoses = diagnoses;
    res.deadlockTick = deadlockTick;
    if (*deadlockTick == currentTick) {
      res.frontier = std::move(batch);
      res.statesAtDeadlockTick = stats.totalStates - statesBeforeTick;
      res.timedAtDeadlockTick = stats.timedStates - timedBeforeTick;
    }
    while (!queue.empty()) {
      if (queue.top().state.now < *deadlockTick) res.frontier.push_back(queue.top().state);
      queue.pop();
    }
    if (res.frontier.empty() && !seeds.empty() && currentTick == std::numeric_limits<int>::min())
      res.frontier = seeds;
  } else if (limitHit) {
    res.verdict.kind = VerdictKind::Timeout;
    res.verdict.reason = limitReason;
  } else if (foundFinal) {
    res.verdict.kind = VerdictKind::Compatible;
  } else {
    res.verdict.kind = VerdictKind::Deadlock;
  }
  res.stats = stats;
  return res;
}

}  // namespace

ExplorationResult generateStateSpace(const World& w, const std::vector<ModelState>& seeds,
                                     const ExploreOptions& opts) {
  Explorer ex(w, opts);
  return ex.run(seeds);
}

DepthResult depthFS(const World& w, const ModelState& s, bool reverseOrder) {
  ExploreOptions opts;
  opts.reverseOrder = reverseOrder;
  Explorer ex(w, opts);
  DepthResult out;
  ex.depth(s, out.timed);
  out.diagnoses = ex.diagnoses;
  out.disasterAircraft = ex.disaster;
  out.stop = ex.disaster.has_value();
  return out;
}

}  // namespace trackcheck
