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

#ifndef TRACKCHECK_PLAN_HH
#define TRACKCHECK_PLAN_HH

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "trackcheck/topology.hh"

namespace trackcheck {

struct PlanEntry {
  int tick = 0;
  Cell cell;
  auto operator<=>(const PlanEntry&) const = default;
};

using Route = std::vector<PlanEntry>;

// Schedule of one aircraft: the tick it enters each sub-track, in order.
// It leaves the last sub-track one traversal time after entering it.
struct FlightPlan {
  int aircraftId = 0;
  Route entries;
  int fuel = 0;
  bool operator==(const FlightPlan&) const = default;
};

// Empty string when the plan is well formed, otherwise the first defect.
std::string planDefect(const FlightPlan& p, const Topology& t);

// Tick at which entry `idx` is left.
inline int exitTick(const Route& r, std::size_t idx, int fd) {
  return idx + 1 < r.size() ? r[idx + 1].tick : r[idx].tick + fd;
}

// Index of the entry occupied during [tick, tick+1), if any.
std::optional<std::size_t> entryAt(const Route& r, int tick, int fd);

// Shift every entry by `delta` ticks.
Route shifted(const Route& r, int delta);

// Interning table for routes so explored states carry a small id instead of
// a full schedule. Ids are assigned in first-seen order.
class RouteTable {
 public:
  std::uint32_t intern(const Route& r);
  const Route& at(std::uint32_t id) const { return routes_[id]; }
  std::size_t size() const { return routes_.size(); }
  std::size_t approxBytes() const;

 private:
  struct Hash {
    std::size_t operator()(const Route& r) const;
  };
  std::deque<Route> routes_;
  std::unordered_map<Route, std::uint32_t, Hash> ids_;
};

}  // namespace trackcheck

#endif  // TRACKCHECK_PLAN_HH
