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

#ifndef TRACKCHECK_PLANNER_HH
#define TRACKCHECK_PLANNER_HH

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "trackcheck/plan.hh"
#include "trackcheck/topology.hh"

namespace trackcheck {

// Literal conflict predicate: some plan enters `cell` at `arrivalTime` or
// leaves it at `arrivalTime + fd`.
bool hasTimeConflict(Cell cell, int arrivalTime, const std::vector<FlightPlan>& plans, int fd);

// Hash index answering the same predicate in O(1), plus the head-on
// exchange check used when accepting a route.
class ConflictIndex {
 public:
  ConflictIndex(const Topology& t, int fd) : topo_(&t), fd_(fd) {}
  void add(const FlightPlan& p);
  bool conflict(Cell cell, int arrivalTime) const;
  // True when `r` would trade places with an indexed plan across one edge
  // in the same tick.
  bool exchangesWith(const Route& r) const;
  const Topology& topology() const { return *topo_; }
  int fd() const { return fd_; }

 private:
  static std::uint64_t key(int cellIdx, int tick) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cellIdx)) << 32) |
           static_cast<std::uint32_t>(tick);
  }
  const Topology* topo_;
  int fd_;
  std::unordered_set<std::uint64_t> arrivals_;
  std::unordered_set<std::uint64_t> departures_;
  // (edge from->to, tick) for every hop of every indexed plan.
  std::unordered_set<std::uint64_t> hops_;
};

// Recursive X-then-Y route search with backtracking. X only ever increases
// (the generator's traffic flows away from the source edges); Y moves toward
// the destination. Returns an empty route when no path exists.
std::vector<Cell> generateRoute(Cell src, int arrivalTime, Cell dst, const ConflictIndex& index,
                                int fd);

// Same search shape with signed X steps and a static blocked predicate; used
// by the rerouter. The start cell itself is not tested.
std::vector<Cell> routeAvoiding(Cell src, Cell dst, const Topology& t,
                                const std::function<bool(Cell)>& blocked);

struct PlanBatch {
  std::vector<FlightPlan> plans;
  double lambdaParam = 0.0;
  std::uint64_t seed = 0;
  int n = 0;
  int fd = 1;
};

class PlanBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Draws source, destination and an exponential departure per source stream
// until m routes are accepted. Throws PlanBudgetExceeded after 100*m draws.
PlanBatch generateFlightPlans(int m, double lambdaParam, int fd, const Topology& t,
                              std::uint64_t seed, int fuel);

// Empty string when the batch is conflict free, exchange free, and every
// source keeps departures at least fd apart.
std::string batchDefect(const PlanBatch& b, const Topology& t);

// Occupancy and weather as seen by the rerouter when an aircraft is blocked.
struct NetworkView {
  std::function<bool(Cell)> stormy;
  std::function<bool(Cell)> occupied;  // occupied when the current tick began
};

struct RerouteResult {
  int stage = 3;          // 1 same length, 2 detour with delay, 3 wait
  bool needDelay = true;
  Route remainder;        // entries after the current sub-track
};

// Rerouting for an aircraft sitting on `current` whose next sub-track
// (remainder.front()) is unavailable at `now`.
RerouteResult rerouteRemainder(const Topology& t, Cell current, int now, const Route& remainder,
                               const NetworkView& view, int fd);

// Whole-plan convenience form: entries up to `currentTick` are kept.
FlightPlan reroute(const Topology& t, const FlightPlan& initialPlan, Cell currentCell,
                   int currentTick, Cell blockedNext, const NetworkView& view, int fd);

}  // namespace trackcheck

#endif  // TRACKCHECK_PLANNER_HH
