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

#ifndef TRACKCHECK_COMPOSE_HH
#define TRACKCHECK_COMPOSE_HH

#include <map>
#include <optional>
#include <vector>

#include "trackcheck/engine.hh"
#include "trackcheck/explore.hh"

namespace trackcheck {

// Everything one analysis needs: grid, weather, the plans in force when the
// storm hits, and optional coordinator-supplied replacement plans.
struct Problem {
  const Topology* topo = nullptr;
  int fd = 1;
  StormEvent storm;
  std::vector<FlightPlan> plans;
  std::map<int, Route> scripted;  // aircraftId -> replacement plan
  Limits limits;
  TransitionHook hook;
};

// Earliest crossing between two components that the original plans did not
// schedule. `detectedAt` is the tick at which an env actor of `to` first
// failed, when `to` was outside the scope at that point.
struct Propagation {
  ComponentId from;
  ComponentId to;
  int tick = 0;
  std::optional<int> detectedAt;
  auto operator<=>(const Propagation&) const = default;
};

struct IterationRecord {
  std::vector<ComponentId> scope;
  ExplorationStats stats;
  Verdict verdict;
  std::optional<int> deadlockTick;
  std::vector<ComponentId> absorbed;
};

struct ComposeReport {
  Verdict verdict;
  int iterations = 0;
  std::vector<ComponentId> finalScope;
  std::vector<IterationRecord> perIteration;
  ExplorationStats total;
  bool successTraceExists = false;
  // Plans executed along the canonical first-choice trace of the final scope.
  std::vector<FlightPlan> adaptedPlans;
  std::vector<Propagation> propagations;
};

// Wraps generateStateSpace over one scope and its env expectations.
ExplorationResult checkCompatibility(const World& w, const std::vector<ModelState>& seeds,
                                     const ExploreOptions& opts);

// Grows the scope from the storm's component until no env actor fails.
ComposeReport runCompositional(const Problem& p);

// Whole grid in one pass with the same adaptation policy.
ComposeReport runMonolithic(const Problem& p);

// Same verdict class, or at least one side timed out.
bool verdictsAgree(const Verdict& a, const Verdict& b);

struct WitnessTrace {
  std::vector<FlightPlan> executed;
  std::vector<std::pair<int, Event>> events;  // (tick, event) in firing order
  std::optional<Diagnosis> stoppedBy;
};

// Fires the canonical first enabled event at every step.
WitnessTrace simulateFirstChoice(const World& w, const ModelState& s0, int maxTicks = 100000);

// Off-schedule crossings of `executed` relative to `original`.
std::vector<Propagation> offScheduleCrossings(const Topology& t,
                                              const std::vector<FlightPlan>& original,
                                              const std::vector<FlightPlan>& executed);

}  // namespace trackcheck

#endif  // TRACKCHECK_COMPOSE_HH
