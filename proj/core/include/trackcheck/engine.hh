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

#ifndef TRACKCHECK_ENGINE_HH
#define TRACKCHECK_ENGINE_HH

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trackcheck/plan.hh"
#include "trackcheck/planner.hh"
#include "trackcheck/topology.hh"

namespace trackcheck {

enum class DiagnosisKind : std::uint8_t { MissedSend, MissedReceive, Blockage, Mismatch };

std::string toString(DiagnosisKind k);

struct Diagnosis {
  Cell envActorCell;
  ComponentId component;
  int tick = 0;
  DiagnosisKind kind = DiagnosisKind::MissedSend;
  int aircraftId = 0;
  auto operator<=>(const Diagnosis&) const = default;

  // Env-side failures name a neighbour to absorb; blockage does not.
  bool namesEnvironment() const { return kind != DiagnosisKind::Blockage; }
};

enum class ErsKind : std::uint8_t { Send = 0, Receive = 1 };

// One expectation of an augmented environment actor. `routeIdx` is the
// index of the in-scope side of the crossing in the aircraft's original
// plan (entry cell for sends, exit cell for receives).
struct ERSEntry {
  int objIdx = 0;
  int aircraftId = 0;
  int tick = 0;
  int delay = 0;  // ticks since the previous entry of the same actor
  Channel channel;
  ErsKind kind = ErsKind::Send;
  int routeIdx = 0;
  int fuel = 0;  // fuel carried on a send, before the receive decrement
};

struct EnvActorState {
  Cell cell;
  std::vector<ERSEntry> ers;
  int nextActionTick = 0;
};

// Env actors keyed by cell, each list ordered by (tick, kind, aircraft).
std::map<Cell, EnvActorState> deriveERS(const std::vector<FlightPlan>& plans, const Scope& scope,
                                        int t, const Topology& topo, int fd);

enum class ObjStatus : std::uint8_t { Outside = 0, Pending = 1, InTransit = 2, Delivered = 3 };

struct ObjState {
  static constexpr std::uint8_t kAdaptedNow = 1;
  static constexpr std::uint8_t kScriptUsed = 2;
  static constexpr std::uint8_t kWaitedNow = 4;

  ObjStatus status = ObjStatus::Outside;
  std::uint8_t flags = 0;
  std::uint16_t idx = 0;    // current route entry while in transit
  std::uint32_t planId = 0;  // route in the world's RouteTable
  std::int32_t fuel = 0;
  bool operator==(const ObjState&) const = default;
};

// One explicit state. Occupancy and the event buffer are implied by the
// object records; `startOcc` is the occupancy when the current tick began.
struct ModelState {
  int now = 0;
  std::vector<ObjState> objs;
  std::vector<std::uint64_t> ersDone;
  std::vector<std::uint64_t> startOcc;
  std::uint16_t quietTicks = 0;
  bool moved = false;
  bool operator==(const ModelState&) const = default;
};

// Static context of one analysis: grid, weather, original plans, scope and
// the flattened env expectations.
struct World {
  const Topology* topo = nullptr;
  int fd = 1;
  StormEvent storm;
  std::vector<FlightPlan> original;
  Scope scope;
  std::vector<ERSEntry> ers;                     // grouped by actor
  std::vector<std::pair<int, int>> actorRange;   // per cell index, [begin, end) into ers
  std::map<int, Route> scripted;                 // objIdx -> replacement plan
  std::shared_ptr<RouteTable> routes;
  std::vector<std::uint32_t> originalIds;
  int stallTicks = 4;

  const Route& route(const ObjState& o) const { return routes->at(o.planId); }
  bool ersDone(const ModelState& s, std::size_t i) const {
    return (s.ersDone[i >> 6] >> (i & 63)) & 1u;
  }
};

// Builds the world for `scope`. The ERS covers every border crossing of the
// original plans; entries at or before the start tick are marked done by
// initialStateFromPlans / extendScope.
World makeWorld(const Topology& topo, int fd, StormEvent storm, std::vector<FlightPlan> original,
                Scope scope, std::map<int, Route> scripted,
                std::shared_ptr<RouteTable> routes = nullptr);

// Snapshot of the plans at tick t restricted to the world's scope.
// Throws std::invalid_argument when two aircraft share a cell.
ModelState initialStateFromPlans(const World& w, int t);

// Places aircraft of newly absorbed components from their original plans at
// s.now. `w` must be the enlarged world built over the same RouteTable.
ModelState extendScope(const World& w, const ModelState& s);

enum class EventKind : std::uint8_t {
  Depart,   // airport into source cell
  Move,     // in-scope cell to in-scope cell
  Arrive,   // last cell to destination airport
  ToEnv,    // consumed by an env actor's receive expectation
  FromEnv,  // env actor's send into the scope
  Adapt,    // blocked send handed to the rerouter
  Wait,     // blocked departure, or second blockage within one tick
};

std::string toString(EventKind k);

struct Event {
  int tick = 0;
  EventKind kind = EventKind::Move;
  int receiver = 0;  // cell index; cellCount() stands for the airport
  int objIdx = 0;
  int ersIdx = -1;
  auto operator<=>(const Event&) const = default;
};

struct Expansion {
  std::vector<Event> events;            // branches in canonical order
  std::vector<Diagnosis> diagnoses;     // non-empty: deadlock state
  bool timed() const { return events.empty() && diagnoses.empty(); }
};

Expansion expand(const World& w, const ModelState& s);

// Events enabled at s.now in canonical (tick, receiver, aircraft) order.
std::vector<Event> enabledEvents(const World& w, const ModelState& s);

struct TriggerResult {
  ModelState state;
  std::optional<int> disasterAircraft;
};

TriggerResult trigger(const World& w, const ModelState& s, const Event& e);

// Next tick with scheduled activity, if any.
std::optional<int> nextTick(const World& w, const ModelState& s);

// Advances a timed state to its next tick. Returns nullopt on a final or
// stuck state; a stall diagnosis is reported through `stall`.
std::optional<ModelState> advanceTime(const World& w, const ModelState& s,
                                      std::optional<Diagnosis>* stall = nullptr);

std::vector<Diagnosis> isDeadlock(const World& w, const ModelState& s);

// No aircraft pending or in transit and every expectation met.
bool isFinal(const World& w, const ModelState& s);

// Per cell index: the object index occupying it, or -1.
std::vector<int> occupancy(const World& w, const ModelState& s);

// First cell claimed by two in-transit aircraft, if any.
std::optional<Cell> occupancyClash(const World& w, const ModelState& s);

std::vector<FlightPlan> currentPlans(const World& w, const ModelState& s);

}  // namespace trackcheck

#endif  // TRACKCHECK_ENGINE_HH
