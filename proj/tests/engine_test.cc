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

#include <gtest/gtest.h>

#include "support.hh"

namespace {

using namespace trackcheck;
using tctest::along;
using tctest::plan;
using tctest::route;
using tctest::subTrack;

const StormEvent kNoStorm{Cell{0, 0}, 1'000'000, std::nullopt};

std::vector<FlightPlan> twoAreaPlans() {
  return {plan(1, tctest::subTrackRoute({{0, 7}, {1, 8}, {2, 9}, {3, 10}, {4, 11}, {5, 12}, {6, 6}}),
               30),
          plan(2, tctest::subTrackRoute({{5, 17}, {6, 11}, {7, 5}, {8, 4}, {9, 3}}), 30)};
}

TEST(InitialState, TwoAreaFixtureAtTickZero) {
  auto t = Topology::grid(6, 3, 3);
  auto w = makeWorld(t, 1, StormEvent{subTrack(8), 0, std::nullopt}, twoAreaPlans(),
                     Scope(t, {ComponentId{0, 0}}), {});
  auto s = initialStateFromPlans(w, 0);
  EXPECT_EQ(s.objs[0].status, ObjStatus::InTransit);
  EXPECT_EQ(w.route(s.objs[0])[s.objs[0].idx].cell, subTrack(7));
  EXPECT_EQ(s.objs[1].status, ObjStatus::Outside);
  EXPECT_TRUE(enabledEvents(w, s).empty());
  EXPECT_EQ(nextTick(w, s), 1);
}

TEST(InitialState, AfterAllArrivals) {
  auto t = Topology::grid(6, 3, 3);
  auto w = makeWorld(t, 1, kNoStorm, twoAreaPlans(), Scope::all(t), {});
  auto s = initialStateFromPlans(w, 50);
  for (const auto& o : s.objs) EXPECT_EQ(o.status, ObjStatus::Delivered);
  EXPECT_TRUE(isFinal(w, s));
  EXPECT_FALSE(nextTick(w, s).has_value());
}

TEST(InitialState, SinglePendingDeparture) {
  auto t = Topology::grid(3, 3, 3);
  auto w = makeWorld(t, 1, kNoStorm, {plan(1, route({{2, 0, 0}, {3, 1, 0}}))}, Scope::all(t), {});
  auto s = initialStateFromPlans(w, 0);
  EXPECT_EQ(s.objs[0].status, ObjStatus::Pending);
  EXPECT_EQ(nextTick(w, s), 2);
  auto s2 = advanceTime(w, s);
  ASSERT_TRUE(s2);
  auto ev = enabledEvents(w, *s2);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, EventKind::Depart);
  EXPECT_EQ(ev[0].tick, 2);
}

TEST(InitialState, RejectsSharedCell) {
  auto t = Topology::grid(3, 3, 3);
  std::vector<FlightPlan> plans{plan(1, route({{0, 1, 1}})), plan(2, route({{0, 1, 1}}))};
  auto w = makeWorld(t, 1, kNoStorm, plans, Scope::all(t), {});
  EXPECT_THROW(initialStateFromPlans(w, 0), std::invalid_argument);
}

TEST(DeriveERS, CrossingIntoNeighbourIsAReceive) {
  auto t = Topology::grid(6, 3, 3);
  auto ers = deriveERS(twoAreaPlans(), Scope(t, {ComponentId{0, 0}}), 0, t, 1);
  ASSERT_TRUE(ers.count(subTrack(10)));
  const auto& e = ers.at(subTrack(10)).ers;
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].kind, ErsKind::Receive);
  EXPECT_EQ(e[0].tick, 3);
  EXPECT_EQ(e[0].aircraftId, 1);
  EXPECT_EQ(ers.at(subTrack(10)).nextActionTick, 3);
  // blue comes back into the left area at tick 9 from sub-track 4
  ASSERT_TRUE(ers.count(subTrack(4)));
  EXPECT_EQ(ers.at(subTrack(4)).ers[0].kind, ErsKind::Send);
  EXPECT_EQ(ers.at(subTrack(4)).ers[0].tick, 9);
}

TEST(DeriveERS, NoCrossings) {
  auto t = Topology::grid(6, 3, 3);
  auto ers = deriveERS({plan(1, along(0, {Cell{0, 0}, Cell{1, 0}}))}, Scope(t, {ComponentId{0, 0}}),
                       0, t, 1);
  EXPECT_TRUE(ers.empty());
}

TEST(DeriveERS, DelaysAreTickDifferences) {
  auto t = Topology::grid(6, 3, 3);
  std::vector<FlightPlan> plans{plan(1, along(3, {Cell{2, 0}, Cell{3, 0}})),
                                plan(2, along(8, {Cell{2, 0}, Cell{3, 0}}))};
  auto ers = deriveERS(plans, Scope(t, {ComponentId{0, 0}}), 0, t, 1);
  ASSERT_EQ(ers.size(), 1u);
  const auto& e = ers.at(Cell{3, 0}).ers;
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].delay, 4);
  EXPECT_EQ(e[1].delay, 5);
}

TEST(Trigger, MoveIntoFreeCell) {
  auto t = Topology::grid(6, 3, 3);
  auto w = makeWorld(t, 1, kNoStorm, twoAreaPlans(), Scope(t, {ComponentId{0, 0}}), {});
  auto s = *advanceTime(w, initialStateFromPlans(w, 0));
  ASSERT_EQ(s.now, 1);
  auto ev = enabledEvents(w, s);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, EventKind::Move);
  auto n = trigger(w, s, ev[0]).state;
  EXPECT_EQ(n.objs[0].idx, 1);
  EXPECT_EQ(w.route(n.objs[0])[1], (PlanEntry{1, subTrack(8)}));
  EXPECT_EQ(w.route(n.objs[0])[2], (PlanEntry{2, subTrack(9)}));
  EXPECT_EQ(n.objs[0].fuel, 28);
}

TEST(Trigger, StormyNextCellIsNotConsumable) {
  auto t = Topology::grid(6, 3, 3);
  auto w = makeWorld(t, 1, StormEvent{subTrack(8), 0, std::nullopt}, twoAreaPlans(),
                     Scope(t, {ComponentId{0, 0}}), {});
  auto s = *advanceTime(w, initialStateFromPlans(w, 0));
  auto ev = enabledEvents(w, s);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, EventKind::Adapt);
}

TEST(Trigger, ArrivalDelivers) {
  auto t = Topology::grid(3, 3, 3);
  auto w = makeWorld(t, 1, kNoStorm, {plan(1, route({{0, 0, 0}}))}, Scope::all(t), {});
  auto s = *advanceTime(w, initialStateFromPlans(w, 0));
  auto ev = enabledEvents(w, s);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, EventKind::Arrive);
  auto n = trigger(w, s, ev[0]).state;
  EXPECT_EQ(n.objs[0].status, ObjStatus::Delivered);
  EXPECT_TRUE(isFinal(w, n));
}

TEST(Trigger, ReceiveExpectationConsumed) {
  auto t = Topology::grid(6, 3, 3);
  auto w = makeWorld(t, 1, kNoStorm, {plan(5, along(5, {Cell{2, 0}, Cell{3, 0}}))},
                     Scope(t, {ComponentId{0, 0}}), {});
  auto s = *advanceTime(w, initialStateFromPlans(w, 0));
  ASSERT_EQ(s.now, 5);
  auto d = trigger(w, s, enabledEvents(w, s).at(0)).state;
  auto s6 = *advanceTime(w, d);
  ASSERT_EQ(s6.now, 6);
  auto ev = enabledEvents(w, s6);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, EventKind::ToEnv);
  auto n = trigger(w, s6, ev[0]).state;
  EXPECT_TRUE(w.ersDone(n, static_cast<std::size_t>(ev[0].ersIdx)));
  EXPECT_TRUE(isFinal(w, n));
}

TEST(Trigger, FuelExhaustionIsDisaster) {
  auto t = Topology::grid(3, 3, 3);
  auto w = makeWorld(t, 1, kNoStorm, {plan(7, along(0, {Cell{0, 0}, Cell{1, 0}, Cell{2, 0}}), 2)},
                     Scope::all(t), {});
  auto s = initialStateFromPlans(w, 0);
  ASSERT_EQ(s.objs[0].fuel, 1);
  auto s1 = *advanceTime(w, s);
  auto r = trigger(w, s1, enabledEvents(w, s1).at(0));
  ASSERT_TRUE(r.disasterAircraft);
  EXPECT_EQ(*r.disasterAircraft, 7);
}

TEST(AdvanceTime, JumpsToEarliestTag) {
  auto t = Topology::grid(3, 3, 3);
  auto w = makeWorld(t, 1, kNoStorm,
                     {plan(1, route({{5, 0, 0}})), plan(2, route({{7, 0, 1}}))}, Scope::all(t), {});
  auto s = initialStateFromPlans(w, 2);
  EXPECT_EQ(advanceTime(w, s)->now, 5);
}

TEST(AdvanceTime, EnvActionsParticipate) {
  auto t = Topology::grid(6, 3, 3);
  std::vector<FlightPlan> plans{plan(1, along(3, {Cell{3, 0}, Cell{2, 0}})),
                                plan(2, route({{6, 0, 1}}))};
  auto w = makeWorld(t, 1, kNoStorm, plans, Scope(t, {ComponentId{0, 0}}), {});
  EXPECT_EQ(advanceTime(w, initialStateFromPlans(w, 0))->now, 4);
}

TEST(IsDeadlock, EnvSendIntoOccupiedCellIsMissedSend) {
  auto t = Topology::grid(6, 3, 3);
  std::vector<FlightPlan> plans{plan(1, route({{3, 3, 0}, {4, 2, 0}, {5, 2, 1}})),
                                plan(2, route({{3, 2, 0}, {6, 1, 0}}))};
  auto w = makeWorld(t, 1, kNoStorm, plans, Scope(t, {ComponentId{0, 0}}), {});
  auto s = initialStateFromPlans(w, 3);
  auto s4 = *advanceTime(w, s);
  ASSERT_EQ(s4.now, 4);
  EXPECT_TRUE(enabledEvents(w, s4).empty());
  auto d = isDeadlock(w, s4);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0], (Diagnosis{Cell{3, 0}, ComponentId{1, 0}, 4, DiagnosisKind::MissedSend, 1}));
}

TEST(IsDeadlock, LateDeliveryIsMissedReceive) {
  auto t = Topology::grid(6, 3, 3);
  auto w = makeWorld(t, 1, kNoStorm, {plan(1, along(2, {Cell{2, 0}, Cell{3, 0}}))},
                     Scope(t, {ComponentId{0, 0}}), {});
  auto s = initialStateFromPlans(w, 2);
  s.now = 3;
  s.objs[0].planId = w.routes->intern(route({{2, 2, 0}, {4, 3, 0}}));
  auto d = isDeadlock(w, s);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0], (Diagnosis{Cell{3, 0}, ComponentId{1, 0}, 3, DiagnosisKind::MissedReceive, 1}));
}

TEST(IsDeadlock, UnexpectedBorderCellIsMismatch) {
  auto t = Topology::grid(6, 3, 3);
  auto w = makeWorld(t, 1, kNoStorm, {plan(1, along(2, {Cell{2, 0}, Cell{3, 0}}))},
                     Scope(t, {ComponentId{0, 0}}), {});
  auto s = initialStateFromPlans(w, 2);
  s.objs[0].planId = w.routes->intern(route({{2, 2, 1}, {3, 3, 1}}));
  s.now = 3;
  auto d = isDeadlock(w, s);
  ASSERT_FALSE(d.empty());
  EXPECT_EQ(d[0].kind, DiagnosisKind::Mismatch);
  EXPECT_EQ(d[0].envActorCell, (Cell{3, 1}));
}

TEST(IsDeadlock, NoneWhenEventsEnabledOrFinal) {
  auto t = Topology::grid(6, 3, 3);
  auto w = makeWorld(t, 1, kNoStorm, twoAreaPlans(), Scope(t, {ComponentId{0, 0}}), {});
  auto s1 = *advanceTime(w, initialStateFromPlans(w, 0));
  EXPECT_TRUE(isDeadlock(w, s1).empty());
  auto done = initialStateFromPlans(w, 50);
  EXPECT_TRUE(isDeadlock(w, done).empty());
}

TEST(AdvanceTime, PermanentBlockageStalls) {
  // the only way forward is under a storm that never clears
  auto t = Topology::grid(2, 1, 1);
  auto w = makeWorld(t, 1, StormEvent{Cell{1, 0}, 0, std::nullopt},
                     {plan(1, along(0, {Cell{0, 0}, Cell{1, 0}}), 100)}, Scope::all(t), {});
  auto res = generateStateSpace(w, initialStateFromPlans(w, 0));
  ASSERT_EQ(res.verdict.kind, VerdictKind::Deadlock);
  ASSERT_EQ(res.verdict.diagnoses.size(), 1u);
  EXPECT_EQ(res.verdict.diagnoses[0].kind, DiagnosisKind::Blockage);
  EXPECT_EQ(res.verdict.diagnoses[0].envActorCell, (Cell{0, 0}));
}

TEST(AdvanceTime, ClearingStormDoesNotStall) {
  auto t = Topology::grid(2, 1, 1);
  auto w = makeWorld(t, 1, StormEvent{Cell{1, 0}, 0, 8},
                     {plan(1, along(0, {Cell{0, 0}, Cell{1, 0}}), 100)}, Scope::all(t), {});
  auto res = generateStateSpace(w, initialStateFromPlans(w, 0));
  EXPECT_EQ(res.verdict.kind, VerdictKind::Compatible);
  for (const auto& d : res.verdict.diagnoses)
    ADD_FAILURE() << toString(d.kind) << " at " << d.tick << " " << toString(d.envActorCell);
}

}  // namespace
