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

#include "trackcheck/engine.hh"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace trackcheck {

std::string toString(DiagnosisKind k) {
  switch (k) {
    case DiagnosisKind::MissedSend: return "missed-send";
    case DiagnosisKind::MissedReceive: return "missed-receive";
    case DiagnosisKind::Blockage: return "blockage";
    case DiagnosisKind::Mismatch: return "mismatch";
  }
  return "?";
}

std::string toString(EventKind k) {
  switch (k) {
    case EventKind::Depart: return "depart";
    case EventKind::Move: return "move";
    case EventKind::Arrive: return "arrive";
    case EventKind::ToEnv: return "to-env";
    case EventKind::FromEnv: return "from-env";
    case EventKind::Adapt: return "adapt";
    case EventKind::Wait: return "wait";
  }
  return "?";
}

namespace {

void setBit(std::vector<std::uint64_t>& bits, std::size_t i) { bits[i >> 6] |= 1ull << (i & 63); }

bool testBit(const std::vector<std::uint64_t>& bits, std::size_t i) {
  return (bits[i >> 6] >> (i & 63)) & 1u;
}

std::vector<std::uint64_t> occupancyBits(const std::vector<int>& occ) {
  std::vector<std::uint64_t> bits((occ.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < occ.size(); ++i)
    if (occ[i] >= 0) setBit(bits, i);
  return bits;
}

std::vector<std::uint64_t> doneUpTo(const World& w, int t) {
  std::vector<std::uint64_t> bits((w.ers.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < w.ers.size(); ++i)
    if (w.ers[i].tick <= t) setBit(bits, i);
  return bits;
}

// Entries of one actor are consumed in tick order; equal ticks in any order.
bool headOfActor(const World& w, const ModelState& s, std::size_t i, int actorCell) {
  auto [b, e] = w.actorRange[actorCell];
  for (int j = b; j < e; ++j) {
    if (static_cast<std::size_t>(j) == i) return true;
    if (w.ers[j].tick < w.ers[i].tick && !w.ersDone(s, j)) return false;
  }
  return true;
}

int fuelSpent(const Route& r, std::size_t idx) { return r[idx].tick - r.front().tick; }

Route withRemainder(const Route& r, std::size_t idx, const Route& rem) {
  Route out(r.begin(), r.begin() + static_cast<long>(idx) + 1);
  out.insert(out.end(), rem.begin(), rem.end());
  return out;
}

}  // namespace

std::map<Cell, EnvActorState> deriveERS(const std::vector<FlightPlan>& plans, const Scope& scope,
                                        int t, const Topology& topo, int fd) {
  (void)fd;
  std::map<Cell, EnvActorState> out;
  for (std::size_t k = 0; k < plans.size(); ++k) {
    const auto& r = plans[k].entries;
    for (std::size_t j = 1; j < r.size(); ++j) {
      if (r[j].tick <= t) continue;
      bool inPrev = scope.containsCell(topo.index(r[j - 1].cell));
      bool inCur = scope.containsCell(topo.index(r[j].cell));
      if (inPrev == inCur) continue;
      ERSEntry e;
      e.objIdx = static_cast<int>(k);
      e.aircraftId = plans[k].aircraftId;
      e.tick = r[j].tick;
      e.channel = channelBetween(r[j - 1].cell, r[j].cell);
      Cell actor;
      if (inCur) {
        e.kind = ErsKind::Send;
        e.routeIdx = static_cast<int>(j);
        e.fuel = plans[k].fuel - fuelSpent(r, j);
        actor = r[j - 1].cell;
      } else {
        e.kind = ErsKind::Receive;
        e.routeIdx = static_cast<int>(j - 1);
        actor = r[j].cell;
      }
      auto& st = out[actor];
      st.cell = actor;
      st.ers.push_back(e);
    }
  }
  for (auto& [cell, st] : out) {
    std::sort(st.ers.begin(), st.ers.end(), [](const ERSEntry& a, const ERSEntry& b) {
      return std::tie(a.tick, a.kind, a.aircraftId) < std::tie(b.tick, b.kind, b.aircraftId);
    });
    int prev = std::max(t, 0);
    for (auto& e : st.ers) {
      e.delay = e.tick - prev;
      prev = e.tick;
    }
    st.nextActionTick = st.ers.front().tick;
  }
  return out;
}

World makeWorld(const Topology& topo, int fd, StormEvent storm, std::vector<FlightPlan> original,
                Scope scope, std::map<int, Route> scripted, std::shared_ptr<RouteTable> routes) {
  World w;
  w.topo = &topo;
  w.fd = fd;
  w.storm = storm;
  w.original = std::move(original);
  w.scope = std::move(scope);
  w.scripted = std::move(scripted);
  w.routes = routes ? std::move(routes) : std::make_shared<RouteTable>();
  for (const auto& p : w.original) {
    if (p.entries.empty()) throw std::invalid_argument("empty plan");
    w.originalIds.push_back(w.routes->intern(p.entries));
  }
  w.actorRange.assign(static_cast<std::size_t>(topo.cellCount()), {0, 0});
  for (auto& [cell, st] : deriveERS(w.original, w.scope, -1, topo, fd)) {
    int b = static_cast<int>(w.ers.size());
    w.ers.insert(w.ers.end(), st.ers.begin(), st.ers.end());
    w.actorRange[topo.index(cell)] = {b, static_cast<int>(w.ers.size())};
  }
  return w;
}

std::vector<int> occupancy(const World& w, const ModelState& s) {
  std::vector<int> occ(static_cast<std::size_t>(w.topo->cellCount()), -1);
  for (std::size_t k = 0; k < s.objs.size(); ++k) {
    const auto& o = s.objs[k];
    if (o.status != ObjStatus::InTransit) continue;
    int c = w.topo->index(w.route(o)[o.idx].cell);
    if (occ[c] < 0) occ[c] = static_cast<int>(k);
  }
  return occ;
}

std::optional<Cell> occupancyClash(const World& w, const ModelState& s) {
  std::vector<char> seen(static_cast<std::size_t>(w.topo->cellCount()), 0);
  for (const auto& o : s.objs) {
    if (o.status != ObjStatus::InTransit) continue;
    Cell c = w.route(o)[o.idx].cell;
    if (seen[w.topo->index(c)]++) return c;
  }
  return std::nullopt;
}

ModelState initialStateFromPlans(const World& w, int t) {
  ModelState s;
  s.now = t;
  s.objs.resize(w.original.size());
  std::vector<int> occ(static_cast<std::size_t>(w.topo->cellCount()), -1);
  for (std::size_t k = 0; k < w.original.size(); ++k) {
    const auto& p = w.original[k];
    const auto& r = p.entries;
    auto& o = s.objs[k];
    o.planId = w.originalIds[k];
    o.fuel = p.fuel;
    if (exitTick(r, r.size() - 1, w.fd) <= t) {
      o.status = ObjStatus::Delivered;
      o.idx = static_cast<std::uint16_t>(r.size() - 1);
      o.fuel = p.fuel - (exitTick(r, r.size() - 1, w.fd) - r.front().tick);
      continue;
    }
    if (r.front().tick > t) {
      o.status = w.scope.containsCell(w.topo->index(r.front().cell)) ? ObjStatus::Pending
                                                                     : ObjStatus::Outside;
      continue;
    }
    auto i = entryAt(r, t, w.fd);
    int c = w.topo->index(r[*i].cell);
    if (!w.scope.containsCell(c)) continue;
    if (occ[c] >= 0) {
      throw std::invalid_argument("aircraft " + std::to_string(w.original[occ[c]].aircraftId) +
                                  " and " + std::to_string(p.aircraftId) + " share " +
                                  toString(r[*i].cell) + " at tick " + std::to_string(t));
    }
    occ[c] = static_cast<int>(k);
    o.status = ObjStatus::InTransit;
    o.idx = static_cast<std::uint16_t>(*i);
    o.fuel = p.fuel - (exitTick(r, *i, w.fd) - r.front().tick);
  }
  s.ersDone = doneUpTo(w, t);
  s.startOcc = occupancyBits(occ);
  return s;
}

ModelState extendScope(const World& w, const ModelState& s) {
  ModelState n = s;
  auto occ = occupancy(w, s);
  const int t = s.now;
  for (std::size_t k = 0; k < w.original.size(); ++k) {
    auto& o = n.objs[k];
    if (o.status != ObjStatus::Outside) continue;
    const auto& p = w.original[k];
    const auto& r = p.entries;
    if (r.front().tick > t) {
      if (w.scope.containsCell(w.topo->index(r.front().cell))) {
        o.status = ObjStatus::Pending;
        o.planId = w.originalIds[k];
        o.fuel = p.fuel;
      }
      continue;
    }
    auto i = entryAt(r, t, w.fd);
    if (!i) continue;
    int c = w.topo->index(r[*i].cell);
    if (!w.scope.containsCell(c)) continue;
    if (occ[c] >= 0) {
      throw std::invalid_argument("absorbed aircraft " + std::to_string(p.aircraftId) +
                                  " lands on occupied " + toString(r[*i].cell));
    }
    occ[c] = static_cast<int>(k);
    o.status = ObjStatus::InTransit;
    o.planId = w.originalIds[k];
    o.idx = static_cast<std::uint16_t>(*i);
    o.fuel = p.fuel - (exitTick(r, *i, w.fd) - r.front().tick);
  }
  n.ersDone = doneUpTo(w, t);
  n.startOcc = occupancyBits(occ);
  return n;
}

Expansion expand(const World& w, const ModelState& s) {
  const Topology& topo = *w.topo;
  const int now = s.now;
  const int airport = topo.cellCount();
  const bool stormNow = w.storm.activeAt(now);
  const int stormIdx = topo.contains(w.storm.cell) ? topo.index(w.storm.cell) : -1;
  auto occ = occupancy(w, s);
  auto freeCell = [&](int c) { return occ[c] < 0 && !(stormNow && c == stormIdx); };

  Expansion out;
  std::vector<Event> blocked;
  std::vector<std::size_t> blockedEnv;

  for (std::size_t k = 0; k < s.objs.size(); ++k) {
    const auto& o = s.objs[k];
    const int ki = static_cast<int>(k);
    if (o.status == ObjStatus::Pending) {
      const auto& r = w.route(o);
      if (r.front().tick != now) continue;
      int c = topo.index(r.front().cell);
      if (freeCell(c))
        out.events.push_back(Event{now, EventKind::Depart, c, ki});
      else
        blocked.push_back(Event{now, EventKind::Wait, c, ki});
      continue;
    }
    if (o.status != ObjStatus::InTransit) continue;
    const auto& r = w.route(o);
    if (exitTick(r, o.idx, w.fd) != now) continue;
    if (static_cast<std::size_t>(o.idx) + 1 == r.size()) {
      out.events.push_back(Event{now, EventKind::Arrive, airport, ki});
      continue;
    }
    Cell here = r[o.idx].cell;
    Cell next = r[o.idx + 1].cell;
    int c = topo.index(next);
    if (w.scope.containsCell(c)) {
      if (freeCell(c)) {
        out.events.push_back(Event{now, EventKind::Move, c, ki});
      } else {
        auto kind = (o.flags & ObjState::kAdaptedNow) ? EventKind::Wait : EventKind::Adapt;
        blocked.push_back(Event{now, kind, topo.index(here), ki});
      }
      continue;
    }
    int match = -1;
    auto [b, e] = w.actorRange[c];
    for (int j = b; j < e; ++j) {
      const auto& en = w.ers[j];
      if (en.kind == ErsKind::Receive && en.objIdx == ki && en.tick == now &&
          en.channel.source == here && !w.ersDone(s, j) && headOfActor(w, s, j, c)) {
        match = j;
        break;
      }
    }
    if (match >= 0) {
      out.events.push_back(Event{now, EventKind::ToEnv, c, ki, match});
    } else {
      out.diagnoses.push_back(Diagnosis{next, topo.componentOf(next), now,
                                        DiagnosisKind::Mismatch, w.original[k].aircraftId});
    }
  }

  for (std::size_t i = 0; i < w.ers.size(); ++i) {
    const auto& en = w.ers[i];
    if (en.kind != ErsKind::Send || en.tick != now || w.ersDone(s, i)) continue;
    int actor = topo.index(en.channel.source);
    if (!headOfActor(w, s, i, actor)) continue;
    int c = topo.index(en.channel.sink);
    if (s.objs[en.objIdx].status == ObjStatus::Outside && freeCell(c))
      out.events.push_back(Event{now, EventKind::FromEnv, c, en.objIdx, static_cast<int>(i)});
    else
      blockedEnv.push_back(i);
  }

  auto canonical = [](const Event& a, const Event& b) {
    return std::tie(a.tick, a.receiver, a.objIdx, a.kind, a.ersIdx) <
           std::tie(b.tick, b.receiver, b.objIdx, b.kind, b.ersIdx);
  };

  if (!out.diagnoses.empty()) {
    out.events.clear();
    std::sort(out.diagnoses.begin(), out.diagnoses.end());
    return out;
  }
  if (!out.events.empty()) {
    std::sort(out.events.begin(), out.events.end(), canonical);
    return out;
  }
  if (!blocked.empty()) {
    out.events = std::move(blocked);
    std::sort(out.events.begin(), out.events.end(), canonical);
    return out;
  }

  // Quiescent at `now`: any expectation still open here is missed.
  for (std::size_t i = 0; i < w.ers.size(); ++i) {
    const auto& en = w.ers[i];
    if (en.tick > now || w.ersDone(s, i)) continue;
    Cell actor = en.kind == ErsKind::Send ? en.channel.source : en.channel.sink;
    auto kind = en.kind == ErsKind::Send ? DiagnosisKind::MissedSend : DiagnosisKind::MissedReceive;
    out.diagnoses.push_back(Diagnosis{actor, topo.componentOf(actor), en.tick, kind, en.aircraftId});
  }
  std::sort(out.diagnoses.begin(), out.diagnoses.end());
  out.diagnoses.erase(std::unique(out.diagnoses.begin(), out.diagnoses.end()),
                      out.diagnoses.end());
  return out;
}

std::vector<Event> enabledEvents(const World& w, const ModelState& s) { return expand(w, s).events; }

std::vector<Diagnosis> isDeadlock(const World& w, const ModelState& s) {
  return expand(w, s).diagnoses;
}

namespace {

// Rerouter view: in-scope occupancy as of the tick start, out-of-scope
// occupancy from original plans of aircraft the state does not track.
NetworkView rerouteView(const World& w, const ModelState& s) {
  const Topology& topo = *w.topo;
  std::vector<char> outside(static_cast<std::size_t>(topo.cellCount()), 0);
  if (!w.scope.isAll(topo)) {
    for (std::size_t k = 0; k < s.objs.size(); ++k) {
      if (s.objs[k].status != ObjStatus::Outside) continue;
      const auto& r = w.original[k].entries;
      auto i = entryAt(r, s.now - 1, w.fd);
      if (i) outside[topo.index(r[*i].cell)] = 1;
    }
  }
  NetworkView v;
  const bool stormNow = w.storm.activeAt(s.now);
  const Cell storm = w.storm.cell;
  v.stormy = [stormNow, storm](Cell c) { return stormNow && c == storm; };
  v.occupied = [&w, &s, outside = std::move(outside)](Cell c) {
    int i = w.topo->index(c);
    if (w.scope.containsCell(i)) return testBit(s.startOcc, static_cast<std::size_t>(i));
    return outside[i] != 0;
  };
  return v;
}

void adapt(const World& w, ModelState& n, std::size_t k) {
  auto& o = n.objs[k];
  const Route& r = w.route(o);
  const Cell here = r[o.idx].cell;
  const int oldExit = n.now;

  auto script = w.scripted.find(static_cast<int>(k));
  if (script != w.scripted.end() && !(o.flags & ObjState::kScriptUsed)) {
    const Route& sr = script->second;
    std::optional<std::size_t> at;
    for (std::size_t i = 0; i + 1 < sr.size(); ++i)
      if (sr[i].cell == here && sr[i].tick <= n.now) at = i;
    if (at) {
      int delay = exitTick(sr, *at, w.fd) - oldExit;
      o.planId = w.routes->intern(sr);
      o.idx = static_cast<std::uint16_t>(*at);
      o.flags |= ObjState::kScriptUsed | ObjState::kAdaptedNow;
      if (delay > 0) {
        o.fuel -= delay;
        o.flags |= ObjState::kWaitedNow;
      }
      return;
    }
  }

  Route rem(r.begin() + o.idx + 1, r.end());
  auto view = rerouteView(w, n);
  auto res = rerouteRemainder(*w.topo, here, n.now, rem, view, w.fd);
  o.planId = w.routes->intern(withRemainder(r, o.idx, res.remainder));
  o.flags |= ObjState::kAdaptedNow;
  int delay = res.remainder.front().tick - oldExit;
  if (delay > 0) {
    o.fuel -= delay;
    o.flags |= ObjState::kWaitedNow;
  }
}

}  // namespace

TriggerResult trigger(const World& w, const ModelState& s, const Event& e) {
  TriggerResult res{s, std::nullopt};
  ModelState& n = res.state;
  auto& o = n.objs[e.objIdx];
  const int now = s.now;
  auto receive = [&](const Route& r, std::size_t idx) {
    o.fuel -= exitTick(r, idx, w.fd) - now;
    if (o.fuel <= 0) res.disasterAircraft = w.original[e.objIdx].aircraftId;
  };

  switch (e.kind) {
    case EventKind::Depart: {
      o.status = ObjStatus::InTransit;
      o.idx = 0;
      receive(w.route(o), 0);
      n.moved = true;
      break;
    }
    case EventKind::Move: {
      o.idx = static_cast<std::uint16_t>(o.idx + 1);
      receive(w.route(o), o.idx);
      n.moved = true;
      break;
    }
    case EventKind::Arrive:
      o.status = ObjStatus::Delivered;
      n.moved = true;
      break;
    case EventKind::ToEnv:
      o.status = ObjStatus::Outside;
      setBit(n.ersDone, static_cast<std::size_t>(e.ersIdx));
      n.moved = true;
      break;
    case EventKind::FromEnv: {
      const auto& en = w.ers[e.ersIdx];
      o.status = ObjStatus::InTransit;
      o.planId = w.originalIds[e.objIdx];
      o.idx = static_cast<std::uint16_t>(en.routeIdx);
      o.fuel = en.fuel;
      receive(w.route(o), o.idx);
      setBit(n.ersDone, static_cast<std::size_t>(e.ersIdx));
      n.moved = true;
      break;
    }
    case EventKind::Adapt:
      adapt(w, n, static_cast<std::size_t>(e.objIdx));
      break;
    case EventKind::Wait: {
      const Route& r = w.route(o);
      if (o.status == ObjStatus::Pending) {
        o.planId = w.routes->intern(shifted(r, 1));
      } else {
        Route rem(r.begin() + o.idx + 1, r.end());
        o.planId = w.routes->intern(withRemainder(r, o.idx, shifted(rem, 1)));
        o.fuel -= 1;
      }
      o.flags |= ObjState::kWaitedNow | ObjState::kAdaptedNow;
      break;
    }
  }
  return res;
}

std::optional<int> nextTick(const World& w, const ModelState& s) {
  std::optional<int> best;
  auto consider = [&](int t) {
    if (t > s.now && (!best || t < *best)) best = t;
  };
  for (const auto& o : s.objs) {
    if (o.status == ObjStatus::InTransit)
      consider(exitTick(w.route(o), o.idx, w.fd));
    else if (o.status == ObjStatus::Pending)
      consider(w.route(o).front().tick);
  }
  for (std::size_t i = 0; i < w.ers.size(); ++i)
    if (!w.ersDone(s, i)) consider(w.ers[i].tick);
  return best;
}

std::optional<ModelState> advanceTime(const World& w, const ModelState& s,
                                      std::optional<Diagnosis>* stall) {
  auto next = nextTick(w, s);
  if (!next) return std::nullopt;
  ModelState n = s;
  int transit = 0;
  int waited = 0;
  std::optional<std::size_t> firstStuck;
  for (std::size_t k = 0; k < n.objs.size(); ++k) {
    auto& o = n.objs[k];
    if (o.status == ObjStatus::InTransit) {
      ++transit;
      if (o.flags & ObjState::kWaitedNow) {
        ++waited;
        if (!firstStuck) firstStuck = k;
      }
    }
    o.flags &= static_cast<std::uint8_t>(~(ObjState::kAdaptedNow | ObjState::kWaitedNow));
  }
  // Ticks spent under weather that is still going to change are not evidence
  // of a permanent blockage.
  bool quiet = !s.moved && transit > 0 && waited == transit && *next == s.now + 1 &&
               w.storm.permanentAfter(s.now);
  n.quietTicks = quiet ? static_cast<std::uint16_t>(s.quietTicks + 1) : 0;
  n.moved = false;
  n.now = *next;
  n.startOcc = occupancyBits(occupancy(w, n));

  if (n.quietTicks >= w.stallTicks) {
    if (stall) {
      const auto& o = s.objs[*firstStuck];
      Cell c = w.route(o)[o.idx].cell;
      *stall = Diagnosis{c, w.topo->componentOf(c), n.now, DiagnosisKind::Blockage,
                         w.original[*firstStuck].aircraftId};
    }
    return std::nullopt;
  }
  return n;
}

bool isFinal(const World& w, const ModelState& s) {
  for (const auto& o : s.objs)
    if (o.status == ObjStatus::Pending || o.status == ObjStatus::InTransit) return false;
  for (std::size_t i = 0; i < w.ers.size(); ++i)
    if (!w.ersDone(s, i)) return false;
  return true;
}

std::vector<FlightPlan> currentPlans(const World& w, const ModelState& s) {
  std::vector<FlightPlan> out;
  for (std::size_t k = 0; k < s.objs.size(); ++k) {
    FlightPlan p = w.original[k];
    const auto& o = s.objs[k];
    if (o.status != ObjStatus::Outside) p.entries = w.route(o);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace trackcheck
