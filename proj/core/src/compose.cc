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

#include "trackcheck/compose.hh"

#include <algorithm>
#include <chrono>
#include <set>
#include <stdexcept>

namespace trackcheck {

ExplorationResult checkCompatibility(const World& w, const std::vector<ModelState>& seeds,
                                     const ExploreOptions& opts) {
  return generateStateSpace(w, seeds, opts);
}

bool verdictsAgree(const Verdict& a, const Verdict& b) {
  if (a.kind == VerdictKind::Timeout || b.kind == VerdictKind::Timeout) return true;
  return a.kind == b.kind;
}

namespace {

std::map<int, Route> scriptedByIndex(const Problem& p) {
  std::map<int, Route> out;
  for (const auto& [id, r] : p.scripted) {
    auto it = std::find_if(p.plans.begin(), p.plans.end(),
                           [id = id](const FlightPlan& f) { return f.aircraftId == id; });
    if (it == p.plans.end())
      throw std::invalid_argument("scripted plan for unknown aircraft " + std::to_string(id));
    out[static_cast<int>(it - p.plans.begin())] = r;
  }
  return out;
}

World worldFor(const Problem& p, const Scope& scope, std::shared_ptr<RouteTable> routes) {
  return makeWorld(*p.topo, p.fd, p.storm, p.plans, scope, scriptedByIndex(p), std::move(routes));
}

Limits remaining(const Limits& l, std::chrono::steady_clock::time_point started) {
  Limits out = l;
  if (l.timeLimitMillis > 0) {
    auto used = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - started)
                    .count();
    out.timeLimitMillis = std::max<std::int64_t>(1, l.timeLimitMillis - used);
  }
  return out;
}

void finish(const Problem& p, const World& w, ComposeReport& r,
            const std::map<ComponentId, int>& detected) {
  auto s0 = initialStateFromPlans(w, p.storm.startTick);
  auto trace = simulateFirstChoice(w, s0);
  r.adaptedPlans = trace.executed;
  r.propagations = offScheduleCrossings(*p.topo, p.plans, trace.executed);
  for (auto& prop : r.propagations) {
    auto it = detected.find(prop.to);
    if (it != detected.end()) prop.detectedAt = it->second;
  }
}

}  // namespace

ComposeReport runCompositional(const Problem& p) {
  if (!p.topo) throw std::invalid_argument("problem has no topology");
  const auto started = std::chrono::steady_clock::now();
  auto routes = std::make_shared<RouteTable>();
  ComposeReport report;
  std::vector<ComponentId> comps{p.topo->componentOf(p.storm.cell)};
  Scope scope(*p.topo, comps);
  World w = worldFor(p, scope, routes);
  std::vector<ModelState> seeds{initialStateFromPlans(w, p.storm.startTick)};
  std::map<ComponentId, int> detected;

  for (;;) {
    ++report.iterations;
    ExploreOptions opts;
    opts.limits = remaining(p.limits, started);
    opts.hook = p.hook;
    opts.countSeeds = report.iterations == 1;
    auto res = checkCompatibility(w, seeds, opts);
    report.total += res.stats;
    report.successTraceExists = res.successTraceExists;

    IterationRecord rec;
    rec.scope = scope.components();
    rec.stats = res.stats;
    rec.verdict = res.verdict;
    rec.deadlockTick = res.deadlockTick;

    std::set<ComponentId> absorb;
    bool blockage = false;
    if (res.verdict.kind == VerdictKind::Deadlock) {
      for (const auto& d : res.verdict.diagnoses) {
        if (d.namesEnvironment() && !scope.contains(d.component))
          absorb.insert(d.component);
        else
          blockage = true;
      }
    }
    if (res.verdict.kind != VerdictKind::Deadlock || blockage || absorb.empty() ||
        res.frontier.empty()) {
      report.perIteration.push_back(std::move(rec));
      report.verdict = res.verdict;
      break;
    }

    // The deadlock tick is regenerated from the frontier in the larger scope.
    report.total.totalStates -= res.statesAtDeadlockTick;
    report.total.timedStates -= res.timedAtDeadlockTick;
    rec.stats.totalStates -= res.statesAtDeadlockTick;
    rec.stats.timedStates -= res.timedAtDeadlockTick;

    for (auto c : absorb) {
      comps = composeComponents(comps, c);
      detected.emplace(c, *res.deadlockTick);
    }
    rec.absorbed.assign(absorb.begin(), absorb.end());
    report.perIteration.push_back(std::move(rec));

    scope = Scope(*p.topo, comps);
    w = worldFor(p, scope, routes);
    std::vector<ModelState> next;
    next.reserve(res.frontier.size());
    for (const auto& s : res.frontier) next.push_back(extendScope(w, s));
    seeds = std::move(next);
  }

  report.finalScope = scope.components();
  report.total.wallMillis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
          .count();
  if (report.verdict.kind != VerdictKind::Timeout) finish(p, w, report, detected);
  return report;
}

ComposeReport runMonolithic(const Problem& p) {
  if (!p.topo) throw std::invalid_argument("problem has no topology");
  const auto started = std::chrono::steady_clock::now();
  ComposeReport report;
  Scope scope = Scope::all(*p.topo);
  World w = worldFor(p, scope, nullptr);
  ExploreOptions opts;
  opts.limits = p.limits;
  opts.hook = p.hook;
  auto res = checkCompatibility(w, {initialStateFromPlans(w, p.storm.startTick)}, opts);
  report.iterations = 1;
  report.verdict = res.verdict;
  report.total = res.stats;
  report.successTraceExists = res.successTraceExists;
  report.finalScope = scope.components();
  IterationRecord rec;
  rec.scope = report.finalScope;
  rec.stats = res.stats;
  rec.verdict = res.verdict;
  rec.deadlockTick = res.deadlockTick;
  report.perIteration.push_back(std::move(rec));
  report.total.wallMillis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
          .count();
  if (report.verdict.kind != VerdictKind::Timeout) finish(p, w, report, {});
  return report;
}

WitnessTrace simulateFirstChoice(const World& w, const ModelState& s0, int maxTicks) {
  WitnessTrace out;
  ModelState s = s0;
  const int horizon = s0.now + maxTicks;
  while (s.now <= horizon) {
    Expansion ex = expand(w, s);
    if (!ex.diagnoses.empty()) {
      out.stoppedBy = ex.diagnoses.front();
      break;
    }
    if (!ex.events.empty()) {
      const Event e = ex.events.front();
      out.events.emplace_back(s.now, e);
      auto tr = trigger(w, s, e);
      s = std::move(tr.state);
      if (tr.disasterAircraft) break;
      continue;
    }
    std::optional<Diagnosis> stall;
    auto adv = advanceTime(w, s, &stall);
    if (!adv) {
      out.stoppedBy = stall;
      break;
    }
    s = std::move(*adv);
  }
  out.executed = currentPlans(w, s);
  return out;
}

std::vector<Propagation> offScheduleCrossings(const Topology& t,
                                              const std::vector<FlightPlan>& original,
                                              const std::vector<FlightPlan>& executed) {
  std::map<std::pair<ComponentId, ComponentId>, int> earliest;
  for (std::size_t k = 0; k < executed.size() && k < original.size(); ++k) {
    std::set<std::tuple<int, Cell, Cell>> scheduled;
    const auto& o = original[k].entries;
    for (std::size_t j = 1; j < o.size(); ++j) scheduled.emplace(o[j].tick, o[j - 1].cell, o[j].cell);
    const auto& e = executed[k].entries;
    for (std::size_t j = 1; j < e.size(); ++j) {
      ComponentId a = t.componentOf(e[j - 1].cell);
      ComponentId b = t.componentOf(e[j].cell);
      if (a == b || scheduled.count({e[j].tick, e[j - 1].cell, e[j].cell})) continue;
      auto key = std::make_pair(a, b);
      auto it = earliest.find(key);
      if (it == earliest.end() || e[j].tick < it->second) earliest[key] = e[j].tick;
    }
  }
  std::vector<Propagation> out;
  for (const auto& [key, tick] : earliest) out.push_back(Propagation{key.first, key.second, tick, {}});
  std::sort(out.begin(), out.end(), [](const Propagation& a, const Propagation& b) {
    return std::tie(a.tick, a.from, a.to) < std::tie(b.tick, b.from, b.to);
  });
  return out;
}

}  // namespace trackcheck
