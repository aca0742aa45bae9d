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

// trackcheck: generate plans, verify one scenario, run sweeps, replay the
// two-area storm fixture.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "trackcheck/scenario.hh"

#ifndef TRACKCHECK_FIXTURE_DIR
#define TRACKCHECK_FIXTURE_DIR "fixtures"
#endif

using namespace trackcheck;

namespace {

struct Overrides {
  std::string scenarioPath;
  std::optional<int> n, width, height, regionSize, m, fd, fuel, stormTick, stormEndTick;
  std::optional<double> lambda;
  std::optional<std::string> stormCell, mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> timeLimitMs, maxStates, maxMemoryMb;
  std::string id;
};

void addScenarioFlags(CLI::App* app, Overrides& o) {
  app->add_option("--scenario", o.scenarioPath, "scenario JSON file");
  app->add_option("--n", o.n, "square mesh size");
  app->add_option("--width", o.width, "grid width");
  app->add_option("--height", o.height, "grid height");
  app->add_option("--region-size", o.regionSize, "region edge length");
  app->add_option("--m", o.m, "number of aircraft");
  app->add_option("--lambda", o.lambda, "exponential departure rate per source");
  app->add_option("--fd", o.fd, "ticks to cross one sub-track");
  app->add_option("--fuel", o.fuel, "initial fuel per aircraft");
  app->add_option("--storm-cell", o.stormCell, "storm cell as x,y");
  app->add_option("--storm-tick", o.stormTick, "tick at which the storm starts");
  app->add_option("--storm-end-tick", o.stormEndTick, "tick at which the storm clears");
  app->add_option("--seed", o.seed, "generator seed");
  app->add_option("--time-limit-ms", o.timeLimitMs, "analysis time limit");
  app->add_option("--max-states", o.maxStates, "analysis state limit");
  app->add_option("--max-memory-mb", o.maxMemoryMb, "analysis heap limit in MiB");
  app->add_option("--id", o.id, "scenario id in CSV output");
}

ScenarioConfig buildConfig(const Overrides& o) {
  ScenarioConfig c = o.scenarioPath.empty() ? ScenarioConfig{} : parseScenario(o.scenarioPath);
  if (o.n) c.width = c.height = *o.n;
  if (o.width) c.width = *o.width;
  if (o.height) c.height = *o.height;
  if (o.regionSize) c.regionSize = *o.regionSize;
  if (o.m) c.m = *o.m;
  if (o.lambda) c.lambdaParam = *o.lambda;
  if (o.fd) c.fd = *o.fd;
  if (o.fuel) c.fuel = *o.fuel;
  if (o.stormTick) c.stormTick = *o.stormTick;
  if (o.stormEndTick) c.stormEndTick = *o.stormEndTick;
  if (o.seed) c.seed = *o.seed;
  if (o.timeLimitMs) c.timeLimitMillis = *o.timeLimitMs;
  if (o.maxStates) c.maxStates = *o.maxStates;
  if (o.maxMemoryMb) c.maxMemoryMb = *o.maxMemoryMb;
  if (!o.id.empty()) c.id = o.id;
  if (o.stormCell) {
    int x = 0, y = 0;
    if (std::sscanf(o.stormCell->c_str(), "%d,%d", &x, &y) != 2)
      throw ScenarioError({"--storm-cell expects x,y"});
    c.stormCell = Cell{x, y};
  }
  if (o.mode) {
    auto m = parseMode(*o.mode);
    if (!m) throw ScenarioError({"unknown mode '" + *o.mode + "'"});
    c.mode = *m;
  }
  auto problems = validate(c);
  if (!problems.empty()) throw ScenarioError(problems);
  return c;
}

std::string scopeText(const std::vector<ComponentId>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + toString(s[i]);
  return out + "}";
}

std::string routeText(const Route& r) {
  std::string out = "{";
  for (std::size_t i = 0; i < r.size(); ++i)
    out += fmt::format("{}({},{})", i ? "," : "", r[i].tick, toString(r[i].cell));
  return out + "}";
}

void printReport(const ComposeReport& r, Mode mode) {
  fmt::print("mode: {}\nverdict: {}\n", toString(mode), toString(r.verdict.kind));
  for (const auto& d : r.verdict.diagnoses)
    fmt::print("  diagnosis: {} at {} of {} tick {} aircraft {}\n", toString(d.kind),
               toString(d.envActorCell), toString(d.component), d.tick, d.aircraftId);
  if (r.verdict.kind == VerdictKind::Disaster)
    fmt::print("  aircraft {} ran out of fuel\n", r.verdict.aircraftId);
  if (r.verdict.kind == VerdictKind::Timeout) fmt::print("  {}\n", r.verdict.reason);
  fmt::print("iterations: {}\nfinal scope: {}\n", r.iterations, scopeText(r.finalScope));
  fmt::print("states: {} total, {} timed, {} transitions, {:.1f} ms\n", r.total.totalStates,
             r.total.timedStates, r.total.transitions, r.total.wallMillis);
  fmt::print("success trace exists: {}\n", r.successTraceExists ? "yes" : "no");
}

std::vector<ResultRow> runAll(const std::vector<ScenarioConfig>& cfgs, const std::vector<Mode>& modes,
                              int jobs) {
  std::vector<std::vector<ResultRow>> out(cfgs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfgs.size(); i = next++) {
      spdlog::info("running {}", cfgs[i].id);
      out[i] = runExperiment(cfgs[i], 1, modes);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<ResultRow> rows;
  for (auto& r : out) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Runtime verifier for track-based traffic control"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "log progress");

  Overrides genO;
  std::string genOut;
  auto* gen = app.add_subcommand("gen-plans", "generate a seeded flight-plan batch");
  addScenarioFlags(gen, genO);
  gen->add_option("--out", genOut, "write a scenario with the batch embedded (default stdout)");

  Overrides verO;
  std::string verCsv;
  auto* ver = app.add_subcommand("verify", "analyse one scenario in one mode");
  addScenarioFlags(ver, verO);
  ver->add_option("--mode", verO.mode, "compositional or monolithic");
  ver->add_option("--csv", verCsv, "append-free CSV output path");

  Overrides benO;
  std::string sweep = "es1", benCsv;
  int reps = 1, jobs = 1, step = 25, maxM = 300;
  std::vector<int> stormTicks{5, 10, 20, 40, 60};
  std::vector<double> lambdas{0.5, 0.25, 0.125};
  auto* ben = app.add_subcommand("bench", "run a sweep in both modes and emit CSV");
  addScenarioFlags(ben, benO);
  ben->add_option("--sweep", sweep, "es1 (storm tick), es2 (lambda), es3 (traffic)")
      ->check(CLI::IsMember({"es1", "es2", "es3"}));
  ben->add_option("--repetitions", reps, "seeds per sweep point");
  ben->add_option("--storm-ticks", stormTicks, "es1 storm ticks");
  ben->add_option("--lambdas", lambdas, "es2 rates");
  ben->add_option("--step", step, "es3 aircraft step");
  ben->add_option("--max-m", maxM, "es3 upper bound on aircraft");
  ben->add_option("--jobs", jobs, "scenarios run in parallel (es1, es2)");
  ben->add_option("--csv", benCsv, "CSV output path (default stdout)");

  std::string fixture = std::string(TRACKCHECK_FIXTURE_DIR) + "/example1.json";
  auto* rep = app.add_subcommand("replay-example1", "replay the two-area storm fixture");
  rep->add_option("--fixture", fixture, "fixture path");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

  try {
    if (*gen) {
      ScenarioConfig c = buildConfig(genO);
      auto prep = prepare(c);
      c.plans = prep.problem.plans;
      if (genOut.empty()) {
        std::cout << toJson(c) << "\n";
      } else {
        std::ofstream(genOut) << toJson(c) << "\n";
      }
      return 0;
    }
    if (*ver) {
      ScenarioConfig c = buildConfig(verO);
      auto report = runScenario(c, c.mode);
      printReport(report, c.mode);
      if (!verCsv.empty()) emitCsv({rowFor(c, c.mode, report)}, verCsv);
      return exitCode(report.verdict.kind);
    }
    if (*ben) {
      ScenarioConfig base = buildConfig(benO);
      if (benO.id.empty()) base.id = sweep;
      std::vector<Mode> modes{Mode::Compositional, Mode::Monolithic};
      std::vector<ResultRow> rows;
      if (sweep == "es3") {
        auto res = sweepTraffic(base, step, maxM, modes);
        rows = res.rows;
        for (auto [mode, best] : res.maxCompleted)
          spdlog::warn("{}: largest completed m = {}", toString(mode), best);
      } else {
        std::vector<ScenarioConfig> cfgs;
        auto point = [&](ScenarioConfig c, const std::string& tag) {
          for (int r = 0; r < reps; ++r) {
            ScenarioConfig rc = c;
            rc.seed = c.seed + static_cast<std::uint64_t>(r);
            rc.id = base.id + "-" + tag + "#" + std::to_string(r);
            cfgs.push_back(rc);
          }
        };
        if (sweep == "es1") {
          for (int t : stormTicks) {
            ScenarioConfig c = base;
            c.stormTick = t;
            point(c, "storm" + std::to_string(t));
          }
        } else {
          for (double l : lambdas) {
            ScenarioConfig c = base;
            c.lambdaParam = l;
            point(c, fmt::format("lambda{}", l));
          }
        }
        rows = runAll(cfgs, modes, std::max(1, jobs));
      }
      if (benCsv.empty())
        std::cout << csvText(rows);
      else
        emitCsv(rows, benCsv);
      return 0;
    }
    if (*rep) {
      ScenarioConfig c = parseScenario(fixture);
      auto prep = prepare(c);
      auto report = runCompositional(prep.problem);
      printReport(report, Mode::Compositional);
      for (const auto& it : report.perIteration) {
        fmt::print("  iteration scope {} -> {}", scopeText(it.scope), toString(it.verdict.kind));
        if (it.deadlockTick) fmt::print(" at tick {}", *it.deadlockTick);
        if (!it.absorbed.empty()) fmt::print(", absorbing {}", scopeText(it.absorbed));
        fmt::print("\n");
      }
      fmt::print("executed plans:\n");
      for (const auto& p : report.adaptedPlans)
        fmt::print("  aircraft {}: {}\n", p.aircraftId, routeText(p.entries));
      fmt::print("propagations:\n");
      for (const auto& pr : report.propagations) {
        fmt::print("  {} -> {} at tick {}", toString(pr.from), toString(pr.to), pr.tick);
        if (pr.detectedAt) fmt::print(" (detected at tick {})", *pr.detectedAt);
        fmt::print("\n");
      }
      return exitCode(report.verdict.kind);
    }
  } catch (const ScenarioError& e) {
    for (const auto& p : e.problems()) fmt::print(stderr, "error: {}\n", p);
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}
