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

#include "trackcheck/scenario.hh"

#include <fmt/format.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace trackcheck {

using nlohmann::json;

std::string toString(Mode m) {
  return m == Mode::Compositional ? "compositional" : "monolithic";
}

std::optional<Mode> parseMode(const std::string& s) {
  if (s == "compositional") return Mode::Compositional;
  if (s == "monolithic") return Mode::Monolithic;
  return std::nullopt;
}

namespace {

std::string joinProblems(const std::vector<std::string>& p) {
  std::string out = "invalid scenario";
  for (const auto& s : p) out += "; " + s;
  return out;
}

Route routeFromJson(const json& j) {
  Route r;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 3) throw std::invalid_argument("entry must be [tick, x, y]");
    r.push_back(PlanEntry{e[0].get<int>(), Cell{e[1].get<int>(), e[2].get<int>()}});
  }
  return r;
}

json routeToJson(const Route& r) {
  json a = json::array();
  for (const auto& e : r) a.push_back({e.tick, e.cell.x, e.cell.y});
  return a;
}

json plansJson(const std::vector<FlightPlan>& plans) {
  json a = json::array();
  for (const auto& p : plans)
    a.push_back({{"id", p.aircraftId}, {"fuel", p.fuel}, {"entries", routeToJson(p.entries)}});
  return a;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : std::runtime_error(joinProblems(problems)), problems_(std::move(problems)) {}

std::vector<std::string> validate(const ScenarioConfig& c) {
  std::vector<std::string> p;
  if (c.schemaVersion != kSchemaVersion)
    p.push_back("unsupported schemaVersion " + std::to_string(c.schemaVersion));
  if (c.width < 2 || c.height < 1) p.push_back("grid must be at least 2 wide and 1 high");
  if (c.regionSize < 1) {
    p.push_back("regionSize must be positive");
  } else if (c.width % c.regionSize != 0 || c.height % c.regionSize != 0) {
    p.push_back("regionSize " + std::to_string(c.regionSize) + " does not divide the grid");
  }
  if (c.m < 0) p.push_back("m must be non-negative");
  if (!(c.lambdaParam > 0.0)) p.push_back("lambda must be positive");
  if (c.fd < 1) p.push_back("fd must be at least 1");
  if (c.effectiveFuel() <= c.width * c.height)
    p.push_back("fuel " + std::to_string(c.effectiveFuel()) +
                " does not exceed the longest path bound " + std::to_string(c.width * c.height));
  if (c.stormTick < 0) p.push_back("stormTick must be non-negative");
  if (c.stormEndTick && *c.stormEndTick <= c.stormTick)
    p.push_back("stormEndTick must be after stormTick");
  if (c.stormCell && (c.stormCell->x < 0 || c.stormCell->y < 0 || c.stormCell->x >= c.width ||
                      c.stormCell->y >= c.height))
    p.push_back("storm cell " + toString(*c.stormCell) + " is off the grid");
  if (c.timeLimitMillis < 0) p.push_back("timeLimitMs must be non-negative");
  if (c.maxMemoryMb < 0) p.push_back("maxMemoryMb must be non-negative");
  if (c.plans && p.empty()) {
    auto topo = Topology::grid(c.width, c.height, c.regionSize);
    for (const auto& pl : *c.plans) {
      auto d = planDefect(pl, topo);
      if (!d.empty()) p.push_back(d);
    }
  }
  return p;
}

ScenarioConfig scenarioFromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError({std::string("malformed JSON: ") + e.what()});
  }
  if (!j.is_object()) throw ScenarioError({"scenario must be a JSON object"});
  ScenarioConfig c;
  std::vector<std::string> problems;
  auto field = [&](const char* name, auto& out) {
    if (!j.contains(name)) return;
    try {
      j.at(name).get_to(out);
    } catch (const json::exception& e) {
      problems.push_back(std::string("field ") + name + ": " + e.what());
    }
  };
  field("schemaVersion", c.schemaVersion);
  field("id", c.id);
  if (j.contains("n")) {
    int n = 0;
    field("n", n);
    c.width = c.height = n;
  }
  field("width", c.width);
  field("height", c.height);
  field("regionSize", c.regionSize);
  field("m", c.m);
  field("lambda", c.lambdaParam);
  field("fd", c.fd);
  if (j.contains("fuel")) {
    int f = 0;
    field("fuel", f);
    c.fuel = f;
  }
  field("seed", c.seed);
  field("timeLimitMs", c.timeLimitMillis);
  field("maxStates", c.maxStates);
  field("maxMemoryMb", c.maxMemoryMb);
  if (j.contains("mode")) {
    std::string m;
    field("mode", m);
    auto mode = parseMode(m);
    if (mode)
      c.mode = *mode;
    else
      problems.push_back("unknown mode '" + m + "'");
  }
  if (j.contains("storm")) {
    const auto& s = j["storm"];
    try {
      if (s.contains("cell")) c.stormCell = Cell{s["cell"].at(0).get<int>(), s["cell"].at(1).get<int>()};
      if (s.contains("tick")) c.stormTick = s["tick"].get<int>();
      if (s.contains("endTick") && !s["endTick"].is_null()) c.stormEndTick = s["endTick"].get<int>();
    } catch (const json::exception& e) {
      problems.push_back(std::string("field storm: ") + e.what());
    }
  }
  try {
    if (j.contains("plans")) {
      std::vector<FlightPlan> plans;
      for (const auto& p : j["plans"]) {
        FlightPlan fp;
        fp.aircraftId = p.at("id").get<int>();
        fp.fuel = p.contains("fuel") ? p["fuel"].get<int>() : c.effectiveFuel();
        fp.entries = routeFromJson(p.at("entries"));
        plans.push_back(std::move(fp));
      }
      c.m = static_cast<int>(plans.size());
      c.plans = std::move(plans);
    }
    if (j.contains("scriptedAdaptations")) {
      for (const auto& s : j["scriptedAdaptations"])
        c.scripted[s.at("aircraft").get<int>()] = routeFromJson(s.at("entries"));
    }
  } catch (const std::exception& e) {
    problems.push_back(std::string("plans: ") + e.what());
  }
  auto more = validate(c);
  problems.insert(problems.end(), more.begin(), more.end());
  if (!problems.empty()) throw ScenarioError(std::move(problems));
  return c;
}

ScenarioConfig parseScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError({"cannot read " + path});
  std::stringstream ss;
  ss << in.rdbuf();
  return scenarioFromJson(ss.str());
}

std::string toJson(const ScenarioConfig& c) {
  json j;
  j["schemaVersion"] = c.schemaVersion;
  j["id"] = c.id;
  j["width"] = c.width;
  j["height"] = c.height;
  j["regionSize"] = c.regionSize;
  j["m"] = c.m;
  j["lambda"] = c.lambdaParam;
  j["fd"] = c.fd;
  j["fuel"] = c.effectiveFuel();
  json storm;
  if (c.stormCell) storm["cell"] = {c.stormCell->x, c.stormCell->y};
  storm["tick"] = c.stormTick;
  if (c.stormEndTick) storm["endTick"] = *c.stormEndTick;
  j["storm"] = storm;
  j["seed"] = c.seed;
  j["timeLimitMs"] = c.timeLimitMillis;
  j["maxStates"] = c.maxStates;
  if (c.maxMemoryMb > 0) j["maxMemoryMb"] = c.maxMemoryMb;
  j["mode"] = toString(c.mode);
  if (c.plans) j["plans"] = plansJson(*c.plans);
  if (!c.scripted.empty()) {
    json a = json::array();
    for (const auto& [id, r] : c.scripted) a.push_back({{"aircraft", id}, {"entries", routeToJson(r)}});
    j["scriptedAdaptations"] = a;
  }
  return j.dump(2);
}

std::string plansToJson(const std::vector<FlightPlan>& plans) { return plansJson(plans).dump(2); }

PreparedScenario prepare(const ScenarioConfig& c) {
  auto problems = validate(c);
  if (!problems.empty()) throw ScenarioError(std::move(problems));
  PreparedScenario out;
  out.topo = std::make_unique<Topology>(Topology::grid(c.width, c.height, c.regionSize));
  Problem& p = out.problem;
  p.topo = out.topo.get();
  p.fd = c.fd;
  p.storm = StormEvent{c.stormCell.value_or(out.topo->middleCell()), c.stormTick, c.stormEndTick};
  if (c.plans) {
    p.plans = *c.plans;
  } else {
    p.plans = generateFlightPlans(c.m, c.lambdaParam, c.fd, *out.topo, c.seed, c.effectiveFuel())
                  .plans;
  }
  p.scripted = c.scripted;
  p.limits.timeLimitMillis = c.timeLimitMillis;
  p.limits.maxStates = c.maxStates;
  p.limits.maxMemoryMb = c.maxMemoryMb;
  return out;
}

ResultRow rowFor(const ScenarioConfig& c, Mode mode, const ComposeReport& r) {
  ResultRow row;
  row.scenarioId = c.id;
  row.mode = mode;
  row.verdict = r.verdict.kind;
  row.iterations = r.iterations;
  row.finalScopeSize = static_cast<int>(r.finalScope.size());
  row.totalStates = r.total.totalStates;
  row.timedStates = r.total.timedStates;
  row.wallMillis = r.total.wallMillis;
  row.peakResidentBytes = r.total.peakResidentBytes;
  return row;
}

ComposeReport runScenario(const ScenarioConfig& c, Mode mode) {
  auto prep = prepare(c);
  return mode == Mode::Compositional ? runCompositional(prep.problem)
                                     : runMonolithic(prep.problem);
}

std::vector<ResultRow> runExperiment(const ScenarioConfig& c, int repetitions,
                                     const std::vector<Mode>& modes) {
  std::vector<ResultRow> rows;
  for (int r = 0; r < repetitions; ++r) {
    ScenarioConfig rc = c;
    rc.seed = c.seed + static_cast<std::uint64_t>(r);
    if (repetitions > 1) rc.id = c.id + "#" + std::to_string(r);
    auto prep = prepare(rc);
    for (Mode m : modes) {
      auto rep = m == Mode::Compositional ? runCompositional(prep.problem)
                                          : runMonolithic(prep.problem);
      rows.push_back(rowFor(rc, m, rep));
    }
  }
  return rows;
}

std::string csvText(const std::vector<ResultRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{:.3f},{}\n", r.scenarioId, toString(r.mode),
                       toString(r.verdict), r.iterations, r.finalScopeSize, r.totalStates,
                       r.timedStates, r.wallMillis, r.peakResidentBytes);
  }
  return out;
}

void emitCsv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << csvText(rows);
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<ResultRow> sweepStormTicks(const ScenarioConfig& base, const std::vector<int>& ticks,
                                       int repetitions, const std::vector<Mode>& modes) {
  std::vector<ResultRow> rows;
  for (int t : ticks) {
    ScenarioConfig c = base;
    c.stormTick = t;
    c.id = base.id + "-storm" + std::to_string(t);
    auto r = runExperiment(c, repetitions, modes);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

std::vector<ResultRow> sweepLambda(const ScenarioConfig& base, const std::vector<double>& lambdas,
                                   int repetitions, const std::vector<Mode>& modes) {
  std::vector<ResultRow> rows;
  for (double l : lambdas) {
    ScenarioConfig c = base;
    c.lambdaParam = l;
    c.id = fmt::format("{}-lambda{}", base.id, l);
    auto r = runExperiment(c, repetitions, modes);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

ScalingResult sweepTraffic(const ScenarioConfig& base, int step, int maxM,
                           const std::vector<Mode>& modes) {
  ScalingResult out;
  for (Mode mode : modes) {
    out.maxCompleted[mode] = 0;
    for (int m = step; m <= maxM; m += step) {
      ScenarioConfig c = base;
      c.m = m;
      c.id = base.id + "-m" + std::to_string(m);
      auto rep = runScenario(c, mode);
      out.rows.push_back(rowFor(c, mode, rep));
      if (rep.verdict.kind == VerdictKind::Timeout) break;
      out.maxCompleted[mode] = m;
    }
  }
  return out;
}

int exitCode(VerdictKind v) {
  switch (v) {
    case VerdictKind::Compatible: return 0;
    case VerdictKind::Deadlock: return 2;
    case VerdictKind::Timeout: return 3;
    case VerdictKind::Disaster: return 4;
  }
  return 1;
}

}  // namespace trackcheck
