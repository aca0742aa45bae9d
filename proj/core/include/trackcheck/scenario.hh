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

#ifndef TRACKCHECK_SCENARIO_HH
#define TRACKCHECK_SCENARIO_HH

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trackcheck/compose.hh"

namespace trackcheck {

enum class Mode : std::uint8_t { Compositional, Monolithic };

std::string toString(Mode m);
std::optional<Mode> parseMode(const std::string& s);

inline constexpr int kSchemaVersion = 1;

struct ScenarioConfig {
  int schemaVersion = kSchemaVersion;
  std::string id = "scenario";
  int width = 9;
  int height = 9;
  int regionSize = 3;
  int m = 0;
  double lambdaParam = 0.5;
  int fd = 1;
  std::optional<int> fuel;  // default: cell count + 100
  std::optional<Cell> stormCell;  // default: middle cell
  int stormTick = 0;
  std::optional<int> stormEndTick;
  std::uint64_t seed = 1;
  std::int64_t timeLimitMillis = 60000;
  std::int64_t maxStates = 20'000'000;
  std::int64_t maxMemoryMb = 0;  // 0: unlimited
  Mode mode = Mode::Compositional;
  std::optional<std::vector<FlightPlan>> plans;  // fixed batch instead of generation
  std::map<int, Route> scripted;                 // aircraftId -> replacement plan

  int effectiveFuel() const { return fuel.value_or(width * height + 100); }
};

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Every violated invariant, empty when the config is usable.
std::vector<std::string> validate(const ScenarioConfig& c);

ScenarioConfig scenarioFromJson(const std::string& text);
ScenarioConfig parseScenario(const std::string& path);
std::string toJson(const ScenarioConfig& c);

std::string plansToJson(const std::vector<FlightPlan>& plans);

// Topology and analysis inputs of one config; plans are generated unless
// the config carries a fixed batch.
struct PreparedScenario {
  std::unique_ptr<Topology> topo;
  Problem problem;
};

PreparedScenario prepare(const ScenarioConfig& c);

struct ResultRow {
  std::string scenarioId;
  Mode mode = Mode::Compositional;
  VerdictKind verdict = VerdictKind::Compatible;
  int iterations = 0;
  int finalScopeSize = 0;
  std::int64_t totalStates = 0;
  std::int64_t timedStates = 0;
  double wallMillis = 0.0;
  std::size_t peakResidentBytes = 0;
};

ResultRow rowFor(const ScenarioConfig& c, Mode mode, const ComposeReport& r);

ComposeReport runScenario(const ScenarioConfig& c, Mode mode);

// Repetition r reuses the config with seed + r; one row per mode.
std::vector<ResultRow> runExperiment(const ScenarioConfig& c, int repetitions,
                                     const std::vector<Mode>& modes);

inline const char* kCsvHeader =
    "scenarioId,mode,verdict,iterations,finalScopeSize,totalStates,timedStates,wallMillis,"
    "peakResidentBytes";

std::string csvText(const std::vector<ResultRow>& rows);
void emitCsv(const std::vector<ResultRow>& rows, const std::string& path);

// Storm-time sweep, arrival-rate sweep, and growing-traffic sweep.
std::vector<ResultRow> sweepStormTicks(const ScenarioConfig& base, const std::vector<int>& ticks,
                                       int repetitions, const std::vector<Mode>& modes);
std::vector<ResultRow> sweepLambda(const ScenarioConfig& base, const std::vector<double>& lambdas,
                                   int repetitions, const std::vector<Mode>& modes);

struct ScalingResult {
  std::vector<ResultRow> rows;
  std::map<Mode, int> maxCompleted;  // largest m finished within budget, 0 if none
};

// Raises m by `step` per mode until a run times out or `maxM` is passed.
ScalingResult sweepTraffic(const ScenarioConfig& base, int step, int maxM,
                           const std::vector<Mode>& modes);

int exitCode(VerdictKind v);

}  // namespace trackcheck

#endif  // TRACKCHECK_SCENARIO_HH
