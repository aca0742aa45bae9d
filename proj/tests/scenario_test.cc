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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hh"

namespace {

using namespace trackcheck;

std::string readFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t lineCount(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

TEST(Scenario, FullScaleStormTickConfigAccepted) {
  auto c = scenarioFromJson(R"({"n": 15, "regionSize": 5, "fuel": 325, "lambda": 0.5, "m": 2000})");
  EXPECT_EQ(c.width, 15);
  EXPECT_EQ(c.height, 15);
  EXPECT_EQ(c.effectiveFuel(), 325);
  EXPECT_TRUE(validate(c).empty());
}

TEST(Scenario, FuelBelowLongestPathRejected) {
  try {
    scenarioFromJson(R"({"n": 15, "regionSize": 5, "fuel": 1})");
    FAIL() << "expected rejection";
  } catch (const ScenarioError& e) {
    ASSERT_EQ(e.problems().size(), 1u);
    EXPECT_NE(e.problems()[0].find("fuel"), std::string::npos);
  }
}

TEST(Scenario, StormDefaultsToMiddleCell) {
  auto c = scenarioFromJson(R"({"n": 15, "regionSize": 5, "m": 0})");
  EXPECT_FALSE(c.stormCell.has_value());
  auto prep = prepare(c);
  EXPECT_EQ(prep.problem.storm.cell, (Cell{7, 7}));
}

TEST(Scenario, ReportsEveryProblem) {
  try {
    scenarioFromJson(R"({"n": 9, "regionSize": 4, "lambda": 0, "fd": 0})");
    FAIL() << "expected rejection";
  } catch (const ScenarioError& e) {
    EXPECT_GE(e.problems().size(), 3u);
  }
  EXPECT_THROW(scenarioFromJson("{not json"), ScenarioError);
  EXPECT_THROW(parseScenario("/nonexistent/scenario.json"), ScenarioError);
}

TEST(Scenario, JsonRoundTrip) {
  ScenarioConfig c;
  c.id = "round";
  c.m = 7;
  c.lambdaParam = 0.25;
  c.stormCell = Cell{2, 3};
  c.stormTick = 4;
  c.stormEndTick = 9;
  c.seed = 12345678901ull;
  c.mode = Mode::Monolithic;
  c.maxMemoryMb = 512;
  auto back = scenarioFromJson(toJson(c));
  EXPECT_EQ(toJson(back), toJson(c));
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.stormEndTick, 9);
  EXPECT_EQ(back.maxMemoryMb, 512);
}

TEST(Scenario, FixturesParse) {
  for (const auto& entry : std::filesystem::directory_iterator(TRACKCHECK_FIXTURES)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(parseScenario(entry.path().string())) << entry.path();
  }
  auto ex = parseScenario(std::string(TRACKCHECK_FIXTURES) + "/example1.json");
  ASSERT_TRUE(ex.plans.has_value());
  EXPECT_EQ(ex.plans->size(), 2u);
  EXPECT_EQ(ex.scripted.size(), 1u);
}

TEST(Experiment, ZeroRepetitionsIsEmpty) {
  ScenarioConfig c;
  c.m = 3;
  EXPECT_TRUE(runExperiment(c, 0, {Mode::Compositional}).empty());
}

TEST(Experiment, PairedRowsAgree) {
  ScenarioConfig c;
  c.id = "pair";
  c.m = 12;
  c.lambdaParam = 0.25;
  c.stormTick = 5;
  auto rows = runExperiment(c, 2, {Mode::Compositional, Mode::Monolithic});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].scenarioId, "pair#0");
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    EXPECT_EQ(rows[i].mode, Mode::Compositional);
    EXPECT_EQ(rows[i + 1].mode, Mode::Monolithic);
    EXPECT_EQ(rows[i].verdict, rows[i + 1].verdict);
  }
}

TEST(Csv, HeaderOnlyAndLineCounts) {
  EXPECT_EQ(csvText({}), std::string(kCsvHeader) + "\n");
  ResultRow r;
  r.scenarioId = "x";
  EXPECT_EQ(lineCount(csvText({r, r})), 3u);
}

TEST(Csv, EmitIsByteStable) {
  ScenarioConfig c;
  c.m = 5;
  auto rows = runExperiment(c, 1, {Mode::Compositional});
  auto dir = std::filesystem::temp_directory_path();
  auto a = (dir / "trackcheck_csv_a.csv").string();
  auto b = (dir / "trackcheck_csv_b.csv").string();
  emitCsv(rows, a);
  emitCsv(rows, b);
  EXPECT_EQ(readFile(a), readFile(b));
  EXPECT_EQ(readFile(a), csvText(rows));
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST(Csv, RowFormat) {
  ResultRow r;
  r.scenarioId = "s";
  r.mode = Mode::Monolithic;
  r.verdict = VerdictKind::Deadlock;
  r.iterations = 1;
  r.finalScopeSize = 9;
  r.totalStates = 10;
  r.timedStates = 4;
  r.wallMillis = 1.5;
  r.peakResidentBytes = 2048;
  EXPECT_EQ(csvText({r}), std::string(kCsvHeader) + "\ns,monolithic,Deadlock,1,9,10,4,1.500,2048\n");
}

TEST(ExitCode, PerVerdict) {
  EXPECT_EQ(exitCode(VerdictKind::Compatible), 0);
  EXPECT_EQ(exitCode(VerdictKind::Deadlock), 2);
  EXPECT_EQ(exitCode(VerdictKind::Timeout), 3);
  EXPECT_EQ(exitCode(VerdictKind::Disaster), 4);
}

TEST(Mode, ParseAndPrint) {
  EXPECT_EQ(parseMode("compositional"), Mode::Compositional);
  EXPECT_EQ(parseMode("monolithic"), Mode::Monolithic);
  EXPECT_FALSE(parseMode("zoom").has_value());
  EXPECT_EQ(toString(Mode::Monolithic), "monolithic");
}

TEST(Sweep, TrafficStopsAtFirstTimeout) {
  ScenarioConfig c;
  c.id = "grow";
  c.lambdaParam = 0.125;
  c.stormTick = 5;
  c.maxStates = 3000;
  auto res = sweepTraffic(c, 10, 60, {Mode::Compositional, Mode::Monolithic});
  for (auto mode : {Mode::Compositional, Mode::Monolithic}) {
    int completed = 0;
    bool timedOut = false;
    for (const auto& r : res.rows) {
      if (r.mode != mode) continue;
      EXPECT_FALSE(timedOut) << "row after a timeout";
      if (r.verdict == VerdictKind::Timeout)
        timedOut = true;
      else
        completed += 10;
    }
    EXPECT_EQ(res.maxCompleted.at(mode), completed);
  }
}

}  // namespace
