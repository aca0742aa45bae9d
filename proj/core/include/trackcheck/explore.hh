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

#ifndef TRACKCHECK_EXPLORE_HH
#define TRACKCHECK_EXPLORE_HH

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "trackcheck/engine.hh"

namespace trackcheck {

using StateKey = std::string;

// Full byte encoding; equal keys iff equal states.
StateKey stateKey(const ModelState& s);

enum class VerdictKind : std::uint8_t { Compatible, Deadlock, Disaster, Timeout };

std::string toString(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::Compatible;
  std::vector<Diagnosis> diagnoses;  // Deadlock only, sorted
  int aircraftId = 0;                // Disaster only
  std::string reason;                // Timeout only
};

struct ExplorationStats {
  std::int64_t totalStates = 0;
  std::int64_t timedStates = 0;
  std::int64_t transitions = 0;
  double wallMillis = 0.0;
  std::size_t peakResidentBytes = 0;

  ExplorationStats& operator+=(const ExplorationStats& o);
};

struct Limits {
  std::int64_t maxStates = 20'000'000;
  std::int64_t timeLimitMillis = 0;  // 0: unlimited
  std::int64_t maxMemoryMb = 0;      // heap in use; 0: unlimited
};

// Observer for invariant checks. `event` is null for time progression.
using TransitionHook = std::function<void(const World& w, const ModelState& from,
                                          const ModelState& to, const Event* event)>;

struct ExplorationResult {
  Verdict verdict;
  ExplorationStats stats;
  bool successTraceExists = false;
  // Timed states cutting every trace just before the first deadlock tick.
  std::vector<ModelState> frontier;
  std::optional<int> deadlockTick;
  // States generated at the deadlock tick; a caller that continues from the
  // frontier regenerates them in the larger scope.
  std::int64_t statesAtDeadlockTick = 0;
  std::int64_t timedAtDeadlockTick = 0;
  std::vector<StateKey> timedKeys;  // only with collectTimedKeys
};

struct ExploreOptions {
  Limits limits;
  TransitionHook hook;
  bool collectTimedKeys = false;
  bool reverseOrder = false;
  // Seeds already counted by an earlier iteration are not counted again.
  bool countSeeds = true;
};

// Timed-state queue ordered by next activity tick; depth-first expansion of
// same-tick events between timed states.
ExplorationResult generateStateSpace(const World& w, const std::vector<ModelState>& seeds,
                                     const ExploreOptions& opts = {});

inline ExplorationResult generateStateSpace(const World& w, const ModelState& s0,
                                            const ExploreOptions& opts = {}) {
  return generateStateSpace(w, std::vector<ModelState>{s0}, opts);
}

struct DepthResult {
  std::vector<ModelState> timed;
  std::vector<Diagnosis> diagnoses;
  std::optional<int> disasterAircraft;
  bool stop = false;
};

// Every timed state reachable from s through same-tick events, with
// in-call deduplication.
DepthResult depthFS(const World& w, const ModelState& s, bool reverseOrder = false);

enum class StopReason : std::uint8_t { Success, Disaster, Timeout };

std::optional<StopReason> terminate(const World& w, const ModelState& s, const Limits& limits,
                                    std::chrono::steady_clock::time_point started);

// Best-effort resident set size of this process.
std::size_t residentBytes();

}  // namespace trackcheck

#endif  // TRACKCHECK_EXPLORE_HH
