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

#include "trackcheck/plan.hh"

namespace trackcheck {

std::string planDefect(const FlightPlan& p, const Topology& t) {
  if (p.entries.empty()) return "plan " + std::to_string(p.aircraftId) + " is empty";
  if (p.fuel <= 0) return "plan " + std::to_string(p.aircraftId) + " has no fuel";
  for (std::size_t i = 0; i < p.entries.size(); ++i) {
    const auto& e = p.entries[i];
    if (!t.contains(e.cell))
      return "plan " + std::to_string(p.aircraftId) + " leaves the grid at " + toString(e.cell);
    if (i == 0) continue;
    const auto& prev = p.entries[i - 1];
    if (e.tick <= prev.tick)
      return "plan " + std::to_string(p.aircraftId) + " ticks not increasing at entry " +
             std::to_string(i);
    if (!t.adjacent(prev.cell, e.cell))
      return "plan " + std::to_string(p.aircraftId) + " jumps from " + toString(prev.cell) +
             " to " + toString(e.cell);
  }
  return {};
}

std::optional<std::size_t> entryAt(const Route& r, int tick, int fd) {
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i].tick <= tick && tick < exitTick(r, i, fd)) return i;
  }
  return std::nullopt;
}

Route shifted(const Route& r, int delta) {
  Route out = r;
  for (auto& e : out) e.tick += delta;
  return out;
}

std::size_t RouteTable::Hash::operator()(const Route& r) const {
  std::size_t h = 1469598103934665603ull;
  for (const auto& e : r) {
    std::uint64_t v = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(e.tick)) << 32) ^
                      (static_cast<std::uint64_t>(static_cast<std::uint16_t>(e.cell.x)) << 16) ^
                      static_cast<std::uint16_t>(e.cell.y);
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

std::uint32_t RouteTable::intern(const Route& r) {
  auto it = ids_.find(r);
  if (it != ids_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(routes_.size());
  routes_.push_back(r);
  ids_.emplace(r, id);
  return id;
}

std::size_t RouteTable::approxBytes() const {
  std::size_t b = 0;
  for (const auto& r : routes_) b += 2 * r.size() * sizeof(PlanEntry) + 64;
  return b;
}

}  // namespace trackcheck
