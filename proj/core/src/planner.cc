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

#include "trackcheck/planner.hh"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace trackcheck {

bool hasTimeConflict(Cell cell, int arrivalTime, const std::vector<FlightPlan>& plans, int fd) {
  for (const auto& p : plans) {
    for (std::size_t i = 0; i < p.entries.size(); ++i) {
      if (p.entries[i].cell != cell) continue;
      if (p.entries[i].tick == arrivalTime) return true;
      if (exitTick(p.entries, i, fd) == arrivalTime + fd) return true;
    }
  }
  return false;
}

void ConflictIndex::add(const FlightPlan& p) {
  const auto& r = p.entries;
  const auto cells = static_cast<std::uint64_t>(topo_->cellCount());
  for (std::size_t i = 0; i < r.size(); ++i) {
    int c = topo_->index(r[i].cell);
    arrivals_.insert(key(c, r[i].tick));
    departures_.insert(key(c, exitTick(r, i, fd_)));
    if (i > 0) {
      auto edge = static_cast<std::uint64_t>(topo_->index(r[i - 1].cell)) * cells +
                  static_cast<std::uint64_t>(c);
      hops_.insert(key(static_cast<int>(edge), r[i].tick));
    }
  }
}

bool ConflictIndex::conflict(Cell cell, int arrivalTime) const {
  int c = topo_->index(cell);
  return arrivals_.count(key(c, arrivalTime)) != 0 ||
         departures_.count(key(c, arrivalTime + fd_)) != 0;
}

bool ConflictIndex::exchangesWith(const Route& r) const {
  const auto cells = static_cast<std::uint64_t>(topo_->cellCount());
  for (std::size_t i = 1; i < r.size(); ++i) {
    auto back = static_cast<std::uint64_t>(topo_->index(r[i].cell)) * cells +
                static_cast<std::uint64_t>(topo_->index(r[i - 1].cell));
    if (hops_.count(key(static_cast<int>(back), r[i].tick)) != 0) return true;
  }
  return false;
}

namespace {

struct XYSearch {
  const Topology& topo;
  const ConflictIndex& index;
  int fd;
  Cell dst;
  std::vector<Cell> route;
  std::vector<std::uint8_t> failed;

  bool run(Cell s, int t) {
    // Every cell is reached at a fixed tick on a monotone path, so a failed
    // cell fails for every prefix.
    int idx = topo.index(s);
    if (failed[idx]) return false;
    if (index.conflict(s, t)) {
      failed[idx] = 1;
      return false;
    }
    route.push_back(s);
    if (s == dst) return true;
    int incX = s.x < dst.x ? 1 : 0;
    int incY = s.y < dst.y ? 1 : (s.y > dst.y ? -1 : 0);
    if (incX == 1) {
      if (run(Cell{s.x + 1, s.y}, t + fd)) return true;
      if (incY != 0 && run(Cell{s.x, s.y + incY}, t + fd)) return true;
    } else if (incY != 0) {
      if (run(Cell{s.x, s.y + incY}, t + fd)) return true;
    }
    route.pop_back();
    failed[idx] = 1;
    return false;
  }
};

struct AvoidSearch {
  const Topology& topo;
  const std::function<bool(Cell)>& blocked;
  Cell dst;
  std::vector<Cell> route;
  std::vector<std::uint8_t> failed;

  bool run(Cell s, bool first) {
    int idx = topo.index(s);
    if (failed[idx]) return false;
    if (!first && blocked(s)) {
      failed[idx] = 1;
      return false;
    }
    route.push_back(s);
    if (s == dst) return true;
    int dx = (dst.x > s.x) - (dst.x < s.x);
    int dy = (dst.y > s.y) - (dst.y < s.y);
    if (dx != 0) {
      if (run(Cell{s.x + dx, s.y}, false)) return true;
      if (dy != 0 && run(Cell{s.x, s.y + dy}, false)) return true;
    } else if (dy != 0) {
      if (run(Cell{s.x, s.y + dy}, false)) return true;
    }
    route.pop_back();
    failed[idx] = 1;
    return false;
  }
};

std::uint64_t nextU64(std::mt19937_64& g) { return g(); }

double unitDraw(std::mt19937_64& g) {
  return static_cast<double>(nextU64(g) >> 11) * 0x1.0p-53;
}

std::size_t pick(std::mt19937_64& g, std::size_t n) {
  return static_cast<std::size_t>(nextU64(g) % n);
}

Route timedRoute(const std::vector<Cell>& cells, int base, int fd) {
  Route r;
  r.reserve(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k)
    r.push_back(PlanEntry{base + static_cast<int>(k) * fd, cells[k]});
  return r;
}

}  // namespace

std::vector<Cell> generateRoute(Cell src, int arrivalTime, Cell dst, const ConflictIndex& index,
                                int fd) {
  const Topology& t = index.topology();
  if (!t.contains(src) || !t.contains(dst)) return {};
  XYSearch s{t, index, fd, dst, {}, std::vector<std::uint8_t>(t.cellCount(), 0)};
  if (!s.run(src, arrivalTime)) return {};
  return s.route;
}

std::vector<Cell> routeAvoiding(Cell src, Cell dst, const Topology& t,
                                const std::function<bool(Cell)>& blocked) {
  AvoidSearch s{t, blocked, dst, {}, std::vector<std::uint8_t>(t.cellCount(), 0)};
  if (!t.contains(src) || !t.contains(dst)) return {};
  if (!s.run(src, true)) return {};
  return s.route;
}

PlanBatch generateFlightPlans(int m, double lambdaParam, int fd, const Topology& t,
                              std::uint64_t seed, int fuel) {
  if (m < 0) throw std::invalid_argument("aircraft count must be non-negative");
  if (!(lambdaParam > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (fd < 1) throw std::invalid_argument("traversal time must be at least one tick");
  PlanBatch batch;
  batch.lambdaParam = lambdaParam;
  batch.seed = seed;
  batch.n = t.width();
  batch.fd = fd;
  if (m == 0) return batch;

  const auto& sources = t.sources();
  const auto& dests = t.destinations();
  if (sources.empty() || dests.empty()) throw std::invalid_argument("grid has no airports");

  std::mt19937_64 main(seed);
  std::vector<std::mt19937_64> streams;
  streams.reserve(sources.size());
  for (std::size_t k = 0; k < sources.size(); ++k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(k), 0x5eedu};
    streams.emplace_back(seq);
  }
  std::vector<int> lastDeparture(sources.size(), 0);

  ConflictIndex index(t, fd);
  const long budget = 100L * m;
  long attempts = 0;
  while (static_cast<int>(batch.plans.size()) < m) {
    if (attempts++ >= budget) {
      throw PlanBudgetExceeded("placed " + std::to_string(batch.plans.size()) + " of " +
                               std::to_string(m) + " plans within the retry budget of " +
                               std::to_string(budget) + " attempts");
    }
    std::size_t k = pick(main, sources.size());
    Cell dst = dests[pick(main, dests.size())];
    double u = unitDraw(streams[k]);
    int gap = static_cast<int>(std::ceil(-std::log1p(-u) / lambdaParam));
    int dTime = lastDeparture[k] + std::max(gap, fd);
    auto cells = generateRoute(sources[k], dTime, dst, index, fd);
    if (cells.empty()) continue;
    Route r = timedRoute(cells, dTime, fd);
    if (index.exchangesWith(r)) continue;
    FlightPlan p{static_cast<int>(batch.plans.size()) + 1, std::move(r), fuel};
    index.add(p);
    lastDeparture[k] = dTime;
    batch.plans.push_back(std::move(p));
  }
  return batch;
}

std::string batchDefect(const PlanBatch& b, const Topology& t) {
  for (const auto& p : b.plans) {
    auto d = planDefect(p, t);
    if (!d.empty()) return d;
  }
  for (std::size_t i = 0; i < b.plans.size(); ++i) {
    std::vector<FlightPlan> others;
    for (std::size_t j = 0; j < b.plans.size(); ++j)
      if (j != i) others.push_back(b.plans[j]);
    for (const auto& e : b.plans[i].entries) {
      if (hasTimeConflict(e.cell, e.tick, others, b.fd)) {
        return "plan " + std::to_string(b.plans[i].aircraftId) + " conflicts at " +
               toString(e.cell) + " tick " + std::to_string(e.tick);
      }
    }
  }
  ConflictIndex index(t, b.fd);
  for (const auto& p : b.plans) {
    if (index.exchangesWith(p.entries))
      return "plan " + std::to_string(p.aircraftId) + " swaps sub-tracks with an earlier plan";
    index.add(p);
  }
  std::map<Cell, std::vector<int>> bySource;
  for (const auto& p : b.plans) bySource[p.entries.front().cell].push_back(p.entries.front().tick);
  for (auto& [src, ticks] : bySource) {
    std::sort(ticks.begin(), ticks.end());
    for (std::size_t i = 1; i < ticks.size(); ++i) {
      if (ticks[i] - ticks[i - 1] < b.fd)
        return "source " + toString(src) + " departures " + std::to_string(ticks[i - 1]) +
               " and " + std::to_string(ticks[i]) + " closer than the traversal time";
    }
  }
  return {};
}

RerouteResult rerouteRemainder(const Topology& t, Cell current, int now, const Route& remainder,
                               const NetworkView& view, int fd) {
  RerouteResult out;
  out.remainder = shifted(remainder, 1);
  if (remainder.empty()) return out;

  const Cell blockedNext = remainder.front().cell;
  const std::size_t len = remainder.size();
  auto blocked = [&](Cell c) { return view.stormy(c) || view.occupied(c); };

  for (Dir d : kAllDirs) {
    auto nb = t.neighbor(current, d);
    if (!nb || *nb == blockedNext || view.stormy(*nb) || view.occupied(*nb)) continue;
    for (std::size_t i = 1; i < len; ++i) {
      auto path = routeAvoiding(*nb, remainder[i].cell, t, blocked);
      if (path.empty() || path.size() != i + 1) continue;
      for (std::size_t k = i + 1; k < len; ++k) path.push_back(remainder[k].cell);
      out.stage = 1;
      out.needDelay = false;
      out.remainder = timedRoute(path, now, fd);
      return out;
    }
  }

  for (Dir d : kAllDirs) {
    auto nb = t.neighbor(current, d);
    if (!nb || *nb == blockedNext || view.stormy(*nb)) continue;
    auto path = routeAvoiding(*nb, remainder.back().cell, t, blocked);
    if (path.empty()) continue;
    out.stage = 2;
    out.needDelay = true;
    out.remainder = timedRoute(path, now + 1, fd);
    return out;
  }
  return out;
}

FlightPlan reroute(const Topology& t, const FlightPlan& initialPlan, Cell currentCell,
                   int currentTick, Cell blockedNext, const NetworkView& view, int fd) {
  const auto& r = initialPlan.entries;
  std::size_t idx = r.size();
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i].cell == currentCell && r[i].tick <= currentTick) idx = i;
  }
  if (idx + 1 >= r.size() || r[idx + 1].cell != blockedNext)
    throw std::invalid_argument("blocked cell is not the next entry of the plan");
  Route rem(r.begin() + static_cast<long>(idx) + 1, r.end());
  auto res = rerouteRemainder(t, currentCell, currentTick, rem, view, fd);
  FlightPlan out = initialPlan;
  out.entries.assign(r.begin(), r.begin() + static_cast<long>(idx) + 1);
  out.entries.insert(out.entries.end(), res.remainder.begin(), res.remainder.end());
  return out;
}

}  // namespace trackcheck
