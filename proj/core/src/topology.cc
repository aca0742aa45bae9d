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

#include "trackcheck/topology.hh"

#include <algorithm>
#include <stdexcept>

namespace trackcheck {

std::string toString(Cell c) {
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

std::string toString(ComponentId c) {
  return "C(" + std::to_string(c.rx) + "," + std::to_string(c.ry) + ")";
}

Dir opposite(Dir d) {
  switch (d) {
    case Dir::N: return Dir::S;
    case Dir::E: return Dir::W;
    case Dir::S: return Dir::N;
    case Dir::W: return Dir::E;
  }
  return Dir::N;
}

Cell step(Cell c, Dir d) {
  switch (d) {
    case Dir::N: return Cell{c.x, c.y + 1};
    case Dir::E: return Cell{c.x + 1, c.y};
    case Dir::S: return Cell{c.x, c.y - 1};
    case Dir::W: return Cell{c.x - 1, c.y};
  }
  return c;
}

std::optional<Dir> directionBetween(Cell from, Cell to) {
  for (Dir d : kAllDirs) {
    if (step(from, d) == to) return d;
  }
  return std::nullopt;
}

Channel channelBetween(Cell from, Cell to) {
  auto d = directionBetween(from, to);
  if (!d) throw std::invalid_argument("cells " + toString(from) + " and " +
                                      toString(to) + " are not adjacent");
  return Channel{from, *d, to, opposite(*d)};
}

Topology::Topology(int w, int h, int r) : width_(w), height_(h), regionSize_(r) {
  // Airports hang off the low edges (sources) and the high edges
  // (destinations); the shared corner of each pair is counted once.
  for (int i = 1; i < height_; ++i) sources_.push_back(Cell{0, i});
  for (int i = 1; i < width_; ++i) sources_.push_back(Cell{i, 0});
  for (int i = 0; i + 1 < height_; ++i) destinations_.push_back(Cell{width_ - 1, i});
  for (int i = 0; i + 1 < width_; ++i) destinations_.push_back(Cell{i, height_ - 1});
}

Topology Topology::grid(int width, int height, int regionSize) {
  if (width < 1 || height < 1) throw std::invalid_argument("grid must be non-empty");
  if (regionSize < 1) throw std::invalid_argument("regionSize must be positive");
  if (width % regionSize != 0 || height % regionSize != 0) {
    throw std::invalid_argument("regionSize " + std::to_string(regionSize) +
                                " does not divide grid " + std::to_string(width) +
                                "x" + std::to_string(height));
  }
  return Topology(width, height, regionSize);
}

Topology buildMesh(int n, int regionSize) {
  if (n < 2) throw std::invalid_argument("mesh size must be at least 2");
  return Topology::grid(n, n, regionSize);
}

std::vector<Cell> Topology::neighbors(Cell c) const {
  std::vector<Cell> out;
  out.reserve(4);
  for (Dir d : kAllDirs) {
    Cell nb = step(c, d);
    if (contains(nb)) out.push_back(nb);
  }
  return out;
}

std::optional<Cell> Topology::neighbor(Cell c, Dir d) const {
  Cell nb = step(c, d);
  if (!contains(nb)) return std::nullopt;
  return nb;
}

bool Topology::adjacent(Cell a, Cell b) const {
  return contains(a) && contains(b) && directionBetween(a, b).has_value();
}

std::vector<ComponentId> Topology::components() const {
  std::vector<ComponentId> out;
  for (int i = 0; i < componentCount(); ++i) out.push_back(componentAt(i));
  return out;
}

std::vector<Cell> Topology::cellsOf(ComponentId c) const {
  std::vector<Cell> out;
  for (int y = c.ry * regionSize_; y < (c.ry + 1) * regionSize_; ++y)
    for (int x = c.rx * regionSize_; x < (c.rx + 1) * regionSize_; ++x)
      out.push_back(Cell{x, y});
  return out;
}

std::vector<ComponentId> Topology::envComponents(ComponentId c) const {
  std::vector<ComponentId> out;
  const ComponentId cand[4] = {{c.rx, c.ry + 1}, {c.rx + 1, c.ry},
                               {c.rx, c.ry - 1}, {c.rx - 1, c.ry}};
  for (const auto& nb : cand)
    if (validComponent(nb)) out.push_back(nb);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Cell> Topology::envActors(ComponentId c, ComponentId neighbor) const {
  std::vector<Cell> out;
  for (Cell cell : cellsOf(neighbor)) {
    for (Cell nb : neighbors(cell)) {
      if (componentOf(nb) == c) {
        out.push_back(cell);
        break;
      }
    }
  }
  return out;
}

std::vector<Channel> Topology::channels() const {
  std::vector<Channel> out;
  for (int i = 0; i < cellCount(); ++i) {
    Cell c = cellAt(i);
    for (Cell nb : neighbors(c)) out.push_back(channelBetween(c, nb));
  }
  return out;
}

ComponentId componentOf(Cell c, const Topology& t) { return t.componentOf(c); }

std::vector<ComponentId> envComponents(ComponentId c, const Topology& t) {
  return t.envComponents(c);
}

std::vector<Cell> envActors(ComponentId c, ComponentId neighbor, const Topology& t) {
  return t.envActors(c, neighbor);
}

Scope::Scope(const Topology& t, const std::vector<ComponentId>& comps)
    : comps_(comps), cellMask_(static_cast<std::size_t>(t.cellCount()), 0) {
  std::sort(comps_.begin(), comps_.end());
  comps_.erase(std::unique(comps_.begin(), comps_.end()), comps_.end());
  for (const auto& c : comps_) {
    if (!t.validComponent(c)) throw std::invalid_argument("unknown component " + toString(c));
    for (Cell cell : t.cellsOf(c)) cellMask_[t.index(cell)] = 1;
  }
}

Scope Scope::all(const Topology& t) { return Scope(t, t.components()); }

bool Scope::contains(ComponentId c) const {
  return std::binary_search(comps_.begin(), comps_.end(), c);
}

std::vector<ComponentId> composeComponents(const std::vector<ComponentId>& scope,
                                           ComponentId added) {
  std::vector<ComponentId> out = scope;
  if (std::find(out.begin(), out.end(), added) == out.end()) out.push_back(added);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace trackcheck
