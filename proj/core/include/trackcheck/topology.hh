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

#ifndef TRACKCHECK_TOPOLOGY_HH
#define TRACKCHECK_TOPOLOGY_HH

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace trackcheck {

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

std::string toString(Cell c);

// Port directions. North is +y, east is +x.
enum class Dir : std::uint8_t { N = 0, E = 1, S = 2, W = 3 };

inline constexpr std::array<Dir, 4> kAllDirs{Dir::N, Dir::E, Dir::S, Dir::W};

Dir opposite(Dir d);
Cell step(Cell c, Dir d);
std::optional<Dir> directionBetween(Cell from, Cell to);

struct ComponentId {
  int rx = 0;
  int ry = 0;
  auto operator<=>(const ComponentId&) const = default;
};

std::string toString(ComponentId c);

struct Channel {
  Cell source;
  Dir sourcePort = Dir::N;
  Cell sink;
  Dir sinkPort = Dir::S;
  auto operator<=>(const Channel&) const = default;
};

Channel channelBetween(Cell from, Cell to);

struct StormEvent {
  Cell cell;
  int startTick = 0;
  std::optional<int> endTick;

  bool activeAt(int tick) const {
    return tick >= startTick && (!endTick || tick < *endTick);
  }
  bool permanentAfter(int tick) const { return !endTick || *endTick <= tick; }
};

// Rectangular sub-track grid split into square regions. Square meshes come
// from buildMesh; the rectangular form exists for hand-built fixtures.
class Topology {
 public:
  static Topology grid(int width, int height, int regionSize);

  int width() const { return width_; }
  int height() const { return height_; }
  int regionSize() const { return regionSize_; }
  int cellCount() const { return width_ * height_; }

  bool contains(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }
  int index(Cell c) const { return c.y * width_ + c.x; }
  Cell cellAt(int idx) const { return Cell{idx % width_, idx / width_}; }

  // In-grid neighbours in N, E, S, W order.
  std::vector<Cell> neighbors(Cell c) const;
  std::optional<Cell> neighbor(Cell c, Dir d) const;
  bool adjacent(Cell a, Cell b) const;

  const std::vector<Cell>& sources() const { return sources_; }
  const std::vector<Cell>& destinations() const { return destinations_; }

  int regionsX() const { return width_ / regionSize_; }
  int regionsY() const { return height_ / regionSize_; }
  int componentCount() const { return regionsX() * regionsY(); }
  ComponentId componentOf(Cell c) const {
    return ComponentId{c.x / regionSize_, c.y / regionSize_};
  }
  int componentIndex(ComponentId c) const { return c.ry * regionsX() + c.rx; }
  ComponentId componentAt(int idx) const {
    return ComponentId{idx % regionsX(), idx / regionsX()};
  }
  std::vector<ComponentId> components() const;
  std::vector<Cell> cellsOf(ComponentId c) const;
  bool validComponent(ComponentId c) const {
    return c.rx >= 0 && c.ry >= 0 && c.rx < regionsX() && c.ry < regionsY();
  }

  std::vector<ComponentId> envComponents(ComponentId c) const;
  std::vector<Cell> envActors(ComponentId c, ComponentId neighbor) const;
  std::vector<Channel> channels() const;

  // Upper bound on the cells any route can visit; fuel must exceed it.
  int longestPathBound() const { return cellCount(); }

  Cell middleCell() const { return Cell{(width_ - 1) / 2, (height_ - 1) / 2}; }

 private:
  Topology(int w, int h, int r);
  int width_;
  int height_;
  int regionSize_;
  std::vector<Cell> sources_;
  std::vector<Cell> destinations_;
};

Topology buildMesh(int n, int regionSize);
ComponentId componentOf(Cell c, const Topology& t);
std::vector<ComponentId> envComponents(ComponentId c, const Topology& t);
std::vector<Cell> envActors(ComponentId c, ComponentId neighbor,
                            const Topology& t);

// Set of components with a per-cell membership cache.
class Scope {
 public:
  Scope() = default;
  Scope(const Topology& t, const std::vector<ComponentId>& comps);
  static Scope all(const Topology& t);

  bool containsCell(int cellIdx) const { return cellMask_[cellIdx] != 0; }
  bool contains(ComponentId c) const;
  const std::vector<ComponentId>& components() const { return comps_; }
  std::size_t size() const { return comps_.size(); }
  bool isAll(const Topology& t) const {
    return comps_.size() == static_cast<std::size_t>(t.componentCount());
  }

 private:
  std::vector<ComponentId> comps_;
  std::vector<std::uint8_t> cellMask_;
};

// Scope union; adding a member twice leaves the scope unchanged.
std::vector<ComponentId> composeComponents(const std::vector<ComponentId>& scope,
                                           ComponentId added);

}  // namespace trackcheck

#endif  // TRACKCHECK_TOPOLOGY_HH
