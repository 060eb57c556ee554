#pragma once

#include <cstdint>
#include <functional>

#include "core/grid.hpp"

namespace ssx {

enum class Dir : std::uint8_t { None = 0, Up = 1, Down = 2, Left = 3, Right = 4 };

inline Dir reverse(Dir d) {
  switch (d) {
    case Dir::Up: return Dir::Down;
    case Dir::Down: return Dir::Up;
    case Dir::Left: return Dir::Right;
    case Dir::Right: return Dir::Left;
    default: return Dir::None;
  }
}

/// One game state. Position-only environments leave the ghost/food fields at
/// their defaults. ghost (-1,-1) means no ghost (absent or eaten).
struct GridState {
  Cell agent{0, 0};
  Cell ghost{-1, -1};
  std::uint64_t food = 0;  // bit i set == food remaining at layout food cell i
  Dir ghost_dir = Dir::None;
  bool pill = false;       // pill still on the board
  std::uint8_t edible = 0; // ghost-edible turns remaining

  bool ghost_present() const { return ghost.row >= 0; }

  bool operator==(const GridState&) const = default;
};

/// Canonical 128-bit packing of a GridState, used for hashing/deduplication.
struct StateKey {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::uint64_t z = k.lo ^ (k.hi * 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};

}  // namespace ssx
