#pragma once

#include <algorithm>
#include <array>
#include <stdexcept>
#include <vector>

namespace icosoku {

inline constexpr int kDotValues = 4;
inline constexpr int kTileTypes = 24;
inline constexpr int kTableRows = kDotValues * kDotValues * kDotValues;

using TileTriple = std::array<int, 3>;

// Canonical triple of every type, indexed by type id - 1.
//
//  1..4   constant triples
//  5..16  two equal values, per value pair (a,b): (a,a,b) then (a,b,b)
//  17..24 all distinct, by smallest rotation
inline constexpr std::array<TileTriple, kTileTypes> kTypeRepresentatives{{
    {0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3},
    {0, 0, 1}, {0, 1, 1}, {0, 0, 2}, {0, 2, 2}, {0, 0, 3}, {0, 3, 3},
    {1, 1, 2}, {1, 2, 2}, {1, 1, 3}, {1, 3, 3}, {2, 2, 3}, {2, 3, 3},
    {0, 1, 2}, {0, 2, 1}, {0, 1, 3}, {0, 3, 1}, {0, 2, 3}, {0, 3, 2},
    {1, 2, 3}, {1, 3, 2},
}};

inline constexpr TileTriple rotate_tile(const TileTriple& t) { return {t[2], t[0], t[1]}; }

struct CanonicalTile {
  TileTriple canonical;
  int type_id;
};

inline constexpr CanonicalTile canonical_tile(int a, int b, int c) {
  for (int x : {a, b, c}) {
    if (x < 0 || x >= kDotValues) throw std::out_of_range("dot count must be in 0..3");
  }
  TileTriple best{a, b, c};
  TileTriple r = best;
  for (int i = 0; i < 2; ++i) {
    r = rotate_tile(r);
    if (r < best) best = r;
  }
  for (int id = 0; id < kTileTypes; ++id) {
    if (kTypeRepresentatives[id] == best) return {best, id + 1};
  }
  throw std::logic_error("canonical triple missing from type list");
}

inline constexpr CanonicalTile canonical_tile(const TileTriple& t) {
  return canonical_tile(t[0], t[1], t[2]);
}

struct TileRow {
  int a, b, c, type_id;
  friend constexpr bool operator==(const TileRow&, const TileRow&) = default;
};

// The 64 (a, b, c, type) tuples, row-major by (a, b, c).
class TileTable {
 public:
  constexpr TileTable() {
    int i = 0;
    for (int a = 0; a < kDotValues; ++a)
      for (int b = 0; b < kDotValues; ++b)
        for (int c = 0; c < kDotValues; ++c)
          rows_[i++] = TileRow{a, b, c, canonical_tile(a, b, c).type_id};
  }

  constexpr const std::array<TileRow, kTableRows>& rows() const { return rows_; }

  constexpr int type_of(int a, int b, int c) const {
    return rows_.at(static_cast<std::size_t>(a * 16 + b * 4 + c)).type_id;
  }
  constexpr int type_of(const TileTriple& t) const { return type_of(t[0], t[1], t[2]); }

  constexpr const TileTriple& canonical(int type_id) const {
    if (type_id < 1 || type_id > kTileTypes) throw std::out_of_range("type id must be in 1..24");
    return kTypeRepresentatives[type_id - 1];
  }

  // Flattened rows as engine tuples.
  std::vector<std::vector<int>> tuples() const {
    std::vector<std::vector<int>> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back({r.a, r.b, r.c, r.type_id});
    return out;
  }

 private:
  std::array<TileRow, kTableRows> rows_{};
};

inline constexpr TileTable tile_table() { return TileTable{}; }

// Orbit count of C3 acting on colored triangles: (n^3 + 2n) / 3.
inline constexpr long long type_count_by_burnside(long long colors = kDotValues) {
  return (colors * colors * colors + 2 * colors) / 3;
}

}  // namespace icosoku
