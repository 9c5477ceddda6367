#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "icosoku/engine.hpp"
#include "icosoku/tiles.hpp"
#include "icosoku/topology.hpp"

namespace icosoku {

using VertexValues = std::array<int, kVertexCount>;

struct ModelOptions {
  bool fix_v0 = true;
  // Full assignment of V; replaces the v0 = 1 assignment when present.
  std::optional<VertexValues> fixed_vertex_values;
  // Exactly 20 type ids the faces must use.
  std::optional<std::vector<int>> allowed_types;
  // Drop type ids that no weight-feasible set of 20 distinct types
  // contains (see usable_types). Implied, so the solution set is unchanged;
  // off by default to keep the plain model's variable/constraint counts.
  bool implied_type_weights = false;
};

inline bool is_peg_permutation(const VertexValues& values) {
  auto sorted = values;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < kVertexCount; ++i) {
    if (sorted[static_cast<std::size_t>(i)] != i + 1) return false;
  }
  return true;
}

inline void validate(const ModelOptions& opts) {
  if (opts.fixed_vertex_values && !is_peg_permutation(*opts.fixed_vertex_values)) {
    throw std::invalid_argument("fixed vertex values must be a permutation of 1..12");
  }
  if (opts.allowed_types) {
    const std::set<int> ids(opts.allowed_types->begin(), opts.allowed_types->end());
    if (opts.allowed_types->size() != kFaceCount || ids.size() != kFaceCount) {
      throw std::invalid_argument("allowed types must name exactly 20 distinct ids");
    }
    if (*ids.begin() < 1 || *ids.rbegin() > kTileTypes) {
      throw std::invalid_argument("allowed type ids must lie in 1..24");
    }
  }
}

inline int tile_weight(const TileTriple& t) { return t[0] + t[1] + t[2]; }

// Type ids that occur in some 20-subset of `candidates` whose weights sum to
// the peg total 1 + ... + 12. Every corner is counted in exactly one vertex
// sum, so the 20 placed tiles of any solution carry exactly 78 dots.
inline std::vector<int> usable_types(const TileTable& tiles, std::vector<int> candidates) {
  constexpr int kPegTotal = kVertexCount * (kVertexCount + 1) / 2;
  std::sort(candidates.begin(), candidates.end());
  const int n = static_cast<int>(candidates.size());
  std::uint32_t usable = 0;
  if (n < kFaceCount) return {};
  std::vector<int> weight(candidates.size());
  int total = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    weight[i] = tile_weight(tiles.canonical(candidates[i]));
    total += weight[i];
  }
  // Walk every choice of n - 20 excluded candidates.
  const int drop = n - kFaceCount;
  std::vector<int> pick(static_cast<std::size_t>(drop));
  for (int i = 0; i < drop; ++i) pick[static_cast<std::size_t>(i)] = i;
  for (;;) {
    int excluded = 0;
    std::uint32_t mask = 0;
    for (int i : pick) {
      excluded += weight[static_cast<std::size_t>(i)];
      mask |= 1u << i;
    }
    if (total - excluded == kPegTotal) usable |= ~mask & ((1u << n) - 1);
    int k = drop - 1;
    while (k >= 0 && pick[static_cast<std::size_t>(k)] == n - drop + k) --k;
    if (k < 0) break;
    ++pick[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < drop; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (usable & (1u << i)) out.push_back(candidates[static_cast<std::size_t>(i)]);
  }
  return out;
}

// V (12 pegs) and the 20 x 4 face matrix F over one engine model.
struct AdtsModel {
  engine::Model csp;
  std::array<engine::VarId, kVertexCount> vertices{};
  // faces[f][0..2] corner dot counts, faces[f][3] type id.
  std::array<std::array<engine::VarId, 4>, kFaceCount> faces{};
};

inline std::shared_ptr<const engine::TupleSet> tile_tuples(const TileTable& tiles) {
  std::vector<int> flat;
  flat.reserve(kTableRows * 4);
  for (const auto& r : tiles.rows()) flat.insert(flat.end(), {r.a, r.b, r.c, r.type_id});
  return std::make_shared<const engine::TupleSet>(4, std::move(flat));
}

inline AdtsModel build_adts_model(const Topology& topo, const TileTable& tiles, const ModelOptions& opts = {}) {
  validate(opts);
  AdtsModel m;
  auto& csp = m.csp;
  for (auto& v : m.vertices) v = csp.add_variable(1, kVertexCount);
  for (auto& row : m.faces) {
    for (int c = 0; c < 3; ++c) row[static_cast<std::size_t>(c)] = csp.add_variable(0, kDotValues - 1);
    row[3] = csp.add_variable(1, kTileTypes);
  }

  csp.post_all_different(m.vertices);

  std::array<engine::VarId, kFaceCount> types{};
  for (int f = 0; f < kFaceCount; ++f) types[static_cast<std::size_t>(f)] = m.faces[static_cast<std::size_t>(f)][3];
  csp.post_all_different(types);

  const auto tuples = tile_tuples(tiles);
  for (const auto& row : m.faces) csp.post_table(row, tuples);

  static constexpr std::array<int, kFacesPerVertex> kOnes{1, 1, 1, 1, 1};
  for (int v = 0; v < kVertexCount; ++v) {
    std::array<engine::VarId, kFacesPerVertex> corners{};
    const auto& inc = topo.faces_at_vertex(v);
    for (int i = 0; i < kFacesPerVertex; ++i) {
      const auto& fc = inc[static_cast<std::size_t>(i)];
      corners[static_cast<std::size_t>(i)] =
          m.faces[static_cast<std::size_t>(fc.face)][static_cast<std::size_t>(fc.corner)];
    }
    csp.post_linear_sum(corners, kOnes, m.vertices[static_cast<std::size_t>(v)]);
  }

  if (opts.fixed_vertex_values) {
    for (int v = 0; v < kVertexCount; ++v) {
      csp.post_assign(m.vertices[static_cast<std::size_t>(v)], (*opts.fixed_vertex_values)[static_cast<std::size_t>(v)]);
    }
  } else if (opts.fix_v0) {
    csp.post_assign(m.vertices[0], 1);
  }

  std::vector<int> candidates;
  if (opts.allowed_types) {
    candidates = *opts.allowed_types;
  } else {
    for (int id = 1; id <= kTileTypes; ++id) candidates.push_back(id);
  }
  if (opts.implied_type_weights) candidates = usable_types(tiles, std::move(candidates));
  if (opts.allowed_types || opts.implied_type_weights) {
    const auto allowed = engine::Domain::of(candidates);
    for (auto t : types) csp.restrict_domain(t, allowed);
  }
  return m;
}

struct Solution {
  VertexValues vertex_values{};
  std::array<TileTriple, kFaceCount> face_corners{};
  std::array<int, kFaceCount> face_types{};
  engine::SearchStats stats;
};

inline Solution extract_solution(const AdtsModel& m, const engine::Assignment& a, const engine::SearchStats& stats) {
  Solution s;
  for (int v = 0; v < kVertexCount; ++v) {
    s.vertex_values[static_cast<std::size_t>(v)] = a.at(static_cast<std::size_t>(m.vertices[static_cast<std::size_t>(v)]));
  }
  for (std::size_t f = 0; f < kFaceCount; ++f) {
    for (std::size_t c = 0; c < 3; ++c) s.face_corners[f][c] = a.at(static_cast<std::size_t>(m.faces[f][c]));
    s.face_types[f] = a.at(static_cast<std::size_t>(m.faces[f][3]));
  }
  s.stats = stats;
  return s;
}

struct AdtsResult {
  engine::SearchStatus status = engine::SearchStatus::kExhausted;
  std::optional<Solution> solution;
  engine::SearchStats stats;
};

inline AdtsResult solve_adts(const AdtsModel& m, std::uint64_t node_budget) {
  auto r = engine::solve_first(m.csp, node_budget);
  AdtsResult out{r.status, std::nullopt, r.stats};
  if (r.solution) out.solution = extract_solution(m, *r.solution, r.stats);
  return out;
}

// Engine-free checker.

enum class Check { kPermutation = 'a', kVertexSum = 'b', kTileType = 'c', kDistinctTypes = 'd' };

struct Diagnostic {
  Check check;
  std::string location;
  std::string message;
};

struct Verdict {
  std::vector<Diagnostic> failures;
  bool accepted() const { return failures.empty(); }
  bool failed(Check c) const {
    return std::any_of(failures.begin(), failures.end(), [c](const Diagnostic& d) { return d.check == c; });
  }
};

inline Verdict verify_adts(const Topology& topo, const TileTable& tiles, const Solution& s) {
  Verdict out;
  auto fail = [&](Check c, std::string where, std::string what) {
    out.failures.push_back({c, std::move(where), std::move(what)});
  };

  if (!is_peg_permutation(s.vertex_values)) {
    fail(Check::kPermutation, "vertices", "vertex values are not a permutation of 1..12");
  }

  auto corner_ok = [](int x) { return x >= 0 && x < kDotValues; };
  for (int v = 0; v < kVertexCount; ++v) {
    int sum = 0;
    for (const auto& fc : topo.faces_at_vertex(v)) {
      sum += s.face_corners[static_cast<std::size_t>(fc.face)][static_cast<std::size_t>(fc.corner)];
    }
    const int want = s.vertex_values[static_cast<std::size_t>(v)];
    if (sum != want) {
      fail(Check::kVertexSum, "vertex " + std::to_string(v),
           "incident corners sum to " + std::to_string(sum) + ", peg is " + std::to_string(want));
    }
  }

  for (int f = 0; f < kFaceCount; ++f) {
    const auto& t = s.face_corners[static_cast<std::size_t>(f)];
    const int recorded = s.face_types[static_cast<std::size_t>(f)];
    const std::string where = "face " + std::to_string(f);
    if (!std::all_of(t.begin(), t.end(), corner_ok)) {
      fail(Check::kTileType, where, "corner dot count outside 0..3");
      continue;
    }
    const int actual = tiles.type_of(t);
    if (actual != recorded) {
      fail(Check::kTileType, where,
           "corners give type " + std::to_string(actual) + ", recorded " + std::to_string(recorded));
    }
  }

  for (int f = 0; f < kFaceCount; ++f) {
    for (int g = f + 1; g < kFaceCount; ++g) {
      if (s.face_types[static_cast<std::size_t>(f)] == s.face_types[static_cast<std::size_t>(g)]) {
        fail(Check::kDistinctTypes, "faces " + std::to_string(f) + "," + std::to_string(g),
             "type " + std::to_string(s.face_types[static_cast<std::size_t>(f)]) + " used twice");
      }
    }
  }
  return out;
}

inline int total_dots(const Solution& s) {
  int total = 0;
  for (const auto& t : s.face_corners) total += t[0] + t[1] + t[2];
  return total;
}

}  // namespace icosoku
