#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "icosoku/model.hpp"

namespace icosoku {
namespace {

const Topology kTopo = build_icosahedron();
const TileTable kTiles = tile_table();

std::map<engine::ConstraintKind, int> inventory(const AdtsModel& m) {
  std::map<engine::ConstraintKind, int> out;
  for (const auto& c : m.csp.constraints()) ++out[c.kind()];
  return out;
}

Solution first_solution() {
  const auto m = build_adts_model(kTopo, kTiles);
  const auto r = solve_adts(m, 1'000'000);
  EXPECT_EQ(r.status, engine::SearchStatus::kFound);
  return *r.solution;
}

TEST(AdtsModel, DefaultAccounting) {
  const auto m = build_adts_model(kTopo, kTiles);
  EXPECT_EQ(m.csp.variable_count(), 92u);
  EXPECT_EQ(m.csp.constraint_count(), 35u);
  const auto inv = inventory(m);
  EXPECT_EQ(inv.at(engine::ConstraintKind::kAllDifferent), 2);
  EXPECT_EQ(inv.at(engine::ConstraintKind::kTable), 20);
  EXPECT_EQ(inv.at(engine::ConstraintKind::kLinearSum), 12);
  EXPECT_EQ(inv.at(engine::ConstraintKind::kAssign), 1);
}

TEST(AdtsModel, SumScopesFollowIncidence) {
  const auto m = build_adts_model(kTopo, kTiles);
  int v = 0;
  for (const auto& c : m.csp.constraints()) {
    const auto* ls = std::get_if<engine::LinearSum>(&c.payload());
    if (!ls) continue;
    EXPECT_EQ(ls->target, m.vertices[v]);
    std::set<engine::VarId> want;
    for (const auto& [f, corner] : kTopo.faces_at_vertex(v)) want.insert(m.faces[f][corner]);
    EXPECT_EQ(std::set<engine::VarId>(ls->scope.begin(), ls->scope.end()), want);
    EXPECT_EQ(ls->coefficients, std::vector<int>(5, 1));
    ++v;
  }
  EXPECT_EQ(v, 12);
}

TEST(AdtsModel, WithoutApexFixHas34Constraints) {
  ModelOptions o;
  o.fix_v0 = false;
  EXPECT_EQ(build_adts_model(kTopo, kTiles, o).csp.constraint_count(), 34u);
}

TEST(AdtsModel, FixedVerticesReplaceApexAssignment) {
  ModelOptions o;
  VertexValues p{};
  std::iota(p.begin(), p.end(), 1);
  o.fixed_vertex_values = p;
  const auto m = build_adts_model(kTopo, kTiles, o);
  EXPECT_EQ(m.csp.variable_count(), 92u);
  EXPECT_EQ(inventory(m).at(engine::ConstraintKind::kAssign), 12);
  const auto r = solve_adts(m, 10'000'000);
  ASSERT_EQ(r.status, engine::SearchStatus::kFound);
  EXPECT_EQ(r.solution->vertex_values, p);
  EXPECT_TRUE(verify_adts(kTopo, kTiles, *r.solution).accepted());
}

TEST(AdtsModel, InvalidOptionsRejected) {
  ModelOptions bad_perm;
  bad_perm.fixed_vertex_values = VertexValues{1, 1, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  EXPECT_THROW(build_adts_model(kTopo, kTiles, bad_perm), std::invalid_argument);

  ModelOptions too_few;
  too_few.allowed_types = std::vector<int>{1, 2, 3};
  EXPECT_THROW(build_adts_model(kTopo, kTiles, too_few), std::invalid_argument);

  ModelOptions repeated;
  std::vector<int> ids(20);
  std::iota(ids.begin(), ids.end(), 1);
  ids[19] = 1;
  repeated.allowed_types = ids;
  EXPECT_THROW(build_adts_model(kTopo, kTiles, repeated), std::invalid_argument);

  ModelOptions out_of_range;
  std::iota(ids.begin(), ids.end(), 6);  // 6..25
  out_of_range.allowed_types = ids;
  EXPECT_THROW(build_adts_model(kTopo, kTiles, out_of_range), std::invalid_argument);
}

TEST(AdtsModel, DefaultModelIsSatisfiable) {
  const auto s = first_solution();
  EXPECT_EQ(s.vertex_values[0], 1);
  EXPECT_TRUE(verify_adts(kTopo, kTiles, s).accepted());
  EXPECT_EQ(total_dots(s), 78);
  EXPECT_LE(s.stats.backtracks, s.stats.nodes_visited);
}

TEST(AdtsModel, SolveIsDeterministic) {
  const auto a = first_solution();
  const auto b = first_solution();
  EXPECT_EQ(a.vertex_values, b.vertex_values);
  EXPECT_EQ(a.face_corners, b.face_corners);
  EXPECT_EQ(a.stats.nodes_visited, b.stats.nodes_visited);
  EXPECT_EQ(a.stats.backtracks, b.stats.backtracks);
}

TEST(UsableTypes, WeightArgument) {
  // Dot weights of all 24 types total 108; 20 placed tiles must carry 78.
  int total = 0;
  for (int id = 1; id <= 24; ++id) total += tile_weight(kTiles.canonical(id));
  EXPECT_EQ(total, 108);

  std::vector<int> all(24);
  std::iota(all.begin(), all.end(), 1);
  const auto usable = usable_types(kTiles, all);
  // (3,3,3) and (2,3,3) are never usable.
  std::vector<int> expected;
  for (int id : all)
    if (id != 4 && id != 16) expected.push_back(id);
  EXPECT_EQ(usable, expected);

  // Independent count of weight-feasible subsets: exclusions of weight 30.
  int feasible = 0;
  for (int a = 1; a <= 24; ++a)
    for (int b = a + 1; b <= 24; ++b)
      for (int c = b + 1; c <= 24; ++c)
        for (int d = c + 1; d <= 24; ++d) {
          const int w = tile_weight(kTiles.canonical(a)) + tile_weight(kTiles.canonical(b)) +
                        tile_weight(kTiles.canonical(c)) + tile_weight(kTiles.canonical(d));
          feasible += w == 30 ? 1 : 0;
        }
  EXPECT_EQ(feasible, 8);
}

TEST(UsableTypes, InfeasibleSubsetGivesEmptyDomain) {
  std::vector<int> first20(20);
  std::iota(first20.begin(), first20.end(), 1);  // excludes 21..24, weight 22
  EXPECT_TRUE(usable_types(kTiles, first20).empty());
  ModelOptions o;
  o.allowed_types = first20;
  o.implied_type_weights = true;
  const auto m = build_adts_model(kTopo, kTiles, o);
  const auto r = solve_adts(m, 1000);
  EXPECT_EQ(r.status, engine::SearchStatus::kExhausted);
  EXPECT_EQ(r.stats.nodes_visited, 0u);
}

TEST(UsableTypes, ImpliedRestrictionKeepsSolutions) {
  // Same pegs with and without the implied restriction: both satisfiable,
  // and a solution of the plain model never uses types 4 or 16.
  const VertexValues pegs{1, 7, 3, 12, 5, 9, 2, 11, 4, 10, 6, 8};
  for (bool implied : {false, true}) {
    ModelOptions o;
    o.fixed_vertex_values = pegs;
    o.implied_type_weights = implied;
    const auto r = solve_adts(build_adts_model(kTopo, kTiles, o), 10'000'000);
    ASSERT_EQ(r.status, engine::SearchStatus::kFound) << implied;
    EXPECT_TRUE(verify_adts(kTopo, kTiles, *r.solution).accepted());
    for (int t : r.solution->face_types) {
      EXPECT_NE(t, 4);
      EXPECT_NE(t, 16);
    }
  }
}

TEST(Verify, DetectsCornerChange) {
  auto s = first_solution();
  // Bump a corner below 3.
  bool done = false;
  for (auto& t : s.face_corners) {
    for (auto& c : t) {
      if (!done && c < 3) {
        ++c;
        done = true;
      }
    }
  }
  ASSERT_TRUE(done);
  const auto v = verify_adts(kTopo, kTiles, s);
  EXPECT_FALSE(v.accepted());
  EXPECT_TRUE(v.failed(Check::kVertexSum));
}

TEST(Verify, DetectsSwappedTypes) {
  auto s = first_solution();
  std::swap(s.face_types[0], s.face_types[1]);
  const auto v = verify_adts(kTopo, kTiles, s);
  EXPECT_FALSE(v.accepted());
  EXPECT_TRUE(v.failed(Check::kTileType));
  EXPECT_FALSE(v.failed(Check::kDistinctTypes));
}

TEST(Verify, DetectsBadPermutationAndRepeatedTypes) {
  auto s = first_solution();
  s.vertex_values[0] = s.vertex_values[1];
  EXPECT_TRUE(verify_adts(kTopo, kTiles, s).failed(Check::kPermutation));

  Solution zeros;
  zeros.face_types.fill(1);
  const auto v = verify_adts(kTopo, kTiles, zeros);
  EXPECT_TRUE(v.failed(Check::kDistinctTypes));
  EXPECT_FALSE(v.failed(Check::kTileType));
}

TEST(Verify, OutOfRangeCornerIsTypeFailure) {
  auto s = first_solution();
  s.face_corners[3][1] = 7;
  EXPECT_TRUE(verify_adts(kTopo, kTiles, s).failed(Check::kTileType));
}

TEST(TotalDots, Examples) {
  Solution zeros;
  EXPECT_EQ(total_dots(zeros), 0);
  Solution threes;
  for (auto& t : threes.face_corners) t = {3, 3, 3};
  EXPECT_EQ(total_dots(threes), 180);
  EXPECT_EQ(total_dots(first_solution()), 78);
}

}  // namespace
}  // namespace icosoku
