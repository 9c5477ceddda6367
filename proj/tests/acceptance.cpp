// Acceptance suite. One PASS/FAIL line per criterion; exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "icosoku/harness.hpp"

using namespace icosoku;

namespace {

const Topology kTopo = build_icosahedron();
const TileTable kTiles = tile_table();

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome tile_canonicalization() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& rows = kTiles.rows();
  std::set<int> ids;
  std::set<TileTriple> canon;
  for (const auto& r : rows) {
    ids.insert(r.type_id);
    canon.insert(canonical_tile(r.a, r.b, r.c).canonical);
  }
  const bool exemplars = kTiles.type_of({0, 0, 0}) == 1 && kTiles.type_of({0, 0, 2}) == 7 &&
                         kTiles.type_of({0, 3, 3}) == 10 && kTiles.type_of({1, 2, 3}) == 23 &&
                         kTiles.type_of({3, 2, 1}) == 24;
  const double s = seconds_since(t0);
  std::ostringstream d;
  d << rows.size() << " rows, " << ids.size() << " types, " << canon.size() << " classes, exemplars "
    << (exemplars ? "ok" : "WRONG") << ", " << s << " s";
  return {rows.size() == 64 && ids.size() == 24 && canon.size() == 24 && exemplars && s < 1.0, d.str()};
}

Outcome model_accounting() {
  const auto m = build_adts_model(kTopo, kTiles);
  std::ostringstream d;
  d << m.csp.variable_count() << " variables, " << m.csp.constraint_count() << " constraints";
  return {m.csp.variable_count() == 92 && m.csp.constraint_count() == 35, d.str()};
}

Outcome first_solution() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = build_adts_model(kTopo, kTiles);
  const auto r = solve_adts(m, 1'000'000);
  const double s = seconds_since(t0);
  std::ostringstream d;
  d << "status " << engine::to_string(r.status) << ", nodes " << r.stats.nodes_visited << ", backtracks "
    << r.stats.backtracks << ", " << r.stats.millis() << " ms";
  const bool ok = r.solution && r.solution->vertex_values[0] == 1 &&
                  verify_adts(kTopo, kTiles, *r.solution).accepted() && s <= 60.0;
  return {ok, d.str()};
}

// The first `count` representatives at or after rank lo give the slice [lo, hi).
std::uint64_t slice_end(std::uint64_t lo, std::uint64_t count) {
  Arrangement a = perm_unrank(lo);
  std::uint64_t r = lo;
  for (std::uint64_t seen = 0; seen < count; ++r, std::next_permutation(a.begin(), a.end())) {
    if (is_c5_representative(a)) ++seen;
  }
  return r;
}

Outcome desk_sweep() {
  const auto t0 = std::chrono::steady_clock::now();
  SweepOptions o;
  o.lo = kArrangementCount / 2;
  o.hi = slice_end(o.lo, 5000);
  o.checkpoint_interval = 1000;
  const auto run = sweep(kTopo, kTiles, o);
  const auto sample = sample_permutations(kTopo, kTiles, 2024, 1000, kDefaultNodeBudget);
  const double s = seconds_since(t0);
  SolveTotals all = run.session;
  all.merge(sample.session);
  std::ostringstream d;
  d << "slice " << o.lo << ":" << o.hi << " processed " << run.report.processed << " SAT " << run.report.sat
    << " undecided " << run.report.undecided.size() << " counterexamples " << run.report.counterexamples.size()
    << "; sample seed 2024 checked " << sample.checked << " SAT " << sample.sat << " undecided "
    << sample.undecided.size() << " counterexamples " << sample.counterexamples.size() << "; max nodes "
    << all.max_nodes << ", " << s << " s";
  const bool ok = run.report.processed == 5000 && run.report.sat == 5000 && sample.checked == 1000 &&
                  sample.sat == 1000 && s <= 15 * 60;
  return {ok, d.str()};
}

// Tetrahedron: faces wound consistently, 3 per vertex.
constexpr std::array<std::array<int, 3>, 4> kTetraFaces{{{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}}};

std::uint64_t tetra_enumerate() {
  std::uint64_t count = 0;
  for (std::uint32_t code = 0; code < (1u << 24); ++code) {
    std::array<int, 12> corner{};
    for (int i = 0; i < 12; ++i) corner[static_cast<std::size_t>(i)] = static_cast<int>((code >> (2 * i)) & 3u);
    std::array<int, 4> sum{};
    for (std::size_t f = 0; f < 4; ++f)
      for (std::size_t c = 0; c < 3; ++c) sum[static_cast<std::size_t>(kTetraFaces[f][c])] += corner[f * 3 + c];
    std::sort(sum.begin(), sum.end());
    if (sum != std::array<int, 4>{1, 2, 3, 4}) continue;
    std::set<std::array<int, 3>> classes;
    for (std::size_t f = 0; f < 4; ++f) {
      std::array<int, 3> t{corner[f * 3], corner[f * 3 + 1], corner[f * 3 + 2]};
      auto best = t;
      for (int r = 0; r < 2; ++r) {
        t = {t[2], t[0], t[1]};
        best = std::min(best, t);
      }
      classes.insert(best);
    }
    if (classes.size() == 4) ++count;
  }
  return count;
}

std::uint64_t tetra_solve_all() {
  engine::Model m;
  std::array<engine::VarId, 4> pegs{};
  for (auto& p : pegs) p = m.add_variable(1, 4);
  std::array<std::array<engine::VarId, 4>, 4> rows{};
  std::array<engine::VarId, 4> types{};
  for (std::size_t f = 0; f < 4; ++f) {
    for (std::size_t c = 0; c < 3; ++c) rows[f][c] = m.add_variable(0, 3);
    rows[f][3] = types[f] = m.add_variable(1, kTileTypes);
  }
  m.post_all_different(pegs);
  m.post_all_different(types);
  const auto tuples = tile_tuples(kTiles);
  for (const auto& r : rows) m.post_table(r, tuples);
  for (int v = 0; v < 4; ++v) {
    std::vector<engine::VarId> corners;
    for (std::size_t f = 0; f < 4; ++f)
      for (std::size_t c = 0; c < 3; ++c)
        if (kTetraFaces[f][c] == v) corners.push_back(rows[f][c]);
    m.post_linear_sum(corners, std::vector<int>(corners.size(), 1), pegs[static_cast<std::size_t>(v)]);
  }
  const auto r = engine::solve_all(m, 100'000'000, [](const engine::Assignment&) {});
  return r.status == engine::SearchStatus::kExhausted ? r.count : 0;
}

Outcome oracle_equivalence() {
  const auto brute = tetra_enumerate();
  const auto engine_count = tetra_solve_all();
  std::ostringstream d;
  d << "brute force " << brute << ", solve_all " << engine_count;
  return {brute == engine_count && brute > 0, d.str()};
}

std::vector<Solution> engine_solutions(std::size_t n, std::uint64_t seed) {
  std::vector<Solution> out;
  for (const auto& pegs : random_peg_permutations(seed, n)) {
    auto pc = check_pegs(kTopo, kTiles, pegs, kDefaultNodeBudget, true);
    if (pc.witness) out.push_back(*pc.witness);
  }
  return out;
}

// Checks written out directly rather than through verify_adts.
std::size_t invariant_violations(const Solution& s) {
  std::size_t bad = 0;
  if (total_dots(s) != 78) ++bad;
  for (int v = 0; v < kVertexCount; ++v) {
    int sum = 0;
    for (const auto& [f, c] : kTopo.faces_at_vertex(v))
      sum += s.face_corners[static_cast<std::size_t>(f)][static_cast<std::size_t>(c)];
    if (sum != s.vertex_values[static_cast<std::size_t>(v)]) ++bad;
  }
  if (std::set<int>(s.face_types.begin(), s.face_types.end()).size() != kFaceCount) ++bad;
  for (std::size_t f = 0; f < kFaceCount; ++f) {
    const auto& t = s.face_corners[f];
    const bool row_found = std::any_of(kTiles.rows().begin(), kTiles.rows().end(), [&](const TileRow& r) {
      return r.a == t[0] && r.b == t[1] && r.c == t[2] && r.type_id == s.face_types[f];
    });
    if (!row_found) ++bad;
  }
  return bad;
}

Outcome invariant_suite() {
  const auto sols = engine_solutions(100, 6);
  std::size_t bad = 0;
  for (const auto& s : sols) bad += invariant_violations(s) + (verify_adts(kTopo, kTiles, s).accepted() ? 0 : 1);
  std::ostringstream d;
  d << sols.size() << " solutions, " << bad << " violations";
  return {sols.size() == 100 && bad == 0, d.str()};
}

Outcome symmetry_soundness() {
  const auto sols = engine_solutions(20, 7);
  std::size_t bad = 0;
  std::size_t checked = 0;
  for (const auto& s : sols) {
    for (int k = 0; k < 5; ++k) {
      ++checked;
      const auto moved = permute_solution(kTopo, s, rotation_about_apex(kTopo, k));
      if (!verify_adts(kTopo, kTiles, moved).accepted()) ++bad;
    }
  }
  std::ostringstream d;
  d << checked << " rotated solutions, " << bad << " violations";
  return {checked == 100 && bad == 0, d.str()};
}

Outcome sweep_mechanics() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::uint64_t> pick(0, kArrangementCount - 1);
  std::size_t mismatches = 0;
  for (int i = 0; i < 100'000; ++i) {
    const auto r = pick(rng);
    if (perm_rank(perm_unrank(r)) != r) ++mismatches;
  }

  const auto path = std::filesystem::temp_directory_path() / "icosoku_acceptance_resume.ckpt";
  std::filesystem::remove(path);
  SweepOptions o;
  o.lo = 7'000'000;
  o.hi = o.lo + 2000;
  o.checkpoint_interval = 50;
  const auto straight = sweep(kTopo, kTiles, o);
  o.checkpoint = path;
  o.stop_after_flushes = 3;
  const auto partial = sweep(kTopo, kTiles, o);
  o.stop_after_flushes = 0;
  const auto resumed = sweep(kTopo, kTiles, o);
  std::filesystem::remove(path);

  std::ostringstream d;
  d << "100000 roundtrips, " << mismatches << " mismatches; interrupted run processed " << partial.report.processed
    << " of " << straight.report.processed << ", resumed report "
    << (resumed.report == straight.report ? "identical" : "DIFFERENT");
  const bool ok = mismatches == 0 && partial.interrupted && partial.report.processed < straight.report.processed &&
                  resumed.report == straight.report;
  return {ok, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"tile canonicalization", tile_canonicalization},
      {"model accounting", model_accounting},
      {"first all-different solution", first_solution},
      {"desk-scale sweep and random sample", desk_sweep},
      {"tetrahedron oracle equivalence", oracle_equivalence},
      {"solution invariants", invariant_suite},
      {"apex rotation soundness", symmetry_soundness},
      {"rank roundtrip and resume", sweep_mechanics},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << n << ". " << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed;
}
