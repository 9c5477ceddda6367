#pragma once

// Permutation sweep over peg arrangements, with the v0 rotation quotient,
// resumable checkpoints and in-process worker partitioning, plus the scan
// over 20-type combinations.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "icosoku/model.hpp"

namespace icosoku {

inline constexpr int kFreeVertices = kVertexCount - 1;
inline constexpr std::uint64_t kArrangementCount = 39916800;  // 11!
inline constexpr std::uint64_t kRepresentativeCount = kArrangementCount / 5;

// Values 2..12 on v1..v11; v0 always carries 1.
using Arrangement = std::array<int, kFreeVertices>;

inline constexpr std::array<std::uint64_t, kFreeVertices + 1> kFactorial = [] {
  std::array<std::uint64_t, kFreeVertices + 1> f{};
  f[0] = 1;
  for (std::size_t i = 1; i < f.size(); ++i) f[i] = f[i - 1] * i;
  return f;
}();

// Lexicographic rank through the factorial number system.
inline Arrangement perm_unrank(std::uint64_t rank) {
  if (rank >= kArrangementCount) throw std::out_of_range("arrangement rank out of range");
  std::array<int, kFreeVertices> pool{};
  for (int i = 0; i < kFreeVertices; ++i) pool[static_cast<std::size_t>(i)] = i + 2;
  int left = kFreeVertices;
  Arrangement out{};
  for (int i = 0; i < kFreeVertices; ++i) {
    const std::uint64_t f = kFactorial[static_cast<std::size_t>(kFreeVertices - 1 - i)];
    const auto digit = static_cast<int>(rank / f);
    rank %= f;
    out[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(digit)];
    std::copy(pool.begin() + digit + 1, pool.begin() + left, pool.begin() + digit);
    --left;
  }
  return out;
}

inline std::uint64_t perm_rank(const Arrangement& a) {
  std::uint64_t rank = 0;
  std::uint32_t used = 0;
  for (int i = 0; i < kFreeVertices; ++i) {
    const int v = a[static_cast<std::size_t>(i)];
    if (v < 2 || v > kVertexCount || (used & (1u << v))) {
      throw std::invalid_argument("not an arrangement of 2..12");
    }
    // Smaller values not yet placed.
    const int smaller = (v - 2) - std::popcount(used & ((1u << v) - 1));
    used |= 1u << v;
    rank += static_cast<std::uint64_t>(smaller) * kFactorial[static_cast<std::size_t>(kFreeVertices - 1 - i)];
  }
  return rank;
}

inline VertexValues vertex_values_of(const Arrangement& a) {
  VertexValues v{};
  v[0] = 1;
  std::copy(a.begin(), a.end(), v.begin() + 1);
  return v;
}

// One member per orbit of the rotation about v0: the smallest upper-ring
// peg sits on v1.
inline bool is_c5_representative(const Arrangement& a) {
  return a[0] == *std::min_element(a.begin(), a.begin() + 5);
}

// Pegs carried along by a vertex permutation: out[image[v]] = values[v].
inline VertexValues permute_values(const VertexValues& values, const VertexPermutation& image) {
  VertexValues out{};
  for (int v = 0; v < kVertexCount; ++v) out[static_cast<std::size_t>(image[static_cast<std::size_t>(v)])] = values[static_cast<std::size_t>(v)];
  return out;
}

// Moves a whole solution along a face-preserving vertex permutation. Tiles
// keep their corner order, so types are unchanged.
inline Solution permute_solution(const Topology& topo, const Solution& s, const VertexPermutation& image) {
  Solution out = s;
  out.vertex_values = permute_values(s.vertex_values, image);
  for (int f = 0; f < kFaceCount; ++f) {
    const auto& face = topo.face(f);
    const FaceTriple moved{image[static_cast<std::size_t>(face[0])], image[static_cast<std::size_t>(face[1])],
                           image[static_cast<std::size_t>(face[2])]};
    const auto [g, shift] = topo.find_face(moved);
    if (g < 0) throw std::invalid_argument("permutation does not preserve the faces");
    for (int c = 0; c < 3; ++c) {
      out.face_corners[static_cast<std::size_t>(g)][static_cast<std::size_t>((c + shift) % 3)] =
          s.face_corners[static_cast<std::size_t>(f)][static_cast<std::size_t>(c)];
    }
    out.face_types[static_cast<std::size_t>(g)] = s.face_types[static_cast<std::size_t>(f)];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoint

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RangeRecord {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::uint64_t processed = 0;
  std::vector<std::uint64_t> counterexamples;
  // Still undecided after the retry pass. Written as a separate
  // `undecided` line directly after its range line, only when non-empty.
  std::vector<std::uint64_t> undecided;

  friend bool operator==(const RangeRecord&, const RangeRecord&) = default;
};

struct Interval {
  std::uint64_t lo;
  std::uint64_t hi;
  friend bool operator==(const Interval&, const Interval&) = default;
};

inline const std::string& checkpoint_header() {
  static const std::string header = "icosoku-sweep v1 total " + std::to_string(kArrangementCount);
  return header;
}

class SweepCheckpoint {
 public:
  const std::vector<RangeRecord>& records() const { return records_; }

  void add(RangeRecord r) {
    if (r.lo > r.hi || r.hi > kArrangementCount) throw std::invalid_argument("bad checkpoint range");
    auto it = std::lower_bound(records_.begin(), records_.end(), r.lo,
                               [](const RangeRecord& a, std::uint64_t lo) { return a.lo < lo; });
    if (it != records_.end() && it->lo < r.hi) throw std::logic_error("checkpoint ranges overlap");
    if (it != records_.begin() && std::prev(it)->hi > r.lo) throw std::logic_error("checkpoint ranges overlap");
    records_.insert(it, std::move(r));
  }

  // Parts of [lo, hi) not covered by any record, in order.
  std::vector<Interval> pending(std::uint64_t lo, std::uint64_t hi) const {
    std::vector<Interval> out;
    std::uint64_t cursor = lo;
    for (const auto& r : records_) {
      if (r.hi <= cursor) continue;
      if (r.lo >= hi) break;
      if (r.lo > cursor) out.push_back({cursor, std::min(r.lo, hi)});
      cursor = std::max(cursor, r.hi);
      if (cursor >= hi) break;
    }
    if (cursor < hi) out.push_back({cursor, hi});
    return out;
  }

  std::string format() const {
    std::ostringstream os;
    os << checkpoint_header() << '\n';
    auto list = [&](const std::vector<std::uint64_t>& xs) {
      if (xs.empty()) {
        os << "none";
        return;
      }
      for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
    };
    for (const auto& r : records_) {
      os << "range " << r.lo << ' ' << r.hi << " processed " << r.processed << " counterexamples ";
      list(r.counterexamples);
      os << '\n';
      if (!r.undecided.empty()) {
        os << "undecided ";
        list(r.undecided);
        os << '\n';
      }
    }
    return os.str();
  }

  static SweepCheckpoint parse(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != checkpoint_header()) {
      throw CheckpointError("checkpoint header mismatch: expected '" + checkpoint_header() + "'");
    }
    SweepCheckpoint cp;
    auto parse_list = [](const std::string& s) {
      std::vector<std::uint64_t> out;
      if (s == "none") return out;
      std::istringstream ls(s);
      std::string item;
      while (std::getline(ls, item, ',')) out.push_back(std::stoull(item));
      return out;
    };
    std::optional<RangeRecord> last;
    int line_no = 1;
    try {
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "range") {
          RangeRecord r;
          std::string k1;
          std::string k2;
          std::string list;
          ls >> r.lo >> r.hi >> k1 >> r.processed >> k2 >> list;
          if (!ls || k1 != "processed" || k2 != "counterexamples") throw CheckpointError("malformed range record");
          r.counterexamples = parse_list(list);
          if (last) cp.add(std::move(*last));
          last = std::move(r);
        } else if (tag == "undecided") {
          std::string list;
          ls >> list;
          if (!last || !last->undecided.empty()) throw CheckpointError("undecided line without a range");
          last->undecided = parse_list(list);
        } else {
          throw CheckpointError("unknown record '" + tag + "'");
        }
      }
      if (last) cp.add(std::move(*last));
    } catch (const CheckpointError& e) {
      throw CheckpointError("checkpoint line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw CheckpointError("checkpoint line " + std::to_string(line_no) + ": " + e.what());
    }
    return cp;
  }

  static SweepCheckpoint load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return {};
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  // Write-then-rename so a crash leaves either the old or the new file.
  void save(const std::filesystem::path& path) const {
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << format();
      out.flush();
      if (!out) throw CheckpointError("cannot write checkpoint " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
  }

 private:
  std::vector<RangeRecord> records_;
};

inline std::uint64_t count_representatives(std::uint64_t lo, std::uint64_t hi) {
  if (lo >= hi) return 0;
  Arrangement a = perm_unrank(lo);
  std::uint64_t n = 0;
  for (std::uint64_t r = lo; r < hi; ++r) {
    n += is_c5_representative(a) ? 1 : 0;
    std::next_permutation(a.begin(), a.end());
  }
  return n;
}

// ---------------------------------------------------------------------------
// Sweep

inline constexpr std::uint64_t kDefaultNodeBudget = 10'000'000;
inline constexpr std::uint64_t kRetryFactor = 100;
inline constexpr std::uint64_t kDefaultCheckpointInterval = 10'000;

struct SolveTotals {
  std::uint64_t solves = 0;
  std::uint64_t nodes = 0;
  std::uint64_t backtracks = 0;
  std::uint64_t max_nodes = 0;
  double millis = 0;

  void add(const engine::SearchStats& s) {
    ++solves;
    nodes += s.nodes_visited;
    backtracks += s.backtracks;
    max_nodes = std::max(max_nodes, s.nodes_visited);
    millis += s.millis();
  }
  void merge(const SolveTotals& o) {
    solves += o.solves;
    nodes += o.nodes;
    backtracks += o.backtracks;
    max_nodes = std::max(max_nodes, o.max_nodes);
    millis += o.millis;
  }
};

struct SweepOptions {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  unsigned workers = 1;
  std::optional<std::filesystem::path> checkpoint;
  std::uint64_t node_budget = kDefaultNodeBudget;
  std::uint64_t checkpoint_interval = kDefaultCheckpointInterval;
  bool implied_type_weights = true;
  // Stop cleanly after this many flushes in total; 0 never stops. Work not
  // yet flushed is dropped, as after a kill.
  std::uint64_t stop_after_flushes = 0;
};

// Verdict over [lo, hi), built from the checkpoint, so it does not depend on
// how many invocations produced it.
struct SweepReport {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::uint64_t processed = 0;
  std::uint64_t sat = 0;
  std::vector<std::uint64_t> undecided;
  std::vector<std::uint64_t> counterexamples;

  friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

struct SweepRun {
  SweepReport report;
  bool already_complete = false;
  bool interrupted = false;
  // Solves performed by this invocation only.
  SolveTotals session;
};

inline SweepReport summarize(const SweepCheckpoint& cp, std::uint64_t lo, std::uint64_t hi) {
  SweepReport rep{lo, hi, 0, 0, {}, {}};
  for (const auto& r : cp.records()) {
    if (r.hi <= lo || r.lo >= hi) continue;
    const bool inside = r.lo >= lo && r.hi <= hi;
    rep.processed += inside ? r.processed : count_representatives(std::max(r.lo, lo), std::min(r.hi, hi));
    for (auto x : r.counterexamples) {
      if (x >= lo && x < hi) rep.counterexamples.push_back(x);
    }
    for (auto x : r.undecided) {
      if (x >= lo && x < hi) rep.undecided.push_back(x);
    }
  }
  std::sort(rep.counterexamples.begin(), rep.counterexamples.end());
  std::sort(rep.undecided.begin(), rep.undecided.end());
  rep.sat = rep.processed - rep.counterexamples.size() - rep.undecided.size();
  return rep;
}

enum class Verdict3 { kSat, kUnsat, kUndecided };

inline const char* to_string(Verdict3 v) {
  switch (v) {
    case Verdict3::kSat: return "SAT";
    case Verdict3::kUnsat: return "UNSAT";
    case Verdict3::kUndecided: return "UNDECIDED";
  }
  return "?";
}

struct PegCheck {
  Verdict3 verdict = Verdict3::kUndecided;
  std::optional<Solution> witness;
  engine::SearchStats stats;
};

inline PegCheck check_pegs(const Topology& topo, const TileTable& tiles, const VertexValues& pegs,
                           std::uint64_t budget, bool implied) {
  ModelOptions opts;
  opts.fixed_vertex_values = pegs;
  opts.implied_type_weights = implied;
  const auto m = build_adts_model(topo, tiles, opts);
  auto r = solve_adts(m, budget);
  PegCheck out;
  out.stats = r.stats;
  switch (r.status) {
    case engine::SearchStatus::kFound:
      out.verdict = Verdict3::kSat;
      out.witness = std::move(r.solution);
      break;
    case engine::SearchStatus::kExhausted: out.verdict = Verdict3::kUnsat; break;
    case engine::SearchStatus::kBudget: out.verdict = Verdict3::kUndecided; break;
  }
  return out;
}

// Splits intervals into `parts` contiguous shares of near-equal rank count.
inline std::vector<std::vector<Interval>> partition(const std::vector<Interval>& pending, unsigned parts) {
  std::uint64_t total = 0;
  for (const auto& iv : pending) total += iv.hi - iv.lo;
  std::vector<std::vector<Interval>> out(parts);
  auto it = pending.begin();
  std::uint64_t pos = it != pending.end() ? it->lo : 0;
  for (unsigned p = 0; p < parts; ++p) {
    std::uint64_t want = total / parts + (p < total % parts ? 1 : 0);
    while (want > 0 && it != pending.end()) {
      const std::uint64_t take = std::min(want, it->hi - pos);
      out[p].push_back({pos, pos + take});
      pos += take;
      want -= take;
      if (pos == it->hi && ++it != pending.end()) pos = it->lo;
    }
  }
  return out;
}

inline SweepRun sweep(const Topology& topo, const TileTable& tiles, const SweepOptions& opt) {
  if (opt.lo > opt.hi || opt.hi > kArrangementCount) throw std::invalid_argument("rank range must satisfy lo <= hi <= 11!");
  if (opt.workers == 0) throw std::invalid_argument("need at least one worker");
  if (opt.node_budget == 0) throw std::invalid_argument("node budget must be positive");
  if (opt.checkpoint_interval == 0) throw std::invalid_argument("checkpoint interval must be positive");

  SweepCheckpoint cp = opt.checkpoint ? SweepCheckpoint::load(*opt.checkpoint) : SweepCheckpoint{};
  SweepRun run;
  const auto pending = cp.pending(opt.lo, opt.hi);
  run.already_complete = pending.empty() && opt.lo < opt.hi;

  std::mutex writer;
  std::atomic<std::uint64_t> flushes{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;

  auto flush = [&](RangeRecord rec) {
    std::lock_guard lock(writer);
    if (stop.load()) return;
    cp.add(std::move(rec));
    if (opt.checkpoint) cp.save(*opt.checkpoint);
    const auto n = ++flushes;
    if (opt.stop_after_flushes != 0 && n >= opt.stop_after_flushes) stop = true;
  };

  auto work = [&](const std::vector<Interval>& share, SolveTotals& totals) {
    for (const auto& iv : share) {
      RangeRecord rec{iv.lo, iv.lo, 0, {}, {}};
      std::vector<std::uint64_t> undecided;
      auto close = [&](std::uint64_t hi) {
        rec.hi = hi;
        for (auto r : undecided) {
          auto again = check_pegs(topo, tiles, vertex_values_of(perm_unrank(r)), opt.node_budget * kRetryFactor,
                                  opt.implied_type_weights);
          totals.add(again.stats);
          if (again.verdict == Verdict3::kUnsat) rec.counterexamples.push_back(r);
          if (again.verdict == Verdict3::kUndecided) rec.undecided.push_back(r);
        }
        std::sort(rec.counterexamples.begin(), rec.counterexamples.end());
        flush(std::move(rec));
        rec = RangeRecord{hi, hi, 0, {}, {}};
        undecided.clear();
      };
      Arrangement a = perm_unrank(iv.lo);
      for (std::uint64_t r = iv.lo; r < iv.hi; ++r, std::next_permutation(a.begin(), a.end())) {
        if (stop.load()) return;
        if (!is_c5_representative(a)) continue;
        auto res = check_pegs(topo, tiles, vertex_values_of(a), opt.node_budget, opt.implied_type_weights);
        totals.add(res.stats);
        ++rec.processed;
        if (res.verdict == Verdict3::kUnsat) rec.counterexamples.push_back(r);
        if (res.verdict == Verdict3::kUndecided) undecided.push_back(r);
        if (rec.processed == opt.checkpoint_interval) close(r + 1);
      }
      if (stop.load()) return;
      if (rec.lo < iv.hi) close(iv.hi);
    }
  };

  const auto shares = partition(pending, opt.workers);
  std::vector<SolveTotals> totals(opt.workers);
  {
    std::vector<std::jthread> threads;
    for (unsigned w = 0; w < opt.workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          work(shares[w], totals[w]);
        } catch (...) {
          std::lock_guard lock(writer);
          if (!failure) failure = std::current_exception();
          stop = true;
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  for (const auto& t : totals) run.session.merge(t);
  run.interrupted = stop.load();
  run.report = summarize(cp, opt.lo, opt.hi);
  return run;
}

// ---------------------------------------------------------------------------
// Random full permutations of 1..12 (v0 not fixed)

struct SampleReport {
  std::uint64_t checked = 0;
  std::uint64_t sat = 0;
  std::vector<VertexValues> undecided;
  std::vector<VertexValues> counterexamples;
  SolveTotals session;
};

inline std::vector<VertexValues> random_peg_permutations(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::vector<VertexValues> out(count);
  for (auto& p : out) {
    for (int i = 0; i < kVertexCount; ++i) p[static_cast<std::size_t>(i)] = i + 1;
    // Fisher-Yates with an explicit draw so the sequence is the same on
    // every standard library.
    for (int i = kVertexCount - 1; i > 0; --i) {
      const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

inline SampleReport sample_permutations(const Topology& topo, const TileTable& tiles, std::uint64_t seed,
                                        std::size_t count, std::uint64_t budget, bool implied = true) {
  SampleReport rep;
  for (const auto& pegs : random_peg_permutations(seed, count)) {
    auto res = check_pegs(topo, tiles, pegs, budget, implied);
    if (res.verdict == Verdict3::kUndecided) {
      res = check_pegs(topo, tiles, pegs, budget * kRetryFactor, implied);
    }
    rep.session.add(res.stats);
    ++rep.checked;
    if (res.verdict == Verdict3::kSat) ++rep.sat;
    if (res.verdict == Verdict3::kUnsat) rep.counterexamples.push_back(pegs);
    if (res.verdict == Verdict3::kUndecided) rep.undecided.push_back(pegs);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// 20-type combinations

inline constexpr std::size_t kCombinationCount = 10626;  // C(24, 20)

// All 20-subsets of 1..24 in lexicographic order of the sorted subsets.
inline std::vector<std::vector<int>> type_combinations() {
  std::vector<std::vector<int>> out;
  out.reserve(kCombinationCount);
  std::vector<int> pick(kFaceCount);
  for (int i = 0; i < kFaceCount; ++i) pick[static_cast<std::size_t>(i)] = i + 1;
  for (;;) {
    out.push_back(pick);
    int k = kFaceCount - 1;
    while (k >= 0 && pick[static_cast<std::size_t>(k)] == kTileTypes - kFaceCount + k + 1) --k;
    if (k < 0) break;
    ++pick[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < kFaceCount; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

struct ComboVerdict {
  std::size_t index = 0;
  std::vector<int> types;
  Verdict3 verdict = Verdict3::kUndecided;
  std::optional<Solution> witness;
  engine::SearchStats stats;
};

struct ScanOptions {
  std::uint64_t node_budget = 1'000'000;
  unsigned workers = 1;
  std::size_t first = 0;
  std::size_t last = kCombinationCount;
  bool implied_type_weights = true;
};

// Verdicts are delivered in index order.
inline std::vector<ComboVerdict> scan_combinations(const Topology& topo, const TileTable& tiles, const ScanOptions& opt,
                                                   const std::function<void(const ComboVerdict&)>& on_verdict = {}) {
  if (opt.node_budget == 0) throw std::invalid_argument("node budget must be positive");
  if (opt.workers == 0) throw std::invalid_argument("need at least one worker");
  const auto combos = type_combinations();
  const std::size_t last = std::min(opt.last, combos.size());
  const std::size_t first = std::min(opt.first, last);
  std::vector<ComboVerdict> out(last - first);
  std::atomic<std::size_t> next{first};
  std::mutex emit;
  std::size_t emitted = first;
  std::vector<bool> ready(out.size(), false);

  std::exception_ptr failure;

  auto scan_one = [&](std::size_t i) {
    ModelOptions mo;
    mo.allowed_types = combos[i];
    mo.implied_type_weights = opt.implied_type_weights;
    const auto m = build_adts_model(topo, tiles, mo);
    auto r = solve_adts(m, opt.node_budget);
    ComboVerdict v{i, combos[i], Verdict3::kUndecided, std::move(r.solution), r.stats};
    if (r.status == engine::SearchStatus::kFound) v.verdict = Verdict3::kSat;
    if (r.status == engine::SearchStatus::kExhausted) v.verdict = Verdict3::kUnsat;
    std::lock_guard lock(emit);
    out[i - first] = std::move(v);
    ready[i - first] = true;
    while (emitted < last && ready[emitted - first]) {
      if (on_verdict) on_verdict(out[emitted - first]);
      ++emitted;
    }
  };
  auto work = [&] {
    try {
      for (std::size_t i = next++; i < last; i = next++) scan_one(i);
    } catch (...) {
      std::lock_guard lock(emit);
      if (!failure) failure = std::current_exception();
      next = last;
    }
  };
  {
    std::vector<std::jthread> threads;
    for (unsigned w = 0; w < opt.workers; ++w) threads.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace icosoku
