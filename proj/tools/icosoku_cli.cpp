#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "icosoku/harness.hpp"
#include "icosoku/solution_io.hpp"

namespace {

using namespace icosoku;

enum Exit : int {
  kOk = 0,
  kInfeasible = 1,
  kBudget = 2,
  kParseError = 3,
  kVerifyFailed = 4,
  kFlagError = 5,
  kCheckpointConflict = 6,
};

struct FlagError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<int> parse_csv(const std::string& text, const char* what) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw FlagError(std::string("bad ") + what + " entry '" + item + "'");
    }
  }
  return out;
}

std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw FlagError("--range expects lo:hi");
  try {
    std::size_t u1 = 0;
    std::size_t u2 = 0;
    const auto lo_s = text.substr(0, colon);
    const auto hi_s = text.substr(colon + 1);
    const auto lo = std::stoull(lo_s, &u1);
    const auto hi = std::stoull(hi_s, &u2);
    if (u1 != lo_s.size() || u2 != hi_s.size() || lo_s[0] == '-' || hi_s[0] == '-') throw std::invalid_argument(text);
    if (lo > hi || hi > kArrangementCount) throw FlagError("--range must satisfy lo <= hi <= 39916800");
    return {lo, hi};
  } catch (const FlagError&) {
    throw;
  } catch (const std::exception&) {
    throw FlagError("--range expects lo:hi with non-negative integers");
  }
}

std::string join(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s;
}

std::string join(const std::vector<std::uint64_t>& xs) {
  if (xs.empty()) return "none";
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s;
}

void print_stats(std::ostream& os, const engine::SearchStats& st) {
  os << "nodes " << st.nodes_visited << "  backtracks " << st.backtracks << "  ms " << st.millis() << "\n"
     << "(node and backtrack counts depend on the search engine)\n";
}

struct Flags {
  std::uint64_t budget = 0;
  unsigned workers = 1;
  std::string checkpoint;
  std::string range;
  std::string fix_vertices;
  std::string types;
  std::uint64_t seed = 1;
  std::string out;
  std::uint64_t sample = 0;
  std::uint64_t interval = kDefaultCheckpointInterval;
  bool no_implied = false;
  std::string verify_path;
};

int cmd_solve(const Flags& f) {
  const auto topo = build_icosahedron();
  const auto tiles = tile_table();
  ModelOptions opts;
  if (!f.fix_vertices.empty()) {
    const auto v = parse_csv(f.fix_vertices, "--fix-vertices");
    if (v.size() != kVertexCount) throw FlagError("--fix-vertices needs 12 values");
    VertexValues pegs{};
    std::copy(v.begin(), v.end(), pegs.begin());
    if (!is_peg_permutation(pegs)) throw FlagError("--fix-vertices must be a permutation of 1..12");
    opts.fixed_vertex_values = pegs;
  }
  if (!f.types.empty()) {
    opts.allowed_types = parse_csv(f.types, "--types");
    try {
      validate(opts);
    } catch (const std::invalid_argument& e) {
      throw FlagError(std::string("--types: ") + e.what());
    }
  }
  opts.implied_type_weights = !f.no_implied;
  const auto m = build_adts_model(topo, tiles, opts);
  const auto r = solve_adts(m, f.budget ? f.budget : 1'000'000);
  std::ostream& info = f.out.empty() ? std::cerr : std::cout;
  info << "status " << engine::to_string(r.status) << "\n";
  print_stats(info, r.stats);
  if (!r.solution) return r.status == engine::SearchStatus::kBudget ? kBudget : kInfeasible;
  if (f.out.empty()) {
    std::cout << to_json(*r.solution).dump(2) << "\n";
  } else {
    write_solution(f.out, *r.solution);
  }
  return kOk;
}

int cmd_verify(const Flags& f) {
  Solution s;
  try {
    s = read_solution(f.verify_path);
  } catch (const SolutionParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  }
  const auto v = verify_adts(build_icosahedron(), tile_table(), s);
  if (v.accepted()) {
    std::cout << "ok\n";
    return kOk;
  }
  for (const auto& d : v.failures) {
    std::cerr << "(" << static_cast<char>(d.check) << ") " << d.location << ": " << d.message << "\n";
  }
  return kVerifyFailed;
}

int cmd_sweep(const Flags& f) {
  const auto topo = build_icosahedron();
  const auto tiles = tile_table();
  const std::uint64_t budget = f.budget ? f.budget : kDefaultNodeBudget;
  if (f.sample > 0) {
    const auto rep = sample_permutations(topo, tiles, f.seed, f.sample, budget, !f.no_implied);
    std::cout << "sampled " << rep.checked << " seed " << f.seed << "\n"
              << "SAT " << rep.sat << "\n"
              << "undecided " << rep.undecided.size() << "\n"
              << "counterexamples " << (rep.counterexamples.empty() ? "none" : "") << "\n";
    for (const auto& p : rep.counterexamples) {
      std::cout << "  " << join(std::vector<int>(p.begin(), p.end())) << "\n";
    }
    if (!rep.counterexamples.empty()) return kInfeasible;
    return rep.undecided.empty() ? kOk : kBudget;
  }
  if (f.range.empty()) throw FlagError("sweep needs --range lo:hi or --sample n");
  const auto [lo, hi] = parse_range(f.range);
  SweepOptions o;
  o.lo = lo;
  o.hi = hi;
  o.workers = f.workers;
  o.node_budget = budget;
  o.checkpoint_interval = f.interval;
  o.implied_type_weights = !f.no_implied;
  if (!f.checkpoint.empty()) o.checkpoint = f.checkpoint;
  SweepRun run;
  try {
    run = sweep(topo, tiles, o);
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint conflict: " << e.what() << "\n";
    return kCheckpointConflict;
  }
  if (run.already_complete) std::cout << "already complete\n";
  const auto& r = run.report;
  std::cout << "range " << r.lo << ":" << r.hi << "\n"
            << "processed " << r.processed << "\n"
            << "SAT " << r.sat << "\n"
            << "undecided " << join(r.undecided) << "\n"
            << "counterexamples " << join(r.counterexamples) << "\n";
  const auto& s = run.session;
  if (s.solves > 0) {
    std::cout << "session solves " << s.solves << " nodes " << s.nodes << " backtracks " << s.backtracks
              << " max-nodes " << s.max_nodes << " ms " << s.millis << "\n";
  }
  if (!r.counterexamples.empty()) return kInfeasible;
  return r.undecided.empty() ? kOk : kBudget;
}

int cmd_scan(const Flags& f) {
  const auto topo = build_icosahedron();
  const auto tiles = tile_table();
  ScanOptions o;
  if (f.budget) o.node_budget = f.budget;
  o.workers = f.workers;
  o.implied_type_weights = !f.no_implied;
  std::optional<std::filesystem::path> dir;
  if (!f.out.empty()) {
    dir = f.out;
    std::filesystem::create_directories(*dir);
  }
  std::size_t sat = 0;
  std::size_t unsat = 0;
  std::size_t undecided = 0;
  scan_combinations(topo, tiles, o, [&](const ComboVerdict& v) {
    std::cout << v.index << " " << to_string(v.verdict) << " " << join(v.types) << " nodes " << v.stats.nodes_visited;
    if (v.verdict == Verdict3::kSat && dir) {
      const auto path = *dir / ("combo-" + std::to_string(v.index) + ".json");
      write_solution(path, *v.witness);
      std::cout << " witness " << path.string();
    }
    std::cout << "\n";
    switch (v.verdict) {
      case Verdict3::kSat: ++sat; break;
      case Verdict3::kUnsat: ++unsat; break;
      case Verdict3::kUndecided: ++undecided; break;
    }
  });
  std::cerr << "SAT " << sat << " UNSAT " << unsat << " UNDECIDED " << undecided << "\n";
  return undecided == 0 ? kOk : kBudget;
}

int cmd_tiles() {
  for (const auto& r : tile_table().rows()) std::cout << r.a << ' ' << r.b << ' ' << r.c << ' ' << r.type_id << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"icosoku: all-different tile solver for the icosahedron puzzle"};
  app.require_subcommand(1);
  Flags f;

  auto budget_flag = [&](CLI::App* sc) {
    sc->add_option("--budget", f.budget, "node budget per solve")->check(CLI::PositiveNumber);
  };
  auto workers_flag = [&](CLI::App* sc) {
    sc->add_option("--workers", f.workers, "worker threads")->check(CLI::Range(1u, 256u));
  };

  auto* solve = app.add_subcommand("solve", "find the first all-different solution");
  budget_flag(solve);
  solve->add_option("--fix-vertices", f.fix_vertices, "peg values for v0..v11, comma separated");
  solve->add_option("--types", f.types, "20 type ids the faces must use, comma separated");
  solve->add_option("--out", f.out, "write the solution JSON here instead of stdout");
  solve->add_flag("--no-implied", f.no_implied, "do not restrict type domains by tile weight");

  auto* verify = app.add_subcommand("verify", "check a solution file");
  verify->add_option("path", f.verify_path, "solution JSON")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "check peg arrangements by rank, or a random sample");
  budget_flag(sweep_cmd);
  workers_flag(sweep_cmd);
  sweep_cmd->add_option("--range", f.range, "rank range lo:hi over 11! arrangements with v0 = 1");
  sweep_cmd->add_option("--checkpoint", f.checkpoint, "checkpoint file, resumed when present");
  sweep_cmd->add_option("--checkpoint-interval", f.interval, "representatives per checkpoint record")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--sample", f.sample, "check this many random permutations of 1..12 instead")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", f.seed, "seed for --sample");
  sweep_cmd->add_flag("--no-implied", f.no_implied, "do not restrict type domains by tile weight");

  auto* scan = app.add_subcommand("scan", "decide every 20-type subset");
  budget_flag(scan);
  workers_flag(scan);
  scan->add_option("--out", f.out, "directory for witness files");
  scan->add_flag("--no-implied", f.no_implied, "do not restrict type domains by tile weight");

  auto* tiles = app.add_subcommand("tiles", "print the 64-row tile table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kFlagError;
  }

  try {
    if (*solve) return cmd_solve(f);
    if (*verify) return cmd_verify(f);
    if (*sweep_cmd) return cmd_sweep(f);
    if (*scan) return cmd_scan(f);
    if (*tiles) return cmd_tiles();
  } catch (const FlagError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFlagError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 70;
  }
  return kFlagError;
}
