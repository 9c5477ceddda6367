#pragma once

// Finite-domain constraint engine.
//
// Variables carry bitmask domains over the values 0..63. Constraints are
// allDifferent, positive table, linear sum equality and value assignment.
// propagate() runs a deduplicated FIFO of awakened constraints to fixpoint;
// solve_first()/solve_all() run depth-first search branching on the
// smallest domain (lowest id on ties), lowest value first, with x = v on
// the left and x != v on the right.
//
// Counting: every x = v decision is one node; every decision whose subtree
// yields no solution is one backtrack.

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace icosoku::engine {

using VarId = int;

inline constexpr int kMaxValue = 63;

class Domain {
 public:
  constexpr Domain() = default;

  static constexpr Domain range(int lo, int hi) {
    check_value(lo);
    check_value(hi);
    Domain d;
    for (int v = lo; v <= hi; ++v) d.bits_ |= bit(v);
    return d;
  }

  static constexpr Domain of(std::span<const int> values) {
    Domain d;
    for (int v : values) {
      check_value(v);
      d.bits_ |= bit(v);
    }
    return d;
  }

  static constexpr Domain singleton(int v) {
    check_value(v);
    return from_bits(bit(v));
  }

  static constexpr Domain from_bits(std::uint64_t bits) {
    Domain d;
    d.bits_ = bits;
    return d;
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool assigned() const { return std::has_single_bit(bits_); }
  constexpr int min() const { return std::countr_zero(bits_); }
  constexpr int max() const { return 63 - std::countl_zero(bits_); }
  constexpr bool contains(int v) const { return v >= 0 && v <= kMaxValue && (bits_ & bit(v)) != 0; }

  // Values in increasing order.
  std::vector<int> values() const {
    std::vector<int> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  friend constexpr bool operator==(const Domain&, const Domain&) = default;

  static constexpr std::uint64_t bit(int v) { return std::uint64_t{1} << v; }

  // Bits of all values in [lo, hi], clamped to 0..63.
  static constexpr std::uint64_t interval_bits(long long lo, long long hi) {
    lo = std::max<long long>(lo, 0);
    hi = std::min<long long>(hi, kMaxValue);
    if (lo > hi) return 0;
    const std::uint64_t upto_hi = hi == 63 ? ~std::uint64_t{0} : (bit(static_cast<int>(hi) + 1) - 1);
    const std::uint64_t below_lo = bit(static_cast<int>(lo)) - 1;
    return upto_hi & ~below_lo;
  }

 private:
  static constexpr void check_value(int v) {
    if (v < 0 || v > kMaxValue) throw std::invalid_argument("domain values must lie in 0..63");
  }

  std::uint64_t bits_ = 0;
};

struct AllDifferent {
  std::vector<VarId> scope;
};

// Allowed tuples plus, for every (position, value), the bitset of tuples
// carrying that value there.
class TupleSet {
 public:
  TupleSet(std::size_t arity, std::vector<int> flat) : arity_(arity), flat_(std::move(flat)) {
    if (arity_ == 0 || flat_.size() % arity_ != 0) throw std::invalid_argument("table tuple arity differs from scope");
    words_ = (count() + 63) / 64;
    support_.assign(arity_ * (kMaxValue + 1) * words_, 0);
    for (std::size_t t = 0; t < count(); ++t) {
      for (std::size_t i = 0; i < arity_; ++i) {
        const int v = flat_[t * arity_ + i];
        if (v < 0 || v > kMaxValue) continue;
        support_[(i * (kMaxValue + 1) + static_cast<std::size_t>(v)) * words_ + t / 64] |= std::uint64_t{1} << (t % 64);
      }
    }
  }

  std::size_t arity() const { return arity_; }
  std::size_t count() const { return flat_.size() / arity_; }
  std::size_t words() const { return words_; }
  std::span<const int> tuple(std::size_t t) const { return {flat_.data() + t * arity_, arity_}; }

  std::span<const std::uint64_t> support(std::size_t position, int value) const {
    return {support_.data() + (position * (kMaxValue + 1) + static_cast<std::size_t>(value)) * words_, words_};
  }

 private:
  std::size_t arity_;
  std::vector<int> flat_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> support_;
};

struct Table {
  std::vector<VarId> scope;
  std::shared_ptr<const TupleSet> tuples;
};

// sum(coefficients[i] * scope[i]) == target
struct LinearSum {
  std::vector<VarId> scope;
  std::vector<int> coefficients;
  VarId target;
};

struct Assign {
  VarId var;
  int value;
};

enum class ConstraintKind { kAllDifferent, kTable, kLinearSum, kAssign };

class Constraint {
 public:
  using Payload = std::variant<AllDifferent, Table, LinearSum, Assign>;

  explicit Constraint(Payload p) : payload_(std::move(p)) {}

  ConstraintKind kind() const { return static_cast<ConstraintKind>(payload_.index()); }
  const Payload& payload() const { return payload_; }

  // Every variable the constraint reads, in posting order.
  std::vector<VarId> scope() const {
    return std::visit(
        [](const auto& c) -> std::vector<VarId> {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, Assign>) {
            return {c.var};
          } else if constexpr (std::is_same_v<T, LinearSum>) {
            auto s = c.scope;
            s.push_back(c.target);
            return s;
          } else {
            return c.scope;
          }
        },
        payload_);
  }

 private:
  Payload payload_;
};

enum class PropagationResult { kFixpoint, kInfeasible };

enum class SearchStatus {
  kFound,      // solve_first found a solution
  kExhausted,  // search space fully explored
  kBudget,     // node budget hit before completion
};

struct SearchStats {
  std::uint64_t nodes_visited = 0;
  std::uint64_t backtracks = 0;
  std::chrono::nanoseconds elapsed{0};

  double millis() const { return std::chrono::duration<double, std::milli>(elapsed).count(); }
};

using Assignment = std::vector<int>;

class Model {
 public:
  VarId add_variable(int lo, int hi) { return add_variable(Domain::range(lo, hi)); }

  VarId add_variable(Domain d) {
    if (d.empty()) throw std::invalid_argument("variable domain must be non-empty");
    domains_.push_back(d);
    watchers_.emplace_back();
    return static_cast<VarId>(domains_.size() - 1);
  }

  std::size_t variable_count() const { return domains_.size(); }
  std::size_t constraint_count() const { return constraints_.size(); }

  const Domain& domain(VarId v) const { return domains_.at(static_cast<std::size_t>(v)); }
  std::span<const Domain> domains() const { return domains_; }
  std::span<Domain> domains() { return domains_; }

  // Narrows a variable's domain outside of any constraint; never widens.
  void restrict_domain(VarId v, Domain d) {
    auto& cur = domains_.at(static_cast<std::size_t>(v));
    cur = Domain::from_bits(cur.bits() & d.bits());
  }

  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<int>& watchers(VarId v) const {
    return watchers_.at(static_cast<std::size_t>(v));
  }

  void post_all_different(std::span<const VarId> vars) {
    if (vars.empty()) throw std::invalid_argument("allDifferent needs at least one variable");
    std::vector<VarId> scope(vars.begin(), vars.end());
    auto sorted = scope;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("allDifferent scope repeats a variable");
    }
    add(AllDifferent{std::move(scope)});
  }

  void post_table(std::span<const VarId> vars, const std::vector<std::vector<int>>& tuples) {
    if (vars.empty()) throw std::invalid_argument("table needs at least one variable");
    std::vector<int> flat;
    flat.reserve(tuples.size() * vars.size());
    for (const auto& t : tuples) {
      if (t.size() != vars.size()) throw std::invalid_argument("table tuple arity differs from scope");
      flat.insert(flat.end(), t.begin(), t.end());
    }
    post_table(vars, std::make_shared<const TupleSet>(vars.size(), std::move(flat)));
  }

  // Shares one tuple set between constraints.
  void post_table(std::span<const VarId> vars, std::shared_ptr<const TupleSet> tuples) {
    if (vars.empty() || tuples->arity() != vars.size()) {
      throw std::invalid_argument("table tuple arity differs from scope");
    }
    add(Table{std::vector<VarId>(vars.begin(), vars.end()), std::move(tuples)});
  }

  void post_linear_sum(std::span<const VarId> vars, std::span<const int> coefficients, VarId target) {
    if (vars.size() != coefficients.size()) {
      throw std::invalid_argument("linear sum needs one coefficient per variable");
    }
    add(LinearSum{std::vector<VarId>(vars.begin(), vars.end()),
                  std::vector<int>(coefficients.begin(), coefficients.end()), target});
  }

  void post_assign(VarId var, int value) { add(Assign{var, value}); }

 private:
  void add(Constraint::Payload p) {
    Constraint c(std::move(p));
    const int index = static_cast<int>(constraints_.size());
    auto scope = c.scope();
    for (VarId v : scope) {
      if (v < 0 || static_cast<std::size_t>(v) >= domains_.size()) {
        throw std::out_of_range("constraint scope names an unknown variable");
      }
    }
    std::sort(scope.begin(), scope.end());
    scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
    for (VarId v : scope) watchers_[static_cast<std::size_t>(v)].push_back(index);
    constraints_.push_back(std::move(c));
  }

  std::vector<Domain> domains_;
  std::vector<Constraint> constraints_;
  std::vector<std::vector<int>> watchers_;
};

namespace detail {

// Domains under modification plus the queue of constraints to (re)run.
class Propagator {
 public:
  explicit Propagator(const Model& m) : model_(m), queued_(m.constraint_count(), 0) {
    slow_.reserve(m.constraint_count());
    fast_.reserve(m.constraint_count());
  }

  // Narrows doms to the mutual fixpoint. `seed` names the variable whose
  // domain changed since the last fixpoint; an empty optional wakes every
  // constraint.
  PropagationResult run(std::span<Domain> doms, std::optional<VarId> seed) {
    doms_ = doms;
    for (const Domain& d : doms) {
      if (d.empty()) return PropagationResult::kInfeasible;
    }
    fast_.clear();
    slow_.clear();
    fast_head_ = slow_head_ = 0;
    std::fill(queued_.begin(), queued_.end(), 0);
    if (seed) {
      wake(*seed);
    } else {
      for (std::size_t c = 0; c < model_.constraint_count(); ++c) enqueue(static_cast<int>(c));
    }
    // FIFO per tier; allDifferent runs only once the cheap tier is quiet.
    for (;;) {
      int c = -1;
      if (fast_head_ < fast_.size()) {
        c = fast_[fast_head_++];
      } else if (slow_head_ < slow_.size()) {
        c = slow_[slow_head_++];
      } else {
        break;
      }
      queued_[static_cast<std::size_t>(c)] = 0;
      if (!filter(model_.constraints()[static_cast<std::size_t>(c)])) return PropagationResult::kInfeasible;
      if (fast_head_ == fast_.size()) {
        fast_.clear();
        fast_head_ = 0;
      }
      if (slow_head_ == slow_.size()) {
        slow_.clear();
        slow_head_ = 0;
      }
    }
    return PropagationResult::kFixpoint;
  }

 private:
  void enqueue(int c) {
    auto& flag = queued_[static_cast<std::size_t>(c)];
    if (flag) return;
    flag = 1;
    if (model_.constraints()[static_cast<std::size_t>(c)].kind() == ConstraintKind::kAllDifferent) {
      slow_.push_back(c);
    } else {
      fast_.push_back(c);
    }
  }

  void wake(VarId v) {
    for (int c : model_.watchers(v)) enqueue(c);
  }

  // Intersects v's domain with mask. False on wipe-out.
  bool narrow(VarId v, std::uint64_t mask) {
    Domain& d = doms_[static_cast<std::size_t>(v)];
    const std::uint64_t next = d.bits() & mask;
    if (next == d.bits()) return true;
    d = Domain::from_bits(next);
    if (next == 0) return false;
    wake(v);
    return true;
  }

  bool filter(const Constraint& c) {
    return std::visit([this](const auto& k) { return filter_one(k); }, c.payload());
  }

  bool filter_one(const Assign& a) {
    if (a.value < 0 || a.value > kMaxValue) {
      doms_[static_cast<std::size_t>(a.var)] = Domain{};
      return false;
    }
    return narrow(a.var, Domain::bit(a.value));
  }

  // Forward checking first, then generalized arc consistency through a
  // maximum matching: an edge (x, v) survives when it is matched, lies on an
  // alternating cycle, or is reachable from a free value.
  bool filter_one(const AllDifferent& ad) {
    const auto& scope = ad.scope;
    bool changed = true;
    while (changed) {
      changed = false;
      std::uint64_t fixed = 0;
      for (VarId v : scope) {
        const Domain d = doms_[static_cast<std::size_t>(v)];
        if (!d.assigned()) continue;
        if (fixed & d.bits()) return false;
        fixed |= d.bits();
      }
      for (VarId v : scope) {
        const Domain d = doms_[static_cast<std::size_t>(v)];
        if (d.assigned()) continue;
        if (d.bits() & fixed) {
          if (!narrow(v, ~fixed)) return false;
          if (doms_[static_cast<std::size_t>(v)].assigned()) changed = true;
        }
      }
    }
    if (scope.size() > 64) return true;
    return matching_filter(scope);
  }

  bool matching_filter(const std::vector<VarId>& scope) {
    const int n = static_cast<int>(scope.size());
    std::array<std::uint64_t, 64> dom{};
    for (int i = 0; i < n; ++i) dom[static_cast<std::size_t>(i)] = doms_[static_cast<std::size_t>(scope[static_cast<std::size_t>(i)])].bits();

    std::array<int, 64> match_of_var{};
    std::array<int, 64> var_of_value{};
    match_of_var.fill(-1);
    var_of_value.fill(-1);
    std::uint64_t used = 0;
    for (int i = 0; i < n; ++i) {
      const std::uint64_t free_here = dom[static_cast<std::size_t>(i)] & ~used;
      if (free_here) {
        const int v = std::countr_zero(free_here);
        match_of_var[static_cast<std::size_t>(i)] = v;
        var_of_value[static_cast<std::size_t>(v)] = i;
        used |= Domain::bit(v);
      }
    }
    for (int i = 0; i < n; ++i) {
      if (match_of_var[static_cast<std::size_t>(i)] >= 0) continue;
      // BFS for an augmenting path from var i.
      std::array<int, 64> parent_var{};
      std::uint64_t visited = 0;
      std::array<int, 64> queue{};
      int head = 0;
      int tail = 0;
      queue[static_cast<std::size_t>(tail++)] = i;
      int end_value = -1;
      while (head < tail && end_value < 0) {
        const int x = queue[static_cast<std::size_t>(head++)];
        for (std::uint64_t b = dom[static_cast<std::size_t>(x)] & ~visited; b != 0; b &= b - 1) {
          const int v = std::countr_zero(b);
          visited |= Domain::bit(v);
          parent_var[static_cast<std::size_t>(v)] = x;
          const int y = var_of_value[static_cast<std::size_t>(v)];
          if (y < 0) {
            end_value = v;
            break;
          }
          queue[static_cast<std::size_t>(tail++)] = y;
        }
      }
      if (end_value < 0) return false;
      for (int v = end_value; v >= 0;) {
        const int x = parent_var[static_cast<std::size_t>(v)];
        const int prev = match_of_var[static_cast<std::size_t>(x)];
        match_of_var[static_cast<std::size_t>(x)] = v;
        var_of_value[static_cast<std::size_t>(v)] = x;
        v = prev;
      }
    }

    std::uint64_t all_values = 0;
    std::uint64_t matched_values = 0;
    for (int i = 0; i < n; ++i) {
      all_values |= dom[static_cast<std::size_t>(i)];
      matched_values |= Domain::bit(match_of_var[static_cast<std::size_t>(i)]);
    }

    // Values reachable from a free value: free value -> var holding it
    // (unmatched edge) -> that var's matched value -> ...
    std::uint64_t reach = all_values & ~matched_values;
    std::uint64_t frontier = reach;
    while (frontier) {
      std::uint64_t next = 0;
      for (int i = 0; i < n; ++i) {
        if (dom[static_cast<std::size_t>(i)] & frontier) {
          const std::uint64_t m = Domain::bit(match_of_var[static_cast<std::size_t>(i)]);
          if (!(reach & m)) next |= m;
        }
      }
      reach |= next;
      frontier = next;
    }

    // Strongly connected components over variables: y -> x when x can take
    // the value matched to y.
    std::array<std::uint64_t, 64> succ{};
    for (int y = 0; y < n; ++y) {
      const std::uint64_t m = Domain::bit(match_of_var[static_cast<std::size_t>(y)]);
      for (int x = 0; x < n; ++x) {
        if (x != y && (dom[static_cast<std::size_t>(x)] & m)) succ[static_cast<std::size_t>(y)] |= Domain::bit(x);
      }
    }
    const auto comp = components(n, succ);

    for (int x = 0; x < n; ++x) {
      std::uint64_t keep = Domain::bit(match_of_var[static_cast<std::size_t>(x)]) | (dom[static_cast<std::size_t>(x)] & reach);
      for (std::uint64_t b = dom[static_cast<std::size_t>(x)] & ~keep; b != 0; b &= b - 1) {
        const int v = std::countr_zero(b);
        const int y = var_of_value[static_cast<std::size_t>(v)];
        if (y >= 0 && comp[static_cast<std::size_t>(y)] == comp[static_cast<std::size_t>(x)]) keep |= Domain::bit(v);
      }
      if (!narrow(scope[static_cast<std::size_t>(x)], keep)) return false;
    }
    return true;
  }

  // Tarjan over at most 64 nodes with bitmask successor sets.
  static std::array<int, 64> components(int n, const std::array<std::uint64_t, 64>& succ) {
    std::array<int, 64> index{};
    std::array<int, 64> low{};
    std::array<int, 64> comp{};
    index.fill(-1);
    comp.fill(-1);
    std::array<int, 64> stack{};
    int sp = 0;
    std::uint64_t on_stack = 0;
    int counter = 0;
    int ncomp = 0;
    struct Frame {
      int node;
      std::uint64_t pending;
    };
    std::array<Frame, 64> call{};
    for (int root = 0; root < n; ++root) {
      if (index[static_cast<std::size_t>(root)] >= 0) continue;
      int depth = 0;
      call[0] = {root, succ[static_cast<std::size_t>(root)]};
      index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = counter++;
      stack[static_cast<std::size_t>(sp++)] = root;
      on_stack |= Domain::bit(root);
      while (depth >= 0) {
        Frame& fr = call[static_cast<std::size_t>(depth)];
        if (fr.pending) {
          const int w = std::countr_zero(fr.pending);
          fr.pending &= fr.pending - 1;
          if (index[static_cast<std::size_t>(w)] < 0) {
            index[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = counter++;
            stack[static_cast<std::size_t>(sp++)] = w;
            on_stack |= Domain::bit(w);
            call[static_cast<std::size_t>(++depth)] = {w, succ[static_cast<std::size_t>(w)]};
          } else if (on_stack & Domain::bit(w)) {
            low[static_cast<std::size_t>(fr.node)] = std::min(low[static_cast<std::size_t>(fr.node)], index[static_cast<std::size_t>(w)]);
          }
          continue;
        }
        const int v = fr.node;
        if (low[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
          int w = -1;
          do {
            w = stack[static_cast<std::size_t>(--sp)];
            on_stack &= ~Domain::bit(w);
            comp[static_cast<std::size_t>(w)] = ncomp;
          } while (w != v);
          ++ncomp;
        }
        --depth;
        if (depth >= 0) {
          const int parent = call[static_cast<std::size_t>(depth)].node;
          low[static_cast<std::size_t>(parent)] = std::min(low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(v)]);
        }
      }
    }
    return comp;
  }

  // Generalized arc consistency: the live tuples are the AND over positions
  // of the union of supports of each domain value.
  bool filter_one(const Table& t) {
    const TupleSet& ts = *t.tuples;
    const std::size_t arity = ts.arity();
    const std::size_t words = ts.words();
    if (words == 0) return narrow(t.scope[0], 0);
    std::array<std::uint64_t, 8> live_small;
    std::array<std::uint64_t, 8> here_small;
    std::vector<std::uint64_t> live_big;
    std::vector<std::uint64_t> here_big;
    std::span<std::uint64_t> live(live_small.data(), words);
    std::span<std::uint64_t> here(here_small.data(), words);
    if (words > live_small.size()) {
      live_big.resize(words);
      here_big.resize(words);
      live = live_big;
      here = here_big;
    }
    std::fill(live.begin(), live.end(), ~std::uint64_t{0});
    for (std::size_t i = 0; i < arity; ++i) {
      std::fill(here.begin(), here.end(), 0);
      for (std::uint64_t b = doms_[static_cast<std::size_t>(t.scope[i])].bits(); b != 0; b &= b - 1) {
        const auto sup = ts.support(i, std::countr_zero(b));
        for (std::size_t w = 0; w < words; ++w) here[w] |= sup[w];
      }
      for (std::size_t w = 0; w < words; ++w) live[w] &= here[w];
    }
    for (std::size_t i = 0; i < arity; ++i) {
      std::uint64_t keep = 0;
      for (std::uint64_t b = doms_[static_cast<std::size_t>(t.scope[i])].bits(); b != 0; b &= b - 1) {
        const int v = std::countr_zero(b);
        const auto sup = ts.support(i, v);
        for (std::size_t w = 0; w < words; ++w) {
          if (sup[w] & live[w]) {
            keep |= Domain::bit(v);
            break;
          }
        }
      }
      if (!narrow(t.scope[i], keep)) return false;
    }
    return true;
  }

  bool filter_one(const LinearSum& ls) {
    if (unit_sum_fits(ls)) return unit_sum_filter(ls);
    return bounds_filter(ls);
  }

  bool unit_sum_fits(const LinearSum& ls) const {
    int max_total = 0;
    for (std::size_t i = 0; i < ls.scope.size(); ++i) {
      if (ls.coefficients[i] != 1 || i >= 64) return false;
      max_total += doms_[static_cast<std::size_t>(ls.scope[i])].max();
    }
    return max_total <= kMaxValue;
  }

  // Domain consistency for x_1 + ... + x_n == target by subset-sum bitmasks:
  // prefix[i] holds every sum reachable by the first i terms.
  bool unit_sum_filter(const LinearSum& ls) {
    const std::size_t n = ls.scope.size();
    auto dom = [&](std::size_t i) { return doms_[static_cast<std::size_t>(ls.scope[i])].bits(); };
    auto add = [](std::uint64_t sums, std::uint64_t values) {
      std::uint64_t out = 0;
      for (std::uint64_t b = values; b != 0; b &= b - 1) out |= sums << std::countr_zero(b);
      return out;
    };
    std::array<std::uint64_t, 65> prefix;
    std::array<std::uint64_t, 65> suffix;
    prefix[0] = 1;
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = add(prefix[i], dom(i));
    if (!narrow(ls.target, prefix[n])) return false;
    const std::uint64_t target = doms_[static_cast<std::size_t>(ls.target)].bits();
    suffix[n] = 1;
    for (std::size_t i = n; i-- > 0;) suffix[i] = add(suffix[i + 1], dom(i));
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t others = add(prefix[i], suffix[i + 1]);
      std::uint64_t keep = 0;
      for (std::uint64_t b = dom(i); b != 0; b &= b - 1) {
        const int v = std::countr_zero(b);
        if ((others << v) & target) keep |= Domain::bit(v);
      }
      if (!narrow(ls.scope[i], keep)) return false;
    }
    return true;
  }

  // Bounds consistency on sum(a_i x_i) - target == 0.
  bool bounds_filter(const LinearSum& ls) {
    const std::size_t n = ls.scope.size();
    auto term = [&](std::size_t i, long long& lo, long long& hi) {
      const bool is_target = i == n;
      const VarId v = is_target ? ls.target : ls.scope[i];
      const long long a = is_target ? -1 : ls.coefficients[i];
      const Domain d = doms_[static_cast<std::size_t>(v)];
      const long long x = a * d.min();
      const long long y = a * d.max();
      lo = std::min(x, y);
      hi = std::max(x, y);
    };
    bool changed = true;
    while (changed) {
      changed = false;
      long long sum_lo = 0;
      long long sum_hi = 0;
      for (std::size_t i = 0; i <= n; ++i) {
        long long lo = 0;
        long long hi = 0;
        term(i, lo, hi);
        sum_lo += lo;
        sum_hi += hi;
      }
      if (sum_lo > 0 || sum_hi < 0) return false;
      for (std::size_t i = 0; i <= n; ++i) {
        const bool is_target = i == n;
        const long long a = is_target ? -1 : ls.coefficients[i];
        if (a == 0) continue;
        long long lo = 0;
        long long hi = 0;
        term(i, lo, hi);
        // a * x must lie in [-(sum_hi - hi), -(sum_lo - lo)].
        const long long term_lo = -(sum_hi - hi);
        const long long term_hi = -(sum_lo - lo);
        long long x_lo = 0;
        long long x_hi = 0;
        if (a > 0) {
          x_lo = ceil_div(term_lo, a);
          x_hi = floor_div(term_hi, a);
        } else {
          x_lo = ceil_div(term_hi, a);
          x_hi = floor_div(term_lo, a);
        }
        const VarId v = is_target ? ls.target : ls.scope[i];
        const std::uint64_t before = doms_[static_cast<std::size_t>(v)].bits();
        if (!narrow(v, Domain::interval_bits(x_lo, x_hi))) return false;
        if (doms_[static_cast<std::size_t>(v)].bits() != before) changed = true;
      }
    }
    return true;
  }

  static long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
  }
  static long long ceil_div(long long a, long long b) { return -floor_div(-a, b); }

  const Model& model_;
  std::span<Domain> doms_;
  std::vector<int> fast_;
  std::vector<int> slow_;
  std::size_t fast_head_ = 0;
  std::size_t slow_head_ = 0;
  std::vector<char> queued_;
};

template <typename Sink>
bool deliver(Sink& sink, const Assignment& a) {
  if constexpr (std::is_same_v<std::invoke_result_t<Sink&, const Assignment&>, bool>) {
    return sink(a);
  } else {
    sink(a);
    return true;
  }
}

// Shared depth-first search. `sink` returns false to stop.
template <typename Sink>
class Search {
 public:
  Search(const Model& m, std::uint64_t limit, Sink& sink) : model_(m), prop_(m), limit_(limit), sink_(sink) {}

  SearchStatus run(SearchStats& stats, std::uint64_t& solutions) {
    std::vector<Domain> root(model_.domains().begin(), model_.domains().end());
    const auto status = prop_.run(root, std::nullopt) == PropagationResult::kInfeasible
                            ? SearchStatus::kExhausted
                            : descend(root);
    stats.nodes_visited = nodes_;
    stats.backtracks = backtracks_;
    solutions = solutions_;
    return status;
  }

 private:
  // kFound means "stop": the sink asked to halt.
  SearchStatus descend(std::vector<Domain>& doms) {
    for (;;) {
      VarId pick = -1;
      int best = 65;
      for (std::size_t v = 0; v < doms.size(); ++v) {
        const int s = doms[v].size();
        if (s > 1 && s < best) {
          best = s;
          pick = static_cast<VarId>(v);
          if (s == 2) break;
        }
      }
      if (pick < 0) {
        Assignment a(doms.size());
        for (std::size_t v = 0; v < doms.size(); ++v) a[v] = doms[v].min();
        ++solutions_;
        return deliver(sink_, a) ? SearchStatus::kExhausted : SearchStatus::kFound;
      }

      const int value = doms[static_cast<std::size_t>(pick)].min();
      if (nodes_ >= limit_) return SearchStatus::kBudget;
      ++nodes_;
      const std::uint64_t before = solutions_;
      std::vector<Domain> child = doms;
      child[static_cast<std::size_t>(pick)] = Domain::singleton(value);
      if (prop_.run(child, pick) == PropagationResult::kFixpoint) {
        const auto r = descend(child);
        if (r != SearchStatus::kExhausted) return r;
      }
      if (solutions_ == before) ++backtracks_;

      auto& d = doms[static_cast<std::size_t>(pick)];
      d = Domain::from_bits(d.bits() & ~Domain::bit(value));
      if (prop_.run(doms, pick) == PropagationResult::kInfeasible) return SearchStatus::kExhausted;
    }
  }

  const Model& model_;
  Propagator prop_;
  std::uint64_t limit_;
  Sink& sink_;
  std::uint64_t nodes_ = 0;
  std::uint64_t backtracks_ = 0;
  std::uint64_t solutions_ = 0;
};

}  // namespace detail

// Narrows the model's own domains to the propagation fixpoint. On
// kInfeasible at least one domain is left empty.
inline PropagationResult propagate(Model& m) {
  detail::Propagator p(m);
  return p.run(m.domains(), std::nullopt);
}

struct FirstResult {
  SearchStatus status = SearchStatus::kExhausted;
  std::optional<Assignment> solution;
  SearchStats stats;
};

inline FirstResult solve_first(const Model& m, std::uint64_t limit) {
  if (limit == 0) throw std::invalid_argument("node budget must be positive");
  const auto start = std::chrono::steady_clock::now();
  FirstResult out;
  auto sink = [&](const Assignment& a) {
    out.solution = a;
    return false;
  };
  detail::Search<decltype(sink)> search(m, limit, sink);
  std::uint64_t count = 0;
  const auto status = search.run(out.stats, count);
  out.status = out.solution ? SearchStatus::kFound : status;
  out.stats.elapsed = std::chrono::steady_clock::now() - start;
  return out;
}

struct AllResult {
  SearchStatus status = SearchStatus::kExhausted;
  std::uint64_t count = 0;
  SearchStats stats;
};

// Feeds every solution to sink. A sink returning bool may stop early by
// returning false, in which case status is kFound.
template <typename Sink>
AllResult solve_all(const Model& m, std::uint64_t limit, Sink&& sink) {
  if (limit == 0) throw std::invalid_argument("node budget must be positive");
  const auto start = std::chrono::steady_clock::now();
  AllResult out;
  detail::Search<std::remove_reference_t<Sink>> search(m, limit, sink);
  out.status = search.run(out.stats, out.count);
  out.stats.elapsed = std::chrono::steady_clock::now() - start;
  return out;
}

inline AllResult solve_all(const Model& m, std::uint64_t limit) {
  return solve_all(m, limit, [](const Assignment&) {});
}

inline std::string to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::kFound: return "found";
    case SearchStatus::kExhausted: return "exhausted";
    case SearchStatus::kBudget: return "budget";
  }
  return "unknown";
}

}  // namespace icosoku::engine
