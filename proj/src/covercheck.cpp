#include "qcover/covercheck.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "qcover/formula.hpp"
#include "qcover/qreach.hpp"
#include "qcover/solve.hpp"

namespace qcover {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

bool by_norm(const DiscreteMarking& a, const DiscreteMarking& b) {
  const Natural na = a.sum_norm(), nb = b.sum_norm();
  return na != nb ? na < nb : a < b;
}

class Limits {
 public:
  explicit Limits(const Config& cfg) : cfg_(cfg) {
    if (cfg.timeout) deadline_ = start_ + *cfg.timeout;
  }

  /// Reason to stop before starting iteration number `done + 1`, if any.
  std::optional<Verdict> before_iteration(std::size_t done) const {
    if (cfg_.max_iterations && done >= *cfg_.max_iterations)
      return Verdict::unknown("iteration-cap");
    if (expired()) return Verdict::unknown("timeout");
    return std::nullopt;
  }
  bool expired() const { return deadline_ && Clock::now() >= *deadline_; }
  std::optional<Clock::time_point> deadline() const { return deadline_; }
  double elapsed() const { return seconds_since(start_); }

 private:
  const Config& cfg_;
  Clock::time_point start_ = Clock::now();
  std::optional<Clock::time_point> deadline_;
};

void check_inputs(const PetriNet& net, const DiscreteMarking& m0,
                  std::span<const DiscreteMarking> targets, const Config& cfg) {
  validate(cfg);
  check_dimension(net, m0.size());
  for (const auto& t : targets) check_dimension(net, t.size());
}

/// pb(M) \ ↑M, minimized. Empty optional when the deadline passes first.
std::optional<std::vector<DiscreteMarking>> fresh_predecessors(const PetriNet& net,
                                                               const Basis& m,
                                                               const Limits& limits) {
  std::set<DiscreteMarking> seen;
  std::vector<DiscreteMarking> fresh;
  for (const auto& v : m) {
    if (limits.expired()) return std::nullopt;
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
      auto p = predecessor(net, v, t);
      if (seen.insert(p).second && !m.contains_up(p)) fresh.push_back(std::move(p));
    }
  }
  std::sort(fresh.begin(), fresh.end(), by_norm);
  // Increasing sum-norm: a later element never dominates an earlier one.
  NormIndex kept;
  std::vector<DiscreteMarking> out;
  for (auto& p : fresh) {
    if (limits.expired()) return std::nullopt;
    if (kept.dominated(p)) continue;
    kept.add(p);
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Adds every element of b to M; false when the deadline passes first.
bool absorb(Basis& m, const std::vector<DiscreteMarking>& b, const Limits& limits) {
  for (const auto& v : b) {
    if (limits.expired()) return false;
    m.insert(v);
  }
  return true;
}

RunResult finish(RunResult r, Verdict v, const Limits& limits) {
  r.verdict = v;
  r.stats.verdict = std::move(v);
  r.stats.wall_seconds = limits.elapsed();
  return r;
}

std::map<Var, Rational> cover_bindings(const DiscreteMarking& v) {
  std::map<Var, Rational> b;
  for (PlaceIndex p = 0; p < v.size(); ++p) b[{VarKind::x, p}] = to_rational(v[p]);
  return b;
}

}  // namespace

void validate(const Config& cfg) {
  if (cfg.k == 0) throw std::invalid_argument("minbottle parameter k must be at least 1");
}

std::string to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::safe: return "safe";
    case VerdictKind::unsafe: return "unsafe";
    case VerdictKind::unknown: return "unknown";
  }
  return "unknown";
}

std::size_t RunStats::pruned_total() const {
  std::size_t n = 0;
  for (const auto& it : per_iteration) n += it.pruned;
  return n;
}

std::size_t RunStats::before_total() const {
  std::size_t n = 0;
  for (const auto& it : per_iteration) n += it.before;
  return n;
}

double RunStats::pruned_pct() const {
  const std::size_t before = before_total();
  return before == 0 ? 0.0 : 100.0 * static_cast<double>(pruned_total()) / static_cast<double>(before);
}

nlohmann::ordered_json to_json(const RunStats& s, bool include_timing) {
  nlohmann::ordered_json j;
  j["schema"] = "qcover-stats/1";
  j["algorithm"] = s.algorithm;
  j["verdict"] = to_string(s.verdict.kind);
  if (!s.verdict.reason.empty()) j["reason"] = s.verdict.reason;
  j["iterations"] = s.iterations;
  j["rejected_upfront"] = s.rejected_upfront;
  j["solver_queries"] = s.solver_queries;
  j["blocking_clauses"] = s.blocking_clauses;
  j["pruned_total"] = s.pruned_total();
  j["before_total"] = s.before_total();
  j["pruned_pct"] = s.pruned_pct();
  if (s.audited > 0) {
    j["audited"] = s.audited;
    j["audit_failures"] = s.audit_failures;
  }
  auto& per = j["per_iteration"] = nlohmann::ordered_json::array();
  for (const auto& it : s.per_iteration)
    per.push_back({{"before", it.before}, {"pruned", it.pruned}, {"deferred", it.deferred},
                   {"basis", it.basis}});
  if (include_timing) {
    j["wall_ms"] = s.wall_seconds * 1000.0;
    j["solver_ms"] = s.solver_seconds * 1000.0;
  }
  return j;
}

std::vector<DiscreteMarking> minbottle(std::span<const DiscreteMarking> b, Natural c, Natural k,
                                       Rounding rounding) {
  if (k == 0) throw std::invalid_argument("minbottle parameter k must be at least 1");
  const Natural size = b.size();
  const Natural share = rounding == Rounding::floor ? size / k : (size + k - 1) / k;
  const std::size_t keep = static_cast<std::size_t>(std::min(size, c + share));
  std::vector<DiscreteMarking> sorted(b.begin(), b.end());
  std::partial_sort(sorted.begin(), sorted.begin() + keep, sorted.end(), by_norm);
  sorted.resize(keep);
  return sorted;
}

RunResult backward_cover(const PetriNet& net, const DiscreteMarking& m0,
                         std::span<const DiscreteMarking> targets, const Config& cfg) {
  check_inputs(net, m0, targets, cfg);
  const Limits limits(cfg);
  RunResult r;
  r.stats.algorithm = "backward";
  r.basis = Basis(net.num_places());
  for (const auto& t : targets) r.basis.insert(t);

  while (true) {
    if (r.basis.contains_up(m0)) return finish(std::move(r), Verdict::unsafe(), limits);
    if (auto stop = limits.before_iteration(r.stats.iterations))
      return finish(std::move(r), *stop, limits);
    ++r.stats.iterations;
    auto fresh = fresh_predecessors(net, r.basis, limits);
    if (!fresh) return finish(std::move(r), Verdict::unknown("timeout"), limits);
    const auto& b = *fresh;
    IterationStats it;
    it.before = b.size();
    if (!absorb(r.basis, b, limits)) return finish(std::move(r), Verdict::unknown("timeout"), limits);
    it.basis = r.basis.size();
    r.stats.per_iteration.push_back(it);
    if (cfg.observer) cfg.observer(r.basis);
    if (b.empty()) return finish(std::move(r), Verdict::safe(), limits);
  }
}

RunResult backward_cover_q(const PetriNet& net, const DiscreteMarking& m0,
                           std::span<const DiscreteMarking> targets, const Config& cfg) {
  check_inputs(net, m0, targets, cfg);
  const Limits limits(cfg);
  RunResult r;
  r.stats.algorithm = "qcover";
  r.basis = Basis(net.num_places());

  // Targets that are not even Q-coverable can never be covered.
  const RationalMarking start(m0);
  std::vector<DiscreteMarking> dropped;
  const auto line2 = Clock::now();
  for (const auto& t : targets) {
    ++r.stats.solver_queries;
    if (q_coverable(net, start, RationalMarking(t)).reachable)
      r.basis.insert(t);
    else
      dropped.push_back(t);
  }
  r.stats.solver_seconds += seconds_since(line2);
  if (r.basis.empty()) {
    r.stats.rejected_upfront = true;
    return finish(std::move(r), Verdict::safe(), limits);
  }

  SolveContext ctx(build_cover_query(net, m0));
  ctx.set_deadline(limits.deadline());
  for (const auto& t : dropped) ctx.add_blocking(t);
  auto collect = [&](RunResult res, Verdict v) {
    const SolveStats s = ctx.stats();
    res.stats.solver_queries += s.queries;
    res.stats.blocking_clauses = s.blocking_clauses;
    res.stats.solver_seconds += s.seconds;
    return finish(std::move(res), std::move(v), limits);
  };

  // Q-coverable elements held back by minbottle, offered again next round.
  std::vector<DiscreteMarking> pool;
  while (true) {
    if (r.basis.contains_up(m0)) return collect(std::move(r), Verdict::unsafe());
    if (auto stop = limits.before_iteration(r.stats.iterations))
      return collect(std::move(r), *stop);
    ++r.stats.iterations;

    auto fresh = fresh_predecessors(net, r.basis, limits);
    if (!fresh) return collect(std::move(r), Verdict::unknown("timeout"));
    auto& b = *fresh;
    std::erase_if(pool, [&](const DiscreteMarking& v) { return r.basis.contains_up(v); });
    std::erase_if(b, [&](const DiscreteMarking& v) {
      return std::binary_search(pool.begin(), pool.end(), v);
    });
    IterationStats it;
    it.before = b.size();

    std::vector<DiscreteMarking> kept;
    for (const auto& v : b) {
      if (limits.expired()) return collect(std::move(r), Verdict::unknown("timeout"));
      const SolveResult res = ctx.solve(cover_bindings(v));
      if (res.status == SolveStatus::unknown)
        return collect(std::move(r), Verdict::unknown("timeout"));
      if (res.status == SolveStatus::sat) {
        kept.push_back(v);
        continue;
      }
      ++it.pruned;
      ctx.add_blocking(v);
      if (cfg.audit_pruned) {
        ++r.stats.audited;
        if (q_coverable(net, start, RationalMarking(v)).reachable) ++r.stats.audit_failures;
      }
    }

    kept.insert(kept.end(), pool.begin(), pool.end());
    std::sort(kept.begin(), kept.end());
    if (kept.empty()) {
      it.basis = r.basis.size();
      r.stats.per_iteration.push_back(it);
      if (cfg.observer) cfg.observer(r.basis);
      return collect(std::move(r), Verdict::safe());
    }
    auto chosen = cfg.use_minbottle ? minbottle(kept, cfg.c, cfg.k, cfg.rounding) : kept;
    // With c = 0 the bottleneck can be empty; take one element to make progress.
    if (chosen.empty()) chosen = minbottle(kept, 1, kept.size() + 1);
    std::sort(chosen.begin(), chosen.end());
    pool.clear();
    std::set_difference(kept.begin(), kept.end(), chosen.begin(), chosen.end(),
                        std::back_inserter(pool));
    if (!absorb(r.basis, chosen, limits)) return collect(std::move(r), Verdict::unknown("timeout"));
    it.deferred = pool.size();
    it.basis = r.basis.size();
    r.stats.per_iteration.push_back(it);
    if (cfg.observer) cfg.observer(r.basis);
  }
}

RunResult backward_cover(const Instance& inst, const Config& cfg) {
  return backward_cover(inst.net, inst.initial, inst.targets, cfg);
}

RunResult backward_cover_q(const Instance& inst, const Config& cfg) {
  return backward_cover_q(inst.net, inst.initial, inst.targets, cfg);
}

RunResult run(const Instance& inst, const Config& cfg) {
  return cfg.prune ? backward_cover_q(inst, cfg) : backward_cover(inst, cfg);
}

}  // namespace qcover
