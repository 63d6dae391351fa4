#include "qcover/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <thread>

#include "qcover/formula.hpp"
#include "qcover/mist.hpp"
#include "qcover/qreach.hpp"
#include "qcover/structural.hpp"

namespace qcover {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Report trapcegar(const Instance& inst) {
  Report r;
  const auto start = Clock::now();
  bool all_refuted = true;
  for (const auto& target : inst.targets) {
    auto res = trap_safety_check(inst.net, inst.initial, target, TrapMode::cover);
    r.stats.iterations += res.rounds;
    ++r.stats.solver_queries;
    if (res.outcome != TrapOutcome::safe) {
      all_refuted = false;
      break;
    }
  }
  r.stats.verdict = all_refuted ? Verdict::safe() : Verdict::unknown("inconclusive");
  r.stats.wall_seconds = r.stats.solver_seconds = seconds_since(start);
  return r;
}

Report qreach_only(const Instance& inst) {
  Report r;
  const auto start = Clock::now();
  const RationalMarking m0(inst.initial);
  bool none = true;
  for (const auto& target : inst.targets) {
    ++r.stats.solver_queries;
    if (q_coverable(inst.net, m0, RationalMarking(target)).reachable) {
      none = false;
      break;
    }
  }
  r.stats.rejected_upfront = none;
  r.stats.verdict = none ? Verdict::safe() : Verdict::unknown("q-coverable");
  r.stats.wall_seconds = r.stats.solver_seconds = seconds_since(start);
  return r;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::backward: return "backward";
    case Algorithm::qcover: return "qcover";
    case Algorithm::trapcegar: return "trapcegar";
    case Algorithm::qreach_only: return "qreach-only";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::backward, Algorithm::qcover, Algorithm::trapcegar,
                 Algorithm::qreach_only})
    if (to_string(a) == name) return a;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

Report check(const Instance& inst, Algorithm algo, const CheckOptions& options) {
  Report r;
  switch (algo) {
    case Algorithm::backward:
    case Algorithm::qcover: {
      Config cfg = options.config;
      cfg.prune = algo == Algorithm::qcover;
      r.stats = run(inst, cfg).stats;
      break;
    }
    case Algorithm::trapcegar:
      r = trapcegar(inst);
      break;
    case Algorithm::qreach_only:
      r = qreach_only(inst);
      break;
  }
  r.name = inst.name;
  r.algorithm = algo;
  r.stats.algorithm = to_string(algo);
  r.verdict = to_string(r.stats.verdict.kind);
  r.detail = r.stats.verdict.reason;
  return r;
}

int exit_code(const Report& r) {
  if (r.verdict == "safe") return 0;
  if (r.verdict == "unsafe") return 2;
  return 3;
}

nlohmann::ordered_json to_json(const Report& r, bool include_timing) {
  nlohmann::ordered_json j;
  j["schema"] = "qcover-report/1";
  j["version"] = std::string(kVersion);
  j["name"] = r.name;
  j["algorithm"] = to_string(r.algorithm);
  j["verdict"] = r.verdict;
  if (!r.detail.empty()) j["detail"] = r.detail;
  if (r.verdict != "error") j["stats"] = to_json(r.stats, include_timing);
  return j;
}

std::string emit_query(const Instance& inst) {
  std::vector<Formula> targets;
  for (const auto& t : inst.targets) {
    std::vector<Formula> eqs;
    for (PlaceIndex p = 0; p < t.size(); ++p)
      eqs.push_back(Formula::atom({{{{VarKind::x, p}, Rational(1)}}, Cmp::eq, to_rational(t[p])}));
    targets.push_back(Formula::conj(std::move(eqs)));
  }
  auto query = Formula::conj(
      {build_cover_query(inst.net, inst.initial), Formula::disj(std::move(targets))});
  return emit_smtlib(query, inst.net);
}

std::vector<std::string> collect_instances(const std::vector<std::string>& inputs) {
  namespace fs = std::filesystem;
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      std::vector<std::string> here;
      for (const auto& e : fs::directory_iterator(in, ec))
        if (e.is_regular_file()) here.push_back(e.path().string());
      std::sort(here.begin(), here.end());
      out.insert(out.end(), here.begin(), here.end());
    } else {
      out.push_back(in);
    }
  }
  return out;
}

std::vector<Report> bench(const std::vector<std::string>& files, const BenchOptions& options) {
  const std::size_t per_file = options.algorithms.size();
  std::vector<Report> rows(files.size() * per_file);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      std::optional<Instance> inst;
      std::string error;
      try {
        inst = load_instance(files[i]);
      } catch (const std::exception& e) {
        error = e.what();
      }
      for (std::size_t a = 0; a < per_file; ++a) {
        Report& row = rows[i * per_file + a];
        if (inst) {
          try {
            row = check(*inst, options.algorithms[a], options.check);
            continue;
          } catch (const std::exception& e) {
            error = e.what();
          }
        }
        row.name = std::filesystem::path(files[i]).stem().string();
        row.algorithm = options.algorithms[a];
        row.verdict = "error";
        row.detail = error;
        row.stats.algorithm = to_string(options.algorithms[a]);
      }
    }
  };

  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(files.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

std::string csv_header() {
  return "name,algo,verdict,wall_ms,solver_ms,iterations,pruned_total,pruned_pct";
}

std::string csv_row(const Report& r, bool include_timing) {
  const auto& s = r.stats;
  std::string row = csv_field(r.name) + "," + to_string(r.algorithm) + "," + r.verdict + ",";
  if (r.verdict == "error") return row + ",,,,";
  if (include_timing) row += fixed(s.wall_seconds * 1000.0, 3) + "," + fixed(s.solver_seconds * 1000.0, 3);
  else row += ",";
  row += "," + std::to_string(s.iterations) + "," + std::to_string(s.pruned_total()) + "," +
         fixed(s.pruned_pct(), 2);
  return row;
}

nlohmann::ordered_json bench_json(const std::vector<Report>& rows, bool include_timing) {
  nlohmann::ordered_json j;
  j["schema"] = "qcover-bench/1";
  j["version"] = std::string(kVersion);
  auto& list = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) list.push_back(to_json(r, include_timing));
  return j;
}

}  // namespace qcover
