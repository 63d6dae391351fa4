#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qcover/bench.hpp"
#include "qcover/generate.hpp"
#include "qcover/mist.hpp"

using namespace qcover;

namespace {

// sysexits.h values
constexpr int kUsage = 64;
constexpr int kDataError = 65;
constexpr int kNoInput = 66;
constexpr int kCantCreate = 73;

struct SearchFlags {
  Natural c = 10;
  Natural k = 5;
  bool no_minbottle = false;
  double timeout = 0;  // seconds, 0 = none

  void add_to(CLI::App* app) {
    app->add_option("--c", c, "Minbottle constant term")->capture_default_str();
    app->add_option("--k", k, "Minbottle divisor")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_flag("--no-minbottle", no_minbottle, "Expand the whole frontier each iteration");
    app->add_option("--timeout", timeout, "Per-instance limit in seconds (0 = none)")
        ->check(CLI::NonNegativeNumber);
  }

  CheckOptions options() const {
    CheckOptions o;
    o.config.c = c;
    o.config.k = k;
    o.config.use_minbottle = !no_minbottle;
    if (timeout > 0)
      o.config.timeout = std::chrono::milliseconds(static_cast<long long>(timeout * 1000.0));
    return o;
  }
};

std::optional<Format> format_flag(const std::string& name) {
  if (name.empty()) return std::nullopt;
  return name == "json" ? Format::json : Format::mist;
}

// "-" is standard output.
bool write_to(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return bool(std::cout);
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  return bool(out);
}

int write_or_fail(const std::string& path, const std::string& text) {
  if (write_to(path, text)) return 0;
  std::cerr << "qcover: cannot write " << path << "\n";
  return kCantCreate;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backward coverability for Petri nets with continuous-reachability pruning"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  const std::vector<std::string> algorithms{"backward", "qcover", "trapcegar", "qreach-only"};
  const std::vector<std::string> formats{"mist", "json"};

  // check
  auto* check_cmd = app.add_subcommand("check", "Decide whether the targets are coverable");
  std::string input, algo = "qcover", format, emit_smt, stats_path;
  bool deterministic = false;
  SearchFlags check_flags;
  check_cmd->add_option("file", input, "Instance file")->required();
  check_cmd->add_option("--algo", algo, "Algorithm")->check(CLI::IsMember(algorithms))->capture_default_str();
  check_cmd->add_option("--format", format, "Input format (default: by extension)")
      ->check(CLI::IsMember(formats));
  check_cmd->add_option("--emit-smt", emit_smt, "Write the cover query as SMT-LIB2");
  check_cmd->add_option("--stats", stats_path, "Write the JSON report ('-' for stdout)");
  check_cmd->add_flag("--deterministic", deterministic, "Leave timings out of the report");
  check_flags.add_to(check_cmd);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run algorithms over instance files or directories");
  std::vector<std::string> bench_inputs;
  std::vector<std::string> bench_algos{"backward", "qcover"};
  std::string csv_path = "-", json_path;
  std::size_t jobs = 1;
  bool bench_deterministic = false;
  SearchFlags bench_flags;
  bench_cmd->add_option("inputs", bench_inputs, "Files or directories")->required();
  bench_cmd->add_option("--algo", bench_algos, "Algorithms, comma separated")
      ->delimiter(',')
      ->check(CLI::IsMember(algorithms))
      ->capture_default_str();
  bench_cmd->add_option("--csv", csv_path, "CSV output ('-' for stdout)")->capture_default_str();
  bench_cmd->add_option("--json", json_path, "Also write a JSON report");
  bench_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--deterministic", bench_deterministic, "Leave timings out of the reports");
  bench_flags.add_to(bench_cmd);

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random instance");
  GenParams gp;
  std::string gen_format = "mist", gen_out = "-";
  gen_cmd->add_option("--places", gp.places)->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--transitions", gp.transitions)->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gp.seed)->capture_default_str();
  gen_cmd->add_option("--max-weight", gp.max_weight)->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--max-initial", gp.max_initial)->capture_default_str();
  gen_cmd->add_option("--max-target", gp.max_target)->capture_default_str();
  gen_cmd->add_option("--density", gp.density_percent, "Arc and marking density in percent")
      ->capture_default_str()
      ->check(CLI::Range(0, 100));
  gen_cmd->add_option("--read", gp.read_percent, "Share of consumed places given back, percent")
      ->capture_default_str()
      ->check(CLI::Range(0, 100));
  gen_cmd->add_option("--guarded", gp.guarded_percent,
                      "Guarded family: share of transitions testing p0 >= 2, percent")
      ->capture_default_str()
      ->check(CLI::Range(0, 100));
  gen_cmd->add_option("--format", gen_format)->check(CLI::IsMember(formats))->capture_default_str();
  gen_cmd->add_option("-o,--output", gen_out, "Output file ('-' for stdout)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  if (*check_cmd) {
    Instance inst;
    try {
      inst = load_instance(input, format_flag(format));
    } catch (const ParseError& e) {
      std::cerr << input << ": " << e.what() << "\n";
      return kDataError;
    } catch (const std::exception& e) {
      std::cerr << "qcover: " << e.what() << "\n";
      return kNoInput;
    }
    if (!emit_smt.empty())
      if (int rc = write_or_fail(emit_smt, emit_query(inst))) return rc;
    const Report r = check(inst, parse_algorithm(algo), check_flags.options());
    std::cout << r.verdict;
    if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
    std::cout << "\n";
    if (!stats_path.empty())
      if (int rc = write_or_fail(stats_path, to_json(r, !deterministic).dump(2) + "\n")) return rc;
    return exit_code(r);
  }

  if (*bench_cmd) {
    BenchOptions opts;
    opts.algorithms.clear();
    for (const auto& a : bench_algos) opts.algorithms.push_back(parse_algorithm(a));
    opts.check = bench_flags.options();
    opts.jobs = jobs;
    const auto rows = bench(collect_instances(bench_inputs), opts);
    std::string csv = csv_header() + "\n";
    for (const auto& r : rows) csv += csv_row(r, !bench_deterministic) + "\n";
    if (int rc = write_or_fail(csv_path, csv)) return rc;
    if (!json_path.empty())
      if (int rc = write_or_fail(json_path, bench_json(rows, !bench_deterministic).dump(2) + "\n"))
        return rc;
    return 0;
  }

  try {
    const Instance inst = generate(gp);
    return write_or_fail(gen_out, serialize(inst, gen_format == "json" ? Format::json : Format::mist));
  } catch (const std::invalid_argument& e) {
    std::cerr << "qcover: " << e.what() << "\n";
    return kUsage;
  }
}
