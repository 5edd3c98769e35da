#pragma once

#include <speedscale/approx.hpp>
#include <speedscale/bench.hpp>
#include <speedscale/generators.hpp>
#include <speedscale/io.hpp>
#include <speedscale/model.hpp>
#include <speedscale/oracle.hpp>
#include <speedscale/preemptive.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace speedscale::cli {

inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // infeasible schedule or violated bound
inline constexpr int kUsage = 2;    // bad flags, unreadable input, wrong family

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InfeasibleInstance:
    case ErrorKind::InfeasibleOrder:
    case ErrorKind::GenerationFailure: return kFailure;
    default: return kUsage;
  }
}

inline double default_tolerance() {
  if (const char* env = std::getenv("SPEEDSCALE_TOLERANCE")) {
    char* end = nullptr;
    const double value = std::strtod(env, &end);
    if (end != env && *end == '\0' && value > 0.0) return value;
    throw UsageError("SPEEDSCALE_TOLERANCE must be a positive number");
  }
  return 1e-9;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, Parse parse, const char* what) {
  std::vector<T> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) continue;
    auto value = parse(item);
    if (!value) throw UsageError(std::string("bad ") + what + " '" + item + "'");
    out.push_back(*value);
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what + " list");
  return out;
}

inline std::optional<double> to_real(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') return std::nullopt;
  return v;
}

inline std::optional<int> to_int(const std::string& s) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') return std::nullopt;
  return static_cast<int>(v);
}

inline void print_violations(const FeasibilityReport& report, std::ostream& out) {
  for (const Violation& v : report.violations) {
    out << to_string(v.kind) << " " << v.job << ": " << v.detail << "\n";
  }
}

}  // namespace detail

/// Runs one subcommand; returns the process exit code.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Energy-minimizing non-preemptive speed scaling toolkit", "speedscale"};
  app.require_subcommand(1, 1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random instance of a family");
  std::string gen_family, gen_out;
  GenSpec spec;
  gen->add_option("--family", gen_family, "CommonRelease|CommonDeadline|Clique|Agreeable|PureLaminar|Gap")->required();
  gen->add_option("--n", spec.n, "Number of jobs");
  gen->add_option("--m", spec.m, "Number of machines");
  gen->add_option("--alpha", spec.alpha, "Power exponent (> 1)");
  gen->add_option("--seed", spec.seed, "RNG seed");
  gen->add_option("--gap-n", spec.gap_n, "Size of the Gap family instance");
  gen->add_option("-o,--output", gen_out, "Output file (default: stdout)");

  // classify
  auto* cls = app.add_subcommand("classify", "Report the instance families an instance belongs to");
  std::string cls_file;
  cls->add_option("instance", cls_file)->required();

  // solve
  auto* solve = app.add_subcommand("solve", "Run an algorithm on an instance");
  std::string solve_alg = "auto", solve_file, solve_out;
  std::optional<double> solve_tol;
  solve->add_option("--alg", solve_alg, "crd|cd|clique|agr|preemptive|oracle|auto");
  solve->add_option("--tolerance", solve_tol, "Solver tolerance (relative)");
  solve->add_option("instance", solve_file)->required();
  solve->add_option("-o,--output", solve_out, "Schedule output file");

  // check
  auto* check = app.add_subcommand("check", "Check a schedule against an instance");
  std::string check_mode, check_instance, check_schedule;
  check->add_option("--mode", check_mode, "pre|npr (default: the schedule's own mode)");
  check->add_option("instance", check_instance)->required();
  check->add_option("schedule", check_schedule)->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Measure approximation ratios on generated instances");
  std::string bench_families, bench_alphas = "3", bench_machines = "1", bench_out;
  BenchConfig config;
  bench->add_option("--families", bench_families, "Comma-separated family list")->required();
  bench->add_option("--trials", config.trials, "Instances per (family, m, alpha)");
  bench->add_option("--alphas", bench_alphas, "Comma-separated alpha list");
  bench->add_option("--machines", bench_machines, "Comma-separated machine counts");
  bench->add_option("--seed", config.seed, "Run seed");
  bench->add_option("--min-n", config.min_n, "Smallest instance size");
  bench->add_option("--max-n", config.max_n, "Largest instance size");
  bench->add_option("--threads", config.threads, "Worker threads (0: all cores)");
  bench->add_option("--out", bench_out, "CSV output file (default: stdout)");

  // gap
  auto* gap = app.add_subcommand("gap", "Preemptive vs non-preemptive energy on the gap family");
  int gap_n = 5;
  double gap_alpha = 3.0;
  bool gap_verify = false;
  gap->add_option("--n", gap_n)->required();
  gap->add_option("--alpha", gap_alpha);
  gap->add_flag("--verify-oracle", gap_verify, "Confirm the construction with the brute-force oracle (n <= 8)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*gen) {
      auto family = parse_family(gen_family);
      if (!family) throw detail::UsageError("unknown family '" + gen_family + "'");
      spec.family = *family;
      const Instance instance = generate(spec);
      const std::string text =
          write_instance(instance, InstanceMeta{std::string(kGeneratorName), gen_family, spec.seed});
      if (gen_out.empty()) {
        out << text;
      } else {
        detail::write_file(gen_out, text);
      }
      return kOk;
    }

    if (*cls) {
      const Instance instance = parse_instance(detail::read_file(cls_file));
      const FamilyFlags f = classify(instance);
      auto yes = [](bool b) { return b ? "true" : "false"; };
      out << "common_release: " << yes(f.common_release) << "\n"
          << "common_deadline: " << yes(f.common_deadline) << "\n"
          << "clique: " << yes(f.clique) << "\n"
          << "agreeable: " << yes(f.agreeable) << "\n"
          << "laminar: " << yes(f.laminar) << "\n"
          << "pure_laminar: " << yes(f.pure_laminar) << "\n";
      return kOk;
    }

    if (*solve) {
      const double tolerance = solve_tol ? *solve_tol : detail::default_tolerance();
      if (!(tolerance > 0.0)) throw detail::UsageError("tolerance must be positive");
      const Instance instance = parse_instance(detail::read_file(solve_file));
      const FamilyFlags flags = classify(instance);
      std::optional<Algorithm> algorithm;
      if (solve_alg == "auto") {
        algorithm = auto_select(flags);
        if (!algorithm) throw Error(ErrorKind::WrongFamily, "no algorithm applies to this instance");
      } else {
        algorithm = parse_algorithm(solve_alg);
        if (!algorithm) throw detail::UsageError("unknown algorithm '" + solve_alg + "'");
      }

      const Schedule schedule = run_algorithm(instance, *algorithm, tolerance);
      const double energy = total_energy(instance, schedule);
      const double lower_bound = optimal_preemptive(instance, tolerance).lower_bound;
      const double ratio = lower_bound > 0.0 ? energy / lower_bound : 1.0;
      const auto bound = ratio_bound(*algorithm, instance.machines, instance.alpha);

      out << "algorithm: " << to_string(*algorithm) << "\n";
      out << fmt::format("energy: {}\n", energy);
      out << fmt::format("preemptive_lb: {}\n", lower_bound);
      out << fmt::format("ratio: {}\n", ratio);
      out << (bound ? fmt::format("bound: {}\n", *bound) : std::string("bound: none\n"));

      const Mode mode = output_mode(*algorithm);
      if (!solve_out.empty()) detail::write_file(solve_out, write_schedule(instance, schedule, mode));

      const FeasibilityReport report = check_feasible(instance, schedule, mode);
      if (!report.feasible) {
        err << "output schedule is infeasible:\n";
        detail::print_violations(report, err);
        return kFailure;
      }
      if (bound && !within_bound(ratio, *bound)) {
        err << "ratio " << ratio << " exceeds the guaranteed bound " << *bound << "\n";
        return kFailure;
      }
      return kOk;
    }

    if (*check) {
      const Instance instance = parse_instance(detail::read_file(check_instance));
      const ScheduleFile file = parse_schedule(detail::read_file(check_schedule));
      Mode mode = file.mode;
      if (check_mode == "pre") {
        mode = Mode::Preemptive;
      } else if (check_mode == "npr") {
        mode = Mode::NonPreemptive;
      } else if (!check_mode.empty()) {
        throw detail::UsageError("--mode must be pre or npr");
      }
      const FeasibilityReport report = check_feasible(instance, file.schedule, mode);
      if (report.feasible) {
        out << fmt::format("feasible ({}), energy {}\n", mode == Mode::Preemptive ? "preemptive" : "nonpreemptive",
                           total_energy(instance, file.schedule));
        return kOk;
      }
      out << "infeasible\n";
      detail::print_violations(report, out);
      return kFailure;
    }

    if (*bench) {
      config.families = detail::parse_list<Family>(bench_families, [](const std::string& s) { return parse_family(s); }, "family");
      config.alphas = detail::parse_list<double>(bench_alphas, detail::to_real, "alpha");
      config.machines = detail::parse_list<int>(bench_machines, detail::to_int, "machine count");
      config.tolerance = detail::default_tolerance();
      for (double a : config.alphas) {
        if (!(a > 1.0)) throw detail::UsageError("alphas must be > 1");
      }
      for (int m : config.machines) {
        if (m < 1) throw detail::UsageError("machine counts must be >= 1");
      }
      const std::vector<BenchRow> rows = run_bench(config);
      const std::string csv = write_report(records(rows));
      if (bench_out.empty()) {
        out << csv;
      } else {
        detail::write_file(bench_out, csv);
      }
      std::size_t violations = 0, infeasible = 0;
      for (const BenchRow& row : rows) {
        violations += row.record.within_bound ? 0 : 1;
        infeasible += row.feasible ? 0 : 1;
      }
      err << fmt::format("{} rows, {} bound violations, {} infeasible schedules\n", rows.size(), violations, infeasible);
      return violations == 0 && infeasible == 0 ? kOk : kFailure;
    }

    if (*gap) {
      if (gap_n < 3) throw detail::UsageError("--n must be >= 3");
      if (!(gap_alpha > 1.0)) throw detail::UsageError("--alpha must be > 1");
      const GapEnergies closed = gap_energies(gap_n, gap_alpha);
      out << fmt::format("E_pr={}\n", closed.preemptive);
      std::string exact;
      if (gap_alpha == std::floor(gap_alpha) && gap_alpha <= 64) {
        Rational base = ratio(gap_n + 2, 3), power(1);
        for (int k = 0; k < static_cast<int>(gap_alpha); ++k) power *= base;
        const Rational value = 3 * power + (gap_n - 3);
        exact = value.get_den() == 1 ? value.get_num().get_str() : value.get_str();
      }
      out << (exact.empty() ? fmt::format("E_npr={:.6f}\n", closed.nonpreemptive)
                            : fmt::format("E_npr={} ({:.6f})\n", exact, closed.nonpreemptive));
      out << fmt::format("ratio={:.6f}\n", closed.nonpreemptive / closed.preemptive);

      const Instance instance = gap_instance(gap_n, gap_alpha);
      const double solved = optimal_preemptive(instance, detail::default_tolerance()).energy;
      out << fmt::format("preemptive_solver={}\n", solved);
      int status = kOk;
      if (std::abs(solved - closed.preemptive) > 1e-9 * closed.preemptive) status = kFailure;

      if (gap_verify) {
        const OracleResult oracle = brute_force_nonpreemptive(instance);
        const double rel = (closed.nonpreemptive - oracle.energy) / closed.nonpreemptive;
        out << fmt::format("oracle={} ({} orders searched)\n", oracle.energy, oracle.enumerated);
        const bool optimal = std::abs(rel) <= 1e-4;
        out << "construction_optimal=" << (optimal ? "true" : "false") << "\n";
        if (!optimal) status = kFailure;
      }
      return status;
    }
  } catch (const detail::UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_code(e.kind());
  }
  return kUsage;
}

}  // namespace speedscale::cli
