#pragma once

#include <speedscale/approx.hpp>
#include <speedscale/generators.hpp>
#include <speedscale/io.hpp>
#include <speedscale/model.hpp>
#include <speedscale/oracle.hpp>
#include <speedscale/preemptive.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cstdint>
#include <future>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace speedscale {

enum class Algorithm { Crd, Cd, Clique, Agreeable, Preemptive, Oracle };

inline constexpr Algorithm kApproxAlgorithms[] = {Algorithm::Crd, Algorithm::Cd, Algorithm::Clique, Algorithm::Agreeable};

inline std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Crd: return "crd";
    case Algorithm::Cd: return "cd";
    case Algorithm::Clique: return "clique";
    case Algorithm::Agreeable: return "agr";
    case Algorithm::Preemptive: return "preemptive";
    case Algorithm::Oracle: return "oracle";
  }
  return "unknown";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::Crd, Algorithm::Cd, Algorithm::Clique, Algorithm::Agreeable, Algorithm::Preemptive,
                      Algorithm::Oracle}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

inline bool applicable(Algorithm algorithm, const FamilyFlags& flags) {
  switch (algorithm) {
    case Algorithm::Crd: return flags.common_release;
    case Algorithm::Cd: return flags.common_deadline;
    case Algorithm::Clique: return flags.clique;
    case Algorithm::Agreeable: return flags.agreeable;
    case Algorithm::Preemptive:
    case Algorithm::Oracle: return true;
  }
  return false;
}

// Tightest applicable guarantee first.
inline std::optional<Algorithm> auto_select(const FamilyFlags& flags) {
  for (Algorithm a : kApproxAlgorithms) {
    if (applicable(a, flags)) return a;
  }
  return std::nullopt;
}

// Guaranteed ratio against the preemptive optimum; none for the exact solvers.
inline std::optional<double> ratio_bound(Algorithm algorithm, int machines, double alpha) {
  switch (algorithm) {
    case Algorithm::Crd:
    case Algorithm::Cd: return common_bound(machines, alpha);
    case Algorithm::Clique: return clique_bound(machines, alpha);
    case Algorithm::Agreeable: return agreeable_bound(machines, alpha);
    case Algorithm::Preemptive:
    case Algorithm::Oracle: return std::nullopt;
  }
  return std::nullopt;
}

inline Mode output_mode(Algorithm algorithm) {
  return algorithm == Algorithm::Preemptive ? Mode::Preemptive : Mode::NonPreemptive;
}

inline Schedule run_algorithm(const Instance& instance, Algorithm algorithm, double tolerance = 1e-9) {
  switch (algorithm) {
    case Algorithm::Crd: return crd(instance, tolerance);
    case Algorithm::Cd: return cd(instance, tolerance);
    case Algorithm::Clique: return clique_algo(instance, tolerance);
    case Algorithm::Agreeable: return agreeable_algo(instance, tolerance);
    case Algorithm::Preemptive: return optimal_preemptive(instance, tolerance).schedule;
    case Algorithm::Oracle: return brute_force_nonpreemptive(instance, std::max(tolerance, 1e-7)).schedule;
  }
  return {};
}

struct BenchConfig {
  std::vector<Family> families;
  int trials = 10;
  std::vector<double> alphas{3.0};
  std::vector<int> machines{1};
  std::uint64_t seed = 0;
  int min_n = 1;
  int max_n = 30;
  double tolerance = 1e-9;
  unsigned threads = 0;  // 0: hardware concurrency
};

// One benchmark row plus the feasibility verdict that the CSV does not carry.
struct BenchRow {
  RatioRecord record;
  bool feasible = true;
};

// Seed of one trial, derived from the run seed and the trial coordinates.
inline std::uint64_t trial_seed(std::uint64_t seed, Family family, int machines, std::size_t alpha_index, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(family), static_cast<std::uint32_t>(machines),
                    static_cast<std::uint32_t>(alpha_index), static_cast<std::uint32_t>(trial)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

struct BenchTrial {
  std::string id;
  GenSpec spec;
};

inline std::vector<BenchTrial> bench_trials(const BenchConfig& config) {
  std::vector<BenchTrial> trials;
  for (Family family : config.families) {
    if (family == Family::Gap) {
      throw Error(ErrorKind::ValidationError, "the Gap family has no approximation algorithm to benchmark");
    }
    for (int m : config.machines) {
      for (std::size_t a = 0; a < config.alphas.size(); ++a) {
        for (int t = 0; t < config.trials; ++t) {
          const std::uint64_t seed = trial_seed(config.seed, family, m, a, t);
          GenSpec spec;
          spec.family = family;
          spec.m = m;
          spec.alpha = config.alphas[a];
          spec.seed = seed;
          spec.n = config.min_n + static_cast<int>((seed >> 7) % static_cast<std::uint64_t>(config.max_n - config.min_n + 1));
          trials.push_back({fmt::format("{}-m{}-a{}-t{}", to_string(family), m, config.alphas[a], t), spec});
        }
      }
    }
  }
  return trials;
}

/// Every applicable approximation algorithm on one generated instance, each
/// checked for non-preemptive feasibility and compared with the preemptive
/// optimum.
inline std::vector<BenchRow> bench_instance(const BenchTrial& trial, double tolerance) {
  const Instance instance = generate(trial.spec);
  const FamilyFlags flags = classify(instance);
  const double lower_bound = optimal_preemptive(instance, tolerance).lower_bound;
  std::vector<BenchRow> rows;
  for (Algorithm algorithm : kApproxAlgorithms) {
    if (!applicable(algorithm, flags)) continue;
    const Schedule schedule = run_algorithm(instance, algorithm, tolerance);
    BenchRow row;
    RatioRecord& r = row.record;
    r.instance_id = trial.id;
    r.family = std::string(to_string(trial.spec.family));
    r.n = static_cast<int>(instance.size());
    r.m = instance.machines;
    r.alpha = instance.alpha;
    r.algorithm = std::string(to_string(algorithm));
    r.energy = total_energy(instance, schedule);
    r.preemptive_lb = lower_bound;
    r.ratio = r.energy / lower_bound;
    r.bound = *ratio_bound(algorithm, instance.machines, instance.alpha);
    r.within_bound = within_bound(r.ratio, r.bound);
    row.feasible = check_feasible(instance, schedule, Mode::NonPreemptive).feasible;
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Runs all trials (in parallel when threads allow) and returns rows in
/// trial order, then algorithm order.
inline std::vector<BenchRow> run_bench(const BenchConfig& config) {
  if (config.trials < 0 || config.min_n < 1 || config.max_n < config.min_n) {
    throw Error(ErrorKind::ValidationError, "invalid bench configuration");
  }
  const std::vector<BenchTrial> trials = bench_trials(config);
  std::vector<std::vector<BenchRow>> per_trial(trials.size());
  unsigned workers = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, trials.size())));

  auto work = [&](unsigned worker) {
    for (std::size_t k = worker; k < trials.size(); k += workers) per_trial[k] = bench_instance(trials[k], config.tolerance);
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::future<void>> futures;
    for (unsigned w = 0; w < workers; ++w) futures.push_back(std::async(std::launch::async, work, w));
    for (auto& f : futures) f.get();
  }

  std::vector<BenchRow> rows;
  for (auto& batch : per_trial) {
    for (auto& row : batch) rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<RatioRecord> records(const std::vector<BenchRow>& rows) {
  std::vector<RatioRecord> out;
  out.reserve(rows.size());
  for (const BenchRow& row : rows) out.push_back(row.record);
  return out;
}

}  // namespace speedscale
