// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "support.hpp"

#include <speedscale/approx.hpp>
#include <speedscale/bench.hpp>
#include <speedscale/generators.hpp>
#include <speedscale/oracle.hpp>
#include <speedscale/preemptive.hpp>

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

using namespace speedscale;
using namespace speedscale::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string failure;  // first failing case

  void fail(const std::string& what) {
    if (pass) failure = what;
    pass = false;
  }
};

constexpr Family kBenchFamilies[] = {Family::CommonRelease, Family::CommonDeadline, Family::Clique, Family::PureLaminar,
                                     Family::Agreeable};

std::vector<BenchRow> bench_rows() {
  static const std::vector<BenchRow> rows = [] {
    BenchConfig config;
    config.families.assign(std::begin(kBenchFamilies), std::end(kBenchFamilies));
    config.trials = 500;
    config.alphas = {1.5, 2.0, 3.0};
    config.machines = {1, 2, 3, 8};
    config.seed = 20240601;
    config.min_n = 1;
    config.max_n = 30;
    return run_bench(config);
  }();
  return rows;
}

Outcome feasibility_suite() {
  Outcome o;
  std::size_t instances = 0, outputs = 0;
  std::string last;
  for (const BenchRow& row : bench_rows()) {
    if (row.record.instance_id != last) ++instances;
    last = row.record.instance_id;
    ++outputs;
    if (!row.feasible) o.fail(row.record.instance_id + " " + row.record.algorithm + " infeasible");
  }
  if (instances != 500u * 5 * 4 * 3) o.fail(fmt::format("expected 30000 instances, saw {}", instances));
  o.detail = fmt::format("{} instances, {} algorithm outputs checked", instances, outputs);
  return o;
}

// Worst ratio/bound over bench rows of the given algorithms.
Outcome bound_check(std::initializer_list<const char*> algorithms, const char* family_name) {
  Outcome o;
  double worst = 0.0;
  std::size_t count = 0;
  for (const BenchRow& row : bench_rows()) {
    const RatioRecord& r = row.record;
    bool selected = false;
    for (const char* a : algorithms) selected = selected || r.algorithm == a;
    if (!selected) continue;
    ++count;
    const double bound = *ratio_bound(*parse_algorithm(r.algorithm), r.m, r.alpha);
    if (r.bound != bound) o.fail(r.instance_id + " wrong bound column");
    worst = std::max(worst, r.ratio / bound);
    if (!(r.ratio <= bound * (1 + 1e-9)) || !r.within_bound) {
      o.fail(fmt::format("{} {} ratio {} > bound {}", r.instance_id, r.algorithm, r.ratio, bound));
    }
  }
  if (count == 0) o.fail(std::string("no ") + family_name + " rows");
  o.detail = fmt::format("{} {} rows, max ratio/bound {:.6f}", count, family_name, worst);
  return o;
}

Outcome common_bounds() {
  Outcome o = bound_check({"crd", "cd"}, "crd/cd");
  const Instance tight = make({job("J1", 1, 0, 1), job("J2", 1, 0, 1), job("J3", 1, 0, 1)}, 2, 2.0);
  const double pre = optimal_preemptive(tight).energy;
  for (auto [name, schedule] : {std::pair{"crd", crd(tight)}, std::pair{"cd", cd(tight)}}) {
    if (!check_feasible(tight, schedule, Mode::NonPreemptive).feasible) o.fail(std::string(name) + " tight example infeasible");
    const double ratio = total_energy(tight, schedule) / pre;
    if (std::abs(ratio - 1.5) > 1e-9) o.fail(fmt::format("{} tight example ratio {}", name, ratio));
    if (std::abs(ratio - common_bound(2, 2.0)) > 1e-9) o.fail("tight example does not meet the bound");
  }
  o.detail += "; tight example ratio 1.5";
  return o;
}

Outcome clique_bounds() {
  Outcome o = bound_check({"clique"}, "clique");
  const Instance inst = make({job("J1", 1, 0, 2), job("J2", 1, 1, 3)}, 1, 2.0);
  const Schedule s = clique_algo(inst);
  const double energy = total_energy(inst, s);
  const double pre = optimal_preemptive(inst).energy;
  if (!check_feasible(inst, s, Mode::NonPreemptive).feasible) o.fail("worked example infeasible");
  if (std::abs(energy - 1.5) > 1e-9) o.fail(fmt::format("worked example energy {}", energy));
  if (std::abs(pre - 4.0 / 3.0) > 1e-9) o.fail(fmt::format("worked example preemptive energy {}", pre));
  if (!(energy / pre <= clique_bound(1, 2.0))) o.fail("worked example above bound");
  o.detail += fmt::format("; worked example {:.6f} vs {:.6f}", energy, pre);
  return o;
}

Outcome agreeable_bounds() {
  Outcome o = bound_check({"agr"}, "agr");
  std::size_t strict = 0;
  for (const BenchRow& row : bench_rows()) {
    const RatioRecord& r = row.record;
    if (r.algorithm != "agr" || r.m < 2) continue;
    ++strict;
    if (!(r.ratio < std::pow(2.0, 3 * r.alpha - 3))) o.fail(fmt::format("{} ratio {} not below 2^(3a-3)", r.instance_id, r.ratio));
  }
  if (strict == 0) o.fail("no m >= 2 agr rows");
  o.detail += fmt::format("; {} rows with m >= 2 below 2^(3a-3)", strict);
  return o;
}

Rational gap_formula(int n) {
  const Rational base = ratio(n + 2, 3);
  return 3 * base * base + (n - 3);
}

Outcome gap_reproduction() {
  Outcome o;
  double previous = std::numeric_limits<double>::infinity();
  double lowest = previous, highest = 0.0;
  int oracle_checks = 0;
  for (int n = 3; n <= 50; ++n) {
    const Instance gap = gap_instance(n, 2.0);
    const double pre = optimal_preemptive(gap).energy;
    if (std::abs(pre - (2.0 * n - 1)) > 1e-9 * (2.0 * n - 1)) o.fail(fmt::format("n={} preemptive {}", n, pre));

    const Schedule construction = gap_construction(n);
    if (!check_feasible(gap, construction, Mode::NonPreemptive).feasible) o.fail(fmt::format("n={} construction infeasible", n));
    const double npr = total_energy(gap, construction);
    const double formula = to_double(gap_formula(n));
    if (std::abs(npr - formula) > 1e-12 * formula) o.fail(fmt::format("n={} construction {} vs formula {}", n, npr, formula));
    if (std::abs(gap_energies(n, 2.0).nonpreemptive - formula) > 1e-12 * formula) o.fail(fmt::format("n={} closed form", n));

    if (n <= 6) {
      const double oracle = brute_force_nonpreemptive(gap).energy;
      ++oracle_checks;
      if (std::abs(oracle - npr) > 1e-4 * npr) o.fail(fmt::format("n={} oracle {} vs construction {}", n, oracle, npr));
    }

    const double scaled = npr / pre / n;  // alpha - 1 = 1
    if (scaled > previous) o.fail(fmt::format("n={} scaled ratio {} rose above {}", n, scaled, previous));
    previous = scaled;
    lowest = std::min(lowest, scaled);
    highest = std::max(highest, scaled);
  }
  // The scaled ratio tends to 1/6 from above.
  if (!(lowest > 1.0 / 6.0 && highest <= 1.0)) o.fail(fmt::format("scaled ratio range [{}, {}]", lowest, highest));
  o.detail = fmt::format("n=3..50, oracle-confirmed for {} sizes, (E_npr/E_pr)/n in [{:.4f}, {:.4f}] non-increasing",
                         oracle_checks, lowest, highest);
  return o;
}

Outcome preemptive_correctness() {
  Outcome o;
  double worst_convex = 0.0, worst_yds = 0.0;
  int single = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const double alpha = 1.5 + 0.5 * static_cast<double>(t % 4);
    const Instance inst = random_instance(t * 7919 + 1, 8, 3, alpha);
    const PreemptiveResult exact = optimal_preemptive(inst);
    if (!check_feasible(inst, exact.schedule, Mode::Preemptive).feasible) o.fail(fmt::format("trial {} infeasible", t));
    const ConvexPreemptiveResult convex = convex_preemptive(inst);
    const double rel = std::abs(exact.energy - convex.energy) / convex.energy;
    worst_convex = std::max(worst_convex, rel);
    if (rel > 1e-6) o.fail(fmt::format("trial {} exact {} vs convex {}", t, exact.energy, convex.energy));
    if (inst.machines == 1) {
      ++single;
      const double yds = total_energy(inst, yds_single(inst));
      const double r1 = std::abs(exact.energy - yds) / yds;
      worst_yds = std::max(worst_yds, r1);
      if (r1 > 1e-9) o.fail(fmt::format("trial {} exact {} vs yds {}", t, exact.energy, yds));
    }
  }
  if (single == 0) o.fail("no single-machine trials");
  o.detail = fmt::format("200 instances, max rel diff vs convex {:.2e}; {} single-machine, max rel diff vs yds {:.2e}",
                         worst_convex, single, worst_yds);
  return o;
}

Outcome oracle_sandwich() {
  Outcome o;
  int comparisons = 0;
  for (Family family : kBenchFamilies) {
    for (int t = 0; t < 100; ++t) {
      GenSpec spec;
      spec.family = family;
      spec.seed = trial_seed(77, family, 0, 0, t);
      spec.n = 1 + t % 6;
      spec.m = 1 + (t / 6) % 2;
      spec.alpha = t % 3 == 0 ? 1.5 : t % 3 == 1 ? 2.0 : 3.0;
      const Instance inst = generate(spec);
      const double pre = optimal_preemptive(inst).energy;
      const OracleResult oracle = brute_force_nonpreemptive(inst);
      const std::string where = fmt::format("{} t={}", to_string(family), t);
      if (!check_feasible(inst, oracle.schedule, Mode::NonPreemptive).feasible) o.fail(where + " oracle schedule infeasible");
      if (!(pre <= oracle.energy * (1 + 1e-6))) o.fail(fmt::format("{} preemptive {} > oracle {}", where, pre, oracle.energy));
      const FamilyFlags flags = classify(inst);
      for (Algorithm a : kApproxAlgorithms) {
        if (!applicable(a, flags)) continue;
        const double energy = total_energy(inst, run_algorithm(inst, a));
        ++comparisons;
        if (!(oracle.energy <= energy * (1 + 1e-6))) {
          o.fail(fmt::format("{} oracle {} > {} {}", where, oracle.energy, to_string(a), energy));
        }
      }
    }
  }
  o.detail = fmt::format("500 instances, {} algorithm comparisons", comparisons);
  return o;
}

Outcome agreeable_single_machine() {
  Outcome o;
  for (int t = 0; t < 200; ++t) {
    GenSpec spec;
    spec.family = Family::Agreeable;
    spec.seed = trial_seed(88, Family::Agreeable, 1, 0, t);
    spec.n = 1 + t % 30;
    spec.m = 1;
    const Instance inst = generate(spec);
    const Schedule s = yds_single(inst);
    std::map<JobId, int> pieces;
    for (const ExecutionPiece& p : s.pieces) ++pieces[p.job];
    bool ok = s.pieces.size() == inst.size() && pieces.size() == inst.size();
    for (const auto& [id, count] : pieces) ok = ok && count == 1;
    if (!ok) o.fail(fmt::format("t={} {} pieces for {} jobs", t, s.pieces.size(), inst.size()));
    if (!check_feasible(inst, s, Mode::NonPreemptive).feasible) o.fail(fmt::format("t={} not non-preemptively feasible", t));
  }
  o.detail = "200 instances";
  return o;
}

Outcome agreeable_separation() {
  Outcome o;
  std::size_t pairs = 0;
  for (int t = 0; t < 200; ++t) {
    GenSpec spec;
    spec.family = Family::Agreeable;
    spec.seed = trial_seed(99, Family::Agreeable, 0, 0, t);
    spec.n = 1 + t % 30;
    spec.m = 1 + t % 4;
    const std::vector<Instance> parts = agreeable_parts(generate(spec));
    for (std::size_t l = 0; l + 1 < parts.size(); ++l) {
      Rational last = parts[l].jobs.front().deadline;
      for (const Job& j : parts[l].jobs) last = std::max(last, Rational(j.deadline));
      Rational first = parts[l + 1].jobs.front().release;
      for (const Job& j : parts[l + 1].jobs) first = std::min(first, Rational(j.release));
      ++pairs;
      if (!(last < first)) o.fail(fmt::format("t={} part {}: {} >= {}", t, l, to_string(last), to_string(first)));
    }
  }
  if (pairs == 0) o.fail("no consecutive parts sampled");
  o.detail = fmt::format("200 instances, {} consecutive part pairs", pairs);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"feasibility suite", feasibility_suite},
      {"crd/cd bound", common_bounds},
      {"clique bound", clique_bounds},
      {"agreeable bound", agreeable_bounds},
      {"gap family", gap_reproduction},
      {"preemptive solver", preemptive_correctness},
      {"oracle sandwich", oracle_sandwich},
      {"agreeable single machine", agreeable_single_machine},
      {"agreeable separation", agreeable_separation},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print("{} {} {}: {} ({:.1f}s){}\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail, seconds,
               o.pass ? "" : " -- " + o.failure);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
