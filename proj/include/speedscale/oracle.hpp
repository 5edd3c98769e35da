#pragma once

#include <speedscale/error.hpp>
#include <speedscale/model.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace speedscale {

struct OracleResult {
  double energy = 0.0;
  Schedule schedule;
  std::uint64_t enumerated = 0;
  double tolerance = 0.0;
};

struct FixedOrderTiming {
  std::vector<Time> start;  // per job, in the given order
  std::vector<Time> end;
  double energy = 0.0;
};

namespace detail {

inline double chain_energy(std::span<const Job> jobs, const std::vector<Time>& start, const std::vector<Time>& end,
                           double alpha) {
  double energy = 0.0;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const double w = to_double(jobs[k].work);
    energy += w * std::pow(w / to_double(end[k] - start[k]), alpha - 1.0);
  }
  return energy;
}

// One run of consecutive jobs with no forced idle time between them. Job k
// runs on [b[k], b[k+1]]; b[0] and b[K] are fixed, interior boundaries live
// in [lower[k], upper[k]].
struct Chain {
  std::size_t first = 0;
  std::size_t count = 0;
  std::vector<Rational> lower, upper;
};

// Exact test for a strictly increasing boundary vector; on success returns
// one (greedy, shrinking uniform gap).
inline std::optional<std::vector<Rational>> feasible_boundaries(const Chain& chain) {
  const std::size_t K = chain.count;
  // Forward pass with open/closed lower bounds.
  Rational lo = chain.lower[0];
  for (std::size_t k = 1; k <= K; ++k) {
    const bool open = chain.lower[k] <= lo;
    lo = std::max(lo, chain.lower[k]);
    if (open ? !(lo < chain.upper[k]) : !(lo <= chain.upper[k])) return std::nullopt;
  }
  Rational gap = (chain.upper[K] - chain.lower[0]) / static_cast<long>(K);
  for (int attempt = 0; attempt < 4096; ++attempt, gap /= 2) {
    std::vector<Rational> b(K + 1);
    b[0] = chain.lower[0];
    bool ok = true;
    for (std::size_t k = 1; k <= K && ok; ++k) {
      b[k] = k == K ? chain.upper[K] : std::max(chain.lower[k], Rational(b[k - 1] + gap));
      ok = b[k] <= chain.upper[k] && b[k] > b[k - 1];
    }
    if (ok) return b;
  }
  return std::nullopt;
}

}  // namespace detail

/// Minimum-energy timing of jobs processed in the given order on one
/// machine. Adjacent jobs share a boundary unless the earlier deadline
/// precedes the later release, in which case the earlier job ends at its
/// deadline and the later one starts at its release. Interior boundaries are
/// optimized by cyclic coordinate descent; each coordinate has a closed-form
/// minimizer (equal speeds on both sides) clamped to its box.
inline FixedOrderTiming fixed_order_timing(std::span<const Job> order, double alpha, double tolerance = 1e-7) {
  FixedOrderTiming timing;
  const std::size_t n = order.size();
  timing.start.resize(n);
  timing.end.resize(n);
  if (n == 0) return timing;

  std::vector<detail::Chain> chains;
  for (std::size_t k = 0; k < n; ++k) {
    if (chains.empty() || order[k - 1].deadline < order[k].release) {
      detail::Chain chain;
      chain.first = k;
      chain.lower.push_back(order[k].release);
      chain.upper.push_back(order[k].release);
      chains.push_back(std::move(chain));
    }
    detail::Chain& chain = chains.back();
    ++chain.count;
    const bool last = k + 1 == n || order[k].deadline < order[k + 1].release;
    if (last) {
      chain.lower.push_back(order[k].deadline);
      chain.upper.push_back(order[k].deadline);
    } else {
      chain.lower.push_back(order[k + 1].release);
      chain.upper.push_back(order[k].deadline);
    }
  }

  const double precision = std::min(tolerance, 1e-7) * 1e-6;
  for (const detail::Chain& chain : chains) {
    auto exact = detail::feasible_boundaries(chain);
    if (!exact) {
      throw Error(ErrorKind::InfeasibleOrder, "no positive-length timing for this order");
    }
    const std::size_t K = chain.count;
    std::vector<double> b(K + 1), lo(K + 1), hi(K + 1), w(K);
    for (std::size_t k = 0; k <= K; ++k) {
      b[k] = to_double((*exact)[k]);
      lo[k] = to_double(chain.lower[k]);
      hi[k] = to_double(chain.upper[k]);
    }
    for (std::size_t k = 0; k < K; ++k) w[k] = to_double(order[chain.first + k].work);
    const double span = b[K] - b[0];

    for (int sweep = 0; sweep < 200000 && K > 1; ++sweep) {
      double moved = 0.0;
      for (std::size_t k = 1; k < K; ++k) {
        double target = b[k - 1] + (b[k + 1] - b[k - 1]) * w[k - 1] / (w[k - 1] + w[k]);
        target = std::clamp(target, lo[k], hi[k]);
        if (target <= b[k - 1] || target >= b[k + 1]) continue;
        moved = std::max(moved, std::abs(target - b[k]));
        b[k] = target;
      }
      if (moved <= precision * span) break;
    }

    // Back to exact time, keeping the exact feasible point if rounding breaks it.
    std::vector<Rational> rb(K + 1);
    rb[0] = chain.lower[0];
    rb[K] = chain.upper[K];
    bool ok = true;
    for (std::size_t k = 1; k < K; ++k) {
      rb[k] = std::clamp(from_double(b[k]), chain.lower[k], chain.upper[k]);
      ok = ok && rb[k] > rb[k - 1];
    }
    ok = ok && rb[K] > rb[K - 1];
    std::span<const Job> jobs = order.subspan(chain.first, K);
    std::vector<Time> s(K), e(K), se(K), ee(K);
    for (std::size_t k = 0; k < K; ++k) {
      s[k] = rb[k];
      e[k] = rb[k + 1];
      se[k] = (*exact)[k];
      ee[k] = (*exact)[k + 1];
    }
    if (!ok || detail::chain_energy(jobs, se, ee, alpha) < detail::chain_energy(jobs, s, e, alpha)) {
      s = std::move(se);
      e = std::move(ee);
    }
    for (std::size_t k = 0; k < K; ++k) {
      timing.start[chain.first + k] = s[k];
      timing.end[chain.first + k] = e[k];
    }
  }
  timing.energy = detail::chain_energy(order, timing.start, timing.end, alpha);
  return timing;
}

/// Optimal non-preemptive schedule by exhaustive search: every split of the
/// jobs into at most m machine sets, every processing order per set, each
/// order timed by fixed_order_timing. Single-machine optima are memoized per
/// job subset; identical jobs are only tried in index order.
inline OracleResult brute_force_nonpreemptive(const Instance& instance, double tolerance = 1e-7) {
  validate(instance);
  const std::size_t n = instance.jobs.size();
  if (n > 8 || instance.machines > 3) {
    throw Error(ErrorKind::TooLarge, "brute force is limited to n <= 8 and m <= 3");
  }
  OracleResult result;
  result.tolerance = tolerance;
  if (n == 0) return result;

  const std::uint32_t full = (1u << n) - 1;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  struct Best {
    bool computed = false;
    double energy = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> order;
    FixedOrderTiming timing;
  };
  std::vector<Best> best(full + 1);

  auto identical = [&](std::size_t a, std::size_t b) {
    const Job& x = instance.jobs[a];
    const Job& y = instance.jobs[b];
    return x.work == y.work && x.release == y.release && x.deadline == y.deadline;
  };

  auto single_machine = [&](std::uint32_t mask) -> Best& {
    Best& slot = best[mask];
    if (slot.computed) return slot;
    slot.computed = true;
    std::vector<std::size_t> perm;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask & (1u << j)) perm.push_back(j);
    }
    std::vector<Job> jobs(perm.size());
    do {
      bool canonical = true;
      for (std::size_t a = 0; a < perm.size() && canonical; ++a) {
        for (std::size_t b = a + 1; b < perm.size(); ++b) {
          if (perm[a] > perm[b] && identical(perm[a], perm[b])) {
            canonical = false;
            break;
          }
        }
      }
      if (!canonical) continue;
      ++result.enumerated;
      for (std::size_t k = 0; k < perm.size(); ++k) jobs[k] = instance.jobs[perm[k]];
      try {
        FixedOrderTiming timing = fixed_order_timing(jobs, instance.alpha, tolerance);
        if (timing.energy < slot.energy) {
          slot.energy = timing.energy;
          slot.order = perm;
          slot.timing = std::move(timing);
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InfeasibleOrder) throw;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return slot;
  };

  // cost[k][mask]: best energy for `mask` on k machines; machine sets are
  // chosen so each contains the lowest remaining job (breaks label symmetry).
  const auto machines = static_cast<std::size_t>(instance.machines);
  std::vector<std::vector<double>> cost(machines + 1, std::vector<double>(full + 1, -1.0));
  std::vector<std::vector<std::uint32_t>> choice(machines + 1, std::vector<std::uint32_t>(full + 1, 0));
  auto solve = [&](auto&& self, std::size_t k, std::uint32_t mask) -> double {
    if (mask == 0) return 0.0;
    if (k == 0) return kInf;
    double& memo = cost[k][mask];
    if (memo >= 0.0 || memo == kInf) return memo;
    if (k == 1) {
      choice[k][mask] = mask;
      return memo = single_machine(mask).energy;
    }
    const std::uint32_t low = mask & (~mask + 1);
    const std::uint32_t rest = mask ^ low;
    double value = kInf;
    // Enumerate subsets of `rest` to join `low` on this machine.
    for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
      const std::uint32_t here = sub | low;
      const double c = single_machine(here).energy + self(self, k - 1, mask ^ here);
      if (c < value) {
        value = c;
        choice[k][mask] = here;
      }
      if (sub == 0) break;
    }
    return memo = value;
  };

  const double energy = solve(solve, machines, full);
  if (!std::isfinite(energy)) {
    throw Error(ErrorKind::InfeasibleInstance, "no feasible non-preemptive schedule found");
  }

  std::uint32_t mask = full;
  int machine = 0;
  for (std::size_t k = machines; k >= 1 && mask != 0; --k, ++machine) {
    const std::uint32_t here = choice[k][mask];
    const Best& slot = best[here];
    for (std::size_t p = 0; p < slot.order.size(); ++p) {
      const Job& job = instance.jobs[slot.order[p]];
      const Time& s = slot.timing.start[p];
      const Time& e = slot.timing.end[p];
      result.schedule.pieces.push_back({job.id, machine, s, e, job.work / (e - s)});
    }
    mask ^= here;
  }
  sort_pieces(result.schedule);
  result.energy = total_energy(instance, result.schedule);
  return result;
}

struct ConvexPreemptiveResult {
  double energy = 0.0;       // objective at the final iterate
  double lower_bound = 0.0;  // energy minus the Frank-Wolfe duality gap
  int sweeps = 0;
};

/// Floating-point solve of the preemptive allocation program
///   min sum_j w_j^a / e_j^(a-1),  e_j = sum_i x_ji,
///   0 <= x_ji <= len_i,  sum_j x_ji <= m len_i,
/// by exact block minimization over one grid interval at a time. With all
/// other intervals fixed, the optimum gives every job the same time-per-work
/// level t (clamped to [0, len_i]), found from the piecewise-linear load
/// curve. Stops once the Frank-Wolfe gap certifies `tolerance` relative
/// accuracy. Independent of the combinatorial solver in preemptive.hpp.
inline ConvexPreemptiveResult convex_preemptive(const Instance& instance, double tolerance = 1e-9,
                                                int max_sweeps = 1000000) {
  validate(instance);
  ConvexPreemptiveResult result;
  const std::size_t n = instance.jobs.size();
  if (n == 0) return result;
  const double alpha = instance.alpha;
  const double m = instance.machines;

  std::vector<double> times;
  for (const Job& job : instance.jobs) {
    times.push_back(to_double(job.release));
    times.push_back(to_double(job.deadline));
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  const std::size_t intervals = times.size() - 1;

  std::vector<double> w(n);
  std::vector<std::vector<std::size_t>> members(intervals);
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = to_double(instance.jobs[j].work);
    const double r = to_double(instance.jobs[j].release);
    const double d = to_double(instance.jobs[j].deadline);
    for (std::size_t i = 0; i < intervals; ++i) {
      if (times[i] >= r && times[i + 1] <= d) members[i].push_back(j);
    }
  }

  std::vector<std::vector<double>> x(n, std::vector<double>(intervals, 0.0));
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 0; i < intervals; ++i) {
    const double len = times[i + 1] - times[i];
    const double share = len * std::min(1.0, m / static_cast<double>(members[i].size()));
    for (std::size_t j : members[i]) {
      x[j][i] = share;
      e[j] += share;
    }
  }

  auto objective = [&] {
    double f = 0.0;
    for (std::size_t j = 0; j < n; ++j) f += w[j] * std::pow(w[j] / e[j], alpha - 1.0);
    return f;
  };
  // Frank-Wolfe gap: grad . (x - s) with s the best vertex of the polytope.
  auto duality_gap = [&] {
    std::vector<double> price(n);  // -grad_j
    for (std::size_t j = 0; j < n; ++j) price[j] = (alpha - 1.0) * std::pow(w[j] / e[j], alpha);
    double gap = 0.0;
    for (std::size_t i = 0; i < intervals; ++i) {
      const double len = times[i + 1] - times[i];
      std::vector<double> p;
      for (std::size_t j : members[i]) {
        p.push_back(price[j]);
        gap -= price[j] * x[j][i];
      }
      std::sort(p.rbegin(), p.rend());
      for (std::size_t k = 0; k < p.size() && static_cast<double>(k) < m; ++k) gap += p[k] * len;
    }
    return gap;
  };

  std::vector<double> base, brk;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < intervals; ++i) {
      const auto& jobs = members[i];
      if (jobs.empty()) continue;
      const double len = times[i + 1] - times[i];
      if (static_cast<double>(jobs.size()) <= m) {
        for (std::size_t j : jobs) {
          e[j] += len - x[j][i];
          x[j][i] = len;
        }
        continue;
      }
      base.assign(jobs.size(), 0.0);
      brk.clear();
      for (std::size_t k = 0; k < jobs.size(); ++k) {
        const std::size_t j = jobs[k];
        base[k] = e[j] - x[j][i];
        brk.push_back(base[k] / w[j]);
        brk.push_back((base[k] + len) / w[j]);
      }
      auto load = [&](double t) {
        double s = 0.0;
        for (std::size_t k = 0; k < jobs.size(); ++k) s += std::clamp(w[jobs[k]] * t - base[k], 0.0, len);
        return s;
      };
      const double target = m * len;
      std::sort(brk.begin(), brk.end());
      double t_lo = 0.0, t_hi = brk.back();
      for (double t : brk) {
        if (load(t) >= target) {
          t_hi = t;
          break;
        }
        t_lo = t;
      }
      // load is linear on [t_lo, t_hi].
      const double l_lo = load(t_lo), l_hi = load(t_hi);
      const double t = l_hi > l_lo ? t_lo + (target - l_lo) * (t_hi - t_lo) / (l_hi - l_lo) : t_hi;
      for (std::size_t k = 0; k < jobs.size(); ++k) {
        const std::size_t j = jobs[k];
        const double v = std::clamp(w[j] * t - base[k], 0.0, len);
        e[j] = base[k] + v;
        x[j][i] = v;
      }
    }
    result.sweeps = sweep;
    if (sweep % 4 == 0 || sweep == 1) {
      const double f = objective();
      const double gap = duality_gap();
      if (gap <= tolerance * f) break;
    }
  }
  result.energy = objective();
  result.lower_bound = result.energy - std::max(0.0, duality_gap());
  return result;
}

// ---------------------------------------------------------------------------
// Preemptive vs non-preemptive gap family

/// n-1 unit jobs on [2j-1, 2j] plus one job of work n spanning [0, 2n-1], on
/// one machine.
inline Instance gap_instance(int n, double alpha = 3.0) {
  if (n < 3) throw Error(ErrorKind::ValidationError, "gap instance needs n >= 3");
  Instance instance{{}, 1, alpha};
  for (int j = 1; j < n; ++j) {
    instance.jobs.push_back({"J" + std::to_string(j), Rational(1), Rational(2 * j - 1), Rational(2 * j)});
  }
  instance.jobs.push_back({"J" + std::to_string(n), Rational(n), Rational(0), Rational(2 * n - 1)});
  return instance;
}

struct GapEnergies {
  double preemptive = 0.0;
  double nonpreemptive = 0.0;
};

inline GapEnergies gap_energies(int n, double alpha) {
  if (n < 3 || !(alpha > 1.0)) throw Error(ErrorKind::ValidationError, "gap energies need n >= 3 and alpha > 1");
  return {2.0 * n - 1.0, 3.0 * std::pow((n + 2.0) / 3.0, alpha) + (n - 3.0)};
}

/// The non-preemptive schedule behind gap_energies: J1, Jn, J2 back to back
/// on [1, 4] at speed (n+2)/3, every other unit job on its own window.
inline Schedule gap_construction(int n) {
  if (n < 3) throw Error(ErrorKind::ValidationError, "gap instance needs n >= 3");
  const Rational speed = ratio(n + 2, 3);
  const Rational unit = 1 / speed;
  const std::string last = "J" + std::to_string(n);
  Schedule schedule;
  schedule.pieces.push_back({"J1", 0, Rational(1), Rational(1 + unit), speed});
  schedule.pieces.push_back({last, 0, Rational(1 + unit), Rational(4 - unit), speed});
  schedule.pieces.push_back({"J2", 0, Rational(4 - unit), Rational(4), speed});
  for (int j = 3; j < n; ++j) {
    schedule.pieces.push_back({"J" + std::to_string(j), 0, Rational(2 * j - 1), Rational(2 * j), Rational(1)});
  }
  sort_pieces(schedule);
  return schedule;
}

}  // namespace speedscale
