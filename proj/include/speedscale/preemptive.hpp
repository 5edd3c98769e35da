#pragma once

#include <speedscale/error.hpp>
#include <speedscale/max_flow.hpp>
#include <speedscale/model.hpp>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

namespace speedscale {

// Per-job allocated processing time on each interval of the event grid.
struct AllocationProfile {
  std::vector<Time> event_times;          // sorted, distinct releases and deadlines
  std::vector<std::vector<Rational>> alloc;  // alloc[job][interval]

  std::size_t intervals() const { return event_times.empty() ? 0 : event_times.size() - 1; }
  Time length(std::size_t i) const { return event_times[i + 1] - event_times[i]; }

  Rational execution_time(std::size_t job) const {
    Rational total = 0;
    for (const Rational& x : alloc[job]) total += x;
    return total;
  }
};

struct PreemptiveResult {
  Schedule schedule;
  double energy = 0.0;
  double lower_bound = 0.0;
  std::vector<Rational> execution_time;  // e_j, instance order
  std::vector<Rational> speed;           // s_j = w_j / e_j, instance order
  AllocationProfile profile;
};

namespace detail {

inline std::vector<Time> event_grid(const Instance& instance) {
  std::vector<Time> times;
  times.reserve(2 * instance.jobs.size());
  for (const Job& job : instance.jobs) {
    times.push_back(job.release);
    times.push_back(job.deadline);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

// Lays out per-interval allocations with McNaughton's wrap-around rule and
// merges pieces of one job that abut on the same machine.
inline Schedule wrap_around(const Instance& instance, const AllocationProfile& profile,
                            const std::vector<Rational>& speed) {
  Schedule schedule;
  for (std::size_t i = 0; i < profile.intervals(); ++i) {
    const Time& begin = profile.event_times[i];
    const Time& end = profile.event_times[i + 1];
    int machine = 0;
    Time cursor = begin;
    for (std::size_t j = 0; j < instance.jobs.size(); ++j) {
      Rational remaining = profile.alloc[j][i];
      while (remaining > 0) {
        Rational take = std::min(Rational(end - cursor), remaining);
        schedule.pieces.push_back({instance.jobs[j].id, machine, cursor, cursor + take, speed[j]});
        cursor += take;
        remaining -= take;
        if (cursor == end) {
          ++machine;
          cursor = begin;
        }
      }
    }
  }
  sort_pieces(schedule);
  std::vector<ExecutionPiece> merged;
  for (ExecutionPiece& piece : schedule.pieces) {
    if (!merged.empty() && merged.back().machine == piece.machine && merged.back().job == piece.job &&
        merged.back().end == piece.start) {
      merged.back().end = piece.end;
    } else {
      merged.push_back(std::move(piece));
    }
  }
  schedule.pieces = std::move(merged);
  return schedule;
}

inline double constant_speed_energy(const Instance& instance, const std::vector<Rational>& execution_time) {
  double energy = 0.0;
  for (std::size_t j = 0; j < instance.jobs.size(); ++j) {
    const double w = to_double(instance.jobs[j].work);
    const double e = to_double(execution_time[j]);
    energy += w * std::pow(w / e, instance.alpha - 1.0);
  }
  return energy;
}

}  // namespace detail

/// Optimal preemptive schedule with migration on `instance.machines`
/// identical speed-scalable machines.
///
/// The feasible execution-time vectors form a polymatroid whose rank f(S) is
/// the max flow from job set S through the event-grid network. Because the
/// energy w^a / e^(a-1) is w * g(e/w) with g convex, the optimum is the
/// w-weighted lexicographically optimal base, independent of alpha. It is
/// peeled level by level: each level is the set T minimizing
/// f_F(T) / w(T) over the not-yet-fixed jobs (found by a Newton iteration on
/// parametric min cuts), and its jobs run at the common speed w(T) / f_F(T).
/// All arithmetic is exact, so the result is the true optimum; the reported
/// lower bound only absorbs floating-point error in the energy evaluation.
inline PreemptiveResult optimal_preemptive(const Instance& instance, double tolerance = 1e-9) {
  validate(instance);
  if (!(tolerance > 0.0)) {
    throw Error(ErrorKind::ValidationError, "tolerance must be > 0");
  }
  PreemptiveResult result;
  const std::size_t n = instance.jobs.size();
  if (n == 0) return result;

  AllocationProfile& profile = result.profile;
  profile.event_times = detail::event_grid(instance);
  const std::size_t intervals = profile.intervals();

  // Nodes: 0 source, 1 sink, 2..n+1 jobs, then intervals.
  const std::size_t source = 0, sink = 1;
  auto job_node = [](std::size_t j) { return 2 + j; };
  auto interval_node = [n](std::size_t i) { return 2 + n + i; };

  detail::MaxFlow<Rational> network(2 + n + intervals);
  std::vector<std::size_t> source_edge(n);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> job_edges(n);  // (interval, edge)
  for (std::size_t j = 0; j < n; ++j) {
    source_edge[j] = network.add_edge(source, job_node(j), Rational(0));
    const Job& job = instance.jobs[j];
    for (std::size_t i = 0; i < intervals; ++i) {
      if (profile.event_times[i] >= job.release && profile.event_times[i + 1] <= job.deadline) {
        job_edges[j].emplace_back(i, network.add_edge(job_node(j), interval_node(i), profile.length(i)));
      }
    }
  }
  for (std::size_t i = 0; i < intervals; ++i) {
    network.add_edge(interval_node(i), sink, Rational(instance.machines) * profile.length(i));
  }

  std::vector<bool> fixed(n, false);
  std::vector<Rational>& exec = result.execution_time;
  exec.assign(n, Rational(0));
  Rational fixed_rank = 0;  // f(F)
  std::size_t remaining = n;

  // Min cut at ratio `lambda`: fixed jobs are unconstrained (their window
  // length bounds them anyway), free jobs get capacity lambda * w_j.
  auto cut_at = [&](const Rational& lambda) {
    for (std::size_t j = 0; j < n; ++j) {
      network.set_capacity(source_edge[j], fixed[j] ? instance.jobs[j].window() : Rational(lambda * instance.jobs[j].work));
    }
    network.reset();
    return network.solve(source, sink);
  };

  while (remaining > 0) {
    // Start from a single-job set, whose ratio bounds the optimum from above.
    std::vector<std::size_t> level;
    Rational lambda;
    for (std::size_t j = 0; j < n; ++j) {
      if (fixed[j]) continue;
      Rational ratio = instance.jobs[j].window() / instance.jobs[j].work;
      if (level.empty() || ratio < lambda) {
        lambda = ratio;
        level = {j};
      }
    }

    while (true) {
      Rational free_work = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (!fixed[j]) free_work += instance.jobs[j].work;
      }
      const Rational cut = cut_at(lambda);
      const Rational gap = cut - lambda * free_work - fixed_rank;
      if (gap >= 0) break;

      const std::vector<bool> side = network.source_side(source);
      std::vector<std::size_t> better;
      Rational better_work = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (!fixed[j] && side[job_node(j)]) {
          better.push_back(j);
          better_work += instance.jobs[j].work;
        }
      }
      // f_F(T') = cut - lambda * w(R \ T') - f(F)
      const Rational rank_gain = cut - lambda * (free_work - better_work) - fixed_rank;
      lambda = rank_gain / better_work;
      level = std::move(better);
    }

    for (std::size_t j : level) {
      fixed[j] = true;
      exec[j] = lambda * instance.jobs[j].work;
      fixed_rank += exec[j];
      --remaining;
    }
  }

  const Rational horizon = max_deadline(instance);
  for (std::size_t j = 0; j < n; ++j) {
    if (exec[j] <= 0 || to_double(exec[j]) < 1e-12 * to_double(horizon)) {
      throw Error(ErrorKind::InfeasibleInstance, "job '" + instance.jobs[j].id + "' receives a degenerate execution time");
    }
  }

  // Realize the execution times as an allocation profile.
  for (std::size_t j = 0; j < n; ++j) network.set_capacity(source_edge[j], exec[j]);
  network.reset();
  const Rational routed = network.solve(source, sink);
  if (routed != fixed_rank) {
    throw Error(ErrorKind::InfeasibleInstance, "execution times cannot be routed through the event grid");
  }
  profile.alloc.assign(n, std::vector<Rational>(intervals, Rational(0)));
  for (std::size_t j = 0; j < n; ++j) {
    for (auto [i, edge] : job_edges[j]) profile.alloc[j][i] = network.flow(edge);
  }

  result.speed.resize(n);
  for (std::size_t j = 0; j < n; ++j) result.speed[j] = instance.jobs[j].work / exec[j];
  result.schedule = detail::wrap_around(instance, profile, result.speed);
  result.energy = detail::constant_speed_energy(instance, exec);
  const double slack = std::min(8.0 * static_cast<double>(n) * DBL_EPSILON, tolerance / 2.0);
  result.lower_bound = result.energy * (1.0 - slack);
  return result;
}

/// Exact single-machine optimum by repeated critical-interval peeling. Jobs
/// of one critical interval are laid out by EDF at the interval's density
/// inside the time still free when the interval is peeled.
inline Schedule yds_single(const Instance& instance) {
  validate(instance);
  if (instance.machines != 1) {
    throw Error(ErrorKind::WrongMachineCount, "yds_single needs exactly one machine, got " + std::to_string(instance.machines));
  }
  const std::size_t n = instance.jobs.size();
  Schedule schedule;
  if (n == 0) return schedule;

  const Time origin = std::min_element(instance.jobs.begin(), instance.jobs.end(),
                                       [](const Job& a, const Job& b) { return a.release < b.release; })
                          ->release;
  const Time horizon = max_deadline(instance);
  std::vector<std::pair<Time, Time>> blocked;  // disjoint, sorted

  auto free_segments = [&](const Time& from, const Time& to) {
    std::vector<std::pair<Time, Time>> segments;
    Time cursor = from;
    for (const auto& [a, b] : blocked) {
      if (b <= cursor) continue;
      if (a >= to) break;
      if (a > cursor) segments.emplace_back(cursor, a);
      cursor = std::max(cursor, b);
    }
    if (cursor < to) segments.emplace_back(cursor, to);
    return segments;
  };
  // Contracted coordinate: free time elapsed since the origin.
  auto contract = [&](const Time& t) {
    Rational c = 0;
    for (const auto& [a, b] : free_segments(origin, t)) c += b - a;
    return c;
  };

  std::vector<bool> done(n, false);
  std::size_t remaining = n;
  while (remaining > 0) {
    std::vector<std::size_t> live;
    std::vector<Rational> cr(n), cd(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (done[j]) continue;
      live.push_back(j);
      cr[j] = contract(instance.jobs[j].release);
      cd[j] = contract(instance.jobs[j].deadline);
    }
    std::vector<std::size_t> by_deadline = live;
    std::sort(by_deadline.begin(), by_deadline.end(), [&](std::size_t a, std::size_t b) { return cd[a] < cd[b]; });

    Rational best_density = -1, best_a, best_b;
    for (std::size_t s : live) {
      const Rational& a = cr[s];
      Rational work = 0;
      for (std::size_t k = 0; k < by_deadline.size(); ++k) {
        const std::size_t j = by_deadline[k];
        if (cr[j] >= a) work += instance.jobs[j].work;
        const bool last_with_deadline = k + 1 == by_deadline.size() || cd[by_deadline[k + 1]] != cd[j];
        if (!last_with_deadline || work == 0 || cd[j] <= a) continue;
        Rational density = work / (cd[j] - a);
        if (density > best_density) {
          best_density = density;
          best_a = a;
          best_b = cd[j];
        }
      }
    }

    std::vector<std::size_t> critical;
    for (std::size_t j : live) {
      if (cr[j] >= best_a && cd[j] <= best_b) critical.push_back(j);
    }

    // Map the contracted interval back to original time.
    Time region_begin = horizon, region_end = origin;
    {
      Rational acc = 0;
      bool have_begin = false;
      for (const auto& [a, b] : free_segments(origin, horizon)) {
        const Rational len = b - a;
        if (!have_begin && best_a <= acc + len) {
          region_begin = a + (best_a - acc);
          have_begin = true;
        }
        if (acc <= best_b) region_end = std::min(Rational(b), Rational(a + (best_b - acc)));
        acc += len;
      }
    }

    // EDF at the critical speed over the free time of the region.
    const Rational& speed = best_density;
    std::vector<Rational> left(n);
    for (std::size_t j : critical) left[j] = instance.jobs[j].work / speed;
    auto edf_before = [&](std::size_t a, std::size_t b) {
      const Job& x = instance.jobs[a];
      const Job& y = instance.jobs[b];
      if (x.deadline != y.deadline) return x.deadline < y.deadline;
      if (x.release != y.release) return x.release < y.release;
      return a < b;
    };
    for (const auto& [seg_begin, seg_end] : free_segments(region_begin, region_end)) {
      Time cursor = seg_begin;
      while (cursor < seg_end) {
        std::size_t pick = n;
        Time next_release = seg_end;
        for (std::size_t j : critical) {
          if (left[j] <= 0) continue;
          if (instance.jobs[j].release <= cursor) {
            if (pick == n || edf_before(j, pick)) pick = j;
          } else {
            next_release = std::min(next_release, instance.jobs[j].release);
          }
        }
        if (pick == n) {
          cursor = next_release;
          continue;
        }
        const Time stop = std::min(Rational(cursor + left[pick]), next_release);
        left[pick] -= stop - cursor;
        ExecutionPiece piece{instance.jobs[pick].id, 0, cursor, stop, speed};
        if (!schedule.pieces.empty() && schedule.pieces.back().job == piece.job && schedule.pieces.back().end == piece.start) {
          schedule.pieces.back().end = piece.end;
        } else {
          schedule.pieces.push_back(std::move(piece));
        }
        cursor = stop;
      }
    }

    for (std::size_t j : critical) {
      done[j] = true;
      --remaining;
    }
    blocked.emplace_back(region_begin, region_end);
    std::sort(blocked.begin(), blocked.end());
    std::vector<std::pair<Time, Time>> merged;
    for (auto& seg : blocked) {
      if (!merged.empty() && seg.first <= merged.back().second) {
        merged.back().second = std::max(merged.back().second, seg.second);
      } else {
        merged.push_back(seg);
      }
    }
    blocked = std::move(merged);
  }
  sort_pieces(schedule);
  return schedule;
}

struct SplitTimes {
  Rational left;   // processing strictly before T
  Rational right;  // processing at or after T
};

/// Per-job processing time before and after `split`, in instance order.
inline std::vector<SplitTimes> split_times_at(const Instance& instance, const Schedule& schedule, const Time& split) {
  const auto index = job_index(instance);
  std::vector<SplitTimes> out(instance.jobs.size(), SplitTimes{Rational(0), Rational(0)});
  for (const ExecutionPiece& piece : schedule.pieces) {
    auto it = index.find(piece.job);
    if (it == index.end()) {
      throw Error(ErrorKind::UnknownJobId, "piece references unknown job '" + piece.job + "'");
    }
    SplitTimes& s = out[it->second];
    if (piece.end <= split) {
      s.left += piece.duration();
    } else if (piece.start >= split) {
      s.right += piece.duration();
    } else {
      s.left += split - piece.start;
      s.right += piece.end - split;
    }
  }
  return out;
}

}  // namespace speedscale
