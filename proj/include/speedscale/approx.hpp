#pragma once

#include <speedscale/error.hpp>
#include <speedscale/model.hpp>
#include <speedscale/preemptive.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace speedscale {

// Approximation ratios guaranteed against the optimal preemptive energy.
inline double common_bound(int machines, double alpha) {
  return std::pow(2.0 - 1.0 / machines, alpha - 1.0);
}
inline double clique_bound(int machines, double alpha) {
  return std::pow(2.0 * (2.0 - 1.0 / machines), alpha - 1.0);
}
inline double agreeable_bound(int machines, double alpha) {
  return std::pow(4.0 * (2.0 - 1.0 / machines), alpha - 1.0);
}

namespace detail {

inline Instance with_jobs(const Instance& like, std::vector<Job> jobs) {
  return Instance{std::move(jobs), like.machines, like.alpha};
}

inline Schedule concatenate(Schedule a, const Schedule& b) {
  a.pieces.insert(a.pieces.end(), b.pieces.begin(), b.pieces.end());
  sort_pieces(a);
  return a;
}

// Non-preemptive list scheduling in (deadline, id) order: each job starts on
// the machine that frees first (lowest index on ties), no earlier than its
// release, and runs for processing[j] at speed w_j / processing[j].
inline Schedule edf_dispatch(const Instance& instance, const std::vector<Rational>& processing) {
  std::vector<std::size_t> order(instance.jobs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Job& x = instance.jobs[a];
    const Job& y = instance.jobs[b];
    return x.deadline != y.deadline ? x.deadline < y.deadline : x.id < y.id;
  });
  std::vector<Time> free_at(static_cast<std::size_t>(instance.machines), Time(0));
  bool started = false;
  Schedule schedule;
  for (std::size_t j : order) {
    const Job& job = instance.jobs[j];
    if (!started) {
      std::fill(free_at.begin(), free_at.end(), job.release);
      started = true;
    }
    const auto machine = static_cast<std::size_t>(std::min_element(free_at.begin(), free_at.end()) - free_at.begin());
    const Time start = std::max(free_at[machine], job.release);
    const Time end = start + processing[j];
    schedule.pieces.push_back({job.id, static_cast<int>(machine), start, end, job.work / processing[j]});
    free_at[machine] = end;
  }
  sort_pieces(schedule);
  return schedule;
}

}  // namespace detail

/// Common release date: compress each job's optimal preemptive execution time
/// by (2 - 1/m) and dispatch non-preemptively in EDF order.
inline Schedule crd(const Instance& instance, double tolerance = 1e-9) {
  validate(instance);
  if (!classify(instance).common_release) {
    throw Error(ErrorKind::WrongFamily, "crd requires a common release date");
  }
  if (instance.jobs.empty()) return {};
  const PreemptiveResult preemptive = optimal_preemptive(instance, tolerance);
  const Rational factor = ratio(2 * instance.machines - 1, instance.machines);  // 2 - 1/m
  std::vector<Rational> processing(instance.jobs.size());
  for (std::size_t j = 0; j < processing.size(); ++j) processing[j] = preemptive.execution_time[j] / factor;
  return detail::edf_dispatch(instance, processing);
}

/// Common deadline: crd on the time-mirrored instance, mirrored back. The
/// mirrored EDF order is latest-release-first dispatch run backward from the
/// deadline.
inline Schedule cd(const Instance& instance, double tolerance = 1e-9) {
  validate(instance);
  if (!classify(instance).common_deadline) {
    throw Error(ErrorKind::WrongFamily, "cd requires a common deadline");
  }
  if (instance.jobs.empty()) return {};
  const Time deadline = instance.jobs.front().deadline;
  std::vector<Job> mirrored;
  mirrored.reserve(instance.jobs.size());
  for (const Job& job : instance.jobs) {
    mirrored.push_back({job.id, job.work, deadline - job.deadline, deadline - job.release});
  }
  Schedule forward = crd(detail::with_jobs(instance, std::move(mirrored)), tolerance);
  for (ExecutionPiece& piece : forward.pieces) {
    Time start = deadline - piece.end;
    piece.end = deadline - piece.start;
    piece.start = std::move(start);
  }
  sort_pieces(forward);
  return forward;
}

struct CliqueSplit {
  std::vector<JobId> left;   // mostly processed before T
  std::vector<JobId> right;  // mostly processed after T
  Time split;
};

/// Splits a clique instance at its smallest deadline according to where the
/// optimal preemptive schedule processes each job.
inline CliqueSplit clique_split(const Instance& instance, double tolerance = 1e-9) {
  validate(instance);
  if (!classify(instance).clique) {
    throw Error(ErrorKind::WrongFamily, "instance is not a clique instance");
  }
  CliqueSplit split;
  if (instance.jobs.empty()) return split;
  split.split = std::min_element(instance.jobs.begin(), instance.jobs.end(),
                                 [](const Job& a, const Job& b) { return a.deadline < b.deadline; })
                    ->deadline;
  const PreemptiveResult preemptive = optimal_preemptive(instance, tolerance);
  const auto times = split_times_at(instance, preemptive.schedule, split.split);
  for (std::size_t j = 0; j < instance.jobs.size(); ++j) {
    (times[j].left >= times[j].right ? split.left : split.right).push_back(instance.jobs[j].id);
  }
  return split;
}

/// Clique instances: jobs mostly processed before T get deadline T and go to
/// cd, the rest get release T and go to crd; the two schedules are joined.
inline Schedule clique_algo(const Instance& instance, double tolerance = 1e-9) {
  const CliqueSplit split = clique_split(instance, tolerance);
  if (instance.jobs.empty()) return {};
  const auto index = job_index(instance);

  std::vector<Job> left_jobs, right_jobs;
  for (const JobId& id : split.left) {
    Job job = instance.jobs[index.at(id)];
    job.deadline = split.split;
    left_jobs.push_back(std::move(job));
  }
  for (const JobId& id : split.right) {
    Job job = instance.jobs[index.at(id)];
    job.release = split.split;
    right_jobs.push_back(std::move(job));
  }

  Schedule schedule;
  if (!left_jobs.empty()) schedule = cd(detail::with_jobs(instance, std::move(left_jobs)), tolerance);
  if (!right_jobs.empty()) schedule = detail::concatenate(std::move(schedule), crd(detail::with_jobs(instance, std::move(right_jobs)), tolerance));
  return schedule;
}

struct PartitionEntry {
  Time anchor;  // T_l
  std::vector<JobId> jobs;
};

struct Partition {
  std::vector<PartitionEntry> entries;

  std::size_t count() const { return entries.size(); }
};

/// Agreeable decomposition: T_1 is the smallest deadline and part 1 holds
/// every job released by T_1; repeat on the jobs left over.
inline Partition partition_agreeable(const Instance& instance) {
  validate(instance);
  if (!classify(instance).agreeable) {
    throw Error(ErrorKind::WrongFamily, "instance is not agreeable");
  }
  Partition partition;
  std::vector<bool> assigned(instance.jobs.size(), false);
  std::size_t remaining = instance.jobs.size();
  while (remaining > 0) {
    const Job* earliest = nullptr;
    for (std::size_t j = 0; j < instance.jobs.size(); ++j) {
      if (!assigned[j] && (earliest == nullptr || instance.jobs[j].deadline < earliest->deadline)) {
        earliest = &instance.jobs[j];
      }
    }
    PartitionEntry entry{earliest->deadline, {}};
    for (std::size_t j = 0; j < instance.jobs.size(); ++j) {
      if (!assigned[j] && instance.jobs[j].release <= entry.anchor) {
        assigned[j] = true;
        entry.jobs.push_back(instance.jobs[j].id);
        --remaining;
      }
    }
    partition.entries.push_back(std::move(entry));
  }
  return partition;
}

/// Halves every active interval towards `anchor`, which stays inside each
/// shrunk window.
inline Instance shrink_to_clique(std::span<const Job> jobs, const Time& anchor, int machines, double alpha) {
  Instance shrunk{{}, machines, alpha};
  shrunk.jobs.reserve(jobs.size());
  for (const Job& job : jobs) {
    if (job.release > anchor || job.deadline < anchor) {
      throw Error(ErrorKind::BadAnchor, "job '" + job.id + "' window does not contain " + to_string(anchor));
    }
    Job half = job;
    half.release = job.release + (anchor - job.release) / 2;
    half.deadline = job.deadline - (job.deadline - anchor) / 2;
    shrunk.jobs.push_back(std::move(half));
  }
  return shrunk;
}

/// The shrunk clique subinstances the agreeable algorithm solves, in
/// partition order.
inline std::vector<Instance> agreeable_parts(const Instance& instance) {
  const Partition partition = partition_agreeable(instance);
  const auto index = job_index(instance);
  std::vector<Instance> parts;
  parts.reserve(partition.count());
  for (const PartitionEntry& entry : partition.entries) {
    std::vector<Job> jobs;
    jobs.reserve(entry.jobs.size());
    for (const JobId& id : entry.jobs) jobs.push_back(instance.jobs[index.at(id)]);
    parts.push_back(shrink_to_clique(jobs, entry.anchor, instance.machines, instance.alpha));
  }
  return parts;
}

/// Agreeable instances: partition, shrink every part around its anchor, solve
/// each part as a clique instance and join the schedules.
inline Schedule agreeable_algo(const Instance& instance, double tolerance = 1e-9) {
  Schedule schedule;
  for (const Instance& part : agreeable_parts(instance)) {
    Schedule sub = clique_algo(part, tolerance);
    schedule.pieces.insert(schedule.pieces.end(), sub.pieces.begin(), sub.pieces.end());
  }
  sort_pieces(schedule);
  return schedule;
}

}  // namespace speedscale
