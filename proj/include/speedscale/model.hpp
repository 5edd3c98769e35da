#pragma once

#include <speedscale/error.hpp>
#include <speedscale/rational.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace speedscale {

using Time = Rational;
using JobId = std::string;

struct Job {
  JobId id;
  Rational work;
  Time release;
  Time deadline;

  Time window() const { return deadline - release; }
};

struct Instance {
  std::vector<Job> jobs;
  int machines = 1;
  double alpha = 3.0;

  std::size_t size() const { return jobs.size(); }
};

// Throws ValidationError naming the first violated invariant.
inline void validate(const Instance& instance) {
  if (instance.machines < 1) {
    throw Error(ErrorKind::ValidationError, "machines must be >= 1");
  }
  if (!(instance.alpha > 1.0) || !std::isfinite(instance.alpha)) {
    throw Error(ErrorKind::ValidationError, "alpha must be a finite number > 1");
  }
  std::set<JobId> seen;
  for (const Job& job : instance.jobs) {
    if (!seen.insert(job.id).second) {
      throw Error(ErrorKind::ValidationError, "duplicate job id '" + job.id + "'");
    }
    if (job.work <= 0) {
      throw Error(ErrorKind::ValidationError, "job '" + job.id + "': work must be > 0");
    }
    if (job.release >= job.deadline) {
      throw Error(ErrorKind::ValidationError, "job '" + job.id + "': release must be < deadline");
    }
  }
}

struct ExecutionPiece {
  JobId job;
  int machine = 0;
  Time start;
  Time end;
  Rational speed;

  Time duration() const { return end - start; }
  Rational work() const { return speed * (end - start); }
};

struct Schedule {
  std::vector<ExecutionPiece> pieces;
};

inline bool operator==(const ExecutionPiece& a, const ExecutionPiece& b) {
  return a.job == b.job && a.machine == b.machine && a.start == b.start && a.end == b.end &&
         a.speed == b.speed;
}
inline bool operator==(const Schedule& a, const Schedule& b) { return a.pieces == b.pieces; }

// Orders pieces by (machine, start, job) for stable output.
inline void sort_pieces(Schedule& schedule) {
  std::sort(schedule.pieces.begin(), schedule.pieces.end(),
            [](const ExecutionPiece& a, const ExecutionPiece& b) {
              if (a.machine != b.machine) return a.machine < b.machine;
              if (a.start != b.start) return a.start < b.start;
              return a.job < b.job;
            });
}

inline std::unordered_map<JobId, std::size_t> job_index(const Instance& instance) {
  std::unordered_map<JobId, std::size_t> index;
  index.reserve(instance.jobs.size());
  for (std::size_t i = 0; i < instance.jobs.size(); ++i) index.emplace(instance.jobs[i].id, i);
  return index;
}

// ---------------------------------------------------------------------------
// Energy

inline double piece_energy(const ExecutionPiece& piece, double alpha) {
  return std::pow(to_double(piece.speed), alpha) * to_double(piece.duration());
}

inline double total_energy(const Instance& instance, const Schedule& schedule) {
  const auto index = job_index(instance);
  double energy = 0.0;
  for (const ExecutionPiece& piece : schedule.pieces) {
    if (!index.contains(piece.job)) {
      throw Error(ErrorKind::UnknownJobId, "piece references unknown job '" + piece.job + "'");
    }
    energy += piece_energy(piece, instance.alpha);
  }
  return energy;
}

// Energy per job, in instance job order.
inline std::vector<double> job_energies(const Instance& instance, const Schedule& schedule) {
  const auto index = job_index(instance);
  std::vector<double> energies(instance.jobs.size(), 0.0);
  for (const ExecutionPiece& piece : schedule.pieces) {
    auto it = index.find(piece.job);
    if (it == index.end()) {
      throw Error(ErrorKind::UnknownJobId, "piece references unknown job '" + piece.job + "'");
    }
    energies[it->second] += piece_energy(piece, instance.alpha);
  }
  return energies;
}

// ---------------------------------------------------------------------------
// Feasibility

enum class Mode { Preemptive, NonPreemptive };

enum class ViolationKind {
  ReleaseViolation,
  DeadlineViolation,
  MachineOverlap,
  SelfParallelism,
  WorkMismatch,
  PreemptedJob,
  MalformedPiece,
};

inline std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::ReleaseViolation: return "ReleaseViolation";
    case ViolationKind::DeadlineViolation: return "DeadlineViolation";
    case ViolationKind::MachineOverlap: return "MachineOverlap";
    case ViolationKind::SelfParallelism: return "SelfParallelism";
    case ViolationKind::WorkMismatch: return "WorkMismatch";
    case ViolationKind::PreemptedJob: return "PreemptedJob";
    case ViolationKind::MalformedPiece: return "MalformedPiece";
  }
  return "Unknown";
}

struct Violation {
  ViolationKind kind;
  JobId job;
  std::string detail;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;

  bool has(ViolationKind kind) const {
    return std::any_of(violations.begin(), violations.end(),
                       [kind](const Violation& v) { return v.kind == kind; });
  }
};

inline FeasibilityReport check_feasible(const Instance& instance, const Schedule& schedule, Mode mode) {
  FeasibilityReport report;
  auto add = [&report](ViolationKind kind, const JobId& job, std::string detail) {
    report.violations.push_back({kind, job, std::move(detail)});
  };

  const auto index = job_index(instance);
  std::vector<std::vector<const ExecutionPiece*>> by_job(instance.jobs.size());
  std::map<int, std::vector<const ExecutionPiece*>> by_machine;

  for (const ExecutionPiece& piece : schedule.pieces) {
    auto it = index.find(piece.job);
    if (it == index.end()) {
      add(ViolationKind::MalformedPiece, piece.job, "unknown job id");
      continue;
    }
    if (piece.machine < 0 || piece.machine >= instance.machines) {
      add(ViolationKind::MalformedPiece, piece.job, "machine " + std::to_string(piece.machine) + " out of range");
      continue;
    }
    if (piece.start >= piece.end || piece.speed <= 0) {
      add(ViolationKind::MalformedPiece, piece.job, "empty interval or nonpositive speed");
      continue;
    }
    const Job& job = instance.jobs[it->second];
    if (piece.start < job.release) {
      add(ViolationKind::ReleaseViolation, job.id, "starts at " + to_string(piece.start) + " before release " + to_string(job.release));
    }
    if (piece.end > job.deadline) {
      add(ViolationKind::DeadlineViolation, job.id, "ends at " + to_string(piece.end) + " after deadline " + to_string(job.deadline));
    }
    by_job[it->second].push_back(&piece);
    by_machine[piece.machine].push_back(&piece);
  }

  auto by_start = [](const ExecutionPiece* a, const ExecutionPiece* b) { return a->start < b->start; };

  for (auto& [machine, pieces] : by_machine) {
    std::sort(pieces.begin(), pieces.end(), by_start);
    for (std::size_t k = 1; k < pieces.size(); ++k) {
      if (pieces[k]->start < pieces[k - 1]->end) {
        add(ViolationKind::MachineOverlap, pieces[k]->job,
            "overlaps job '" + pieces[k - 1]->job + "' on machine " + std::to_string(machine));
      }
    }
  }

  for (std::size_t j = 0; j < instance.jobs.size(); ++j) {
    const Job& job = instance.jobs[j];
    auto& pieces = by_job[j];
    std::sort(pieces.begin(), pieces.end(), by_start);
    Rational done = 0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      done += pieces[k]->work();
      if (k > 0 && pieces[k]->start < pieces[k - 1]->end) {
        add(ViolationKind::SelfParallelism, job.id, "pieces overlap in time");
      }
    }
    if (done != job.work) {
      add(ViolationKind::WorkMismatch, job.id, "processed " + to_string(done) + " of " + to_string(job.work));
    }
    if (mode == Mode::NonPreemptive && pieces.size() > 1) {
      add(ViolationKind::PreemptedJob, job.id, std::to_string(pieces.size()) + " pieces");
    }
  }

  report.feasible = report.violations.empty();
  return report;
}

// ---------------------------------------------------------------------------
// Instance families

struct FamilyFlags {
  bool common_release = true;
  bool common_deadline = true;
  bool clique = true;
  bool agreeable = true;
  bool laminar = true;
  bool pure_laminar = true;
};

// Pairwise family tests over jobs ordered by release. Equal releases are
// ordered by ascending deadline for the agreeable test and by descending
// deadline for the (pure-)laminar tests.
inline FamilyFlags classify(const Instance& instance) {
  FamilyFlags flags;
  const auto& jobs = instance.jobs;
  if (jobs.empty()) return flags;

  std::vector<const Job*> asc(jobs.size());
  std::transform(jobs.begin(), jobs.end(), asc.begin(), [](const Job& j) { return &j; });
  std::vector<const Job*> desc = asc;
  std::sort(asc.begin(), asc.end(), [](const Job* a, const Job* b) {
    return a->release != b->release ? a->release < b->release : a->deadline < b->deadline;
  });
  std::sort(desc.begin(), desc.end(), [](const Job* a, const Job* b) {
    return a->release != b->release ? a->release < b->release : a->deadline > b->deadline;
  });

  for (const Job& job : jobs) {
    flags.common_release = flags.common_release && job.release == jobs.front().release;
    flags.common_deadline = flags.common_deadline && job.deadline == jobs.front().deadline;
  }

  const Time& min_deadline =
      std::min_element(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) { return a.deadline < b.deadline; })->deadline;
  const Time& max_release =
      std::max_element(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) { return a.release < b.release; })->release;
  flags.clique = min_deadline >= max_release;

  for (std::size_t k = 1; k < asc.size(); ++k) {
    if (asc[k - 1]->deadline > asc[k]->deadline) flags.agreeable = false;
  }
  for (std::size_t k = 1; k < desc.size(); ++k) {
    if (desc[k - 1]->deadline < desc[k]->deadline) flags.pure_laminar = false;
  }
  for (std::size_t a = 0; a < desc.size() && flags.laminar; ++a) {
    for (std::size_t b = a + 1; b < desc.size(); ++b) {
      const Job& first = *desc[a];
      const Job& second = *desc[b];
      if (!(first.deadline >= second.deadline || first.deadline <= second.release)) {
        flags.laminar = false;
        break;
      }
    }
  }
  return flags;
}

// ---------------------------------------------------------------------------
// Speed rescaling

// Divides every piece's distance from `anchor` and its duration by `gamma`
// while multiplying its speed by `gamma`; work per piece is unchanged.
inline Schedule scale_schedule(const Instance& instance, const Schedule& schedule, const Rational& gamma,
                               const Time& anchor) {
  (void)instance;
  if (gamma < 1) {
    throw Error(ErrorKind::InvalidGamma, "gamma must be >= 1, got " + to_string(gamma));
  }
  Schedule scaled;
  scaled.pieces.reserve(schedule.pieces.size());
  for (const ExecutionPiece& piece : schedule.pieces) {
    ExecutionPiece p = piece;
    p.start = anchor + (piece.start - anchor) / gamma;
    p.end = anchor + (piece.end - anchor) / gamma;
    p.speed = piece.speed * gamma;
    scaled.pieces.push_back(std::move(p));
  }
  return scaled;
}

// Completion time (latest piece end) per job, in instance order; jobs without
// pieces get their release.
inline std::vector<Time> completion_times(const Instance& instance, const Schedule& schedule) {
  const auto index = job_index(instance);
  std::vector<Time> completion(instance.jobs.size());
  std::vector<bool> seen(instance.jobs.size(), false);
  for (std::size_t j = 0; j < instance.jobs.size(); ++j) completion[j] = instance.jobs[j].release;
  for (const ExecutionPiece& piece : schedule.pieces) {
    auto it = index.find(piece.job);
    if (it == index.end()) continue;
    if (!seen[it->second] || piece.end > completion[it->second]) completion[it->second] = piece.end;
    seen[it->second] = true;
  }
  return completion;
}

inline Rational max_deadline(const Instance& instance) {
  Rational best = 0;
  for (const Job& job : instance.jobs) best = std::max(best, Rational(job.deadline));
  return best;
}

}  // namespace speedscale
