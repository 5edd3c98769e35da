#pragma once

#include <speedscale/error.hpp>
#include <speedscale/model.hpp>
#include <speedscale/oracle.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace speedscale {

enum class Family { CommonRelease, CommonDeadline, Clique, Agreeable, PureLaminar, Gap };

inline constexpr Family kAllFamilies[] = {Family::CommonRelease, Family::CommonDeadline, Family::Clique,
                                          Family::Agreeable, Family::PureLaminar, Family::Gap};

inline std::string_view to_string(Family family) {
  switch (family) {
    case Family::CommonRelease: return "CommonRelease";
    case Family::CommonDeadline: return "CommonDeadline";
    case Family::Clique: return "Clique";
    case Family::Agreeable: return "Agreeable";
    case Family::PureLaminar: return "PureLaminar";
    case Family::Gap: return "Gap";
  }
  return "Unknown";
}

inline std::optional<Family> parse_family(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

// Name of the generator algorithm; recorded next to the seed in instance files.
inline constexpr std::string_view kGeneratorName = "mt19937_64";

struct GenSpec {
  Family family = Family::CommonRelease;
  int n = 10;
  int m = 1;
  double alpha = 3.0;
  std::uint64_t seed = 0;
  Rational work_min = ratio(1, 10);
  Rational work_max{10};
  Rational horizon{100};
  int gap_n = 5;
};

inline bool in_family(const FamilyFlags& flags, Family family) {
  switch (family) {
    case Family::CommonRelease: return flags.common_release;
    case Family::CommonDeadline: return flags.common_deadline;
    case Family::Clique: return flags.clique;
    case Family::Agreeable: return flags.agreeable;
    case Family::PureLaminar: return flags.pure_laminar && flags.laminar && flags.clique;
    case Family::Gap: return flags.laminar;
  }
  return false;
}

/// Random instance of the requested family. Times are integer multiples of
/// horizon/1000 and works lie on a 100-step grid over [work_min, work_max].
inline Instance generate(const GenSpec& spec) {
  if (spec.n < 1 || spec.m < 1 || spec.work_min <= 0 || spec.work_max < spec.work_min || spec.horizon <= 0) {
    throw Error(ErrorKind::ValidationError, "invalid generator spec");
  }
  if (spec.family == Family::Gap) {
    Instance instance = gap_instance(spec.gap_n, spec.alpha);
    validate(instance);
    return instance;
  }

  constexpr long kTicks = 1000;
  std::mt19937_64 rng(spec.seed);
  auto uniform = [&rng](long lo, long hi) { return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
  const Rational tick = spec.horizon / kTicks;
  const Rational work_step = (spec.work_max - spec.work_min) / 100;
  const auto n = static_cast<std::size_t>(spec.n);

  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<long> release(n), deadline(n);
    switch (spec.family) {
      case Family::CommonRelease:
        for (std::size_t j = 0; j < n; ++j) {
          release[j] = 0;
          deadline[j] = uniform(1, kTicks);
        }
        break;
      case Family::CommonDeadline:
        for (std::size_t j = 0; j < n; ++j) {
          release[j] = uniform(0, kTicks - 1);
          deadline[j] = kTicks;
        }
        break;
      case Family::Clique: {
        const long anchor = uniform(1, kTicks - 1);
        for (std::size_t j = 0; j < n; ++j) {
          do {
            release[j] = uniform(0, anchor);
            deadline[j] = uniform(anchor, kTicks);
          } while (release[j] == deadline[j]);
        }
        break;
      }
      case Family::PureLaminar:
        for (std::size_t j = 0; j < n; ++j) {
          release[j] = uniform(0, kTicks / 2 - 1);
          deadline[j] = uniform(kTicks / 2, kTicks);
        }
        std::sort(release.begin(), release.end());
        std::sort(deadline.begin(), deadline.end(), std::greater<>());
        break;
      case Family::Agreeable:
        // Independent samples of releases and deadlines, paired rank to rank.
        for (std::size_t j = 0; j < n; ++j) {
          release[j] = uniform(0, kTicks - kTicks / 5);
          const long start = uniform(0, kTicks - kTicks / 5);
          deadline[j] = start + uniform(kTicks / 50, kTicks / 5);
        }
        std::sort(release.begin(), release.end());
        std::sort(deadline.begin(), deadline.end());
        break;
      case Family::Gap: break;
    }
    bool degenerate = false;
    for (std::size_t j = 0; j < n; ++j) degenerate = degenerate || release[j] >= deadline[j];
    if (degenerate) continue;

    Instance instance{{}, spec.m, spec.alpha};
    for (std::size_t j = 0; j < n; ++j) {
      const Rational work = spec.work_min + work_step * uniform(0, 100);
      instance.jobs.push_back({"J" + std::to_string(j + 1), work, tick * release[j], tick * deadline[j]});
    }
    validate(instance);
    if (in_family(classify(instance), spec.family)) return instance;
  }
  throw Error(ErrorKind::GenerationFailure, "could not sample a " + std::string(to_string(spec.family)) + " instance");
}

}  // namespace speedscale
