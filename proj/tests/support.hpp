#pragma once

#include <speedscale/model.hpp>
#include <speedscale/rational.hpp>

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>

namespace speedscale::testing {

inline Rational q(const char* text) { return *parse_rational(text); }
inline Rational q(int p, int d = 1) { return ratio(p, d); }

inline Job job(std::string id, Rational w, Rational r, Rational d) { return {std::move(id), w, r, d}; }

inline Instance make(std::initializer_list<Job> jobs, int machines = 1, double alpha = 3.0) {
  return Instance{std::vector<Job>(jobs), machines, alpha};
}

inline bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

// Arbitrary windows on a 0..40 grid (halves allowed), no family structure.
inline Instance random_instance(std::uint64_t seed, int max_n, int max_m, double alpha) {
  std::mt19937_64 rng(seed);
  auto pick = [&rng](long lo, long hi) { return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
  Instance instance;
  instance.machines = static_cast<int>(pick(1, max_m));
  instance.alpha = alpha;
  const long n = pick(1, max_n);
  for (long j = 0; j < n; ++j) {
    const long r = pick(0, 70);
    const long len = pick(1, 20);
    const long w = pick(1, 40);
    instance.jobs.push_back({"J" + std::to_string(j + 1), ratio(w, 4), ratio(r, 2), ratio(r + len, 2)});
  }
  return instance;
}

}  // namespace speedscale::testing
