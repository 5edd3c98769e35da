#include <speedscale/generators.hpp>

#include <gtest/gtest.h>

using namespace speedscale;

namespace {

GenSpec spec_for(Family f, std::uint64_t seed, int n = 12, int m = 2) {
  GenSpec spec;
  spec.family = f;
  spec.seed = seed;
  spec.n = n;
  spec.m = m;
  return spec;
}

bool same(const Instance& a, const Instance& b) {
  if (a.size() != b.size() || a.machines != b.machines || a.alpha != b.alpha) return false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const Job& x = a.jobs[j];
    const Job& y = b.jobs[j];
    if (x.id != y.id || x.work != y.work || x.release != y.release || x.deadline != y.deadline) return false;
  }
  return true;
}

}  // namespace

TEST(Generate, Deterministic) {
  for (Family f : kAllFamilies) {
    EXPECT_TRUE(same(generate(spec_for(f, 42)), generate(spec_for(f, 42)))) << to_string(f);
  }
  EXPECT_FALSE(same(generate(spec_for(Family::Clique, 1)), generate(spec_for(Family::Clique, 2))));
}

TEST(Generate, FamilySoundness) {
  for (Family f : kAllFamilies) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      const Instance inst = generate(spec_for(f, seed, 1 + static_cast<int>(seed % 30), 1 + static_cast<int>(seed % 8)));
      ASSERT_NO_THROW(validate(inst));
      EXPECT_TRUE(in_family(classify(inst), f)) << to_string(f) << " seed " << seed;
    }
  }
}

TEST(Generate, FamilyShapes) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Instance cr = generate(spec_for(Family::CommonRelease, seed));
    for (const Job& j : cr.jobs) EXPECT_EQ(j.release, 0);
    EXPECT_TRUE(classify(cr).common_release);

    const Instance ag = generate(spec_for(Family::Agreeable, seed));
    for (std::size_t j = 1; j < ag.size(); ++j) {
      EXPECT_LE(ag.jobs[j - 1].release, ag.jobs[j].release);
      EXPECT_LE(ag.jobs[j - 1].deadline, ag.jobs[j].deadline);
    }

    const Instance cl = generate(spec_for(Family::Clique, seed));
    Rational latest_release = 0, earliest_deadline = cl.jobs[0].deadline;
    for (const Job& j : cl.jobs) {
      latest_release = std::max(latest_release, Rational(j.release));
      earliest_deadline = std::min(earliest_deadline, Rational(j.deadline));
    }
    EXPECT_LE(latest_release, earliest_deadline);

    const FamilyFlags pl = classify(generate(spec_for(Family::PureLaminar, seed)));
    EXPECT_TRUE(pl.pure_laminar && pl.laminar && pl.clique);
  }
}

TEST(Generate, WorksStayInRange) {
  GenSpec spec = spec_for(Family::CommonDeadline, 3, 30);
  spec.work_min = ratio(1, 2);
  spec.work_max = Rational(2);
  for (const Job& j : generate(spec).jobs) {
    EXPECT_GE(j.work, spec.work_min);
    EXPECT_LE(j.work, spec.work_max);
  }
}

TEST(Generate, GapFamilyUsesGapSize) {
  GenSpec spec = spec_for(Family::Gap, 0);
  spec.gap_n = 7;
  const Instance inst = generate(spec);
  EXPECT_EQ(inst.size(), 7u);
  EXPECT_EQ(inst.machines, 1);
}

TEST(Generate, RejectsBadSpec) {
  GenSpec spec = spec_for(Family::Clique, 0, 0);
  EXPECT_THROW(generate(spec), Error);
  spec = spec_for(Family::Clique, 0);
  spec.work_min = 0;
  EXPECT_THROW(generate(spec), Error);
}

TEST(Families, NamesRoundTrip) {
  for (Family f : kAllFamilies) EXPECT_EQ(parse_family(to_string(f)), f);
  EXPECT_FALSE(parse_family("Nope"));
}
