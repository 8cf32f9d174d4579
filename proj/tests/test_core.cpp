#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <numeric>
#include <set>

#include "eqod/core.hpp"
#include "eqod/error.hpp"
#include "eqod/rng.hpp"
#include "eqod/terms.hpp"
#include "oracles.hpp"

using namespace eqod;

TEST(Term, NamesRoundTrip) {
  for (const auto& t : standard_terms()) {
    auto back = Term::parse(t.name());
    ASSERT_TRUE(back.has_value()) << t.name();
    EXPECT_EQ(*back, t);
  }
  EXPECT_EQ(terms::u_u_x.name(), "u*u_x");
  EXPECT_EQ(terms::u2_u_x.name(), "u^2*u_x");
  EXPECT_FALSE(Term::parse("u_y").has_value());
  EXPECT_FALSE(Term::parse("").has_value());
}

TEST(Term, StandardLibraryIsTenDistinct) {
  const auto& s = standard_terms();
  EXPECT_EQ(s.size(), 10u);
  EXPECT_EQ(std::set<Term>(s.begin(), s.end()).size(), 10u);
}

TEST(Grid, Validation) {
  Grid1D g{0.0, 2 * M_PI, 64, 0.0, 1.0, 64};
  EXPECT_NO_THROW(g.validate());
  g.nx = 4;
  EXPECT_THROW(g.validate(), Error);
  g = Grid1D{0.0, -1.0, 64, 0.0, 1.0, 64};
  EXPECT_THROW(g.validate(), Error);
  g = Grid1D{0.0, 1.0, 64, 1.0, 1.0, 64};
  EXPECT_THROW(g.validate(), Error);
}

TEST(Trajectory, RejectsShapeMismatchAndNaN) {
  Grid1D g{0.0, 1.0, 16, 0.0, 1.0, 16};
  EXPECT_THROW(Trajectory(g, Field::Zero(15, 16)), Error);
  Field f = Field::Zero(16, 16);
  f(3, 3) = std::nan("");
  EXPECT_THROW(Trajectory(g, f), Error);
  Grid1D h = g;
  h.nx = 32;
  EXPECT_THROW(TrajectorySet({Trajectory(g, Field::Zero(16, 16)), Trajectory(h, Field::Zero(16, 32))}), Error);
}

// Oracle: popcount arithmetic on 10-bit masks, independent of std::set logic.
TEST(F1, BruteForceAgreesWithBitmaskOracle) {
  const auto& lib = standard_terms();
  for (unsigned truth_mask : {0b0000010000u, 0b0010010000u, 0b1000000111u, 0b0110001000u}) {
    SupportSet truth;
    for (int j = 0; j < 10; ++j)
      if (truth_mask >> j & 1u) truth.insert(lib[j]);
    for (unsigned pred_mask = 0; pred_mask < 1024; ++pred_mask) {
      SupportSet pred;
      for (int j = 0; j < 10; ++j)
        if (pred_mask >> j & 1u) pred.insert(lib[j]);
      const oracle::MaskScore m = oracle::mask_f1(pred_mask, truth_mask);
      const F1Score s = f1_score(pred, truth);
      ASSERT_NEAR(s.precision, m.precision, 1e-15);
      ASSERT_NEAR(s.recall, m.recall, 1e-15);
      ASSERT_NEAR(s.f1, m.f1, 1e-15) << pred_mask;
    }
  }
}

TEST(F1, EmptyTruthRejected) { EXPECT_THROW(f1_score({terms::u}, {}), Error); }

TEST(Coefficients, ErrorAveragesOverTenTerms) {
  CoefficientVector truth({terms::u_u_x, terms::u_xx}, {-1.0, 0.1});
  CoefficientVector est({terms::u_u_x, terms::u_xx, terms::u}, {-0.9, 0.1, 0.2});
  EXPECT_NEAR(coefficient_error(est, truth), (0.1 + 0.2) / 10.0, 1e-15);
  EXPECT_EQ(support_from_coeffs(est, 1e-3).size(), 3u);
  EXPECT_DOUBLE_EQ(est.expressed_over(standard_terms()).get(terms::u), 0.2);
}

TEST(Rng, SameSeedAndStreamReproduces) {
  RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::vector<std::uint64_t> va, vb, vc, vd;
  for (int i = 0; i < 100; ++i) {
    va.push_back(a.next_u64());
    vb.push_back(b.next_u64());
    vc.push_back(c.next_u64());
    vd.push_back(d.next_u64());
  }
  EXPECT_EQ(va, vb);
  EXPECT_NE(va, vc);
  EXPECT_NE(va, vd);
}

TEST(Rng, MomentsAndRanges) {
  RngStream r(1, 0);
  const int n = 200000;
  double s = 0, s2 = 0, umin = 1, umax = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
    const double u = r.uniform(0.5, 1.0);
    umin = std::min(umin, u);
    umax = std::max(umax, u);
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
  EXPECT_GE(umin, 0.5);
  EXPECT_LT(umax, 1.0);
}

TEST(Rng, PermutationIsPermutation) {
  RngStream r(5, 3);
  auto p = r.permutation(1000);
  std::vector<std::size_t> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) ASSERT_EQ(sorted[i], i);
  std::size_t fixed = 0;
  for (std::size_t i = 0; i < p.size(); ++i) fixed += p[i] == i;
  EXPECT_LT(fixed, 10u);
}

TEST(Rng, UniformIndexIsUnbiased) {
  RngStream r(9, 9);
  std::array<int, 3> counts{};
  for (int i = 0; i < 30000; ++i) ++counts[r.uniform_index(3)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

TEST(F1, PerfectOnlyOnEqualityAndBounded) {
  const auto& lib = standard_terms();
  const SupportSet truth{lib[1], lib[4]};
  for (unsigned mask = 0; mask < 1024; ++mask) {
    SupportSet pred;
    for (int j = 0; j < 10; ++j)
      if (mask >> j & 1u) pred.insert(lib[j]);
    const double f = f1_score(pred, truth).f1;
    ASSERT_GE(f, 0.0);
    ASSERT_LE(f, 1.0);
    ASSERT_EQ(f == 1.0, pred == truth);
  }
}

TEST(Support, InvariantUnderCommonRescaling) {
  RngStream r(5, 5);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v(10);
    for (double& x : v) x = r.normal() * std::pow(10.0, r.uniform(-5, 1));
    const CoefficientVector c(standard_terms(), v);
    const double thr = std::pow(10.0, r.uniform(-4, -1));
    for (double alpha : {0.125, 3.0, 1024.0}) {
      std::vector<double> s = v;
      for (double& x : s) x *= alpha;
      EXPECT_EQ(support_from_coeffs(CoefficientVector(standard_terms(), s), thr * alpha), support_from_coeffs(c, thr));
    }
  }
}
