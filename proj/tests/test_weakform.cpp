#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "eqod/error.hpp"
#include "eqod/oplib.hpp"
#include "eqod/solvers.hpp"
#include "eqod/weakform.hpp"
#include "oracles.hpp"

using namespace eqod;

namespace {

constexpr double kPi = std::numbers::pi;
using oracle::Analytic;

Trajectory sample(const Grid1D& g) { return oracle::sample_analytic(g); }

}  // namespace

TEST(Bump, ShapeAndDerivative) {
  EXPECT_NEAR(bump(0.0), std::exp(-1.0), 1e-15);
  EXPECT_EQ(bump(1.0), 0.0);
  EXPECT_EQ(bump(-1.5), 0.0);
  EXPECT_NEAR(bump(0.3), bump(-0.3), 1e-15);
  for (double r : {-0.9, -0.5, 0.0, 0.2, 0.7, 0.95}) {
    const double h = 1e-6;
    EXPECT_NEAR(bump_derivative(r), (bump(r + h) - bump(r - h)) / (2 * h), 1e-6);
  }
}

TEST(TestGrid, MarginsAndRadii) {
  const Grid1D g{0.0, 2 * kPi, 128, 0.0, 1.0, 128};
  const TestGrid tg = make_test_grid(g, 5, 7);
  EXPECT_EQ(tg.size(), 35u);
  EXPECT_NEAR(tg.r_t, 0.18, 1e-12);
  EXPECT_NEAR(tg.r_x, 0.2 * 2 * kPi, 1e-12);
  const double x_max = (g.nx - 1) * g.dx();
  for (double c : tg.t_centers) {
    EXPECT_GE(c - 1.05 * tg.r_t, -1e-12);
    EXPECT_LE(c + 1.05 * tg.r_t, 1.0 + 1e-12);
  }
  for (double c : tg.x_centers) {
    EXPECT_GE(c - 1.05 * tg.r_x, -1e-12);
    EXPECT_LE(c + 1.05 * tg.r_x, x_max + 1e-12);
  }
  const Grid1D small{0.0, 2 * kPi, 16, 0.0, 1.0, 16};
  EXPECT_THROW(make_test_grid(small, 5, 7), Error);
}

// Stage-3 integrals on a 128x128 grid against a 4x-refined direct quadrature of
// the closed-form integrands.
TEST(Assemble, QuadratureMatchesRefinedOracle) {
  const Grid1D g{0.0, 2 * kPi, 128, 0.0, 1.0, 128};
  const oracle::QuadratureErrors e = oracle::quadrature_vs_refined(g);
  EXPECT_LT(e.u, 1e-3);
  EXPECT_LT(e.u_xx, 1e-3);
  EXPECT_LT(e.u_u_x, 1e-3);
  EXPECT_LT(e.b, 1e-3);
}

// On exact Heat data the true coefficients satisfy the weak system up to the
// time quadrature of phi_t.
TEST(Assemble, HeatResidualVanishes) {
  const Grid1D g = default_grid(Pde::heat);
  const auto set = generate_set(pde_spec(Pde::heat), g, 2, 0.0, 42);
  const LibrarySpec lib = standard_library();
  const WeakSystem sys = assemble(set, lib, make_test_grid(g, 5, 7));
  EXPECT_EQ(sys.rows(), 70);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(10);
  c(*lib.index_of(terms::u_xx)) = 0.1;
  EXPECT_LT((sys.theta * c - sys.b).norm() / sys.b.norm(), 1e-3);
  EXPECT_EQ(sys.row_meta.front().trajectory, 0);
  EXPECT_EQ(sys.row_meta.back().trajectory, 1);
}

TEST(Assemble, RestrictionSharesRows) {
  const Grid1D g = default_grid(Pde::burgers);
  const auto set = generate_set(pde_spec(Pde::burgers), g, 1, 0.0, 42);
  const WeakSystem full = assemble(set, standard_library(), make_test_grid(g, 5, 7));
  const LibrarySpec g7 = galilean_reduced();
  const WeakSystem sub = full.restricted_to(g7);
  const WeakSystem direct = assemble(set, g7, make_test_grid(g, 5, 7));
  EXPECT_EQ(sub.b, full.b);
  EXPECT_LT((sub.theta - direct.theta).norm(), 1e-12 * direct.theta.norm());
  EXPECT_THROW(sub.restricted_to(standard_library()), Error);
  std::ostringstream csv;
  sub.write_csv(csv);
  EXPECT_NE(csv.str().find("u*u_x"), std::string::npos);
}

TEST(Library, SizesAndProvenance) {
  EXPECT_EQ(standard_library().size(), 10u);
  EXPECT_EQ(galilean_reduced().size(), 7u);
  const LibrarySpec odd = odd_reflection_prune(galilean_reduced());
  EXPECT_EQ(odd.size(), 6u);
  EXPECT_EQ(odd.provenance(), LibraryProvenance::galilean_odd);
  EXPECT_FALSE(odd.contains(terms::u_u_xx));
  for (const Term& t : {terms::u, terms::u2, terms::u3}) EXPECT_FALSE(galilean_reduced().contains(t));
  for (int n : {10, 15, 20, 25, 30}) {
    const LibrarySpec e = expanded_library(n);
    EXPECT_EQ(e.size(), static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < 10; ++j) EXPECT_EQ(e[j], standard_library()[j]);
  }
  EXPECT_THROW(expanded_library(31), Error);
  EXPECT_THROW(LibrarySpec({terms::u, terms::u}, LibraryProvenance::custom), Error);
  EXPECT_THROW(LibrarySpec({}, LibraryProvenance::custom), Error);
}

TEST(Library, TermEvaluationOnTrigField) {
  const Grid1D g{0.0, 2 * kPi, 64, 0.0, 1.0, 20};
  const Trajectory tr = sample(g);
  Analytic a;
  const Field uux = evaluate_term(tr, terms::u_u_x);
  const Field u2ux = evaluate_term(tr, terms::u2_u_x);
  for (int i = 0; i < g.nt; i += 5)
    for (int j = 0; j < g.nx; j += 7) {
      const double u = a.u(g.x(j), g.t(i)), ux = a.ux(g.x(j), g.t(i));
      EXPECT_NEAR(uux(i, j), u * ux, 1e-11);
      EXPECT_NEAR(u2ux(i, j), u * u * ux, 1e-11);
    }
}

TEST(Library, NestedReductionsContainTrueSupports) {
  const auto subset = [](const LibrarySpec& a, const LibrarySpec& b) {
    for (const Term& t : a.terms())
      if (!b.contains(t)) return false;
    return true;
  };
  const LibrarySpec g7 = galilean_reduced(), g6 = odd_reflection_prune(g7);
  EXPECT_TRUE(subset(g6, g7));
  EXPECT_TRUE(subset(g7, standard_library()));
  for (Pde p : all_pdes()) {
    const PdeSpec s = pde_spec(p);
    for (const Term& t : s.true_support()) {
      EXPECT_TRUE(standard_library().contains(t)) << s.name;
      if (s.galilean) {
        EXPECT_TRUE(g7.contains(t)) << s.name << ' ' << t.name();
      }
    }
  }
}

TEST(Library, TermHomogeneityDegree) {
  const Grid1D g{0.0, 2 * kPi, 64, 0.0, 1.0, 12};
  const Trajectory tr = sample(g);
  const Trajectory tr2(g, 2.0 * tr.values());
  for (const Term& t : standard_terms()) {
    const int degree = t.power();
    const Field a = evaluate_term(tr, t), b = evaluate_term(tr2, t);
    EXPECT_LT((b - std::pow(2.0, degree) * a).cwiseAbs().maxCoeff(), 1e-10 * (1 + a.cwiseAbs().maxCoeff())) << t.name();
  }
}

TEST(Assemble, LinearInDataAndZeroAwayFromSupport) {
  const Grid1D g{0.0, 2 * kPi, 128, 0.0, 1.0, 64};
  const TrajectorySet one({sample(g)});
  const TrajectorySet twice({Trajectory(g, 2.0 * sample(g).values())});
  const LibrarySpec lib({terms::u, terms::u_xx}, LibraryProvenance::custom);
  const TestGrid tg = make_test_grid(g, 5, 7);
  const WeakSystem a = assemble(one, lib, tg), b = assemble(twice, lib, tg);
  EXPECT_LT((b.b - 2.0 * a.b).norm(), 1e-12 * a.b.norm());
  EXPECT_LT((b.theta - 2.0 * a.theta).norm(), 1e-12 * a.theta.norm());

  // Data supported in x < 1 only reaches rows whose bumps overlap it.
  Field f = Field::Zero(g.nt, g.nx);
  for (int i = 0; i < g.nt; ++i)
    for (int j = 0; j < g.nx; ++j)
      if (g.x(j) < 1.0) f(i, j) = std::sin(g.x(j) * kPi) * (1 + g.t(i));
  const WeakSystem local = assemble(TrajectorySet({Trajectory(g, f)}), lib, tg);
  for (Eigen::Index row = 0; row < local.rows(); ++row)
    if (local.row_meta[row].x_center - tg.r_x > 1.0) {
      EXPECT_EQ(local.b(row), 0.0);
      EXPECT_EQ(local.theta(row, 0), 0.0);
    }
}

// Weak-form consistency on clean data for every benchmark equation. The
// dispersive KdV-Burgers modes are under-resolved in time at nt = 128 (3.5e-2
// there), so that case is checked on a finer time grid.
TEST(Assemble, TrueCoefficientsFitCleanData) {
  for (Pde p : all_pdes()) {
    const PdeSpec spec = pde_spec(p);
    const Grid1D g = default_grid(p, 128, p == Pde::kdv_burgers ? 1024 : 128);
    const auto set = generate_clean_set(spec, g, 1, 42);
    const WeakSystem sys = assemble(set, standard_library(), make_test_grid(g, 5, 7));
    Eigen::VectorXd c(10);
    for (int j = 0; j < 10; ++j) c(j) = spec.true_coeffs.get(standard_library()[j]);
    EXPECT_LT((sys.b - sys.theta * c).norm() / sys.b.norm(), 1e-2) << spec.name;
  }
}
