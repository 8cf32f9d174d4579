#include "eqod/weakform.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "eqod/error.hpp"
#include "eqod/kernels.hpp"

namespace eqod {

double bump(double r) {
  if (!(std::abs(r) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - r * r));
}

double bump_derivative(double r) {
  if (!(std::abs(r) < 1.0)) return 0.0;
  const double q = 1.0 - r * r;
  return -2.0 * r / (q * q) * bump(r);
}

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = 0.5 * (lo + hi);
    return v;
  }
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

// Smallest nt for which [t_start + 1.05 r_t, t_end - 1.05 r_t] is nonempty
// at fixed T, and likewise the smallest nx at fixed L.
int minimum_nt() {
  for (int n = 2;; ++n)
    if (2.1 * std::max(0.18, 8.0 / (n - 1)) <= 1.0) return n;
}

int minimum_nx() {
  for (int n = 2;; ++n)
    if (2.1 * std::max(0.20, 8.0 / n) <= (n - 1.0) / n) return n;
}

struct Support {
  int first = 0;
  std::vector<double> w;  // profile values on consecutive grid points
};

Support support_1d(double center, double radius, double origin, double step, int count,
                   bool derivative) {
  Support s;
  const int lo = std::max(0, static_cast<int>(std::floor((center - radius - origin) / step)));
  const int hi = std::min(count - 1, static_cast<int>(std::ceil((center + radius - origin) / step)));
  s.first = lo;
  for (int i = lo; i <= hi; ++i) {
    const double r = (origin + i * step - center) / radius;
    s.w.push_back(derivative ? bump_derivative(r) / radius : bump(r));
  }
  return s;
}

}  // namespace

TestGrid make_test_grid(const Grid1D& grid, int n_t, int n_x) {
  grid.validate();
  require(n_t >= 1 && n_x >= 1, "test grid needs at least one center per axis");
  TestGrid tg;
  const double t_range = grid.t_end - grid.t_start;
  const double x_range = grid.length;
  tg.r_t = std::max(0.18 * t_range, 8.0 * grid.dt());
  tg.r_x = std::max(0.20 * x_range, 8.0 * grid.dx());
  const double t_lo = grid.t_start + 1.05 * tg.r_t;
  const double t_hi = grid.t_end - 1.05 * tg.r_t;
  const double x_lo = grid.x0 + 1.05 * tg.r_x;
  const double x_hi = grid.x0 + (grid.nx - 1) * grid.dx() - 1.05 * tg.r_x;
  if (t_lo > t_hi || x_lo > x_hi) {
    std::ostringstream msg;
    msg << "grid " << grid.nt << "x" << grid.nx
        << " too small for test-function margins; need nt >= "
        << minimum_nt() << " and nx >= " << minimum_nx();
    fail(msg.str());
  }
  tg.t_centers = linspace(t_lo, t_hi, n_t);
  tg.x_centers = linspace(x_lo, x_hi, n_x);
  return tg;
}

WeakSystem WeakSystem::restricted_to(const LibrarySpec& sub) const {
  Eigen::MatrixXd t(rows(), static_cast<Eigen::Index>(sub.size()));
  for (std::size_t j = 0; j < sub.size(); ++j) {
    const auto idx = spec.index_of(sub[j]);
    require(idx.has_value(), "restricted_to: term " + sub[j].name() + " not in system");
    t.col(static_cast<Eigen::Index>(j)) = theta.col(static_cast<Eigen::Index>(*idx));
  }
  return WeakSystem{std::move(t), b, sub, row_meta};
}

void WeakSystem::write_csv(std::ostream& out) const {
  out << "trajectory,t_center,x_center";
  for (const auto& t : spec.terms()) out << ',' << t.name();
  out << ",b\n";
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < rows(); ++i) {
    const auto& m = row_meta[static_cast<std::size_t>(i)];
    out << m.trajectory << ',' << m.t_center << ',' << m.x_center;
    for (Eigen::Index j = 0; j < cols(); ++j) out << ',' << theta(i, j);
    out << ',' << b(i) << '\n';
  }
}

WeakSystem assemble(const TrajectorySet& trajset, const LibrarySpec& spec, const TestGrid& tg) {
  const Grid1D& g = trajset.grid();
  const double dt = g.dt(), dx = g.dx();
  require(tg.r_t >= 2.0 * dt && tg.r_x >= 2.0 * dx,
          "test-function support is degenerate (radius below two grid cells)");
  require(tg.size() > 0, "test grid has no centers");

  const auto n_t = tg.t_centers.size(), n_x = tg.x_centers.size();
  const auto per_traj = static_cast<Eigen::Index>(n_t * n_x);
  const auto n_rows = per_traj * static_cast<Eigen::Index>(trajset.size());
  const auto n_cols = static_cast<Eigen::Index>(spec.size());

  std::vector<Support> phi_t, dphi_t, phi_x;
  for (double tc : tg.t_centers) {
    phi_t.push_back(support_1d(tc, tg.r_t, g.t_start, dt, g.nt, false));
    dphi_t.push_back(support_1d(tc, tg.r_t, g.t_start, dt, g.nt, true));
  }
  for (double xc : tg.x_centers) phi_x.push_back(support_1d(xc, tg.r_x, g.x0, dx, g.nx, false));

  WeakSystem sys{Eigen::MatrixXd::Zero(n_rows, n_cols), Eigen::VectorXd::Zero(n_rows), spec, {}};
  sys.row_meta.reserve(static_cast<std::size_t>(n_rows));
  for (std::size_t m = 0; m < trajset.size(); ++m)
    for (double tc : tg.t_centers)
      for (double xc : tg.x_centers) sys.row_meta.push_back({static_cast<int>(m), tc, xc});

  const auto& k = kernels::active();
  std::vector<double> profile(static_cast<std::size_t>(g.nt));
  const double cell = dt * dx;

  // iint F phi = dt dx sum_i w_t(i) sum_j F(i, j) w_x(j): contract space
  // first for every time row, then each time profile is a dot product.
  auto contract = [&](const Field& f, auto&& store) {
    for (std::size_t cx = 0; cx < n_x; ++cx) {
      const Support& sx = phi_x[cx];
      k.matvec(f.data() + sx.first, static_cast<std::size_t>(g.nt), sx.w.size(),
               static_cast<std::size_t>(g.nx), sx.w.data(), profile.data());
      for (std::size_t ct = 0; ct < n_t; ++ct) store(ct, cx, profile);
    }
  };

  for (std::size_t m = 0; m < trajset.size(); ++m) {
    const Eigen::Index base = static_cast<Eigen::Index>(m) * per_traj;
    DerivativeCache cache(trajset[m]);
    contract(trajset[m].values(), [&](std::size_t ct, std::size_t cx, const std::vector<double>& p) {
      const Support& st = dphi_t[ct];
      const double v = k.dot(st.w.data(), p.data() + st.first, st.w.size());
      sys.b(base + static_cast<Eigen::Index>(ct * n_x + cx)) = -cell * v;
    });
    for (Eigen::Index j = 0; j < n_cols; ++j) {
      const Field f = cache.evaluate(spec[static_cast<std::size_t>(j)]);
      contract(f, [&](std::size_t ct, std::size_t cx, const std::vector<double>& p) {
        const Support& st = phi_t[ct];
        const double v = k.dot(st.w.data(), p.data() + st.first, st.w.size());
        sys.theta(base + static_cast<Eigen::Index>(ct * n_x + cx), j) = cell * v;
      });
    }
  }
  require(sys.theta.allFinite() && sys.b.allFinite(), "weak system has non-finite entries");
  return sys;
}

}  // namespace eqod
