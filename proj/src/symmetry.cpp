#include "eqod/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eqod/error.hpp"
#include "eqod/fft.hpp"
#include "eqod/sparse.hpp"
#include "eqod/spectral.hpp"

namespace eqod {

namespace {

using cplx = std::complex<double>;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Symbol estimate on a contiguous block of time rows.
SymbolEstimate estimate_rows(const Field& u, Eigen::Index row0, Eigen::Index rows, double dt,
                             double length) {
  require(rows >= 6, "symbol estimate needs at least 6 time samples");
  const int nx = static_cast<int>(u.cols());
  const SpectralWorkspace ws(nx, length);
  const auto half = static_cast<std::size_t>(ws.fft().spectrum_size());

  std::vector<std::vector<cplx>> spec(static_cast<std::size_t>(rows));
  for (Eigen::Index i = 0; i < rows; ++i)
    spec[static_cast<std::size_t>(i)] =
        ws.fft().forward(std::span<const double>(u.row(row0 + i).data(), static_cast<std::size_t>(nx)));

  SymbolEstimate est;
  est.k.resize(half);
  est.sigma.assign(half, cplx{});
  est.power.assign(half, 0.0);
  est.reliable.assign(half, false);
  for (std::size_t n = 0; n < half; ++n) est.k[n] = std::abs(ws.half_wavenumbers()[n]);

  std::vector<cplx> num(half);
  for (Eigen::Index i = 2; i < rows - 2; ++i) {
    const auto& prev = spec[static_cast<std::size_t>(i - 1)];
    const auto& cur = spec[static_cast<std::size_t>(i)];
    const auto& next = spec[static_cast<std::size_t>(i + 1)];
    for (std::size_t n = 0; n < half; ++n) {
      const cplx ut = (next[n] - prev[n]) / (2.0 * dt);
      num[n] += std::conj(cur[n]) * ut;
      est.power[n] += std::norm(cur[n]);
    }
  }
  double max_power = 0.0;
  for (std::size_t n = 1; n < half; ++n) max_power = std::max(max_power, est.power[n]);
  bool any = false;
  for (std::size_t n = 0; n < half; ++n) {
    if (est.power[n] > 0.0) est.sigma[n] = num[n] / est.power[n];
    est.reliable[n] = est.k[n] > 0.5 && max_power > 0.0 && est.power[n] > 0.01 * max_power;
    any = any || est.reliable[n];
  }
  require(any, "symbol estimate: no reliable Fourier modes");
  return est;
}

double energy(const Field& u, Eigen::Index row0, Eigen::Index rows) {
  return u.middleRows(row0, rows).squaredNorm();
}

double median(std::vector<double> v) {
  require(!v.empty(), "median of empty set");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double rel_diff(double a, double b) {
  const double den = std::max(std::abs(a), std::abs(b));
  return den > 0.0 ? std::abs(a - b) / den : 0.0;
}

Field shifted(const Field& u, int s) {
  const Eigen::Index nx = u.cols();
  Field out(u.rows(), nx);
  for (Eigen::Index j = 0; j < nx; ++j) out.col(j) = u.col((j + s) % nx);
  return out;
}

}  // namespace

bool Detection::valid() const { return std::isfinite(score); }

SymbolEstimate estimate_symbol(const Trajectory& traj) {
  const Grid1D& g = traj.grid();
  return estimate_rows(traj.values(), 0, g.nt, g.dt(), g.length);
}

Detection detect_spatial_translation(const Trajectory& traj, const SymmetryThresholds& th) {
  const Grid1D& g = traj.grid();
  require(g.nx % 8 == 0, "spatial translation test needs nx divisible by 8");
  const SymbolEstimate base = estimate_symbol(traj);
  double score = 0.0;
  for (int s : {g.nx / 8, g.nx / 4, static_cast<int>(std::lround(g.nx / 3.0))}) {
    const Field u = shifted(traj.values(), s);
    const SymbolEstimate e = estimate_rows(u, 0, g.nt, g.dt(), g.length);
    for (std::size_t n = 0; n < base.k.size(); ++n) {
      if (!base.reliable[n]) continue;
      const double den = std::max(std::abs(base.sigma[n]), 1e-300);
      score = std::max(score, std::abs(e.sigma[n] - base.sigma[n]) / den);
    }
  }
  return {score < th.spatial, score};
}

Detection detect_temporal_translation(const Trajectory& traj, const SymmetryThresholds& th) {
  const Grid1D& g = traj.grid();
  require(g.nt >= 12, "temporal translation test needs nt >= 12");
  const Field& u = traj.values();
  Eigen::Index w = g.nt;
  {
    const Eigen::Index h = w / 2;
    if (energy(u, h, w - h) < 1e-3 * energy(u, 0, h)) {
      // Strongly dissipative data: shrink the analysed span toward t_start
      // until the later window still holds a tenth of the energy.
      Eigen::Index chosen = 12;
      for (Eigen::Index cand = g.nt; cand >= 12; --cand) {
        const Eigen::Index hc = cand / 2;
        const double e1 = energy(u, 0, hc), e2 = energy(u, hc, cand - hc);
        if (e2 >= 0.1 * (e1 + e2)) {
          chosen = cand;
          break;
        }
      }
      w = chosen;
    }
  }
  const Eigen::Index h = w / 2;
  const SymbolEstimate a = estimate_rows(u, 0, h, g.dt(), g.length);
  const SymbolEstimate b = estimate_rows(u, h, w - h, g.dt(), g.length);
  std::vector<double> d;
  for (std::size_t n = 0; n < a.k.size(); ++n)
    if (a.reliable[n] && b.reliable[n]) d.push_back(rel_diff(a.sigma[n].real(), b.sigma[n].real()));
  require(!d.empty(), "temporal translation test: no mode reliable in both windows");
  const double score = median(std::move(d));
  return {score < th.temporal, score};
}

Detection detect_scaling(const Trajectory& traj, const SymmetryThresholds& th, double* slope) {
  const SymbolEstimate e = estimate_symbol(traj);
  double max_power = 0.0;
  for (std::size_t n = 1; n < e.k.size(); ++n) max_power = std::max(max_power, e.power[n]);
  std::vector<double> x, y, w;
  for (std::size_t n = 1; n < e.k.size(); ++n) {
    const double re = std::abs(e.sigma[n].real());
    if (e.reliable[n] && e.power[n] > 0.05 * max_power && re > 1e-10) {
      x.push_back(std::log(e.k[n]));
      y.push_back(std::log(re));
      w.push_back(e.power[n]);
    }
  }
  if (x.size() < 3) return {false, 0.0};
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
    syy += w[i] * (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) return {false, 0.0};
  const double s = sxy / sxx;
  if (slope) *slope = s;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + s * (x[i] - mx));
    ss_res += w[i] * r * r;
  }
  const double r2 = syy > 0.0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
  return {r2 > th.scaling_r2, r2};
}

ReflectionResult detect_reflection(const Trajectory& traj, const SymmetryThresholds& th) {
  const Field& u = traj.values();
  const double norm2 = u.squaredNorm();
  require(norm2 > 0.0, "reflection test needs a nonzero field");
  const Eigen::Index nx = u.cols();
  double minus = 0.0, plus = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index j = 0; j < nx; ++j) {
      const double f = u(i, (nx - j) % nx);
      minus += (u(i, j) - f) * (u(i, j) - f);
      plus += (u(i, j) + f) * (u(i, j) + f);
    }
  }
  const double even = minus / norm2, odd = plus / norm2;
  return {{even < th.reflection, even}, {odd < th.reflection, odd}};
}

LibrarySpec galilean_test_basis() {
  using namespace terms;
  return {{u_u_x, u_xx, u_xxx, u, u2, u3}, LibraryProvenance::custom};
}

GalileanResult detect_galilean(const TrajectorySet& trajset, const SymmetryThresholds& th) {
  const TestGrid tg = make_test_grid(trajset.grid(), th.galilean_nt, th.galilean_nx);
  const WeakSystem sys = assemble(trajset, galilean_test_basis(), tg);
  const NormalizedSystem ns = normalize(sys.theta, sys.b);
  GalileanResult res;
  const double b2 = sys.b.squaredNorm();
  if (b2 == 0.0) return res;
  const auto cod = ns.theta.completeOrthogonalDecomposition();
  res.rank_deficient = cod.rank() < ns.theta.cols();
  const Eigen::VectorXd cn = cod.solve(sys.b);
  res.c1 = ns.col_norms(0) > 0.0 ? cn(0) / ns.col_norms(0) : 0.0;
  res.energy_fraction = (res.c1 * sys.theta.col(0)).squaredNorm() / b2;
  res.detected = res.energy_fraction > th.galilean_tau && std::abs(res.c1) > th.galilean_tau;
  return res;
}

namespace {

template <class F>
Detection worst_case(const TrajectorySet& set, const char* name, bool higher_is_worse, F&& run,
                     std::vector<std::string>& notes) {
  Detection out{true, 0.0};
  bool failed = false, first = true;
  for (std::size_t m = 0; m < set.size(); ++m) {
    try {
      const Detection d = run(set[m]);
      out.detected = out.detected && d.detected;
      if (first) out.score = d.score;
      else out.score = higher_is_worse ? std::max(out.score, d.score) : std::min(out.score, d.score);
      first = false;
    } catch (const std::exception& e) {
      failed = true;
      notes.push_back(std::string(name) + " (trajectory " + std::to_string(m) + "): " + e.what());
    }
  }
  if (failed) out = Detection{false, kNaN};
  return out;
}

}  // namespace

SymmetryReport detect_all(const TrajectorySet& trajset, const SymmetryThresholds& th) {
  SymmetryReport r;
  r.spatial_translation = worst_case(
      trajset, "spatial_translation", true, [&](const Trajectory& t) { return detect_spatial_translation(t, th); },
      r.notes);
  r.temporal_translation = worst_case(
      trajset, "temporal_translation", true, [&](const Trajectory& t) { return detect_temporal_translation(t, th); },
      r.notes);
  r.scaling = worst_case(
      trajset, "scaling", false, [&](const Trajectory& t) { return detect_scaling(t, th); }, r.notes);
  r.reflection_even = worst_case(
      trajset, "reflection_even", true, [&](const Trajectory& t) { return detect_reflection(t, th).even; },
      r.notes);
  r.reflection_odd = worst_case(
      trajset, "reflection_odd", true, [&](const Trajectory& t) { return detect_reflection(t, th).odd; },
      r.notes);
  try {
    r.galilean = detect_galilean(trajset, th);
  } catch (const std::exception& e) {
    r.galilean = GalileanResult{false, kNaN, kNaN, false};
    r.notes.push_back(std::string("galilean: ") + e.what());
  }
  return r;
}

}  // namespace eqod
