#include "eqod/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "eqod/error.hpp"
#include "eqod/spectral.hpp"

namespace eqod {

namespace {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

constexpr double kPi = std::numbers::pi;

PdeSpec make_spec(Pde pde) {
  using namespace terms;
  auto coeffs = [](std::initializer_list<std::pair<Term, double>> entries) {
    auto c = CoefficientVector::zeros(standard_terms());
    for (const auto& [t, v] : entries) c.set(t, v);
    return c;
  };
  const double two_pi = 2.0 * kPi;
  switch (pde) {
    case Pde::heat:
      return {pde, "heat", "Heat", coeffs({{u_xx, 0.1}}), two_pi, 1.0, 0.0, false, false};
    case Pde::burgers:
      return {pde, "burgers", "Burgers", coeffs({{u_u_x, -1.0}, {u_xx, 0.1}}), two_pi, 1.0, 0.0,
              false, true};
    case Pde::kdv:
      return {pde, "kdv", "KdV", coeffs({{u_u_x, -1.0}, {u_xxx, -1.0}}), two_pi, 0.05, 0.0, false,
              true};
    case Pde::fisher_kpp:
      return {pde, "fisher-kpp", "Fisher-KPP", coeffs({{u_xx, 0.01}, {u, 1.0}, {u2, -1.0}}),
              two_pi, 2.0, 0.0, false, false};
    case Pde::adv_diff:
      return {pde, "adv-diff", "Adv-Diff", coeffs({{u_x, -1.0}, {u_xx, 0.05}}), two_pi, 1.0, 0.0,
              false, false};
    case Pde::ks:
      return {pde, "ks", "KS", coeffs({{u_u_x, -1.0}, {u_xx, -1.0}, {u_xxxx, -1.0}}), 32.0 * kPi,
              60.0, 20.0, true, true};
    case Pde::kdv_burgers:
      return {pde, "kdv-burgers", "KdV-Burgers",
              coeffs({{u_u_x, -1.0}, {u_xx, 0.05}, {u_xxx, -1.0}}), two_pi, 0.05, 0.0, false, true};
    case Pde::react_diff:
      return {pde, "react-diff", "React-Diff", coeffs({{u_xx, 0.1}, {u, 1.0}, {u3, -1.0}}), two_pi,
              2.0, 0.0, false, false};
  }
  fail("unknown PDE");
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Right-hand side in Fourier space for u_t = sum_j c_j theta_j(u). Linear
// terms (u and pure derivatives) become a diagonal multiplier; the remaining
// products are formed in physical space. The state is rfft(u) / nx.
class SpectralModel {
 public:
  SpectralModel(const PdeSpec& pde, const Grid1D& grid, bool dealias)
      : ws_(grid.nx, grid.length), nx_(grid.nx), dealias_(dealias) {
    const int half = ws_.fft().spectrum_size();
    linear_.assign(static_cast<std::size_t>(half), cplx{});
    cutoff_ = dealias ? nx_ / 3 : half;
    for (std::size_t j = 0; j < pde.true_coeffs.size(); ++j) {
      const Term& t = pde.true_coeffs.terms()[j];
      const double c = pde.true_coeffs.values()[j];
      if (c == 0.0) continue;
      if (t.power() == 1) {
        const int order = t.derivative_order();
        for (int n = 0; n < half; ++n) linear_[static_cast<std::size_t>(n)] += c * ws_.multiplier(n, order);
      } else if (t == terms::u_u_x) {
        convective_ += c;
      } else if (t == terms::u2) {
        square_ += c;
      } else if (t == terms::u3) {
        cube_ += c;
      } else {
        fail("solver: unsupported nonlinear term " + t.name());
      }
    }
    u_.resize(static_cast<std::size_t>(nx_));
    prod_.resize(static_cast<std::size_t>(nx_));
    spec_.resize(static_cast<std::size_t>(half));
  }

  const CVec& linear() const { return linear_; }
  bool has_nonlinear() const { return convective_ != 0.0 || square_ != 0.0 || cube_ != 0.0; }

  CVec to_spectral(std::span<const double> u) const {
    CVec v = ws_.fft().forward(u);
    for (auto& z : v) z /= static_cast<double>(nx_);
    return v;
  }

  std::vector<double> to_physical(const CVec& v) const {
    CVec scaled(v);
    for (auto& z : scaled) z *= static_cast<double>(nx_);
    return ws_.fft().inverse(scaled);
  }

  // out = N(v), the nonlinear part only.
  void nonlinear(const CVec& v, CVec& out) {
    out.assign(v.size(), cplx{});
    if (!has_nonlinear()) return;
    for (std::size_t n = 0; n < v.size(); ++n)
      spec_[n] = static_cast<int>(n) <= cutoff_ ? v[n] * static_cast<double>(nx_) : cplx{};
    ws_.fft().inverse(spec_, u_);
    const double inv_n = 1.0 / nx_;
    if (convective_ != 0.0) {
      // u u_x = (u^2)_x / 2 keeps the mean mode exactly conserved.
      for (int j = 0; j < nx_; ++j) prod_[static_cast<std::size_t>(j)] = u_[static_cast<std::size_t>(j)] * u_[static_cast<std::size_t>(j)];
      ws_.fft().forward(prod_, spec_);
      for (std::size_t n = 0; n < v.size(); ++n)
        out[n] += 0.5 * convective_ * ws_.multiplier(static_cast<int>(n), 1) * spec_[n] * inv_n;
    }
    if (square_ != 0.0 || cube_ != 0.0) {
      for (int j = 0; j < nx_; ++j) {
        const double w = u_[static_cast<std::size_t>(j)];
        prod_[static_cast<std::size_t>(j)] = square_ * w * w + cube_ * w * w * w;
      }
      ws_.fft().forward(prod_, spec_);
      for (std::size_t n = 0; n < v.size(); ++n) out[n] += spec_[n] * inv_n;
    }
    if (dealias_)
      for (std::size_t n = 0; n < out.size(); ++n)
        if (static_cast<int>(n) > cutoff_) out[n] = cplx{};
  }

  void rhs(const CVec& v, CVec& out) {
    nonlinear(v, out);
    for (std::size_t n = 0; n < v.size(); ++n) out[n] += linear_[n] * v[n];
  }

 private:
  SpectralWorkspace ws_;
  int nx_;
  bool dealias_;
  int cutoff_;
  CVec linear_;
  double convective_ = 0.0;
  double square_ = 0.0;
  double cube_ = 0.0;
  std::vector<double> u_;
  std::vector<double> prod_;
  CVec spec_;
};

bool all_finite(const CVec& v) {
  return std::all_of(v.begin(), v.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

[[noreturn]] void blow_up(const PdeSpec& pde, std::int64_t step, double t) {
  std::ostringstream msg;
  msg << pde.display_name << " solver produced a non-finite state at step " << step
      << ", t = " << t;
  throw Error(ErrorKind::blow_up, msg.str());
}

// Dormand-Prince 5(4) with the step-size controller of scipy's RK45.
class Dopri5 {
 public:
  Dopri5(SpectralModel& model, const SolverOptions& opt, const PdeSpec& pde)
      : model_(model), opt_(opt), pde_(pde) {}

  void advance(CVec& y, double& t, double t_target) {
    if (k_.empty()) init(y, t, t_target);
    while (t < t_target) {
      if (++steps_ > opt_.max_steps) blow_up(pde_, steps_, t);
      const double remaining = t_target - t;
      double h = std::min(h_, remaining);
      const bool last = h >= remaining * (1.0 - 1e-12);
      if (last) h = remaining;
      const double err = attempt(y, h);
      if (err <= 1.0) {
        t = last ? t_target : t + h;
        y.swap(y_new_);
        k_[0].swap(k_[6]);
        if (!all_finite(y)) blow_up(pde_, steps_, t);
        const double factor = err == 0.0 ? 10.0 : std::min(10.0, 0.9 * std::pow(err, -0.2));
        // A step clamped to land on an output time must not shrink the
        // proposal for the next interval.
        h_ = last ? std::max(h_, h * factor) : h * factor;
      } else {
        if (!std::isfinite(err) && h < 1e-14 * std::max(1.0, std::abs(t))) blow_up(pde_, steps_, t);
        h_ = h * std::max(0.2, std::isfinite(err) ? 0.9 * std::pow(err, -0.2) : 0.2);
      }
    }
  }

  std::int64_t steps() const { return steps_; }

 private:
  double scaled_rms(const CVec& a, const CVec& y0, const CVec& y1) const {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double sc = opt_.atol + opt_.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
      const double r = std::abs(a[i]) / sc;
      s += r * r;
    }
    return std::sqrt(s / static_cast<double>(a.size()));
  }

  void init(const CVec& y, double t, double t_target) {
    const std::size_t n = y.size();
    k_.assign(7, CVec(n));
    tmp_.resize(n);
    y_new_.resize(n);
    model_.rhs(y, k_[0]);
    // Initial step as in Hairer, Norsett & Wanner II.4.
    const double d0 = scaled_rms(y, y, y);
    const double d1 = scaled_rms(k_[0], y, y);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_target - t);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h0 * k_[0][i];
    CVec f1(n);
    model_.rhs(tmp_, f1);
    for (std::size_t i = 0; i < n; ++i) f1[i] -= k_[0][i];
    const double d2 = scaled_rms(f1, y, y) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    h_ = std::min(100.0 * h0, h1);
  }

  double attempt(const CVec& y, double h) {
    static constexpr double a[6][5] = {
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784},
    };
    static constexpr double b6 = 11.0 / 84;
    static constexpr double e[7] = {71.0 / 57600,      0.0,         -71.0 / 16695, 71.0 / 1920,
                                    -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
    const std::size_t n = y.size();
    for (int s = 1; s <= 5; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        cplx acc = 0.0;
        for (int j = 0; j < s; ++j) acc += a[s - 1][j] * k_[static_cast<std::size_t>(j)][i];
        tmp_[i] = y[i] + h * acc;
      }
      model_.rhs(tmp_, k_[static_cast<std::size_t>(s)]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      cplx acc = 0.0;
      for (int j = 0; j < 5; ++j) acc += a[5][j] * k_[static_cast<std::size_t>(j)][i];
      acc += b6 * k_[5][i];
      y_new_[i] = y[i] + h * acc;
    }
    model_.rhs(y_new_, k_[6]);
    for (std::size_t i = 0; i < n; ++i) {
      cplx acc = 0.0;
      for (int j = 0; j < 7; ++j) acc += e[j] * k_[static_cast<std::size_t>(j)][i];
      tmp_[i] = h * acc;
    }
    const double err = scaled_rms(tmp_, y, y_new_);
    return std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
  }

  SpectralModel& model_;
  const SolverOptions& opt_;
  const PdeSpec& pde_;
  std::vector<CVec> k_;
  CVec tmp_;
  CVec y_new_;
  double h_ = 0.0;
  std::int64_t steps_ = 0;
};

// Fixed-step ETDRK4 (Cox-Matthews with Kassam-Trefethen contour evaluation
// of the phi-function coefficients).
class Etdrk4 {
 public:
  Etdrk4(SpectralModel& model, double h, int contour_points) : model_(model), h_(h) {
    const auto& lin = model.linear();
    const std::size_t n = lin.size();
    e_.resize(n);
    e2_.resize(n);
    q_.resize(n);
    f1_.resize(n);
    f2_.resize(n);
    f3_.resize(n);
    const int m = contour_points;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx hl = h * lin[i];
      e_[i] = std::exp(hl);
      e2_[i] = std::exp(hl / 2.0);
      cplx q = 0.0, a = 0.0, b = 0.0, c = 0.0;
      for (int j = 0; j < m; ++j) {
        const cplx r = std::exp(cplx(0.0, 2.0 * kPi * (j + 0.5) / m));
        const cplx z = hl + r;
        const cplx ez = std::exp(z);
        const cplx z3 = z * z * z;
        q += (std::exp(z / 2.0) - 1.0) / z;
        a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
        b += (2.0 + z + ez * (-2.0 + z)) / z3;
        c += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
      }
      q_[i] = h * q / static_cast<double>(m);
      f1_[i] = h * a / static_cast<double>(m);
      f2_[i] = h * b / static_cast<double>(m);
      f3_[i] = h * c / static_cast<double>(m);
    }
    nv_.resize(n);
    na_.resize(n);
    nb_.resize(n);
    nc_.resize(n);
    a_.resize(n);
    b_.resize(n);
    c_.resize(n);
  }

  void step(CVec& v) {
    const std::size_t n = v.size();
    model_.nonlinear(v, nv_);
    for (std::size_t i = 0; i < n; ++i) a_[i] = e2_[i] * v[i] + q_[i] * nv_[i];
    model_.nonlinear(a_, na_);
    for (std::size_t i = 0; i < n; ++i) b_[i] = e2_[i] * v[i] + q_[i] * na_[i];
    model_.nonlinear(b_, nb_);
    for (std::size_t i = 0; i < n; ++i) c_[i] = e2_[i] * a_[i] + q_[i] * (2.0 * nb_[i] - nv_[i]);
    model_.nonlinear(c_, nc_);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = e_[i] * v[i] + nv_[i] * f1_[i] + 2.0 * (na_[i] + nb_[i]) * f2_[i] + nc_[i] * f3_[i];
  }

  double h() const { return h_; }

 private:
  SpectralModel& model_;
  double h_;
  CVec e_, e2_, q_, f1_, f2_, f3_;
  CVec nv_, na_, nb_, nc_, a_, b_, c_;
};

void store_row(Field& out, int i, const std::vector<double>& u) {
  for (std::size_t j = 0; j < u.size(); ++j) out(i, static_cast<Eigen::Index>(j)) = u[j];
}

}  // namespace

const std::vector<Pde>& all_pdes() {
  static const std::vector<Pde> kAll = {Pde::heat,     Pde::burgers, Pde::kdv,         Pde::fisher_kpp,
                                        Pde::adv_diff, Pde::ks,      Pde::kdv_burgers, Pde::react_diff};
  return kAll;
}

PdeSpec pde_spec(Pde pde) { return make_spec(pde); }

std::optional<Pde> parse_pde(std::string_view name) {
  const std::string want = lower(name);
  for (Pde p : all_pdes()) {
    const PdeSpec s = pde_spec(p);
    if (want == s.name || want == lower(s.display_name)) return p;
  }
  if (want == "kdv_burgers" || want == "kdv–burgers") return Pde::kdv_burgers;
  if (want == "fisher_kpp" || want == "fisher") return Pde::fisher_kpp;
  if (want == "adv_diff" || want == "advection-diffusion") return Pde::adv_diff;
  if (want == "react_diff" || want == "reaction-diffusion") return Pde::react_diff;
  return std::nullopt;
}

Grid1D default_grid(Pde pde, int nx, int nt) {
  const PdeSpec s = pde_spec(pde);
  Grid1D g{0.0, s.domain_length, nx, 0.0, s.t_end, nt};
  g.validate();
  return g;
}

std::vector<double> initial_condition(const PdeSpec& pde, const Grid1D& grid, RngStream& rng) {
  grid.validate();
  require(std::abs(grid.length - pde.domain_length) <= 1e-12 * pde.domain_length,
          "initial_condition: grid length does not match the " + pde.display_name + " domain");
  const auto nx = static_cast<std::size_t>(grid.nx);
  std::vector<double> u(nx);
  auto white = [&](double amp) {
    for (auto& v : u) v += amp * rng.normal();
  };
  switch (pde.pde) {
    case Pde::heat:
    case Pde::adv_diff: {
      // a_k, b_k ~ N(0, 0.25): variance 0.25.
      for (int k = 1; k <= 5; ++k) {
        const double a = 0.5 * rng.normal();
        const double b = 0.5 * rng.normal();
        for (std::size_t j = 0; j < nx; ++j) {
          const double x = grid.x(static_cast<int>(j));
          u[j] += a * std::sin(k * x) + b * std::cos(k * x);
        }
      }
      break;
    }
    case Pde::burgers:
    case Pde::kdv_burgers:
      for (std::size_t j = 0; j < nx; ++j) u[j] = -std::sin(grid.x(static_cast<int>(j)));
      white(0.03);
      break;
    case Pde::kdv:
      for (std::size_t j = 0; j < nx; ++j) {
        const double s = 1.0 / std::cosh(grid.x(static_cast<int>(j)) - kPi);
        u[j] = 12.0 * s * s;
      }
      white(0.1);
      break;
    case Pde::fisher_kpp:
      for (std::size_t j = 0; j < nx; ++j)
        u[j] = 0.5 * (1.0 + std::tanh(2.0 * (grid.x(static_cast<int>(j)) - kPi)));
      break;
    case Pde::ks:
      for (std::size_t j = 0; j < nx; ++j) {
        const double x = grid.x(static_cast<int>(j));
        u[j] = std::cos(x / 16.0) * (1.0 + std::sin(x / 16.0));
      }
      white(0.1);
      break;
    case Pde::react_diff:
      for (std::size_t j = 0; j < nx; ++j) {
        const double x = grid.x(static_cast<int>(j));
        u[j] = 0.5 * std::sin(x) + 0.3 * std::cos(2.0 * x);
      }
      white(0.1);
      break;
  }
  return u;
}

Trajectory solve(const PdeSpec& pde, std::span<const double> u0, const Grid1D& grid,
                 const SolverOptions& options) {
  grid.validate();
  require(static_cast<int>(u0.size()) == grid.nx, "solve: initial condition length != nx");
  require(grid.nx % 2 == 0, "solve: nx must be even");
  for (double v : u0) require(std::isfinite(v), "solve: non-finite initial condition");

  SpectralModel model(pde, grid, options.dealias);
  CVec v = model.to_spectral(u0);
  Field out(grid.nt, grid.nx);

  if (pde.stiff) {
    const double span = grid.t_end - grid.t_start;
    const double interval = span / (grid.nt - 1);
    const int target = std::max(1, options.etdrk4_steps);
    const int sub = std::max(1, static_cast<int>(std::ceil(target / static_cast<double>(grid.nt - 1))));
    const double h_nominal = span / target;
    std::int64_t step_count = 0;
    if (pde.transient > 0.0) {
      const int n_transient = std::max(1, static_cast<int>(std::ceil(pde.transient / h_nominal)));
      Etdrk4 warm(model, pde.transient / n_transient, options.etdrk4_contour_points);
      for (int s = 0; s < n_transient; ++s) {
        warm.step(v);
        ++step_count;
        if (!all_finite(v)) blow_up(pde, step_count, grid.t_start - pde.transient + (s + 1) * warm.h());
      }
    }
    Etdrk4 stepper(model, interval / sub, options.etdrk4_contour_points);
    store_row(out, 0, model.to_physical(v));
    for (int i = 1; i < grid.nt; ++i) {
      for (int s = 0; s < sub; ++s) {
        stepper.step(v);
        ++step_count;
        if (!all_finite(v)) blow_up(pde, step_count, grid.t(i - 1) + (s + 1) * stepper.h());
      }
      store_row(out, i, model.to_physical(v));
    }
  } else {
    Dopri5 rk(model, options, pde);
    double t = grid.t_start;
    if (pde.transient > 0.0) {
      double tw = grid.t_start - pde.transient;
      rk.advance(v, tw, grid.t_start);
    }
    store_row(out, 0, model.to_physical(v));
    for (int i = 1; i < grid.nt; ++i) {
      rk.advance(v, t, grid.t(i));
      store_row(out, i, model.to_physical(v));
    }
  }
  if (!out.allFinite()) blow_up(pde, -1, grid.t_end);
  return Trajectory(grid, std::move(out));
}

Trajectory add_noise(const Trajectory& traj, double sigma, RngStream& rng) {
  require(sigma >= 0.0 && std::isfinite(sigma), "add_noise: sigma must be >= 0");
  if (sigma == 0.0) return traj;
  const Field& u = traj.values();
  const double n = static_cast<double>(u.size());
  const double mean = u.sum() / n;
  const double var = (u.array() - mean).square().sum() / n;
  const double amp = sigma * std::sqrt(var);
  Field noisy = u;
  for (Eigen::Index i = 0; i < noisy.rows(); ++i)
    for (Eigen::Index j = 0; j < noisy.cols(); ++j) noisy(i, j) += amp * rng.normal();
  return Trajectory(traj.grid(), std::move(noisy));
}

TrajectorySet generate_clean_set(const PdeSpec& pde, const Grid1D& grid, int M, std::uint64_t seed,
                                 const SolverOptions& options) {
  require(M >= 1, "generate_set: M must be >= 1");
  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    RngStream ic_rng(seed, static_cast<std::uint64_t>(m));
    const auto u0 = initial_condition(pde, grid, ic_rng);
    out.push_back(solve(pde, u0, grid, options));
  }
  return TrajectorySet(std::move(out));
}

TrajectorySet add_noise(const TrajectorySet& clean, double sigma, std::uint64_t seed) {
  std::vector<Trajectory> out;
  out.reserve(clean.size());
  for (std::size_t m = 0; m < clean.size(); ++m) {
    RngStream noise_rng(seed + 1000, m);
    out.push_back(add_noise(clean[m], sigma, noise_rng));
  }
  return TrajectorySet(std::move(out));
}

TrajectorySet generate_set(const PdeSpec& pde, const Grid1D& grid, int M, double sigma,
                           std::uint64_t seed, const SolverOptions& options) {
  return add_noise(generate_clean_set(pde, grid, M, seed, options), sigma, seed);
}

}  // namespace eqod
