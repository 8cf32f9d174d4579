#include "eqod/stability.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <thread>

#include "eqod/error.hpp"
#include "eqod/rng.hpp"
#include "eqod/sparse.hpp"

namespace eqod {

StabilityResult stability_select(const Eigen::MatrixXd& theta, const Eigen::VectorXd& b,
                                 const StabilityConfig& config, std::uint64_t seed) {
  require(config.B >= 1, "stability: B must be >= 1");
  require(config.pi_threshold > 0.0 && config.pi_threshold < 1.0, "stability: threshold must be in (0, 1)");
  require(config.weight_lo > 0.0 && config.weight_hi >= config.weight_lo, "stability: bad weight range");
  const Eigen::Index n = theta.rows(), p = theta.cols();
  require(n >= 4, "stability: need at least 4 rows");
  require(b.size() == n, "stability: row count mismatch");

  const NormalizedSystem ns = normalize(theta, b);
  const Eigen::Index half = n / 2;
  std::vector<std::vector<char>> selected(static_cast<std::size_t>(config.B),
                                          std::vector<char>(static_cast<std::size_t>(p), 0));

  auto run = [&](int it) {
    RngStream rng(seed, streams::stability_base + static_cast<std::uint64_t>(it));
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    rng.shuffle(rows);
    rows.resize(static_cast<std::size_t>(half));
    std::sort(rows.begin(), rows.end());
    Eigen::VectorXd w(p);
    for (Eigen::Index j = 0; j < p; ++j) w(j) = rng.uniform(config.weight_lo, config.weight_hi);

    Eigen::MatrixXd a(half, p);
    Eigen::VectorXd bb(half);
    for (Eigen::Index i = 0; i < half; ++i) {
      const Eigen::Index r = rows[static_cast<std::size_t>(i)];
      a.row(i) = ns.theta.row(r).array() / w.transpose().array();
      bb(i) = ns.b(r);
    }
    const double lam = config.per_row_penalty ? 2.0 * static_cast<double>(half) * config.lambda : config.lambda;
    const auto fit = lasso(a, bb, lam, config.coord_tol, config.max_sweeps);
    auto& sel = selected[static_cast<std::size_t>(it)];
    for (Eigen::Index j = 0; j < p; ++j) sel[static_cast<std::size_t>(j)] = std::abs(fit.xi(j)) > config.activity_eps;
  };

  const int threads = std::clamp(config.threads, 1, config.B);
  if (threads == 1) {
    for (int it = 0; it < config.B; ++it) run(it);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (int it = t; it < config.B; it += threads) run(it);
      });
    for (auto& th : pool) th.join();
  }

  StabilityResult res;
  res.pi.assign(static_cast<std::size_t>(p), 0.0);
  for (Eigen::Index j = 0; j < p; ++j) {
    int count = 0;
    for (const auto& sel : selected) count += sel[static_cast<std::size_t>(j)];
    res.pi[static_cast<std::size_t>(j)] = static_cast<double>(count) / config.B;
    if (res.pi[static_cast<std::size_t>(j)] > config.pi_threshold) res.stable.push_back(static_cast<std::size_t>(j));
  }
  return res;
}

StabilityGate stability_gate(const TrajectorySet& trajset, const LibrarySpec& base, std::uint64_t seed,
                             const StabilityConfig& config) {
  const TestGrid tg = make_test_grid(trajset.grid(), config.test_nt, config.test_nx);
  const WeakSystem sys = assemble(trajset, base, tg);
  StabilityResult sel = stability_select(sys.theta, sys.b, config, seed);
  if (sel.stable.empty()) return {base, std::move(sel), base, true};
  std::vector<Term> kept;
  for (auto j : sel.stable) kept.push_back(base[j]);
  return {LibrarySpec(std::move(kept), LibraryProvenance::stability_selected), std::move(sel), base, false};
}

void write_stability_csv(std::ostream& out, const LibrarySpec& spec, const StabilityResult& r) {
  out << "term,probability\n" << std::setprecision(6);
  for (std::size_t j = 0; j < spec.size(); ++j) out << spec[j].name() << ',' << r.pi[j] << '\n';
}

}  // namespace eqod
