#include "eqod/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

#include "eqod/error.hpp"

namespace eqod {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs task(i) for i in [0, n) on `threads` workers pulling from a shared
/// counter. The first exception is rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& task) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (first) std::rethrow_exception(first);
}

std::string join_support(const SupportSet& s) {
  std::string out;
  for (const auto& t : s) {
    if (!out.empty()) out += ';';
    out += t.name();
  }
  return out;
}

struct CleanKey {
  Pde pde;
  std::uint64_t seed;
  int M, nx, nt;
  auto operator<=>(const CleanKey&) const = default;
};

/// Solves each distinct clean set once. A solver failure is stored as the
/// error text and reported by every trial that needed the set.
class CleanCache {
 public:
  void build(const std::vector<CleanKey>& keys, const SolverOptions& solver, int threads) {
    std::vector<CleanKey> unique = keys;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    std::vector<std::optional<TrajectorySet>> sets(unique.size());
    std::vector<std::string> errors(unique.size());
    parallel_for(unique.size(), threads, [&](std::size_t i) {
      const auto& k = unique[i];
      try {
        sets[i] = generate_clean_set(pde_spec(k.pde), default_grid(k.pde, k.nx, k.nt), k.M, k.seed, solver);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < unique.size(); ++i) entries_.emplace(unique[i], Entry{std::move(sets[i]), errors[i]});
  }

  const TrajectorySet& get(const CleanKey& k) const {
    const auto& e = entries_.at(k);
    if (!e.set) throw Error(ErrorKind::blow_up, e.error);
    return *e.set;
  }

 private:
  struct Entry {
    std::optional<TrajectorySet> set;
    std::string error;
  };
  std::map<CleanKey, Entry> entries_;
};

TrialResult run_trial(const TrajectorySet& clean, Pde pde, double noise, std::uint64_t seed, Method method,
                      const PipelineConfig& config) {
  TrialResult t;
  t.pde = pde;
  t.noise = noise;
  t.method = method;
  t.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const TrajectorySet data = add_noise(clean, noise, seed);
    const IdentificationResult r =
        method == Method::eqod ? run_eqod(data, seed, config) : run_wf_lasso_baseline(data, seed, config);
    const PdeSpec spec = pde_spec(pde);
    const SupportSet support = r.support();
    const F1Score s = f1_score(support, spec.true_support());
    t.precision = s.precision;
    t.recall = s.recall;
    t.f1 = s.f1;
    t.ce = coefficient_error(r.coeffs, spec.true_coeffs);
    t.mode = r.mode;
    t.fallback = r.fallback_triggered;
    t.library_size = r.library_size;
    t.residual_ratio = r.residual_ratio;
    t.support = join_support(support);
  } catch (const std::exception& e) {
    t.precision = t.recall = t.f1 = 0.0;
    t.ce = kNaN;
    t.residual_ratio = kNaN;
    t.error = e.what();
  }
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return t;
}

auto trial_key(const TrialResult& t) { return std::make_tuple(t.pde, t.noise, t.method, t.seed); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, int count) {
  std::vector<std::uint64_t> s;
  for (int i = 0; i < count; ++i) s.push_back(first + static_cast<std::uint64_t>(i));
  return s;
}

}  // namespace

std::string_view method_name(Method m) { return m == Method::eqod ? "eqod" : "wf-lasso"; }

std::optional<Method> parse_method(std::string_view name) {
  if (name == "eqod") return Method::eqod;
  if (name == "wf-lasso" || name == "wf_lasso") return Method::wf_lasso;
  return std::nullopt;
}

void BenchmarkPlan::validate() const {
  require(!pdes.empty(), "plan: pdes must be nonempty");
  require(!noise_levels.empty(), "plan: noise_levels must be nonempty");
  require(!seeds.empty(), "plan: seeds must be nonempty");
  require(!methods.empty(), "plan: methods must be nonempty");
  require(M >= 1, "plan: M must be >= 1");
  require(nx >= 18 && nt >= 18, "plan: nx and nt must be >= 18");
  for (double s : noise_levels) require(std::isfinite(s) && s >= 0.0, "plan: noise levels must be >= 0");
}

BenchmarkResult run_benchmark(const BenchmarkPlan& plan) {
  plan.validate();
  const int threads = resolve_threads(plan.threads);
  std::vector<CleanKey> keys;
  for (Pde p : plan.pdes)
    for (auto s : plan.seeds) keys.push_back({p, s, plan.M, plan.nx, plan.nt});
  CleanCache cache;
  cache.build(keys, plan.solver, threads);

  struct Job {
    Pde pde;
    double noise;
    std::uint64_t seed;
    Method method;
  };
  std::vector<Job> jobs;
  for (Pde p : plan.pdes)
    for (double n : plan.noise_levels)
      for (auto s : plan.seeds)
        for (Method m : plan.methods) jobs.push_back({p, n, s, m});

  BenchmarkResult out;
  out.trials.resize(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    const Job& j = jobs[i];
    try {
      const auto& clean = cache.get({j.pde, j.seed, plan.M, plan.nx, plan.nt});
      out.trials[i] = run_trial(clean, j.pde, j.noise, j.seed, j.method, plan.config);
    } catch (const std::exception& e) {
      TrialResult t;
      t.pde = j.pde;
      t.noise = j.noise;
      t.method = j.method;
      t.seed = j.seed;
      t.ce = kNaN;
      t.residual_ratio = kNaN;
      t.error = e.what();
      out.trials[i] = t;
    }
  });
  std::sort(out.trials.begin(), out.trials.end(),
            [](const TrialResult& a, const TrialResult& b) { return trial_key(a) < trial_key(b); });
  out.cells = aggregate(out.trials);
  return out;
}

std::vector<CellResult> aggregate(const std::vector<TrialResult>& trials) {
  std::map<std::tuple<Pde, double, Method>, std::vector<const TrialResult*>> groups;
  for (const auto& t : trials) groups[{t.pde, t.noise, t.method}].push_back(&t);
  std::vector<CellResult> cells;
  for (const auto& [key, group] : groups) {
    CellResult c;
    std::tie(c.pde, c.noise, c.method) = key;
    c.trials = static_cast<int>(group.size());
    double f1_sum = 0.0, ce_sum = 0.0, lib_sum = 0.0;
    int ce_n = 0, ok = 0;
    for (const auto* t : group) {
      f1_sum += t->f1;
      if (std::isfinite(t->ce)) {
        ce_sum += t->ce;
        ++ce_n;
      }
      if (t->error.empty()) {
        ++c.mode_histogram[t->mode];
        lib_sum += static_cast<double>(t->library_size);
        ++ok;
      }
      if (t->fallback) ++c.fallback_count;
    }
    c.f1_mean = f1_sum / c.trials;
    if (c.trials > 1) {
      double ss = 0.0;
      for (const auto* t : group) ss += (t->f1 - c.f1_mean) * (t->f1 - c.f1_mean);
      c.f1_std = std::sqrt(ss / (c.trials - 1));
    }
    c.ce_mean = ce_n > 0 ? ce_sum / ce_n : kNaN;
    c.mean_library_size = ok > 0 ? lib_sum / ok : kNaN;
    cells.push_back(std::move(c));
  }
  return cells;
}

void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials) {
  out << "pde,noise,method,seed,precision,recall,f1,ce,mode,fallback,lib,residual_ratio,support,error\n";
  for (const auto& t : trials) {
    out << pde_spec(t.pde).name << ',' << num(t.noise) << ',' << method_name(t.method) << ',' << t.seed << ','
        << num(t.precision) << ',' << num(t.recall) << ',' << num(t.f1) << ',' << num(t.ce) << ','
        << (t.error.empty() ? std::string(mode_name(t.mode)) : std::string("error")) << ',' << (t.fallback ? 1 : 0)
        << ',' << t.library_size << ',' << num(t.residual_ratio) << ',' << csv_escape(t.support) << ','
        << csv_escape(t.error) << '\n';
  }
}

void write_cells_csv(std::ostream& out, const std::vector<CellResult>& cells) {
  out << "pde,noise,method,trials,f1_mean,f1_std,ce_mean,mean_lib,fallback_count,modes\n";
  for (const auto& c : cells) {
    std::string modes;
    for (const auto& [m, n] : c.mode_histogram) {
      if (!modes.empty()) modes += ';';
      modes += std::string(mode_name(m)) + ":" + std::to_string(n);
    }
    out << pde_spec(c.pde).name << ',' << num(c.noise) << ',' << method_name(c.method) << ',' << c.trials << ','
        << num(c.f1_mean) << ',' << num(c.f1_std) << ',' << num(c.ce_mean) << ',' << num(c.mean_library_size)
        << ',' << c.fallback_count << ',' << modes << '\n';
  }
}

void write_f1_svg(std::ostream& out, const std::vector<CellResult>& cells) {
  constexpr double W = 640, H = 400, left = 60, right = 170, top = 20, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;
  double max_noise = 0.0;
  for (const auto& c : cells) max_noise = std::max(max_noise, c.noise);
  if (max_noise <= 0.0) max_noise = 1.0;
  auto px = [&](double noise) { return left + pw * noise / max_noise; };
  auto py = [&](double f1) { return top + ph * (1.0 - f1); };

  std::map<std::pair<Pde, Method>, std::vector<const CellResult*>> series;
  for (const auto& c : cells) series[{c.pde, c.method}].push_back(&c);

  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    out << "<text x=\"" << left - 8 << "\" y=\"" << py(f) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
        << num(f) << "</text>\n";
  }
  std::vector<double> ticks;
  for (const auto& c : cells) ticks.push_back(c.noise);
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
  for (double n : ticks)
    out << "<text x=\"" << px(n) << "\" y=\"" << top + ph + 16 << "\" font-size=\"11\" text-anchor=\"middle\">"
        << num(n * 100) << "%</text>\n";
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" font-size=\"12\" text-anchor=\"middle\">noise</text>\n";
  out << "<text x=\"14\" y=\"" << top + ph / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 " << top + ph / 2
      << ")\" text-anchor=\"middle\">F1</text>\n";

  int idx = 0;
  for (const auto& [key, pts] : series) {
    const char* color = palette[static_cast<int>(key.first) % 8];
    const bool dashed = key.second == Method::wf_lasso;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\""
        << (dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
    for (const auto* c : pts) out << px(c->noise) << ',' << py(c->f1_mean) << ' ';
    out << "\"/>\n";
    const double ly = top + 14.0 * idx;
    out << "<line x1=\"" << W - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 30 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << (dashed ? " stroke-dasharray=\"5,3\"" : "")
        << "/>\n";
    out << "<text x=\"" << W - right + 34 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">"
        << pde_spec(key.first).display_name << ' ' << method_name(key.second) << "</text>\n";
    ++idx;
  }
  out << "</svg>\n";
}

ThresholdRow score_threshold(const std::vector<GalileanCase>& cases, double tau) {
  ThresholdRow r;
  r.tau = tau;
  for (const auto& c : cases) {
    const bool pred = c.error.empty() && c.energy_fraction > tau && std::abs(c.c1) > tau;
    if (pred && c.truth) ++r.tp;
    else if (pred) ++r.fp;
    else if (c.truth) ++r.fn;
    else ++r.tn;
  }
  r.precision = r.tp + r.fp > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
  r.recall = r.tp + r.fn > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

ThresholdSweep run_threshold_sweep(const SweepPlan& plan) {
  require(!plan.taus.empty() && !plan.seeds.empty() && !plan.noise_levels.empty(), "sweep: empty plan");
  const int threads = resolve_threads(plan.threads);
  std::vector<std::pair<Pde, bool>> pdes;
  for (Pde p : plan.positives) pdes.emplace_back(p, true);
  for (Pde p : plan.negatives) pdes.emplace_back(p, false);

  std::vector<CleanKey> keys;
  for (const auto& [p, truth] : pdes)
    for (auto s : plan.seeds) keys.push_back({p, s, plan.M, plan.nx, plan.nt});
  CleanCache cache;
  cache.build(keys, {}, threads);

  ThresholdSweep out;
  for (const auto& [p, truth] : pdes)
    for (double n : plan.noise_levels)
      for (auto s : plan.seeds) out.cases.push_back({p, n, s, truth, 0.0, 0.0, {}});
  parallel_for(out.cases.size(), threads, [&](std::size_t i) {
    auto& c = out.cases[i];
    try {
      const auto data = add_noise(cache.get({c.pde, c.seed, plan.M, plan.nx, plan.nt}), c.noise, c.seed);
      const GalileanResult g = detect_galilean(data, plan.thresholds);
      c.energy_fraction = g.energy_fraction;
      c.c1 = g.c1;
    } catch (const std::exception& e) {
      c.energy_fraction = kNaN;
      c.c1 = kNaN;
      c.error = e.what();
    }
  });
  for (double tau : plan.taus) out.rows.push_back(score_threshold(out.cases, tau));
  return out;
}

void write_sweep_csv(std::ostream& out, const ThresholdSweep& sweep) {
  out << "tau,tp,fp,fn,tn,precision,recall,f1\n";
  for (const auto& r : sweep.rows)
    out << num(r.tau) << ',' << r.tp << ',' << r.fp << ',' << r.fn << ',' << r.tn << ',' << num(r.precision) << ','
        << num(r.recall) << ',' << num(r.f1) << '\n';
}

void write_sweep_cases_csv(std::ostream& out, const ThresholdSweep& sweep) {
  out << "pde,noise,seed,galilean,energy_fraction,c1,error\n";
  for (const auto& c : sweep.cases)
    out << pde_spec(c.pde).name << ',' << num(c.noise) << ',' << c.seed << ',' << (c.truth ? 1 : 0) << ','
        << num(c.energy_fraction) << ',' << num(c.c1) << ',' << csv_escape(c.error) << '\n';
}

std::string_view ablation_name(AblationKind k) {
  switch (k) {
    case AblationKind::trajectories: return "trajectories";
    case AblationKind::resolution: return "resolution";
    case AblationKind::library_scaling: return "library_scaling";
  }
  return "?";
}

std::optional<AblationKind> parse_ablation(std::string_view name) {
  for (auto k : {AblationKind::trajectories, AblationKind::resolution, AblationKind::library_scaling})
    if (name == ablation_name(k)) return k;
  if (name == "library-scaling") return AblationKind::library_scaling;
  return std::nullopt;
}

AblationResult run_ablation(const AblationPlan& plan) {
  AblationResult out;
  out.kind = plan.kind;
  std::vector<int> values = plan.values;
  std::vector<std::uint64_t> seeds = plan.seeds;
  switch (plan.kind) {
    case AblationKind::trajectories:
      if (values.empty()) values = {1, 2, 3, 5, 10};
      if (seeds.empty()) seeds = seed_range(42, 10);
      break;
    case AblationKind::resolution:
      if (values.empty()) values = {32, 64, 128, 256};
      if (seeds.empty()) seeds = seed_range(42, 5);
      break;
    case AblationKind::library_scaling:
      if (values.empty()) values = {10, 15, 20, 25, 30};
      if (seeds.empty()) seeds = seed_range(42, 5);
      break;
  }
  for (int v : values) {
    std::vector<BenchmarkPlan> plans;
    BenchmarkPlan base;
    base.seeds = seeds;
    base.threads = plan.threads;
    switch (plan.kind) {
      case AblationKind::trajectories:
        base.pdes = {Pde::burgers};
        base.noise_levels = {0.10};
        base.methods = {Method::eqod};
        base.M = v;
        plans.push_back(base);
        break;
      case AblationKind::resolution:
        base.pdes = {Pde::burgers};
        base.noise_levels = {0.0};
        base.methods = {Method::eqod};
        base.nx = v;
        plans.push_back(base);
        break;
      case AblationKind::library_scaling:
        base.config.full_library = expanded_library(v);
        base.pdes = {Pde::burgers};
        base.noise_levels = {0.05};
        plans.push_back(base);
        base.pdes = {Pde::heat};
        base.noise_levels = {0.10};
        plans.push_back(base);
        break;
    }
    for (const auto& p : plans) {
      auto r = run_benchmark(p);
      for (auto& c : r.cells) out.rows.push_back({v, std::move(c)});
      out.trials.insert(out.trials.end(), r.trials.begin(), r.trials.end());
    }
  }
  return out;
}

void write_ablation_csv(std::ostream& out, const AblationResult& result) {
  out << "kind,value,pde,noise,method,trials,f1_mean,f1_std,ce_mean,mean_lib,fallback_count\n";
  for (const auto& r : result.rows) {
    const auto& c = r.cell;
    out << ablation_name(result.kind) << ',' << r.value << ',' << pde_spec(c.pde).name << ',' << num(c.noise) << ','
        << method_name(c.method) << ',' << c.trials << ',' << num(c.f1_mean) << ',' << num(c.f1_std) << ','
        << num(c.ce_mean) << ',' << num(c.mean_library_size) << ',' << c.fallback_count << '\n';
  }
}

void write_stability_svg(std::ostream& out, const std::vector<std::string>& terms, const std::vector<double>& pi,
                         double threshold) {
  require(terms.size() == pi.size(), "write_stability_svg: size mismatch");
  constexpr double H = 320, left = 50, top = 20, bottom = 70, bar = 36;
  const double W = left + 20 + bar * static_cast<double>(terms.size());
  const double ph = H - top - bottom;
  auto py = [&](double p) { return top + ph * (1.0 - p); };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    out << "<text x=\"" << left - 6 << "\" y=\"" << py(f) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
        << num(f) << "</text>\n";
  }
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const double x = left + 10 + bar * static_cast<double>(j);
    const double p = std::clamp(pi[j], 0.0, 1.0);
    out << "<rect x=\"" << x << "\" y=\"" << py(p) << "\" width=\"" << bar - 8 << "\" height=\"" << ph * p
        << "\" fill=\"" << (pi[j] > threshold ? "#1f77b4" : "#bbbbbb") << "\"/>\n";
    const double tx = x + (bar - 8) / 2;
    out << "<text x=\"" << tx << "\" y=\"" << top + ph + 12 << "\" font-size=\"10\" text-anchor=\"end\" transform=\"rotate(-45 "
        << tx << ' ' << top + ph + 12 << ")\">" << terms[j] << "</text>\n";
  }
  out << "<line x1=\"" << left << "\" y1=\"" << py(threshold) << "\" x2=\"" << W - 10 << "\" y2=\"" << py(threshold)
      << "\" stroke=\"#d62728\" stroke-dasharray=\"4,3\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << W - 10 << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  out << "</svg>\n";
}

}  // namespace eqod
