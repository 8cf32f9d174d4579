// eqod command-line driver.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eqod/bench.hpp"
#include "eqod/eqt.hpp"
#include "eqod/error.hpp"
#include "eqod/pipeline.hpp"
#include "eqod/solvers.hpp"
#include "eqod/stability.hpp"
#include "eqod/symmetry.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace eqod;

namespace {

enum Exit { ok = 0, other = 1, bad_args = 2, blow_up = 3, unreadable = 4 };

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const Detection& d) { return {{"detected", d.detected}, {"score", number(d.score)}}; }

json to_json(const SymmetryReport& r) {
  json j;
  j["spatial_translation"] = to_json(r.spatial_translation);
  j["temporal_translation"] = to_json(r.temporal_translation);
  j["scaling"] = to_json(r.scaling);
  j["reflection_even"] = to_json(r.reflection_even);
  j["reflection_odd"] = to_json(r.reflection_odd);
  j["galilean"] = {{"detected", r.galilean.detected},
                   {"energy_fraction", number(r.galilean.energy_fraction)},
                   {"c1", number(r.galilean.c1)},
                   {"rank_deficient", r.galilean.rank_deficient}};
  j["notes"] = r.notes;
  return j;
}

json terms_json(const LibrarySpec& lib) {
  json a = json::array();
  for (const auto& t : lib.terms()) a.push_back(t.name());
  return a;
}

json to_json(const IdentificationResult& r, const LibrarySpec& full, std::string_view method) {
  json j;
  j["method"] = method;
  j["mode"] = mode_name(r.mode);
  j["fallback_triggered"] = r.fallback_triggered;
  j["library_size"] = r.library_size;
  j["library_used"] = {{"provenance", provenance_name(r.library_used.provenance())},
                       {"terms", terms_json(r.library_used)}};
  j["lambda_star"] = number(r.lambda_star);
  j["residual_ratio"] = number(r.residual_ratio);
  json coeffs = json::object();
  for (std::size_t i = 0; i < r.coeffs.size(); ++i) coeffs[r.coeffs.terms()[i].name()] = r.coeffs.values()[i];
  j["coefficients"] = coeffs;
  json support = json::array();
  for (const auto& t : r.support()) support.push_back(t.name());
  j["support"] = support;
  if (r.symmetry_report) j["symmetry"] = to_json(*r.symmetry_report);
  if (r.stability) {
    json pi = json::object();
    for (std::size_t i = 0; i < r.stability->pi.size() && i < full.size(); ++i) pi[full[i].name()] = r.stability->pi[i];
    j["stability_pi"] = pi;
  }
  j["diagnostics"] = r.diagnostics;
  return j;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

int report_error(int code, std::string_view kind, const std::string& message) {
  json e{{"error", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << e.dump() << '\n';
  return code;
}

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::invalid_argument: return report_error(bad_args, "invalid_argument", e.what());
    case ErrorKind::blow_up: return report_error(blow_up, "blow_up", e.what());
    case ErrorKind::io: return report_error(unreadable, "io", e.what());
    case ErrorKind::numerical: return report_error(other, "numerical", e.what());
  }
  return report_error(other, "error", e.what());
}

Pde require_pde(const std::string& name) {
  auto p = parse_pde(name);
  if (!p) fail("unknown PDE '" + name + "'");
  return *p;
}

EqtFile load(const std::string& path) { return read_eqt(fs::path(path)); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create directory " + dir + ": " + ec.message());
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << contents;
}

template <class F>
std::string render(F&& f) {
  std::ostringstream s;
  f(s);
  return s.str();
}

BenchmarkPlan plan_from_json(const json& j) {
  BenchmarkPlan p;
  try {
    if (j.contains("pdes")) {
      p.pdes.clear();
      for (const auto& n : j["pdes"]) p.pdes.push_back(require_pde(n.get<std::string>()));
    }
    if (j.contains("noise_levels")) p.noise_levels = j["noise_levels"].get<std::vector<double>>();
    if (j.contains("seeds")) p.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("M")) p.M = j["M"].get<int>();
    if (j.contains("nx")) p.nx = j["nx"].get<int>();
    if (j.contains("nt")) p.nt = j["nt"].get<int>();
    if (j.contains("threads")) p.threads = j["threads"].get<int>();
    if (j.contains("methods")) {
      p.methods.clear();
      for (const auto& n : j["methods"]) {
        auto m = parse_method(n.get<std::string>());
        if (!m) fail("unknown method '" + n.get<std::string>() + "'");
        p.methods.push_back(*m);
      }
    }
    if (j.contains("library_size")) p.config.full_library = expanded_library(j["library_size"].get<int>());
    if (j.contains("stability_lambda")) p.config.stability.lambda = j["stability_lambda"].get<double>();
    if (j.contains("stability_per_row_penalty"))
      p.config.stability.per_row_penalty = j["stability_per_row_penalty"].get<bool>();
    if (j.contains("lasso_per_row_penalty")) p.config.lasso.per_row_penalty = j["lasso_per_row_penalty"].get<bool>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(std::string("malformed plan: ") + e.what());
  }
  p.validate();
  return p;
}


}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equation discovery from trajectory data"};
  app.require_subcommand(1);

  std::string pde_name, out_path, in_path, method = "eqod", plan_path, out_dir = ".", kind;
  int nx = 128, nt = 128, M = 3, threads = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> taus;
  std::vector<std::uint64_t> seeds;
  std::vector<int> values;

  auto* gen = app.add_subcommand("generate", "Solve a benchmark PDE and write an EQT container");
  gen->add_option("--pde", pde_name, "heat, burgers, kdv, fisher-kpp, adv-diff, ks, kdv-burgers, react-diff")->required();
  gen->add_option("--nx", nx)->check(CLI::Range(18, 1 << 16));
  gen->add_option("--nt", nt)->check(CLI::Range(18, 1 << 20));
  gen->add_option("--m", M)->check(CLI::Range(1, 10000));
  gen->add_option("--sigma", sigma)->check(CLI::Range(0.0, 100.0));
  gen->add_option("--seed", seed)->required();
  gen->add_option("--out", out_path)->required();

  auto* det = app.add_subcommand("detect", "Run the symmetry detectors on a container");
  det->add_option("--in", in_path)->required();

  auto* idf = app.add_subcommand("identify", "Identify the governing equation of a container");
  idf->add_option("--in", in_path)->required();
  idf->add_option("--method", method)->check(CLI::IsMember({"eqod", "wf-lasso"}));
  idf->add_option("--seed", seed)->required();

  auto* stab = app.add_subcommand("stability", "Selection probabilities over the standard library");
  stab->add_option("--in", in_path)->required();
  stab->add_option("--seed", seed)->required();
  stab->add_option("--svg", out_path, "Write the profile as an SVG bar chart");

  auto* bench = app.add_subcommand("bench", "Benchmark grid: per-trial and per-cell CSV plus an F1 chart");
  bench->add_option("--plan", plan_path, "JSON plan; omitted fields keep their defaults");
  bench->add_option("--out", out_dir);
  bench->add_option("--threads", threads);

  auto* sweep = app.add_subcommand("sweep-tau", "Galilean detector threshold sweep");
  sweep->add_option("--taus", taus);
  sweep->add_option("--seeds", seeds);
  sweep->add_option("--out", out_dir);
  sweep->add_option("--threads", threads);

  auto* abl = app.add_subcommand("ablate", "Trajectory, resolution or library-size ablation");
  abl->add_option("--kind", kind)->required()->check(CLI::IsMember({"trajectories", "resolution", "library_scaling"}));
  abl->add_option("--values", values);
  abl->add_option("--seeds", seeds);
  abl->add_option("--out", out_dir);
  abl->add_option("--threads", threads);

  auto* timing = app.add_subcommand("timing", "Wall time per PDE for generation and identification");
  timing->add_option("--seed", seed)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(bad_args, "invalid_argument", e.what());
  }

  try {
    if (*gen) {
      const Pde pde = require_pde(pde_name);
      const PdeSpec spec = pde_spec(pde);
      const Grid1D grid = default_grid(pde, nx, nt);
      const TrajectorySet set = generate_set(spec, grid, M, sigma, seed);
      EqtHeader h{spec.name, grid, M, sigma, {seed}, {{"generator", "eqod generate"}, {"format_version", "1"}}};
      write_eqt(fs::path(out_path), h, set);
      json j;
      j["out"] = out_path;
      j["pde"] = spec.name;
      j["grid"] = {{"x0", grid.x0}, {"length", grid.length}, {"nx", grid.nx},
                   {"t_start", grid.t_start}, {"t_end", grid.t_end}, {"nt", grid.nt}};
      j["M"] = M;
      j["sigma"] = sigma;
      j["seed"] = seed;
      j["checksum"] = checksum_hex(payload_checksum(set));
      emit(j);
    } else if (*det) {
      const EqtFile f = load(in_path);
      emit(to_json(detect_all(f.data)));
    } else if (*idf) {
      const EqtFile f = load(in_path);
      PipelineConfig cfg;
      const auto r = method == "eqod" ? run_eqod(f.data, seed, cfg) : run_wf_lasso_baseline(f.data, seed, cfg);
      json j = to_json(r, cfg.base_library(), method);
      if (auto p = parse_pde(f.header.pde)) {
        const PdeSpec spec = pde_spec(*p);
        const F1Score s = f1_score(r.support(), spec.true_support());
        j["truth"] = {{"pde", spec.name},
                      {"f1", s.f1},
                      {"precision", s.precision},
                      {"recall", s.recall},
                      {"coefficient_error", coefficient_error(r.coeffs, spec.true_coeffs)}};
      }
      emit(j);
    } else if (*stab) {
      const EqtFile f = load(in_path);
      const StabilityConfig cfg;
      const LibrarySpec lib = standard_library();
      const StabilityGate g = stability_gate(f.data, lib, seed, cfg);
      write_stability_csv(std::cout, lib, g.selection);
      if (!out_path.empty()) {
        std::vector<std::string> names;
        for (const auto& t : lib.terms()) names.push_back(t.name());
        write_file(out_path, render([&](std::ostream& s) { write_stability_svg(s, names, g.selection.pi, cfg.pi_threshold); }));
      }
    } else if (*bench) {
      BenchmarkPlan plan;
      if (!plan_path.empty()) {
        std::ifstream in(plan_path);
        if (!in) throw Error(ErrorKind::io, "cannot open plan " + plan_path);
        json j;
        try {
          j = json::parse(in);
        } catch (const std::exception& e) {
          fail(std::string("plan is not JSON: ") + e.what());
        }
        plan = plan_from_json(j);
      }
      if (threads > 0) plan.threads = threads;
      const auto r = run_benchmark(plan);
      ensure_dir(out_dir);
      const fs::path dir(out_dir);
      write_file(dir / "trials.csv", render([&](std::ostream& s) { write_trials_csv(s, r.trials); }));
      const std::string cells = render([&](std::ostream& s) { write_cells_csv(s, r.cells); });
      write_file(dir / "cells.csv", cells);
      write_file(dir / "f1_vs_noise.svg", render([&](std::ostream& s) { write_f1_svg(s, r.cells); }));
      std::cout << cells;
    } else if (*sweep) {
      SweepPlan plan;
      if (!taus.empty()) plan.taus = taus;
      if (!seeds.empty()) plan.seeds = seeds;
      plan.threads = threads;
      const auto r = run_threshold_sweep(plan);
      ensure_dir(out_dir);
      const fs::path dir(out_dir);
      const std::string table = render([&](std::ostream& s) { write_sweep_csv(s, r); });
      write_file(dir / "sweep.csv", table);
      write_file(dir / "sweep_cases.csv", render([&](std::ostream& s) { write_sweep_cases_csv(s, r); }));
      std::cout << table;
    } else if (*abl) {
      AblationPlan plan;
      plan.kind = *parse_ablation(kind);
      plan.values = values;
      plan.seeds = seeds;
      plan.threads = threads;
      const auto r = run_ablation(plan);
      ensure_dir(out_dir);
      const fs::path dir(out_dir);
      const std::string table = render([&](std::ostream& s) { write_ablation_csv(s, r); });
      write_file(dir / ("ablation_" + kind + ".csv"), table);
      write_file(dir / ("ablation_" + kind + "_trials.csv"), render([&](std::ostream& s) { write_trials_csv(s, r.trials); }));
      std::cout << table;
    } else if (*timing) {
      using clock = std::chrono::steady_clock;
      std::cout << "pde,generate_s,detect_s,eqod_s,wf_lasso_s\n";
      for (Pde p : all_pdes()) {
        const PdeSpec spec = pde_spec(p);
        auto t0 = clock::now();
        const auto set = generate_set(spec, default_grid(p), 1, 0.0, seed);
        auto t1 = clock::now();
        (void)detect_all(set);
        auto t2 = clock::now();
        (void)run_eqod(set, seed);
        auto t3 = clock::now();
        (void)run_wf_lasso_baseline(set, seed);
        auto t4 = clock::now();
        auto s = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };
        std::cout << spec.name << ',' << s(t0, t1) << ',' << s(t1, t2) << ',' << s(t2, t3) << ',' << s(t3, t4) << '\n';
      }
    }
  } catch (const Error& e) {
    return exit_for(e);
  } catch (const std::exception& e) {
    return report_error(other, "error", e.what());
  }
  return ok;
}
