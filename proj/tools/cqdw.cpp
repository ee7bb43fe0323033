// cqdw: command-line driver for the double-well nonlocal cubic-quintic NLS.
//
//   cqdw <spectrum|overlaps|twomode|continue|stability|evolve|thermal|regress>
//        [--config FILE] [--preset NAME] [--out DIR] [--seed N]
//
// Every run writes its artifacts and a manifest.json into --out. Failures
// print a JSON error object on stderr (and to DIR/error.json when possible).

#include "cqdw/io.hpp"
#include "cqdw/presets.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <random>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cqdw;

namespace {

enum ExitCode { kOk = 0, kRegressionFail = 1, kConfigError = 2, kIoError = 3, kRunError = 4 };

class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
  const fs::path& dir() const { return dir_; }

  void csv(const std::string& name, const io::CsvTable& t) {
    t.write(dir_ / name);
    names_.push_back(name);
  }
  void text(const std::string& name, const std::string& body) {
    io::write_text(dir_ / name, body);
    names_.push_back(name);
  }
  void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

std::string f(double v) { return io::fmt(v); }

json nullable(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// --- spectrum ---------------------------------------------------------------

void run_spectrum(Workbench& wb, Artifacts& out) {
  const Scenario& sc = wb.scenario();
  const Grid& g = sc.model.grid();
  const LinearBasis& b = sc.basis;
  const RealVector v = potential_on_grid(g, sc.config.potential);
  io::CsvTable t({"x", "V", "u0", "u1", "phi_left", "phi_right"});
  for (int i = 0; i < g.n_points; ++i) {
    t.row({f(g.points[i]), f(v[i]), f(b.u0[i]), f(b.u1[i]), f(b.phi_left[i]), f(b.phi_right[i])});
  }
  out.csv("basis.csv", t);
  out.json_file("spectrum.json", {{"omega0", b.omega0},
                                  {"omega1", b.omega1},
                                  {"Omega", b.Omega},
                                  {"omega", b.omega},
                                  {"phi_left_mass_left", left_mass(g, b.phi_left.cwiseAbs2())}});
}

// --- overlaps ---------------------------------------------------------------

void run_overlaps(Workbench& wb, Artifacts& out) {
  const Scenario& sc = wb.scenario();
  const Grid& g = sc.model.grid();
  json summary;
  io::CsvTable sweep({"family", "sigma", "eta0", "eta1", "eta2", "eta3", "eta4", "eta5", "eta6",
                      "eta7", "eta8", "eta9", "eta10", "eta11", "eta_rel1", "eta_rel4"});
  for (KernelFamily fam : {KernelFamily::gaussian, KernelFamily::exponential}) {
    const RegimeThresholds th = wb.thresholds_for(fam);
    summary["thresholds"][to_string(fam)] = {{"sigma_b", th.sigma_b}, {"sigma_c", th.sigma_c}};
    const int samples = 80;
    for (int k = 0; k < samples; ++k) {
      const double sigma = 0.05 * std::pow(20.0 / 0.05, double(k) / (samples - 1));
      const OverlapSet set =
          compute_overlaps(g, sc.basis, Kernel{fam, sigma}, Kernel{fam, sigma}, th);
      std::vector<std::string> row{to_string(fam), f(sigma)};
      for (double e : set.eta) row.push_back(f(e));
      row.push_back(f(eta_rel(set, EtaCriterion::eta1)));
      row.push_back(f(eta_rel(set, EtaCriterion::eta4)));
      sweep.row(row);
    }
  }
  out.csv("eta_sweep.csv", sweep);
  const OverlapSet own = compute_overlaps(g, sc.basis, sc.config.cubic_kernel(),
                                          sc.config.quintic_kernel(), wb.thresholds());
  summary["sigma"] = own.sigma;
  summary["kernel_family"] = to_string(own.kernel_family);
  summary["regime"] = to_string(own.regime);
  summary["eta"] = own.eta;
  out.json_file("overlaps.json", summary);
}

// --- twomode ----------------------------------------------------------------

json critical_json(const CriticalNorms& cn) {
  return {{"N0cr", optional_json(cn.N0cr)},
          {"N1cr", optional_json(cn.N1cr)},
          {"N2cr", optional_json(cn.N2cr)},
          {"N3cr", optional_json(cn.N3cr)}};
}

void run_twomode(Workbench& wb, Artifacts& out) {
  const Scenario& sc = wb.scenario();
  const RunConfig& c = sc.config;
  const ModeParams& p = wb.mode_params();

  io::CsvTable crit({"sigma", "N0cr", "N1cr", "N2cr", "N3cr"});
  const int samples = 120;
  auto cell = [](const std::optional<double>& v) { return v ? f(*v) : std::string("nan"); };
  for (int k = 0; k < samples; ++k) {
    const double sigma = 0.05 * std::pow(20.0 / 0.05, double(k) / (samples - 1));
    const CriticalNorms cn = critical_norms(mode_params_at(sc, sigma, wb.thresholds()));
    crit.row({f(sigma), cell(cn.N0cr), cell(cn.N1cr), cell(cn.N2cr), cell(cn.N3cr)});
  }
  out.csv("critical_norms.csv", crit);

  io::CsvTable lam({"N", "family", "z", "theta", "lambda_sq"});
  for (int k = 1; k <= c.twomode_samples; ++k) {
    ModeParams at = p;
    at.N = c.twomode_norm_max * k / c.twomode_samples;
    for (const FixedPoint& fp : census(at)) {
      lam.row({f(at.N), to_string(fp.family), f(fp.state.z), f(fp.state.theta), f(fp.lambda_sq)});
    }
  }
  out.csv("lambda_sq.csv", lam);

  // phase portrait at the configured norm
  ModeParams at = p;
  at.N = c.twomode_norm;
  io::CsvTable orbits({"orbit", "t", "z", "theta", "q", "energy"});
  double worst_drift = 0.0;
  int id = 0;
  const double dt = c.orbit_time / c.orbit_steps;
  const int stride = std::max(1, c.orbit_steps / 2000);
  for (double z0 : {-0.9, -0.6, -0.3, 0.05, 0.3, 0.6, 0.9}) {
    for (double th0 : {0.0, 0.5 * M_PI, M_PI}) {
      const Orbit o = integrate_orbit({z0, th0}, at, c.orbit_time, dt);
      worst_drift = std::max(worst_drift, o.max_relative_drift);
      for (std::size_t k = 0; k < o.samples.size(); k += stride) {
        const auto& s = o.samples[k];
        orbits.row({std::to_string(id), f(s.t), f(s.z), f(s.theta), f(s.q), f(s.energy)});
      }
      ++id;
    }
  }
  out.csv("orbits.csv", orbits);

  json fixed = json::array();
  for (const FixedPoint& fp : census(at)) {
    fixed.push_back({{"family", to_string(fp.family)},
                     {"type", to_string(fp.type)},
                     {"z", fp.state.z},
                     {"theta", fp.state.theta},
                     {"lambda_sq", fp.lambda_sq}});
  }
  json predicted = json::array();
  for (const auto& e : predicted_bifurcations(p)) {
    predicted.push_back({{"label", e.label}, {"parent", to_string(e.parent)}, {"N", e.N}, {"mu", e.mu}});
  }
  out.json_file("twomode.json",
                {{"eta", p.eta},
                 {"eta4", p.eta4},
                 {"eta_cross", p.eta_cross},
                 {"omega", p.omega},
                 {"Omega", p.Omega},
                 {"critical_norms", critical_json(critical_norms(p))},
                 {"predicted_bifurcations", predicted},
                 {"phase_portrait_norm", c.twomode_norm},
                 {"fixed_points", fixed},
                 {"orbit_max_relative_drift", worst_drift},
                 {"asymmetric_N_min", nullable(wb.measure("twomode.asymmetric_N_min"))},
                 {"asymmetric_N_max", nullable(wb.measure("twomode.asymmetric_N_max"))}});
}

// --- continue ---------------------------------------------------------------

std::vector<SymmetryClass> parities(const RunConfig& c) {
  if (c.branch == "both") return {SymmetryClass::symmetric, SymmetryClass::antisymmetric};
  return {branch_family(c.branch)};
}

json event_json(const BranchEvent& e) {
  json j = {{"type", to_string(e.type)}, {"mu", e.mu}, {"N", e.N}, {"index", e.index}};
  if (e.type == EventType::pitchfork) j["partner_overlap"] = e.partner_overlap;
  return j;
}

void branch_csv(Artifacts& out, const std::string& name, const NlsModel& model, const Branch& b) {
  io::CsvTable t({"mu", "N", "symmetry", "n_unstable", "max_re_lambda", "residual",
                  "edge_amplitude"});
  for (const auto& st : b.states) {
    const BdgSpectrum sp = solve_bdg(build_bdg(model, st));
    t.row({f(st.mu), f(st.norm), to_string(st.symmetry), std::to_string(sp.unstable_count),
           f(std::max(sp.max_real_part, 0.0)), f(st.residual), f(st.edge_amplitude)});
  }
  out.csv(name, t);
}

void run_continue(Workbench& wb, Artifacts& out) {
  const Scenario& sc = wb.scenario();
  const ModeParams& p = wb.mode_params();
  json log;
  for (SymmetryClass par : parities(sc.config)) {
    const std::string tag = to_string(par);
    const BranchFamily& fam = wb.family(par);
    branch_csv(out, "branch_" + tag + ".csv", sc.model, fam.parent);
    json entry = {{"termination", fam.parent.termination},
                  {"edge_amplitude", fam.parent.max_edge_amplitude()},
                  {"edge_flagged", fam.parent.edge_flagged()},
                  {"events", json::array()}};
    for (const auto& e : fam.parent.events) entry["events"].push_back(event_json(e));
    entry["daughters"] = json::array();
    for (std::size_t k = 0; k < fam.daughters.size(); ++k) {
      const Branch& d = fam.daughters[k];
      const std::string name = "branch_" + tag + "_daughter" + std::to_string(k) + ".csv";
      branch_csv(out, name, sc.model, d);
      json dj = {{"origin_mu", fam.daughter_origin_mu[k]},
                 {"file", name},
                 {"termination", d.termination},
                 {"edge_amplitude", d.max_edge_amplitude()},
                 {"edge_flagged", d.edge_flagged()},
                 {"events", json::array()}};
      for (const auto& e : d.events) dj["events"].push_back(event_json(e));
      entry["daughters"].push_back(dj);
    }
    log[tag] = entry;
    if (fam.parent.edge_flagged()) {
      std::cerr << "warning: " << tag << " branch reaches edge amplitude "
                << fam.parent.max_edge_amplitude() << " (box may be too narrow)\n";
    }

    // reduction overlay: parent curve mu(N)
    const FixedPointFamily fp = par == SymmetryClass::symmetric ? FixedPointFamily::symmetric
                                                                : FixedPointFamily::antisymmetric;
    io::CsvTable t({"N", "mu"});
    const int samples = 400;
    for (int k = 1; k <= samples; ++k) {
      const double n = sc.config.norm_max * k / samples;
      t.row({f(n), f(parent_mu(p, fp, n))});
    }
    out.csv("twomode_" + tag + ".csv", t);
  }
  json predicted = json::array();
  for (const auto& e : predicted_bifurcations(p)) {
    predicted.push_back({{"label", e.label}, {"parent", to_string(e.parent)}, {"N", e.N}, {"mu", e.mu}});
  }
  log["twomode_predictions"] = predicted;
  out.json_file("events.json", log);
}

// --- stability --------------------------------------------------------------

void run_stability(Workbench& wb, Artifacts& out) {
  const Scenario& sc = wb.scenario();
  const StationaryState& st = wb.evolution_state();
  const BdgOperator op = build_bdg(sc.model, st);
  const BdgSpectrum block = solve_bdg(op, {BdgMethod::block});
  const BdgSpectrum reduced = solve_bdg(op);
  io::CsvTable t({"re", "im"});
  std::vector<std::complex<double>> ev = block.eigenvalues;
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  for (const auto& l : ev) t.row({f(l.real()), f(l.imag())});
  out.csv("bdg_spectrum.csv", t);

  // two-mode lambda^2 of the same parity family at the state's norm
  ModeParams p = wb.mode_params();
  p.N = st.norm;
  const FixedPointFamily fam = st.symmetry == SymmetryClass::symmetric
                                   ? FixedPointFamily::symmetric
                                   : FixedPointFamily::antisymmetric;
  double lambda_sq = 0.0;
  for (const FixedPoint& fp : census(p)) {
    if (fp.family == fam) lambda_sq = fp.lambda_sq;
  }
  const LambdaComparison cmp = two_mode_lambda_check(reduced, lambda_sq);
  out.json_file("stability.json", {{"mu", st.mu},
                                   {"N", st.norm},
                                   {"symmetry", to_string(st.symmetry)},
                                   {"max_re_lambda", block.max_real_part},
                                   {"unstable_count", block.unstable_count},
                                   {"min_abs_lambda", block.min_abs},
                                   {"quartet_defect", block.quartet_defect},
                                   {"reduced_max_re_lambda", reduced.max_real_part},
                                   {"twomode_lambda_sq", lambda_sq},
                                   {"twomode_rate", cmp.two_mode_rate},
                                   {"relative_difference", cmp.relative_difference},
                                   {"classification_agrees", cmp.classification_agrees}});
}

// --- evolve -----------------------------------------------------------------

void run_evolve(Workbench& wb, Artifacts& out) {
  const Scenario& sc = wb.scenario();
  const RunConfig& c = sc.config;
  const Grid& g = sc.model.grid();
  const EvolutionRun& run = wb.evolution();
  const long every = std::max<long>(1, std::lround(c.snapshot_interval / c.sample_interval));

  std::vector<std::string> header{"t"};
  for (int i = 0; i < g.n_points; ++i) header.push_back(f(g.points[i]));
  io::CsvTable density(header);
  for (std::size_t k = 0; k < run.times.size(); k += every) {
    std::vector<std::string> row{f(run.times[k])};
    for (int i = 0; i < g.n_points; ++i) row.push_back(f(std::norm(run.snapshots[k][i])));
    density.row(row);
  }
  out.csv("density.csv", density);

  const auto phase = project_phase_plane(run, g, sc.basis.phi_left, sc.basis.phi_right);
  io::CsvTable pp({"t", "z", "theta", "outside_fraction", "theta_defined", "N", "imbalance"});
  for (std::size_t k = 0; k < phase.size(); ++k) {
    const auto& s = phase[k];
    pp.row({f(s.t), f(s.z), f(s.theta), f(s.outside_fraction), s.theta_defined ? "1" : "0",
            f(run.norm_series[k]), f(run.imbalance_series[k])});
  }
  out.csv("phase_plane.csv", pp);

  const GrowthFit fit = fit_growth(run, 0.0, 0.1);
  const auto onset = asymmetry_onset(run);
  out.json_file("evolution.json", {{"mu", wb.evolution_state().mu},
                                   {"N", wb.evolution_state().norm},
                                   {"perturbation", to_string(c.perturbation)},
                                   {"amplitude", c.amplitude},
                                   {"seed", c.seed},
                                   {"onset_t", optional_json(onset)},
                                   {"max_norm_drift", run.max_norm_drift},
                                   {"growth_rate_fit", fit.rate},
                                   {"fit_window", {fit.t_begin, fit.t_end}},
                                   {"bdg_rate", wb.measure("dynamics.bdg_rate")}});
}

// --- thermal ----------------------------------------------------------------

void run_thermal(Workbench& wb, Artifacts& out) {
  const RunConfig& c = wb.config();
  const Grid g = c.grid();
  const Kernel k = Kernel::exponential(std::sqrt(c.thermal_d));
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  io::CsvTable t({"source", "x", "S", "m_poisson", "m_convolution"});
  json per = json::array();
  double worst = 0.0;
  for (int s = 0; s < c.thermal_sources; ++s) {
    // random sum of three Gaussian beams
    ComplexVector u = ComplexVector::Zero(g.n_points);
    for (int b = 0; b < 3; ++b) {
      const double x0 = 6.0 * uni(rng);
      const double width = 1.0 + 0.5 * (uni(rng) + 1.0);
      const std::complex<double> amp(0.6 * uni(rng), 0.6 * uni(rng));
      for (int i = 0; i < g.n_points; ++i) {
        const double x = (g.points[i] - x0) / width;
        u[i] += amp * std::exp(-x * x);
      }
    }
    const RealVector src = saturable_source(u, c.thermal_sigma0);
    const RealVector m = solve_screened_poisson(g, src, c.thermal_d);
    const RealVector conv = convolve(k, g, src);
    const double diff = (m - conv).cwiseAbs().maxCoeff();
    worst = std::max(worst, diff);
    per.push_back({{"source", s}, {"max_abs_difference", diff}});
    for (int i = 0; i < g.n_points; ++i) {
      t.row({std::to_string(s), f(g.points[i]), f(src[i]), f(m[i]), f(conv[i])});
    }
  }
  out.csv("thermal.csv", t);
  out.json_file("thermal.json", {{"d", c.thermal_d},
                                 {"sigma0", c.thermal_sigma0},
                                 {"kernel_range", std::sqrt(c.thermal_d)},
                                 {"sources", per},
                                 {"max_abs_difference", worst}});
}

using Runner = void (*)(Workbench&, Artifacts&);

Runner runner_for(const std::string& cmd) {
  if (cmd == "spectrum") return run_spectrum;
  if (cmd == "overlaps") return run_overlaps;
  if (cmd == "twomode") return run_twomode;
  if (cmd == "continue") return run_continue;
  if (cmd == "stability") return run_stability;
  if (cmd == "evolve") return run_evolve;
  if (cmd == "thermal") return run_thermal;
  throw InvalidArgument("unknown subcommand '" + cmd + "'");
}

void write_manifest(Artifacts& out, const std::string& cmd, const RunConfig& c,
                    const std::string& preset) {
  json m = {{"command", cmd},
            {"config_hash", config_hash(c)},
            {"config", to_json(c)},
            {"artifacts", out.names()}};
  if (!preset.empty()) m["preset"] = preset;
  io::write_text(out.dir() / "manifest.json", m.dump(2) + "\n");
}

json report_json(const RegressionReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"quantity", row.expected.quantity},
                    {"expected", row.expected.value},
                    {"tolerance", row.expected.tolerance},
                    {"measured", nullable(row.measured)},
                    {"status", to_string(row.status)},
                    {"provenance", row.expected.provenance},
                    {"detail", row.detail}});
  }
  return {{"preset", r.preset}, {"overall", to_string(r.overall)}, {"warnings", r.warnings},
          {"rows", rows}};
}

// Runs one preset: its figure artifacts, then the regression table.
RegressionReport regress_one(const ScenarioPreset& preset, const fs::path& dir,
                             std::optional<std::uint64_t> seed) {
  RunConfig c = preset.config;
  if (seed) c.seed = *seed;
  Workbench wb(c);
  Artifacts out(dir);
  std::string artifact_error;
  try {
    runner_for(preset.command)(wb, out);
  } catch (const std::exception& e) {
    artifact_error = e.what();
  }
  RegressionReport r = regress(preset, wb);
  if (!artifact_error.empty()) r.warnings.push_back("artifact stage failed: " + artifact_error);
  out.json_file("regress.json", report_json(r));
  io::write_text(dir / "regress.txt", format_report(r));
  write_manifest(out, "regress", c, preset.name);
  return r;
}

int max_workers() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("CQDW_MAX_WORKERS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

int run_regress(const std::string& name, const fs::path& out_dir,
                std::optional<std::uint64_t> seed) {
  std::vector<const ScenarioPreset*> todo;
  if (name == "all") {
    for (const auto& p : builtin_presets()) todo.push_back(&p);
  } else {
    todo.push_back(&find_preset(name));
  }
  std::vector<RegressionReport> reports(todo.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < todo.size(); k = next++) {
      const fs::path dir = todo.size() == 1 ? out_dir : out_dir / todo[k]->name;
      reports[k] = regress_one(*todo[k], dir, seed);
    }
  };
  const int workers = std::min<int>(max_workers(), static_cast<int>(todo.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  CheckStatus worst = CheckStatus::pass;
  for (const auto& r : reports) {
    std::cout << format_report(r);
    if (r.overall == CheckStatus::error) worst = CheckStatus::error;
    if (r.overall == CheckStatus::fail && worst == CheckStatus::pass) worst = CheckStatus::fail;
  }
  if (worst == CheckStatus::error) return kRunError;
  return worst == CheckStatus::fail ? kRegressionFail : kOk;
}

int fail(const fs::path& out_dir, json err, int code) {
  err["status"] = "error";
  std::cerr << err.dump() << "\n";
  try {
    fs::create_directories(out_dir);
    io::write_text(out_dir / "error.json", err.dump(2) + "\n");
  } catch (...) {
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-well nonlocal cubic-quintic NLS: reduction, branches, stability, dynamics"};
  app.require_subcommand(1, 1);
  std::string config_path, preset_name;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"spectrum", "linear eigenpairs and the rotated basis"},
      {"overlaps", "overlap integrals, sigma sweeps and regime thresholds"},
      {"twomode", "critical norms, lambda^2 curves and phase portraits of the reduction"},
      {"continue", "stationary branches, events and stability counts"},
      {"stability", "BdG spectrum of the state at dynamics.mu"},
      {"evolve", "time evolution: density matrix and phase-plane series"},
      {"thermal", "screened-Poisson solve versus exponential-kernel convolution"},
      {"regress", "run a preset (or 'all') and compare against its targets"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--preset", preset_name, "named preset (config source for regress)");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "RNG seed for perturbations and random sources");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    if (cmd == "regress") {
      if (preset_name.empty()) {
        return fail(out_dir, {{"error", "usage"}, {"message", "regress needs --preset NAME|all"}},
                    kConfigError);
      }
      return run_regress(preset_name, out_dir, seed);
    }
    RunConfig c = !config_path.empty()   ? load_config(config_path)
                  : !preset_name.empty() ? find_preset(preset_name).config
                                         : RunConfig{};
    if (seed) c.seed = *seed;
    Workbench wb(c);
    Artifacts out(out_dir);
    runner_for(cmd)(wb, out);
    write_manifest(out, cmd, c, preset_name);
    std::cout << "wrote " << out.names().size() << " artifacts to " << out_dir << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    return fail(out_dir, {{"error", "config"}, {"message", "invalid config"},
                          {"violations", e.violations()}, {"path", config_path}},
                kConfigError);
  } catch (const io::IoError& e) {
    return fail(out_dir, {{"error", "io"}, {"message", e.what()}, {"path", e.path().string()}},
                kIoError);
  } catch (const InvalidArgument& e) {
    return fail(out_dir, {{"error", "argument"}, {"message", e.what()}}, kConfigError);
  } catch (const std::exception& e) {
    return fail(out_dir, {{"error", "run"}, {"message", e.what()}}, kRunError);
  }
}
