#include "cqdw/config.hpp"

#include "cqdw/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

namespace cqdw {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out = "invalid config:";
  for (const auto& s : v) out += "\n  " + s;
  return out;
}

bool is_branch_name(const std::string& b) {
  return b == "symmetric" || b == "antisymmetric";
}

PerturbationKind perturbation_from_string(const std::string& s) {
  if (s == "none") return PerturbationKind::none;
  if (s == "random") return PerturbationKind::random;
  if (s == "eigenvector") return PerturbationKind::eigenvector;
  throw InvalidArgument("unknown perturbation '" + s + "'");
}

using Setter = std::function<void(const nlohmann::json&)>;

// Reads one JSON object section into fields, recording every problem.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void section(const nlohmann::json& root, const std::string& name,
               const std::map<std::string, Setter>& fields) {
    if (!root.contains(name)) return;
    const auto& obj = root.at(name);
    if (!obj.is_object()) {
      errors_.push_back(name + ": expected an object");
      return;
    }
    for (const auto& [key, value] : obj.items()) {
      const auto it = fields.find(key);
      if (it == fields.end()) {
        errors_.push_back(name + "." + key + ": unknown field");
        continue;
      }
      try {
        it->second(value);
      } catch (const std::exception& e) {
        errors_.push_back(name + "." + key + ": " + e.what());
      }
    }
  }

 private:
  std::vector<std::string>& errors_;
};

double number(const nlohmann::json& v) {
  if (!v.is_number()) throw InvalidArgument("expected a number");
  return v.get<double>();
}

int integer(const nlohmann::json& v) {
  if (!v.is_number_integer()) throw InvalidArgument("expected an integer");
  return v.get<int>();
}

std::string text(const nlohmann::json& v) {
  if (!v.is_string()) throw InvalidArgument("expected a string");
  return v.get<std::string>();
}

bool boolean(const nlohmann::json& v) {
  if (!v.is_boolean()) throw InvalidArgument("expected true or false");
  return v.get<bool>();
}

std::map<std::string, Setter> kernel_fields(KernelConfig& k) {
  return {{"family", [&k](const auto& v) { k.family = text(v); }},
          {"sigma", [&k](const auto& v) { k.sigma = number(v); }}};
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

std::string to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::none: return "none";
    case PerturbationKind::random: return "random";
    case PerturbationKind::eigenvector: return "eigenvector";
  }
  return "?";
}

void RunConfig::validate() const {
  std::vector<std::string> e;
  auto positive = [&e](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) e.push_back(std::string(name) + ": must be positive");
  };
  positive("grid.half_width", half_width);
  positive("grid.spacing", spacing);
  if (spacing > 0.0 && half_width > 0.0) {
    const double cells = 2.0 * half_width / spacing;
    if (std::abs(cells - std::round(cells)) > 1e-9 * cells) {
      e.push_back("grid.spacing: must divide 2 half_width");
    } else if (std::lround(cells) % 2 != 0 || cells < 4) {
      e.push_back("grid: need an even number of at least 4 cells so x = 0 is a sample");
    }
  }
  positive("potential.trap_strength", potential.trap_strength);
  positive("potential.barrier_width", potential.barrier_width);
  if (!(potential.barrier_height >= 0.0)) e.push_back("potential.barrier_height: must be >= 0");
  for (const auto& [name, k] : {std::pair{"kernels.cubic", cubic}, std::pair{"kernels.quintic", quintic}}) {
    try {
      const KernelFamily f = kernel_family_from_string(k.family);
      if (f != KernelFamily::delta && !(k.sigma > 0.0)) {
        e.push_back(std::string(name) + ".sigma: must be positive");
      }
    } catch (const InvalidArgument&) {
      e.push_back(std::string(name) + ".family: one of gaussian, exponential, delta");
    }
  }
  if (s != 1 && s != -1) e.push_back("signs.s: must be +1 or -1");
  if (delta != 1 && delta != -1) e.push_back("signs.delta: must be +1 or -1");
  if (!is_branch_name(branch) && branch != "both") {
    e.push_back("continuation.branch: symmetric, antisymmetric or both");
  }
  if (!(mu_min < mu_max)) e.push_back("continuation.mu_min/mu_max: range is empty");
  positive("continuation.norm_max", norm_max);
  positive("continuation.ds_min", ds_min);
  if (!(ds_min <= ds_initial && ds_initial <= ds_max)) {
    e.push_back("continuation.ds_initial: must lie in [ds_min, ds_max]");
  }
  if (max_steps < 1) e.push_back("continuation.max_steps: must be >= 1");
  positive("newton.tolerance", newton_tolerance);
  if (newton_max_iterations < 1) e.push_back("newton.max_iterations: must be >= 1");
  positive("twomode.norm", twomode_norm);
  positive("twomode.norm_max", twomode_norm_max);
  if (twomode_samples < 2) e.push_back("twomode.samples: must be >= 2");
  positive("twomode.orbit_time", orbit_time);
  if (orbit_steps < 1) e.push_back("twomode.orbit_steps: must be >= 1");
  if (!is_branch_name(evolve_branch)) e.push_back("dynamics.branch: symmetric or antisymmetric");
  if (!(t_end >= 0.0)) e.push_back("dynamics.t_end: must be >= 0");
  positive("dynamics.dt", dt);
  positive("dynamics.sample_interval", sample_interval);
  positive("dynamics.snapshot_interval", snapshot_interval);
  if (!(amplitude >= 0.0)) e.push_back("dynamics.amplitude: must be >= 0");
  positive("thermal.d", thermal_d);
  if (thermal_sources < 1) e.push_back("thermal.sources: must be >= 1");
  if (!e.empty()) throw ConfigError(std::move(e));
}

Kernel RunConfig::cubic_kernel() const {
  return {kernel_family_from_string(cubic.family), cubic.sigma};
}

Kernel RunConfig::quintic_kernel() const {
  return {kernel_family_from_string(quintic.family), quintic.sigma};
}

Grid RunConfig::grid() const { return build_grid(half_width, spacing); }

ModelParams RunConfig::model_params() const {
  return ModelParams{grid(), potential, cubic_kernel(), quintic_kernel(), s, delta};
}

NewtonOptions RunConfig::newton_options() const {
  NewtonOptions o;
  o.tolerance = newton_tolerance;
  o.max_iterations = newton_max_iterations;
  return o;
}

ContinuationOptions RunConfig::continuation_options() const {
  ContinuationOptions o;
  o.mu_min = mu_min;
  o.mu_max = mu_max;
  o.norm_max = norm_max;
  o.ds_initial = ds_initial;
  o.ds_min = ds_min;
  o.ds_max = ds_max;
  o.max_steps = max_steps;
  o.newton = newton_options();
  return o;
}

EvolutionOptions RunConfig::evolution_options() const {
  EvolutionOptions o;
  o.dt = dt;
  o.sample_interval = sample_interval;
  return o;
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  std::vector<std::string> errors;
  if (!j.is_object()) throw ConfigError({"config: top level must be an object"});
  static const char* const sections[] = {"grid", "potential", "kernels", "signs", "continuation",
                                         "newton", "twomode", "dynamics", "thermal"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(std::begin(sections), std::end(sections), key) == std::end(sections)) {
      errors.push_back(key + ": unknown section");
    }
  }
  Reader r(errors);
  r.section(j, "grid", {{"half_width", [&](const auto& v) { c.half_width = number(v); }},
                        {"spacing", [&](const auto& v) { c.spacing = number(v); }}});
  r.section(j, "potential",
            {{"trap_strength", [&](const auto& v) { c.potential.trap_strength = number(v); }},
             {"barrier_height", [&](const auto& v) { c.potential.barrier_height = number(v); }},
             {"barrier_width", [&](const auto& v) { c.potential.barrier_width = number(v); }}});
  if (j.contains("kernels") && j.at("kernels").is_object()) {
    const auto& k = j.at("kernels");
    for (const auto& [key, value] : k.items()) {
      (void)value;
      if (key != "cubic" && key != "quintic") errors.push_back("kernels." + key + ": unknown field");
    }
    r.section(k, "cubic", kernel_fields(c.cubic));
    r.section(k, "quintic", kernel_fields(c.quintic));
  } else if (j.contains("kernels")) {
    errors.push_back("kernels: expected an object");
  }
  r.section(j, "signs", {{"s", [&](const auto& v) { c.s = integer(v); }},
                         {"delta", [&](const auto& v) { c.delta = integer(v); }}});
  r.section(j, "continuation",
            {{"branch", [&](const auto& v) { c.branch = text(v); }},
             {"mu_min", [&](const auto& v) { c.mu_min = number(v); }},
             {"mu_max", [&](const auto& v) { c.mu_max = number(v); }},
             {"norm_max", [&](const auto& v) { c.norm_max = number(v); }},
             {"ds_initial", [&](const auto& v) { c.ds_initial = number(v); }},
             {"ds_min", [&](const auto& v) { c.ds_min = number(v); }},
             {"ds_max", [&](const auto& v) { c.ds_max = number(v); }},
             {"max_steps", [&](const auto& v) { c.max_steps = integer(v); }},
             {"follow_daughters", [&](const auto& v) { c.follow_daughters = boolean(v); }}});
  r.section(j, "newton", {{"tolerance", [&](const auto& v) { c.newton_tolerance = number(v); }},
                          {"max_iterations", [&](const auto& v) { c.newton_max_iterations = integer(v); }}});
  r.section(j, "twomode", {{"norm", [&](const auto& v) { c.twomode_norm = number(v); }},
                           {"norm_max", [&](const auto& v) { c.twomode_norm_max = number(v); }},
                           {"samples", [&](const auto& v) { c.twomode_samples = integer(v); }},
                           {"orbit_time", [&](const auto& v) { c.orbit_time = number(v); }},
                           {"orbit_steps", [&](const auto& v) { c.orbit_steps = integer(v); }}});
  r.section(j, "dynamics",
            {{"mu", [&](const auto& v) { c.evolve_mu = number(v); }},
             {"branch", [&](const auto& v) { c.evolve_branch = text(v); }},
             {"t_end", [&](const auto& v) { c.t_end = number(v); }},
             {"dt", [&](const auto& v) { c.dt = number(v); }},
             {"sample_interval", [&](const auto& v) { c.sample_interval = number(v); }},
             {"snapshot_interval", [&](const auto& v) { c.snapshot_interval = number(v); }},
             {"perturbation", [&](const auto& v) { c.perturbation = perturbation_from_string(text(v)); }},
             {"amplitude", [&](const auto& v) { c.amplitude = number(v); }},
             {"seed", [&](const auto& v) {
                if (!v.is_number_unsigned()) throw InvalidArgument("expected a non-negative integer");
                c.seed = v.template get<std::uint64_t>();
              }}});
  r.section(j, "thermal", {{"d", [&](const auto& v) { c.thermal_d = number(v); }},
                           {"sigma0", [&](const auto& v) { c.thermal_sigma0 = number(v); }},
                           {"sources", [&](const auto& v) { c.thermal_sources = integer(v); }}});
  try {
    c.validate();
  } catch (const ConfigError& e) {
    errors.insert(errors.end(), e.violations().begin(), e.violations().end());
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  const std::string body = io::read_text(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw io::IoError(std::string("malformed JSON: ") + e.what(), path);
  }
  return config_from_json(j);
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["grid"] = {{"half_width", c.half_width}, {"spacing", c.spacing}};
  j["potential"] = {{"trap_strength", c.potential.trap_strength},
                    {"barrier_height", c.potential.barrier_height},
                    {"barrier_width", c.potential.barrier_width}};
  j["kernels"] = {{"cubic", {{"family", c.cubic.family}, {"sigma", c.cubic.sigma}}},
                  {"quintic", {{"family", c.quintic.family}, {"sigma", c.quintic.sigma}}}};
  j["signs"] = {{"s", c.s}, {"delta", c.delta}};
  j["continuation"] = {{"branch", c.branch},         {"mu_min", c.mu_min},
                       {"mu_max", c.mu_max},         {"norm_max", c.norm_max},
                       {"ds_initial", c.ds_initial}, {"ds_min", c.ds_min},
                       {"ds_max", c.ds_max},         {"max_steps", c.max_steps},
                       {"follow_daughters", c.follow_daughters}};
  j["newton"] = {{"tolerance", c.newton_tolerance}, {"max_iterations", c.newton_max_iterations}};
  j["twomode"] = {{"norm", c.twomode_norm}, {"norm_max", c.twomode_norm_max}, {"samples", c.twomode_samples},
                  {"orbit_time", c.orbit_time}, {"orbit_steps", c.orbit_steps}};
  j["dynamics"] = {{"mu", c.evolve_mu},
                   {"branch", c.evolve_branch},
                   {"t_end", c.t_end},
                   {"dt", c.dt},
                   {"sample_interval", c.sample_interval},
                   {"snapshot_interval", c.snapshot_interval},
                   {"perturbation", to_string(c.perturbation)},
                   {"amplitude", c.amplitude},
                   {"seed", c.seed}};
  j["thermal"] = {{"d", c.thermal_d}, {"sigma0", c.thermal_sigma0}, {"sources", c.thermal_sources}};
  return j;
}

std::string config_hash(const RunConfig& c) {
  const std::string dump = to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cqdw
