#include "run_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gflow/errors.hpp"

namespace gflow::cli {

namespace {

using nlohmann::json;

json::json_pointer ptr(const std::string& dotted) {
  std::string p = "/" + dotted;
  for (auto& c : p) {
    if (c == '.') c = '/';
  }
  return json::json_pointer(p);
}

const json& field(const json& j, const std::string& name) {
  const auto p = ptr(name);
  if (!j.contains(p) || j.at(p).is_null()) throw ConfigError(name + " required");
  return j.at(p);
}

bool present(const json& j, const std::string& name) {
  const auto p = ptr(name);
  return j.contains(p) && !j.at(p).is_null();
}

double number(const json& j, const std::string& name) {
  const auto& v = field(j, name);
  if (!v.is_number()) throw ConfigError(name + ": expected a number, got " + v.dump());
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(name + ": must be finite");
  return x;
}

double positive(const json& j, const std::string& name) {
  const double x = number(j, name);
  if (!(x > 0.0)) throw ConfigError(name + ": must be > 0, got " + std::to_string(x));
  return x;
}

long integer(const json& j, const std::string& name) {
  const auto& v = field(j, name);
  if (!v.is_number_integer()) throw ConfigError(name + ": expected an integer, got " + v.dump());
  return v.get<long>();
}

std::string text(const json& j, const std::string& name) {
  const auto& v = field(j, name);
  if (!v.is_string()) throw ConfigError(name + ": expected a string, got " + v.dump());
  return v.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& name) {
  const auto& v = field(j, name);
  if (!v.is_array() || v.empty()) throw ConfigError(name + ": expected a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(name + ": expected numbers, got " + x.dump());
    out.push_back(x.get<double>());
  }
  return out;
}

std::string default_data(ModelKind m, int dim) {
  switch (m) {
    case ModelKind::euler: return dim == 3 ? "taylor_green_3d" : "taylor_green_2d";
    case ModelKind::sqg: return "sqg_single_mode";
    case ModelKind::boussinesq: return "bouss_stratified";
    case ModelKind::mhd: return "mhd_alfven";
    case ModelKind::analytic: return "analytic_gaussian_modes";
  }
  return "random_gevrey";
}

// Wraps library validation so the message names the config field.
template <class F>
void rethrow_as(const std::string& name, F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    throw ConfigError(name + ": " + e.what());
  }
}

}  // namespace

json default_config() {
  return json::parse(R"({
    "model": "euler",
    "params": {"g": 1.0, "up_axis": -1, "S": 1.0, "rho0": 1.0,
               "series": [0.0, 1.0], "series_exact": true, "T": "partial:0"},
    "grid": {"dim": 2, "n": 32, "cutoff": 8},
    "gevrey": {"r": 2.0, "beta0": null, "constant": 1.0, "delta": "certified"},
    "ray": {"n_theta": 8, "theta": 0.0, "ds": null, "s_max": null, "s_max_scale": 1.0,
            "blowup_factor": 1e6, "integrator": "rk4_fixed", "atol": 1e-9, "rtol": 1e-9,
            "sample_stride": 1},
    "data": {"name": null, "seed": 7, "beta_decay": 1.0},
    "ensemble": {"count": 100, "seed": 1, "betas": [0.3], "decays": [1.0, 2.0, 3.0, 5.0]},
    "calibration": {"count": 100, "seed": 1, "probe_rays": 8, "probe_steps": 200,
                    "probe_samples": 20, "probe_betas": 5},
    "lemmas": {"max_norm": 16, "random_tuples": 20000, "max_tuple_length": 8, "seed": 1},
    "output": "gevrey_out"
  })");
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  try {
    auto j = json::parse(in);
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config: malformed JSON in '" + path + "': " + e.what());
  }
}

RunConfig resolve_config(const json& file_patch, const json& flag_patch, bool need_beta0) {
  json m = default_config();
  if (!file_patch.is_null()) m.merge_patch(file_patch);
  if (!flag_patch.is_null()) m.merge_patch(flag_patch);

  RunConfig c;
  rethrow_as("model", [&] { c.model = parse_model(text(m, "model")); });

  c.grid.dim = static_cast<int>(integer(m, "grid.dim"));
  c.grid.n = static_cast<int>(integer(m, "grid.n"));
  c.grid.cutoff = static_cast<int>(integer(m, "grid.cutoff"));
  rethrow_as("grid", [&] { c.grid.validate(); });

  c.params.g = number(m, "params.g");
  c.params.up_axis = static_cast<int>(integer(m, "params.up_axis"));
  c.params.S = positive(m, "params.S");
  c.params.rho0 = positive(m, "params.rho0");
  c.params.series.coeffs = numbers(m, "params.series");
  if (!field(m, "params.series_exact").is_boolean()) throw ConfigError("params.series_exact: expected a boolean");
  c.params.series.exact = field(m, "params.series_exact").get<bool>();
  rethrow_as("params.series", [&] { c.params.series.validate(); });
  rethrow_as("params.T", [&] { c.params.T = Multiplier::parse(text(m, "params.T")); });

  c.r = number(m, "gevrey.r");
  if (need_beta0 || present(m, "gevrey.beta0")) {
    c.beta0 = positive(m, "gevrey.beta0");
    rethrow_as("gevrey", [&] { GevreyParams{c.r, c.beta0, 0.0, 1.0}.validate(c.grid.dim); });
  } else {
    rethrow_as("gevrey", [&] { GevreyParams{c.r, 1.0, 0.0, 1.0}.validate(c.grid.dim); });
  }
  {
    const auto& v = field(m, "gevrey.constant");
    if (v.is_string()) {
      if (v.get<std::string>() != "empirical") {
        throw ConfigError("gevrey.constant: expected a number or \"empirical\", got " + v.dump());
      }
    } else {
      c.constant = positive(m, "gevrey.constant");
    }
  }
  {
    const auto& v = field(m, "gevrey.delta");
    if (v.is_string()) {
      if (v.get<std::string>() != "certified") {
        throw ConfigError("gevrey.delta: expected a number or \"certified\", got " + v.dump());
      }
    } else {
      c.delta = number(m, "gevrey.delta");
      if (*c.delta < 0.0) throw ConfigError("gevrey.delta: must be >= 0");
    }
  }

  c.n_theta = static_cast<int>(integer(m, "ray.n_theta"));
  if (c.n_theta != 1 && c.n_theta < 4) throw ConfigError("ray.n_theta: must be 1 (single ray) or >= 4");
  c.theta = number(m, "ray.theta");
  if (present(m, "ray.ds")) c.ds = positive(m, "ray.ds");
  if (present(m, "ray.s_max")) c.s_max = positive(m, "ray.s_max");
  c.s_max_scale = positive(m, "ray.s_max_scale");
  c.blowup_factor = number(m, "ray.blowup_factor");
  if (!(c.blowup_factor > 1.0)) throw ConfigError("ray.blowup_factor: must be > 1");
  rethrow_as("ray.integrator", [&] { c.integrator = parse_integrator(text(m, "ray.integrator")); });
  c.atol = positive(m, "ray.atol");
  c.rtol = positive(m, "ray.rtol");
  c.sample_stride = static_cast<int>(integer(m, "ray.sample_stride"));
  if (c.sample_stride < 1) throw ConfigError("ray.sample_stride: must be >= 1");

  c.data = present(m, "data.name") ? text(m, "data.name") : default_data(c.model, c.grid.dim);
  m["data"]["name"] = c.data;
  const long seed = integer(m, "data.seed");
  if (seed < 0) throw ConfigError("data.seed: must be >= 0");
  c.data_seed = static_cast<std::uint64_t>(seed);
  c.beta_decay = positive(m, "data.beta_decay");

  c.ensemble.model = c.model;
  c.ensemble.grid = c.grid;
  c.ensemble.r = c.r;
  c.ensemble.params = c.params;
  c.ensemble.count = static_cast<int>(integer(m, "ensemble.count"));
  if (c.ensemble.count < 100) throw ConfigError("ensemble.count: must be >= 100");
  const long eseed = integer(m, "ensemble.seed");
  if (eseed < 0) throw ConfigError("ensemble.seed: must be >= 0");
  c.ensemble.seed = static_cast<std::uint64_t>(eseed);
  c.ensemble.betas = numbers(m, "ensemble.betas");
  for (double b : c.ensemble.betas) {
    if (b < 0.0) throw ConfigError("ensemble.betas: entries must be >= 0");
  }
  c.ensemble.decays = numbers(m, "ensemble.decays");

  c.calibration.count = static_cast<int>(integer(m, "calibration.count"));
  if (c.calibration.count < 100) throw ConfigError("calibration.count: must be >= 100");
  const long cseed = integer(m, "calibration.seed");
  if (cseed < 0) throw ConfigError("calibration.seed: must be >= 0");
  c.calibration.seed = static_cast<std::uint64_t>(cseed);
  c.calibration.decays = c.ensemble.decays;
  c.calibration.probe_rays = static_cast<int>(integer(m, "calibration.probe_rays"));
  c.calibration.probe_steps = static_cast<int>(integer(m, "calibration.probe_steps"));
  c.calibration.probe_samples = static_cast<int>(integer(m, "calibration.probe_samples"));
  c.calibration.probe_betas = static_cast<int>(integer(m, "calibration.probe_betas"));
  if (c.calibration.probe_rays < 1 || c.calibration.probe_steps < 1 || c.calibration.probe_samples < 1 ||
      c.calibration.probe_betas < 2) {
    throw ConfigError("calibration: probe_rays, probe_steps, probe_samples >= 1 and probe_betas >= 2");
  }

  c.lemmas.dim = c.grid.dim;
  c.lemmas.max_norm = static_cast<int>(integer(m, "lemmas.max_norm"));
  c.lemmas.random_tuples = static_cast<int>(integer(m, "lemmas.random_tuples"));
  c.lemmas.max_tuple_length = static_cast<int>(integer(m, "lemmas.max_tuple_length"));
  const long lseed = integer(m, "lemmas.seed");
  if (c.lemmas.max_norm < 1 || c.lemmas.random_tuples < 0 || c.lemmas.max_tuple_length < 2 || lseed < 0) {
    throw ConfigError("lemmas: need max_norm >= 1, random_tuples >= 0, max_tuple_length >= 2, seed >= 0");
  }
  c.lemmas.seed = static_cast<std::uint64_t>(lseed);

  c.output = text(m, "output");
  // The output location is not part of the run's identity; leaving it out
  // keeps manifests identical across output directories.
  m.erase("output");
  c.merged = std::move(m);
  return c;
}

GevreyParams RunConfig::gevrey(double constant_value) const { return GevreyParams{r, beta0, 0.0, constant_value}; }

CatalogRequest RunConfig::catalog_request() const {
  return CatalogRequest{data, model, grid, data_seed, beta_decay, params};
}

std::string RunConfig::hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char ch : merged.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gflow::cli
