#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gflow/engine.hpp"
#include "gflow/estimates.hpp"
#include "gflow/models.hpp"
#include "json.hpp"

namespace gflow::cli {

/// Fully resolved run configuration. Built from defaults, then a JSON
/// config file, then command-line overrides (each a JSON merge patch).
struct RunConfig {
  ModelKind model = ModelKind::euler;
  ModelParameters params{};
  GridSpec grid{2, 32, 8};

  double r = 2.0;
  double beta0 = 0.0;
  std::optional<double> constant;  // nullopt: empirical
  std::optional<double> delta;     // nullopt: the certified shrink rate

  int n_theta = 8;  // 1 runs the single ray at `theta`
  double theta = 0.0;
  std::optional<double> ds;     // default s_max / 400
  std::optional<double> s_max;  // default s_max_scale * s_certified
  double s_max_scale = 1.0;
  double blowup_factor = 1e6;
  Integrator integrator = Integrator::rk4_fixed;
  double atol = 1e-9;
  double rtol = 1e-9;
  int sample_stride = 1;

  std::string data;  // catalog name
  std::uint64_t data_seed = 7;
  double beta_decay = 1.0;

  EnsembleSpec ensemble{};
  LemmaSpec lemmas{};
  CalibrationSpec calibration{};

  std::string output = "gevrey_out";
  nlohmann::json merged;  // the effective configuration, echoed in manifests

  [[nodiscard]] GevreyParams gevrey(double constant_value) const;
  [[nodiscard]] CatalogRequest catalog_request() const;
  /// FNV-1a 64 of merged.dump(), as 16 hex digits.
  [[nodiscard]] std::string hash() const;
};

[[nodiscard]] nlohmann::json default_config();

/// Parses and validates; every ConfigError names the offending field
/// ("gevrey.beta0 required", "grid.n: ..."). Commands that never touch
/// the initial radius pass need_beta0 = false.
[[nodiscard]] RunConfig resolve_config(const nlohmann::json& file_patch, const nlohmann::json& flag_patch,
                                       bool need_beta0 = true);

/// Reads a JSON config file; ConfigError on unreadable or malformed input.
[[nodiscard]] nlohmann::json read_config_file(const std::string& path);

}  // namespace gflow::cli
