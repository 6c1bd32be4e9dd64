// gevrey-flow: command-line front end.
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "gflow/errors.hpp"

namespace {

using nlohmann::json;

// Flags that map onto a config path; unset flags leave the file value alone.
struct Overrides {
  std::optional<std::string> model, data, constant, integrator, T, out;
  std::optional<int> dim, n, cutoff, n_theta, count, stride;
  std::optional<long> seed, ensemble_seed;
  std::optional<double> r, beta0, delta, theta, ds, s_max, s_max_scale, blowup, beta_decay, g, S;

  void add(CLI::App* app) {
    app->add_option("--model", model, "euler | sqg | boussinesq | mhd | analytic");
    app->add_option("--data", data, "initial data catalog name");
    app->add_option("--seed", seed, "initial data seed");
    app->add_option("--beta-decay", beta_decay, "random data decay rate");
    app->add_option("--dim", dim, "space dimension");
    app->add_option("--n", n, "grid points per axis");
    app->add_option("--cutoff,-K", cutoff, "Galerkin cutoff K");
    app->add_option("--r", r, "Sobolev exponent");
    app->add_option("--beta0", beta0, "initial Gevrey radius");
    app->add_option("--constant", constant, "C as a number, or 'empirical'");
    app->add_option("--delta", delta, "radius shrink rate (default: certified)");
    app->add_option("--g", g, "boussinesq gravity");
    app->add_option("--S", S, "mhd S = rho0 mu0");
    app->add_option("--T", T, "analytic multiplier, e.g. partial:0");
    app->add_option("--out,-o", out, "output directory");
  }
  void add_ray(CLI::App* app) {
    app->add_option("--sweep-theta", n_theta, "number of rays (1 runs --theta only)");
    app->add_option("--theta", theta, "ray angle for single-ray runs");
    app->add_option("--ds", ds, "sample spacing");
    app->add_option("--s-max", s_max, "arclength limit (default: s_max_scale * s_certified)");
    app->add_option("--s-max-scale", s_max_scale, "multiple of s_certified used when --s-max is absent");
    app->add_option("--blowup-factor", blowup, "blow-up threshold relative to the initial norm");
    app->add_option("--integrator", integrator, "rk4_fixed | rk4_doubling");
    app->add_option("--sample-stride", stride, "record every k-th sample");
  }
  void add_ensemble(CLI::App* app) {
    app->add_option("--count", count, "ensemble size (>= 100)");
    app->add_option("--ensemble-seed", ensemble_seed, "ensemble seed");
  }

  [[nodiscard]] json patch() const {
    json p = json::object();
    const auto set = [&](const char* path, const auto& v) {
      if (v) p[json::json_pointer(path)] = *v;
    };
    set("/model", model);
    set("/data/name", data);
    set("/data/seed", seed);
    set("/data/beta_decay", beta_decay);
    set("/grid/dim", dim);
    set("/grid/n", n);
    set("/grid/cutoff", cutoff);
    set("/gevrey/r", r);
    set("/gevrey/beta0", beta0);
    set("/gevrey/delta", delta);
    set("/params/g", g);
    set("/params/S", S);
    set("/params/T", T);
    set("/ray/n_theta", n_theta);
    set("/ray/theta", theta);
    set("/ray/ds", ds);
    set("/ray/s_max", s_max);
    set("/ray/s_max_scale", s_max_scale);
    set("/ray/blowup_factor", blowup);
    set("/ray/integrator", integrator);
    set("/ray/sample_stride", stride);
    set("/ensemble/count", count);
    set("/ensemble/seed", ensemble_seed);
    set("/output", out);
    if (constant) {
      if (*constant == "empirical") {
        p["gevrey"]["constant"] = "empirical";
      } else {
        try {
          std::size_t used = 0;
          const double c = std::stod(*constant, &used);
          if (used != constant->size()) throw std::invalid_argument("trailing");
          p["gevrey"]["constant"] = c;
        } catch (const std::exception&) {
          throw gflow::ConfigError("gevrey.constant: expected a number or \"empirical\", got '" + *constant + "'");
        }
      }
    }
    return p;
  }
};

}  // namespace

int main(int argc, char** argv) {
  namespace cli = gflow::cli;
  CLI::App app{"Complex-time Galerkin integration and Gevrey-norm estimates"};
  app.require_subcommand(1);
  std::string config_path;
  bool self_check = false;
  Overrides ov;
  app.add_option("--config,-c", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_flag("--self-check", self_check, "re-read outputs and validate them against the record schemas");

  auto* sim = app.add_subcommand("simulate", "integrate rays and write trajectories");
  auto* cert = app.add_subcommand("certify", "print the certified region without integrating");
  auto* est = app.add_subcommand("verify-estimates", "estimate ensemble and empirical constant");
  auto* disks = app.add_subcommand("chain-disks", "chain certified disks along a norm schedule");
  auto* cat = app.add_subcommand("catalog", "list initial data");
  for (auto* sc : {sim, cert, est, disks}) {
    sc->add_option("--config,-c", config_path, "JSON config file")->check(CLI::ExistingFile);
    sc->add_flag("--self-check", self_check, "re-read outputs and validate them");
    ov.add(sc);
  }
  ov.add_ray(sim);
  ov.add_ensemble(est);
  ov.add_ensemble(disks);
  bool exhaustive = false;
  est->add_flag("--exhaustive-lemmas", exhaustive, "also run the exhaustive wavenumber-lemma sweep");
  std::string schedule;
  disks->add_option("--schedule", schedule, "CSV with columns t,beta,M")->required();
  bool as_json = false;
  cat->add_flag("--json", as_json, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitError;
  }

  try {
    if (cat->parsed()) return cli::cmd_catalog(as_json, std::cout);
    const json file = config_path.empty() ? json() : cli::read_config_file(config_path);
    const auto cfg = cli::resolve_config(file, ov.patch(), !est->parsed());
    int code = cli::kExitOk;
    bool wrote = false;
    if (sim->parsed()) {
      code = cli::cmd_simulate(cfg, std::cerr);
      wrote = true;
    } else if (cert->parsed()) {
      code = cli::cmd_certify(cfg, std::cout);
    } else if (est->parsed()) {
      code = cli::cmd_verify_estimates(cfg, exhaustive, std::cerr);
      wrote = true;
    } else if (disks->parsed()) {
      code = cli::cmd_chain_disks(cfg, schedule, std::cout);
    }
    if (self_check && wrote) {
      const auto problems = cli::self_check(cfg.output);
      for (const auto& p : problems) std::cerr << "self-check: " << p << "\n";
      if (!problems.empty()) return cli::kExitError;
      std::cerr << "self-check: ok\n";
    }
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitError;
  }
}
