#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gflow/estimates.hpp"
#include "gflow/gevrey.hpp"
#include "gflow/models.hpp"
#include "json.hpp"

namespace gflow {

enum class Integrator { rk4_fixed, rk4_doubling };

[[nodiscard]] std::string to_string(Integrator i);
[[nodiscard]] Integrator parse_integrator(const std::string& tag);

/// A ray zeta = s e^{i theta}. `ds` is the sample spacing; rk4_fixed takes
/// exactly one step per sample, rk4_doubling subdivides each sample
/// interval adaptively (ds is then the largest step).
struct RaySpec {
  double theta = 0.0;
  double ds = 1e-3;
  double s_max = 1.0;
  Integrator integrator = Integrator::rk4_fixed;
  double atol = 1e-9;
  double rtol = 1e-9;
  int sample_stride = 1;  // record every stride-th sample
  void validate() const;
};

enum class RayStatus { completed, blown_up, radius_exhausted, failed };

[[nodiscard]] std::string to_string(RayStatus s);

struct RaySample {
  double s = 0.0;
  std::vector<NormReport> members;
  NormReport combined;
  int rejected = 0;  // step-doubling rejections since the previous sample
};

struct RayTrajectory {
  ModelKind model = ModelKind::euler;
  double theta = 0.0;
  std::vector<RaySample> samples;
  RayStatus status = RayStatus::completed;
  double s_end = 0.0;   // last s reached (blow-up / exhaustion point)
  std::string message;  // error text when status == failed
};

/// Called after every accepted sample with the current state.
using RayObserver = std::function<void(double s, const ModelState& state)>;

struct RayResult {
  double theta = 0.0;
  double s_empirical = 0.0;  // blow-up arclength, or the censoring value
  bool blew_up = false;
  RayStatus status = RayStatus::completed;
  bool flagged = false;  // blew up before s_certified
};

struct CertifiedRegion {
  ModelKind model = ModelKind::euler;
  double s_certified = 0.0;
  double s_uncapped = 0.0;  // before the boussinesq cap
  double cap = 0.0;         // 2 ln2 / g for boussinesq, 0 otherwise
  double delta_used = 0.0;
  double C_used = 1.0;
  double initial_norm = 0.0;  // ||state0||_{beta0}
  double beta0 = 0.0;
  double r = 0.0;
  std::vector<RayResult> rays;

  [[nodiscard]] int flag_count() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Theorem radius and matching shrink rate for state0 at p.beta0 with
/// constant p.constant (p.delta is ignored). Throws OverflowError when the
/// initial norm is not finite.
[[nodiscard]] CertifiedRegion certified_radius(const ModelState& state0, const GevreyParams& p);

/// Integrates du/ds = e^{i theta} rhs(u) from s = 0, recording norms at
/// beta0 - delta s. Stops with blown_up once the combined Gevrey norm
/// exceeds blowup_factor times its initial value (or turns non-finite), and
/// with radius_exhausted at 0.999 beta0/delta when that precedes s_max.
[[nodiscard]] RayTrajectory integrate_ray(const ModelState& state0, const GevreyParams& p, const RaySpec& ray,
                                          double blowup_factor = 1e6, const RayObserver& observer = {});

/// Rays at theta_j = 2 pi j / n_theta, run concurrently (worker count capped
/// by GEVREY_FLOW_THREADS). Ray failures are recorded per ray.
struct SweepResult {
  CertifiedRegion region;
  std::vector<RayTrajectory> trajectories;
};
[[nodiscard]] SweepResult sweep_theta(const ModelState& state0, const GevreyParams& p, int n_theta,
                                      const RaySpec& ray_template, double blowup_factor = 1e6);

struct ConvergenceRow {
  int cutoff = 0;
  double deviation = 0.0;  // max_s ||u_K(s) - u_Kmax(s)||_{H^r}
  RayStatus status = RayStatus::completed;
};

/// Integrates the datum truncated to each K in `cutoffs` (increasing, the
/// last one the reference) and compares at the recorded samples.
[[nodiscard]] std::vector<ConvergenceRow> galerkin_convergence(const ModelState& state0, const GevreyParams& p,
                                                               const RaySpec& ray, const std::vector<int>& cutoffs);

struct BudgetRow {
  double s = 0.0;
  double lhs = 0.0;  // 1/2 d/ds |||u|||^2 + delta |||A^{1/4}u|||^2
  double rhs = 0.0;  // C 2^r C_W |||u||| |||A^{1/4}u|||^2
};

struct BudgetReport {
  std::vector<BudgetRow> rows;
  double max_violation = 0.0;  // max (lhs - rhs) / rhs, <= 0 when the inequality holds
};

/// Centered-difference check of the energy inequality along a trajectory
/// of state0, with the constant region.C_used. Boussinesq adds the g/2
/// |||(u,eta)|||^2 buoyancy term; the analytic model uses C F~(|||u|||).
/// Throws PreconditionError unless samples are spaced at most
/// 1e-3 region.s_certified.
[[nodiscard]] BudgetReport energy_budget(const RayTrajectory& traj, const ModelState& state0, const GevreyParams& p,
                                         const CertifiedRegion& region);

/// Empirical constant for one datum: the random ensemble of estimate_lab
/// (betas 0, beta0/2, beta0) plus "orbit" probes, i.e. states sampled along
/// the datum's own rays out to the radius the random-only constant
/// certifies, each scored at probe_betas equispaced radii in [0, beta0].
/// Extra states can only raise the maximum ratio, so the probe radius
/// bounds the final certified radius.
struct CalibrationSpec {
  int count = 100;
  std::uint64_t seed = 1;
  std::vector<double> decays{1.0, 2.0, 3.0, 5.0};
  int probe_rays = 8;
  int probe_steps = 200;
  int probe_samples = 20;
  int probe_betas = 5;
};

struct Calibration {
  EmpiricalConstant constant;  // over ensemble and probes
  double random_C = 0.0;       // ensemble-only constant
  double probe_radius = 0.0;   // s_certified under random_C
};

[[nodiscard]] Calibration calibrate_constant(const ModelState& state0, const GevreyParams& p,
                                             const CalibrationSpec& spec = {});

struct ScheduleEntry {
  double t = 0.0;
  double beta = 0.0;
  double M = 0.0;  // ||u(t)||_{beta(t)}
};

struct DiskCover {
  double epsilon = 0.0;
  double beta_inf = 0.0;
  double M = 0.0;
  double T = 0.0;
  std::vector<double> centers;
  bool overlapping = true;
  bool covers = true;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Chains certified disks along [0, T], T the last schedule time: radius
/// eps = C beta_inf / (2^r C_W M), centers 0, eps/2, eps, ... until the
/// last disk reaches T.
[[nodiscard]] DiskCover chain_disks(const std::vector<ScheduleEntry>& schedule, const GevreyParams& p, int dim);

}  // namespace gflow
