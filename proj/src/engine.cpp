#include "gflow/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <thread>

#include "gflow/errors.hpp"
#include "parallel.hpp"
#include "gflow/spectral_ops.hpp"

namespace gflow {

namespace {

using Fields = std::vector<SpectralField>;

nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double structural_factor(const GevreyParams& p, int dim) { return std::pow(2.0, p.r) * cwien(p.r, dim); }

struct MemberNorms {
  std::vector<NormReport> members;
  NormReport combined;
};

MemberNorms measure(const Fields& f, const GevreyParams& p, double s) {
  MemberNorms out;
  for (const auto& m : f) out.members.push_back(time_varying_norm(m, p, s));
  out.combined = combine_reports(out.members);
  return out;
}

bool finite(const Fields& f) {
  return std::all_of(f.begin(), f.end(), [](const SpectralField& x) { return x.all_finite(); });
}

/// e^{i theta} rhs(state)
Fields tendency(const ModelState& tmpl, const Fields& y, cplx rot) {
  auto t = rhs(tmpl.with_fields(y)).fields();
  if (rot != cplx{1.0, 0.0}) {
    for (auto& f : t) f *= rot;
  }
  return t;
}

Fields combine(const Fields& y, cplx a, const Fields& k) {
  Fields out = y;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].axpy(a, k[i]);
  return out;
}

struct NonFinite {
  double s;
};

/// One classical RK4 step. Throws NonFinite when a stage goes non-finite.
Fields rk4_step(const ModelState& tmpl, const Fields& y, double h, cplx rot, double s) {
  const auto k1 = tendency(tmpl, y, rot);
  if (!finite(k1)) throw NonFinite{s};
  const auto k2 = tendency(tmpl, combine(y, 0.5 * h, k1), rot);
  if (!finite(k2)) throw NonFinite{s};
  const auto k3 = tendency(tmpl, combine(y, 0.5 * h, k2), rot);
  if (!finite(k3)) throw NonFinite{s};
  const auto k4 = tendency(tmpl, combine(y, h, k3), rot);
  if (!finite(k4)) throw NonFinite{s};
  Fields out = y;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].axpy(h / 6.0, k1[i]);
    out[i].axpy(h / 3.0, k2[i]);
    out[i].axpy(h / 3.0, k3[i]);
    out[i].axpy(h / 6.0, k4[i]);
  }
  if (!finite(out)) throw NonFinite{s + h};
  return out;
}

double max_abs(const Fields& f) {
  double m = 0.0;
  for (const auto& x : f) m = std::max(m, x.max_abs());
  return m;
}

double max_diff(const Fields& a, const Fields& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto da = a[i].data();
    const auto db = b[i].data();
    for (std::size_t j = 0; j < da.size(); ++j) m = std::max(m, std::abs(da[j] - db[j]));
  }
  return m;
}

/// Advances y over [s0, s1] by step doubling; returns the rejection count.
int rk4_doubling(const ModelState& tmpl, Fields& y, double s0, double s1, double& h, const RaySpec& ray, cplx rot) {
  int rejected = 0;
  double s = s0;
  const double hmax = ray.ds;
  while (s < s1) {
    h = std::min({h, hmax, s1 - s});
    if (h < 1e-14 * std::max(1.0, s1)) throw StateError("step-doubling step size underflow at s = " + std::to_string(s));
    const auto full = rk4_step(tmpl, y, h, rot, s);
    const auto half = rk4_step(tmpl, rk4_step(tmpl, y, 0.5 * h, rot, s), 0.5 * h, rot, s + 0.5 * h);
    const double err = max_diff(full, half) / (ray.atol + ray.rtol * max_abs(half));
    if (err <= 1.0) {
      y = half;
      // Land exactly on the sample point when the remaining gap is tiny.
      s = (s1 - (s + h) < 1e-12 * s1) ? s1 : s + h;
      const double grow = err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 4.0);
      h *= grow;
    } else {
      ++rejected;
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5);
    }
  }
  return rejected;
}

}  // namespace

std::string to_string(Integrator i) { return i == Integrator::rk4_fixed ? "rk4_fixed" : "rk4_doubling"; }

Integrator parse_integrator(const std::string& tag) {
  if (tag == "rk4_fixed" || tag == "rk4") return Integrator::rk4_fixed;
  if (tag == "rk4_doubling") return Integrator::rk4_doubling;
  throw ParameterError("unknown integrator '" + tag + "' (expected rk4_fixed or rk4_doubling)");
}

std::string to_string(RayStatus s) {
  switch (s) {
    case RayStatus::completed: return "completed";
    case RayStatus::blown_up: return "blown_up";
    case RayStatus::radius_exhausted: return "radius_exhausted";
    case RayStatus::failed: return "failed";
  }
  return "failed";
}

void RaySpec::validate() const {
  if (!(ds > 0.0)) throw ParameterError("ray.ds must be > 0");
  if (!(s_max > 0.0)) throw ParameterError("ray.s_max must be > 0");
  if (!std::isfinite(theta)) throw ParameterError("ray.theta must be finite");
  if (integrator == Integrator::rk4_doubling && !(atol > 0.0 && rtol > 0.0)) {
    throw ParameterError("rk4_doubling needs atol > 0 and rtol > 0");
  }
  if (sample_stride < 1) throw ParameterError("ray.sample_stride must be >= 1");
}

int CertifiedRegion::flag_count() const {
  return static_cast<int>(std::count_if(rays.begin(), rays.end(), [](const RayResult& r) { return r.flagged; }));
}

nlohmann::json CertifiedRegion::to_json() const {
  nlohmann::json j{{"model", to_string(model)},
                   {"s_certified", num(s_certified)},
                   {"s_uncapped", num(s_uncapped)},
                   {"cap", cap > 0.0 ? num(cap) : nlohmann::json(nullptr)},
                   {"delta_used", num(delta_used)},
                   {"C_used", C_used},
                   {"initial_norm", num(initial_norm)},
                   {"beta0", beta0},
                   {"r", r}};
  nlohmann::json rs = nlohmann::json::array();
  double s_min = std::numeric_limits<double>::infinity();
  for (const auto& ray : rays) {
    rs.push_back({{"theta", ray.theta},
                  {"s_empirical", num(ray.s_empirical)},
                  {"blew_up", ray.blew_up},
                  {"status", to_string(ray.status)},
                  {"flagged", ray.flagged}});
    s_min = std::min(s_min, ray.s_empirical);
  }
  j["rays"] = rs;
  j["s_empirical_min"] = rays.empty() ? nlohmann::json(nullptr) : num(s_min);
  j["flags"] = flag_count();
  return j;
}

CertifiedRegion certified_radius(const ModelState& state0, const GevreyParams& p) {
  const int dim = state0.grid().dim;
  p.validate(dim);
  std::vector<NormReport> parts;
  for (const auto& f : state0.fields()) parts.push_back(norm_report(f, p.r, p.beta0));
  const double norm0 = combine_reports(parts).gevrey;
  if (!std::isfinite(norm0)) throw OverflowError("initial Gevrey norm is not finite at beta0");

  CertifiedRegion reg;
  reg.model = state0.kind();
  reg.C_used = p.constant;
  reg.initial_norm = norm0;
  reg.beta0 = p.beta0;
  reg.r = p.r;
  if (state0.kind() == ModelKind::analytic) {
    reg.delta_used = p.constant * ftilde_eval(state0.params().series, p.r, dim, norm0).value;
  } else {
    reg.delta_used = p.constant * structural_factor(p, dim) * norm0;
  }
  reg.s_uncapped = reg.delta_used > 0.0 ? p.beta0 / reg.delta_used : std::numeric_limits<double>::infinity();
  reg.s_certified = reg.s_uncapped;
  if (state0.kind() == ModelKind::boussinesq) {
    reg.cap = 2.0 * std::numbers::ln2 / state0.params().g;
    reg.s_certified = std::min(reg.s_uncapped, reg.cap);
  }
  return reg;
}

RayTrajectory integrate_ray(const ModelState& state0, const GevreyParams& p, const RaySpec& ray, double blowup_factor,
                            const RayObserver& observer) {
  ray.validate();
  if (!(blowup_factor > 1.0)) throw ParameterError("blowup_factor must be > 1");
  state0.validate();

  RayTrajectory traj;
  traj.model = state0.kind();
  traj.theta = ray.theta;

  double s_limit = ray.s_max;
  bool guarded = false;
  if (p.delta > 0.0) {
    const double guard = 0.999 * p.beta0 / p.delta;
    if (guard < s_limit) {
      s_limit = guard;
      guarded = true;
    }
  }
  const auto n_steps = static_cast<long>(std::ceil(s_limit / ray.ds - 1e-9));
  const cplx rot = ray.theta == 0.0 ? cplx{1.0, 0.0} : std::polar(1.0, ray.theta);

  Fields y = state0.fields();
  const auto m0 = measure(y, p, 0.0);
  traj.samples.push_back({0.0, m0.members, m0.combined, 0});
  if (observer) observer(0.0, state0);
  const double threshold = blowup_factor * m0.combined.gevrey;

  double h = ray.ds;
  int rejected = 0;
  double s_prev = 0.0;
  for (long j = 1; j <= n_steps; ++j) {
    const double s = j == n_steps ? s_limit : static_cast<double>(j) * ray.ds;
    try {
      if (ray.integrator == Integrator::rk4_fixed) {
        y = rk4_step(state0, y, s - s_prev, rot, s_prev);
      } else {
        rejected += rk4_doubling(state0, y, s_prev, s, h, ray, rot);
      }
    } catch (const NonFinite& nf) {
      traj.status = RayStatus::blown_up;
      traj.s_end = nf.s;
      NormReport inf;
      inf.l2 = inf.sobolev_r = inf.gevrey = inf.gevrey_quarter = inf.wiener =
          std::numeric_limits<double>::infinity();
      inf.beta_effective = p.beta_at(nf.s);
      traj.samples.push_back({nf.s, std::vector<NormReport>(y.size(), inf), inf, rejected});
      return traj;
    } catch (const Error& e) {
      traj.status = RayStatus::failed;
      traj.s_end = s_prev;
      traj.message = e.what();
      return traj;
    }
    s_prev = s;
    MemberNorms m;
    try {
      m = measure(y, p, s);
    } catch (const OverflowError&) {
      m.combined.gevrey = std::numeric_limits<double>::infinity();
    }
    const bool blown = !(m.combined.gevrey <= threshold);
    if (blown) {
      if (m.members.empty()) {
        NormReport inf;
        inf.gevrey = std::numeric_limits<double>::infinity();
        inf.beta_effective = p.beta_at(s);
        m.members.assign(y.size(), inf);
        m.combined = inf;
      }
      traj.samples.push_back({s, m.members, m.combined, rejected});
      traj.status = RayStatus::blown_up;
      traj.s_end = s;
      return traj;
    }
    if (j % ray.sample_stride == 0 || j == n_steps) {
      traj.samples.push_back({s, m.members, m.combined, rejected});
      rejected = 0;
      if (observer) observer(s, state0.with_fields(y));
    }
  }
  traj.s_end = s_limit;
  traj.status = guarded ? RayStatus::radius_exhausted : RayStatus::completed;
  return traj;
}


SweepResult sweep_theta(const ModelState& state0, const GevreyParams& p, int n_theta, const RaySpec& ray_template,
                        double blowup_factor) {
  if (n_theta < 4) throw ParameterError("sweep needs n_theta >= 4");
  SweepResult out;
  out.region = certified_radius(state0, p);
  out.trajectories.resize(static_cast<std::size_t>(n_theta));
  detail::parallel_for(out.trajectories.size(), [&](std::size_t j) {
    RaySpec ray = ray_template;
    ray.theta = 2.0 * std::numbers::pi * static_cast<double>(j) / n_theta;
    try {
      out.trajectories[j] = integrate_ray(state0, p, ray, blowup_factor);
    } catch (const Error& e) {
      RayTrajectory t;
      t.model = state0.kind();
      t.theta = ray.theta;
      t.status = RayStatus::failed;
      t.message = e.what();
      out.trajectories[j] = std::move(t);
    }
  });
  for (const auto& t : out.trajectories) {
    RayResult r;
    r.theta = t.theta;
    r.status = t.status;
    r.blew_up = t.status == RayStatus::blown_up;
    r.s_empirical = t.s_end;
    r.flagged = r.blew_up && r.s_empirical < out.region.s_certified;
    out.region.rays.push_back(r);
  }
  return out;
}

std::vector<ConvergenceRow> galerkin_convergence(const ModelState& state0, const GevreyParams& p, const RaySpec& ray,
                                                 const std::vector<int>& cutoffs) {
  if (cutoffs.empty()) throw ParameterError("galerkin_convergence needs at least one cutoff");
  for (std::size_t i = 1; i < cutoffs.size(); ++i) {
    if (cutoffs[i] <= cutoffs[i - 1]) throw ParameterError("cutoff list must be strictly increasing");
  }
  const int kmax = cutoffs.back();
  if (kmax > state0.grid().cutoff) throw ConfigError("largest cutoff exceeds the grid cutoff");

  std::vector<Fields> reference;
  const auto ref_traj = integrate_ray(state0.truncated(kmax), p, ray, 1e6,
                                      [&](double, const ModelState& st) { reference.push_back(st.fields()); });

  std::vector<ConvergenceRow> rows(cutoffs.size());
  detail::parallel_for(cutoffs.size(), [&](std::size_t i) {
    ConvergenceRow row;
    row.cutoff = cutoffs[i];
    if (cutoffs[i] == kmax) {
      row.status = ref_traj.status;
      rows[i] = row;
      return;
    }
    std::size_t idx = 0;
    double worst = 0.0;
    const auto traj = integrate_ray(state0.truncated(cutoffs[i]), p, ray, 1e6, [&](double, const ModelState& st) {
      if (idx >= reference.size()) return;
      double acc = 0.0;
      for (std::size_t m = 0; m < st.fields().size(); ++m) {
        const double d = sobolev_norm(st.field(m) - reference[idx][m], p.r);
        acc += d * d;
      }
      worst = std::max(worst, std::sqrt(acc));
      ++idx;
    });
    row.deviation = worst;
    row.status = traj.status;
    rows[i] = row;
  });
  return rows;
}

BudgetReport energy_budget(const RayTrajectory& traj, const ModelState& state0, const GevreyParams& p,
                           const CertifiedRegion& region) {
  const auto& smp = traj.samples;
  if (smp.size() < 3) throw PreconditionError("energy budget needs at least three samples");
  const double limit = 1e-3 * region.s_certified * (1.0 + 1e-9);
  for (std::size_t i = 1; i < smp.size(); ++i) {
    const double h = smp[i].s - smp[i - 1].s;
    if (h > limit) {
      throw PreconditionError("sampling too coarse for the energy budget: spacing " + std::to_string(h) +
                              " > 1e-3 s_cert = " + std::to_string(1e-3 * region.s_certified));
    }
  }
  const int dim = state0.grid().dim;
  const double factor = structural_factor(p, dim);
  const double C = region.C_used;
  BudgetReport rep;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < smp.size(); ++i) {
    const auto& prev = smp[i - 1];
    const auto& cur = smp[i];
    const auto& next = smp[i + 1];
    if (!std::isfinite(next.combined.gevrey)) break;
    const double n = cur.combined.gevrey;
    const double q = cur.combined.gevrey_quarter;
    BudgetRow row;
    row.s = cur.s;
    const double dn2 = (next.combined.gevrey * next.combined.gevrey - prev.combined.gevrey * prev.combined.gevrey) /
                       (next.s - prev.s);
    row.lhs = 0.5 * dn2 + p.delta * q * q;
    switch (traj.model) {
      case ModelKind::analytic:
        row.rhs = C * ftilde_eval(state0.params().series, p.r, dim, n).value * q * q;
        break;
      case ModelKind::boussinesq: {
        const double sum = cur.members.at(0).gevrey + cur.members.at(1).gevrey;
        row.rhs = C * factor * sum * q * q + 0.5 * state0.params().g * n * n;
        break;
      }
      default: row.rhs = C * factor * n * q * q; break;
    }
    const double v = row.rhs > 0.0 ? (row.lhs - row.rhs) / row.rhs : (row.lhs > 0.0 ? 1.0 : 0.0);
    rep.max_violation = std::max(rep.max_violation, v);
    rep.rows.push_back(row);
  }
  return rep;
}

nlohmann::json DiskCover::to_json() const {
  return {{"epsilon", num(epsilon)}, {"beta_inf", beta_inf}, {"M", M},           {"T", T},
          {"centers", centers},      {"radius", num(epsilon)}, {"overlapping", overlapping}, {"covers", covers}};
}

DiskCover chain_disks(const std::vector<ScheduleEntry>& schedule, const GevreyParams& p, int dim) {
  if (schedule.empty()) throw ParameterError("chain_disks: empty schedule");
  DiskCover out;
  out.beta_inf = std::numeric_limits<double>::infinity();
  for (const auto& e : schedule) {
    if (!(e.beta > 0.0)) throw DomainError("chain_disks: beta must be > 0 at t = " + std::to_string(e.t));
    if (!(e.M > 0.0) || !std::isfinite(e.M)) throw ParameterError("chain_disks: M must be finite and > 0");
    if (!(e.t >= 0.0)) throw ParameterError("chain_disks: schedule times must be >= 0");
    out.beta_inf = std::min(out.beta_inf, e.beta);
    out.M = std::max(out.M, e.M);
    out.T = std::max(out.T, e.t);
  }
  out.epsilon = p.constant * out.beta_inf / (structural_factor(p, dim) * out.M);
  const double eps = out.epsilon;
  // The first disk is the initial application at t = 0; restarts follow
  // every eps/2 until a disk reaches T.
  out.centers.push_back(0.0);
  while (out.centers.back() + eps < out.T) {
    out.centers.push_back(static_cast<double>(out.centers.size()) * 0.5 * eps);
  }
  out.overlapping = true;
  for (std::size_t i = 1; i < out.centers.size(); ++i) {
    if (!(out.centers[i] - out.centers[i - 1] < eps)) out.overlapping = false;
  }
  out.covers = out.overlapping && out.centers.front() - eps < 0.0 && out.centers.back() + eps >= out.T;
  return out;
}

Calibration calibrate_constant(const ModelState& state0, const GevreyParams& p, const CalibrationSpec& spec) {
  if (spec.probe_rays < 1 || spec.probe_steps < 1 || spec.probe_samples < 1 || spec.probe_betas < 2) {
    throw ParameterError("calibration needs probe_rays, probe_steps, probe_samples >= 1 and probe_betas >= 2");
  }
  EnsembleSpec es;
  es.model = state0.kind();
  es.grid = state0.grid();
  es.r = p.r;
  es.betas = {0.0, 0.5 * p.beta0, p.beta0};
  es.count = spec.count;
  es.seed = spec.seed;
  es.decays = spec.decays;
  es.params = state0.params();
  auto random = empirical_constant(es);

  Calibration out;
  out.random_C = random.C_emp;
  GevreyParams pr = p;
  pr.constant = random.C_emp;
  pr.delta = 0.0;
  out.probe_radius = certified_radius(state0, pr).s_certified;

  // The state along a ray does not depend on delta; only its weights do.
  std::vector<std::vector<ModelState>> probes(static_cast<std::size_t>(spec.probe_rays));
  detail::parallel_for(probes.size(), [&](std::size_t j) {
    RaySpec ray;
    ray.theta = 2.0 * std::numbers::pi * static_cast<double>(j) / spec.probe_rays;
    ray.ds = out.probe_radius / spec.probe_steps;
    ray.s_max = out.probe_radius;
    ray.sample_stride = std::max(1, spec.probe_steps / spec.probe_samples);
    (void)integrate_ray(state0, pr, ray, 1e6, [&](double, const ModelState& st) { probes[j].push_back(st); });
  });

  std::vector<std::pair<std::size_t, const ModelState*>> flat;
  for (std::size_t j = 0; j < probes.size(); ++j) {
    for (const auto& st : probes[j]) flat.emplace_back(j, &st);
  }
  const auto nb = static_cast<std::size_t>(spec.probe_betas);
  std::vector<EstimateReport> rows(flat.size() * nb);
  detail::parallel_for(flat.size(), [&](std::size_t i) {
    for (std::size_t b = 0; b < nb; ++b) {
      const double beta = p.beta0 * static_cast<double>(b) / static_cast<double>(nb - 1);
      auto rep = verify_estimate(*flat[i].second, p.r, beta);
      rep.seed = flat[i].first;
      rep.source = "orbit";
      rows[i * nb + b] = std::move(rep);
    }
  });
  auto all = std::move(random.rows);
  all.insert(all.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  out.constant = reduce_ensemble(state0.kind(), std::move(all), spec.seed);
  return out;
}

}  // namespace gflow
