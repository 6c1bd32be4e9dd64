#include "gflow/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "gflow/errors.hpp"
#include "gflow/gevrey.hpp"
#include "gflow/spectral_ops.hpp"
#include "parallel.hpp"

namespace gflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double weight(double kabs, double r, double beta) {
  if (kabs == 0.0) return 0.0;
  const double w = std::exp(2.0 * r * std::log(kabs) + 2.0 * beta * kabs);
  if (!std::isfinite(w)) {
    throw OverflowError("pairing weight |k|^{2r} e^{2 beta |k|} overflows at |k| = " + std::to_string(kabs));
  }
  return w;
}

void require_same_grid(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw ConfigError("estimate: fields live on different grids");
}

/// Indices with |k| <= K including k = 0.
std::vector<std::size_t> closed_ball(const GridSpec& g) {
  std::vector<std::size_t> out{0};
  const auto& b = *ball_for(g);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

double structural(double r, int dim) { return std::pow(2.0, r) * cwien(r, dim); }

double quarter(const SpectralField& f, double r, double beta) { return weighted_norm(f, r + 0.5, beta); }

void finish(EstimateReport& rep) {
  rep.ratio = rep.rhs_without_C > 0.0 ? rep.lhs / rep.rhs_without_C : 0.0;
  if (!std::isfinite(rep.ratio)) throw OverflowError("estimate ratio is not finite");
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t i) {
  // splitmix64 finaliser: well-separated member seeds from one ensemble seed
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

nlohmann::json EstimateReport::to_json() const {
  nlohmann::json j{{"lhs", lhs},
                   {"lhs_spectral", lhs_spectral},
                   {"rhs_without_C", rhs_without_C},
                   {"ratio", ratio},
                   {"norm", norm},
                   {"norm_quarter", norm_quarter},
                   {"seed", seed},
                   {"grid", {{"dim", grid.dim}, {"n", grid.n}, {"cutoff", grid.cutoff}}},
                   {"r", r},
                   {"beta", beta},
                   {"source", source}};
  if (!terms.empty()) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& e : terms) t.push_back({{"n", e.n}, {"lhs", e.lhs}, {"bound", e.bound}, {"ratio", e.ratio}});
    j["terms"] = t;
  }
  return j;
}

cplx gevrey_pairing(const SpectralField& f, const SpectralField& g, double r, double beta) {
  require_same_grid(f, g);
  if (f.components() != g.components()) throw FieldTypeError("pairing of fields with different component counts");
  const auto lat = lattice_for(f.grid().dim, f.grid().n);
  cplx acc{};
  for (std::size_t i : *ball_for(f.grid())) {
    cplx local{};
    for (int c = 0; c < f.components(); ++c) local += f.at(c, i) * std::conj(g.at(c, i));
    if (local != cplx{}) acc += weight(lat->kabs[i], r, beta) * local;
  }
  return std::pow(kTwoPi, f.grid().dim) * acc;
}

cplx advect_pairing_direct(const SpectralField& u, const SpectralField& v, const SpectralField& w, double r,
                           double beta) {
  require_same_grid(u, v);
  require_same_grid(u, w);
  const auto& g = u.grid();
  const int d = g.dim;
  if (u.components() != d) throw FieldTypeError("advecting field must be a d-vector");
  if (v.components() != w.components()) throw FieldTypeError("advected and test fields differ in components");
  const auto lat = lattice_for(d, g.n);
  const auto& ball = *ball_for(g);
  const long K2 = static_cast<long>(g.cutoff) * g.cutoff;
  const int nc = v.components();
  cplx total{};
  std::vector<cplx> wk(static_cast<std::size_t>(nc));
  for (std::size_t ki : ball) {
    const double wt = weight(lat->kabs[ki], r, beta);
    bool any = false;
    for (int c = 0; c < nc; ++c) {
      wk[c] = wt * std::conj(w.at(c, ki));
      any = any || wk[c] != cplx{};
    }
    if (!any) continue;
    const auto& k = lat->k[ki];
    cplx acc{};
    for (std::size_t hi : ball) {
      const auto& h = lat->k[hi];
      const Wavevector j{k[0] - h[0], k[1] - h[1], k[2] - h[2]};
      const long j2 = norm2(j);
      if (j2 == 0 || j2 > K2) continue;
      const std::size_t ji = lat->index_of(j);
      cplx udotj{};
      for (int a = 0; a < d; ++a) udotj += u.at(a, hi) * static_cast<double>(j[a]);
      if (udotj == cplx{}) continue;
      cplx vw{};
      for (int c = 0; c < nc; ++c) vw += v.at(c, ji) * wk[c];
      acc += udotj * vw;
    }
    total += acc;
  }
  // u(h) . (i j) v(j): the factor i is applied once at the end.
  return std::pow(kTwoPi, d) * cplx{0.0, 1.0} * total;
}

SpectralField product_direct(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b);
  if (a.components() != 1 || b.components() != 1) throw FieldTypeError("product_direct expects scalars");
  const auto& g = a.grid();
  const auto lat = lattice_for(g.dim, g.n);
  const auto ball = closed_ball(g);
  const long K2 = static_cast<long>(g.cutoff) * g.cutoff;
  SpectralField out(g, 1, FieldFlags{false, false, a.flags().hermitian && b.flags().hermitian});
  for (std::size_t ki : ball) {
    const auto& k = lat->k[ki];
    cplx acc{};
    for (std::size_t hi : ball) {
      const cplx ah = a.at(0, hi);
      if (ah == cplx{}) continue;
      const auto& h = lat->k[hi];
      const Wavevector j{k[0] - h[0], k[1] - h[1], k[2] - h[2]};
      if (norm2(j) > K2) continue;
      acc += ah * b.at(0, lat->index_of(j));
    }
    out.at(0, ki) = acc;
  }
  return out;
}

EstimateReport verify_euler_estimate(const SpectralField& u, double r, double beta) {
  const int d = u.grid().dim;
  EstimateReport rep;
  rep.grid = u.grid();
  rep.r = r;
  rep.beta = beta;
  rep.lhs = std::abs(advect_pairing_direct(u, u, u, r, beta));
  rep.lhs_spectral = std::abs(gevrey_pairing(bilinear_advect(u, u, false), u, r, beta));
  rep.norm = gevrey_norm(u, r, beta);
  rep.norm_quarter = quarter(u, r, beta);
  rep.rhs_without_C = structural(r, d) * rep.norm * rep.norm_quarter * rep.norm_quarter;
  finish(rep);
  return rep;
}

EstimateReport verify_sqg_estimate(const SpectralField& eta, double r, double beta) {
  const auto u = sqg_velocity(eta);
  EstimateReport rep;
  rep.grid = eta.grid();
  rep.r = r;
  rep.beta = beta;
  rep.lhs = std::abs(advect_pairing_direct(u, eta, eta, r, beta));
  rep.lhs_spectral = std::abs(gevrey_pairing(bilinear_advect(u, eta, false), eta, r, beta));
  rep.norm = gevrey_norm(eta, r, beta);
  rep.norm_quarter = quarter(eta, r, beta);
  rep.rhs_without_C = structural(r, 2) * rep.norm * rep.norm_quarter * rep.norm_quarter;
  finish(rep);
  return rep;
}

EstimateReport verify_mhd_estimate(const SpectralField& v, const SpectralField& w, double r, double beta) {
  const int d = v.grid().dim;
  EstimateReport rep;
  rep.grid = v.grid();
  rep.r = r;
  rep.beta = beta;
  rep.lhs = std::abs(advect_pairing_direct(w, v, v, r, beta)) + std::abs(advect_pairing_direct(v, w, w, r, beta));
  rep.lhs_spectral = std::abs(gevrey_pairing(bilinear_advect(w, v, false), v, r, beta)) +
                     std::abs(gevrey_pairing(bilinear_advect(v, w, false), w, r, beta));
  const double nv = gevrey_norm(v, r, beta);
  const double nw = gevrey_norm(w, r, beta);
  const double qv = quarter(v, r, beta);
  const double qw = quarter(w, r, beta);
  rep.norm = std::hypot(nv, nw);
  rep.norm_quarter = std::hypot(qv, qw);
  rep.rhs_without_C = structural(r, d) * rep.norm * (qv * qv + qw * qw);
  finish(rep);
  return rep;
}

EstimateReport verify_boussinesq_estimate(const SpectralField& u, const SpectralField& eta, double r, double beta) {
  const int d = u.grid().dim;
  EstimateReport rep;
  rep.grid = u.grid();
  rep.r = r;
  rep.beta = beta;
  rep.lhs =
      std::abs(advect_pairing_direct(u, u, u, r, beta)) + std::abs(advect_pairing_direct(u, eta, eta, r, beta));
  rep.lhs_spectral = std::abs(gevrey_pairing(bilinear_advect(u, u, false), u, r, beta)) +
                     std::abs(gevrey_pairing(bilinear_advect(u, eta, false), eta, r, beta));
  const double nu = gevrey_norm(u, r, beta);
  const double ne = gevrey_norm(eta, r, beta);
  const double qu = quarter(u, r, beta);
  const double qe = quarter(eta, r, beta);
  rep.norm = std::hypot(nu, ne);
  rep.norm_quarter = std::hypot(qu, qe);
  rep.rhs_without_C = structural(r, d) * (nu + ne) * (qu * qu + qe * qe);
  finish(rep);
  return rep;
}

EstimateReport verify_analytic_estimate(const SpectralField& u, const AnalyticSeries& series, const Multiplier& T,
                                        double r, double beta) {
  if (u.components() != 1) throw FieldTypeError("analytic estimate expects a scalar field");
  series.validate();
  const int d = u.grid().dim;
  EstimateReport rep;
  rep.grid = u.grid();
  rep.r = r;
  rep.beta = beta;
  rep.norm = gevrey_norm(u, r, beta);
  rep.norm_quarter = quarter(u, r, beta);
  const double cw = cwien(r, d);
  const double q2 = rep.norm_quarter * rep.norm_quarter;

  cplx total_direct{};
  cplx total_spectral{};
  SpectralField pow_direct = u;
  SpectralField pow_spectral = u;
  for (int n = 1; n <= series.n_max(); ++n) {
    if (n > 1) {
      pow_direct = product_direct(pow_direct, u);
      pow_spectral = pointwise_product(pow_spectral, u);
    }
    const double an = series.a(n);
    if (an == 0.0) continue;
    auto td = apply_multiplier(pow_direct, T);
    td *= an;
    auto ts = apply_multiplier(pow_spectral, T);
    ts *= an;
    const cplx pd = gevrey_pairing(td, u, r, beta);
    total_direct += pd;
    total_spectral += gevrey_pairing(ts, u, r, beta);
    TermReport t;
    t.n = n;
    t.lhs = std::abs(pd);
    t.bound = std::abs(an) * std::pow(n, r + 1.5) * std::pow(cw, n - 1) * q2 * std::pow(rep.norm, n - 1);
    t.ratio = t.bound > 0.0 ? t.lhs / t.bound : 0.0;
    rep.terms.push_back(t);
  }
  rep.lhs = std::abs(total_direct);
  rep.lhs_spectral = std::abs(total_spectral);
  rep.rhs_without_C = ftilde_eval(series, r, d, rep.norm).value * q2;
  finish(rep);
  return rep;
}

EstimateReport verify_estimate(const ModelState& state, double r, double beta) {
  switch (state.kind()) {
    case ModelKind::euler: return verify_euler_estimate(state.field(0), r, beta);
    case ModelKind::sqg: return verify_sqg_estimate(state.field(0), r, beta);
    case ModelKind::mhd: return verify_mhd_estimate(state.field(0), state.field(1), r, beta);
    case ModelKind::boussinesq: return verify_boussinesq_estimate(state.field(0), state.field(1), r, beta);
    case ModelKind::analytic:
      return verify_analytic_estimate(state.field(0), state.params().series, state.params().T, r, beta);
  }
  throw ParameterError("unknown model");
}

// ---- wavenumber lemmas ------------------------------------------------------

long LemmaReport::total_violations() const {
  long v = 0;
  for (const auto& l : lemmas) v += l.violations;
  return v;
}

nlohmann::json LemmaReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& l : lemmas) {
    arr.push_back({{"name", l.name}, {"checks", l.checks}, {"violations", l.violations}, {"worst_ratio", l.worst_ratio}});
  }
  return {{"lemmas", arr}, {"total_violations", total_violations()}};
}

LemmaReport verify_wavenumber_lemmas(const LemmaSpec& spec) {
  if (spec.dim != 2 && spec.dim != 3) throw ParameterError("lemma sweep dimension must be 2 or 3");
  if (spec.max_norm < 1) throw ParameterError("lemma sweep max_norm must be >= 1");
  // Comparisons carry a relative slack of 1e-12 for floating-point powers.
  constexpr double slack = 1.0 + 1e-12;
  LemmaCount tri{"triangle_power"};
  LemmaCount prod{"product_bound"};
  LemmaCount tup{"tuple_power"};
  LemmaCount lat{"lattice_tuple"};
  const auto note = [&](LemmaCount& c, double lhs, double rhs) {
    ++c.checks;
    const double ratio = lhs / rhs;
    c.worst_ratio = std::max(c.worst_ratio, ratio);
    if (!(lhs <= rhs * slack)) ++c.violations;
  };

  std::vector<Wavevector> shell;
  const int m = spec.max_norm;
  const int zmax = spec.dim == 3 ? m : 0;
  for (int a = -m; a <= m; ++a) {
    for (int b = -m; b <= m; ++b) {
      for (int c = -zmax; c <= zmax; ++c) {
        const Wavevector v{a, b, c};
        const long n2 = norm2(v);
        if (n2 > 0 && n2 <= static_cast<long>(m) * m) shell.push_back(v);
      }
    }
  }
  for (const auto& h : shell) {
    const double hn = std::sqrt(static_cast<double>(norm2(h)));
    for (const auto& j : shell) {
      const Wavevector k{h[0] + j[0], h[1] + j[1], h[2] + j[2]};
      const long k2 = norm2(k);
      if (k2 == 0) continue;
      const double jn = std::sqrt(static_cast<double>(norm2(j)));
      const double kn = std::sqrt(static_cast<double>(k2));
      for (double r : spec.r_values) note(tri, std::pow(kn, r), std::pow(2.0, r - 1.0) * (std::pow(hn, r) + std::pow(jn, r)));
      // In the pairing h + j = k with all three nonzero, j = k - h.
      note(prod, jn, hn + kn);
      note(prod, hn + kn, 2.0 * hn * kn);
    }
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> pos(1e-3, 10.0);
  std::uniform_int_distribution<int> len(1, std::max(1, spec.max_tuple_length));
  std::uniform_int_distribution<int> comp(-m, m);
  std::uniform_int_distribution<std::size_t> pick_r(0, spec.r_values.size() - 1);
  for (int t = 0; t < spec.random_tuples; ++t) {
    const int n = len(rng);
    const double r = spec.r_values[pick_r(rng)];
    double sum = 0.0;
    double sum_r = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = pos(rng);
      sum += x;
      sum_r += std::pow(x, r);
    }
    note(tup, std::pow(sum, r), std::pow(n, r) * sum_r);

    Wavevector k{0, 0, 0};
    double hsum_r = 0.0;
    double hprod = 1.0;
    for (int i = 0; i < n; ++i) {
      Wavevector h{};
      do {
        h = {comp(rng), comp(rng), spec.dim == 3 ? comp(rng) : 0};
      } while (norm2(h) == 0);
      const double hn = std::sqrt(static_cast<double>(norm2(h)));
      hsum_r += std::pow(hn, r);
      hprod *= hn;
      for (int a = 0; a < 3; ++a) k[a] += h[a];
    }
    if (norm2(k) == 0) continue;
    const double kn = std::sqrt(static_cast<double>(norm2(k)));
    note(lat, std::pow(kn, r), std::pow(n, r) * hsum_r);
    note(lat, kn, n * hprod);
  }
  LemmaReport rep;
  rep.lemmas = {tri, prod, tup, lat};
  return rep;
}

// ---- ensembles ---------------------------------------------------------------

SpectralField random_complex_field(const GridSpec& grid, int components, std::uint64_t seed, double decay,
                                   bool div_free) {
  grid.validate();
  if (div_free && components != grid.dim) throw FieldTypeError("div_free random field must be a d-vector");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto lat = lattice_for(grid.dim, grid.n);
  SpectralField f(grid, components, FieldFlags{true, false, false});
  for (std::size_t i : *ball_for(grid)) {
    const double rho = std::exp(-decay * lat->kabs[i]);
    for (int c = 0; c < components; ++c) {
      const double amp = rho * unit(rng);
      f.at(c, i) = std::polar(amp, kTwoPi * unit(rng));
    }
  }
  if (div_free) f = leray_project(f);
  return f;
}

ModelState random_complex_state(ModelKind model, const GridSpec& grid, std::uint64_t seed, double decay,
                                const ModelParameters& params) {
  const int d = grid.dim;
  const auto vec = [&](std::uint64_t i) { return random_complex_field(grid, d, sub_seed(seed, i), decay, true); };
  const auto sca = [&](std::uint64_t i) { return random_complex_field(grid, 1, sub_seed(seed, i), decay, false); };
  switch (model) {
    case ModelKind::euler: return ModelState::euler(vec(0));
    case ModelKind::sqg: return ModelState::sqg(sca(0));
    case ModelKind::boussinesq: return ModelState::boussinesq(vec(0), sca(1), params.g, params.up_axis);
    case ModelKind::mhd: return ModelState::mhd(vec(0), vec(1), params.S, params.rho0);
    case ModelKind::analytic: return ModelState::analytic(sca(0), params.series, params.T);
  }
  throw ParameterError("unknown model");
}

std::vector<int> EmpiricalConstant::histogram(int bins) const {
  std::vector<int> h(static_cast<std::size_t>(std::max(1, bins)), 0);
  if (max_ratio <= 0.0) {
    h[0] = static_cast<int>(rows.size());
    return h;
  }
  for (const auto& row : rows) {
    auto b = static_cast<std::size_t>(row.ratio / max_ratio * static_cast<double>(h.size()));
    h[std::min(b, h.size() - 1)]++;
  }
  return h;
}

nlohmann::json EmpiricalConstant::to_json() const {
  return {{"model", to_string(model)},   {"C_emp", C_emp},        {"max_ratio", max_ratio},
          {"safety", safety},            {"degenerate", degenerate}, {"seed", seed},
          {"samples", rows.size()},      {"histogram", {{"bins", 20}, {"upper", max_ratio}, {"counts", histogram(20)}}}};
}

void EmpiricalConstant::write_csv(std::ostream& out) const {
  out << "sample,source,seed,beta,r,lhs,lhs_spectral,rhs_without_C,ratio,norm,norm_quarter\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& e = rows[i];
    out << i << ',' << e.source << ',' << e.seed << ',' << fmt(e.beta) << ',' << fmt(e.r) << ',' << fmt(e.lhs) << ','
        << fmt(e.lhs_spectral) << ',' << fmt(e.rhs_without_C) << ',' << fmt(e.ratio) << ',' << fmt(e.norm) << ','
        << fmt(e.norm_quarter) << '\n';
  }
}

EmpiricalConstant reduce_ensemble(ModelKind model, std::vector<EstimateReport> rows, std::uint64_t seed) {
  if (rows.size() < 100) {
    throw ParameterError("empirical constant needs an ensemble of at least 100 samples, got " +
                         std::to_string(rows.size()));
  }
  EmpiricalConstant out;
  out.model = model;
  out.seed = seed;
  for (const auto& r : rows) out.max_ratio = std::max(out.max_ratio, r.ratio);
  out.rows = std::move(rows);
  out.degenerate = out.max_ratio <= 1e-12;
  out.C_emp = out.degenerate ? 1.0 : out.safety * out.max_ratio;
  return out;
}

EmpiricalConstant empirical_constant(const EnsembleSpec& spec) {
  if (spec.count < 1 || spec.betas.empty() || spec.decays.empty()) {
    throw ParameterError("ensemble needs count >= 1, at least one beta and one decay rate");
  }
  const std::size_t nb = spec.betas.size();
  std::vector<EstimateReport> rows(static_cast<std::size_t>(spec.count) * nb);
  detail::parallel_for(static_cast<std::size_t>(spec.count), [&](std::size_t i) {
    const std::uint64_t seed = spec.seed + i;
    const auto state = random_complex_state(spec.model, spec.grid, seed, spec.decays[i % spec.decays.size()], spec.params);
    for (std::size_t b = 0; b < nb; ++b) {
      auto rep = verify_estimate(state, spec.r, spec.betas[b]);
      rep.seed = seed;
      rows[i * nb + b] = std::move(rep);
    }
  });
  return reduce_ensemble(spec.model, std::move(rows), spec.seed);
}

EmpiricalConstant empirical_constant(const std::vector<ModelState>& states, double r, const std::vector<double>& betas,
                                     std::uint64_t seed) {
  if (states.empty() || betas.empty()) throw ParameterError("ensemble needs states and at least one beta");
  const std::size_t nb = betas.size();
  std::vector<EstimateReport> rows(states.size() * nb);
  detail::parallel_for(states.size(), [&](std::size_t i) {
    for (std::size_t b = 0; b < nb; ++b) {
      auto rep = verify_estimate(states[i], r, betas[b]);
      rep.seed = seed;
      rows[i * nb + b] = std::move(rep);
    }
  });
  return reduce_ensemble(states.front().kind(), std::move(rows), seed);
}

}  // namespace gflow
