#include "gflow/models.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "gflow/errors.hpp"
#include "gflow/gevrey.hpp"
#include "gflow/spectral_ops.hpp"

namespace gflow {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::euler: return "euler";
    case ModelKind::sqg: return "sqg";
    case ModelKind::boussinesq: return "boussinesq";
    case ModelKind::mhd: return "mhd";
    case ModelKind::analytic: return "analytic";
  }
  return "unknown";
}

ModelKind parse_model(const std::string& tag) {
  for (auto k : {ModelKind::euler, ModelKind::sqg, ModelKind::boussinesq, ModelKind::mhd, ModelKind::analytic}) {
    if (to_string(k) == tag) return k;
  }
  throw ParameterError("unknown model '" + tag + "' (expected euler, sqg, boussinesq, mhd, analytic)");
}

// ---- analytic series ------------------------------------------------------

double AnalyticSeries::radius_estimate() const {
  if (exact) return std::numeric_limits<double>::infinity();
  double root = 0.0;
  for (int n = n_max() / 2 + 1; n <= n_max(); ++n) root = std::max(root, std::pow(std::abs(a(n)), 1.0 / n));
  return root > 0.0 ? 1.0 / root : std::numeric_limits<double>::infinity();
}

void AnalyticSeries::validate() const {
  if (coeffs.empty()) throw ParameterError("analytic series needs at least one coefficient a_1");
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw ParameterError("analytic series coefficient is not finite");
  }
}

namespace {

/// Partial sum of nonnegative terms t_1..t_N with a geometric tail bound
/// from the largest consecutive-term ratio over the upper half.
SeriesValue sum_with_tail(const std::vector<double>& terms, bool exact, double radius, double s) {
  SeriesValue out;
  for (double t : terms) out.value += t;
  if (exact) return out;
  const std::size_t n = terms.size();
  double q = 0.0;
  for (std::size_t i = n / 2; i + 1 < n; ++i) {
    if (terms[i] > 0.0) q = std::max(q, terms[i + 1] / terms[i]);
  }
  if (q >= 1.0) {
    throw RadiusError("series diverges at s = " + std::to_string(s) + " (term ratio " + std::to_string(q) +
                      " >= 1; R_M estimate " + std::to_string(radius) + ")");
  }
  out.tail_bound = terms.empty() ? 0.0 : terms.back() * q / (1.0 - q);
  return out;
}

}  // namespace

SeriesValue majorant_eval(const AnalyticSeries& series, double s) {
  if (s < 0.0) throw DomainError("majorant_eval needs s >= 0");
  std::vector<double> terms;
  for (int n = 1; n <= series.n_max(); ++n) terms.push_back(std::abs(series.a(n)) * std::pow(s, n));
  return sum_with_tail(terms, series.exact, series.radius_estimate(), s);
}

SeriesValue ftilde_eval(const AnalyticSeries& series, double r, int dim, double s) {
  if (s < 0.0) throw DomainError("ftilde_eval needs s >= 0");
  const double cw = cwien(r, dim);
  std::vector<double> terms;
  for (int n = 1; n <= series.n_max(); ++n) {
    terms.push_back(std::abs(series.a(n)) * std::pow(n, r + 1.5) * std::pow(cw, n - 1) * std::pow(s, n - 1));
  }
  return sum_with_tail(terms, series.exact, series.radius_estimate() / cw, s);
}

// ---- model state ----------------------------------------------------------

ModelState ModelState::euler(SpectralField u) {
  ModelState st;
  st.kind_ = ModelKind::euler;
  st.fields_ = {std::move(u)};
  st.validate();
  return st;
}

ModelState ModelState::sqg(SpectralField eta) {
  ModelState st;
  st.kind_ = ModelKind::sqg;
  st.fields_ = {std::move(eta)};
  st.validate();
  return st;
}

ModelState ModelState::boussinesq(SpectralField u, SpectralField eta, double g, int up_axis) {
  if (!(g > 0.0)) throw ParameterError("boussinesq g must be > 0");
  ModelState st;
  st.kind_ = ModelKind::boussinesq;
  st.fields_ = {std::move(u), std::move(eta)};
  st.params_.g = g;
  st.params_.up_axis = up_axis;
  st.validate();
  return st;
}

ModelState ModelState::mhd(SpectralField v, SpectralField w, double S, double rho0) {
  if (!(S > 0.0)) throw ParameterError("mhd S must be > 0");
  if (!(rho0 > 0.0)) throw ParameterError("mhd rho0 must be > 0");
  ModelState st;
  st.kind_ = ModelKind::mhd;
  st.fields_ = {std::move(v), std::move(w)};
  st.params_.S = S;
  st.params_.rho0 = rho0;
  st.validate();
  return st;
}

ModelState ModelState::analytic(SpectralField u, AnalyticSeries series, Multiplier T) {
  series.validate();
  ModelState st;
  st.kind_ = ModelKind::analytic;
  st.fields_ = {std::move(u)};
  st.params_.series = std::move(series);
  st.params_.T = std::move(T);
  st.validate();
  return st;
}

std::vector<std::string> ModelState::member_names() const {
  switch (kind_) {
    case ModelKind::euler: return {"u"};
    case ModelKind::sqg: return {"eta"};
    case ModelKind::boussinesq: return {"u", "eta"};
    case ModelKind::mhd: return {"v", "w"};
    case ModelKind::analytic: return {"u"};
  }
  return {};
}

int ModelState::up_axis() const { return params_.up_axis < 0 ? grid().dim - 1 : params_.up_axis; }

ModelState ModelState::with_fields(std::vector<SpectralField> fields) const {
  ModelState st = *this;
  st.fields_ = std::move(fields);
  return st;
}

ModelState ModelState::truncated(int cutoff) const {
  std::vector<SpectralField> f;
  for (const auto& m : fields_) f.push_back(galerkin_truncate(m, cutoff));
  return with_fields(std::move(f));
}

void ModelState::validate() const {
  const auto names = member_names();
  if (fields_.size() != names.size()) throw StateError(to_string(kind_) + " state has the wrong member count");
  const int d = fields_.front().grid().dim;
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    const auto& f = fields_[i];
    if (!(f.grid() == fields_.front().grid())) throw StateError("state members live on different grids");
    for (int c = 0; c < f.components(); ++c) {
      if (f.at(c, 0) != cplx{}) throw StateError("member '" + names[i] + "' is not mean-free");
    }
  }
  const auto need_vector = [&](std::size_t i) {
    const auto& f = fields_[i];
    if (f.components() != d) throw StateError("member '" + names[i] + "' must be a " + std::to_string(d) + "-vector");
    const double defect = f.divergence_defect();
    if (defect > 1e-12) {
      throw StateError("member '" + names[i] + "' is not divergence-free (defect " + std::to_string(defect) + ")");
    }
  };
  const auto need_scalar = [&](std::size_t i) {
    if (fields_[i].components() != 1) throw StateError("member '" + names[i] + "' must be a scalar");
  };
  switch (kind_) {
    case ModelKind::euler: need_vector(0); break;
    case ModelKind::sqg:
      if (d != 2) throw StateError("sqg is defined for d = 2 only");
      need_scalar(0);
      break;
    case ModelKind::boussinesq:
      need_vector(0);
      need_scalar(1);
      if (up_axis() < 0 || up_axis() >= d) throw StateError("boussinesq up axis out of range");
      break;
    case ModelKind::mhd:
      need_vector(0);
      need_vector(1);
      break;
    case ModelKind::analytic:
      need_scalar(0);
      if (params_.T.symbol({0, 0, 0}) != cplx{}) {
        throw StateError("analytic model multiplier T must satisfy m_T(0) = 0 (mean-free preservation)");
      }
      break;
  }
}

nlohmann::json ModelState::sidecar() const {
  nlohmann::json j{{"model", to_string(kind_)}, {"members", member_names()}};
  const auto& g = grid();
  j["grid"] = {{"dim", g.dim}, {"n", g.n}, {"cutoff", g.cutoff}};
  switch (kind_) {
    case ModelKind::boussinesq: j["params"] = {{"g", params_.g}, {"up_axis", up_axis()}}; break;
    case ModelKind::mhd: j["params"] = {{"S", params_.S}, {"rho0", params_.rho0}}; break;
    case ModelKind::analytic:
      j["params"] = {{"series", params_.series.coeffs}, {"series_exact", params_.series.exact},
                     {"T", params_.T.describe()}};
      break;
    default: j["params"] = nlohmann::json::object(); break;
  }
  return j;
}

// ---- right-hand sides -----------------------------------------------------

SpectralField sqg_velocity(const SpectralField& eta) {
  if (eta.components() != 1 || eta.grid().dim != 2) throw FieldTypeError("sqg_velocity expects a 2D scalar");
  const auto r1 = apply_multiplier(eta, Multiplier::riesz(0));
  const auto r2 = apply_multiplier(eta, Multiplier::riesz(1));
  SpectralField u(eta.grid(), 2, FieldFlags{true, true, eta.flags().hermitian});
  auto u0 = u.component(0);
  auto u1 = u.component(1);
  auto a = r2.component(0);
  auto b = r1.component(0);
  for (std::size_t i = 0; i < u.points(); ++i) {
    u0[i] = -a[i];
    u1[i] = b[i];
  }
  return u;
}

namespace {

SpectralField negated(SpectralField f) {
  f *= -1.0;
  return f;
}

SpectralField analytic_nonlinearity(const ModelState& st) {
  const auto& u = st.field(0);
  const auto& series = st.params().series;
  const double radius = series.radius_estimate();
  if (std::isfinite(radius)) {
    const double sup = sup_norm_on_grid(u);
    if (sup > 0.9 * radius) {
      throw RadiusError("analytic model: ||u||_Linf = " + std::to_string(sup) + " exceeds 0.9 R_M = " +
                        std::to_string(0.9 * radius));
    }
  }
  SpectralField power = u;
  power.set_flags({false, false, u.flags().hermitian});
  SpectralField acc(u.grid(), 1, FieldFlags{false, false, u.flags().hermitian});
  for (int n = 1; n <= series.n_max(); ++n) {
    if (n > 1) power = pointwise_product(power, u);
    if (series.a(n) != 0.0) acc.axpy(series.a(n), power);
  }
  auto out = apply_multiplier(acc, st.params().T);
  out.at(0, 0) = 0.0;
  out.set_flags({true, false, out.flags().hermitian});
  return out;
}

}  // namespace

ModelState rhs(const ModelState& state) {
  state.validate();
  switch (state.kind()) {
    case ModelKind::euler: {
      const auto& u = state.field(0);
      return state.with_fields({negated(bilinear_advect(u, u, true))});
    }
    case ModelKind::sqg: {
      const auto& eta = state.field(0);
      const auto u = sqg_velocity(eta);
      return state.with_fields({negated(bilinear_advect(u, eta, false))});
    }
    case ModelKind::boussinesq: {
      const auto& u = state.field(0);
      const auto& eta = state.field(1);
      auto du = negated(bilinear_advect(u, u, true));
      SpectralField buoy(u.grid(), u.grid().dim, FieldFlags{true, false, eta.flags().hermitian});
      const auto src = eta.component(0);
      auto dst = buoy.component(state.up_axis());
      for (std::size_t i = 0; i < buoy.points(); ++i) dst[i] = state.params().g * src[i];
      du += leray_project(buoy);
      auto deta = negated(bilinear_advect(u, eta, false));
      return state.with_fields({std::move(du), std::move(deta)});
    }
    case ModelKind::mhd: {
      const auto& v = state.field(0);
      const auto& w = state.field(1);
      return state.with_fields({negated(bilinear_advect(w, v, true)), negated(bilinear_advect(v, w, true))});
    }
    case ModelKind::analytic:
      return state.with_fields({analytic_nonlinearity(state)});
  }
  throw StateError("unknown model kind");
}

// ---- Elsasser variables ---------------------------------------------------

std::pair<SpectralField, SpectralField> elsasser_from_primitive(const SpectralField& u, const SpectralField& b,
                                                                double S) {
  if (!(S > 0.0)) throw ParameterError("Elsasser transform needs S > 0");
  const double k = 1.0 / std::sqrt(S);
  SpectralField v = u;
  v.axpy(k, b);
  SpectralField w = u;
  w.axpy(-k, b);
  return {std::move(v), std::move(w)};
}

std::pair<SpectralField, SpectralField> primitive_from_elsasser(const SpectralField& v, const SpectralField& w,
                                                                double S) {
  if (!(S > 0.0)) throw ParameterError("Elsasser transform needs S > 0");
  SpectralField u = v;
  u += w;
  u *= 0.5;
  SpectralField b = v;
  b -= w;
  b *= 0.5 * std::sqrt(S);
  return {std::move(u), std::move(b)};
}

// ---- catalog --------------------------------------------------------------

namespace {

using Sampler = std::function<double(double, double, double)>;

/// Spectral field of real trigonometric data sampled on the grid; rounding
/// noise below 1e-14 of the peak is removed and the coefficients are made
/// exactly Hermitian.
SpectralField sample_field(const GridSpec& grid, const std::vector<Sampler>& comps, FieldFlags flags) {
  PhysicalField p{grid, static_cast<int>(comps.size()), {}};
  const int n = grid.n;
  const std::size_t np = grid.points();
  p.values.resize(np * comps.size());
  const double h = 2.0 * std::numbers::pi / n;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (std::size_t idx = 0; idx < np; ++idx) {
      std::size_t rem = idx;
      double x[3] = {0.0, 0.0, 0.0};
      for (int a = grid.dim - 1; a >= 0; --a) {
        x[a] = h * static_cast<double>(rem % n);
        rem /= n;
      }
      p.values[c * np + idx] = comps[c](x[0], x[1], x[2]);
    }
  }
  SpectralField f = to_spectral(p, flags);
  const double peak = f.max_abs();
  const auto lat = lattice_for(grid.dim, grid.n);
  for (int c = 0; c < f.components(); ++c) {
    auto comp = f.component(c);
    for (auto& z : comp) {
      if (std::abs(z.real()) < 1e-14 * peak) z.real(0.0);
      if (std::abs(z.imag()) < 1e-14 * peak) z.imag(0.0);
    }
    for (std::size_t i = 0; i < np; ++i) {
      const std::size_t j = lat->neg[i];
      if (i < j) {
        const cplx avg = 0.5 * (comp[i] + std::conj(comp[j]));
        comp[i] = avg;
        comp[j] = std::conj(avg);
      }
    }
  }
  f.enforce_truncation();
  return f;
}

SpectralField taylor_green(const GridSpec& g) {
  using std::cos;
  using std::sin;
  const FieldFlags fl{true, true, true};
  if (g.dim == 2) {
    return sample_field(g,
                        {[](double x, double y, double) { return sin(x) * cos(y); },
                         [](double x, double y, double) { return -cos(x) * sin(y); }},
                        fl);
  }
  return sample_field(g,
                      {[](double x, double y, double z) { return sin(x) * cos(y) * cos(z); },
                       [](double x, double y, double z) { return -cos(x) * sin(y) * cos(z); },
                       [](double, double, double) { return 0.0; }},
                      fl);
}

SpectralField scalar_field(const GridSpec& g, Sampler s) { return sample_field(g, {std::move(s)}, {true, false, true}); }

void require_model(const CatalogRequest& req, std::initializer_list<ModelKind> allowed) {
  if (std::find(allowed.begin(), allowed.end(), req.model) == allowed.end()) {
    throw ParameterError("catalog entry '" + req.name + "' does not provide " + to_string(req.model) + " data");
  }
}

void require_dim(const CatalogRequest& req, int dim) {
  if (req.grid.dim != dim) {
    throw ParameterError("catalog entry '" + req.name + "' needs d = " + std::to_string(dim));
  }
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"taylor_green_2d", "u = (sin x cos y, -cos x sin y); steady Euler datum", {ModelKind::euler}},
      {"taylor_green_3d", "u = (sin x cos y cos z, -cos x sin y cos z, 0)", {ModelKind::euler}},
      {"sqg_single_mode", "eta = sin x; steady SQG state", {ModelKind::sqg}},
      {"sqg_two_mode", "eta = cos x + 0.5 cos 2y", {ModelKind::sqg}},
      {"bouss_stratified", "u = Taylor-Green, eta = cos x cos y", {ModelKind::boussinesq}},
      {"mhd_alfven", "v = Taylor-Green, w = 0 (u = b/sqrt(S)); exact steady state", {ModelKind::mhd}},
      {"analytic_gaussian_modes", "u(k) = 0.25 exp(-|k|^2/4) on the Galerkin ball", {ModelKind::analytic}},
      {"random_gevrey",
       "|u(k)| ~ U(0,1) exp(-beta_decay |k|), random phases, Hermitian, projected; parameters seed, beta_decay",
       {ModelKind::euler, ModelKind::sqg, ModelKind::boussinesq, ModelKind::mhd, ModelKind::analytic}},
  };
  return entries;
}

SpectralField random_gevrey_field(const GridSpec& grid, int components, std::uint64_t seed, double beta_decay) {
  grid.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SpectralField f(grid, components, FieldFlags{true, false, true});
  const auto lat = lattice_for(grid.dim, grid.n);
  for (std::size_t i : *ball_for(grid)) {
    const std::size_t j = lat->neg[i];
    if (j < i) continue;
    for (int c = 0; c < components; ++c) {
      const double rho = unit(rng) * std::exp(-beta_decay * lat->kabs[i]);
      const double phi = 2.0 * std::numbers::pi * unit(rng);
      const cplx z = std::polar(rho, phi);
      f.at(c, i) = z;
      f.at(c, j) = std::conj(z);
    }
  }
  if (components > 1) return leray_project(f);
  return f;
}

ModelState initial_data(const CatalogRequest& req) {
  req.grid.validate();
  const auto& g = req.grid;
  const auto& prm = req.params;
  const auto known = std::any_of(catalog().begin(), catalog().end(), [&](const auto& e) { return e.name == req.name; });
  if (!known) throw ParameterError("unknown initial data '" + req.name + "' (see `gevrey-flow catalog`)");

  if (req.name == "taylor_green_2d") {
    require_model(req, {ModelKind::euler});
    require_dim(req, 2);
    return ModelState::euler(taylor_green(g));
  }
  if (req.name == "taylor_green_3d") {
    require_model(req, {ModelKind::euler});
    require_dim(req, 3);
    return ModelState::euler(taylor_green(g));
  }
  if (req.name == "sqg_single_mode") {
    require_model(req, {ModelKind::sqg});
    return ModelState::sqg(scalar_field(g, [](double x, double, double) { return std::sin(x); }));
  }
  if (req.name == "sqg_two_mode") {
    require_model(req, {ModelKind::sqg});
    return ModelState::sqg(
        scalar_field(g, [](double x, double y, double) { return std::cos(x) + 0.5 * std::cos(2.0 * y); }));
  }
  if (req.name == "bouss_stratified") {
    require_model(req, {ModelKind::boussinesq});
    auto eta = scalar_field(g, [](double x, double y, double) { return std::cos(x) * std::cos(y); });
    return ModelState::boussinesq(taylor_green(g), std::move(eta), prm.g, prm.up_axis);
  }
  if (req.name == "mhd_alfven") {
    require_model(req, {ModelKind::mhd});
    SpectralField w(g, g.dim, FieldFlags{true, true, true});
    return ModelState::mhd(taylor_green(g), std::move(w), prm.S, prm.rho0);
  }
  if (req.name == "analytic_gaussian_modes") {
    require_model(req, {ModelKind::analytic});
    SpectralField u(g, 1, FieldFlags{true, false, true});
    const auto lat = lattice_for(g.dim, g.n);
    for (std::size_t i : *ball_for(g)) u.at(0, i) = 0.25 * std::exp(-0.25 * static_cast<double>(lat->k2[i]));
    return ModelState::analytic(std::move(u), prm.series, prm.T);
  }
  // random_gevrey
  const auto seed = req.seed;
  const double bd = req.beta_decay;
  switch (req.model) {
    case ModelKind::euler: return ModelState::euler(random_gevrey_field(g, g.dim, seed, bd));
    case ModelKind::sqg: return ModelState::sqg(random_gevrey_field(g, 1, seed, bd));
    case ModelKind::boussinesq:
      return ModelState::boussinesq(random_gevrey_field(g, g.dim, seed, bd),
                                    random_gevrey_field(g, 1, seed + 1, bd), prm.g, prm.up_axis);
    case ModelKind::mhd:
      return ModelState::mhd(random_gevrey_field(g, g.dim, seed, bd), random_gevrey_field(g, g.dim, seed + 1, bd),
                             prm.S, prm.rho0);
    case ModelKind::analytic:
      return ModelState::analytic(random_gevrey_field(g, 1, seed, bd), prm.series, prm.T);
  }
  throw ParameterError("unreachable catalog branch");
}

}  // namespace gflow
