#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gflow/multiplier.hpp"
#include "gflow/spectral_field.hpp"
#include "json.hpp"

namespace gflow {

enum class ModelKind { euler, sqg, boussinesq, mhd, analytic };

[[nodiscard]] std::string to_string(ModelKind kind);
/// Throws ParameterError for an unknown tag.
[[nodiscard]] ModelKind parse_model(const std::string& tag);

/// F(z) = sum_{n >= 1} a_n z^n, stored as a_1 .. a_{n_max}.
///
/// `exact` marks a polynomial whose coefficients beyond n_max vanish; a
/// non-exact series is a truncation of an infinite one and carries a tail
/// estimate.
struct AnalyticSeries {
  std::vector<double> coeffs;
  bool exact = true;

  [[nodiscard]] int n_max() const { return static_cast<int>(coeffs.size()); }
  [[nodiscard]] double a(int n) const { return coeffs.at(static_cast<std::size_t>(n - 1)); }
  /// R_M. Infinite for exact polynomials; otherwise the root-test estimate
  /// 1 / max_{n > n_max/2} |a_n|^{1/n} over the upper half of the stored terms.
  [[nodiscard]] double radius_estimate() const;
  void validate() const;
};

struct SeriesValue {
  double value = 0.0;
  double tail_bound = 0.0;
};

/// F_M(s) = sum |a_n| s^n.
[[nodiscard]] SeriesValue majorant_eval(const AnalyticSeries& series, double s);
/// F~(s) = sum |a_n| n^{r+3/2} C_W(r)^{n-1} s^{n-1}.
[[nodiscard]] SeriesValue ftilde_eval(const AnalyticSeries& series, double r, int dim, double s);

struct ModelParameters {
  double g = 1.0;      // boussinesq gravity
  int up_axis = -1;    // boussinesq "upward" axis; -1 selects the last axis
  double S = 1.0;      // mhd S = rho0 mu0
  double rho0 = 1.0;   // mhd density (enters only the eliminated pressure)
  AnalyticSeries series{{0.0, 1.0}, true};
  Multiplier T = Multiplier::partial(0);
};

/// Tagged state of one of the five model families. Member fields:
///   euler {u}, sqg {eta}, boussinesq {u, eta}, mhd {v, w}, analytic {u}.
class ModelState {
 public:
  static ModelState euler(SpectralField u);
  static ModelState sqg(SpectralField eta);
  static ModelState boussinesq(SpectralField u, SpectralField eta, double g, int up_axis = -1);
  static ModelState mhd(SpectralField v, SpectralField w, double S, double rho0 = 1.0);
  static ModelState analytic(SpectralField u, AnalyticSeries series, Multiplier T);

  [[nodiscard]] ModelKind kind() const { return kind_; }
  [[nodiscard]] const ModelParameters& params() const { return params_; }
  [[nodiscard]] const std::vector<SpectralField>& fields() const { return fields_; }
  [[nodiscard]] std::vector<SpectralField>& fields() { return fields_; }
  [[nodiscard]] const SpectralField& field(std::size_t i) const { return fields_.at(i); }
  [[nodiscard]] const GridSpec& grid() const { return fields_.front().grid(); }
  [[nodiscard]] std::vector<std::string> member_names() const;
  [[nodiscard]] int up_axis() const;

  /// Same kind and parameters with replacement member fields.
  [[nodiscard]] ModelState with_fields(std::vector<SpectralField> fields) const;
  /// Truncate every member to |k| <= cutoff.
  [[nodiscard]] ModelState truncated(int cutoff) const;

  /// Throws StateError on a violated invariant (mean-free members, div-free
  /// velocities, d = 2 for sqg, m_T(0) = 0 for the analytic model).
  void validate() const;

  /// Tag and parameters for the state sidecar file.
  [[nodiscard]] nlohmann::json sidecar() const;

 private:
  ModelKind kind_ = ModelKind::euler;
  std::vector<SpectralField> fields_;
  ModelParameters params_;
};

/// u = [-R_2 eta, R_1 eta].
[[nodiscard]] SpectralField sqg_velocity(const SpectralField& eta);

/// d(state)/d(zeta) of the complexified Galerkin system, truncated to the
/// state's cutoff:
///   euler      -P B(u,u)
///   sqg        -B(u,eta),  u = [-R_2 eta, R_1 eta]
///   boussinesq (-P B(u,u) + P(eta g e), -B(u,eta))
///   mhd        (-P B(w,v), -P B(v,w))
///   analytic   T F(u)
[[nodiscard]] ModelState rhs(const ModelState& state);

/// v = u + b/sqrt(S), w = u - b/sqrt(S).
[[nodiscard]] std::pair<SpectralField, SpectralField> elsasser_from_primitive(const SpectralField& u,
                                                                              const SpectralField& b, double S);
/// u = (v+w)/2, b = sqrt(S)(v-w)/2.
[[nodiscard]] std::pair<SpectralField, SpectralField> primitive_from_elsasser(const SpectralField& v,
                                                                              const SpectralField& w, double S);

struct CatalogRequest {
  std::string name;
  ModelKind model = ModelKind::euler;
  GridSpec grid{};
  std::uint64_t seed = 7;
  double beta_decay = 1.0;
  ModelParameters params{};
};

struct CatalogEntry {
  std::string name;
  std::string description;
  std::vector<ModelKind> models;
};

[[nodiscard]] const std::vector<CatalogEntry>& catalog();
/// Throws ParameterError for an unknown name or a model the entry does not cover.
[[nodiscard]] ModelState initial_data(const CatalogRequest& request);

/// Random real field with |u(k)| = U(0,1) e^{-beta_decay |k|}, uniform
/// phases, Hermitian-symmetrized; vector fields are Leray-projected.
[[nodiscard]] SpectralField random_gevrey_field(const GridSpec& grid, int components, std::uint64_t seed,
                                                double beta_decay);

}  // namespace gflow
