#pragma once

#include <vector>

#include "gflow/spectral_field.hpp"
#include "json.hpp"

namespace gflow {

/// Sobolev exponent r, initial radius beta0, radius shrink rate delta and
/// the absolute constant C that the a-priori estimates leave unspecified.
struct GevreyParams {
  double r = 2.0;
  double beta0 = 0.5;
  double delta = 0.0;
  double constant = 1.0;

  /// Throws DomainError unless r > (d+1)/2, beta0 > 0 and delta >= 0.
  void validate(int dim) const;
  /// beta0 - delta * s
  [[nodiscard]] double beta_at(double s) const { return beta0 - delta * s; }
};

struct NormReport {
  double l2 = 0.0;
  double sobolev_r = 0.0;       // ||A^{r/2} f||
  double gevrey = 0.0;          // ||f||_beta
  double gevrey_quarter = 0.0;  // ||A^{1/4} f||_beta
  double wiener = 0.0;          // sum_k |f(k)|
  double beta_effective = 0.0;

  [[nodiscard]] nlohmann::json to_json() const;
  static NormReport from_json(const nlohmann::json& j);
};

/// ((2pi)^d sum_k |k|^{2p} e^{2 beta |k|} |f(k)|^2)^{1/2}. k = 0 contributes
/// only when p == 0. Throws OverflowError naming the dominant |k| when the
/// result leaves the double range; beta < 0 is a DomainError.
[[nodiscard]] double weighted_norm(const SpectralField& f, double p, double beta);
/// Natural log of weighted_norm, finite even when the norm itself overflows
/// (-inf for the zero field).
[[nodiscard]] double log_weighted_norm(const SpectralField& f, double p, double beta);

/// ||A^{r/2} e^{beta A^{1/2}} f||
[[nodiscard]] double gevrey_norm(const SpectralField& f, double r, double beta);
/// ||A^{s/2} f||
[[nodiscard]] double sobolev_norm(const SpectralField& f, double s);
/// sum_k |f(k)|, Euclidean length over components at each k.
[[nodiscard]] double wiener_norm(const SpectralField& f);

/// Wiener-algebra embedding constant (1/(pi 2^{d-1})) (2r-d)/(2r-1-d).
[[nodiscard]] double cwien(double r, int dim);

struct EmbeddingReport {
  double lhs = 0.0;  // ||A^{1/4} e^{beta A^{1/2}} f||_W
  double rhs = 0.0;  // C_W(r) ||f||_beta
  bool holds = true;
};
[[nodiscard]] EmbeddingReport embedding_check(const SpectralField& f, double r, double beta);

struct DecayEntry {
  int order = 0;
  double lhs = 0.0;    // ||A^{(r+n)/2} f||
  double bound = 0.0;  // n!/beta^n ||f||_beta
  double ratio = 0.0;  // lhs / bound, computed in the log domain
};
/// Orders n = 0..n_max (n = 0 is the degenerate ||f||_{H^r} <= ||f||_beta).
[[nodiscard]] std::vector<DecayEntry> derivative_decay_check(const SpectralField& f, double r, double beta,
                                                             int n_max);

/// Full report at beta = beta0 - delta s. Throws RadiusExhaustedError when
/// that radius is no longer positive.
[[nodiscard]] NormReport time_varying_norm(const SpectralField& f, const GevreyParams& p, double s);
[[nodiscard]] NormReport norm_report(const SpectralField& f, double r, double beta);

/// Root-sum-square combination of member norms (coupled systems).
[[nodiscard]] NormReport combine_reports(const std::vector<NormReport>& parts);

}  // namespace gflow
