#include "gflow/gevrey.hpp"

#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gflow/errors.hpp"

namespace gflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct LogSum {
  double log_value = -std::numeric_limits<double>::infinity();
  double dominant_k = 0.0;
};

/// log of (2pi)^d sum_k |k|^{2p} e^{2 beta |k|} |f(k)|^2, shifted by the
/// largest term so that no intermediate overflows.
LogSum log_weighted_sum(const SpectralField& f, double p, double beta) {
  if (beta < 0.0) throw DomainError("Gevrey radius beta must be >= 0, got " + std::to_string(beta));
  const auto lat = lattice_for(f.grid().dim, f.grid().n);
  const std::size_t np = f.points();
  std::vector<double> terms(np, -std::numeric_limits<double>::infinity());
  LogSum out;
  double lmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < np; ++i) {
    // hypot keeps |f(k)| representable where |f(k)|^2 would underflow
    double mag = 0.0;
    for (int c = 0; c < f.components(); ++c) mag = std::hypot(mag, std::abs(f.at(c, i)));
    if (mag == 0.0) continue;
    if (lat->k2[i] == 0 && p != 0.0) continue;
    const double kabs = lat->kabs[i];
    const double lw = (kabs == 0.0 ? 0.0 : 2.0 * p * std::log(kabs)) + 2.0 * beta * kabs + 2.0 * std::log(mag);
    terms[i] = lw;
    if (lw > lmax) {
      lmax = lw;
      out.dominant_k = kabs;
    }
  }
  if (!std::isfinite(lmax)) return out;
  double acc = 0.0;
  for (double t : terms) {
    if (std::isfinite(t)) acc += std::exp(t - lmax);
  }
  out.log_value = f.grid().dim * std::log(kTwoPi) + lmax + std::log(acc);
  return out;
}

double gevrey_weight_norm(const SpectralField& f, double p, double beta) {
  const auto ls = log_weighted_sum(f, p, beta);
  if (!std::isfinite(ls.log_value)) return 0.0;
  const double log_norm = 0.5 * ls.log_value;
  if (log_norm >= std::log(DBL_MAX)) {
    throw OverflowError("Gevrey norm overflows (log-norm " + std::to_string(log_norm) + "), dominated by |k| = " +
                        std::to_string(ls.dominant_k));
  }
  return std::exp(log_norm);
}

double direct_weighted_norm(const SpectralField& f, double p, double beta) {
  const auto lat = lattice_for(f.grid().dim, f.grid().n);
  double acc = 0.0;
  for (std::size_t i = 0; i < f.points(); ++i) {
    if (lat->k2[i] == 0 && p != 0.0) continue;
    double mag2 = 0.0;
    for (int c = 0; c < f.components(); ++c) mag2 += std::norm(f.at(c, i));
    if (mag2 == 0.0) continue;
    const double kabs = lat->kabs[i];
    const double w = (p == 0.0 ? 1.0 : std::pow(kabs, 2.0 * p)) * std::exp(2.0 * beta * kabs);
    acc += w * mag2;
  }
  return std::sqrt(std::pow(kTwoPi, f.grid().dim) * acc);
}

}  // namespace

void GevreyParams::validate(int dim) const {
  if (!(r > 0.5 * (dim + 1))) {
    throw DomainError("gevrey.r must exceed (d+1)/2 = " + std::to_string(0.5 * (dim + 1)) + ", got " +
                      std::to_string(r));
  }
  if (!(beta0 > 0.0)) throw DomainError("gevrey.beta0 must be > 0");
  if (!(delta >= 0.0)) throw DomainError("gevrey.delta must be >= 0");
  if (!(constant > 0.0)) throw DomainError("gevrey constant C must be > 0");
}

nlohmann::json NormReport::to_json() const {
  return nlohmann::json{{"l2", l2},         {"sobolev_r", sobolev_r}, {"gevrey", gevrey},
                        {"gevrey_quarter", gevrey_quarter}, {"wiener", wiener}, {"beta_effective", beta_effective}};
}

NormReport NormReport::from_json(const nlohmann::json& j) {
  const auto num = [&](const char* key) {
    const auto& v = j.at(key);
    return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
  };
  return {num("l2"), num("sobolev_r"), num("gevrey"), num("gevrey_quarter"), num("wiener"), num("beta_effective")};
}

double weighted_norm(const SpectralField& f, double p, double beta) {
  if (beta < 0.0) throw DomainError("Gevrey radius beta must be >= 0, got " + std::to_string(beta));
  // Exponential weights above beta|k| = 300 go through the log domain.
  if (beta * f.grid().cutoff > 300.0) return gevrey_weight_norm(f, p, beta);
  const double v = direct_weighted_norm(f, p, beta);
  if (!std::isfinite(v)) return gevrey_weight_norm(f, p, beta);
  return v;
}

double log_weighted_norm(const SpectralField& f, double p, double beta) {
  return 0.5 * log_weighted_sum(f, p, beta).log_value;
}

double gevrey_norm(const SpectralField& f, double r, double beta) { return weighted_norm(f, r, beta); }

double sobolev_norm(const SpectralField& f, double s) { return weighted_norm(f, s, 0.0); }

double wiener_norm(const SpectralField& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.points(); ++i) {
    double mag2 = 0.0;
    for (int c = 0; c < f.components(); ++c) mag2 += std::norm(f.at(c, i));
    acc += std::sqrt(mag2);
  }
  return acc;
}

double cwien(double r, int dim) {
  const double denom = 2.0 * r - 1.0 - dim;
  if (!(denom > 0.0)) {
    throw DomainError("C_W(r) needs r > (d+1)/2; got r = " + std::to_string(r) + ", d = " + std::to_string(dim));
  }
  return (1.0 / (std::numbers::pi * std::pow(2.0, dim - 1))) * (2.0 * r - dim) / denom;
}

EmbeddingReport embedding_check(const SpectralField& f, double r, double beta) {
  const auto lat = lattice_for(f.grid().dim, f.grid().n);
  double lhs = 0.0;
  for (std::size_t i = 0; i < f.points(); ++i) {
    if (lat->k2[i] == 0) continue;
    double mag2 = 0.0;
    for (int c = 0; c < f.components(); ++c) mag2 += std::norm(f.at(c, i));
    if (mag2 == 0.0) continue;
    const double kabs = lat->kabs[i];
    lhs += std::exp(0.5 * std::log(kabs) + beta * kabs + 0.5 * std::log(mag2));
  }
  if (!std::isfinite(lhs)) throw OverflowError("embedding_check: weighted Wiener norm overflows");
  EmbeddingReport rep;
  rep.lhs = lhs;
  rep.rhs = cwien(r, f.grid().dim) * gevrey_norm(f, r, beta);
  rep.holds = rep.lhs <= rep.rhs;
  return rep;
}

std::vector<DecayEntry> derivative_decay_check(const SpectralField& f, double r, double beta, int n_max) {
  if (!(beta > 0.0)) throw DomainError("derivative_decay_check needs beta > 0");
  if (n_max < 0 || n_max > 6) throw DomainError("derivative_decay_check supports 0 <= n_max <= 6");
  const double log_gev = log_weighted_norm(f, r, beta);
  std::vector<DecayEntry> out;
  for (int n = 0; n <= n_max; ++n) {
    DecayEntry e;
    e.order = n;
    const double log_lhs = log_weighted_norm(f, r + n, 0.0);
    const double log_bound = std::lgamma(n + 1.0) - n * std::log(beta) + log_gev;
    e.lhs = std::exp(log_lhs);
    e.bound = std::exp(log_bound);
    e.ratio = std::isfinite(log_lhs) ? std::exp(log_lhs - log_bound) : 0.0;
    out.push_back(e);
  }
  return out;
}

NormReport norm_report(const SpectralField& f, double r, double beta) {
  NormReport rep;
  rep.l2 = weighted_norm(f, 0.0, 0.0);
  rep.sobolev_r = weighted_norm(f, r, 0.0);
  rep.gevrey = weighted_norm(f, r, beta);
  rep.gevrey_quarter = weighted_norm(f, r + 0.5, beta);
  rep.wiener = wiener_norm(f);
  rep.beta_effective = beta;
  return rep;
}

NormReport time_varying_norm(const SpectralField& f, const GevreyParams& p, double s) {
  if (s < 0.0) throw DomainError("arclength s must be >= 0");
  const double beta = p.beta_at(s);
  if (p.delta > 0.0 && !(beta > 0.0)) {
    throw RadiusExhaustedError("analyticity radius exhausted: beta0 - delta s = " + std::to_string(beta) +
                               " at s = " + std::to_string(s));
  }
  return norm_report(f, p.r, beta);
}

NormReport combine_reports(const std::vector<NormReport>& parts) {
  NormReport out;
  for (const auto& p : parts) {
    out.l2 += p.l2 * p.l2;
    out.sobolev_r += p.sobolev_r * p.sobolev_r;
    out.gevrey += p.gevrey * p.gevrey;
    out.gevrey_quarter += p.gevrey_quarter * p.gevrey_quarter;
    out.wiener += p.wiener;
    out.beta_effective = p.beta_effective;
  }
  out.l2 = std::sqrt(out.l2);
  out.sobolev_r = std::sqrt(out.sobolev_r);
  out.gevrey = std::sqrt(out.gevrey);
  out.gevrey_quarter = std::sqrt(out.gevrey_quarter);
  return out;
}

}  // namespace gflow
