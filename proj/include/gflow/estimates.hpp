#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gflow/models.hpp"
#include "json.hpp"

namespace gflow {

/// One term of the analytic-nonlinearity bound: |<T a_n u^n, A^r e^{2 beta A^{1/2}} u>|
/// against |a_n| n^{r+3/2} C_W^{n-1} ||A^{1/4}u||_beta^2 ||u||_beta^{n-1}.
struct TermReport {
  int n = 0;
  double lhs = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

struct EstimateReport {
  double lhs = 0.0;            // direct-convolution pairing
  double lhs_spectral = 0.0;   // same pairing through the FFT path
  double rhs_without_C = 0.0;  // structural product of norms
  double ratio = 0.0;          // lhs / rhs_without_C (0 when both vanish)
  double norm = 0.0;           // ||state||_beta (root-sum-square over members)
  double norm_quarter = 0.0;   // ||A^{1/4} state||_beta
  std::uint64_t seed = 0;
  GridSpec grid{};
  double r = 0.0;
  double beta = 0.0;
  std::vector<TermReport> terms;  // analytic model only
  std::string source = "random";  // "random" ensemble member or "orbit" probe

  [[nodiscard]] nlohmann::json to_json() const;
};

/// (2pi)^d sum_k f(k) . conj(g(k)) |k|^{2r} e^{2 beta |k|}
[[nodiscard]] cplx gevrey_pairing(const SpectralField& f, const SpectralField& g, double r, double beta);

/// <u . grad v, A^r e^{2 beta A^{1/2}} w> by direct summation over
/// h + j = k inside the Galerkin ball; never touches the FFT path.
[[nodiscard]] cplx advect_pairing_direct(const SpectralField& u, const SpectralField& v, const SpectralField& w,
                                         double r, double beta);

/// Truncated product a*b by direct convolution (k = 0 included).
[[nodiscard]] SpectralField product_direct(const SpectralField& a, const SpectralField& b);

/// |<B(u,u), A^r e^{2 beta A^{1/2}} u>| vs 2^r C_W ||u||_beta ||A^{1/4}u||_beta^2.
[[nodiscard]] EstimateReport verify_euler_estimate(const SpectralField& u, double r, double beta);
/// |<B(u,eta), Lambda^{2r} e^{2 beta Lambda} eta>| with u the Riesz velocity.
[[nodiscard]] EstimateReport verify_sqg_estimate(const SpectralField& eta, double r, double beta);
/// |<B(w,v), .v>| + |<B(v,w), .w>| vs 2^r C_W ||(v,w)||_beta (||A^{1/4}v||^2 + ||A^{1/4}w||^2).
[[nodiscard]] EstimateReport verify_mhd_estimate(const SpectralField& v, const SpectralField& w, double r,
                                                 double beta);
/// Transport part of the Boussinesq system:
/// |<B(u,u), .u>| + |<B(u,eta), .eta>| vs 2^r C_W (||u||_beta + ||eta||_beta)(||A^{1/4}u||^2 + ||A^{1/4}eta||^2).
[[nodiscard]] EstimateReport verify_boussinesq_estimate(const SpectralField& u, const SpectralField& eta, double r,
                                                        double beta);
/// |<T F(u), A^r e^{2 beta A^{1/2}} u>| vs F~(||u||_beta) ||A^{1/4}u||_beta^2, plus the
/// per-term reports. Powers follow the Galerkin composition (truncate after
/// every product). Throws RadiusError when F~ diverges at ||u||_beta.
[[nodiscard]] EstimateReport verify_analytic_estimate(const SpectralField& u, const AnalyticSeries& series,
                                                      const Multiplier& T, double r, double beta);
/// Dispatch on the state's model.
[[nodiscard]] EstimateReport verify_estimate(const ModelState& state, double r, double beta);

struct LemmaSpec {
  int dim = 2;
  int max_norm = 16;  // exhaustive over 0 < |h|, |j| <= max_norm
  std::vector<double> r_values{1.6, 2.0, 2.5, 3.0, 4.0};
  int random_tuples = 20000;
  int max_tuple_length = 8;
  std::uint64_t seed = 1;
};

struct LemmaCount {
  std::string name;
  long checks = 0;
  long violations = 0;
  double worst_ratio = 0.0;  // max lhs/rhs seen (<= 1 when the lemma holds)
};

struct LemmaReport {
  std::vector<LemmaCount> lemmas;
  [[nodiscard]] long total_violations() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Checks, exhaustively on lattice shells and on random tuples:
///   triangle_power   |k|^r <= 2^{r-1}(|h|^r + |j|^r), k = h + j
///   product_bound    |j| <= |h| + |k| <= 2|h||k| for nonzero h, j, k
///   tuple_power      (x_1 + ... + x_n)^r <= n^r (x_1^r + ... + x_n^r)
///   lattice_tuple    |k|^r <= n^r sum |h_i|^r and |k| <= n prod |h_i|
[[nodiscard]] LemmaReport verify_wavenumber_lemmas(const LemmaSpec& spec);

/// Complexified random coefficients rho(k) e^{i phi(k)}, rho = e^{-decay|k|} U(0,1),
/// no Hermitian symmetry; vector fields are made divergence-free.
[[nodiscard]] SpectralField random_complex_field(const GridSpec& grid, int components, std::uint64_t seed,
                                                 double decay, bool div_free);

/// A complexified random state of the given model (members drawn with
/// consecutive sub-seeds).
[[nodiscard]] ModelState random_complex_state(ModelKind model, const GridSpec& grid, std::uint64_t seed,
                                              double decay, const ModelParameters& params = {});

struct EnsembleSpec {
  ModelKind model = ModelKind::euler;
  GridSpec grid{2, 32, 8};
  double r = 2.0;
  std::vector<double> betas{0.3};
  int count = 100;
  std::uint64_t seed = 1;
  std::vector<double> decays{1.0, 2.0, 3.0, 5.0};  // sample i uses decays[i % size]
  ModelParameters params{};
};

struct EmpiricalConstant {
  ModelKind model = ModelKind::euler;
  double C_emp = 1.0;
  double max_ratio = 0.0;
  double safety = 1.1;
  bool degenerate = false;
  std::uint64_t seed = 0;
  std::vector<EstimateReport> rows;

  /// Ratio histogram with `bins` equal bins on [0, max_ratio].
  [[nodiscard]] std::vector<int> histogram(int bins) const;
  [[nodiscard]] nlohmann::json to_json() const;
  /// CSV: sample,source,seed,beta,r,lhs,lhs_spectral,rhs_without_C,ratio,norm,norm_quarter
  void write_csv(std::ostream& out) const;
};

/// C_emp = 1.1 * max ratio over every (member, beta) pair. Throws
/// ParameterError for ensembles smaller than 100 samples. A degenerate
/// ensemble (max ratio <= 1e-12) is flagged and gets C_emp = 1.
[[nodiscard]] EmpiricalConstant empirical_constant(const EnsembleSpec& spec);
/// The shared reduction: C_emp = safety * max ratio over `rows`.
[[nodiscard]] EmpiricalConstant reduce_ensemble(ModelKind model, std::vector<EstimateReport> rows, std::uint64_t seed);
/// Same reduction over caller-supplied states (seed recorded as given).
[[nodiscard]] EmpiricalConstant empirical_constant(const std::vector<ModelState>& states, double r,
                                                   const std::vector<double>& betas, std::uint64_t seed = 0);

}  // namespace gflow
