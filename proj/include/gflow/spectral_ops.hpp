#pragma once

#include <vector>

#include "gflow/multiplier.hpp"
#include "gflow/spectral_field.hpp"

namespace gflow {

/// Samples of a field on the uniform grid x_j = 2 pi j / n, component-major.
struct PhysicalField {
  GridSpec grid{};
  int components = 1;
  std::vector<cplx> values;
};

/// u(x_j) = sum_k u(k) e^{i k.x_j} on the field's own n^d grid.
[[nodiscard]] PhysicalField to_physical(const SpectralField& f);
/// Inverse of to_physical; the result is re-truncated to the grid cutoff.
[[nodiscard]] SpectralField to_spectral(const PhysicalField& p, FieldFlags flags = {});

/// Coefficient-wise product with m(k). Singular symbols (riesz, half_power,
/// partial) map k = 0 to 0. Throws OverflowError instead of producing inf.
[[nodiscard]] SpectralField apply_multiplier(const SpectralField& f, const Multiplier& m);

/// u(k) <- u(k) - (k.u(k)) k / |k|^2 with u(0) <- 0.
[[nodiscard]] SpectralField leray_project(const SpectralField& u);

/// Zero every coefficient with |k| > cutoff. Identity when cutoff is not
/// below the field's current cutoff.
[[nodiscard]] SpectralField galerkin_truncate(const SpectralField& f, int cutoff);

/// Smallest 2,3,5-smooth size >= 3K+1: products of |k| <= K fields are
/// alias-free on this grid.
[[nodiscard]] int dealias_size(int cutoff);

/// B(u, v) = u . grad v, optionally Leray-projected, evaluated
/// pseudospectrally on a padded grid of size `padded` per axis (0 selects
/// dealias_size). v may be a scalar (no projection) or a d-vector.
/// Complex (non-Hermitian) inputs give the complexified bilinear form.
[[nodiscard]] SpectralField bilinear_advect(const SpectralField& u, const SpectralField& v, bool project,
                                            int padded = 0);

/// Dealiased pointwise product a*b of two scalar fields, truncated to the
/// common cutoff.
[[nodiscard]] SpectralField pointwise_product(const SpectralField& a, const SpectralField& b, int padded = 0);

/// max over the padded physical grid of |f(x)| (Euclidean over components).
[[nodiscard]] double sup_norm_on_grid(const SpectralField& f);

}  // namespace gflow
