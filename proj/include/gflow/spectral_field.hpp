#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gflow/grid.hpp"

namespace gflow {

using cplx = std::complex<double>;

/// Structural properties a field claims; checked by SpectralField::validate.
struct FieldFlags {
  bool mean_free = true;
  bool div_free = false;
  bool hermitian = false;

  [[nodiscard]] FieldFlags meet(const FieldFlags& o) const {
    return {mean_free && o.mean_free, div_free && o.div_free, hermitian && o.hermitian};
  }
  [[nodiscard]] bool operator==(const FieldFlags&) const = default;
};

/// Truncated Fourier coefficients of a periodic scalar or vector field.
///
/// Coefficients are stored component-major, each component as a full n^d
/// lattice in row-major FFT order. A real field has Hermitian-symmetric
/// coefficients; a complexified field u1 + i u2 is the same array without
/// that symmetry.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(GridSpec grid, int components, FieldFlags flags = {});

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] int components() const { return components_; }
  [[nodiscard]] bool is_vector() const { return components_ > 1; }
  [[nodiscard]] const FieldFlags& flags() const { return flags_; }
  void set_flags(FieldFlags f) { flags_ = f; }

  [[nodiscard]] std::size_t points() const { return points_; }
  [[nodiscard]] std::span<cplx> component(int c);
  [[nodiscard]] std::span<const cplx> component(int c) const;
  [[nodiscard]] std::span<cplx> data() { return coeffs_; }
  [[nodiscard]] std::span<const cplx> data() const { return coeffs_; }

  cplx& at(int c, std::size_t idx) { return coeffs_[static_cast<std::size_t>(c) * points_ + idx]; }
  [[nodiscard]] const cplx& at(int c, std::size_t idx) const {
    return coeffs_[static_cast<std::size_t>(c) * points_ + idx];
  }

  /// Coefficient of wavevector k (reduced mod n) in component c.
  cplx& mode(int c, const Wavevector& k);
  [[nodiscard]] const cplx& mode(int c, const Wavevector& k) const;

  /// Zero every coefficient outside 0 < |k| <= cutoff (also clears k = 0
  /// when the field is flagged mean-free).
  void enforce_truncation();

  /// Throws StateError if the coefficients contradict the declared flags
  /// or the Galerkin truncation.
  void validate() const;

  /// max_k |k.u(k)| / max_k |k||u(k)|; 0 for the zero field.
  [[nodiscard]] double divergence_defect() const;
  /// max_k |u(-k) - conj(u(k))|.
  [[nodiscard]] double hermitian_defect() const;
  /// max over components and k of |coefficient|.
  [[nodiscard]] double max_abs() const;
  [[nodiscard]] bool all_finite() const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(cplx a);
  /// this += a * x
  SpectralField& axpy(cplx a, const SpectralField& x);

  [[nodiscard]] friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  [[nodiscard]] friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  [[nodiscard]] friend SpectralField operator*(cplx s, SpectralField a) { return a *= s; }

 private:
  void check_compatible(const SpectralField& o) const;

  GridSpec grid_{};
  int components_ = 0;
  std::size_t points_ = 0;
  FieldFlags flags_{};
  std::vector<cplx> coeffs_;
};

/// Complex L^2 pairing <f, g> = (2pi)^d sum_k f(k) . conj(g(k)).
[[nodiscard]] cplx inner(const SpectralField& f, const SpectralField& g);

/// Writes one GFLD1 block (see docs/formats.md).
void write_gfld(std::ostream& out, const SpectralField& f);
/// Reads one GFLD1 block; throws ConfigError on a malformed header.
[[nodiscard]] SpectralField read_gfld(std::istream& in);

}  // namespace gflow
