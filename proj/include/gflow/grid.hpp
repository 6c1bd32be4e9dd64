#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace gflow {

/// Integer wavevector; the unused trailing entry is 0 when dim == 2.
using Wavevector = std::array<int, 3>;

/// Periodic lattice on [0, 2pi]^d with n modes per axis and radial
/// Galerkin cutoff |k| <= cutoff.
struct GridSpec {
  int dim = 2;
  int n = 32;
  int cutoff = 10;

  /// Throws ConfigError when dim, n or cutoff are out of range.
  void validate() const;

  [[nodiscard]] std::size_t points() const;
  [[nodiscard]] bool operator==(const GridSpec&) const = default;
};

/// Wavenumber of FFT index i on an axis of length n (range [-n/2, n/2-1]).
[[nodiscard]] constexpr int wavenumber(int i, int n) { return i < n / 2 ? i : i - n; }

/// FFT index of wavenumber k on an axis of length n.
[[nodiscard]] constexpr int fft_index(int k, int n) { return k >= 0 ? k : k + n; }

[[nodiscard]] inline long norm2(const Wavevector& k) {
  return static_cast<long>(k[0]) * k[0] + static_cast<long>(k[1]) * k[1] +
         static_cast<long>(k[2]) * k[2];
}

/// Precomputed wavevector tables for a (dim, n) lattice in row-major FFT order.
struct Lattice {
  int dim = 2;
  int n = 0;
  std::vector<Wavevector> k;   // per linear index
  std::vector<long> k2;        // |k|^2 per linear index
  std::vector<double> kabs;    // |k| per linear index
  std::vector<std::size_t> neg;  // linear index of -k (mod n)

  /// Linear indices with 0 < |k| <= cutoff, in increasing index order.
  [[nodiscard]] std::vector<std::size_t> ball(int cutoff) const;
  /// Linear index of a wavevector (components reduced mod n).
  [[nodiscard]] std::size_t index_of(const Wavevector& kv) const;
};

/// Shared, immutable lattice table for (dim, n); cached process-wide.
[[nodiscard]] std::shared_ptr<const Lattice> lattice_for(int dim, int n);

/// Cached list of linear indices inside the Galerkin ball of a grid.
[[nodiscard]] std::shared_ptr<const std::vector<std::size_t>> ball_for(const GridSpec& grid);

}  // namespace gflow
