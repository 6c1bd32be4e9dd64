#include "gflow/spectral_field.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <ostream>

#include "gflow/errors.hpp"

namespace gflow {

SpectralField::SpectralField(GridSpec grid, int components, FieldFlags flags)
    : grid_(grid), components_(components), points_(grid.points()), flags_(flags) {
  grid_.validate();
  if (components < 1 || components > 3) {
    throw ConfigError("field components must be 1..3, got " + std::to_string(components));
  }
  coeffs_.assign(static_cast<std::size_t>(components) * points_, cplx{});
}

std::span<cplx> SpectralField::component(int c) {
  return std::span<cplx>(coeffs_).subspan(static_cast<std::size_t>(c) * points_, points_);
}

std::span<const cplx> SpectralField::component(int c) const {
  return std::span<const cplx>(coeffs_).subspan(static_cast<std::size_t>(c) * points_, points_);
}

cplx& SpectralField::mode(int c, const Wavevector& k) {
  return at(c, lattice_for(grid_.dim, grid_.n)->index_of(k));
}

const cplx& SpectralField::mode(int c, const Wavevector& k) const {
  return at(c, lattice_for(grid_.dim, grid_.n)->index_of(k));
}

void SpectralField::enforce_truncation() {
  const auto lat = lattice_for(grid_.dim, grid_.n);
  const long c2 = static_cast<long>(grid_.cutoff) * grid_.cutoff;
  for (int c = 0; c < components_; ++c) {
    auto comp = component(c);
    for (std::size_t i = 0; i < points_; ++i) {
      if (lat->k2[i] > c2) comp[i] = 0.0;
    }
    if (flags_.mean_free) comp[0] = 0.0;
  }
}

double SpectralField::divergence_defect() const {
  if (components_ != grid_.dim) return 0.0;
  const auto lat = lattice_for(grid_.dim, grid_.n);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < points_; ++i) {
    cplx dot{};
    double mag2 = 0.0;
    for (int c = 0; c < components_; ++c) {
      dot += static_cast<double>(lat->k[i][c]) * at(c, i);
      mag2 += std::norm(at(c, i));
    }
    num = std::max(num, std::abs(dot));
    den = std::max(den, lat->kabs[i] * std::sqrt(mag2));
  }
  return den > 0.0 ? num / den : 0.0;
}

double SpectralField::hermitian_defect() const {
  const auto lat = lattice_for(grid_.dim, grid_.n);
  double worst = 0.0;
  for (int c = 0; c < components_; ++c) {
    auto comp = component(c);
    for (std::size_t i = 0; i < points_; ++i) {
      // The Nyquist planes have no partner inside the symmetric range.
      bool nyquist = false;
      for (int a = 0; a < grid_.dim; ++a) nyquist = nyquist || lat->k[i][a] == -grid_.n / 2;
      if (nyquist) continue;
      worst = std::max(worst, std::abs(comp[lat->neg[i]] - std::conj(comp[i])));
    }
  }
  return worst;
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& z : coeffs_) m = std::max(m, std::abs(z));
  return m;
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

void SpectralField::validate() const {
  const auto lat = lattice_for(grid_.dim, grid_.n);
  const long c2 = static_cast<long>(grid_.cutoff) * grid_.cutoff;
  for (int c = 0; c < components_; ++c) {
    auto comp = component(c);
    for (std::size_t i = 0; i < points_; ++i) {
      if (lat->k2[i] > c2 && comp[i] != cplx{}) {
        throw StateError("coefficient outside the Galerkin ball |k| <= " + std::to_string(grid_.cutoff));
      }
    }
    if (flags_.mean_free && comp[0] != cplx{}) {
      throw StateError("field flagged mean-free has a nonzero k = 0 coefficient");
    }
  }
  if (flags_.div_free) {
    if (components_ != grid_.dim) throw StateError("div_free flag on a non-vector field");
    if (divergence_defect() > 1e-12) {
      throw StateError("field flagged divergence-free has k.u(k) defect " +
                       std::to_string(divergence_defect()));
    }
  }
  if (flags_.hermitian && hermitian_defect() > 1e-14 * std::max(1.0, max_abs())) {
    throw StateError("field flagged hermitian has symmetry defect " + std::to_string(hermitian_defect()));
  }
}

void SpectralField::check_compatible(const SpectralField& o) const {
  if (!(grid_.dim == o.grid_.dim && grid_.n == o.grid_.n) || components_ != o.components_) {
    throw ConfigError("field arithmetic on mismatched grids or component counts");
  }
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  flags_ = flags_.meet(o.flags_);
  grid_.cutoff = std::max(grid_.cutoff, o.grid_.cutoff);
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  flags_ = flags_.meet(o.flags_);
  grid_.cutoff = std::max(grid_.cutoff, o.grid_.cutoff);
  return *this;
}

SpectralField& SpectralField::operator*=(cplx a) {
  for (auto& z : coeffs_) z *= a;
  if (a.imag() != 0.0) flags_.hermitian = false;
  return *this;
}

SpectralField& SpectralField::axpy(cplx a, const SpectralField& x) {
  check_compatible(x);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
  flags_ = flags_.meet(x.flags_);
  if (a.imag() != 0.0) flags_.hermitian = false;
  grid_.cutoff = std::max(grid_.cutoff, x.grid_.cutoff);
  return *this;
}

cplx inner(const SpectralField& f, const SpectralField& g) {
  if (f.grid().dim != g.grid().dim || f.grid().n != g.grid().n || f.components() != g.components()) {
    throw ConfigError("inner product of incompatible fields");
  }
  cplx acc{};
  auto a = f.data();
  auto b = g.data();
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
  return std::pow(2.0 * std::numbers::pi, f.grid().dim) * acc;
}

// ---- GFLD1 snapshot format ------------------------------------------------

namespace {

constexpr std::array<char, 8> kMagic{'G', 'F', 'L', 'D', '1', '\0', '\0', '\0'};

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b.data(), 4);
}

void put_f64(std::ostream& out, double x) {
  const auto v = std::bit_cast<std::uint64_t>(x);
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b.data(), 8);
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) throw ConfigError("GFLD1: truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) throw ConfigError("GFLD1: truncated coefficient array");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

void write_gfld(std::ostream& out, const SpectralField& f) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(f.grid().dim));
  put_u32(out, static_cast<std::uint32_t>(f.grid().n));
  put_u32(out, static_cast<std::uint32_t>(f.grid().cutoff));
  put_u32(out, static_cast<std::uint32_t>(f.components()));
  const auto& fl = f.flags();
  put_u32(out, (fl.hermitian ? 1u : 0u) | (fl.mean_free ? 2u : 0u) | (fl.div_free ? 4u : 0u));
  for (const auto& z : f.data()) {
    put_f64(out, z.real());
    put_f64(out, z.imag());
  }
}

SpectralField read_gfld(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ConfigError("GFLD1: bad magic tag");
  }
  GridSpec grid;
  grid.dim = static_cast<int>(get_u32(in));
  grid.n = static_cast<int>(get_u32(in));
  grid.cutoff = static_cast<int>(get_u32(in));
  const int comps = static_cast<int>(get_u32(in));
  const std::uint32_t bits = get_u32(in);
  FieldFlags flags{(bits & 2u) != 0, (bits & 4u) != 0, (bits & 1u) != 0};
  SpectralField f(grid, comps, flags);
  for (auto& z : f.data()) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    z = {re, im};
  }
  return f;
}

}  // namespace gflow
