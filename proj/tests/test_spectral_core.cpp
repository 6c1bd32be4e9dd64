#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "gflow/errors.hpp"
#include "gflow/spectral_ops.hpp"
#include "support/oracle.hpp"

using namespace gflow;
using gflow::testing::direct_advect;
using gflow::testing::random_field;
using gflow::testing::rel_diff;

namespace {
const GridSpec kGrid2{2, 32, 8};
const GridSpec kGrid3{3, 16, 5};
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

TEST_CASE("grid spec validation") {
  CHECK_NOTHROW(GridSpec{2, 32, 15}.validate());
  CHECK_THROWS_AS((GridSpec{4, 32, 8}.validate()), ConfigError);
  CHECK_THROWS_AS((GridSpec{2, 30 + 1, 8}.validate()), ConfigError);
  CHECK_THROWS_AS((GridSpec{2, 32, 16}.validate()), ConfigError);
  CHECK_THROWS_AS((GridSpec{2, 6, 2}.validate()), ConfigError);
  CHECK(GridSpec{3, 16, 5}.points() == 4096);
}

TEST_CASE("single coefficient maps to a plane wave") {
  SpectralField f(kGrid2, 1, FieldFlags{false, false, false});
  const Wavevector k0{2, -3, 0};
  f.mode(0, k0) = 1.0;
  const auto p = to_physical(f);
  double worst = 0.0;
  for (int i = 0; i < kGrid2.n; ++i) {
    for (int j = 0; j < kGrid2.n; ++j) {
      const double x = kTwoPi * i / kGrid2.n;
      const double y = kTwoPi * j / kGrid2.n;
      const cplx expect = std::exp(cplx{0.0, k0[0] * x + k0[1] * y});
      worst = std::max(worst, std::abs(p.values[i * kGrid2.n + j] - expect));
    }
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("transform round trip and Parseval") {
  for (const auto& g : {kGrid2, kGrid3}) {
    const auto f = random_field(g, 1, 11, 0.2, false, false);
    const auto back = to_spectral(to_physical(f), f.flags());
    CHECK(rel_diff(f, back) < 1e-13);

    // Trapezoid quadrature of |f|^2 over the grid against (2pi)^d sum |f(k)|^2.
    const auto p = to_physical(f);
    double quad = 0.0;
    for (const auto& z : p.values) quad += std::norm(z);
    quad *= std::pow(kTwoPi, g.dim) / static_cast<double>(g.points());
    const double spec = inner(f, f).real();
    CHECK(std::abs(quad - spec) <= 1e-12 * spec);
  }
}

TEST_CASE("to_spectral rejects a mismatched sample count") {
  PhysicalField p{kGrid2, 1, std::vector<cplx>(10)};
  CHECK_THROWS_AS((void)to_spectral(p), ConfigError);
}

TEST_CASE("multipliers") {
  SUBCASE("A^{1/2} on a |k| = 2 mode") {
    SpectralField f(kGrid2, 1);
    f.mode(0, {2, 0, 0}) = 1.0;
    const auto g = apply_multiplier(f, Multiplier::half_power(1.0));
    CHECK(g.mode(0, {2, 0, 0}).real() == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("exp_gevrey on a |k| = 1 mode") {
    SpectralField f(kGrid2, 1);
    f.mode(0, {0, 1, 0}) = 1.0;
    const auto g = apply_multiplier(f, Multiplier::exp_gevrey(0.5));
    CHECK(std::abs(g.mode(0, {0, 1, 0}) - std::exp(0.5)) < 1e-15);
  }
  SUBCASE("R1^2 + R2^2 = -I on mean-free scalars") {
    const auto f = random_field(kGrid2, 1, 3, 0.1, false, false);
    const auto r11 = apply_multiplier(apply_multiplier(f, Multiplier::riesz(0)), Multiplier::riesz(0));
    const auto r22 = apply_multiplier(apply_multiplier(f, Multiplier::riesz(1)), Multiplier::riesz(1));
    auto sum = r11 + r22;
    sum += f;
    CHECK(sum.max_abs() < 1e-14 * f.max_abs());
  }
  SUBCASE("riesz on a field with a mean is rejected") {
    SpectralField f(kGrid2, 1, FieldFlags{false, false, false});
    f.at(0, 0) = 1.0;
    CHECK_THROWS_AS((void)apply_multiplier(f, Multiplier::riesz(0)), PreconditionError);
  }
  SUBCASE("exp_gevrey overflow is explicit") {
    SpectralField f(kGrid2, 1);
    f.mode(0, {8, 0, 0}) = 1.0;
    CHECK_THROWS_AS((void)apply_multiplier(f, Multiplier::exp_gevrey(100.0)), OverflowError);
    // Large but representable weights go through the log domain.
    f.mode(0, {8, 0, 0}) = 1e-200;
    const auto g = apply_multiplier(f, Multiplier::exp_gevrey(60.0));
    CHECK(std::abs(std::log(std::abs(g.mode(0, {8, 0, 0}))) - (480.0 - 200.0 * std::log(10.0))) < 1e-9);
  }
  SUBCASE("parse") {
    CHECK(Multiplier::parse("partial:1").describe() == "partial:1");
    CHECK(Multiplier::parse("riesz:0").kind() == Multiplier::Kind::riesz);
    CHECK_THROWS_AS((void)Multiplier::parse("laplace:2"), ParameterError);
  }
}

TEST_CASE("leray projection") {
  SUBCASE("gradients are annihilated") {
    const auto phi = random_field(kGrid2, 1, 5, 0.2, false, false);
    SpectralField grad(kGrid2, 2);
    const auto lat = lattice_for(2, kGrid2.n);
    for (std::size_t i = 0; i < grad.points(); ++i) {
      for (int a = 0; a < 2; ++a) grad.at(a, i) = cplx{0.0, static_cast<double>(lat->k[i][a])} * phi.at(0, i);
    }
    CHECK(leray_project(grad).max_abs() < 1e-14 * grad.max_abs());
  }
  SUBCASE("divergence-free input is returned unchanged") {
    const auto u = random_field(kGrid3, 3, 6, 0.2, false, true);
    const auto pu = leray_project(u);
    CHECK(testing::max_abs_diff(u, pu) < 1e-15);
  }
  SUBCASE("orthogonal splitting, idempotence and self-adjointness") {
    const auto u = random_field(kGrid3, 3, 7, 0.2, false, false);
    const auto w = random_field(kGrid3, 3, 8, 0.2, false, false);
    const auto pu = leray_project(u);
    const auto qu = u - pu;
    const double total = inner(u, u).real();
    CHECK(std::abs(inner(pu, pu).real() + inner(qu, qu).real() - total) <= 1e-12 * total);
    CHECK(testing::rel_diff(leray_project(pu), pu) < 1e-14);
    const cplx lhs = inner(leray_project(u), w);
    const cplx rhs = inner(u, leray_project(w));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
    CHECK(pu.divergence_defect() < 1e-14);
  }
  SUBCASE("scalar input is a type error") {
    CHECK_THROWS_AS((void)leray_project(SpectralField(kGrid2, 1)), FieldTypeError);
  }
}

TEST_CASE("galerkin truncation") {
  const auto f = random_field(kGrid2, 2, 9, 0.1, true, true);
  CHECK(testing::max_abs_diff(galerkin_truncate(f, 8), f) == 0.0);
  CHECK(testing::max_abs_diff(galerkin_truncate(f, 12), f) == 0.0);
  SpectralField single(kGrid2, 1);
  single.mode(0, {5, 0, 0}) = 1.0;
  CHECK(galerkin_truncate(single, 4).max_abs() == 0.0);
  for (int K : {1, 3, 6}) {
    const auto t = galerkin_truncate(f, K);
    CHECK(t.grid().cutoff == K);
    CHECK(inner(t, t).real() <= inner(f, f).real());
    CHECK(testing::max_abs_diff(galerkin_truncate(t, K), t) == 0.0);
  }
}

TEST_CASE("bilinear term against the direct convolution") {
  SUBCASE("Taylor-Green") {
    SpectralField u(kGrid2, 2, FieldFlags{true, true, true});
    // sin x cos y = (sin(x+y) + sin(x-y))/2 ; -cos x sin y = (-sin(x+y) + sin(x-y))/2
    const cplx s = cplx{0.0, -0.25};  // coefficient of e^{ik.x} in 0.5 sin(k.x)
    u.mode(0, {1, 1, 0}) = s;
    u.mode(0, {-1, -1, 0}) = -s;
    u.mode(0, {1, -1, 0}) = s;
    u.mode(0, {-1, 1, 0}) = -s;
    u.mode(1, {1, 1, 0}) = -s;
    u.mode(1, {-1, -1, 0}) = s;
    u.mode(1, {1, -1, 0}) = s;
    u.mode(1, {-1, 1, 0}) = -s;
    const auto unprojected = bilinear_advect(u, u, false);
    const auto oracle = direct_advect(u, u, false);
    CHECK(rel_diff(unprojected, oracle) < 1e-10);
    // u.grad u is a pure gradient for Taylor-Green: the projected term vanishes.
    CHECK(unprojected.max_abs() > 0.1);
    CHECK(bilinear_advect(u, u, true).max_abs() < 1e-14);
  }
  SUBCASE("random complexified fields, 2D and 3D") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto u = random_field(kGrid2, 2, seed, 0.1, false, true);
      const auto v = random_field(kGrid2, 2, seed + 100, 0.1, false, false);
      CHECK(rel_diff(bilinear_advect(u, v, true), direct_advect(u, v, true)) < 1e-10);
      const auto eta = random_field(kGrid2, 1, seed + 200, 0.1, false, false);
      CHECK(rel_diff(bilinear_advect(u, eta, false), direct_advect(u, eta, false)) < 1e-10);
    }
    const auto u3 = random_field(kGrid3, 3, 42, 0.1, false, true);
    CHECK(rel_diff(bilinear_advect(u3, u3, true), direct_advect(u3, u3, true)) < 1e-10);
  }
  SUBCASE("constant advected field gives zero") {
    const auto u = random_field(kGrid2, 2, 4, 0.1, false, true);
    SpectralField c(kGrid2, 1, FieldFlags{false, false, true});
    c.at(0, 0) = 3.0;
    CHECK(bilinear_advect(u, c, false).max_abs() == 0.0);
  }
  SUBCASE("complexification identity") {
    const auto u1 = random_field(kGrid2, 2, 21, 0.1, true, true);
    const auto u2 = random_field(kGrid2, 2, 22, 0.1, true, true);
    const auto v1 = random_field(kGrid2, 2, 23, 0.1, true, true);
    const auto v2 = random_field(kGrid2, 2, 24, 0.1, true, true);
    SpectralField u = u1;
    u.axpy(cplx{0.0, 1.0}, u2);
    SpectralField v = v1;
    v.axpy(cplx{0.0, 1.0}, v2);
    SpectralField four = bilinear_advect(u1, v1, true) - bilinear_advect(u2, v2, true);
    four.axpy(cplx{0.0, 1.0}, bilinear_advect(u1, v2, true) + bilinear_advect(u2, v1, true));
    CHECK(rel_diff(bilinear_advect(u, v, true), four) < 1e-12);
  }
  SUBCASE("real inputs give Hermitian output and skew-symmetry") {
    const auto u = random_field(kGrid2, 2, 31, 0.1, true, true);
    const auto v = random_field(kGrid2, 2, 32, 0.1, true, true);
    const auto b = bilinear_advect(u, v, true);
    CHECK(b.flags().hermitian);
    CHECK(b.hermitian_defect() < 1e-13 * b.max_abs());
    const double nu = std::sqrt(inner(u, u).real());
    const double nv = std::sqrt(inner(v, v).real());
    CHECK(std::abs(inner(b, v)) <= 1e-12 * nu * nv * nv);
  }
  SUBCASE("configuration errors") {
    const auto u = random_field(kGrid2, 2, 1, 0.1, false, true);
    const auto other = random_field(GridSpec{2, 32, 7}, 2, 1, 0.1, false, true);
    CHECK_THROWS_AS((void)bilinear_advect(u, other, true), ConfigError);
    CHECK_THROWS_AS((void)bilinear_advect(u, u, true, 24), ConfigError);
    CHECK_NOTHROW((void)bilinear_advect(u, u, true, 25));
    CHECK_THROWS_AS((void)bilinear_advect(SpectralField(kGrid2, 1), u, true), FieldTypeError);
  }
}

TEST_CASE("dealias size") {
  CHECK(dealias_size(8) == 25);
  CHECK(dealias_size(21) == 64);
  CHECK(dealias_size(5) == 16);
}

TEST_CASE("field invariants") {
  SpectralField f(kGrid2, 2, FieldFlags{true, true, true});
  f.mode(0, {1, 0, 0}) = 1.0;  // k.u = 1: not divergence-free
  f.mode(0, {-1, 0, 0}) = 1.0;
  CHECK_THROWS_AS(f.validate(), StateError);
  SpectralField g(kGrid2, 1, FieldFlags{true, false, false});
  g.at(0, 0) = 1.0;
  CHECK_THROWS_AS(g.validate(), StateError);
  SpectralField h(kGrid2, 1, FieldFlags{true, false, false});
  h.mode(0, {9, 0, 0}) = 1.0;
  CHECK_THROWS_AS(h.validate(), StateError);
  SpectralField herm(kGrid2, 1, FieldFlags{true, false, true});
  herm.mode(0, {1, 2, 0}) = cplx{1.0, 1.0};
  CHECK_THROWS_AS(herm.validate(), StateError);
  herm.mode(0, {-1, -2, 0}) = cplx{1.0, -1.0};
  CHECK_NOTHROW(herm.validate());
}

TEST_CASE("GFLD1 snapshot round trip preserves bytes") {
  const auto f = random_field(kGrid3, 3, 77, 0.2, false, true);
  std::stringstream ss;
  write_gfld(ss, f);
  const std::string bytes = ss.str();
  CHECK(bytes.size() == 8 + 5 * 4 + f.data().size() * 16);
  CHECK(bytes.substr(0, 5) == "GFLD1");
  // d = 3 little-endian at offset 8
  CHECK(static_cast<unsigned char>(bytes[8]) == 3);
  CHECK(static_cast<unsigned char>(bytes[9]) == 0);
  const auto g = read_gfld(ss);
  CHECK(g.grid() == f.grid());
  CHECK(g.flags() == f.flags());
  CHECK(testing::max_abs_diff(f, g) == 0.0);
  std::stringstream bad("GFLD2xxxxxxxxxxxxxxxxxxxxxxxxxx");
  CHECK_THROWS_AS((void)read_gfld(bad), ConfigError);
}
