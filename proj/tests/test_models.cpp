#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "gflow/errors.hpp"
#include "gflow/gevrey.hpp"
#include "gflow/models.hpp"
#include "gflow/spectral_ops.hpp"
#include "support/oracle.hpp"

using namespace gflow;

namespace {
const GridSpec kGrid2{2, 32, 8};
const GridSpec kGrid3{3, 16, 5};

double rhs_state_pairing(const ModelState& s) {
  const auto t = rhs(s);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.fields().size(); ++i) {
    const double pr = std::abs(inner(t.field(i), s.field(i)).real());
    const double scale = std::sqrt(inner(t.field(i), t.field(i)).real() * inner(s.field(i), s.field(i)).real());
    if (scale > 0.0) worst = std::max(worst, pr / scale);
  }
  return worst;
}
}  // namespace

TEST_CASE("euler shear flow is steady") {
  SpectralField u(kGrid2, 2, FieldFlags{true, true, true});
  u.mode(0, {0, 1, 0}) = cplx{0.0, -0.5};  // sin y in the first component
  u.mode(0, {0, -1, 0}) = cplx{0.0, 0.5};
  CHECK(testing::direct_advect(u, u, false).max_abs() < 1e-15);
  CHECK(rhs(ModelState::euler(u)).field(0).max_abs() < 1e-15);
}

TEST_CASE("sqg single mode is steady and velocity norm equals scalar norm") {
  const auto s = initial_data({"sqg_single_mode", ModelKind::sqg, kGrid2});
  const auto u = sqg_velocity(s.field(0));
  CHECK(testing::direct_advect(u, s.field(0), false).max_abs() < 1e-15);
  CHECK(rhs(s).field(0).max_abs() < 1e-15);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto eta = testing::random_field(kGrid2, 1, seed, 0.3, false, false);
    const double a = gevrey_norm(sqg_velocity(eta), 2.0, 0.4);
    const double b = gevrey_norm(eta, 2.0, 0.4);
    CHECK(std::abs(a - b) <= 1e-13 * b);
    CHECK(sqg_velocity(eta).divergence_defect() < 1e-14);
  }
}

TEST_CASE("sqg requires two dimensions") {
  SpectralField eta(kGrid3, 1);
  CHECK_THROWS_AS((void)ModelState::sqg(eta), StateError);
}

TEST_CASE("mhd with b = 0 reduces to euler in both slots") {
  const auto u = random_gevrey_field(kGrid2, 2, 17, 0.5);
  const auto e = rhs(ModelState::euler(u)).field(0);
  const auto m = rhs(ModelState::mhd(u, u, 1.0));
  CHECK(testing::max_abs_diff(m.field(0), e) < 1e-15);
  CHECK(testing::max_abs_diff(m.field(1), e) < 1e-15);
}

TEST_CASE("mhd_alfven: a zero slot makes the partner steady") {
  const auto s = initial_data({"mhd_alfven", ModelKind::mhd, kGrid2});
  const bool v_zero = s.field(0).max_abs() == 0.0;
  const bool w_zero = s.field(1).max_abs() == 0.0;
  CHECK((v_zero || w_zero));
  const auto t = rhs(s);
  CHECK(t.field(0).max_abs() == 0.0);
  CHECK(t.field(1).max_abs() == 0.0);
}

TEST_CASE("elsasser round trip") {
  const auto u = random_gevrey_field(kGrid2, 2, 1, 0.5);
  const auto b = random_gevrey_field(kGrid2, 2, 2, 0.5);
  SpectralField zero(kGrid2, 2, FieldFlags{true, true, true});
  const auto [v0, w0] = elsasser_from_primitive(u, zero, 1.0);
  CHECK(testing::max_abs_diff(v0, u) == 0.0);
  CHECK(testing::max_abs_diff(w0, u) == 0.0);
  const auto [v1, w1] = elsasser_from_primitive(zero, b, 1.0);
  CHECK(testing::max_abs_diff(v1, b) == 0.0);
  auto minus_b = b;
  minus_b *= cplx{-1.0};
  CHECK(testing::max_abs_diff(w1, minus_b) == 0.0);
  const auto [v, w] = elsasser_from_primitive(u, b, 2.5);
  const auto [u2, b2] = primitive_from_elsasser(v, w, 2.5);
  CHECK(testing::max_abs_diff(u, u2) <= 1e-14);
  CHECK(testing::max_abs_diff(b, b2) <= 1e-14);
  CHECK_THROWS_AS((void)elsasser_from_primitive(u, b, 0.0), ParameterError);
  CHECK_THROWS_AS((void)primitive_from_elsasser(v, w, -1.0), ParameterError);
}

TEST_CASE("real-data conservation of the semi-discrete systems") {
  const auto u = random_gevrey_field(kGrid2, 2, 3, 0.5);
  const auto eta = random_gevrey_field(kGrid2, 1, 4, 0.5);
  const auto w = random_gevrey_field(kGrid2, 2, 5, 0.5);
  CHECK(rhs_state_pairing(ModelState::euler(u)) <= 1e-12);
  CHECK(rhs_state_pairing(ModelState::sqg(eta)) <= 1e-12);
  CHECK(rhs_state_pairing(ModelState::mhd(u, w, 1.0)) <= 1e-12);
  const auto u3 = random_gevrey_field(kGrid3, 3, 6, 0.5);
  CHECK(rhs_state_pairing(ModelState::euler(u3)) <= 1e-12);
}

TEST_CASE("tendencies are mean-free and hermitian for real data") {
  const auto s = initial_data({"random_gevrey", ModelKind::boussinesq, kGrid2, 9, 0.7});
  const auto t = rhs(s);
  for (const auto& f : t.fields()) {
    CHECK(f.at(0, 0) == cplx{});
    CHECK(f.hermitian_defect() <= 1e-13 * std::max(1.0, f.max_abs()));
  }
  CHECK(t.field(0).divergence_defect() < 1e-13);
}

TEST_CASE("boussinesq buoyancy") {
  // u = 0, eta = cos x: rhs_u = P(eta g e_y) = g cos x e_y (already solenoidal), rhs_eta = 0.
  SpectralField u(kGrid2, 2, FieldFlags{true, true, true});
  SpectralField eta(kGrid2, 1, FieldFlags{true, false, true});
  eta.mode(0, {1, 0, 0}) = 0.5;
  eta.mode(0, {-1, 0, 0}) = 0.5;
  const auto t = rhs(ModelState::boussinesq(u, eta, 3.0));
  CHECK(t.field(0).mode(1, {1, 0, 0}) == cplx{1.5});
  CHECK(t.field(0).mode(0, {1, 0, 0}) == cplx{});
  CHECK(t.field(1).max_abs() == 0.0);
  // eta = cos y: the buoyancy is a gradient and is projected away.
  SpectralField eta_y(kGrid2, 1, FieldFlags{true, false, true});
  eta_y.mode(0, {0, 1, 0}) = 0.5;
  eta_y.mode(0, {0, -1, 0}) = 0.5;
  CHECK(rhs(ModelState::boussinesq(u, eta_y, 3.0)).field(0).max_abs() < 1e-16);
  CHECK(ModelState::boussinesq(u, eta, 1.0).up_axis() == 1);
  CHECK(ModelState::boussinesq(u, eta, 1.0, 0).up_axis() == 0);
  CHECK_THROWS_AS((void)ModelState::boussinesq(u, eta, 0.0), ParameterError);
}

TEST_CASE("analytic series") {
  const AnalyticSeries sq{{0.0, 1.0}, true};
  const double ft = 3.60126526462842428;  // 2^{3.5}/pi
  CHECK(std::abs(ftilde_eval(sq, 2.0, 2, 1.0).value - ft) <= 1e-14 * ft);
  CHECK(std::abs(ftilde_eval(sq, 2.0, 2, 0.5).value - 0.5 * ft) <= 1e-14 * ft);
  const AnalyticSeries lin{{1.0}, true};
  CHECK(ftilde_eval(lin, 2.0, 2, 0.0).value == 1.0);
  CHECK(ftilde_eval(lin, 2.0, 2, 7.0).value == 1.0);
  CHECK(majorant_eval(AnalyticSeries{{1.0, -2.0, 0.5}, true}, 2.0).value == doctest::Approx(2.0 + 8.0 + 4.0));
  CHECK(std::isinf(sq.radius_estimate()));

  // Truncated exp(z) - 1: a_n = 1/n!, infinite radius; tail bound shrinks.
  AnalyticSeries ex{{}, false};
  double fact = 1.0;
  for (int n = 1; n <= 20; ++n) {
    fact *= n;
    ex.coeffs.push_back(1.0 / fact);
  }
  const auto m = majorant_eval(ex, 1.0);
  CHECK(std::abs(m.value - (std::exp(1.0) - 1.0)) <= m.tail_bound + 1e-15);
  CHECK(m.tail_bound < 1e-17);

  // Geometric series 1/(1-z) - 1, R_M = 1: diverges at s = 1.5.
  AnalyticSeries geo{std::vector<double>(30, 1.0), false};
  CHECK(geo.radius_estimate() == doctest::Approx(1.0));
  CHECK_NOTHROW((void)majorant_eval(geo, 0.5));
  CHECK_THROWS_AS((void)majorant_eval(geo, 1.5), RadiusError);

  double prev = -1.0;
  for (double s = 0.0; s < 2.0; s += 0.1) {
    const double v = ftilde_eval(AnalyticSeries{{0.3, 0.0, 0.2}, true}, 2.0, 2, s).value;
    CHECK(v >= 0.0);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("analytic model rhs") {
  // F(z) = z^2, T = d/dx on u = cos x: T(cos^2 x) = d/dx (1 + cos 2x)/2 = -sin 2x.
  SpectralField u(kGrid2, 1, FieldFlags{true, false, true});
  u.mode(0, {1, 0, 0}) = 0.5;
  u.mode(0, {-1, 0, 0}) = 0.5;
  const auto s = ModelState::analytic(u, AnalyticSeries{{0.0, 1.0}, true}, Multiplier::partial(0));
  const auto t = rhs(s).field(0);
  CHECK(std::abs(t.mode(0, {2, 0, 0}) - cplx{0.0, 0.5}) < 1e-15);
  CHECK(std::abs(t.mode(0, {-2, 0, 0}) - cplx{0.0, -0.5}) < 1e-15);
  CHECK(t.at(0, 0) == cplx{});

  // Powers formed by repeated products match direct convolution on small support.
  const auto g = testing::random_field(kGrid2, 1, 8, 1.5, false, false);
  const auto s3 = ModelState::analytic(g, AnalyticSeries{{0.0, 0.0, 1.0}, true}, Multiplier::partial(1));
  const auto g2 = pointwise_product(g, g);
  const auto g3 = pointwise_product(g2, g);
  CHECK(testing::max_abs_diff(rhs(s3).field(0), apply_multiplier(g3, Multiplier::partial(1))) < 1e-15);

  // T with m_T(0) != 0 breaks mean-freeness.
  const auto bad = Multiplier::custom([](const Wavevector&) { return cplx{1.0}; }, "identity");
  CHECK_THROWS_AS((void)ModelState::analytic(u, AnalyticSeries{{0.0, 1.0}, true}, bad), StateError);

  // Radius of convergence: sup|u| = 1 > 0.9 R_M with R_M = 1.
  SpectralField big(kGrid2, 1, FieldFlags{true, false, true});
  big.mode(0, {1, 0, 0}) = 1.0;
  big.mode(0, {-1, 0, 0}) = 1.0;
  const auto geo = ModelState::analytic(big, AnalyticSeries{std::vector<double>(30, 1.0), false}, Multiplier::partial(0));
  CHECK_THROWS_AS((void)rhs(geo), RadiusError);
}

TEST_CASE("catalog") {
  std::set<std::string> names;
  for (const auto& e : catalog()) names.insert(e.name);
  for (const char* n : {"taylor_green_2d", "taylor_green_3d", "sqg_single_mode", "sqg_two_mode", "bouss_stratified",
                        "mhd_alfven", "analytic_gaussian_modes", "random_gevrey"}) {
    CHECK(names.count(n) == 1);
  }
  const auto tg = initial_data({"taylor_green_2d", ModelKind::euler, kGrid2});
  CHECK(std::abs(tg.field(0).mode(0, {1, 1, 0}) - cplx{0.0, -0.25}) < 1e-15);
  CHECK(tg.field(0).divergence_defect() == 0.0);
  CHECK(tg.field(0).at(0, 0) == cplx{});
  CHECK_NOTHROW(initial_data({"taylor_green_3d", ModelKind::euler, kGrid3}).validate());
  CHECK_NOTHROW(initial_data({"bouss_stratified", ModelKind::boussinesq, kGrid2}).validate());
  CHECK_NOTHROW(initial_data({"analytic_gaussian_modes", ModelKind::analytic, kGrid2}).validate());
  CHECK_NOTHROW(initial_data({"sqg_two_mode", ModelKind::sqg, kGrid2}).validate());
  const auto rg = initial_data({"random_gevrey", ModelKind::euler, kGrid2, 7, 1.0});
  CHECK(std::isfinite(gevrey_norm(rg.field(0), 2.0, 0.5)));
  CHECK(std::isfinite(gevrey_norm(rg.field(0), 2.0, 0.99)));
  const auto rg2 = initial_data({"random_gevrey", ModelKind::euler, kGrid2, 7, 1.0});
  CHECK(testing::max_abs_diff(rg.field(0), rg2.field(0)) == 0.0);
  CHECK_THROWS_AS((void)initial_data({"no_such_state", ModelKind::euler, kGrid2}), ParameterError);
  CHECK_THROWS_AS((void)initial_data({"taylor_green_2d", ModelKind::sqg, kGrid2}), ParameterError);
  CHECK(parse_model("mhd") == ModelKind::mhd);
  CHECK_THROWS_AS((void)parse_model("navier_stokes"), ParameterError);
}

TEST_CASE("truncation and sidecar") {
  const auto s = initial_data({"random_gevrey", ModelKind::mhd, kGrid2, 3, 0.5});
  const auto t = s.truncated(4);
  CHECK(t.grid().cutoff == 4);
  CHECK(t.fields().size() == 2);
  const auto j = s.sidecar();
  CHECK(j.at("model") == "mhd");
  CHECK(j.contains("members"));
}
