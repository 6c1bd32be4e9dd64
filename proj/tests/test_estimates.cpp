#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "gflow/errors.hpp"
#include "gflow/estimates.hpp"
#include "gflow/gevrey.hpp"
#include "gflow/spectral_ops.hpp"

using namespace gflow;

namespace {
const GridSpec kGrid2{2, 32, 8};

void set_cos(SpectralField& f, int c, const Wavevector& k, double amp) {
  f.mode(c, k) += 0.5 * amp;
  f.mode(c, {-k[0], -k[1], -k[2]}) += 0.5 * amp;
}
void set_sin(SpectralField& f, int c, const Wavevector& k, double amp) {
  f.mode(c, k) += cplx{0.0, -0.5 * amp};
  f.mode(c, {-k[0], -k[1], -k[2]}) += cplx{0.0, 0.5 * amp};
}
}  // namespace

TEST_CASE("direct pairing matches a hand-computed value") {
  // u = cos y e_x, v = sin x e_x: u.grad v = cos x cos y e_x.
  SpectralField u(kGrid2, 2, FieldFlags{true, true, true});
  set_cos(u, 0, {0, 1, 0}, 1.0);
  SpectralField v(kGrid2, 2, FieldFlags{true, false, true});
  set_sin(v, 0, {1, 0, 0}, 1.0);
  SpectralField w(kGrid2, 2, FieldFlags{true, false, true});
  w.mode(0, {1, 1, 0}) = 0.25;
  w.mode(0, {1, -1, 0}) = 0.25;
  w.mode(0, {-1, 1, 0}) = 0.25;
  w.mode(0, {-1, -1, 0}) = 0.25;
  const cplx got = advect_pairing_direct(u, v, w, 2.0, 0.5);
  // (2pi)^2 * 4 * (1/16) * |k|^4 e^{2 beta |k|} with |k| = sqrt 2
  CHECK(std::abs(got - cplx{162.3846161648738112797}) <= 1e-12 * 162.4);
  const cplx spec = gevrey_pairing(bilinear_advect(u, v, false), w, 2.0, 0.5);
  CHECK(std::abs(spec - got) <= 1e-12 * 162.4);
}

TEST_CASE("direct and FFT paths agree on random complex fields") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto st = random_complex_state(ModelKind::euler, kGrid2, seed, 1.0 + seed % 3);
    const auto rep = verify_euler_estimate(st.field(0), 2.0, 0.3);
    CHECK(std::abs(rep.lhs - rep.lhs_spectral) <= 1e-10 * std::max(1.0, rep.lhs));
    CHECK(rep.ratio > 0.0);
    CHECK(std::isfinite(rep.ratio));
  }
  const auto m = random_complex_state(ModelKind::mhd, kGrid2, 4, 2.0);
  const auto rm = verify_estimate(m, 2.0, 0.3);
  CHECK(std::abs(rm.lhs - rm.lhs_spectral) <= 1e-10 * std::max(1.0, rm.lhs));
  const auto s = random_complex_state(ModelKind::sqg, kGrid2, 4, 2.0);
  const auto rs = verify_estimate(s, 2.0, 0.3);
  CHECK(std::abs(rs.lhs - rs.lhs_spectral) <= 1e-10 * std::max(1.0, rs.lhs));
  const auto b = random_complex_state(ModelKind::boussinesq, kGrid2, 4, 2.0, ModelParameters{.g = 1.0});
  const auto rb = verify_estimate(b, 2.0, 0.3);
  CHECK(std::abs(rb.lhs - rb.lhs_spectral) <= 1e-10 * std::max(1.0, rb.lhs));
}

TEST_CASE("steady and symmetric data give zero lhs") {
  const auto tg = initial_data({"taylor_green_2d", ModelKind::euler, kGrid2});
  const auto rep = verify_estimate(tg, 2.0, 0.5);
  CHECK(rep.lhs <= 1e-12);
  CHECK(rep.rhs_without_C > 0.0);
  CHECK(rep.ratio <= 1e-12);

  const auto sq = initial_data({"sqg_single_mode", ModelKind::sqg, kGrid2});
  CHECK(verify_estimate(sq, 2.0, 0.5).lhs <= 1e-12);

  // F(z) = z with T = d/dx on real data: <i k1 u, W u> cancels between k and -k.
  const auto u = random_gevrey_field(kGrid2, 1, 3, 1.0);
  const auto ra = verify_analytic_estimate(u, AnalyticSeries{{1.0}, true}, Multiplier::partial(0), 2.0, 0.3);
  CHECK(ra.lhs <= 1e-12 * ra.rhs_without_C);
  REQUIRE(ra.terms.size() == 1);
  CHECK(ra.terms[0].n == 1);
}

TEST_CASE("ratios are scale invariant for the quadratic models") {
  const auto st = random_complex_state(ModelKind::euler, kGrid2, 11, 2.0);
  const double base = verify_estimate(st, 2.0, 0.3).ratio;
  for (double lambda : {0.5, 2.0}) {
    auto f = st.field(0);
    f *= cplx{lambda};
    const double scaled = verify_euler_estimate(f, 2.0, 0.3).ratio;
    CHECK(std::abs(scaled - base) <= 1e-12 * base);
  }
}

TEST_CASE("empirical constant") {
  EnsembleSpec spec;
  const auto c = empirical_constant(spec);
  CHECK(c.rows.size() == 100);
  CHECK(!c.degenerate);
  CHECK(std::isfinite(c.C_emp));
  CHECK(c.C_emp == doctest::Approx(1.1 * c.max_ratio).epsilon(1e-15));
  for (const auto& row : c.rows) {
    CHECK(row.ratio <= c.max_ratio);
    CHECK(row.source == "random");
  }
  const auto h = c.histogram(20);
  CHECK(h.size() == 20);
  int total = 0;
  for (int v : h) total += v;
  CHECK(total == 100);

  SUBCASE("phase rotation keeps the inequality") {
    for (double phi : {std::numbers::pi / 4.0, std::numbers::pi / 2.0}) {
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto st = random_complex_state(ModelKind::euler, spec.grid, seed, 2.0);
        auto f = st.field(0);
        f *= std::polar(1.0, phi);
        const auto rep = verify_euler_estimate(f, 2.0, 0.3);
        CHECK(rep.lhs <= c.C_emp * rep.rhs_without_C);
      }
    }
  }
  SUBCASE("same seed reproduces, disjoint seeds agree within 20 percent") {
    const auto again = empirical_constant(spec);
    CHECK(again.C_emp == c.C_emp);
    EnsembleSpec a = spec;
    a.count = 500;
    EnsembleSpec b = a;
    b.seed = 100001;
    const double ca = empirical_constant(a).C_emp;
    const double cb = empirical_constant(b).C_emp;
    CHECK(std::abs(ca - cb) <= 0.2 * std::max(ca, cb));
  }
  SUBCASE("csv and json") {
    std::ostringstream out;
    c.write_csv(out);
    const auto text = out.str();
    CHECK(text.rfind("sample,source,seed,beta,r,lhs,lhs_spectral,rhs_without_C,ratio,norm,norm_quarter\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 101);
    const auto j = c.to_json();
    CHECK(j.at("C_emp") == c.C_emp);
    CHECK(j.at("histogram").at("counts").size() == 20);
    CHECK(j.at("seed") == 1);
  }
}

TEST_CASE("degenerate and undersized ensembles") {
  const auto sq = initial_data({"sqg_single_mode", ModelKind::sqg, kGrid2});
  const std::vector<ModelState> steady(50, sq);
  const auto c = empirical_constant(steady, 2.0, {0.0, 0.5});
  CHECK(c.degenerate);
  CHECK(c.C_emp == 1.0);
  CHECK_THROWS_AS((void)empirical_constant(std::vector<ModelState>(10, sq), 2.0, {0.5}), ParameterError);
  EnsembleSpec small;
  small.count = 99;
  CHECK_THROWS_AS((void)empirical_constant(small), ParameterError);
}

TEST_CASE("analytic per-term reports") {
  const auto u = random_gevrey_field(kGrid2, 1, 5, 1.5);
  const AnalyticSeries sq{{0.0, 1.0}, true};
  const auto rep = verify_analytic_estimate(u, sq, Multiplier::partial(0), 2.0, 0.3);
  REQUIRE(rep.terms.size() == 1);
  CHECK(rep.terms[0].n == 2);
  CHECK(rep.terms[0].bound > 0.0);
  CHECK(std::abs(rep.lhs - rep.lhs_spectral) <= 1e-10 * std::max(1.0, rep.lhs));
  CHECK(std::abs(rep.terms[0].lhs - rep.lhs) <= 1e-12 * std::max(1.0, rep.lhs));

  auto big = u;
  big *= cplx{1e3};
  const AnalyticSeries geo{{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0}, false};
  CHECK_THROWS_AS((void)verify_analytic_estimate(big, geo, Multiplier::partial(0), 2.0, 0.3), RadiusError);
}

TEST_CASE("wavenumber lemmas") {
  LemmaSpec spec;
  spec.max_norm = 8;
  spec.random_tuples = 2000;
  const auto rep = verify_wavenumber_lemmas(spec);
  CHECK(rep.total_violations() == 0);
  REQUIRE(rep.lemmas.size() == 4);
  for (const auto& l : rep.lemmas) {
    CHECK(l.checks > 0);
    CHECK(l.worst_ratio <= 1.0 + 1e-12);
  }
  const auto j = rep.to_json();
  CHECK(j.at("total_violations") == 0);
  spec.dim = 3;
  spec.max_norm = 3;
  CHECK(verify_wavenumber_lemmas(spec).total_violations() == 0);
}

TEST_CASE("random complex fields") {
  const auto f = random_complex_field(kGrid2, 2, 9, 1.0, true);
  CHECK(f.divergence_defect() <= 1e-13);
  CHECK(f.hermitian_defect() > 0.1);
  const auto g = random_complex_field(kGrid2, 2, 9, 1.0, true);
  CHECK(f.hermitian_defect() == g.hermitian_defect());
  CHECK(gevrey_norm(f, 2.0, 0.0) == gevrey_norm(g, 2.0, 0.0));
}
