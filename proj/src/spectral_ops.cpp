#include "gflow/spectral_ops.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <utility>

#include "fft_plan.hpp"
#include "gflow/errors.hpp"

namespace gflow {

namespace {

/// (index on the field lattice, index on the padded lattice) for k = 0 and
/// every mode of the Galerkin ball.
using BallMap = std::vector<std::pair<std::size_t, std::size_t>>;

std::shared_ptr<const BallMap> ball_map(const GridSpec& grid, int padded) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int, int>, std::shared_ptr<const BallMap>> cache;
  const auto key = std::make_tuple(grid.dim, grid.n, grid.cutoff, padded);
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const auto src = lattice_for(grid.dim, grid.n);
  const auto dst = lattice_for(grid.dim, padded);
  auto map = std::make_shared<BallMap>();
  map->emplace_back(0, 0);  // k = 0 (mean)
  for (std::size_t i : *ball_for(grid)) map->emplace_back(i, dst->index_of(src->k[i]));
  std::lock_guard lock(mu);
  cache[key] = map;
  return map;
}

bool smooth235(int m) {
  for (int p : {2, 3, 5}) {
    while (m % p == 0) m /= p;
  }
  return m == 1;
}

void require_same_grid(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) {
    throw ConfigError("grid mismatch: (d=" + std::to_string(a.grid().dim) + ", n=" + std::to_string(a.grid().n) +
                      ", K=" + std::to_string(a.grid().cutoff) + ") vs (d=" + std::to_string(b.grid().dim) +
                      ", n=" + std::to_string(b.grid().n) + ", K=" + std::to_string(b.grid().cutoff) + ")");
  }
}

int resolve_padding(const GridSpec& grid, int padded) {
  if (padded == 0) return dealias_size(grid.cutoff);
  if (padded < 3 * grid.cutoff + 1) {
    throw ConfigError("aliasing-unsafe padding: padded size " + std::to_string(padded) + " < 3K+1 = " +
                      std::to_string(3 * grid.cutoff + 1));
  }
  return padded;
}

/// Load the ball coefficients of one component, scaled by `sym`, into the
/// padded plan buffer and transform to physical space.
template <class Symbol>
void load_physical(detail::FftPlan& plan, const BallMap& map, std::span<const cplx> coeffs, Symbol&& sym) {
  auto buf = plan.buffer();
  std::fill(buf.begin(), buf.end(), cplx{});
  for (const auto& [src, dst] : map) buf[dst] = sym(src) * coeffs[src];
  plan.backward();
}

}  // namespace

int dealias_size(int cutoff) {
  int m = 3 * cutoff + 1;
  while (!smooth235(m)) ++m;
  return m;
}

PhysicalField to_physical(const SpectralField& f) {
  const auto& g = f.grid();
  auto& plan = detail::plan_for(g.dim, g.n);
  PhysicalField out{g, f.components(), {}};
  out.values.resize(f.data().size());
  for (int c = 0; c < f.components(); ++c) {
    auto comp = f.component(c);
    std::copy(comp.begin(), comp.end(), plan.buffer().begin());
    plan.backward();
    std::copy(plan.buffer().begin(), plan.buffer().end(), out.values.begin() + c * f.points());
  }
  return out;
}

SpectralField to_spectral(const PhysicalField& p, FieldFlags flags) {
  SpectralField f(p.grid, p.components, flags);
  if (p.values.size() != f.data().size()) {
    throw ConfigError("physical array has " + std::to_string(p.values.size()) + " samples, grid expects " +
                      std::to_string(f.data().size()));
  }
  auto& plan = detail::plan_for(p.grid.dim, p.grid.n);
  const double scale = 1.0 / static_cast<double>(f.points());
  for (int c = 0; c < p.components; ++c) {
    std::copy(p.values.begin() + c * f.points(), p.values.begin() + (c + 1) * f.points(), plan.buffer().begin());
    plan.forward();
    auto comp = f.component(c);
    for (std::size_t i = 0; i < f.points(); ++i) comp[i] = plan.buffer()[i] * scale;
  }
  f.enforce_truncation();
  return f;
}

SpectralField apply_multiplier(const SpectralField& f, const Multiplier& m) {
  const auto lat = lattice_for(f.grid().dim, f.grid().n);
  SpectralField out = f;
  const bool singular = m.kind() == Multiplier::Kind::riesz || m.kind() == Multiplier::Kind::half_power ||
                        m.kind() == Multiplier::Kind::partial;
  if (m.kind() == Multiplier::Kind::riesz) {
    for (int c = 0; c < f.components(); ++c) {
      if (f.at(c, 0) != cplx{}) throw PreconditionError("riesz transform requires a mean-free field");
    }
  }
  static const double log_max = std::log(DBL_MAX);
  for (int c = 0; c < f.components(); ++c) {
    auto comp = out.component(c);
    for (std::size_t i = 0; i < f.points(); ++i) {
      if (comp[i] == cplx{}) continue;
      if (m.kind() == Multiplier::Kind::exp_gevrey) {
        const double e = m.parameter() * lat->kabs[i];
        if (e > 300.0) {
          const double logmag = e + std::log(std::abs(comp[i]));
          if (logmag >= log_max) {
            throw OverflowError("exp_gevrey weight overflows at |k| = " + std::to_string(lat->kabs[i]) +
                                " (beta|k| = " + std::to_string(e) + ")");
          }
          comp[i] = std::polar(std::exp(logmag), std::arg(comp[i]));
          continue;
        }
      }
      comp[i] *= m.symbol(lat->k[i]);
    }
    if (singular) comp[0] = 0.0;
  }
  FieldFlags fl = f.flags();
  if (m.kind() == Multiplier::Kind::riesz || m.kind() == Multiplier::Kind::partial) {
    // i k_j / |k| and i k_j are odd imaginary symbols: they keep real fields real.
    fl.div_free = false;
  } else if (m.kind() == Multiplier::Kind::custom) {
    fl.hermitian = false;
    fl.div_free = false;
  }
  fl.mean_free = fl.mean_free || singular;
  out.set_flags(fl);
  return out;
}

SpectralField leray_project(const SpectralField& u) {
  if (u.components() != u.grid().dim) {
    throw FieldTypeError("leray_project needs a " + std::to_string(u.grid().dim) + "-component vector field, got " +
                         std::to_string(u.components()) + " component(s)");
  }
  const auto lat = lattice_for(u.grid().dim, u.grid().n);
  SpectralField out = u;
  const int d = u.grid().dim;
  for (std::size_t i = 0; i < u.points(); ++i) {
    if (lat->k2[i] == 0) {
      for (int c = 0; c < d; ++c) out.at(c, i) = 0.0;
      continue;
    }
    cplx dot{};
    for (int c = 0; c < d; ++c) dot += static_cast<double>(lat->k[i][c]) * u.at(c, i);
    if (dot == cplx{}) continue;
    const cplx f = dot / static_cast<double>(lat->k2[i]);
    for (int c = 0; c < d; ++c) out.at(c, i) -= f * static_cast<double>(lat->k[i][c]);
  }
  FieldFlags fl = u.flags();
  fl.div_free = true;
  fl.mean_free = true;
  out.set_flags(fl);
  return out;
}

SpectralField galerkin_truncate(const SpectralField& f, int cutoff) {
  if (cutoff >= f.grid().cutoff) return f;
  if (cutoff < 1) throw ConfigError("galerkin cutoff must be >= 1");
  GridSpec g = f.grid();
  g.cutoff = cutoff;
  SpectralField out(g, f.components(), f.flags());
  std::copy(f.data().begin(), f.data().end(), out.data().begin());
  out.enforce_truncation();
  return out;
}

SpectralField bilinear_advect(const SpectralField& u, const SpectralField& v, bool project, int padded) {
  const auto& g = u.grid();
  require_same_grid(u, v);
  if (u.components() != g.dim) throw FieldTypeError("bilinear_advect: advecting field must be a d-vector");
  if (v.components() != 1 && v.components() != g.dim) {
    throw FieldTypeError("bilinear_advect: advected field must be a scalar or a d-vector");
  }
  const int m = resolve_padding(g, padded);
  const auto map = ball_map(g, m);
  const auto lat = lattice_for(g.dim, g.n);
  auto& plan = detail::plan_for(g.dim, m);
  const std::size_t np = plan.points();

  std::vector<std::vector<cplx>> uphys(g.dim);
  for (int j = 0; j < g.dim; ++j) {
    load_physical(plan, *map, u.component(j), [](std::size_t) { return cplx{1.0, 0.0}; });
    uphys[j].assign(plan.buffer().begin(), plan.buffer().end());
  }

  const int nc = v.components();
  SpectralField out(g, nc, FieldFlags{true, false, u.flags().hermitian && v.flags().hermitian});
  std::vector<cplx> acc(np);
  const double scale = 1.0 / static_cast<double>(np);
  for (int i = 0; i < nc; ++i) {
    std::fill(acc.begin(), acc.end(), cplx{});
    for (int j = 0; j < g.dim; ++j) {
      load_physical(plan, *map, v.component(i),
                    [&](std::size_t idx) { return cplx{0.0, static_cast<double>(lat->k[idx][j])}; });
      auto buf = plan.buffer();
      const auto& uj = uphys[j];
      for (std::size_t x = 0; x < np; ++x) acc[x] += uj[x] * buf[x];
    }
    std::copy(acc.begin(), acc.end(), plan.buffer().begin());
    plan.forward();
    auto dst = out.component(i);
    for (const auto& [src, pad] : *map) dst[src] = plan.buffer()[pad] * scale;
    dst[0] = 0.0;
  }
  if (project && nc == g.dim) return leray_project(out);
  return out;
}

SpectralField pointwise_product(const SpectralField& a, const SpectralField& b, int padded) {
  require_same_grid(a, b);
  if (a.components() != 1 || b.components() != 1) throw FieldTypeError("pointwise_product expects scalar fields");
  const auto& g = a.grid();
  const int m = resolve_padding(g, padded);
  const auto map = ball_map(g, m);
  auto& plan = detail::plan_for(g.dim, m);
  const auto one = [](std::size_t) { return cplx{1.0, 0.0}; };
  load_physical(plan, *map, a.component(0), one);
  std::vector<cplx> aphys(plan.buffer().begin(), plan.buffer().end());
  load_physical(plan, *map, b.component(0), one);
  auto buf = plan.buffer();
  for (std::size_t x = 0; x < buf.size(); ++x) buf[x] *= aphys[x];
  plan.forward();
  // The product of mean-free fields generally has a mean; keep it.
  SpectralField out(g, 1, FieldFlags{false, false, a.flags().hermitian && b.flags().hermitian});
  const double scale = 1.0 / static_cast<double>(plan.points());
  auto dst = out.component(0);
  for (const auto& [src, pad] : *map) dst[src] = buf[pad] * scale;
  return out;
}

double sup_norm_on_grid(const SpectralField& f) {
  const auto& g = f.grid();
  const int m = dealias_size(g.cutoff);
  const auto map = ball_map(g, m);
  auto& plan = detail::plan_for(g.dim, m);
  std::vector<double> mag2(plan.points(), 0.0);
  for (int c = 0; c < f.components(); ++c) {
    auto coeffs = f.component(c);
    auto buf = plan.buffer();
    std::fill(buf.begin(), buf.end(), cplx{});
    for (const auto& [src, dst] : *map) buf[dst] = coeffs[src];
    plan.backward();
    for (std::size_t x = 0; x < buf.size(); ++x) mag2[x] += std::norm(buf[x]);
  }
  return std::sqrt(*std::max_element(mag2.begin(), mag2.end()));
}

}  // namespace gflow
