#include "gflow/grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "gflow/errors.hpp"

namespace gflow {

void GridSpec::validate() const {
  if (dim != 2 && dim != 3) {
    throw ConfigError("grid.dim must be 2 or 3, got " + std::to_string(dim));
  }
  if (n < 8 || n % 2 != 0) {
    throw ConfigError("grid.n must be even and >= 8, got " + std::to_string(n));
  }
  if (cutoff < 1 || cutoff > n / 2 - 1) {
    throw ConfigError("grid.cutoff must lie in [1, n/2-1] = [1, " + std::to_string(n / 2 - 1) +
                      "], got " + std::to_string(cutoff));
  }
}

std::size_t GridSpec::points() const {
  std::size_t p = 1;
  for (int a = 0; a < dim; ++a) p *= static_cast<std::size_t>(n);
  return p;
}

std::vector<std::size_t> Lattice::ball(int cutoff) const {
  const long c2 = static_cast<long>(cutoff) * cutoff;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k2.size(); ++i) {
    if (k2[i] > 0 && k2[i] <= c2) out.push_back(i);
  }
  return out;
}

std::size_t Lattice::index_of(const Wavevector& kv) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim; ++a) {
    int m = kv[a] % n;
    if (m < 0) m += n;
    idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(m);
  }
  return idx;
}

namespace {

std::shared_ptr<const Lattice> build_lattice(int dim, int n) {
  auto lat = std::make_shared<Lattice>();
  lat->dim = dim;
  lat->n = n;
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
  lat->k.resize(total);
  lat->k2.resize(total);
  lat->kabs.resize(total);
  lat->neg.resize(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Wavevector kv{0, 0, 0};
    std::size_t rem = idx;
    for (int a = dim - 1; a >= 0; --a) {
      kv[a] = wavenumber(static_cast<int>(rem % n), n);
      rem /= n;
    }
    lat->k[idx] = kv;
    lat->k2[idx] = norm2(kv);
    lat->kabs[idx] = std::sqrt(static_cast<double>(lat->k2[idx]));
  }
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto& kv = lat->k[idx];
    lat->neg[idx] = lat->index_of({-kv[0], -kv[1], -kv[2]});
  }
  return lat;
}

std::mutex g_cache_mutex;

}  // namespace

std::shared_ptr<const Lattice> lattice_for(int dim, int n) {
  static std::map<std::pair<int, int>, std::shared_ptr<const Lattice>> cache;
  std::lock_guard lock(g_cache_mutex);
  auto& slot = cache[{dim, n}];
  if (!slot) slot = build_lattice(dim, n);
  return slot;
}

std::shared_ptr<const std::vector<std::size_t>> ball_for(const GridSpec& grid) {
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const std::vector<std::size_t>>> cache;
  auto lat = lattice_for(grid.dim, grid.n);
  std::lock_guard lock(g_cache_mutex);
  auto& slot = cache[{grid.dim, grid.n, grid.cutoff}];
  if (!slot) slot = std::make_shared<const std::vector<std::size_t>>(lat->ball(grid.cutoff));
  return slot;
}

}  // namespace gflow
