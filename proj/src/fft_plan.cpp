#include "fft_plan.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <utility>

namespace gflow::detail {

namespace {
// The FFTW planner is not re-entrant.
std::mutex g_planner_mutex;
}  // namespace

FftPlan::FftPlan(int dim, int size) : dim_(dim), size_(size), points_(1) {
  for (int a = 0; a < dim; ++a) points_ *= static_cast<std::size_t>(size);
  buf_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * points_));
  if (buf_ == nullptr) throw std::bad_alloc();
  int dims[3] = {size, size, size};
  auto* raw = reinterpret_cast<fftw_complex*>(buf_);
  std::lock_guard lock(g_planner_mutex);
  // FFTW_ESTIMATE keeps the chosen algorithm, and hence the rounding,
  // identical from run to run.
  fwd_ = fftw_plan_dft(dim, dims, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft(dim, dims, raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftPlan::~FftPlan() {
  std::lock_guard lock(g_planner_mutex);
  if (fwd_ != nullptr) fftw_destroy_plan(fwd_);
  if (bwd_ != nullptr) fftw_destroy_plan(bwd_);
  fftw_free(buf_);
}

void FftPlan::forward() { fftw_execute(fwd_); }
void FftPlan::backward() { fftw_execute(bwd_); }

FftPlan& plan_for(int dim, int size) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<FftPlan>> cache;
  auto& slot = cache[{dim, size}];
  if (!slot) slot = std::make_unique<FftPlan>(dim, size);
  return *slot;
}

}  // namespace gflow::detail
