#pragma once

// Thin RAII wrapper over FFTW complex-to-complex transforms on a cubic
// grid. Plans are cached per thread, so a plan and its buffer are never
// shared between workers.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <span>

namespace gflow::detail {

class FftPlan {
 public:
  FftPlan(int dim, int size);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] int size() const { return size_; }
  [[nodiscard]] std::size_t points() const { return points_; }
  [[nodiscard]] std::span<std::complex<double>> buffer() { return {buf_, points_}; }

  /// buffer <- sum_x buffer(x) e^{-i k.x}   (unnormalized)
  void forward();
  /// buffer <- sum_k buffer(k) e^{+i k.x}
  void backward();

 private:
  int dim_;
  int size_;
  std::size_t points_;
  std::complex<double>* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

/// Thread-local cached plan for a (dim, size) grid.
FftPlan& plan_for(int dim, int size);

}  // namespace gflow::detail
