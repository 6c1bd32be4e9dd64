#pragma once

#include <functional>
#include <string>

#include "gflow/spectral_field.hpp"

namespace gflow {

/// Fourier multiplier symbol m(k).
class Multiplier {
 public:
  enum class Kind { half_power, exp_gevrey, riesz, partial, custom };
  using Table = std::function<cplx(const Wavevector&)>;

  /// |k|^s  (A^{s/2} on mean-free fields).
  static Multiplier half_power(double s);
  /// e^{beta |k|}.
  static Multiplier exp_gevrey(double beta);
  /// i k_j / |k|.
  static Multiplier riesz(int axis);
  /// i k_j.
  static Multiplier partial(int axis);
  static Multiplier custom(Table table, std::string label = "custom");

  /// Parses "partial:0", "riesz:1", "half_power:0.5", "exp_gevrey:0.3".
  static Multiplier parse(const std::string& text);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double parameter() const { return param_; }
  [[nodiscard]] int axis() const { return axis_; }
  [[nodiscard]] std::string describe() const;

  /// Symbol value; exp_gevrey may return +inf here, apply_multiplier never does.
  [[nodiscard]] cplx symbol(const Wavevector& k) const;

 private:
  Kind kind_ = Kind::half_power;
  double param_ = 0.0;
  int axis_ = 0;
  Table table_;
  std::string label_;
};

}  // namespace gflow
