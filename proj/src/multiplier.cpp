#include "gflow/multiplier.hpp"

#include <cmath>
#include <sstream>

#include "gflow/errors.hpp"

namespace gflow {

Multiplier Multiplier::half_power(double s) {
  Multiplier m;
  m.kind_ = Kind::half_power;
  m.param_ = s;
  return m;
}

Multiplier Multiplier::exp_gevrey(double beta) {
  Multiplier m;
  m.kind_ = Kind::exp_gevrey;
  m.param_ = beta;
  return m;
}

Multiplier Multiplier::riesz(int axis) {
  if (axis < 0 || axis > 2) throw ParameterError("riesz axis must be 0..2");
  Multiplier m;
  m.kind_ = Kind::riesz;
  m.axis_ = axis;
  return m;
}

Multiplier Multiplier::partial(int axis) {
  if (axis < 0 || axis > 2) throw ParameterError("partial axis must be 0..2");
  Multiplier m;
  m.kind_ = Kind::partial;
  m.axis_ = axis;
  return m;
}

Multiplier Multiplier::custom(Table table, std::string label) {
  Multiplier m;
  m.kind_ = Kind::custom;
  m.table_ = std::move(table);
  m.label_ = std::move(label);
  return m;
}

Multiplier Multiplier::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (name == "partial") return partial(std::stoi(arg));
    if (name == "riesz") return riesz(std::stoi(arg));
    if (name == "half_power") return half_power(std::stod(arg));
    if (name == "exp_gevrey") return exp_gevrey(std::stod(arg));
  } catch (const std::invalid_argument&) {
    throw ParameterError("malformed multiplier argument in '" + text + "'");
  }
  throw ParameterError("unknown multiplier '" + text + "' (expected partial:j, riesz:j, half_power:s, exp_gevrey:b)");
}

std::string Multiplier::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::half_power: os << "half_power:" << param_; break;
    case Kind::exp_gevrey: os << "exp_gevrey:" << param_; break;
    case Kind::riesz: os << "riesz:" << axis_; break;
    case Kind::partial: os << "partial:" << axis_; break;
    case Kind::custom: os << label_; break;
  }
  return os.str();
}

cplx Multiplier::symbol(const Wavevector& k) const {
  const double kabs = std::sqrt(static_cast<double>(norm2(k)));
  switch (kind_) {
    case Kind::half_power:
      return kabs == 0.0 ? cplx{} : cplx{std::pow(kabs, param_), 0.0};
    case Kind::exp_gevrey:
      return {std::exp(param_ * kabs), 0.0};
    case Kind::riesz:
      return kabs == 0.0 ? cplx{} : cplx{0.0, k[axis_] / kabs};
    case Kind::partial:
      return {0.0, static_cast<double>(k[axis_])};
    case Kind::custom:
      return table_(k);
  }
  return {};
}

}  // namespace gflow
