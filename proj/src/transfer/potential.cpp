#include <cmath>
#include <limits>

#include "ruelle/error.hpp"
#include "ruelle/transfer.hpp"

namespace ruelle {

Potential Potential::geometric(double exponent) {
  Potential p;
  p.kind_ = Kind::geometric;
  p.exponent_ = exponent;
  return p;
}

Potential Potential::custom(CustomFn fn, std::function<double(std::size_t)> tail_sup, std::optional<DiniModulus> modulus) {
  if (!fn) throw Error(ErrorCode::invalid_argument, "custom potential needs a weight function");
  Potential p;
  p.kind_ = Kind::custom;
  p.custom_ = std::move(fn);
  p.custom_tail_ = std::move(tail_sup);
  p.modulus_ = std::move(modulus);
  return p;
}

double Potential::weight(const ConformalMap& sj, std::size_t j, double x) const {
  if (kind_ == Kind::geometric) return std::pow(std::abs(sj.derivative(x)), exponent_);
  return custom_(j, sj(x));
}

double Potential::value(const ConformalMap& sj, std::size_t j, double y) const {
  if (kind_ == Kind::geometric) return std::pow(std::abs(sj.derivative(y)), exponent_);
  return custom_(j, y);
}

double Potential::tail_sup(const IFSFamily& family, std::size_t truncation) const {
  if (family.size() && truncation >= *family.size()) return 0.0;
  if (kind_ == Kind::geometric) return family.tail_sup(exponent_, truncation);
  if (!custom_tail_) return std::numeric_limits<double>::infinity();
  return custom_tail_(truncation);
}

const char* to_string(TailModel model) noexcept {
  return model == TailModel::integral ? "integral" : "none";
}

}  // namespace ruelle
