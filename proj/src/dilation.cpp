#include "ergolab/dilation.hpp"

#include <cmath>
#include <stdexcept>

namespace ergolab::measures {

Dilation::Dilation(std::vector<double> exponents)
    : exponents_(std::move(exponents)) {
  if (exponents_.empty())
    throw std::invalid_argument("Dilation: empty exponent list");
  for (double a : exponents_) {
    if (!(a > 0.0) || !std::isfinite(a))
      throw std::invalid_argument("Dilation: exponents must be positive reals");
  }
}

Dilation Dilation::standard(std::size_t d) {
  return Dilation(std::vector<double>(d, 1.0));
}

bool Dilation::is_standard() const {
  for (double a : exponents_)
    if (a != 1.0) return false;
  return true;
}

std::vector<double> Dilation::scales(double lambda) const {
  if (!(lambda > 0.0))
    throw std::invalid_argument("Dilation: lambda must be positive");
  std::vector<double> s(exponents_.size());
  for (std::size_t i = 0; i < exponents_.size(); ++i)
    s[i] = std::pow(lambda, exponents_[i]);
  return s;
}

std::vector<double> Dilation::apply(double lambda,
                                    std::span<const double> t) const {
  if (t.size() != exponents_.size())
    throw std::invalid_argument("Dilation: dimension mismatch");
  auto s = scales(lambda);
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = s[i] * t[i];
  return out;
}

void Dilation::apply_inplace(double lambda, std::span<double> t) const {
  if (t.size() != exponents_.size())
    throw std::invalid_argument("Dilation: dimension mismatch");
  auto s = scales(lambda);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] *= s[i];
}

}  // namespace ergolab::measures
