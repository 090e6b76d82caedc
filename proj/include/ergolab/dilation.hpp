#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ergolab::measures {

// Anisotropic scaling t -> (lambda^{a_1} t_1, ..., lambda^{a_d} t_d) with
// strictly positive exponents. Satisfies lambda.(xi + t) = lambda.xi +
// lambda.t and <xi, lambda.t> = <lambda.xi, t>.
class Dilation {
 public:
  explicit Dilation(std::vector<double> exponents);
  static Dilation standard(std::size_t d);

  std::size_t dim() const { return exponents_.size(); }
  const std::vector<double>& exponents() const { return exponents_; }
  bool is_standard() const;

  // Per-axis scale factors lambda^{a_i}; lambda must be positive.
  std::vector<double> scales(double lambda) const;

  std::vector<double> apply(double lambda, std::span<const double> t) const;
  void apply_inplace(double lambda, std::span<double> t) const;

  bool operator==(const Dilation& o) const { return exponents_ == o.exponents_; }

 private:
  std::vector<double> exponents_;
};

}  // namespace ergolab::measures
