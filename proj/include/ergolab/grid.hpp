#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace ergolab::maximal {

// Sampled test function on a regular d-dimensional grid with uniform spacing.
// Values are stored as separate real/imaginary planes; the imaginary plane is
// absent for real data. Reads outside the extents are zero by convention.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(std::vector<double> origin, double spacing,
               std::vector<std::size_t> extents, bool complex_valued = false);

  std::size_t dim() const { return origin_.size(); }
  const std::vector<double>& origin() const { return origin_; }
  double spacing() const { return spacing_; }
  const std::vector<std::size_t>& extents() const { return extents_; }
  std::size_t size() const { return re_.size(); }

  bool is_real() const { return im_.empty(); }
  void ensure_imag();

  std::vector<double>& re() { return re_; }
  const std::vector<double>& re() const { return re_; }
  std::vector<double>& im() { return im_; }
  const std::vector<double>& im() const { return im_; }

  double node_coord(std::size_t axis, std::size_t index) const {
    return origin_[axis] + spacing_ * static_cast<double>(index);
  }
  std::size_t flat_index(std::span<const std::size_t> idx) const;

  // Multilinear interpolation; zero outside the extents.
  std::complex<double> interp(std::span<const double> y) const;

  bool same_layout(const GridFunction& o) const {
    return origin_ == o.origin_ && spacing_ == o.spacing_ &&
           extents_ == o.extents_;
  }

  // Flat binary layout (little endian): u64 dim; dim x f64 origin;
  // f64 spacing; dim x u64 extents; then size() complex pairs (re, im).
  // A JSON sidecar with the same header fields is written next to it.
  void write_binary(const std::string& path) const;
  static GridFunction read_binary(const std::string& path);

  // CSV export of a 1-d grid (coordinate, re[, im]).
  std::string csv_1d() const;

 private:
  std::vector<double> origin_;
  double spacing_ = 1.0;
  std::vector<std::size_t> extents_;
  std::vector<double> re_, im_;
};

// (h^d * sum |v|^p)^{1/p}
double lp_norm(const GridFunction& g, double p);
double sup_norm(const GridFunction& g);

// Closed-form test profiles sampled to grids: Gaussians and compactly
// supported polynomial bumps amplitude*(1 - |x-c|^2/r^2)^3_+, plus signed
// sums of those.
struct ProfileTerm {
  enum class Type { gaussian, bump };
  Type type = Type::gaussian;
  std::vector<double> center;
  double scale = 1.0;      // sigma (gaussian) or radius (bump)
  double amplitude = 1.0;  // gaussian term is amplitude * exp(-|x-c|^2/2s^2)
};

struct Profile {
  std::vector<ProfileTerm> terms;

  double eval(std::span<const double> x) const;
  nlohmann::json to_json() const;
  static Profile from_json(const nlohmann::json& j);
  static Profile standard_gaussian(std::size_t d);  // N(0, I) density
};

GridFunction sample_profile(const Profile& profile, std::vector<double> origin,
                            double spacing, std::vector<std::size_t> extents);

}  // namespace ergolab::maximal
