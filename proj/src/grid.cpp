#include "ergolab/grid.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ergolab/kernels.hpp"

namespace ergolab::maximal {

GridFunction::GridFunction(std::vector<double> origin, double spacing,
                           std::vector<std::size_t> extents,
                           bool complex_valued)
    : origin_(std::move(origin)), spacing_(spacing), extents_(std::move(extents)) {
  if (origin_.empty() || origin_.size() != extents_.size())
    throw std::invalid_argument("GridFunction: origin/extents dimension mismatch");
  if (!(spacing_ > 0.0))
    throw std::invalid_argument("GridFunction: spacing must be positive");
  std::size_t total = 1;
  for (std::size_t e : extents_) {
    if (e < 2) throw std::invalid_argument("GridFunction: extents must be >= 2");
    total *= e;
  }
  re_.assign(total, 0.0);
  if (complex_valued) im_.assign(total, 0.0);
}

void GridFunction::ensure_imag() {
  if (im_.empty()) im_.assign(re_.size(), 0.0);
}

std::size_t GridFunction::flat_index(std::span<const std::size_t> idx) const {
  std::size_t flat = 0;
  for (std::size_t ax = 0; ax < idx.size(); ++ax)
    flat = flat * extents_[ax] + idx[ax];
  return flat;
}

std::complex<double> GridFunction::interp(std::span<const double> y) const {
  const std::size_t d = dim();
  if (y.size() != d)
    throw std::invalid_argument("GridFunction::interp: dimension mismatch");
  if (d > 8) throw std::invalid_argument("GridFunction: dim > 8 unsupported");
  long long cell[8];
  double frac[8];
  for (std::size_t ax = 0; ax < d; ++ax) {
    const double u = (y[ax] - origin_[ax]) / spacing_;
    const double fl = std::floor(u);
    cell[ax] = static_cast<long long>(fl);
    frac[ax] = u - fl;
    const long long n = static_cast<long long>(extents_[ax]);
    if (cell[ax] + 1 < 0 || cell[ax] >= n) return 0.0;
  }
  double acc_re = 0.0, acc_im = 0.0;
  const std::size_t corners = 1ull << d;
  for (std::size_t c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t flat = 0;
    bool ok = true;
    for (std::size_t ax = 0; ax < d; ++ax) {
      const bool hi = (c >> ax) & 1u;
      const long long node = cell[ax] + (hi ? 1 : 0);
      if (node < 0 || node >= static_cast<long long>(extents_[ax])) {
        ok = false;
        break;
      }
      w *= hi ? frac[ax] : (1.0 - frac[ax]);
      flat = flat * extents_[ax] + static_cast<std::size_t>(node);
    }
    if (!ok || w == 0.0) continue;
    acc_re += w * re_[flat];
    if (!im_.empty()) acc_im += w * im_[flat];
  }
  return {acc_re, acc_im};
}

namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void GridFunction::write_binary(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  put_le<std::uint64_t>(os, dim());
  for (double o : origin_) put_le<double>(os, o);
  put_le<double>(os, spacing_);
  for (std::size_t e : extents_) put_le<std::uint64_t>(os, e);
  for (std::size_t i = 0; i < re_.size(); ++i) {
    put_le<double>(os, re_[i]);
    put_le<double>(os, im_.empty() ? 0.0 : im_[i]);
  }
  if (!os) throw std::runtime_error("write failed: " + path);

  nlohmann::json side{{"dim", dim()},
                      {"origin", origin_},
                      {"spacing", spacing_},
                      {"extents", extents_},
                      {"count", re_.size()},
                      {"format", "complex128-interleaved"},
                      {"byte_order", "little-endian"}};
  std::ofstream js(path + ".json");
  if (!js) throw std::runtime_error("cannot open for writing: " + path + ".json");
  js << side.dump(2) << '\n';
}

GridFunction GridFunction::read_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  const auto d = get_le<std::uint64_t>(is);
  if (d == 0 || d > 8) throw std::runtime_error("corrupt grid file: " + path);
  std::vector<double> origin(d);
  for (auto& o : origin) o = get_le<double>(is);
  const double spacing = get_le<double>(is);
  std::vector<std::size_t> extents(d);
  for (auto& e : extents) e = get_le<std::uint64_t>(is);
  GridFunction g(std::move(origin), spacing, std::move(extents), true);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.re()[i] = get_le<double>(is);
    g.im()[i] = get_le<double>(is);
  }
  if (!is) throw std::runtime_error("corrupt grid file: " + path);
  bool any_im = false;
  for (double v : g.im())
    if (v != 0.0) any_im = true;
  if (!any_im) g.im().clear();
  return g;
}

std::string GridFunction::csv_1d() const {
  if (dim() != 1)
    throw std::invalid_argument("csv_1d: only 1-d grids export to CSV");
  std::ostringstream os;
  os.precision(17);
  os << (is_real() ? "x,value\n" : "x,value_re,value_im\n");
  for (std::size_t i = 0; i < re_.size(); ++i) {
    os << node_coord(0, i) << ',' << re_[i];
    if (!is_real()) os << ',' << im_[i];
    os << '\n';
  }
  return os.str();
}

double lp_norm(const GridFunction& g, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const double s = kernels::ops().sum_abs_pow(
      g.re().data(), g.is_real() ? nullptr : g.im().data(), g.size(), p);
  const double cell = std::pow(g.spacing(), static_cast<double>(g.dim()));
  return std::pow(cell * s, 1.0 / p);
}

double sup_norm(const GridFunction& g) {
  if (g.is_real()) return kernels::ops().reduce_max_abs(g.re().data(), g.size());
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    m = std::max(m, std::sqrt(g.re()[i] * g.re()[i] + g.im()[i] * g.im()[i]));
  return m;
}

double Profile::eval(std::span<const double> x) const {
  double acc = 0.0;
  for (const auto& t : terms) {
    double r2 = 0.0;
    for (std::size_t ax = 0; ax < x.size(); ++ax) {
      const double dx = x[ax] - t.center[ax];
      r2 += dx * dx;
    }
    if (t.type == ProfileTerm::Type::gaussian) {
      acc += t.amplitude * std::exp(-r2 / (2.0 * t.scale * t.scale));
    } else {
      const double u = 1.0 - r2 / (t.scale * t.scale);
      if (u > 0.0) acc += t.amplitude * u * u * u;
    }
  }
  return acc;
}

nlohmann::json Profile::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : terms)
    arr.push_back({{"type", t.type == ProfileTerm::Type::gaussian ? "gaussian"
                                                                  : "bump"},
                   {"center", t.center},
                   {"scale", t.scale},
                   {"amplitude", t.amplitude}});
  return nlohmann::json{{"terms", arr}};
}

Profile Profile::from_json(const nlohmann::json& j) {
  Profile p;
  for (const auto& tj : j.at("terms")) {
    ProfileTerm t;
    const std::string type = tj.at("type").get<std::string>();
    if (type == "gaussian")
      t.type = ProfileTerm::Type::gaussian;
    else if (type == "bump")
      t.type = ProfileTerm::Type::bump;
    else
      throw std::invalid_argument("unknown profile term type: " + type);
    t.center = tj.at("center").get<std::vector<double>>();
    t.scale = tj.at("scale").get<double>();
    if (!(t.scale > 0.0))
      throw std::invalid_argument("profile term scale must be positive");
    t.amplitude = tj.value("amplitude", 1.0);
    p.terms.push_back(std::move(t));
  }
  if (p.terms.empty()) throw std::invalid_argument("profile needs >= 1 term");
  return p;
}

Profile Profile::standard_gaussian(std::size_t d) {
  ProfileTerm t;
  t.type = ProfileTerm::Type::gaussian;
  t.center.assign(d, 0.0);
  t.scale = 1.0;
  t.amplitude = std::pow(2.0 * 3.14159265358979323846, -0.5 * static_cast<double>(d));
  return Profile{{t}};
}

GridFunction sample_profile(const Profile& profile, std::vector<double> origin,
                            double spacing, std::vector<std::size_t> extents) {
  GridFunction g(std::move(origin), spacing, std::move(extents));
  const std::size_t d = g.dim();
  std::vector<double> x(d);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    std::size_t rem = flat;
    for (std::size_t ax = d; ax-- > 0;) {
      idx[ax] = rem % g.extents()[ax];
      rem /= g.extents()[ax];
    }
    for (std::size_t ax = 0; ax < d; ++ax) x[ax] = g.node_coord(ax, idx[ax]);
    g.re()[flat] = profile.eval(x);
  }
  return g;
}

}  // namespace ergolab::maximal
