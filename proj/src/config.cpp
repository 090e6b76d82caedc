#include "ergolab/config.hpp"

#include <set>

#include "ergolab/dynamics.hpp"
#include "ergolab/grid.hpp"
#include "ergolab/measure.hpp"
#include "ergolab/spectral.hpp"

namespace ergolab::runner {
namespace {

struct ExperimentInfo {
  Experiment id;
  const char* name;
};

constexpr ExperimentInfo kExperiments[] = {
    {Experiment::fourier_dim, "fourier-dim"},
    {Experiment::mean_ergodic, "mean-ergodic"},
    {Experiment::zd_bound, "zd-bound"},
    {Experiment::pointwise, "pointwise"},
    {Experiment::maximal, "maximal"},
    {Experiment::curve, "curve"},
    {Experiment::salem, "salem"},
    {Experiment::transfer, "transfer"},
};

class Checker {
 public:
  explicit Checker(const nlohmann::json& raw) : raw_(raw) {}

  void error(const std::string& msg) { errors_.push_back(msg); }

  bool has(const char* key) const { return raw_.contains(key); }

  const nlohmann::json* require(const char* key) {
    if (!raw_.contains(key)) {
      errors_.push_back(std::string("missing required field '") + key + "'");
      return nullptr;
    }
    return &raw_.at(key);
  }

  template <typename T>
  std::optional<T> get(const char* key) {
    if (!raw_.contains(key)) return std::nullopt;
    try {
      return raw_.at(key).get<T>();
    } catch (const std::exception&) {
      errors_.push_back(std::string("field '") + key + "' has the wrong type");
      return std::nullopt;
    }
  }

  template <typename T>
  T get_or(const char* key, T fallback) {
    auto v = get<T>(key);
    return v ? *v : fallback;
  }

  void check_keys(const std::set<std::string>& allowed) {
    for (const auto& [key, value] : raw_.items()) {
      (void)value;
      if (!allowed.count(key))
        errors_.push_back("unknown field '" + key + "'");
    }
  }

  const std::vector<std::string>& errors() const { return errors_; }
  bool ok() const { return errors_.empty(); }

 private:
  const nlohmann::json& raw_;
  std::vector<std::string> errors_;
};

nlohmann::json default_range(double lo, double hi, std::size_t count) {
  return nlohmann::json{{"min", lo}, {"max", hi}, {"count", count}};
}

// Validates a {min, max, count} range block; returns the canonical form.
std::optional<nlohmann::json> check_range(Checker& ck, const nlohmann::json& j,
                                          const char* field, bool log_ok = true) {
  (void)log_ok;
  if (!j.is_object() || !j.contains("min") || !j.contains("max") ||
      !j.contains("count")) {
    ck.error(std::string("'") + field + "' must be {min, max, count}");
    return std::nullopt;
  }
  try {
    const double lo = j.at("min").get<double>();
    const double hi = j.at("max").get<double>();
    const auto count = j.at("count").get<std::size_t>();
    if (!(lo > 0.0) || !(hi > lo) || count < 2) {
      ck.error(std::string("'") + field +
               "' needs 0 < min < max and count >= 2");
      return std::nullopt;
    }
    return nlohmann::json{{"min", lo}, {"max", hi}, {"count", count}};
  } catch (const std::exception&) {
    ck.error(std::string("'") + field + "' has malformed entries");
    return std::nullopt;
  }
}

std::optional<measures::ProbabilityMeasure> check_measure(
    Checker& ck, const nlohmann::json* j, const char* field) {
  if (!j) return std::nullopt;
  try {
    return measures::ProbabilityMeasure::from_json(*j);
  } catch (const std::exception& e) {
    ck.error(std::string("'") + field + "': " + e.what());
    return std::nullopt;
  }
}

std::optional<measures::Dilation> check_dilation(
    Checker& ck, const nlohmann::json& raw, std::size_t default_dim) {
  try {
    if (raw.contains("dilation"))
      return measures::Dilation(raw.at("dilation").get<std::vector<double>>());
    return measures::Dilation::standard(default_dim);
  } catch (const std::exception& e) {
    ck.error(std::string("'dilation': ") + e.what());
    return std::nullopt;
  }
}

void cross_check_dims(Checker& ck,
                      const std::optional<measures::ProbabilityMeasure>& nu,
                      const std::optional<measures::Dilation>& dil) {
  if (nu && dil && nu->dim() != dil->dim())
    ck.error("dimension mismatch: measure has dim " + std::to_string(nu->dim()) +
             " but 'dilation' has " + std::to_string(dil->dim()) +
             " exponents");
}

}  // namespace

const char* experiment_name(Experiment e) {
  for (const auto& info : kExperiments)
    if (info.id == e) return info.name;
  return "?";
}

std::optional<Experiment> parse_experiment(const std::string& name) {
  for (const auto& info : kExperiments)
    if (name == info.name) return info.id;
  return std::nullopt;
}

std::vector<std::string> experiment_names() {
  std::vector<std::string> names;
  for (const auto& info : kExperiments) names.emplace_back(info.name);
  return names;
}

ValidationResult validate_config_text(const std::string& text) {
  nlohmann::json raw;
  try {
    raw = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    ValidationResult out;
    out.ok = false;
    out.errors.push_back(std::string("JSON parse error: ") + e.what());
    return out;
  }
  return validate_config(raw);
}

ValidationResult validate_config(const nlohmann::json& raw) {
  ValidationResult out;
  if (!raw.is_object()) {
    out.errors.push_back("config root must be a JSON object");
    return out;
  }

  Checker ck(raw);
  nlohmann::json canon;

  const auto exp_name = ck.get<std::string>("experiment");
  if (!exp_name) {
    if (!raw.contains("experiment"))
      ck.error("missing required field 'experiment'");
    out.errors = ck.errors();
    return out;
  }
  const auto exp = parse_experiment(*exp_name);
  if (!exp) {
    std::string msg = "unknown experiment '" + *exp_name + "'; valid names: ";
    bool first = true;
    for (const auto& n : experiment_names()) {
      msg += (first ? "" : ", ") + n;
      first = false;
    }
    ck.error(msg);
    out.errors = ck.errors();
    return out;
  }

  canon["experiment"] = *exp_name;
  canon["seed"] = ck.get_or<std::uint64_t>("seed", 0);
  canon["workers"] = ck.get_or<int>("workers", 0);
  canon["output"] = ck.get_or<std::string>("output", "");
  if (canon["workers"].get<int>() < 0) ck.error("'workers' must be >= 0");

  std::set<std::string> allowed = {"experiment", "seed", "workers", "output"};

  switch (*exp) {
    case Experiment::fourier_dim: {
      allowed.insert({"measure", "radii", "directions", "budget", "fit_window",
                      "tail_fraction"});
      auto nu = check_measure(ck, ck.require("measure"), "measure");
      if (nu) canon["measure"] = nu->to_json();
      canon["radii"] = raw.contains("radii")
                           ? check_range(ck, raw.at("radii"), "radii")
                                 .value_or(default_range(10, 1e4, 40))
                           : default_range(10, 1e4, 40);
      canon["directions"] = ck.get_or<std::size_t>("directions", 0);
      canon["budget"] = ck.get_or<std::size_t>("budget", 0);
      const auto count = canon["radii"].at("count").get<std::size_t>();
      if (raw.contains("fit_window")) {
        try {
          const auto first = raw.at("fit_window").at("first").get<std::size_t>();
          const auto last = raw.at("fit_window").at("last").get<std::size_t>();
          if (first > last || last >= count || last - first + 1 < 3)
            ck.error("'fit_window' must satisfy first <= last < radii count "
                     "with >= 3 points");
          canon["fit_window"] = {{"first", first}, {"last", last}};
        } catch (const std::exception&) {
          ck.error("'fit_window' must be {first, last}");
        }
      } else {
        canon["fit_window"] = {{"first", 0}, {"last", count - 1}};
      }
      const double tf = ck.get_or<double>("tail_fraction", 0.25);
      if (!(tf > 0.0 && tf <= 1.0))
        ck.error("'tail_fraction' must be in (0, 1]");
      canon["tail_fraction"] = tf;
      break;
    }
    case Experiment::mean_ergodic: {
      allowed.insert({"measure", "dilation", "spectral", "lambdas", "budget"});
      auto nu = check_measure(ck, ck.require("measure"), "measure");
      if (nu) canon["measure"] = nu->to_json();
      auto dil = check_dilation(ck, raw, nu ? nu->dim() : 1);
      cross_check_dims(ck, nu, dil);
      if (dil) canon["dilation"] = dil->exponents();
      if (const auto* sj = ck.require("spectral")) {
        try {
          const auto sm = spectral::SpectralMeasure::from_json(*sj);
          if (nu && sm.dim() != nu->dim())
            ck.error("dimension mismatch: 'spectral' atoms have dim " +
                     std::to_string(sm.dim()) + " but 'measure' has dim " +
                     std::to_string(nu->dim()));
          canon["spectral"] = sm.to_json();
        } catch (const std::exception& e) {
          ck.error(std::string("'spectral': ") + e.what());
        }
      }
      canon["lambdas"] = raw.contains("lambdas")
                             ? check_range(ck, raw.at("lambdas"), "lambdas")
                                   .value_or(default_range(1, 1e3, 25))
                             : default_range(1, 1e3, 25);
      canon["budget"] = ck.get_or<std::size_t>("budget", 0);
      break;
    }
    case Experiment::zd_bound: {
      allowed.insert({"rho", "tsm", "horizons"});
      std::optional<spectral::LatticeWeights> rho;
      if (const auto* rj = ck.require("rho")) {
        try {
          rho = spectral::LatticeWeights::from_json(*rj);
          canon["rho"] = rho->to_json();
        } catch (const std::exception& e) {
          ck.error(std::string("'rho': ") + e.what());
        }
      }
      if (const auto* tj = ck.require("tsm")) {
        try {
          const auto tsm = spectral::TorusSpectralMeasure::from_json(*tj);
          if (rho && tsm.dim() != rho->dim())
            ck.error("dimension mismatch: 'tsm' atoms have dim " +
                     std::to_string(tsm.dim()) + " but 'rho' has dim " +
                     std::to_string(rho->dim()));
          canon["tsm"] = tsm.to_json();
        } catch (const std::exception& e) {
          ck.error(std::string("'tsm': ") + e.what());
        }
      }
      auto horizons = ck.get_or<std::vector<std::uint64_t>>(
          "horizons", {1000, 10000, 100000});
      for (auto N : horizons)
        if (N < 1) ck.error("'horizons' entries must be >= 1");
      canon["horizons"] = horizons;
      break;
    }
    case Experiment::pointwise: {
      allowed.insert({"action", "measure", "dilation", "observable", "lambdas",
                      "x_samples", "budget"});
      std::optional<dynamics::TorusAction> action;
      if (const auto* aj = ck.require("action")) {
        try {
          action = dynamics::TorusAction::from_json(*aj);
          canon["action"] = action->to_json();
        } catch (const std::exception& e) {
          ck.error(std::string("'action': ") + e.what());
        }
      }
      auto nu = check_measure(ck, ck.require("measure"), "measure");
      if (nu) canon["measure"] = nu->to_json();
      auto dil = check_dilation(ck, raw, nu ? nu->dim() : 1);
      cross_check_dims(ck, nu, dil);
      if (dil) canon["dilation"] = dil->exponents();
      if (action && nu && action->d != nu->dim())
        ck.error("dimension mismatch: action acts from R^" +
                 std::to_string(action->d) + " but the measure lives on R^" +
                 std::to_string(nu->dim()));
      if (raw.contains("observable")) {
        const auto& oj = raw.at("observable");
        if (oj.contains("random")) {
          try {
            const auto pairs = oj.at("random").at("pairs").get<std::size_t>();
            const auto kmax = oj.at("random").at("kmax").get<long long>();
            if (pairs < 1 || kmax < 1)
              ck.error("'observable.random' needs pairs >= 1 and kmax >= 1");
            canon["observable"] = {
                {"random", {{"pairs", pairs}, {"kmax", kmax}}}};
          } catch (const std::exception&) {
            ck.error("'observable.random' must be {pairs, kmax}");
          }
        } else {
          try {
            const auto f = dynamics::TrigObservable::from_json(oj);
            if (action && f.torus_dim() != action->n)
              ck.error("dimension mismatch: observable modes live on T^" +
                       std::to_string(f.torus_dim()) +
                       " but the action is on T^" + std::to_string(action->n));
            canon["observable"] = f.to_json();
          } catch (const std::exception& e) {
            ck.error(std::string("'observable': ") + e.what());
          }
        }
      } else {
        canon["observable"] = {{"random", {{"pairs", 10}, {"kmax", 3}}}};
      }
      canon["lambdas"] = raw.contains("lambdas")
                             ? check_range(ck, raw.at("lambdas"), "lambdas")
                                   .value_or(default_range(1, 1e3, 13))
                             : default_range(1, 1e3, 13);
      canon["x_samples"] = ck.get_or<std::size_t>("x_samples", 64);
      if (canon["x_samples"].get<std::size_t>() < 1)
        ck.error("'x_samples' must be >= 1");
      canon["budget"] = ck.get_or<std::size_t>("budget", 0);
      break;
    }
    case Experiment::maximal:
    case Experiment::curve: {
      allowed.insert({"grid", "phi", "lambda_grid", "p_values", "alpha",
                      "budget", "emit_grid"});
      std::size_t dim_hint = 1;
      if (*exp == Experiment::maximal) {
        allowed.insert({"measure", "dilation"});
        auto nu = check_measure(ck, ck.require("measure"), "measure");
        if (nu) {
          canon["measure"] = nu->to_json();
          dim_hint = nu->dim();
        }
        auto dil = check_dilation(ck, raw, dim_hint);
        cross_check_dims(ck, nu, dil);
        if (dil) canon["dilation"] = dil->exponents();
      } else {
        allowed.insert({"q", "panels"});
        auto q = ck.get<std::vector<double>>("q");
        if (!q) {
          if (!raw.contains("q")) ck.error("missing required field 'q'");
        } else {
          for (double v : *q)
            if (v == 0.0) ck.error("'q' coefficients must be nonzero");
          canon["q"] = *q;
          dim_hint = q->size();
        }
        const auto panels = ck.get_or<std::size_t>("panels", 1000);
        if (panels < 1) ck.error("'panels' must be >= 1");
        canon["panels"] = panels;
      }
      // grid: {nodes, spacing} cube centered at the origin
      std::size_t nodes = 0;
      if (raw.contains("grid")) {
        try {
          nodes = raw.at("grid").at("nodes").get<std::size_t>();
          const double spacing = raw.at("grid").at("spacing").get<double>();
          if (nodes < 2 || !(spacing > 0.0))
            ck.error("'grid' needs nodes >= 2 and spacing > 0");
          canon["grid"] = {{"nodes", nodes}, {"spacing", spacing}};
        } catch (const std::exception&) {
          ck.error("'grid' must be {nodes, spacing}");
        }
      } else {
        const std::size_t def_nodes =
            dim_hint == 1 ? 65536 : (dim_hint == 2 ? 1024 : 128);
        canon["grid"] = {{"nodes", def_nodes},
                         {"spacing", dim_hint == 1 ? 0.001 : 0.25}};
      }
      if (raw.contains("phi")) {
        try {
          canon["phi"] = maximal::Profile::from_json(raw.at("phi")).to_json();
        } catch (const std::exception& e) {
          ck.error(std::string("'phi': ") + e.what());
        }
      } else {
        canon["phi"] = maximal::Profile::standard_gaussian(dim_hint).to_json();
      }
      canon["lambda_grid"] =
          raw.contains("lambda_grid")
              ? check_range(ck, raw.at("lambda_grid"), "lambda_grid")
                    .value_or(default_range(1e-2, 1e2, 256))
              : default_range(1e-2, 1e2, 256);
      auto ps = ck.get_or<std::vector<double>>("p_values", {2.0});
      for (double p : ps)
        if (!(p >= 1.0)) ck.error("'p_values' entries must be >= 1");
      canon["p_values"] = ps;
      if (raw.contains("alpha")) {
        try {
          const double amin = raw.at("alpha").at("min").get<double>();
          const auto acount = raw.at("alpha").at("count").get<std::size_t>();
          const double amax = raw.at("alpha").value("max", 0.0);  // 0 = sup S
          if (!(amin > 0.0) || acount < 1 ||
              (amax != 0.0 && !(amax > amin)))
            ck.error("'alpha' needs min > 0, count >= 1, and max > min when given");
          canon["alpha"] = {{"min", amin}, {"count", acount}, {"max", amax}};
        } catch (const std::exception&) {
          ck.error("'alpha' must be {min, count[, max]}");
        }
      } else {
        canon["alpha"] = {{"min", 1e-3}, {"count", 64}, {"max", 0.0}};
      }
      canon["budget"] = ck.get_or<std::size_t>("budget", 0);
      canon["emit_grid"] = ck.get_or<bool>("emit_grid", false);
      break;
    }
    case Experiment::salem: {
      allowed.insert(
          {"brownian", "seeds", "radii", "directions", "fit_window"});
      if (const auto* bj = ck.require("brownian")) {
        try {
          const double ratio = bj->at("ratio").get<double>();
          const int depth = bj->at("depth").get<int>();
          const auto dim = bj->at("dim").get<std::size_t>();
          const auto resolution = bj->at("resolution").get<std::size_t>();
          // constructs once to surface parameter errors now
          measures::ProbabilityMeasure::brownian_image(ratio, depth, dim, 1,
                                                       resolution);
          canon["brownian"] = {{"ratio", ratio},
                               {"depth", depth},
                               {"dim", dim},
                               {"resolution", resolution}};
        } catch (const std::exception& e) {
          ck.error(std::string("'brownian': ") + e.what());
        }
      }
      const auto nseeds = ck.get_or<std::size_t>("seeds", 20);
      if (nseeds < 1) ck.error("'seeds' must be >= 1");
      canon["seeds"] = nseeds;
      canon["radii"] = raw.contains("radii")
                           ? check_range(ck, raw.at("radii"), "radii")
                                 .value_or(default_range(10, 1e4, 32))
                           : default_range(10, 1e4, 32);
      canon["directions"] = ck.get_or<std::size_t>("directions", 96);
      const auto count = canon["radii"].at("count").get<std::size_t>();
      canon["fit_window"] = {{"first", 0}, {"last", count - 1}};
      if (raw.contains("fit_window")) {
        try {
          const auto first = raw.at("fit_window").at("first").get<std::size_t>();
          const auto last = raw.at("fit_window").at("last").get<std::size_t>();
          if (first > last || last >= count || last - first + 1 < 3)
            ck.error("'fit_window' must satisfy first <= last < radii count");
          canon["fit_window"] = {{"first", first}, {"last", last}};
        } catch (const std::exception&) {
          ck.error("'fit_window' must be {first, last}");
        }
      }
      break;
    }
    case Experiment::transfer: {
      allowed.insert({"action", "measure", "dilation", "p", "family",
                      "x_samples", "lambda_grid", "grid", "window_sigma",
                      "budget"});
      std::optional<dynamics::TorusAction> action;
      if (const auto* aj = ck.require("action")) {
        try {
          action = dynamics::TorusAction::from_json(*aj);
          canon["action"] = action->to_json();
        } catch (const std::exception& e) {
          ck.error(std::string("'action': ") + e.what());
        }
      }
      auto nu = check_measure(ck, ck.require("measure"), "measure");
      if (nu) canon["measure"] = nu->to_json();
      auto dil = check_dilation(ck, raw, nu ? nu->dim() : 1);
      cross_check_dims(ck, nu, dil);
      if (dil) canon["dilation"] = dil->exponents();
      if (action && nu && action->d != nu->dim())
        ck.error("dimension mismatch: action acts from R^" +
                 std::to_string(action->d) + " but the measure lives on R^" +
                 std::to_string(nu->dim()));
      const double p = ck.get_or<double>("p", 2.0);
      if (!(p >= 1.0)) ck.error("'p' must be >= 1");
      canon["p"] = p;
      if (raw.contains("family")) {
        try {
          const auto size = raw.at("family").at("size").get<std::size_t>();
          const auto pairs = raw.at("family").at("pairs").get<std::size_t>();
          const auto kmax = raw.at("family").at("kmax").get<long long>();
          if (size < 1 || pairs < 1 || kmax < 1)
            ck.error("'family' needs size, pairs, kmax >= 1");
          canon["family"] = {{"size", size}, {"pairs", pairs}, {"kmax", kmax}};
        } catch (const std::exception&) {
          ck.error("'family' must be {size, pairs, kmax}");
        }
      } else {
        canon["family"] = {{"size", 6}, {"pairs", 3}, {"kmax", 1}};
      }
      canon["x_samples"] = ck.get_or<std::size_t>("x_samples", 512);
      canon["lambda_grid"] =
          raw.contains("lambda_grid")
              ? check_range(ck, raw.at("lambda_grid"), "lambda_grid")
                    .value_or(default_range(0.02, 0.5, 16))
              : default_range(0.02, 0.5, 16);
      if (raw.contains("grid")) {
        try {
          const auto nodes = raw.at("grid").at("nodes").get<std::size_t>();
          const double spacing = raw.at("grid").at("spacing").get<double>();
          if (nodes < 2 || !(spacing > 0.0))
            ck.error("'grid' needs nodes >= 2 and spacing > 0");
          canon["grid"] = {{"nodes", nodes}, {"spacing", spacing}};
        } catch (const std::exception&) {
          ck.error("'grid' must be {nodes, spacing}");
        }
      } else {
        const std::size_t def_nodes = (nu && nu->dim() == 3) ? 96 : 16384;
        canon["grid"] = {{"nodes", def_nodes},
                         {"spacing", (nu && nu->dim() == 3) ? 0.25 : 0.02}};
      }
      canon["window_sigma"] = ck.get_or<double>("window_sigma", 0.0);
      canon["budget"] = ck.get_or<std::size_t>("budget", 0);
      break;
    }
  }

  ck.check_keys(allowed);

  out.errors = ck.errors();
  out.ok = out.errors.empty();
  if (out.ok) {
    ExperimentConfig cfg;
    cfg.experiment = *exp;
    cfg.seed = canon["seed"].get<std::uint64_t>();
    cfg.workers = canon["workers"].get<int>();
    cfg.out_prefix = canon["output"].get<std::string>();
    // Execution plumbing stays out of the echoed config: neither the worker
    // count nor the output path can influence the table bytes.
    canon.erase("workers");
    canon.erase("output");
    cfg.canonical = std::move(canon);
    out.config = std::move(cfg);
  }
  return out;
}

}  // namespace ergolab::runner
