#include "ergolab/experiments.hpp"

#include <chrono>
#include <cmath>

#include "ergolab/dynamics.hpp"
#include "ergolab/fourier.hpp"
#include "ergolab/maximal.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/rng.hpp"
#include "ergolab/spectral.hpp"

namespace ergolab::runner {
namespace {

using measures::Dilation;
using measures::ProbabilityMeasure;

std::vector<double> range_grid(const nlohmann::json& r) {
  return maximal::log_lambda_grid(r.at("min").get<double>(),
                                  r.at("max").get<double>(),
                                  r.at("count").get<std::size_t>());
}

std::int64_t as_i64(std::uint64_t v) {
  return static_cast<std::int64_t>(v & 0x7FFFFFFFFFFFFFFFull);
}

ResultTable run_fourier_dim(const ExperimentConfig& cfg) {
  const auto& c = cfg.canonical;
  const auto nu = ProbabilityMeasure::from_json(c.at("measure"));
  const auto radii = range_grid(c.at("radii"));
  const auto profile = fourier::decay_profile(
      nu, radii, c.at("directions").get<std::size_t>(),
      c.at("budget").get<std::size_t>(), cfg.seed, cfg.workers);
  const auto est = fourier::estimate_fourier_dimension(
      profile, c.at("fit_window").at("first").get<std::size_t>(),
      c.at("fit_window").at("last").get<std::size_t>());
  const double defect =
      fourier::rajchman_defect(profile, c.at("tail_fraction").get<double>());

  ResultTable t(experiment_name(cfg.experiment),
                {{"radius", Column::Type::real},
                 {"sup_modulus", Column::Type::real},
                 {"mean_modulus", Column::Type::real},
                 {"n_directions", Column::Type::integer},
                 {"a_hat", Column::Type::real},
                 {"a_stderr", Column::Type::real},
                 {"rajchman_defect", Column::Type::real}});
  for (std::size_t i = 0; i < profile.radii.size(); ++i)
    t.add_row({profile.radii[i], profile.sup_modulus[i],
               profile.mean_modulus[i],
               static_cast<std::int64_t>(profile.n_directions), est.a_hat,
               est.stderr_a, defect});
  return t;
}

ResultTable run_mean_ergodic(const ExperimentConfig& cfg) {
  const auto& c = cfg.canonical;
  const auto rho = ProbabilityMeasure::from_json(c.at("measure"));
  const Dilation dil(c.at("dilation").get<std::vector<double>>());
  const auto sm = spectral::SpectralMeasure::from_json(c.at("spectral"));
  const auto lambdas = range_grid(c.at("lambdas"));
  const auto curve = spectral::mean_convergence_curve(
      rho, dil, lambdas, sm, c.at("budget").get<std::size_t>(), cfg.seed,
      cfg.workers);
  const double bound = sm.total_mass() - spectral::projection_mass(sm);

  ResultTable t(experiment_name(cfg.experiment),
                {{"lambda", Column::Type::real},
                 {"value", Column::Type::real},
                 {"predicted", Column::Type::real},
                 {"bound", Column::Type::real}});
  for (const auto& [lambda, nv] : curve)
    t.add_row({lambda, nv.value, 0.0, bound});
  return t;
}

ResultTable run_zd_bound(const ExperimentConfig& cfg) {
  const auto& c = cfg.canonical;
  const auto rho = spectral::LatticeWeights::from_json(c.at("rho"));
  const auto tsm = spectral::TorusSpectralMeasure::from_json(c.at("tsm"));
  const auto horizons = c.at("horizons").get<std::vector<std::uint64_t>>();

  ResultTable t(experiment_name(cfg.experiment),
                {{"N", Column::Type::integer},
                 {"cesaro", Column::Type::real},
                 {"predicted", Column::Type::real},
                 {"bound", Column::Type::real}});
  for (auto N : horizons) {
    const auto r = spectral::zd_cesaro(rho, tsm, N);
    t.add_row({static_cast<std::int64_t>(N), r.cesaro_mean, r.predicted_limit,
               r.lower_bound});
  }
  return t;
}

ResultTable run_pointwise(const ExperimentConfig& cfg) {
  const auto& c = cfg.canonical;
  const auto action = dynamics::TorusAction::from_json(c.at("action"));
  const auto nu = ProbabilityMeasure::from_json(c.at("measure"));
  const Dilation dil(c.at("dilation").get<std::vector<double>>());
  dynamics::TrigObservable f;
  if (c.at("observable").contains("random")) {
    const auto& rj = c.at("observable").at("random");
    f = dynamics::random_real_observable(rj.at("pairs").get<std::size_t>(),
                                         rj.at("kmax").get<long long>(),
                                         action.n, cfg.seed, 0);
  } else {
    f = dynamics::TrigObservable::from_json(c.at("observable"));
  }
  const auto lambdas = range_grid(c.at("lambdas"));
  dynamics::SweepOptions opts;
  opts.x_samples = c.at("x_samples").get<std::size_t>();
  opts.budget = c.at("budget").get<std::size_t>();
  opts.workers = cfg.workers;
  const auto sweep =
      dynamics::convergence_sweep(action, nu, dil, lambdas, f, cfg.seed, opts);

  ResultTable t(experiment_name(cfg.experiment),
                {{"lambda", Column::Type::real},
                 {"deviation_max", Column::Type::real},
                 {"deviation_mean", Column::Type::real},
                 {"x_samples", Column::Type::integer}});
  for (const auto& row : sweep.rows)
    t.add_row({row.lambda, row.deviation_max, row.deviation_mean,
               static_cast<std::int64_t>(sweep.x_samples)});
  return t;
}

// Cube grid with a node pinned at the origin, so the identity limit of the
// dilation family is sampled exactly at the bump center.
maximal::GridFunction make_centered_grid(const nlohmann::json& grid_spec,
                                         const maximal::Profile& profile,
                                         std::size_t d) {
  const auto nodes = grid_spec.at("nodes").get<std::size_t>();
  const double spacing = grid_spec.at("spacing").get<double>();
  std::vector<std::size_t> extents(d, nodes);
  std::vector<double> origin(d, -spacing * static_cast<double>(nodes / 2));
  return maximal::sample_profile(profile, std::move(origin), spacing,
                                 std::move(extents));
}

ResultTable run_maximal_like(const ExperimentConfig& cfg) {
  const auto& c = cfg.canonical;
  const bool is_curve = cfg.experiment == Experiment::curve;

  std::size_t d = 0;
  std::vector<double> q;
  ProbabilityMeasure nu = ProbabilityMeasure::dirac({0.0});
  Dilation dil = Dilation::standard(1);
  if (is_curve) {
    q = c.at("q").get<std::vector<double>>();
    d = q.size();
    std::vector<double> exps(d);
    for (std::size_t i = 0; i < d; ++i) exps[i] = static_cast<double>(i + 1);
    dil = Dilation(std::move(exps));
  } else {
    nu = ProbabilityMeasure::from_json(c.at("measure"));
    d = nu.dim();
    dil = Dilation(c.at("dilation").get<std::vector<double>>());
  }

  const auto profile = maximal::Profile::from_json(c.at("phi"));
  const auto phi = make_centered_grid(c.at("grid"), profile, d);
  const auto lambda_grid = range_grid(c.at("lambda_grid"));

  maximal::GridFunction S;
  if (is_curve) {
    S = maximal::curve_maximal(phi, q, dil, lambda_grid,
                               c.at("panels").get<std::size_t>(), cfg.workers);
  } else {
    S = maximal::maximal_function(phi, nu, dil, lambda_grid,
                                  c.at("budget").get<std::size_t>(), cfg.seed,
                                  cfg.workers);
  }

  const double sup = maximal::sup_norm(S);
  const double alpha_max = c.at("alpha").at("max").get<double>();
  const auto alphas = maximal::default_alpha_grid(
      alpha_max > 0.0 ? alpha_max : sup,
      c.at("alpha").at("count").get<std::size_t>(),
      c.at("alpha").at("min").get<double>());

  ResultTable t(experiment_name(cfg.experiment),
                {{"p", Column::Type::real},
                 {"weak_type_ratio", Column::Type::real},
                 {"lp_ratio", Column::Type::real},
                 {"sup_S", Column::Type::real},
                 {"grid_nodes", Column::Type::integer}});
  for (double p : c.at("p_values").get<std::vector<double>>()) {
    const double weak = maximal::weak_type_ratio(S, phi, p, alphas);
    const double lp = maximal::lp_norm(S, p) / maximal::lp_norm(phi, p);
    t.add_row({p, weak, lp, sup,
               static_cast<std::int64_t>(
                   c.at("grid").at("nodes").get<std::size_t>())});
  }
  if (c.at("emit_grid").get<bool>() && !cfg.out_prefix.empty())
    S.write_binary(cfg.out_prefix + ".grid");
  return t;
}

ResultTable run_salem(const ExperimentConfig& cfg) {
  const auto& c = cfg.canonical;
  const auto& b = c.at("brownian");
  const auto nseeds = c.at("seeds").get<std::size_t>();
  const auto radii = range_grid(c.at("radii"));
  const auto first = c.at("fit_window").at("first").get<std::size_t>();
  const auto last = c.at("fit_window").at("last").get<std::size_t>();

  std::vector<std::uint64_t> path_seeds(nseeds);
  for (std::size_t i = 0; i < nseeds; ++i) {
    const auto blk = Philox4x32::block(cfg.seed, stream_tag::brownian_path,
                                       0x5EEDull + i);
    path_seeds[i] = (static_cast<std::uint64_t>(blk[1]) << 32) | blk[0];
  }

  std::vector<double> a_hats(nseeds), a_errs(nseeds);
  parallel_for(nseeds, cfg.workers, [&](std::size_t i) {
    const auto nu = ProbabilityMeasure::brownian_image(
        b.at("ratio").get<double>(), b.at("depth").get<int>(),
        b.at("dim").get<std::size_t>(), path_seeds[i],
        b.at("resolution").get<std::size_t>());
    const auto profile = fourier::decay_profile(
        nu, radii, c.at("directions").get<std::size_t>(), 0, cfg.seed,
        /*workers=*/1);
    const auto est = fourier::estimate_fourier_dimension(profile, first, last);
    a_hats[i] = est.a_hat;
    a_errs[i] = est.stderr_a;
  });

  ResultTable t(experiment_name(cfg.experiment),
                {{"seed_index", Column::Type::integer},
                 {"path_seed", Column::Type::integer},
                 {"a_hat", Column::Type::real},
                 {"a_stderr", Column::Type::real}});
  for (std::size_t i = 0; i < nseeds; ++i)
    t.add_row({static_cast<std::int64_t>(i), as_i64(path_seeds[i]), a_hats[i],
               a_errs[i]});
  return t;
}

ResultTable run_transfer(const ExperimentConfig& cfg) {
  const auto& c = cfg.canonical;
  const auto action = dynamics::TorusAction::from_json(c.at("action"));
  const auto nu = ProbabilityMeasure::from_json(c.at("measure"));
  const Dilation dil(c.at("dilation").get<std::vector<double>>());
  dynamics::TransferParams params;
  params.family_size = c.at("family").at("size").get<std::size_t>();
  params.modes_per_observable = c.at("family").at("pairs").get<std::size_t>();
  params.kmax = c.at("family").at("kmax").get<long long>();
  params.x_samples = c.at("x_samples").get<std::size_t>();
  params.lambda_grid = range_grid(c.at("lambda_grid"));
  params.grid_nodes = c.at("grid").at("nodes").get<std::size_t>();
  params.grid_spacing = c.at("grid").at("spacing").get<double>();
  params.window_sigma = c.at("window_sigma").get<double>();
  params.conv_budget = c.at("budget").get<std::size_t>();
  const double p = c.at("p").get<double>();

  const auto r =
      dynamics::transfer_ratio(action, nu, dil, p, params, cfg.seed,
                               cfg.workers);

  ResultTable t(experiment_name(cfg.experiment),
                {{"p", Column::Type::real},
                 {"torus_constant", Column::Type::real},
                 {"grid_constant", Column::Type::real},
                 {"ratio", Column::Type::real}});
  t.add_row({p, r.torus_constant, r.grid_constant, r.ratio});
  return t;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ResultTable t;
  switch (cfg.experiment) {
    case Experiment::fourier_dim: t = run_fourier_dim(cfg); break;
    case Experiment::mean_ergodic: t = run_mean_ergodic(cfg); break;
    case Experiment::zd_bound: t = run_zd_bound(cfg); break;
    case Experiment::pointwise: t = run_pointwise(cfg); break;
    case Experiment::maximal:
    case Experiment::curve: t = run_maximal_like(cfg); break;
    case Experiment::salem: t = run_salem(cfg); break;
    case Experiment::transfer: t = run_transfer(cfg); break;
  }
  t.set_seed(cfg.seed);
  t.set_config_echo(cfg.canonical);
  const auto stop = std::chrono::steady_clock::now();
  t.set_wall_time(std::chrono::duration<double>(stop - start).count());
  return t;
}

}  // namespace ergolab::runner
