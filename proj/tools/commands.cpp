#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hallcal/config.hpp"
#include "hallcal/datasets.hpp"
#include "hallcal/errors.hpp"
#include "hallcal/inference.hpp"
#include "hallcal/parallel.hpp"
#include "hallcal/system.hpp"
#include "hallcal/uq.hpp"
#include "plots.hpp"

namespace hallcal::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  fs::path config;
  std::vector<std::string> datasets;
  fs::path out = "out";
  std::uint64_t seed = 0;
  std::optional<long> samples;
  std::string mode = "both";
  int workers = 0;
  bool emit_plots = false;
  fs::path chain;
  double noise = 2.0;
  std::string name = "synthetic";
  std::vector<std::string> qois;
};

json condition_json(const OperatingCondition& c) {
  return {{"discharge_voltage", c.discharge_voltage},
          {"background_pressure", c.background_pressure},
          {"anode_mass_flow", c.anode_mass_flow}};
}

std::vector<fs::path> dataset_paths(const Options& opt, const std::vector<fs::path>& fallback) {
  if (opt.datasets.empty()) return fallback;
  return {opt.datasets.begin(), opt.datasets.end()};
}

fs::path chain_path(const Options& opt) { return opt.chain.empty() ? opt.out / "chain.tsv" : opt.chain; }

std::vector<datasets::QoI> parse_qois(const std::vector<std::string>& names) {
  std::vector<datasets::QoI> out;
  for (const auto& n : names) {
    const auto q = datasets::qoi_from_name(n);
    if (!q) throw ConfigError("unknown QoI '" + n + "'");
    out.push_back(*q);
  }
  return out;
}

std::vector<OperatingCondition> conditions_from_datasets(const std::vector<datasets::Dataset>& data) {
  std::vector<OperatingCondition> out;
  for (const auto& ds : data) {
    for (const auto& c : ds.conditions()) {
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
  }
  return out;
}

int cmd_simulate(const Options& opt) {
  const auto cfg = config::load_config(opt.config);
  if (!cfg.theta) throw ConfigError("simulate needs a 'theta' block in the config");
  if (!cfg.condition) throw ConfigError("simulate needs a 'condition' block in the config");
  const system::SystemModel model(cfg.system);
  const auto out = model.evaluate(*cfg.theta, *cfg.condition, cfg.outputs);

  fs::create_directories(opt.out);
  json j = {{"thruster", cfg.thruster_name},
            {"condition", condition_json(*cfg.condition)},
            {"V_cc", out.V_cc},
            {"thrust", out.thrust_uncorrected},
            {"thrust_corrected", out.thrust_corrected},
            {"discharge_current", out.discharge_current},
            {"beam_current", out.beam_current},
            {"divergence_angle", out.divergence_angle}};
  std::ofstream(opt.out / "system.json") << j.dump(2) << '\n';
  {
    std::ofstream prof(opt.out / "profile.dat");
    thruster::write_profile(prof, out.profile);
  }
  if (!out.j_ion.empty()) {
    std::ofstream f(opt.out / "j_ion.dat");
    f.precision(10);
    f << "r[m] phi[rad] j_ion[A/m2]\n";
    for (const auto& p : out.j_ion) {
      for (std::size_t k = 0; k < p.angles.size(); ++k) f << p.radius << ' ' << p.angles[k] << ' ' << p.values[k] << '\n';
    }
  }
  std::cout << "V_cc = " << out.V_cc << " V\n"
            << "I_D  = " << out.discharge_current << " A\n"
            << "I_B  = " << out.beam_current << " A\n"
            << "T    = " << out.thrust_uncorrected * 1e3 << " mN\n"
            << "T_c  = " << out.thrust_corrected * 1e3 << " mN\n"
            << "divergence = " << out.divergence_angle << " rad\n";
  if (opt.emit_plots) {
    plots::write_svg(opt.out / "u_ion.svg", {"Axial ion velocity", "z [m]", "u_ion [m/s]",
                                             {{"u_ion", out.z, out.u_ion, {}, {}, false}}});
    plots::write_svg(opt.out / "T_e.svg", {"Electron temperature", "z [m]", "T_e [eV]",
                                           {{"T_e", out.profile.z, out.profile.T_e, {}, {}, false}}});
    if (!out.j_ion.empty()) {
      plots::Figure fig{"Ion current density", "angle [rad]", "j_ion [A/m^2]", {}};
      for (const auto& p : out.j_ion) fig.series.push_back({"r = " + std::to_string(p.radius) + " m", p.angles, p.values, {}, {}, false});
      plots::write_svg(opt.out / "j_ion.svg", fig);
    }
  }
  return kExitOk;
}

int cmd_synthesize(const Options& opt) {
  const auto cfg = config::load_config(opt.config);
  if (!cfg.theta) throw ConfigError("synthesize needs a 'theta' block in the config");
  datasets::SynthesisSpec spec;
  spec.name = opt.name;
  spec.thruster_id = cfg.thruster_name;
  spec.conditions = cfg.prediction_conditions;
  if (spec.conditions.empty() && cfg.condition) spec.conditions.push_back(*cfg.condition);
  if (spec.conditions.empty()) throw ConfigError("synthesize needs 'prediction.conditions' or 'condition'");
  if (!opt.qois.empty()) spec.qois = parse_qois(opt.qois);
  spec.j_ion = cfg.outputs.j_ion;
  const auto grid = uq::solver_grid(cfg.system.thruster);
  for (std::size_t i = grid.size() / 3; i < grid.size(); i += std::max<std::size_t>(1, grid.size() / 15)) {
    spec.u_ion_z.push_back(grid[i]);
  }
  spec.noise_percent = opt.noise;
  spec.seed = opt.seed;
  const system::SystemModel model(cfg.system);
  const auto ds = datasets::synthesize_dataset(model, *cfg.theta, spec);
  for (const auto& p : datasets::save_dataset(ds, opt.out)) std::cout << "wrote " << p.string() << '\n';
  return kExitOk;
}

int cmd_calibrate(const Options& opt) {
  auto cfg = config::load_config(opt.config);
  const auto paths = dataset_paths(opt, cfg.datasets);
  if (paths.empty()) throw ConfigError("calibrate needs training datasets (--datasets or 'datasets' in the config)");
  std::vector<datasets::Dataset> training;
  for (auto& ds : datasets::load_datasets(paths)) {
    if (ds.category != datasets::Category::training) {
      std::cerr << "warning: skipping test dataset '" << ds.name << "'\n";
      continue;
    }
    training.push_back(std::move(ds));
  }
  if (training.empty()) throw ConfigError("no training datasets given");
  for (const auto& ds : training) {
    if (ds.thruster_id != training.front().thruster_id) {
      throw ConfigError("datasets mix thrusters '" + training.front().thruster_id + "' and '" + ds.thruster_id +
                        "'; calibrate each thruster separately");
    }
  }

  auto dram = cfg.dram;
  dram.seed = opt.seed;
  if (opt.samples) dram.n_samples = *opt.samples;
  for (double w : prior_widths_sampling(cfg.priors)) dram.initial_proposal_sd.push_back(cfg.initial_proposal_fraction * w);
  dram.validate();

  const system::SystemModel model(cfg.system, 4096);
  const inference::Posterior posterior(model, training, cfg.priors, cfg.likelihood, opt.workers);
  const ParameterSet init = cfg.init_from_theta ? *cfg.theta : prior_midpoint(cfg.priors);

  fs::create_directories(opt.out);
  const auto cpath = chain_path(opt);
  if (cpath.has_parent_path()) fs::create_directories(cpath.parent_path());
  std::ofstream chain_out(cpath);
  if (!chain_out) throw ConfigError("cannot write chain file '" + cpath.string() + "'");
  json meta = {{"format", "hallcal-chain"},
               {"version", 1},
               {"thruster", training.front().thruster_id},
               {"seed", opt.seed},
               {"n_samples", dram.n_samples},
               {"burn_in_fraction", dram.burn_in_fraction},
               {"adaptation_interval", dram.adaptation_interval},
               {"dr_scale_factor", dram.dr_scale_factor},
               {"priors", config::priors_to_json(cfg.priors)},
               {"datasets", json::array()}};
  for (const auto& p : paths) meta["datasets"].push_back({{"path", p.string()}, {"hash", datasets::file_hash(p)}});
  inference::write_chain_header(chain_out, meta.dump());

  const long report = std::max<long>(1, dram.n_samples / 10);
  const auto progress = [&](std::size_t step, const inference::Chain& c) {
    if ((static_cast<long>(step) + 1) % 100 == 0) chain_out.flush();
    if ((static_cast<long>(step) + 1) % report == 0) {
      std::cerr << "step " << step + 1 << "/" << dram.n_samples << "  log_post " << c.log_density.back()
                << "  accepted " << c.stage1_accepts + c.stage2_accepts << '\n';
    }
  };
  const auto chain = inference::calibrate(posterior, init, dram, &chain_out, progress);
  chain_out.flush();

  const auto diag = inference::parameter_diagnostics(chain, cfg.priors);
  std::ofstream dfile(opt.out / "diagnostics.txt");
  for (std::ostream* os : {static_cast<std::ostream*>(&std::cout), static_cast<std::ostream*>(&dfile)}) {
    *os << "samples " << chain.size() << ", retained " << diag.retained << '\n'
        << "stage-1 acceptance " << diag.stage1_acceptance << ", stage-2 acceptance " << diag.stage2_acceptance
        << ", overall " << diag.overall_acceptance << '\n'
        << "failed model evaluations " << model.failures() << ", cache hits " << model.cache_hits() << '\n';
    if (diag.stalled_windows > 0) {
      *os << "warning: " << diag.stalled_windows << " adaptation window(s) without an accepted move\n";
    }
    inference::write_summary_table(*os, diag);
    *os << "effective sample size:";
    for (const auto& p : diag.parameters) *os << ' ' << p.name << '=' << static_cast<long>(p.ess);
    *os << '\n';
  }
  std::cout << "chain written to " << cpath.string() << '\n';
  return kExitOk;
}

std::vector<ParameterSet> load_posterior(const Options& opt) {
  const auto cpath = chain_path(opt);
  if (!fs::exists(cpath)) throw ConfigError("chain file '" + cpath.string() + "' not found; run calibrate first");
  return inference::retained_parameters(inference::read_chain(cpath).chain);
}

int cmd_predict(const Options& opt) {
  const auto cfg = config::load_config(opt.config);
  const auto posterior = load_posterior(opt);
  std::vector<OperatingCondition> conditions = cfg.prediction_conditions;
  if (conditions.empty()) {
    const auto paths = dataset_paths(opt, cfg.datasets);
    if (!paths.empty()) conditions = conditions_from_datasets(datasets::load_datasets(paths));
  }
  if (conditions.empty() && cfg.condition) conditions.push_back(*cfg.condition);
  if (conditions.empty()) throw ConfigError("predict needs conditions (prediction.conditions, datasets or condition)");

  std::vector<uq::Mode> modes;
  if (opt.mode == "both") {
    modes = {uq::Mode::epistemic, uq::Mode::total};
  } else if (const auto m = uq::mode_from_name(opt.mode)) {
    modes = {*m};
  } else {
    throw ConfigError("--mode must be epistemic, total or both");
  }

  const system::SystemModel model(cfg.system);
  const auto channels = uq::system_channels(cfg.outputs, uq::solver_grid(cfg.system.thruster));
  const auto fn = uq::system_model_fn(model, cfg.outputs);
  fs::create_directories(opt.out);
  for (const auto mode : modes) {
    uq::PredictOptions po;
    po.mode = mode;
    po.n_samples = opt.samples ? static_cast<std::size_t>(*opt.samples) : cfg.prediction_samples;
    po.seed = opt.seed;
    po.aleatoric = cfg.aleatoric;
    po.workers = opt.workers;
    const auto ens = uq::posterior_predict(posterior, conditions, channels, fn, po);
    const auto name = std::string("prediction_") + std::string(uq::mode_name(mode));
    {
      std::ofstream f(opt.out / (name + ".dat"));
      uq::write_prediction(f, ens);
    }
    std::cout << uq::mode_name(mode) << " (" << po.n_samples << " samples)\n";
    for (std::size_t c = 0; c < ens.conditions.size(); ++c) {
      const auto& cp = ens.conditions[c];
      std::cout << "  condition " << c << ": V_d=" << cp.nominal.discharge_voltage << " V, P_B="
                << cp.nominal.background_pressure << " Pa, mdot_a=" << cp.nominal.anode_mass_flow << " kg/s";
      if (cp.failed > 0) std::cout << " (" << cp.failed << " failed draws)";
      std::cout << '\n';
      for (const auto& ch : cp.channels) {
        if (!ch.channel.coords.empty()) continue;
        std::cout << "    " << ch.channel.name << ": " << ch.band.q50[0] << " [" << ch.band.q05[0] << ", "
                  << ch.band.q95[0] << "]\n";
      }
      if (opt.emit_plots) {
        for (const auto& ch : cp.channels) {
          if (ch.channel.coords.empty()) continue;
          plots::write_svg(opt.out / (name + "_" + std::to_string(c) + "_" + ch.channel.name + ".svg"),
                           {ch.channel.name + " (" + std::string(uq::mode_name(mode)) + ")", "coordinate",
                            ch.channel.name, {{"median, 90% CI", ch.channel.coords, ch.band.q50, ch.band.q05, ch.band.q95, false}}});
        }
      }
    }
  }
  return kExitOk;
}

int cmd_validate(const Options& opt) {
  const auto cfg = config::load_config(opt.config);
  auto paths = dataset_paths(opt, cfg.test_datasets);
  if (paths.empty()) paths = cfg.datasets;
  if (paths.empty()) throw ConfigError("validate needs datasets (--datasets or 'test_datasets' in the config)");
  const auto data = datasets::load_datasets(paths);
  const auto requested = parse_qois(opt.qois);
  const std::size_t N = opt.samples ? static_cast<std::size_t>(*opt.samples) : cfg.prediction_samples;

  Rng prior_rng(opt.seed);
  std::vector<ParameterSet> prior;
  for (std::size_t i = 0; i < N; ++i) prior.push_back(sample_prior(cfg.priors, prior_rng));
  std::vector<ParameterSet> post;
  if (fs::exists(chain_path(opt))) {
    const auto retained = load_posterior(opt);
    std::seed_seq seq{opt.seed, std::uint64_t{1}};
    Rng rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, retained.size() - 1);
    for (std::size_t i = 0; i < N; ++i) post.push_back(retained[pick(rng)]);
  } else {
    std::cerr << "warning: no chain at '" << chain_path(opt).string() << "'; reporting prior rows only\n";
  }

  const system::SystemModel model(cfg.system);
  fs::create_directories(opt.out);
  for (const auto& full : data) {
    datasets::Dataset ds = full;
    if (!requested.empty()) {
      for (auto q : requested) {
        if (full.condition_count(q) == 0) {
          std::cerr << "warning: QoI " << datasets::qoi_name(q) << " absent from dataset '" << full.name << "'; skipped\n";
        }
      }
      std::erase_if(ds.observations, [&](const auto& o) {
        return std::find(requested.begin(), requested.end(), o.qoi) == requested.end();
      });
    }
    if (ds.observations.empty()) continue;
    const auto xi = uq::nominal_errors(ds, cfg.nominal_errors);
    std::ofstream f(opt.out / ("metrics_" + ds.name + ".txt"));
    for (std::ostream* os : {static_cast<std::ostream*>(&std::cout), static_cast<std::ostream*>(&f)}) {
      *os << "dataset " << ds.name << " (" << datasets::category_name(ds.category) << ")\n";
      uq::write_metrics_header(*os);
    }
    const auto prior_metrics = uq::error_metrics(model, prior, ds, xi, opt.workers);
    uq::write_metrics_rows(std::cout, "Prior", prior_metrics);
    uq::write_metrics_rows(f, "Prior", prior_metrics);
    if (!post.empty()) {
      const auto post_metrics = uq::error_metrics(model, post, ds, xi, opt.workers);
      uq::write_metrics_rows(std::cout, "Posterior", post_metrics);
      uq::write_metrics_rows(f, "Posterior", post_metrics);
    }
  }
  return kExitOk;
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config, "JSON run configuration")->required();
  sub->add_option("--out", opt.out, "Output directory");
  sub->add_option("--seed", opt.seed, "Random seed");
  sub->add_option("--workers", opt.workers, "Worker threads (0 = all cores)");
  sub->add_flag("--emit-plots", opt.emit_plots, "Also write SVG plots");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Calibration and uncertainty quantification of a coupled Hall thruster model"};
  app.require_subcommand(1);
  Options opt;

  auto* simulate = app.add_subcommand("simulate", "Run one forward evaluation at the config's theta and condition");
  add_common(simulate, opt);

  auto* synthesize = app.add_subcommand("synthesize", "Generate a synthetic dataset from the config's theta");
  add_common(synthesize, opt);
  synthesize->add_option("--noise", opt.noise, "Relative noise in percent");
  synthesize->add_option("--name", opt.name, "Dataset name");
  synthesize->add_option("--qoi", opt.qois, "QoIs to generate (V_cc T_c I_D u_ion j_ion)");

  auto* calibrate = app.add_subcommand("calibrate", "Sample the posterior with DRAM");
  add_common(calibrate, opt);
  calibrate->add_option("--datasets", opt.datasets, "Training dataset files");
  calibrate->add_option("--samples", opt.samples, "Number of MCMC samples");
  calibrate->add_option("--chain", opt.chain, "Chain file (default <out>/chain.tsv)");

  auto* predict = app.add_subcommand("predict", "Posterior-predictive bands from a chain");
  add_common(predict, opt);
  predict->add_option("--datasets", opt.datasets, "Datasets whose conditions to predict");
  predict->add_option("--samples", opt.samples, "Number of posterior draws");
  predict->add_option("--mode", opt.mode, "epistemic, total or both")->check(CLI::IsMember({"epistemic", "total", "both"}));
  predict->add_option("--chain", opt.chain, "Chain file (default <out>/chain.tsv)");

  auto* validate = app.add_subcommand("validate", "Relative L2 error metrics on test data");
  add_common(validate, opt);
  validate->add_option("--datasets", opt.datasets, "Test dataset files");
  validate->add_option("--samples", opt.samples, "Number of prior and posterior draws");
  validate->add_option("--chain", opt.chain, "Chain file (default <out>/chain.tsv)");
  validate->add_option("--qoi", opt.qois, "Restrict to these QoIs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(opt);
    if (*synthesize) return cmd_synthesize(opt);
    if (*calibrate) return cmd_calibrate(opt);
    if (*predict) return cmd_predict(opt);
    if (*validate) return cmd_validate(opt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace hallcal::cli
