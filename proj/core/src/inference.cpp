#include "hallcal/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "hallcal/errors.hpp"
#include "hallcal/parallel.hpp"

namespace hallcal::inference {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

double LikelihoodConfig::target(datasets::QoI q) const {
  const auto it = targets.find(q);
  return it == targets.end() ? default_target : it->second;
}

void LikelihoodConfig::validate() const {
  if (!(default_target > 0.0)) throw ConfigError("likelihood target must be positive");
  for (const auto& [q, t] : targets) {
    if (!(t > 0.0)) throw ConfigError("likelihood target for " + std::string(datasets::qoi_name(q)) + " must be positive");
  }
}

double log_likelihood(std::span<const datasets::Dataset> data, const Predictor& predict, const LikelihoodConfig& cfg) {
  double total = 0.0;
  for (const auto& ds : data) {
    for (datasets::QoI q : ds.qois()) {
      double sq_err = 0.0;
      double sq_norm = 0.0;
      for (const auto* obs : ds.observations_of(q)) {
        const auto f = predict(*obs);
        if (f.size() != obs->values.size()) return kNegInf;
        for (std::size_t k = 0; k < f.size(); ++k) {
          if (!std::isfinite(f[k])) return kNegInf;
          const double d = obs->values[k] - f[k];
          sq_err += d * d;
          sq_norm += obs->values[k] * obs->values[k];
        }
      }
      if (!(sq_norm > 0.0)) throw DomainError("observations of " + std::string(datasets::qoi_name(q)) + " in '" + ds.name + "' are all zero");
      const double t = cfg.target(q);
      total += -0.5 * sq_err / (sq_norm * t * t);
    }
  }
  return total;
}

Posterior::Posterior(const system::SystemModel& model, std::vector<datasets::Dataset> data, PriorSet priors,
                     LikelihoodConfig cfg, int workers)
    : model_(model), data_(std::move(data)), priors_(priors), cfg_(std::move(cfg)), workers_(resolve_workers(workers)) {
  cfg_.validate();
  for (const auto& p : priors_) p.validate();
  for (const auto& ds : data_) {
    ds.validate();
    for (const auto& c : ds.conditions()) {
      if (std::find(conditions_.begin(), conditions_.end(), c) == conditions_.end()) conditions_.push_back(c);
    }
  }
  for (const auto& c : conditions_) {
    std::vector<const datasets::Observation*> obs;
    for (const auto& ds : data_) {
      for (const auto& o : ds.observations) {
        if (o.condition == c) obs.push_back(&o);
      }
    }
    requests_.push_back(datasets::request_for(obs));
  }
}

double Posterior::log_likelihood(const ParameterSet& theta) const {
  std::vector<std::shared_ptr<const system::Evaluation>> results(conditions_.size());
  parallel_for(conditions_.size(), workers_,
               [&](std::size_t i) { results[i] = model_.try_evaluate(theta, conditions_[i], requests_[i]); });
  for (const auto& r : results) {
    if (!r->ok()) return kNegInf;
  }
  const auto predict = [&](const datasets::Observation& obs) -> std::vector<double> {
    const auto it = std::find(conditions_.begin(), conditions_.end(), obs.condition);
    const auto& out = *results[static_cast<std::size_t>(it - conditions_.begin())]->output;
    return datasets::predict_observation(out, obs);
  };
  return inference::log_likelihood(data_, predict, cfg_);
}

double Posterior::log_posterior(const ParameterSet& theta) const {
  const double lp = log_prior(theta);
  if (!std::isfinite(lp)) return kNegInf;
  return lp + log_likelihood(theta);
}

double Posterior::log_posterior_sampling(std::span<const double> x) const {
  const double lp = log_prior_density_sampling(x, priors_);
  if (!std::isfinite(lp)) return kNegInf;
  return lp + log_likelihood(from_sampling_space(x, priors_));
}

void DramConfig::validate() const {
  if (n_samples < 1) throw ConfigError("n_samples must be at least 1");
  if (!(burn_in_fraction > 0.0 && burn_in_fraction < 1.0)) throw ConfigError("burn_in_fraction must lie in (0, 1)");
  if (adaptation_interval < 1) throw ConfigError("adaptation_interval must be at least 1");
  if (!(dr_scale_factor > 0.0)) throw ConfigError("dr_scale_factor must be positive");
  if (!(regularization >= 0.0)) throw ConfigError("regularization must be nonnegative");
  for (double s : initial_proposal_sd) {
    if (!(s > 0.0)) throw ConfigError("initial proposal scales must be positive");
  }
}

std::size_t Chain::burn_in_end() const {
  return static_cast<std::size_t>(std::floor(burn_in_fraction * static_cast<double>(samples.size())));
}

void Chain::validate() const {
  if (log_density.size() != samples.size() || stage.size() != samples.size()) {
    throw DomainError("chain columns have different lengths");
  }
  if (burn_in_end() >= samples.size()) throw DomainError("chain has no samples after burn-in");
}

Chain dram_sample(const LogDensity& target, std::vector<double> init, const DramConfig& cfg,
                  const SampleCallback& on_sample) {
  cfg.validate();
  const auto d = static_cast<Eigen::Index>(init.size());
  if (d == 0) throw ConfigError("DRAM needs at least one dimension");
  if (!cfg.initial_proposal_sd.empty() && cfg.initial_proposal_sd.size() != init.size()) {
    throw ConfigError("initial proposal scales must match the dimension");
  }

  Chain chain;
  chain.dimension = init.size();
  chain.burn_in_fraction = cfg.burn_in_fraction;
  chain.samples.reserve(static_cast<std::size_t>(cfg.n_samples));
  chain.log_density.reserve(static_cast<std::size_t>(cfg.n_samples));
  chain.stage.reserve(static_cast<std::size_t>(cfg.n_samples));

  const auto eval = [&](const Eigen::VectorXd& x) {
    ++chain.target_evaluations;
    const double v = target(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
    return std::isnan(v) ? kNegInf : v;
  };

  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(init.data(), d);
  double lp_x = eval(x);
  if (!std::isfinite(lp_x)) throw DomainError("DRAM initial point has non-finite log density");

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    L(i, i) = cfg.initial_proposal_sd.empty() ? 1.0 : cfg.initial_proposal_sd[static_cast<std::size_t>(i)];
  }
  // Log proposal density up to a constant, for the stage-1 kernel.
  const auto log_q1 = [&L](const Eigen::VectorXd& from, const Eigen::VectorXd& to) {
    const Eigen::VectorXd w = L.triangularView<Eigen::Lower>().solve(to - from);
    return -0.5 * w.squaredNorm();
  };

  Rng rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const auto draw = [&] {
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < d; ++i) z(i) = normal(rng);
    return z;
  };

  // Running mean and scatter of the full history (Welford).
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  long n_hist = 0;
  const auto record = [&](const Eigen::VectorXd& v) {
    ++n_hist;
    const Eigen::VectorXd delta = v - mean;
    mean += delta / static_cast<double>(n_hist);
    scatter += delta * (v - mean).transpose();
  };
  const double s_d = 2.38 * 2.38 / static_cast<double>(d);
  long window_accepts = 0;

  for (long step = 0; step < cfg.n_samples; ++step) {
    std::uint8_t moved = 0;
    const Eigen::VectorXd y1 = x + L.triangularView<Eigen::Lower>() * draw();
    const double lp_y1 = eval(y1);
    ++chain.stage1_proposals;
    const double log_a1 = std::isfinite(lp_y1) ? std::min(0.0, lp_y1 - lp_x) : kNegInf;
    if (std::log(uniform(rng)) < log_a1) {
      x = y1;
      lp_x = lp_y1;
      moved = 1;
      ++chain.stage1_accepts;
    } else if (cfg.delayed_rejection) {
      const Eigen::VectorXd step2 = L.triangularView<Eigen::Lower>() * draw();
      const Eigen::VectorXd y2 = x + cfg.dr_scale_factor * step2;
      const double lp_y2 = eval(y2);
      ++chain.stage2_proposals;
      if (std::isfinite(lp_y2)) {
        // alpha_1(y2, y1) for the reverse path.
        const double log_a1_rev = std::isfinite(lp_y1) ? std::min(0.0, lp_y1 - lp_y2) : kNegInf;
        const double one_minus_rev = -std::expm1(log_a1_rev);
        const double one_minus_fwd = -std::expm1(log_a1);
        if (one_minus_rev > 0.0) {
          const double log_num = lp_y2 + log_q1(y2, y1) + std::log(one_minus_rev);
          const double log_den = lp_x + log_q1(x, y1) + std::log(one_minus_fwd);
          const double log_a2 = std::min(0.0, log_num - log_den);
          if (std::log(uniform(rng)) < log_a2) {
            x = y2;
            lp_x = lp_y2;
            moved = 2;
            ++chain.stage2_accepts;
          }
        }
      }
    }
    if (moved) ++window_accepts;

    chain.samples.emplace_back(x.data(), x.data() + d);
    chain.log_density.push_back(lp_x);
    chain.stage.push_back(moved);
    record(x);

    if ((step + 1) % cfg.adaptation_interval == 0) {
      if (window_accepts == 0) ++chain.stalled_windows;
      window_accepts = 0;
      if (cfg.adapt && n_hist > 1) {
        Eigen::MatrixXd C = scatter / static_cast<double>(n_hist - 1);
        C.diagonal().array() += cfg.regularization;
        C *= s_d;
        Eigen::LLT<Eigen::MatrixXd> llt(C);
        if (llt.info() == Eigen::Success && C.diagonal().minCoeff() > 0.0) L = llt.matrixL();
      }
    }
    if (on_sample) on_sample(static_cast<std::size_t>(step), chain);
  }
  return chain;
}

Chain calibrate(const Posterior& posterior, const ParameterSet& init, DramConfig cfg, std::ostream* chain_out,
                const std::function<void(std::size_t, const Chain&)>& progress) {
  const auto& priors = posterior.priors();
  if (cfg.initial_proposal_sd.empty()) {
    const auto widths = prior_widths_sampling(priors);
    for (double w : widths) cfg.initial_proposal_sd.push_back(0.02 * w);
  }
  const auto x0 = to_sampling_space(init, priors);
  const auto target = [&](std::span<const double> x) { return posterior.log_posterior_sampling(x); };
  const auto on_sample = [&](std::size_t step, const Chain& c) {
    if (chain_out) {
      const auto theta = from_sampling_space(c.samples.back(), priors);
      write_chain_row(*chain_out, theta.values(), c.log_density.back(), c.stage.back());
    }
    if (progress) progress(step, c);
  };
  Chain chain = dram_sample(target, std::vector<double>(x0.begin(), x0.end()), cfg, on_sample);
  for (auto& s : chain.samples) {
    const auto theta = from_sampling_space(s, priors);
    s.assign(theta.values().begin(), theta.values().end());
  }
  return chain;
}

}  // namespace hallcal::inference
