#include "hallcal/uq.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "hallcal/errors.hpp"
#include "hallcal/numerics.hpp"
#include "hallcal/parallel.hpp"

namespace hallcal::uq {
namespace {

Band quantile_band(const std::vector<std::vector<double>>& samples, std::size_t width) {
  Band b;
  std::vector<double> col(samples.size());
  for (std::size_t k = 0; k < width; ++k) {
    for (std::size_t i = 0; i < samples.size(); ++i) col[i] = samples[i][k];
    std::sort(col.begin(), col.end());
    b.q05.push_back(numerics::quantile_sorted(col, 0.05));
    b.q50.push_back(numerics::quantile_sorted(col, 0.50));
    b.q95.push_back(numerics::quantile_sorted(col, 0.95));
  }
  return b;
}

std::vector<const datasets::Observation*> observations_at(const datasets::Dataset& ds, const OperatingCondition& c) {
  std::vector<const datasets::Observation*> out;
  for (const auto& o : ds.observations) {
    if (o.condition == c) out.push_back(&o);
  }
  return out;
}

}  // namespace

std::string_view mode_name(Mode m) { return m == Mode::epistemic ? "epistemic" : "total"; }

std::optional<Mode> mode_from_name(std::string_view name) {
  if (name == "epistemic") return Mode::epistemic;
  if (name == "total") return Mode::total;
  return std::nullopt;
}

PredictionEnsemble posterior_predict(std::span<const ParameterSet> posterior,
                                     std::span<const OperatingCondition> conditions,
                                     const std::vector<Channel>& channels, const ModelFn& model,
                                     const PredictOptions& options) {
  if (posterior.empty()) throw DomainError("posterior sample is empty");
  if (options.n_samples == 0) throw ConfigError("prediction needs at least one sample");
  const std::size_t N = options.n_samples;

  std::seed_seq index_seed{options.seed, std::uint64_t{0}};
  std::seed_seq noise_seed{options.seed, std::uint64_t{1}};
  Rng index_rng(index_seed);
  Rng noise_rng(noise_seed);
  std::uniform_int_distribution<std::size_t> pick(0, posterior.size() - 1);
  std::vector<std::size_t> idx(N);
  for (auto& i : idx) i = pick(index_rng);

  std::vector<std::vector<OperatingCondition>> conds(conditions.size());
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    conds[c].reserve(N);
    for (std::size_t k = 0; k < N; ++k) {
      conds[c].push_back(options.mode == Mode::total ? perturb_condition(conditions[c], options.aleatoric, noise_rng)
                                                     : conditions[c]);
    }
  }

  std::vector<std::optional<std::vector<std::vector<double>>>> raw(conditions.size() * N);
  std::vector<std::string> errors(raw.size());
  parallel_for(raw.size(), options.workers, [&](std::size_t job) {
    const std::size_t c = job / N;
    const std::size_t k = job % N;
    try {
      raw[job] = model(posterior[idx[k]], conds[c][k]);
    } catch (const Error& e) {
      errors[job] = e.what();
    }
  });

  PredictionEnsemble ens;
  ens.mode = options.mode;
  ens.n_samples = N;
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    ConditionPrediction cp;
    cp.nominal = conditions[c];
    cp.channels.resize(channels.size());
    for (std::size_t ch = 0; ch < channels.size(); ++ch) cp.channels[ch].channel = channels[ch];
    for (std::size_t k = 0; k < N; ++k) {
      const auto& r = raw[c * N + k];
      bool ok = r.has_value() && r->size() == channels.size();
      for (std::size_t ch = 0; ok && ch < channels.size(); ++ch) {
        ok = (*r)[ch].size() == channels[ch].size() &&
             std::all_of((*r)[ch].begin(), (*r)[ch].end(), [](double v) { return std::isfinite(v); });
      }
      if (!ok) {
        ++cp.failed;
        cp.failures.push_back(errors[c * N + k].empty() ? "evaluation failed" : errors[c * N + k]);
        continue;
      }
      for (std::size_t ch = 0; ch < channels.size(); ++ch) cp.channels[ch].samples.push_back((*r)[ch]);
    }
    if (static_cast<double>(cp.failed) > options.max_failure_fraction * static_cast<double>(N)) {
      throw DomainError(std::to_string(cp.failed) + " of " + std::to_string(N) +
                        " prediction draws failed at one condition (first: " + cp.failures.front() + ")");
    }
    for (auto& chp : cp.channels) chp.band = quantile_band(chp.samples, chp.channel.size());
    ens.conditions.push_back(std::move(cp));
  }
  return ens;
}

std::vector<double> solver_grid(const thruster::ThrusterConfig& cfg) {
  const auto n = static_cast<std::size_t>(cfg.settings.cells);
  const double dx = cfg.geometry.domain_length / static_cast<double>(n);
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = (static_cast<double>(i) + 0.5) * dx;
  return z;
}

std::vector<Channel> system_channels(const system::OutputRequest& request, const std::vector<double>& z) {
  std::vector<Channel> ch{{"V_cc", {}}};
  if (request.cathode_only) return ch;
  for (const char* name : {"T", "T_c", "I_D", "I_B", "divergence_angle"}) ch.push_back({name, {}});
  ch.push_back({"u_ion", z});
  for (const auto& s : request.j_ion) {
    char label[64];
    std::snprintf(label, sizeof(label), "j_ion@%gm", s.radius);
    ch.push_back({label, s.angles});
  }
  return ch;
}

ModelFn system_model_fn(const system::SystemModel& model, const system::OutputRequest& request) {
  return [&model, request](const ParameterSet& theta,
                           const OperatingCondition& cond) -> std::optional<std::vector<std::vector<double>>> {
    const auto ev = model.try_evaluate(theta, cond, request);
    if (!ev->ok()) throw DomainError(ev->failure);
    const auto& o = *ev->output;
    std::vector<std::vector<double>> out{{o.V_cc}};
    if (request.cathode_only) return out;
    out.push_back({o.thrust_uncorrected});
    out.push_back({o.thrust_corrected});
    out.push_back({o.discharge_current});
    out.push_back({o.beam_current});
    out.push_back({o.divergence_angle});
    out.push_back(o.u_ion);
    for (const auto& p : o.j_ion) out.push_back(p.values);
    return out;
  };
}

void write_prediction(std::ostream& out, const PredictionEnsemble& ens) {
  out << "V_d[V] P_B[Pa] mdot_a[kg/s] channel coord q05 q50 q95 mode\n";
  out.precision(10);
  for (const auto& c : ens.conditions) {
    for (const auto& ch : c.channels) {
      for (std::size_t k = 0; k < ch.channel.size(); ++k) {
        out << c.nominal.discharge_voltage << ' ' << c.nominal.background_pressure << ' ' << c.nominal.anode_mass_flow
            << ' ' << ch.channel.name << ' ' << (ch.channel.coords.empty() ? 0.0 : ch.channel.coords[k]) << ' '
            << ch.band.q05[k] << ' ' << ch.band.q50[k] << ' ' << ch.band.q95[k] << ' ' << mode_name(ens.mode) << '\n';
      }
    }
  }
}

double relative_l2_error(std::span<const double> y, std::span<const double> f) {
  if (y.size() != f.size()) throw DomainError("relative error needs equal-length vectors");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    num += (y[i] - f[i]) * (y[i] - f[i]);
    den += y[i] * y[i];
  }
  if (!(den > 0.0)) throw DomainError("relative error undefined for a zero data vector");
  return std::sqrt(num / den);
}

std::optional<std::map<datasets::QoI, double>> relative_errors(const datasets::Dataset& ds,
                                                               const inference::Predictor& predict) {
  std::map<datasets::QoI, double> out;
  for (datasets::QoI q : ds.qois()) {
    std::vector<double> y, f;
    for (const auto* o : ds.observations_of(q)) {
      const auto p = predict(*o);
      if (p.size() != o->values.size()) return std::nullopt;
      y.insert(y.end(), o->values.begin(), o->values.end());
      f.insert(f.end(), p.begin(), p.end());
    }
    out[q] = relative_l2_error(y, f);
  }
  return out;
}

std::vector<QoIMetrics> error_metrics(const datasets::Dataset& ds, std::span<const inference::Predictor> samples,
                                      const inference::Predictor& median, const std::map<datasets::QoI, double>& xi) {
  std::map<datasets::QoI, std::vector<double>> errs;
  for (const auto& pred : samples) {
    const auto e = relative_errors(ds, pred);
    if (!e) continue;
    for (const auto& [q, v] : *e) errs[q].push_back(v);
  }
  const auto e50 = relative_errors(ds, median);
  std::vector<QoIMetrics> out;
  for (datasets::QoI q : ds.qois()) {
    QoIMetrics m;
    m.qoi = q;
    const auto& v = errs[q];
    m.samples = v.size();
    if (!v.empty()) {
      for (double x : v) m.mu += x;
      m.mu /= static_cast<double>(v.size());
      for (double x : v) m.sigma += (x - m.mu) * (x - m.mu);
      m.sigma = std::sqrt(m.sigma / static_cast<double>(v.size()));
    } else {
      m.mu = m.sigma = std::numeric_limits<double>::quiet_NaN();
    }
    m.mu50 = e50 ? e50->at(q) : std::numeric_limits<double>::quiet_NaN();
    const auto it = xi.find(q);
    m.xi = it == xi.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
    m.mu50_over_xi = m.mu50 / m.xi;
    out.push_back(m);
  }
  return out;
}

ParameterSet coordinatewise_median(std::span<const ParameterSet> samples) {
  if (samples.empty()) throw DomainError("median of an empty parameter sample");
  ParameterSet med;
  std::vector<double> col(samples.size());
  for (std::size_t j = 0; j < kNumParams; ++j) {
    for (std::size_t i = 0; i < samples.size(); ++i) col[i] = samples[i].at(j);
    med.at(j) = numerics::quantile(col, 0.5);
  }
  return med;
}

std::map<datasets::QoI, double> nominal_errors(const datasets::Dataset& ds, const std::map<datasets::QoI, double>& xi,
                                               double fallback) {
  std::map<datasets::QoI, double> out;
  for (datasets::QoI q : ds.qois()) {
    if (const auto it = xi.find(q); it != xi.end()) {
      out[q] = it->second;
      continue;
    }
    const auto obs = ds.observations_of(q);
    const auto& first = obs.front()->noise_percent;
    const bool shared = first && std::all_of(obs.begin(), obs.end(), [&](const auto* o) { return o->noise_percent == first; });
    out[q] = shared && *first > 0.0 ? *first / 100.0 : fallback;
  }
  return out;
}

std::vector<QoIMetrics> error_metrics(const system::SystemModel& model, std::span<const ParameterSet> samples,
                                      const datasets::Dataset& ds, const std::map<datasets::QoI, double>& xi,
                                      int workers) {
  const auto conditions = ds.conditions();
  std::vector<system::OutputRequest> requests;
  for (const auto& c : conditions) requests.push_back(datasets::request_for(observations_at(ds, c)));

  std::vector<ParameterSet> inputs(samples.begin(), samples.end());
  inputs.push_back(coordinatewise_median(samples));
  std::vector<std::shared_ptr<const system::Evaluation>> results(inputs.size() * conditions.size());
  parallel_for(results.size(), workers, [&](std::size_t job) {
    const std::size_t i = job / conditions.size();
    const std::size_t c = job % conditions.size();
    results[job] = model.try_evaluate(inputs[i], conditions[c], requests[c]);
  });

  const auto predictor_for = [&](std::size_t i) -> inference::Predictor {
    return [&, i](const datasets::Observation& obs) -> std::vector<double> {
      const auto it = std::find(conditions.begin(), conditions.end(), obs.condition);
      const auto& r = results[i * conditions.size() + static_cast<std::size_t>(it - conditions.begin())];
      if (!r->ok()) return {};
      return datasets::predict_observation(*r->output, obs);
    };
  };
  std::vector<inference::Predictor> preds;
  for (std::size_t i = 0; i < samples.size(); ++i) preds.push_back(predictor_for(i));
  return error_metrics(ds, preds, predictor_for(samples.size()), xi);
}

void write_metrics_header(std::ostream& out) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-8s %-10s %10s %10s %10s %10s\n", "QoI", "Case", "mu_50", "mu", "sigma",
                "mu_50/xi");
  out << buf;
}

void write_metrics_rows(std::ostream& out, const std::string& label, const std::vector<QoIMetrics>& metrics) {
  char buf[160];
  for (const auto& m : metrics) {
    std::snprintf(buf, sizeof(buf), "%-8s %-10s %10.4f %10.4f %10.4f %10.3f\n",
                  std::string(datasets::qoi_name(m.qoi)).c_str(), label.c_str(), m.mu50, m.mu, m.sigma,
                  m.mu50_over_xi);
    out << buf;
  }
}

}  // namespace hallcal::uq
