#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hallcal/errors.hpp"
#include "hallcal/inference.hpp"
#include "hallcal/numerics.hpp"

namespace hallcal::inference {
namespace {

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ParameterSummary summarize(std::vector<double> x) {
  ParameterSummary s;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  s.std = std::sqrt(var / static_cast<double>(x.size()));
  s.ess = effective_sample_size(x);
  std::sort(x.begin(), x.end());
  s.min = x.front();
  s.max = x.back();
  s.p05 = numerics::quantile_sorted(x, 0.05);
  s.p50 = numerics::quantile_sorted(x, 0.50);
  s.p95 = numerics::quantile_sorted(x, 0.95);
  return s;
}

}  // namespace

double effective_sample_size(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) return static_cast<double>(n);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) return 1.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  const auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - mean) * (x[i + lag] - mean);
    return s / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return static_cast<double>(n);
  // Geyer: sum consecutive pairs of autocorrelations while they stay positive.
  double tau = -1.0;
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    const double pair = (autocov(2 * k) + autocov(2 * k + 1)) / c0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  return static_cast<double>(n) / std::max(tau, 1.0 / static_cast<double>(n));
}

ChainDiagnostics chain_diagnostics(const Chain& chain, const std::vector<std::string>& names,
                                   const std::vector<std::string>& priors) {
  chain.validate();
  ChainDiagnostics d;
  const std::size_t begin = chain.burn_in_end();
  d.retained = chain.size() - begin;
  d.stage1_acceptance = chain.stage1_proposals > 0
                            ? static_cast<double>(chain.stage1_accepts) / static_cast<double>(chain.stage1_proposals)
                            : 0.0;
  d.stage2_acceptance = chain.stage2_proposals > 0
                            ? static_cast<double>(chain.stage2_accepts) / static_cast<double>(chain.stage2_proposals)
                            : 0.0;
  long moved = 0;
  for (auto s : chain.stage) moved += s != 0;
  d.overall_acceptance = static_cast<double>(moved) / static_cast<double>(chain.size());
  d.stalled_windows = chain.stalled_windows;
  for (std::size_t j = 0; j < chain.dimension; ++j) {
    std::vector<double> col;
    col.reserve(d.retained);
    for (std::size_t i = begin; i < chain.size(); ++i) col.push_back(chain.samples[i][j]);
    auto s = summarize(std::move(col));
    s.name = j < names.size() ? names[j] : "x" + std::to_string(j);
    s.prior = j < priors.size() ? priors[j] : "";
    d.parameters.push_back(std::move(s));
  }
  return d;
}

std::string describe_prior(Param p, const PriorSpec& spec) {
  switch (spec.kind) {
    case PriorKind::uniform:
      return "U(" + fmt(to_display(p, spec.low)) + ", " + fmt(to_display(p, spec.high)) + ")";
    case PriorKind::log_uniform:
      return "U(" + fmt(spec.low) + ", " + fmt(spec.high) + ")";
    case PriorKind::relative_normal:
      return "N(" + fmt(to_display(p, spec.nominal)) + ", " + fmt(100.0 * spec.relative_sigma) + "%)";
  }
  return "";
}

ChainDiagnostics parameter_diagnostics(const Chain& chain, const PriorSet& priors) {
  if (chain.dimension != kNumParams) throw DomainError("parameter diagnostics need an 18-parameter chain");
  Chain display = chain;
  for (auto& s : display.samples) {
    for (std::size_t j = 0; j < kNumParams; ++j) s[j] = to_display(static_cast<Param>(j), s[j]);
  }
  std::vector<std::string> names, labels;
  for (std::size_t j = 0; j < kNumParams; ++j) {
    const auto p = static_cast<Param>(j);
    names.emplace_back(param_name(p));
    labels.push_back(describe_prior(p, priors[j]));
  }
  auto d = chain_diagnostics(display, names, labels);
  for (std::size_t j = 0; j < kNumParams; ++j) d.parameters[j].unit = param_display_unit(static_cast<Param>(j));
  return d;
}

void write_summary_table(std::ostream& out, const ChainDiagnostics& diag) {
  const char* row = "%-12s %-18s %11s %11s %11s %11s %11s %11s\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf), row, "Variable", "Prior", "Min", "5th pctile", "50th pctile", "95th pctile", "Max",
                "Std dev");
  out << buf;
  for (const auto& p : diag.parameters) {
    std::snprintf(buf, sizeof(buf), row, p.name.c_str(), p.prior.c_str(), fmt(p.min).c_str(), fmt(p.p05).c_str(),
                  fmt(p.p50).c_str(), fmt(p.p95).c_str(), fmt(p.max).c_str(), fmt(p.std).c_str());
    out << buf;
  }
}

std::vector<ParameterSet> retained_parameters(const Chain& chain) {
  chain.validate();
  if (chain.dimension != kNumParams) throw DomainError("chain does not hold 18-parameter samples");
  std::vector<ParameterSet> out;
  for (std::size_t i = chain.burn_in_end(); i < chain.size(); ++i) {
    ParameterSet theta;
    std::copy(chain.samples[i].begin(), chain.samples[i].end(), theta.raw().begin());
    out.push_back(theta);
  }
  return out;
}

void write_chain_header(std::ostream& out, const std::string& metadata_json) {
  out << "# " << metadata_json << '\n';
  for (std::size_t j = 0; j < kNumParams; ++j) out << param_name(static_cast<Param>(j)) << ' ';
  out << "log_posterior accepted stage\n";
}

void write_chain_row(std::ostream& out, std::span<const double> theta, double log_posterior, std::uint8_t stage) {
  for (double v : theta) out << shortest(v) << ' ';
  out << shortest(log_posterior) << ' ' << (stage != 0 ? 1 : 0) << ' ' << static_cast<int>(stage) << '\n';
}

ChainFile read_chain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open chain file '" + path.string() + "'");
  ChainFile file;
  auto& chain = file.chain;
  std::string line;
  int lineno = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.front() == '#') {
      file.metadata_json = line.substr(std::min<std::size_t>(2, line.size()));
      try {
        const auto meta = nlohmann::json::parse(file.metadata_json);
        if (meta.contains("burn_in_fraction")) chain.burn_in_fraction = meta["burn_in_fraction"].get<double>();
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), lineno, std::string("bad metadata: ") + e.what());
      }
      continue;
    }
    std::istringstream ss(line);
    std::vector<std::string> toks;
    for (std::string t; ss >> t;) toks.push_back(t);
    if (columns == 0) {
      if (toks.size() < 4 || toks[toks.size() - 3] != "log_posterior") {
        throw ParseError(path.string(), lineno, "expected a column line ending in 'log_posterior accepted stage'");
      }
      columns = toks.size();
      chain.dimension = columns - 3;
      continue;
    }
    if (toks.size() != columns) {
      throw ParseError(path.string(), lineno, "expected " + std::to_string(columns) + " columns");
    }
    std::vector<double> v(columns);
    for (std::size_t k = 0; k < columns; ++k) {
      const char* end = toks[k].data() + toks[k].size();
      const auto res = std::from_chars(toks[k].data(), end, v[k]);
      if (res.ec != std::errc() || res.ptr != end) {
        if (toks[k] == "-inf") {
          v[k] = -std::numeric_limits<double>::infinity();
        } else {
          throw ParseError(path.string(), lineno, "malformed number '" + toks[k] + "'");
        }
      }
    }
    chain.samples.emplace_back(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(chain.dimension));
    chain.log_density.push_back(v[chain.dimension]);
    const auto stage = static_cast<std::uint8_t>(v[chain.dimension + 2]);
    chain.stage.push_back(stage);
    if (stage == 1) ++chain.stage1_accepts;
    if (stage == 2) ++chain.stage2_accepts;
  }
  if (columns == 0) throw ParseError(path.string(), lineno, "chain file has no column line");
  chain.stage1_proposals = static_cast<long>(chain.size());
  chain.stage2_proposals = static_cast<long>(chain.size()) - chain.stage1_accepts;
  return file;
}

}  // namespace hallcal::inference
