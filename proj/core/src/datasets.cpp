#include "hallcal/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hallcal/errors.hpp"
#include "hallcal/numerics.hpp"
#include "hallcal/units.hpp"

namespace hallcal::datasets {
namespace {

struct QoIInfo {
  QoI qoi;
  std::string_view name;
  std::string_view unit;
  std::string_view dimension;
  std::string_view coord;  // empty for scalars
};

constexpr std::array<QoIInfo, 5> kInfo{{
    {QoI::V_cc, "V_cc", "V", "voltage", ""},
    {QoI::T_c, "T_c", "N", "force", ""},
    {QoI::I_D, "I_D", "A", "current", ""},
    {QoI::u_ion, "u_ion", "m/s", "velocity", "z"},
    {QoI::j_ion, "j_ion", "A/m2", "current_density", "phi"},
}};

const QoIInfo& info(QoI q) { return kInfo[static_cast<std::size_t>(q)]; }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

bool parse_double(std::string_view tok, double& out) {
  const char* end = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Column {
  std::string name;
  std::string unit;
  double factor = 1.0;
};

bool same_condition(const OperatingCondition& a, const OperatingCondition& b) { return a == b; }

}  // namespace

std::string_view qoi_name(QoI q) { return info(q).name; }
std::string_view qoi_unit(QoI q) { return info(q).unit; }
std::string_view qoi_dimension(QoI q) { return info(q).dimension; }
bool is_profile(QoI q) { return !info(q).coord.empty(); }

std::optional<QoI> qoi_from_name(std::string_view name) {
  for (const auto& i : kInfo) {
    if (i.name == name) return i.qoi;
  }
  return std::nullopt;
}

std::string_view category_name(Category c) { return c == Category::training ? "training" : "test"; }

void Observation::validate() const {
  condition.validate();
  if (values.empty()) throw ConfigError("observation of " + std::string(qoi_name(qoi)) + " has no values");
  if (is_profile(qoi)) {
    if (coords.size() != values.size()) {
      throw ConfigError("observation of " + std::string(qoi_name(qoi)) + " has mismatched coordinates and values");
    }
    if (qoi == QoI::j_ion && !(radius > 0.0)) throw ConfigError("j_ion observation needs a positive radius");
  } else if (values.size() != 1 || !coords.empty()) {
    throw ConfigError("scalar observation of " + std::string(qoi_name(qoi)) + " must hold exactly one value");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw ConfigError("observation values must be finite");
  }
  for (double c : coords) {
    if (!std::isfinite(c)) throw ConfigError("observation coordinates must be finite");
  }
  if (noise_percent && !(*noise_percent >= 0.0)) throw ConfigError("noise_percent must be nonnegative");
}

std::size_t Dataset::condition_count(QoI q) const {
  std::vector<OperatingCondition> seen;
  for (const auto& o : observations) {
    if (o.qoi != q) continue;
    if (std::none_of(seen.begin(), seen.end(), [&](const auto& c) { return same_condition(c, o.condition); })) {
      seen.push_back(o.condition);
    }
  }
  return seen.size();
}

std::vector<QoI> Dataset::qois() const {
  std::vector<QoI> out;
  for (QoI q : kAllQoIs) {
    if (std::any_of(observations.begin(), observations.end(), [q](const auto& o) { return o.qoi == q; })) {
      out.push_back(q);
    }
  }
  return out;
}

std::vector<OperatingCondition> Dataset::conditions() const {
  std::vector<OperatingCondition> seen;
  for (const auto& o : observations) {
    if (std::none_of(seen.begin(), seen.end(), [&](const auto& c) { return same_condition(c, o.condition); })) {
      seen.push_back(o.condition);
    }
  }
  return seen;
}

std::vector<const Observation*> Dataset::observations_of(QoI q) const {
  std::vector<const Observation*> out;
  for (const auto& o : observations) {
    if (o.qoi == q) out.push_back(&o);
  }
  return out;
}

void Dataset::validate() const {
  for (const auto& o : observations) o.validate();
}

Dataset parse_dataset(std::istream& in, const std::string& source) {
  Dataset ds;
  std::optional<QoI> qoi;
  std::optional<double> radius;
  std::optional<double> noise;
  std::vector<Column> columns;
  int col_vd = -1, col_pb = -1, col_mdot = -1, col_coord = -1, col_r = -1, col_value = -1;
  const auto fail = [&](int line, const std::string& what) { throw ParseError(source, line, what); };

  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line.starts_with("##")) continue;
    if (line.front() == '#') {
      if (!columns.empty()) fail(lineno, "header line after the column line");
      const auto colon = line.find(':');
      if (colon == std::string::npos) fail(lineno, "header lines must be '# key: value'");
      const std::string key = trim(std::string_view(line).substr(1, colon - 1));
      const std::string value = trim(std::string_view(line).substr(colon + 1));
      if (key == "thruster") {
        ds.thruster_id = value;
      } else if (key == "dataset") {
        ds.name = value;
      } else if (key == "category") {
        if (value == "training") {
          ds.category = Category::training;
        } else if (value == "test") {
          ds.category = Category::test;
        } else {
          fail(lineno, "category must be 'training' or 'test', got '" + value + "'");
        }
      } else if (key == "qoi") {
        qoi = qoi_from_name(value);
        if (!qoi) fail(lineno, "unknown QoI '" + value + "'");
      } else if (key == "radius") {
        const auto parts = split_ws(value);
        double r = 0.0;
        if (parts.size() != 2 || !parse_double(parts[0], r)) fail(lineno, "radius must be '<value> <unit>'");
        try {
          if (units::dimension_of(parts[1]) != "length") fail(lineno, "radius unit must be a length");
          radius = r * units::to_si_factor(parts[1]);
        } catch (const ConfigError& e) {
          fail(lineno, e.what());
        }
      } else if (key == "noise_percent") {
        double v = 0.0;
        if (!parse_double(value, v) || !(v >= 0.0)) fail(lineno, "noise_percent must be a nonnegative number");
        noise = v;
      } else {
        fail(lineno, "unknown header key '" + key + "'");
      }
      continue;
    }

    if (columns.empty()) {
      if (!qoi) fail(lineno, "missing '# qoi:' header before the column line");
      for (const auto& tok : split_ws(line)) {
        const auto lb = tok.find('[');
        if (lb == std::string::npos || tok.back() != ']') fail(lineno, "column '" + tok + "' has no [unit] tag");
        Column c{tok.substr(0, lb), tok.substr(lb + 1, tok.size() - lb - 2), 1.0};
        std::string_view dim;
        try {
          dim = units::dimension_of(c.unit);
          c.factor = units::to_si_factor(c.unit);
        } catch (const ConfigError& e) {
          fail(lineno, e.what());
        }
        const int idx = static_cast<int>(columns.size());
        const auto expect = [&](std::string_view want) {
          if (dim != want) fail(lineno, "column '" + c.name + "' needs a " + std::string(want) + " unit, got '" + c.unit + "'");
        };
        if (c.name == "V_d") {
          expect("voltage");
          col_vd = idx;
        } else if (c.name == "P_B") {
          expect("pressure");
          col_pb = idx;
        } else if (c.name == "mdot_a") {
          expect("mass_flow");
          col_mdot = idx;
        } else if (c.name == "r" && *qoi == QoI::j_ion) {
          expect("length");
          col_r = idx;
        } else if (is_profile(*qoi) && c.name == info(*qoi).coord) {
          expect(*qoi == QoI::u_ion ? "length" : "angle");
          col_coord = idx;
        } else if (c.name == qoi_name(*qoi)) {
          expect(qoi_dimension(*qoi));
          col_value = idx;
        } else {
          fail(lineno, "unexpected column '" + c.name + "' for QoI " + std::string(qoi_name(*qoi)));
        }
        columns.push_back(std::move(c));
      }
      if (col_vd < 0 || col_pb < 0 || col_mdot < 0) fail(lineno, "columns V_d, P_B and mdot_a are required");
      if (col_value < 0) fail(lineno, "missing value column '" + std::string(qoi_name(*qoi)) + "'");
      if (is_profile(*qoi) && col_coord < 0) fail(lineno, "missing coordinate column '" + std::string(info(*qoi).coord) + "'");
      if (*qoi == QoI::j_ion && col_r < 0 && !radius) fail(lineno, "j_ion needs an 'r' column or a '# radius:' header");
      continue;
    }

    const auto toks = split_ws(line);
    if (toks.size() != columns.size()) {
      fail(lineno, "expected " + std::to_string(columns.size()) + " columns, got " + std::to_string(toks.size()));
    }
    std::vector<double> row(toks.size());
    for (std::size_t k = 0; k < toks.size(); ++k) {
      if (!parse_double(toks[k], row[k]) || !std::isfinite(row[k])) fail(lineno, "malformed number '" + toks[k] + "'");
      row[k] *= columns[k].factor;
    }
    const OperatingCondition cond{row[col_vd], row[col_pb], row[col_mdot]};
    try {
      cond.validate();
    } catch (const ConfigError& e) {
      fail(lineno, e.what());
    }
    const double r = col_r >= 0 ? row[col_r] : radius.value_or(0.0);
    if (*qoi == QoI::j_ion && !(r > 0.0)) fail(lineno, "radius must be positive");
    const double value = row[col_value];

    Observation* target = nullptr;
    if (is_profile(*qoi)) {
      for (auto& o : ds.observations) {
        if (same_condition(o.condition, cond) && o.radius == r) target = &o;
      }
    }
    if (!target) {
      ds.observations.push_back({*qoi, cond, {}, *qoi == QoI::j_ion ? r : 0.0, {}, noise});
      target = &ds.observations.back();
    }
    if (is_profile(*qoi)) target->coords.push_back(row[col_coord]);
    target->values.push_back(value);
  }
  if (!qoi) throw ParseError(source, lineno, "missing '# qoi:' header");
  if (columns.empty()) throw ParseError(source, lineno, "missing column line");
  if (ds.name.empty()) ds.name = "unnamed";
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset '" + path.string() + "'");
  auto ds = parse_dataset(in, path.string());
  if (ds.name == "unnamed") ds.name = path.stem().string();
  return ds;
}

Dataset merge(const Dataset& a, const Dataset& b) {
  if (a.name != b.name || a.thruster_id != b.thruster_id || a.category != b.category) {
    throw ConfigError("cannot merge datasets '" + a.name + "' and '" + b.name + "' with different identity");
  }
  Dataset out = a;
  out.observations.insert(out.observations.end(), b.observations.begin(), b.observations.end());
  std::stable_sort(out.observations.begin(), out.observations.end(),
                   [](const Observation& x, const Observation& y) { return x.qoi < y.qoi; });
  return out;
}

std::vector<Dataset> load_datasets(const std::vector<std::filesystem::path>& paths) {
  std::vector<Dataset> out;
  for (const auto& p : paths) {
    auto ds = load_dataset(p);
    const auto it = std::find_if(out.begin(), out.end(), [&](const auto& d) { return d.name == ds.name; });
    if (it == out.end()) {
      out.push_back(std::move(ds));
    } else {
      *it = merge(*it, ds);
    }
  }
  return out;
}

void write_dataset(std::ostream& out, const Dataset& ds, QoI q) {
  const auto obs = ds.observations_of(q);
  std::optional<double> noise;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    if (k > 0 && obs[k]->noise_percent != noise) {
      throw ConfigError("observations of " + std::string(qoi_name(q)) + " disagree on noise_percent");
    }
    noise = obs[k]->noise_percent;
  }
  out << "# thruster: " << ds.thruster_id << '\n';
  out << "# dataset: " << ds.name << '\n';
  out << "# category: " << category_name(ds.category) << '\n';
  out << "# qoi: " << qoi_name(q) << '\n';
  if (noise) out << "# noise_percent: " << format_double(*noise) << '\n';
  out << "V_d[V] P_B[Pa] mdot_a[kg/s]";
  if (q == QoI::j_ion) out << " r[m] phi[rad]";
  if (q == QoI::u_ion) out << " z[m]";
  out << ' ' << qoi_name(q) << '[' << qoi_unit(q) << "]\n";
  for (const auto* o : obs) {
    for (std::size_t k = 0; k < o->values.size(); ++k) {
      out << format_double(o->condition.discharge_voltage) << ' ' << format_double(o->condition.background_pressure)
          << ' ' << format_double(o->condition.anode_mass_flow);
      if (q == QoI::j_ion) out << ' ' << format_double(o->radius);
      if (is_profile(q)) out << ' ' << format_double(o->coords[k]);
      out << ' ' << format_double(o->values[k]) << '\n';
    }
  }
}

std::vector<std::filesystem::path> save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (QoI q : ds.qois()) {
    const auto path = dir / (ds.name + "_" + std::string(qoi_name(q)) + ".dat");
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write dataset file '" + path.string() + "'");
    write_dataset(out, ds, q);
    paths.push_back(path);
  }
  return paths;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "' for hashing");
  std::uint64_t h = 1469598103934665603ull;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

system::OutputRequest request_for(std::span<const Observation* const> observations) {
  system::OutputRequest req;
  req.cathode_only = true;
  for (const auto* o : observations) {
    if (o->qoi == QoI::V_cc) continue;
    req.cathode_only = false;
    if (o->qoi != QoI::j_ion) continue;
    const bool have = std::any_of(req.j_ion.begin(), req.j_ion.end(),
                                  [&](const auto& s) { return s.radius == o->radius && s.angles == o->coords; });
    if (!have) req.j_ion.push_back({o->radius, o->coords});
  }
  return req;
}

std::vector<double> predict_observation(const system::SystemOutput& out, const Observation& obs) {
  switch (obs.qoi) {
    case QoI::V_cc:
      return {out.V_cc};
    case QoI::T_c:
    case QoI::I_D:
    case QoI::u_ion:
      if (!out.thruster_evaluated) throw DomainError("thruster outputs were not requested");
      if (obs.qoi == QoI::T_c) return {out.thrust_corrected};
      if (obs.qoi == QoI::I_D) return {out.discharge_current};
      return numerics::interp_linear(out.z, out.u_ion, obs.coords);
    case QoI::j_ion:
      for (const auto& p : out.j_ion) {
        if (p.radius == obs.radius) return numerics::interp_linear(p.angles, p.values, obs.coords);
      }
      throw DomainError("no j_ion sweep was computed at r = " + std::to_string(obs.radius) + " m");
  }
  throw DomainError("unknown QoI");
}

Dataset synthesize_dataset(const system::SystemModel& model, const ParameterSet& theta_true, const SynthesisSpec& spec) {
  if (!(spec.noise_percent >= 0.0)) throw ConfigError("noise_percent must be nonnegative");
  Dataset ds;
  ds.name = spec.name;
  ds.thruster_id = spec.thruster_id;
  ds.category = spec.category;
  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = spec.noise_percent / 100.0;
  for (const auto& cond : spec.conditions) {
    std::vector<Observation> obs;
    for (QoI q : spec.qois) {
      if (q == QoI::u_ion) {
        if (spec.u_ion_z.empty()) throw ConfigError("u_ion synthesis needs axial stations");
        obs.push_back({q, cond, spec.u_ion_z, 0.0, {}, spec.noise_percent});
      } else if (q == QoI::j_ion) {
        if (spec.j_ion.empty()) throw ConfigError("j_ion synthesis needs at least one sweep");
        for (const auto& s : spec.j_ion) obs.push_back({q, cond, s.angles, s.radius, {}, spec.noise_percent});
      } else {
        obs.push_back({q, cond, {}, 0.0, {}, spec.noise_percent});
      }
    }
    std::vector<const Observation*> ptrs;
    for (const auto& o : obs) ptrs.push_back(&o);
    const auto out = model.evaluate(theta_true, cond, request_for(ptrs));
    for (auto& o : obs) {
      o.values = predict_observation(out, o);
      if (scale > 0.0) {
        for (double& v : o.values) v *= 1.0 + scale * normal(rng);
      }
      ds.observations.push_back(std::move(o));
    }
  }
  return ds;
}

}  // namespace hallcal::datasets
