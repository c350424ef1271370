#include "hallcal/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "hallcal/errors.hpp"
#include "hallcal/units.hpp"

namespace hallcal::config {
namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  return v.get<double>();
}

/// Bare number (SI) or {"value", "unit"} with a unit of the given dimension.
double quantity(const json& v, const std::string& where, std::string_view dimension) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_object() || !v.contains("value") || !v.contains("unit")) {
    throw ConfigError(where + " must be a number or {\"value\", \"unit\"}");
  }
  check_keys(v, where, {"value", "unit"});
  const auto unit = v["unit"].get<std::string>();
  if (units::dimension_of(unit) != dimension) {
    throw ConfigError(where + " needs a " + std::string(dimension) + " unit, got '" + unit + "'");
  }
  return number(v["value"], where + ".value") * units::to_si_factor(unit);
}

std::string_view param_dimension(Param p) {
  switch (p) {
    case Param::T_ec:
      return "temperature";
    case Param::V_vac:
      return "voltage";
    case Param::P_T:
    case Param::P_star:
      return "pressure";
    case Param::u_n:
      return "velocity";
    case Param::c3:
      return "angle";
    default:
      return "dimensionless";
  }
}

double param_value(Param p, const json& v, const std::string& where) {
  if (v.is_object() && v.contains("unit") && param_dimension(p) == "dimensionless") {
    throw ConfigError(where + " is dimensionless; give a bare number");
  }
  return quantity(v, where, param_dimension(p));
}

Param param_key(const std::string& key, const std::string& where) {
  const auto p = param_from_name(key);
  if (!p) throw ConfigError("unknown parameter '" + key + "' in " + where);
  return *p;
}

OperatingCondition parse_condition(const json& j, const std::string& where) {
  check_keys(j, where, {"discharge_voltage", "background_pressure", "anode_mass_flow"});
  for (const char* k : {"discharge_voltage", "background_pressure", "anode_mass_flow"}) {
    if (!j.contains(k)) throw ConfigError(where + " is missing '" + k + "'");
  }
  OperatingCondition c{quantity(j["discharge_voltage"], where + ".discharge_voltage", "voltage"),
                       quantity(j["background_pressure"], where + ".background_pressure", "pressure"),
                       quantity(j["anode_mass_flow"], where + ".anode_mass_flow", "mass_flow")};
  c.validate();
  return c;
}

std::vector<double> parse_angles(const json& j, const std::string& where) {
  if (j.is_array()) {
    std::vector<double> out;
    for (const auto& v : j) out.push_back(quantity(v, where, "angle"));
    return out;
  }
  check_keys(j, where, {"from", "to", "count", "unit"});
  const double f = j.contains("unit") ? units::to_si_factor(j["unit"].get<std::string>()) : 1.0;
  if (j.contains("unit") && units::dimension_of(j["unit"].get<std::string>()) != "angle") {
    throw ConfigError(where + ".unit must be an angle unit");
  }
  const double a = number(j.at("from"), where + ".from") * f;
  const double b = number(j.at("to"), where + ".to") * f;
  const int n = j.at("count").get<int>();
  if (n < 2) throw ConfigError(where + ".count must be at least 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return out;
}

thruster::PropellantSpec parse_propellant(const json& j, const std::filesystem::path& base) {
  const auto pick = [](const std::string& name) {
    if (name == "xenon" || name == "Xe") return thruster::PropellantSpec::xenon();
    if (name == "krypton" || name == "Kr") return thruster::PropellantSpec::krypton();
    throw ConfigError("unknown propellant '" + name + "'");
  };
  if (j.is_string()) return pick(j.get<std::string>());
  check_keys(j, "thruster.propellant", {"species", "ionization_table", "ionization_energy_cost", "electron_neutral_rate"});
  auto p = pick(j.at("species").get<std::string>());
  if (j.contains("ionization_table")) {
    p.ionization = thruster::RateTable::load((base / j["ionization_table"].get<std::string>()).string());
  }
  if (j.contains("ionization_energy_cost")) {
    p.ionization_energy_cost = quantity(j["ionization_energy_cost"], "propellant.ionization_energy_cost", "temperature");
  }
  if (j.contains("electron_neutral_rate")) p.electron_neutral_rate = number(j["electron_neutral_rate"], "electron_neutral_rate");
  return p;
}

void parse_thruster(const json& j, RunConfig& cfg, const std::filesystem::path& base) {
  check_keys(j, "thruster", {"name", "geometry", "magnetic_field", "propellant", "solver"});
  auto& t = cfg.system.thruster;
  if (j.contains("name")) cfg.thruster_name = j["name"].get<std::string>();
  if (j.contains("geometry")) {
    const auto& g = j["geometry"];
    check_keys(g, "thruster.geometry", {"channel_length", "inner_radius", "outer_radius", "domain_length", "shielded"});
    if (g.contains("channel_length")) t.geometry.channel_length = quantity(g["channel_length"], "channel_length", "length");
    if (g.contains("inner_radius")) t.geometry.inner_radius = quantity(g["inner_radius"], "inner_radius", "length");
    if (g.contains("outer_radius")) t.geometry.outer_radius = quantity(g["outer_radius"], "outer_radius", "length");
    t.geometry.domain_length = g.contains("domain_length") ? quantity(g["domain_length"], "domain_length", "length")
                                                           : 3.0 * t.geometry.channel_length;
    if (g.contains("shielded")) t.geometry.wall_shielded = g["shielded"].get<bool>();
  }
  if (j.contains("magnetic_field")) {
    const auto& b = j["magnetic_field"];
    check_keys(b, "thruster.magnetic_field", {"B_max", "z_peak", "width_upstream", "width_downstream"});
    if (b.contains("B_max")) t.field.B_max = quantity(b["B_max"], "B_max", "magnetic_field");
    if (b.contains("z_peak")) t.field.z_peak = quantity(b["z_peak"], "z_peak", "length");
    if (b.contains("width_upstream")) t.field.width_upstream = quantity(b["width_upstream"], "width_upstream", "length");
    if (b.contains("width_downstream")) {
      t.field.width_downstream = quantity(b["width_downstream"], "width_downstream", "length");
    }
  }
  if (j.contains("propellant")) t.propellant = parse_propellant(j["propellant"], base);
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    check_keys(s, "thruster.solver", {"cells", "duration", "averaging_window", "cfl", "wall_clock_limit", "anode_Te",
                                      "ion_temperature", "background_temperature"});
    auto& st = t.settings;
    if (s.contains("cells")) st.cells = s["cells"].get<int>();
    if (s.contains("duration")) st.duration = number(s["duration"], "solver.duration");
    st.averaging_window = s.contains("averaging_window") ? number(s["averaging_window"], "solver.averaging_window")
                                                         : 0.5 * st.duration;
    if (s.contains("cfl")) st.cfl = number(s["cfl"], "solver.cfl");
    if (s.contains("wall_clock_limit")) st.wall_clock_limit = number(s["wall_clock_limit"], "solver.wall_clock_limit");
    if (s.contains("anode_Te")) st.anode_Te = quantity(s["anode_Te"], "solver.anode_Te", "temperature");
    if (s.contains("ion_temperature")) st.ion_temperature = quantity(s["ion_temperature"], "solver.ion_temperature", "temperature");
    if (s.contains("background_temperature")) {
      st.background_temperature = quantity(s["background_temperature"], "solver.background_temperature", "kelvin");
    }
  }
}

PriorSpec parse_prior(Param p, const json& j, const std::string& where) {
  check_keys(j, where, {"kind", "low", "high", "nominal", "relative_sigma"});
  const auto kind = j.at("kind").get<std::string>();
  PriorSpec spec;
  if (kind == "uniform") {
    spec = PriorSpec::uniform(param_value(p, j.at("low"), where + ".low"), param_value(p, j.at("high"), where + ".high"));
  } else if (kind == "log_uniform") {
    spec = PriorSpec::log_uniform(number(j.at("low"), where + ".low"), number(j.at("high"), where + ".high"));
  } else if (kind == "relative_normal") {
    spec = PriorSpec::relative_normal(param_value(p, j.at("nominal"), where + ".nominal"),
                                      number(j.at("relative_sigma"), where + ".relative_sigma"));
  } else {
    throw ConfigError(where + ".kind must be uniform, log_uniform or relative_normal");
  }
  spec.validate();
  return spec;
}

datasets::QoI qoi_key(const std::string& key, const std::string& where) {
  const auto q = datasets::qoi_from_name(key);
  if (!q) throw ConfigError("unknown QoI '" + key + "' in " + where);
  return *q;
}

std::vector<std::filesystem::path> paths(const json& j, const std::filesystem::path& base, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array of paths");
  std::vector<std::filesystem::path> out;
  for (const auto& v : j) out.push_back(base / v.get<std::string>());
  return out;
}

}  // namespace

RunConfig parse_config(const json& doc, const std::filesystem::path& base) {
  check_keys(doc, "config", {"thruster", "plume", "priors", "aleatoric", "likelihood", "dram", "theta", "condition",
                             "outputs", "datasets", "test_datasets", "nominal_errors", "prediction"});
  RunConfig cfg;
  if (doc.contains("thruster")) parse_thruster(doc["thruster"], cfg, base);
  if (doc.contains("plume")) {
    const auto& p = doc["plume"];
    check_keys(p, "plume", {"divergence_radius", "cex_cross_section"});
    if (p.contains("divergence_radius")) {
      cfg.system.divergence_radius = quantity(p["divergence_radius"], "plume.divergence_radius", "length");
    }
    if (p.contains("cex_cross_section")) cfg.system.cex_cross_section = number(p["cex_cross_section"], "cex_cross_section");
  }
  if (doc.contains("priors")) {
    const auto& pr = doc["priors"];
    if (!pr.is_object()) throw ConfigError("priors must be an object");
    for (const auto& [key, value] : pr.items()) {
      const Param p = param_key(key, "priors");
      cfg.priors[index(p)] = parse_prior(p, value, "priors." + key);
    }
  }
  if (doc.contains("aleatoric")) {
    const auto& a = doc["aleatoric"];
    check_keys(a, "aleatoric", {"discharge_voltage", "background_pressure", "anode_mass_flow"});
    if (a.contains("discharge_voltage")) cfg.aleatoric.discharge_voltage = number(a["discharge_voltage"], "aleatoric");
    if (a.contains("background_pressure")) cfg.aleatoric.background_pressure = number(a["background_pressure"], "aleatoric");
    if (a.contains("anode_mass_flow")) cfg.aleatoric.anode_mass_flow = number(a["anode_mass_flow"], "aleatoric");
  }
  if (doc.contains("likelihood")) {
    const auto& l = doc["likelihood"];
    check_keys(l, "likelihood", {"default_target", "targets"});
    if (l.contains("default_target")) cfg.likelihood.default_target = number(l["default_target"], "likelihood.default_target");
    if (l.contains("targets")) {
      for (const auto& [key, value] : l["targets"].items()) {
        cfg.likelihood.targets[qoi_key(key, "likelihood.targets")] = number(value, "likelihood.targets." + key);
      }
    }
    cfg.likelihood.validate();
  }
  if (doc.contains("dram")) {
    const auto& d = doc["dram"];
    check_keys(d, "dram", {"samples", "burn_in_fraction", "adaptation_interval", "dr_scale_factor", "regularization",
                           "initial_proposal_fraction", "init", "adapt", "delayed_rejection"});
    if (d.contains("samples")) cfg.dram.n_samples = d["samples"].get<long>();
    if (d.contains("burn_in_fraction")) cfg.dram.burn_in_fraction = number(d["burn_in_fraction"], "dram.burn_in_fraction");
    if (d.contains("adaptation_interval")) cfg.dram.adaptation_interval = d["adaptation_interval"].get<long>();
    if (d.contains("dr_scale_factor")) cfg.dram.dr_scale_factor = number(d["dr_scale_factor"], "dram.dr_scale_factor");
    if (d.contains("regularization")) cfg.dram.regularization = number(d["regularization"], "dram.regularization");
    if (d.contains("adapt")) cfg.dram.adapt = d["adapt"].get<bool>();
    if (d.contains("delayed_rejection")) cfg.dram.delayed_rejection = d["delayed_rejection"].get<bool>();
    if (d.contains("initial_proposal_fraction")) {
      cfg.initial_proposal_fraction = number(d["initial_proposal_fraction"], "dram.initial_proposal_fraction");
      if (!(cfg.initial_proposal_fraction > 0.0)) throw ConfigError("dram.initial_proposal_fraction must be positive");
    }
    if (d.contains("init")) {
      const auto init = d["init"].get<std::string>();
      if (init == "theta") {
        cfg.init_from_theta = true;
      } else if (init != "midpoint") {
        throw ConfigError("dram.init must be 'midpoint' or 'theta'");
      }
    }
    cfg.dram.validate();
  }
  if (doc.contains("theta")) {
    const auto& t = doc["theta"];
    if (!t.is_object()) throw ConfigError("theta must be an object");
    ParameterSet theta = prior_midpoint(cfg.priors);
    std::set<std::string> seen;
    for (const auto& [key, value] : t.items()) {
      const Param p = param_key(key, "theta");
      theta[p] = param_value(p, value, "theta." + key);
      seen.insert(key);
    }
    if (seen.size() != kNumParams) throw ConfigError("theta must list all 18 parameters");
    cfg.theta = theta;
  }
  if (cfg.init_from_theta && !cfg.theta) throw ConfigError("dram.init = 'theta' needs a theta block");
  if (doc.contains("condition")) cfg.condition = parse_condition(doc["condition"], "condition");
  if (doc.contains("outputs")) {
    const auto& o = doc["outputs"];
    check_keys(o, "outputs", {"j_ion"});
    if (o.contains("j_ion")) {
      for (const auto& s : o["j_ion"]) {
        check_keys(s, "outputs.j_ion[]", {"radius", "angles"});
        cfg.outputs.j_ion.push_back({quantity(s.at("radius"), "outputs.j_ion.radius", "length"),
                                     parse_angles(s.at("angles"), "outputs.j_ion.angles")});
      }
    }
  }
  if (doc.contains("datasets")) cfg.datasets = paths(doc["datasets"], base, "datasets");
  if (doc.contains("test_datasets")) cfg.test_datasets = paths(doc["test_datasets"], base, "test_datasets");
  if (doc.contains("nominal_errors")) {
    for (const auto& [key, value] : doc["nominal_errors"].items()) {
      cfg.nominal_errors[qoi_key(key, "nominal_errors")] = number(value, "nominal_errors." + key);
    }
  }
  if (doc.contains("prediction")) {
    const auto& p = doc["prediction"];
    check_keys(p, "prediction", {"samples", "conditions"});
    if (p.contains("samples")) cfg.prediction_samples = p["samples"].get<std::size_t>();
    if (p.contains("conditions")) {
      for (const auto& c : p["conditions"]) cfg.prediction_conditions.push_back(parse_condition(c, "prediction.conditions[]"));
    }
  }
  cfg.system.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in '" + path.string() + "': " + e.what());
  }
  try {
    return parse_config(doc, path.parent_path());
  } catch (const json::exception& e) {
    throw ConfigError("bad value in '" + path.string() + "': " + e.what());
  }
}

json priors_to_json(const PriorSet& priors) {
  json out = json::object();
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const auto& s = priors[i];
    json p;
    switch (s.kind) {
      case PriorKind::uniform:
        p = {{"kind", "uniform"}, {"low", s.low}, {"high", s.high}};
        break;
      case PriorKind::log_uniform:
        p = {{"kind", "log_uniform"}, {"low", s.low}, {"high", s.high}};
        break;
      case PriorKind::relative_normal:
        p = {{"kind", "relative_normal"}, {"nominal", s.nominal}, {"relative_sigma", s.relative_sigma}};
        break;
    }
    out[std::string(param_name(static_cast<Param>(i)))] = p;
  }
  return out;
}

}  // namespace hallcal::config
