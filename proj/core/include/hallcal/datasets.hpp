#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hallcal/params.hpp"
#include "hallcal/system.hpp"

namespace hallcal::datasets {

enum class QoI { V_cc, T_c, I_D, u_ion, j_ion };

inline constexpr std::array<QoI, 5> kAllQoIs{QoI::V_cc, QoI::T_c, QoI::I_D, QoI::u_ion, QoI::j_ion};

std::string_view qoi_name(QoI q);
std::optional<QoI> qoi_from_name(std::string_view name);
/// SI unit tag of the measured values.
std::string_view qoi_unit(QoI q);
/// Unit dimension the value column must carry (see units::dimension_of).
std::string_view qoi_dimension(QoI q);
bool is_profile(QoI q);

enum class Category { training, test };

std::string_view category_name(Category c);

/// One measurement of one QoI at one operating condition. Profiles carry
/// coordinates: z in m for u_ion, angle in rad for j_ion (at `radius`).
struct Observation {
  QoI qoi = QoI::I_D;
  OperatingCondition condition;
  std::vector<double> coords;
  double radius = 0.0;  // m, j_ion only
  std::vector<double> values;
  std::optional<double> noise_percent;

  void validate() const;
  friend bool operator==(const Observation&, const Observation&) = default;
};

struct Dataset {
  std::string name;
  std::string thruster_id;
  Category category = Category::training;
  std::vector<Observation> observations;

  /// n_q: distinct operating conditions observing q.
  std::size_t condition_count(QoI q) const;
  /// QoIs present, in kAllQoIs order.
  std::vector<QoI> qois() const;
  /// Distinct operating conditions in first-seen order.
  std::vector<OperatingCondition> conditions() const;
  std::vector<const Observation*> observations_of(QoI q) const;

  void validate() const;
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Parses one single-QoI file. Header lines are `# key: value` with keys
/// thruster, dataset, category, qoi, radius (value and unit, e.g. `1 m`) and
/// noise_percent; lines beginning with `##` are comments. Then one column line
/// of `name[unit]` tokens and whitespace-separated rows. Required columns:
/// V_d, P_B, mdot_a, the QoI value column, plus `z` for u_ion and `phi` for
/// j_ion (`r` optional, overriding the radius header).
Dataset parse_dataset(std::istream& in, const std::string& source = "<stream>");
Dataset load_dataset(const std::filesystem::path& path);

/// Loads several files and merges them into per-name datasets, in first-seen order.
std::vector<Dataset> load_datasets(const std::vector<std::filesystem::path>& paths);

/// Concatenates observations of two datasets with the same name, thruster and
/// category, grouped by QoI in kAllQoIs order.
Dataset merge(const Dataset& a, const Dataset& b);

/// Writes the observations of one QoI in canonical form (SI units, shortest
/// round-trip number formatting).
void write_dataset(std::ostream& out, const Dataset& ds, QoI q);
/// Writes one canonical file per QoI into `dir` as <name>_<qoi>.dat and returns the paths.
std::vector<std::filesystem::path> save_dataset(const Dataset& ds, const std::filesystem::path& dir);

/// 64-bit FNV-1a of the file bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

struct SynthesisSpec {
  std::string name = "synthetic";
  std::string thruster_id = "synthetic";
  Category category = Category::training;
  std::vector<OperatingCondition> conditions;
  std::vector<QoI> qois{QoI::V_cc, QoI::I_D, QoI::T_c};
  std::vector<double> u_ion_z;            // m, axial stations for u_ion
  std::vector<system::JionSweep> j_ion;   // sweeps for j_ion
  double noise_percent = 0.0;
  std::uint64_t seed = 0;
};

/// Evaluates the model at every condition and perturbs each value by
/// independent relative Gaussian noise: y = f (1 + noise_percent/100 * N(0,1)).
/// Throws the model's errors on a failed evaluation.
Dataset synthesize_dataset(const system::SystemModel& model, const ParameterSet& theta_true, const SynthesisSpec& spec);

/// Smallest request covering the given observations (all at one condition):
/// cathode only when nothing but V_cc is observed, one j_ion sweep per
/// distinct (radius, angles).
system::OutputRequest request_for(std::span<const Observation* const> observations);

/// Model prediction at the coordinates of `obs`. u_ion is interpolated
/// linearly onto the observed z; j_ion is taken from the sweep at the observed
/// radius, which must have been requested.
std::vector<double> predict_observation(const system::SystemOutput& out, const Observation& obs);

}  // namespace hallcal::datasets
