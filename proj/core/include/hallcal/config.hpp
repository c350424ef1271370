#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hallcal/datasets.hpp"
#include "hallcal/inference.hpp"
#include "hallcal/params.hpp"
#include "hallcal/system.hpp"

namespace hallcal::config {

/// Everything a command-line run needs, with file paths resolved against the
/// directory of the config file.
struct RunConfig {
  std::string thruster_name = "thruster";
  system::SystemConfig system;
  PriorSet priors = default_priors();
  AleatoricSpec aleatoric;
  inference::LikelihoodConfig likelihood;
  inference::DramConfig dram;
  double initial_proposal_fraction = 0.02;  // of each prior width in sampling space
  bool init_from_theta = false;             // start the chain at `theta` instead of the prior midpoint
  std::optional<ParameterSet> theta;
  std::optional<OperatingCondition> condition;
  system::OutputRequest outputs;
  std::vector<std::filesystem::path> datasets;
  std::vector<std::filesystem::path> test_datasets;
  std::map<datasets::QoI, double> nominal_errors;
  std::size_t prediction_samples = 1000;
  std::vector<OperatingCondition> prediction_conditions;
};

/// Parses a JSON run configuration. Quantities are bare numbers in SI or
/// {"value": x, "unit": "tag"} objects. Unknown keys are errors.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// JSON description of the priors for chain metadata.
nlohmann::json priors_to_json(const PriorSet& priors);

}  // namespace hallcal::config
