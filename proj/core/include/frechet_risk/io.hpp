#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "frechet_risk/allocation.hpp"
#include "frechet_risk/barycenter.hpp"
#include "frechet_risk/entropic.hpp"
#include "frechet_risk/models.hpp"
#include "frechet_risk/premia.hpp"
#include "frechet_risk/risk1d.hpp"
#include "frechet_risk/riskls.hpp"

namespace frechet::io {

using json = nlohmann::json;

/// Model files: {"kind":"location-scatter","m":[...],"S":[[...]],"central":"normal"},
/// {"kind":"quantile","grid_size":2001,"family":"normal","params":{"mean":0,"sd":1}},
/// {"kind":"grid-density","axes":[{"lo":..,"hi":..,"n":..}],"density":[...]}.
/// Named quantile/density families are expanded to grids on load.
QuantileModel quantile_from_json(const json& j);
LocationScatterModel ls_from_json(const json& j);
GridDensityModel density_from_json(const json& j);

/// Prior sets reference model files (paths resolved relative to `base_dir`)
/// or carry models inline: {"kind":"...","weights":[...],"models":[...]}.
PriorSet prior_set_from_json(const json& j, const std::string& base_dir = ".");
PriorSet load_prior_set(const std::string& path);

/// Mappings: {"tag":"affine","alpha":..,"b":..}, {"tag":"quadratic",...,"c":..},
/// {"tag":"linear-multi","a":[...]}, {"tag":"quadratic-multi","a":[...],"A":[[...]]},
/// {"tag":"custom","name":"softplus"|"softplus-multi"}.
RiskMapping mapping_from_json(const json& j);
RiskMapping load_mapping(const std::string& path);

json load_json(const std::string& path);

json to_json(const QuantileModel& q);
json to_json(const LocationScatterModel& m);
json to_json(const GridDensityModel& g);
json to_json(const BarycenterResult& r);
json to_json(const Risk1dReport& r);
json to_json(const RiskLsReport& r);
json to_json(const EntropicReport& r);
json to_json(const AllocationReport& r);
json to_json(const PremiumSolution& r);

SimulationConfig simulation_config_from_json(const json& j);

/// Writes via a temp file in the same directory plus rename, so failures
/// leave no partial output.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace frechet::io
