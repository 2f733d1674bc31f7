#pragma once

#include <json.hpp>

#include "semguide/synthetic.hpp"

namespace semguide {

nlohmann::json oracle_to_json(const SyntheticOracle& oracle);
SyntheticOracle oracle_from_json(const nlohmann::json& j);

}  // namespace semguide
