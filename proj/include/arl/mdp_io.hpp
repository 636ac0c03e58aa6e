#pragma once

#include <json.hpp>

#include "arl/mdp.hpp"

namespace arl {

// {"S","A","H","P":[H][S][A][S],"R":[H][S][A],"s1","reward_noise"}
nlohmann::json mdp_to_json(const TabularMDP& mdp);
TabularMDP mdp_from_json(const nlohmann::json& j);

// Nested [H][S] array of action indices.
nlohmann::json policy_to_json(const DeterministicPolicy& pi);
DeterministicPolicy policy_from_json(const nlohmann::json& j);

nlohmann::json value_table_to_json(const ValueTable& v);
nlohmann::json q_table_to_json(const QTable& q);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace arl
