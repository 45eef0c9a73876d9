#pragma once

#include "json.hpp"

#include "gridcomm/episode.hpp"

namespace gridcomm {

/// Full episode snapshot (start state, task, instruction, concept). Used by
/// gen-episodes and the render subcommand; not part of any agent's view.
nlohmann::json episode_to_json(const Episode& episode);

/// Throws ParseError on missing or ill-typed fields.
Episode episode_from_json(const nlohmann::json& doc);

nlohmann::json actions_to_json(const std::vector<Action>& actions);

}  // namespace gridcomm
