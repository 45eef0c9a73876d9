#pragma once

#include <string>

#include "json.hpp"

#include "gridcomm/channel.hpp"
#include "gridcomm/episode.hpp"
#include "gridcomm/language.hpp"

namespace gridcomm {

struct RenderConfig {
    int cell_px = 30;

    friend bool operator==(const RenderConfig&, const RenderConfig&) = default;
};

/// Everything a session needs. Serialised as one JSON document with the
/// sections "environment", "channel", "render" and optionally "language".
struct SessionConfig {
    EpisodeConfig environment;
    ChannelConfig channel;
    RenderConfig render;
    Lexicon lexicon = Lexicon::standard();
    /// Listener action set size for scripted random listeners: 4 (moves),
    /// 6 (+push, pull) or 8 (all actions).
    int num_actions = 8;
    int num_episodes = 100;
    std::string grid_input_type = "vector";
};

/// Applies the fields present in `doc` on top of `base`. Unknown keys and
/// out-of-range values throw ConfigError.
SessionConfig config_from_json(const nlohmann::json& doc, const SessionConfig& base = {});
nlohmann::json config_to_json(const SessionConfig& config);

SessionConfig load_config(const std::string& path);

/// Replaces the environment seed with $GRIDCOMM_SEED when set.
void apply_env_overrides(SessionConfig& config);

/// Stable 64-bit FNV-1a digest of the canonical JSON form, as 16 hex digits.
std::string config_digest(const SessionConfig& config);

/// Walk and push/pull setups of the reference baseline comparison
/// (4x4 grid, categorical 3x4 channel, episodes of 10 steps).
SessionConfig reference_walk_config();
SessionConfig reference_push_pull_config();

}  // namespace gridcomm
