#pragma once

// Flat key=value configuration. Keys are `section.field`; '#' starts a
// comment; blank lines are ignored. Unknown keys and malformed values are
// errors naming the key.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "comal/klt.hpp"
#include "comal/synth.hpp"
#include "comal/tracker.hpp"

namespace comal {

struct EvalConfig {
  double tolerance = 15.0;
  double band = 5.0;
};

struct AppConfig {
  TrackerConfig tracker;
  KltConfig klt;
  EvalConfig eval;
  SynthSpec synth;
};

/// Every recognised key, in canonical order.
std::vector<std::string> config_keys();

/// Applies the assignments in `text` on top of `base`. Throws Errc::BadConfig
/// naming the line and key; the result is validated.
AppConfig parse_config(std::string_view text, AppConfig base = {});
AppConfig load_config(const std::filesystem::path& path, AppConfig base = {});

/// Canonical text listing every key; parse_config of it reproduces `cfg`.
std::string config_text(const AppConfig& cfg);

/// Throws Errc::BadConfig.
void validate(const AppConfig& cfg);

/// "2,0;3,1" <-> per-frame steps of a motion script.
std::vector<PixelCoord> parse_script(std::string_view s);
std::string format_script(const std::vector<PixelCoord>& script);

}  // namespace comal
