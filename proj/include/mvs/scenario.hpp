#pragma once

#include "mvs/radio.hpp"
#include "mvs/session.hpp"
#include "mvs/transport.hpp"
#include "mvs/video.hpp"

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mvs {

/// Named validation failure while loading a scenario.
class ScenarioError : public std::runtime_error {
public:
  ScenarioError(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  /// One of: syntax, unknown_section, unknown_key, duplicate_key, missing_key,
  /// malformed_number, missing_wifi_current, invalid_value, io.
  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

enum class RadioKind { Rrc3g, PsmWifi };
std::string_view to_string(RadioKind k);

struct Scenario {
  std::string name;
  std::map<std::string, std::string> meta;  // service, device, container: inert
  VideoSpec video;
  TechniqueSpec technique;
  PathSpec path;
  RadioKind radio_kind = RadioKind::Rrc3g;
  RrcParams rrc;
  PsmParams psm;
  double playback_current_ma = 0.0;
  double watched_fraction = 1.0;
  std::uint64_t seed = 1;
  double tick_s = 0.010;
  /// "section.key" -> "paper" | "fitted" for prefixed keys.
  std::map<std::string, std::string> provenance;

  /// Re-checks every invariant; throws ScenarioError(invalid_value).
  void validate() const;
  SessionOptions session_options() const;
};

/// Parses the key-value scenario format. Relative file references
/// (video.encoding_csv) resolve against base_dir.
Scenario load_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
Scenario load_scenario_file(const std::filesystem::path& file);

/// Directory holding the bundled scenario files.
std::filesystem::path bundled_scenario_dir();
/// Sorted *.scn files in a directory.
std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir);

}  // namespace mvs
