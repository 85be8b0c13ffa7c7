#include "mvs/scenario.hpp"

#include "mvs/analysis.hpp"
#include "mvs/util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace mvs {

std::string_view to_string(RadioKind k) { return k == RadioKind::Rrc3g ? "RRC_3G" : "PSM_WIFI"; }

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
  std::string provenance;
};

using Section = std::map<std::string, Entry>;

class Reader {
public:
  Reader(std::string section, Section& entries) : section_(std::move(section)), entries_(entries) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  const Entry* find(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  std::string str(const std::string& key, std::string fallback) {
    const auto* e = find(key);
    return e ? e->value : fallback;
  }

  std::string required_str(const std::string& key) {
    const auto* e = find(key);
    if (!e) throw ScenarioError("missing_key", fmt::format("[{}] {} is required", section_, key));
    return e->value;
  }

  double num(const std::string& key, double fallback) {
    const auto* e = find(key);
    return e ? to_number(key, *e) : fallback;
  }

  double required_num(const std::string& key, const char* code = "missing_key") {
    const auto* e = find(key);
    if (!e) throw ScenarioError(code, fmt::format("[{}] {} is required", section_, key));
    return to_number(key, *e);
  }

  Bytes bytes(const std::string& key, Bytes fallback) {
    const auto* e = find(key);
    if (!e) return fallback;
    try {
      return parse_int(e->value);
    } catch (const std::invalid_argument&) {
      throw ScenarioError("malformed_number", fmt::format("line {}: [{}] {} = '{}' is not an integer",
                                                          e->line, section_, key, e->value));
    }
  }

  bool flag(const std::string& key, bool fallback) {
    const auto* e = find(key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
    if (e->value == "false" || e->value == "no" || e->value == "0") return false;
    throw ScenarioError("invalid_value",
                        fmt::format("line {}: [{}] {} must be true or false", e->line, section_, key));
  }

  void reject_unused() const {
    for (const auto& [key, e] : entries_) {
      if (!used_.count(key)) {
        throw ScenarioError("unknown_key", fmt::format("line {}: unknown key [{}] {}", e.line, section_, key));
      }
    }
  }

private:
  double to_number(const std::string& key, const Entry& e) const {
    try {
      return parse_double(e.value);
    } catch (const std::invalid_argument&) {
      throw ScenarioError("malformed_number", fmt::format("line {}: [{}] {} = '{}' is not a number",
                                                          e.line, section_, key, e.value));
    }
  }

  std::string section_;
  Section& entries_;
  std::set<std::string> used_;
};

template <typename F>
void wrap_invalid(F&& f) {
  try {
    f();
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError("invalid_value", e.what());
  }
}

}  // namespace

void Scenario::validate() const {
  if (name.empty()) throw ScenarioError("missing_key", "scenario name is required");
  wrap_invalid([&] {
    video.validate();
    technique.validate();
    path.validate();
    if (technique.kind == TechniqueKind::Dash && video.quality_ladder.empty()) {
      throw SpecError("DASH needs a [ladder] with at least one level");
    }
    if (radio_kind == RadioKind::Rrc3g) {
      rrc.validate();
    } else {
      psm.validate();
    }
  });
  if (!(playback_current_ma >= 0.0)) {
    throw ScenarioError("invalid_value", "playback_current_ma must be >= 0");
  }
  if (!(watched_fraction > 0.0 && watched_fraction <= 1.0)) {
    throw ScenarioError("invalid_value", "watched_fraction must be in (0, 1]");
  }
  if (!(tick_s > 0.0)) throw ScenarioError("invalid_value", "tick_s must be > 0");
}

SessionOptions Scenario::session_options() const {
  SessionOptions o;
  o.tick_s = tick_s;
  o.watched_fraction = watched_fraction;
  o.seed = seed;
  return o;
}

Scenario load_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  static const std::set<std::string> kSections = {"", "meta", "video", "ladder", "technique",
                                                  "path", "radio", "session"};
  std::map<std::string, Section> sections;
  std::vector<std::pair<std::string, std::size_t>> ladder_lines;
  std::string current;
  std::size_t line_no = 0;

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ScenarioError("syntax", fmt::format("line {}: unterminated section", line_no));
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (!kSections.count(current)) {
        throw ScenarioError("unknown_section", fmt::format("line {}: unknown section [{}]", line_no, current));
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ScenarioError("syntax", fmt::format("line {}: expected 'key = value'", line_no));
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (const auto hash = value.find(" #"); hash != std::string::npos) value = std::string(trim(value.substr(0, hash)));
    std::string prov;
    for (std::string_view prefix : {"paper:", "fitted:"}) {
      if (key.rfind(prefix, 0) == 0) {
        prov = std::string(prefix.substr(0, prefix.size() - 1));
        key = std::string(trim(std::string_view(key).substr(prefix.size())));
      }
    }
    if (key.empty()) throw ScenarioError("syntax", fmt::format("line {}: empty key", line_no));
    if (current == "ladder") {
      if (key != "level") throw ScenarioError("unknown_key", fmt::format("line {}: [ladder] only takes level", line_no));
      ladder_lines.emplace_back(value, line_no);
      continue;
    }
    auto& sec = sections[current];
    if (sec.count(key)) {
      throw ScenarioError("duplicate_key", fmt::format("line {}: [{}] {} given twice", line_no, current, key));
    }
    sec[key] = Entry{value, line_no, prov};
  }

  Scenario s;
  for (const auto& [name, sec] : sections) {
    for (const auto& [key, e] : sec) {
      if (!e.provenance.empty()) s.provenance[(name.empty() ? "" : name + ".") + key] = e.provenance;
    }
  }

  Reader top("", sections[""]);
  s.name = top.required_str("name");
  top.reject_unused();

  for (const auto& [key, e] : sections["meta"]) s.meta[key] = e.value;

  // video
  {
    Reader r("video", sections["video"]);
    const auto csv = r.str("encoding_csv", "");
    if (!csv.empty()) {
      const auto file = base_dir / csv;
      std::ifstream f(file);
      if (!f) throw ScenarioError("io", fmt::format("cannot open encoding schedule {}", file.string()));
      try {
        s.video.encoding_schedule = read_encoding_csv(f);
      } catch (const FormatError& e) {
        throw ScenarioError("invalid_value", fmt::format("{}: {}", file.string(), e.what()));
      }
    } else {
      const double duration = r.required_num("duration_s");
      const double avg = r.required_num("avg_encoding_bps");
      const double vbr = r.num("vbr_amplitude", 0.2);
      const auto seed = r.bytes("seed", 1);
      if (duration != std::floor(duration) || duration <= 0) {
        throw ScenarioError("invalid_value", "[video] duration_s must be a positive whole number of seconds");
      }
      wrap_invalid([&] {
        s.video.encoding_schedule =
            make_vbr_schedule(avg, static_cast<int>(duration), vbr, static_cast<std::uint64_t>(seed));
      });
    }
    s.video.keyframe_spacing = r.bytes("keyframe_spacing", 0);
    r.reject_unused();
  }

  for (const auto& [value, ln] : ladder_lines) {
    const auto f = split(value, ',');
    if (f.size() != 3) {
      throw ScenarioError("syntax", fmt::format("line {}: level = bandwidth_bps, resolution, segment_s", ln));
    }
    QualityLevel q;
    try {
      q.bandwidth_bps = parse_double(f[0]);
      q.segment_duration_s = parse_double(f[2]);
    } catch (const std::invalid_argument&) {
      throw ScenarioError("malformed_number", fmt::format("line {}: malformed ladder level", ln));
    }
    q.resolution_label = std::string(trim(f[1]));
    s.video.quality_ladder.push_back(q);
  }

  // technique
  {
    Reader r("technique", sections["technique"]);
    auto& t = s.technique;
    wrap_invalid([&] { t.kind = parse_technique_kind(r.required_str("kind")); });
    t.fast_start_s = r.num("fast_start_s", 0.0);
    t.throttle_factor = r.num("throttle_factor", 0.0);
    t.burst_size = r.bytes("burst_size", 0);
    if (r.has("connection_mode")) {
      wrap_invalid([&] { t.connection_mode = parse_connection_mode(r.required_str("connection_mode")); });
    }
    t.low_watermark_s = r.num("low_watermark_s", 0.0);
    t.high_watermark_s = r.num("high_watermark_s", 0.0);
    t.buffer_cap = r.bytes("buffer_cap", 0);
    t.reopen_headroom = r.bytes("reopen_headroom", 0);
    t.keyframe_waste = r.flag("keyframe_waste", false);
    t.dash_target_buffer_s = r.num("dash_target_buffer_s", 0.0);
    t.dash_safety = r.num("dash_safety", 1.0);
    t.dash_refetch_on_upswitch = r.flag("dash_refetch_on_upswitch", false);
    t.recv_buffer = r.bytes("recv_buffer", t.recv_buffer);
    t.probe_interval_s = r.num("probe_interval_s", t.probe_interval_s);
    r.reject_unused();
  }

  // path
  {
    Reader r("path", sections["path"]);
    s.path.bandwidth_bps = r.required_num("bandwidth_bps");
    s.path.rtt_s = r.num("rtt_s", s.path.rtt_s);
    s.path.jitter = r.num("jitter", s.path.jitter);
    r.reject_unused();
  }

  // radio
  {
    Reader r("radio", sections["radio"]);
    const auto kind = r.required_str("kind");
    if (kind == "RRC_3G") {
      s.radio_kind = RadioKind::Rrc3g;
      auto& p = s.rrc;
      p.t1 = r.num("t1", p.t1);
      p.t2 = r.num("t2", p.t2);
      p.t3 = r.num("t3", p.t3);
      p.current_dch = r.num("current_dch", p.current_dch);
      p.current_fach = r.num("current_fach", p.current_fach);
      p.current_pch = r.num("current_pch", p.current_pch);
      p.current_idle = r.num("current_idle", p.current_idle);
      p.promotion_delay = r.num("promotion_delay", p.promotion_delay);
    } else if (kind == "PSM_WIFI") {
      s.radio_kind = RadioKind::PsmWifi;
      auto& p = s.psm;
      p.current_sleep = r.required_num("current_sleep", "missing_wifi_current");
      p.current_idle = r.required_num("current_idle", "missing_wifi_current");
      p.current_active = r.required_num("current_active", "missing_wifi_current");
      p.beacon_interval = r.num("beacon_interval", p.beacon_interval);
      p.idle_timeout = r.num("idle_timeout", p.idle_timeout);
      p.cam_mode = r.flag("cam_mode", p.cam_mode);
      p.beacon_wake_s = r.num("beacon_wake_s", p.beacon_wake_s);
      p.phy_rate_bps = r.num("phy_rate_bps", p.phy_rate_bps);
    } else {
      throw ScenarioError("invalid_value", fmt::format("[radio] kind must be RRC_3G or PSM_WIFI, got '{}'", kind));
    }
    r.reject_unused();
  }

  // session
  {
    Reader r("session", sections["session"]);
    s.playback_current_ma = r.required_num("playback_current_ma");
    s.watched_fraction = r.num("watched_fraction", 1.0);
    s.seed = static_cast<std::uint64_t>(r.bytes("seed", 1));
    s.tick_s = r.num("tick_s", s.tick_s);
    r.reject_unused();
  }

  s.validate();
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& file) {
  std::ifstream f(file);
  if (!f) throw ScenarioError("io", fmt::format("cannot open scenario {}", file.string()));
  std::stringstream ss;
  ss << f.rdbuf();
  return load_scenario(ss.str(), file.parent_path());
}

std::filesystem::path bundled_scenario_dir() {
#ifdef MVS_SCENARIO_DIR
  return MVS_SCENARIO_DIR;
#else
  return "scenarios";
#endif
}

std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".scn") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mvs
