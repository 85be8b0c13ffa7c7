#include "mvs/radio.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace mvs {

namespace {

constexpr std::array<std::string_view, kRadioStateCount> kLabels = {
    "DCH", "FACH", "PCH", "IDLE", "ACTIVE", "WIFI_IDLE", "SLEEP", "BEACON"};

void check_sorted(const PacketTimeline& timeline) {
  if (!is_time_sorted(timeline)) throw RadioError("packet timeline is not sorted by time");
}

void check_window(double obs_start, double obs_end) {
  if (!(obs_end >= obs_start)) throw RadioError("observation window ends before it starts");
}

// Appends [start, end) in `state`, merging with the previous segment when possible.
void push(RadioTimeline& out, RadioState state, double start, double end) {
  if (!(end > start)) return;
  if (!out.empty() && out.back().state == state && std::abs(out.back().end - start) < 1e-12) {
    out.back().end = end;
    return;
  }
  out.push_back({state, start, end});
}

// RRC demotion ladder after DCH ended at `origin`, clipped to [from, to).
void rrc_tail(RadioTimeline& out, const RrcParams& p, double origin, double from, double to) {
  const double fach_end = origin + p.t2;
  const double pch_end = fach_end + p.t3;
  push(out, RadioState::Fach, std::max(from, origin), std::min(fach_end, to));
  push(out, RadioState::Pch, std::max(from, fach_end), std::min(pch_end, to));
  push(out, RadioState::Idle, std::max(from, pch_end), to);
}

}  // namespace

std::string_view to_string(RadioState s) { return kLabels[static_cast<std::size_t>(s)]; }

RadioState parse_radio_state(std::string_view s) {
  for (std::size_t i = 0; i < kLabels.size(); ++i) {
    if (kLabels[i] == s) return static_cast<RadioState>(i);
  }
  throw RadioError(fmt::format("unknown radio state '{}'", s));
}

void RrcParams::validate() const {
  if (!(t1 > 0.0 && t2 > 0.0 && t3 > 0.0)) throw RadioError("RRC timers must be > 0");
  if (!(current_idle >= 0.0)) throw RadioError("RRC currents must be >= 0");
  if (!(current_dch > current_fach && current_fach > current_pch && current_pch >= current_idle)) {
    throw RadioError("RRC currents must satisfy DCH > FACH > PCH >= IDLE");
  }
  if (!(promotion_delay >= 0.0)) throw RadioError("promotion_delay must be >= 0");
  if (initial_state != RadioState::Dch && initial_state != RadioState::Fach &&
      initial_state != RadioState::Pch && initial_state != RadioState::Idle) {
    throw RadioError("RRC initial state must be an RRC state");
  }
}

void PsmParams::validate() const {
  if (!(beacon_interval > 0.0)) throw RadioError("beacon_interval must be > 0");
  if (!(idle_timeout >= 0.0)) throw RadioError("idle_timeout must be >= 0");
  if (current_sleep < 0.0 || current_idle < 0.0 || current_active < 0.0) {
    throw RadioError("Wi-Fi currents current_sleep, current_idle and current_active are required");
  }
  if (!(current_active > current_idle && current_idle > current_sleep)) {
    throw RadioError("Wi-Fi currents must satisfy ACTIVE > IDLE > SLEEP >= 0");
  }
  if (!(beacon_wake_s >= 0.0 && beacon_wake_s < beacon_interval)) {
    throw RadioError("beacon_wake_s must be in [0, beacon_interval)");
  }
  if (!(phy_rate_bps > 0.0)) throw RadioError("phy_rate_bps must be > 0");
  if (per_packet_overhead < 0) throw RadioError("per_packet_overhead must be >= 0");
}

RadioTimeline rrc_drive(const PacketTimeline& timeline, const RrcParams& p, double obs_start,
                        double obs_end) {
  p.validate();
  check_sorted(timeline);
  check_window(obs_start, obs_end);

  RadioTimeline out;
  double cursor = obs_start;       // everything before this is emitted
  double dch_until = -INFINITY;    // end of the current DCH hold
  bool any = false;

  for (const auto& r : timeline) {
    if (r.time > obs_end) break;
    if (r.time < obs_start) {
      dch_until = std::max(dch_until, r.time + p.t1);
      any = true;
      continue;
    }
    if (r.time >= dch_until) {
      // radio is outside DCH: emit the lower states up to the promotion point
      const double promo_start = std::max(cursor, r.time - p.promotion_delay);
      if (!any) {
        push(out, p.initial_state, cursor, promo_start);
      } else {
        push(out, RadioState::Dch, cursor, std::min(std::max(cursor, dch_until), promo_start));
        rrc_tail(out, p, dch_until, cursor, promo_start);
      }
      cursor = promo_start;
    }
    any = true;
    dch_until = r.time + p.t1;
  }

  if (!any) {
    push(out, p.initial_state, cursor, obs_end);
  } else {
    const double dch_end = std::min(std::max(cursor, dch_until), obs_end);
    push(out, RadioState::Dch, cursor, dch_end);
    rrc_tail(out, p, dch_until, cursor, obs_end);
  }
  return out;
}

RadioTimeline psm_drive(const PacketTimeline& timeline, const PsmParams& p, double obs_start,
                        double obs_end) {
  p.validate();
  check_sorted(timeline);
  check_window(obs_start, obs_end);

  // merged ACTIVE intervals
  std::vector<std::pair<double, double>> active;
  for (const auto& r : timeline) {
    if (r.time > obs_end) break;
    const double air = static_cast<double>(r.bytes + p.per_packet_overhead) * 8.0 / p.phy_rate_bps;
    double s = std::max(r.time, obs_start);
    const double e = std::min(r.time + air, obs_end);
    if (e <= s) continue;
    if (!active.empty() && s <= active.back().second) {
      active.back().second = std::max(active.back().second, e);
    } else {
      active.emplace_back(s, e);
    }
  }

  RadioTimeline out;
  auto sleep_span = [&](double from, double to) {
    if (!(to > from)) return;
    if (p.beacon_wake_s <= 0.0) {
      push(out, RadioState::WifiSleep, from, to);
      return;
    }
    double t = from;
    auto k = static_cast<long long>(std::ceil(from / p.beacon_interval - 1e-9));
    while (t < to) {
      const double beacon = static_cast<double>(k) * p.beacon_interval;
      if (beacon >= to) break;
      if (beacon + p.beacon_wake_s <= t) {
        ++k;
        continue;
      }
      push(out, RadioState::WifiSleep, t, std::max(t, beacon));
      const double wake_end = std::min(to, beacon + p.beacon_wake_s);
      push(out, RadioState::WifiBeacon, std::max(t, beacon), wake_end);
      t = wake_end;
      ++k;
    }
    push(out, RadioState::WifiSleep, t, to);
  };
  auto quiet = [&](double from, double to) {
    if (!(to > from)) return;
    if (p.cam_mode) {
      push(out, RadioState::WifiIdle, from, to);
      return;
    }
    const double idle_end = std::min(to, from + p.idle_timeout);
    push(out, RadioState::WifiIdle, from, idle_end);
    sleep_span(idle_end, to);
  };

  double cursor = obs_start;
  bool first = true;
  for (const auto& [s, e] : active) {
    if (first && !p.cam_mode) {
      sleep_span(cursor, s);
    } else {
      quiet(cursor, s);
    }
    first = false;
    push(out, RadioState::WifiActive, s, e);
    cursor = e;
  }
  if (first && !p.cam_mode) {
    sleep_span(cursor, obs_end);
  } else {
    quiet(cursor, obs_end);
  }
  return out;
}

double state_current(RadioState s, const RrcParams& p) {
  switch (s) {
    case RadioState::Dch: return p.current_dch;
    case RadioState::Fach: return p.current_fach;
    case RadioState::Pch: return p.current_pch;
    case RadioState::Idle: return p.current_idle;
    default: throw RadioError(fmt::format("state {} is not an RRC state", to_string(s)));
  }
}

double state_current(RadioState s, const PsmParams& p) {
  switch (s) {
    case RadioState::WifiActive:
    case RadioState::WifiBeacon: return p.current_active;
    case RadioState::WifiIdle: return p.current_idle;
    case RadioState::WifiSleep: return p.current_sleep;
    default: throw RadioError(fmt::format("state {} is not a Wi-Fi state", to_string(s)));
  }
}

namespace {

template <typename Params>
EnergyReport integrate_impl(const RadioTimeline& radio, const Params& params, double playback_current) {
  check_radio_timeline(radio);
  if (!(playback_current >= 0.0)) throw RadioError("playback current must be >= 0");
  EnergyReport rep;
  for (const auto& seg : radio) {
    const double d = seg.duration();
    rep.dwell_s[static_cast<std::size_t>(seg.state)] += d;
    rep.charge_mas += d * state_current(seg.state, params);
  }
  if (!radio.empty()) rep.duration_s = radio.back().end - radio.front().start;
  rep.avg_radio_current_ma = rep.duration_s > 0.0 ? rep.charge_mas / rep.duration_s : 0.0;
  rep.playback_current_ma = playback_current;
  rep.avg_total_current_ma = playback_current + rep.avg_radio_current_ma;
  rep.avg_streaming_current_ma = streaming_current(rep.avg_total_current_ma, playback_current);
  return rep;
}

}  // namespace

EnergyReport integrate(const RadioTimeline& radio, const RrcParams& params, double playback_current) {
  return integrate_impl(radio, params, playback_current);
}

EnergyReport integrate(const RadioTimeline& radio, const PsmParams& params, double playback_current) {
  return integrate_impl(radio, params, playback_current);
}

double streaming_current(double avg_total, double playback) {
  if (playback < 0.0) throw RadioError("playback current must be >= 0");
  if (playback > avg_total) {
    throw RadioError(fmt::format("playback current {} exceeds total current {}", playback, avg_total));
  }
  return avg_total - playback;
}

double dwell_within(const RadioTimeline& radio, RadioState s, double from, double to) {
  double total = 0.0;
  for (const auto& seg : radio) {
    if (seg.state != s) continue;
    total += std::max(0.0, std::min(seg.end, to) - std::max(seg.start, from));
  }
  return total;
}

void check_radio_timeline(const RadioTimeline& radio) {
  for (std::size_t i = 0; i < radio.size(); ++i) {
    if (radio[i].end < radio[i].start) {
      throw RadioError(fmt::format("radio segment {} has negative length", i));
    }
    if (i > 0 && std::abs(radio[i].start - radio[i - 1].end) > 1e-9) {
      throw RadioError(fmt::format("radio segments {} and {} are not contiguous", i - 1, i));
    }
  }
}

void write_radio_csv(std::ostream& os, const RadioTimeline& radio) {
  os << kRadioCsvHeader << '\n';
  for (const auto& seg : radio) {
    os << fmt::format("{},{:.6f},{:.6f}\n", to_string(seg.state), seg.start, seg.end);
  }
}

}  // namespace mvs
