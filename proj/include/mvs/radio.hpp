#pragma once

#include "mvs/timeline.hpp"

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mvs {

class RadioError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class RadioState { Dch, Fach, Pch, Idle, WifiActive, WifiIdle, WifiSleep, WifiBeacon };
inline constexpr std::size_t kRadioStateCount = 8;

std::string_view to_string(RadioState s);
RadioState parse_radio_state(std::string_view s);

/// 3G RRC inactivity timers and per-state currents (mA).
struct RrcParams {
  double t1 = 8.0;
  double t2 = 3.0;
  double t3 = 29.0 * 60.0;
  double current_dch = 200.0;
  double current_fach = 150.0;
  double current_pch = 50.0;
  double current_idle = 0.0;
  /// DCH-priced ramp before a packet that arrives outside DCH.
  double promotion_delay = 0.0;
  /// State before the first packet.
  RadioState initial_state = RadioState::Pch;

  void validate() const;
};

/// 802.11 power save mode. Currents have no defaults; they must be configured.
struct PsmParams {
  double beacon_interval = 0.1;
  double idle_timeout = 0.1;
  double current_sleep = -1.0;
  double current_idle = -1.0;
  double current_active = -1.0;
  bool cam_mode = false;
  /// Awake excursion for each beacon while sleeping, priced at current_active.
  double beacon_wake_s = 0.002;
  double phy_rate_bps = 54e6;
  Bytes per_packet_overhead = 40;

  void validate() const;
};

struct RadioSegment {
  RadioState state = RadioState::Pch;
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
};

/// Contiguous, non-overlapping state segments covering an observation window.
using RadioTimeline = std::vector<RadioSegment>;

/// Every packet record puts or keeps the radio in DCH, then the inactivity
/// ladder DCH -> FACH -> PCH -> IDLE applies. Covers [obs_start, obs_end].
RadioTimeline rrc_drive(const PacketTimeline& timeline, const RrcParams& params, double obs_start,
                        double obs_end);

/// Packets keep the radio ACTIVE for their airtime, then awake-idle for
/// idle_timeout, then asleep with a short wake at every beacon instant
/// k * beacon_interval. With cam_mode the radio never sleeps.
RadioTimeline psm_drive(const PacketTimeline& timeline, const PsmParams& params, double obs_start,
                        double obs_end);

struct EnergyReport {
  std::array<double, kRadioStateCount> dwell_s{};
  double duration_s = 0.0;
  double charge_mas = 0.0;
  double avg_radio_current_ma = 0.0;
  double playback_current_ma = 0.0;
  double avg_total_current_ma = 0.0;
  double avg_streaming_current_ma = 0.0;

  double dwell(RadioState s) const { return dwell_s[static_cast<std::size_t>(s)]; }
};

double state_current(RadioState s, const RrcParams& p);
double state_current(RadioState s, const PsmParams& p);

EnergyReport integrate(const RadioTimeline& radio, const RrcParams& params, double playback_current);
EnergyReport integrate(const RadioTimeline& radio, const PsmParams& params, double playback_current);

/// avg_total - playback; throws RadioError if playback > total or playback < 0.
double streaming_current(double avg_total, double playback);

/// Dwell of one state restricted to [from, to].
double dwell_within(const RadioTimeline& radio, RadioState s, double from, double to);

/// Checks contiguity, ordering and non-negative segment lengths.
void check_radio_timeline(const RadioTimeline& radio);

inline constexpr std::string_view kRadioCsvHeader = "state,start_s,end_s";
void write_radio_csv(std::ostream& os, const RadioTimeline& radio);

}  // namespace mvs
