#pragma once

#include "mvs/timeline.hpp"

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mvs {

class AnalysisError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Burst {
  double start = 0.0;
  double end = 0.0;
  Bytes bytes = 0;
  std::size_t packet_count = 0;
};

inline constexpr double kBurstGap = 0.050;

/// Maximal runs of DATA records whose successive gaps are < gap_threshold.
std::vector<Burst> group_bursts(const PacketTimeline& timeline, double gap_threshold = kBurstGap);

struct CdfPoint {
  double value = 0.0;
  double fraction = 0.0;
};
using Cdf = std::vector<CdfPoint>;

/// Empirical CDF with one point per distinct value.
Cdf empirical_cdf(std::vector<double> values);

struct BurstCdf {
  Cdf sizes;
  Cdf intervals;  // next start - previous end
};
BurstCdf burst_cdf(const std::vector<Burst>& bursts);

void write_cdf_csv(std::ostream& os, const Cdf& cdf);

/// Start of the steady phase: end of the first full 2 s window whose DATA
/// throughput falls below knee x the best window. First DATA time when no
/// window qualifies. Throws AnalysisError on a timeline without DATA.
double fast_start_exclusion(const PacketTimeline& timeline, double window_s = 2.0, double knee = 0.8);

/// DATA throughput over (exclusion, last DATA] divided by the encoding rate.
double estimate_throttle_factor(const PacketTimeline& timeline, double avg_encoding_bps,
                                double exclusion_s);
double estimate_throttle_factor(const PacketTimeline& timeline, double avg_encoding_bps);

/// Media seconds delivered in the initial full-speed phase, found by
/// intersecting the fast-rate and steady-rate lines of the cumulative
/// delivery curve.
double estimate_fast_start_media(const PacketTimeline& timeline, double avg_encoding_bps);

struct BufferPoint {
  double time = 0.0;
  double bytes = 0.0;
  double media_s = 0.0;
};

struct BufferEstimate {
  std::vector<BufferPoint> points;
  double stalled_s = 0.0;
};

/// Client-side buffered data implied by the DATA arrivals and a playhead
/// moving in real time from start_of_playback, frozen while data is missing.
/// Evaluated at the given ascending times. Throws AnalysisError on an empty
/// schedule or when the trace carries more bytes than the schedule.
BufferEstimate estimate_buffer(const PacketTimeline& timeline, const std::vector<Bytes>& encoding_schedule,
                               double start_of_playback, const std::vector<double>& times);
/// Same, on a regular grid from 0 to the later of last DATA and playback end.
BufferEstimate estimate_buffer(const PacketTimeline& timeline, const std::vector<Bytes>& encoding_schedule,
                               double start_of_playback, double step_s = 0.1);

enum class TechniqueLabel { EncodingRate, Throttle, OnOffPersistent, OnOffPerBurst, FastCaching, Dash, Unknown };
std::string_view to_string(TechniqueLabel l);

struct ClassificationResult {
  TechniqueLabel label = TechniqueLabel::Unknown;
  double confidence = 0.0;
  std::string rule;
  std::map<std::string, double> evidence;
};

/// Thresholds of the rule cascade. Fitted constants, not measured ones.
struct ClassifierConfig {
  double long_gap_s = 10.0;
  double enc_ratio_low = 0.9;
  double enc_ratio_high = 1.1;
  double zero_window_ads_per_min = 1.0;
  double throttle_ratio_high = 3.5;
  double early_completion = 0.9;
  double path_utilization = 0.8;
  double fast_caching_completion = 0.5;
  double dash_min_requests = 3.0;
};

ClassificationResult classify(const PacketTimeline& timeline, double avg_encoding_bps,
                              double path_bandwidth_bps, const ClassifierConfig& cfg = {});

/// Encoding schedule CSV: header `second,bytes`, one row per media second.
std::vector<Bytes> read_encoding_csv(std::istream& is);
void write_encoding_csv(std::ostream& os, const std::vector<Bytes>& schedule);

}  // namespace mvs
