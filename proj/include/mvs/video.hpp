#pragma once

#include "mvs/timeline.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mvs {

/// One variant of an adaptive stream, e.g. BW=859000,RES=640x360.
struct QualityLevel {
  double bandwidth_bps = 0.0;
  std::string resolution_label;
  double segment_duration_s = 10.0;
};

/// A video as the player sees it: per-second encoded byte counts (VBR).
///
/// For adaptive streams the schedule is the reference rendition; ladder
/// levels scale it by bandwidth_bps / avg_encoding_bps.
struct VideoSpec {
  std::vector<Bytes> encoding_schedule;
  Bytes keyframe_spacing = 0;  // 0 = no key-frame structure
  std::vector<QualityLevel> quality_ladder;

  double duration_s() const { return static_cast<double>(encoding_schedule.size()); }
  Bytes total_size() const;
  double avg_encoding_bps() const;
  Bytes peak_second_bytes() const;

  /// Throws std::invalid_argument on an empty schedule, non-positive entries or
  /// invalid ladder levels.
  void validate() const;
};

/// Deterministic VBR schedule: per-second sizes drawn uniformly within
/// ±vbr_amplitude of the mean, then corrected so the total equals
/// round(avg_bps * duration / 8).
std::vector<Bytes> make_vbr_schedule(double avg_bps, int duration_s, double vbr_amplitude,
                                     std::uint64_t seed);

/// Ordered playback content: chunks of (media seconds, bytes) with a linear
/// byte/media mapping inside each chunk. Used to translate between content
/// byte offsets and media time.
class ContentMap {
public:
  ContentMap() = default;
  explicit ContentMap(const std::vector<Bytes>& per_second_bytes);

  void append(double media_s, Bytes bytes);

  Bytes total_bytes() const { return cum_bytes_.back(); }
  double total_media() const { return cum_media_.back(); }
  std::size_t chunk_count() const { return media_.size(); }

  /// Cumulative bytes needed to play up to media time m (fractional, clamped).
  double bytes_at_media(double m) const;
  /// Media time playable with the first b content bytes (clamped).
  double media_at_bytes(double b) const;

  Bytes chunk_end_bytes(std::size_t i) const { return cum_bytes_.at(i + 1); }
  /// Index of the chunk being played at media time m (last chunk if past the end).
  std::size_t chunk_index_at_media(double m) const;
  /// Keeps only the first n chunks.
  void truncate(std::size_t n);

private:
  std::vector<double> media_;
  std::vector<Bytes> bytes_;
  std::vector<double> cum_media_{0.0};
  std::vector<Bytes> cum_bytes_{0};
};

}  // namespace mvs
