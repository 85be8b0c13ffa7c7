#include "mvs/video.hpp"

#include "mvs/util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mvs {

Bytes VideoSpec::total_size() const {
  return std::accumulate(encoding_schedule.begin(), encoding_schedule.end(), Bytes{0});
}

double VideoSpec::avg_encoding_bps() const {
  if (encoding_schedule.empty()) return 0.0;
  return 8.0 * static_cast<double>(total_size()) / duration_s();
}

Bytes VideoSpec::peak_second_bytes() const {
  if (encoding_schedule.empty()) return 0;
  return *std::max_element(encoding_schedule.begin(), encoding_schedule.end());
}

void VideoSpec::validate() const {
  if (encoding_schedule.empty()) throw std::invalid_argument("video encoding schedule is empty");
  for (auto b : encoding_schedule) {
    if (b <= 0) throw std::invalid_argument("video encoding schedule entries must be > 0");
  }
  if (keyframe_spacing < 0) throw std::invalid_argument("keyframe spacing must be >= 0");
  for (const auto& q : quality_ladder) {
    if (!(q.bandwidth_bps > 0.0)) throw std::invalid_argument("quality level bandwidth must be > 0");
    if (!(q.segment_duration_s > 0.0)) {
      throw std::invalid_argument("quality level segment duration must be > 0");
    }
  }
}

std::vector<Bytes> make_vbr_schedule(double avg_bps, int duration_s, double vbr_amplitude,
                                     std::uint64_t seed) {
  if (duration_s <= 0) throw std::invalid_argument("duration must be > 0");
  if (!(avg_bps > 0.0)) throw std::invalid_argument("average encoding rate must be > 0");
  if (!(vbr_amplitude >= 0.0 && vbr_amplitude < 1.0)) {
    throw std::invalid_argument("vbr amplitude must be in [0, 1)");
  }
  const double mean = avg_bps / 8.0;
  const auto target = static_cast<Bytes>(std::llround(mean * duration_s));
  SplitRng rng(seed);
  std::vector<Bytes> out(static_cast<std::size_t>(duration_s));
  Bytes sum = 0;
  for (auto& b : out) {
    b = static_cast<Bytes>(std::llround(mean * (1.0 + rng.uniform(-vbr_amplitude, vbr_amplitude))));
    b = std::max<Bytes>(b, 1);
    sum += b;
  }
  // spread the rounding/sampling residue evenly so the total is exact
  Bytes residue = target - sum;
  const auto n = static_cast<Bytes>(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Bytes share = residue / (n - static_cast<Bytes>(i));
    out[i] = std::max<Bytes>(1, out[i] + share);
    residue -= share;
  }
  return out;
}

ContentMap::ContentMap(const std::vector<Bytes>& per_second_bytes) {
  media_.reserve(per_second_bytes.size());
  for (auto b : per_second_bytes) append(1.0, b);
}

void ContentMap::append(double media_s, Bytes bytes) {
  if (!(media_s > 0.0) || bytes <= 0) throw std::invalid_argument("content chunk must be non-empty");
  media_.push_back(media_s);
  bytes_.push_back(bytes);
  cum_media_.push_back(cum_media_.back() + media_s);
  cum_bytes_.push_back(cum_bytes_.back() + bytes);
}

double ContentMap::bytes_at_media(double m) const {
  if (m <= 0.0 || media_.empty()) return 0.0;
  if (m >= cum_media_.back()) return static_cast<double>(cum_bytes_.back());
  const auto it = std::upper_bound(cum_media_.begin(), cum_media_.end(), m);
  const auto i = static_cast<std::size_t>(std::distance(cum_media_.begin(), it)) - 1;
  const double frac = (m - cum_media_[i]) / media_[i];
  return static_cast<double>(cum_bytes_[i]) + frac * static_cast<double>(bytes_[i]);
}

double ContentMap::media_at_bytes(double b) const {
  if (b <= 0.0 || media_.empty()) return 0.0;
  if (b >= static_cast<double>(cum_bytes_.back())) return cum_media_.back();
  const auto it = std::upper_bound(cum_bytes_.begin(), cum_bytes_.end(), static_cast<Bytes>(std::floor(b)));
  auto i = static_cast<std::size_t>(std::distance(cum_bytes_.begin(), it)) - 1;
  i = std::min(i, media_.size() - 1);
  const double frac = (b - static_cast<double>(cum_bytes_[i])) / static_cast<double>(bytes_[i]);
  return cum_media_[i] + frac * media_[i];
}

std::size_t ContentMap::chunk_index_at_media(double m) const {
  if (media_.empty()) return 0;
  const auto it = std::upper_bound(cum_media_.begin(), cum_media_.end(), m);
  auto i = static_cast<std::size_t>(std::distance(cum_media_.begin(), it));
  i = i == 0 ? 0 : i - 1;
  return std::min(i, media_.size() - 1);
}

void ContentMap::truncate(std::size_t n) {
  if (n >= media_.size()) return;
  media_.resize(n);
  bytes_.resize(n);
  cum_media_.resize(n + 1);
  cum_bytes_.resize(n + 1);
}

}  // namespace mvs
