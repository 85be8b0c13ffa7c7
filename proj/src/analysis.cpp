#include "mvs/analysis.hpp"

#include "mvs/util.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include <fmt/format.h>

namespace mvs {

namespace {

struct DataPoint {
  double time;
  Bytes bytes;
};

std::vector<DataPoint> data_points(const PacketTimeline& timeline) {
  std::vector<DataPoint> out;
  for (const auto& r : timeline) {
    if (r.kind == PacketKind::Data && r.bytes > 0) out.push_back({r.time, r.bytes});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
  return out;
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// 0.5 at the threshold, 1.0 once the decisive feature clears it by `scale`.
double margin_confidence(double margin, double scale) {
  return clamp01(0.5 + 0.5 * std::max(0.0, margin) / scale);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<Burst> group_bursts(const PacketTimeline& timeline, double gap_threshold) {
  std::vector<Burst> out;
  for (const auto& p : data_points(timeline)) {
    if (!out.empty() && p.time - out.back().end < gap_threshold) {
      auto& b = out.back();
      b.end = p.time;
      b.bytes += p.bytes;
      ++b.packet_count;
    } else {
      out.push_back({p.time, p.time, p.bytes, 1});
    }
  }
  return out;
}

Cdf empirical_cdf(std::vector<double> values) {
  Cdf out;
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = static_cast<double>(i + 1) / n;
    if (!out.empty() && out.back().value == values[i]) {
      out.back().fraction = f;
    } else {
      out.push_back({values[i], f});
    }
  }
  return out;
}

BurstCdf burst_cdf(const std::vector<Burst>& bursts) {
  std::vector<double> sizes;
  std::vector<double> intervals;
  for (std::size_t i = 0; i < bursts.size(); ++i) {
    sizes.push_back(static_cast<double>(bursts[i].bytes));
    if (i > 0) intervals.push_back(bursts[i].start - bursts[i - 1].end);
  }
  return {empirical_cdf(std::move(sizes)), empirical_cdf(std::move(intervals))};
}

void write_cdf_csv(std::ostream& os, const Cdf& cdf) {
  os << "value,fraction\n";
  for (const auto& p : cdf) os << fmt::format("{},{:.6f}\n", p.value, p.fraction);
}

double fast_start_exclusion(const PacketTimeline& timeline, double window_s, double knee) {
  const auto pts = data_points(timeline);
  if (pts.empty()) throw AnalysisError("timeline has no DATA records");
  if (!(window_s > 0.0)) throw AnalysisError("window must be > 0");
  const double t0 = pts.front().time;
  const double last = pts.back().time;
  const auto windows = static_cast<std::size_t>(std::floor((last - t0) / window_s));
  if (windows == 0) return t0;

  std::vector<double> bytes(windows, 0.0);
  for (const auto& p : pts) {
    const auto k = static_cast<std::size_t>((p.time - t0) / window_s);
    if (k < windows) bytes[k] += static_cast<double>(p.bytes);
  }
  const double best = *std::max_element(bytes.begin(), bytes.end());
  for (std::size_t k = 0; k < windows; ++k) {
    if (bytes[k] < knee * best) return t0 + static_cast<double>(k + 1) * window_s;
  }
  return t0;
}

double estimate_throttle_factor(const PacketTimeline& timeline, double avg_encoding_bps,
                                double exclusion_s) {
  if (!(avg_encoding_bps > 0.0)) throw AnalysisError("encoding rate must be > 0");
  const auto pts = data_points(timeline);
  if (pts.empty()) throw AnalysisError("timeline has no DATA records");
  const double last = pts.back().time;
  Bytes bytes = 0;
  for (const auto& p : pts) {
    if (p.time > exclusion_s) bytes += p.bytes;
  }
  if (bytes == 0 || !(last > exclusion_s)) {
    throw AnalysisError(fmt::format("no DATA after the exclusion point {:.3f}s", exclusion_s));
  }
  return static_cast<double>(bytes) * 8.0 / (last - exclusion_s) / avg_encoding_bps;
}

double estimate_throttle_factor(const PacketTimeline& timeline, double avg_encoding_bps) {
  return estimate_throttle_factor(timeline, avg_encoding_bps, fast_start_exclusion(timeline));
}

double estimate_fast_start_media(const PacketTimeline& timeline, double avg_encoding_bps) {
  if (!(avg_encoding_bps > 0.0)) throw AnalysisError("encoding rate must be > 0");
  const auto pts = data_points(timeline);
  if (pts.empty()) throw AnalysisError("timeline has no DATA records");
  const double window = 2.0;
  const double t0 = pts.front().time;
  const double knee_end = fast_start_exclusion(timeline, window);
  if (knee_end <= t0) return 0.0;

  // fast rate: best full window
  const auto windows = static_cast<std::size_t>(std::floor((knee_end - t0) / window));
  std::vector<double> wbytes(windows, 0.0);
  double before = 0.0;
  for (const auto& p : pts) {
    const auto k = static_cast<std::size_t>((p.time - t0) / window);
    if (k < windows) wbytes[k] += static_cast<double>(p.bytes);
    if (p.time <= knee_end) before += static_cast<double>(p.bytes);
  }
  const double fast = *std::max_element(wbytes.begin(), wbytes.end()) / window;
  const double steady = estimate_throttle_factor(timeline, avg_encoding_bps, knee_end) * avg_encoding_bps / 8.0;
  if (!(fast > steady)) return before * 8.0 / avg_encoding_bps;

  // fast line B = fast * t meets steady line B = before + steady * (t - T)
  const double T = knee_end - t0;
  const double t_e = std::clamp((before - steady * T) / (fast - steady), 0.0, T);
  return fast * t_e * 8.0 / avg_encoding_bps;
}

BufferEstimate estimate_buffer(const PacketTimeline& timeline, const std::vector<Bytes>& schedule,
                               double start_of_playback, const std::vector<double>& times) {
  if (schedule.empty()) throw AnalysisError("encoding schedule is empty");
  const auto pts = data_points(timeline);
  Bytes total_data = 0;
  for (const auto& p : pts) total_data += p.bytes;
  Bytes total_video = 0;
  for (auto b : schedule) total_video += b;
  if (total_data > total_video) {
    throw AnalysisError(fmt::format("trace carries {} bytes but the encoding schedule only {}",
                                    total_data, total_video));
  }

  std::vector<double> cum(schedule.size() + 1, 0.0);
  for (std::size_t i = 0; i < schedule.size(); ++i) cum[i + 1] = cum[i] + static_cast<double>(schedule[i]);
  const double duration = static_cast<double>(schedule.size());
  auto bytes_at = [&](double m) {
    if (m <= 0.0) return 0.0;
    if (m >= duration) return cum.back();
    const auto i = static_cast<std::size_t>(m);
    return cum[i] + (m - static_cast<double>(i)) * static_cast<double>(schedule[i]);
  };
  auto media_at = [&](double b) {
    if (b <= 0.0) return 0.0;
    if (b >= cum.back()) return duration;
    const auto it = std::upper_bound(cum.begin(), cum.end(), b);
    const auto i = static_cast<std::size_t>(std::distance(cum.begin(), it)) - 1;
    return static_cast<double>(i) + (b - cum[i]) / static_cast<double>(schedule[i]);
  };

  BufferEstimate est;
  std::size_t next = 0;
  double received = 0.0;
  double playhead = 0.0;
  double clock = start_of_playback;
  for (double t : times) {
    while (next < pts.size() && pts[next].time <= t + 1e-9) received += static_cast<double>(pts[next++].bytes);
    if (t > clock) {
      const double want = std::min(duration, playhead + (t - clock));
      if (bytes_at(want) <= received + 1e-6) {
        playhead = want;
      } else {
        const double reach = std::max(playhead, media_at(received));
        est.stalled_s += (want - playhead) - (reach - playhead);
        playhead = reach;
      }
      clock = t;
    }
    const double buffered = received - bytes_at(playhead);
    est.points.push_back({t, buffered, std::max(0.0, media_at(received) - playhead)});
  }
  return est;
}

BufferEstimate estimate_buffer(const PacketTimeline& timeline, const std::vector<Bytes>& schedule,
                               double start_of_playback, double step_s) {
  if (!(step_s > 0.0)) throw AnalysisError("step must be > 0");
  if (schedule.empty()) throw AnalysisError("encoding schedule is empty");
  const auto pts = data_points(timeline);
  double end = start_of_playback + static_cast<double>(schedule.size());
  if (!pts.empty()) end = std::max(end, pts.back().time);
  std::vector<double> times;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * step_s;
    if (t > end + 1e-9) break;
    times.push_back(t);
  }
  return estimate_buffer(timeline, schedule, start_of_playback, times);
}

std::string_view to_string(TechniqueLabel l) {
  switch (l) {
    case TechniqueLabel::EncodingRate: return "ENCODING_RATE";
    case TechniqueLabel::Throttle: return "THROTTLE";
    case TechniqueLabel::OnOffPersistent: return "ON_OFF_PERSISTENT";
    case TechniqueLabel::OnOffPerBurst: return "ON_OFF_PER_BURST";
    case TechniqueLabel::FastCaching: return "FAST_CACHING";
    case TechniqueLabel::Dash: return "DASH";
    case TechniqueLabel::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

ClassificationResult classify(const PacketTimeline& timeline, double avg_encoding_bps,
                              double path_bandwidth_bps, const ClassifierConfig& cfg) {
  ClassificationResult res;
  auto& ev = res.evidence;

  std::set<ConnectionId> conns;
  std::map<ConnectionId, double> first_seen;
  std::map<ConnectionId, double> last_seen;
  double zw_ads = 0.0;
  double zw_probes = 0.0;
  double requests = 0.0;
  for (const auto& r : timeline) {
    conns.insert(r.conn_id);
    if (!first_seen.count(r.conn_id)) first_seen[r.conn_id] = r.time;
    last_seen[r.conn_id] = std::max(last_seen[r.conn_id], r.time);
    if (r.kind == PacketKind::ZeroWindowAd) zw_ads += 1.0;
    if (r.kind == PacketKind::ZeroWindowProbe) zw_probes += 1.0;
    if (r.kind == PacketKind::Request) requests += 1.0;
  }

  // silent gaps between one connection's last packet and the next one's first
  std::vector<std::pair<double, ConnectionId>> order;
  for (const auto& [id, t] : first_seen) order.emplace_back(t, id);
  std::sort(order.begin(), order.end());
  double max_conn_gap = 0.0;
  for (std::size_t i = 1; i < order.size(); ++i) {
    double prev_last = -INFINITY;
    for (std::size_t j = 0; j < i; ++j) prev_last = std::max(prev_last, last_seen[order[j].second]);
    max_conn_gap = std::max(max_conn_gap, order[i].first - prev_last);
  }

  const auto pts = data_points(timeline);
  const auto bursts = group_bursts(timeline);
  const double n_conns = static_cast<double>(conns.size());

  ev["connections"] = n_conns;
  ev["max_connection_gap_s"] = max_conn_gap;
  ev["zero_window_ads"] = zw_ads;
  ev["zero_window_probes"] = zw_probes;
  ev["requests_per_connection"] = n_conns > 0 ? requests / n_conns : 0.0;
  ev["burst_count"] = static_cast<double>(bursts.size());
  ev["max_burst_gap_s"] = 0.0;
  ev["median_burst_gap_s"] = 0.0;
  ev["fast_start_end_s"] = 0.0;
  ev["throughput_ratio"] = 0.0;
  ev["completion_fraction"] = 0.0;
  ev["path_utilization"] = 0.0;
  ev["zero_window_ads_per_min"] = 0.0;

  if (pts.empty() || !(avg_encoding_bps > 0.0) || !(path_bandwidth_bps > 0.0)) {
    res.rule = "no data";
    return res;
  }

  const double t0 = pts.front().time;
  const double last = pts.back().time;
  Bytes total = 0;
  for (const auto& p : pts) total += p.bytes;
  const double span_min = std::max(last - t0, 1e-9) / 60.0;
  ev["zero_window_ads_per_min"] = zw_ads / span_min;

  const double exclusion = fast_start_exclusion(timeline);
  ev["fast_start_end_s"] = exclusion;
  std::vector<double> steady_gaps;
  for (std::size_t i = 1; i < bursts.size(); ++i) {
    if (bursts[i].start >= exclusion) steady_gaps.push_back(bursts[i].start - bursts[i - 1].end);
  }
  const double max_gap = steady_gaps.empty() ? 0.0 : *std::max_element(steady_gaps.begin(), steady_gaps.end());
  ev["max_burst_gap_s"] = max_gap;
  ev["median_burst_gap_s"] = median(steady_gaps);

  // Pacing is a per-connection property: with several connections, measure it
  // on the one that carried the most data, so refetches after reconnects do
  // not count as server rate.
  const PacketTimeline* paced = &timeline;
  PacketTimeline dominant;
  if (conns.size() > 1) {
    std::map<ConnectionId, Bytes> carried;
    for (const auto& r : timeline) {
      if (r.kind == PacketKind::Data) carried[r.conn_id] += r.bytes;
    }
    const auto top = std::max_element(carried.begin(), carried.end(),
                                      [](const auto& a, const auto& b) { return a.second < b.second; });
    for (const auto& r : timeline) {
      if (r.conn_id == top->first) dominant.push_back(r);
    }
    paced = &dominant;
  }
  double ratio = 0.0;
  try {
    ratio = estimate_throttle_factor(*paced, avg_encoding_bps, fast_start_exclusion(*paced));
  } catch (const AnalysisError&) {
    ratio = estimate_throttle_factor(*paced, avg_encoding_bps, paced->front().time - 1e-9);
  }
  ev["throughput_ratio"] = ratio;
  const double media_s = static_cast<double>(total) * 8.0 / avg_encoding_bps;
  const double completion = (last - t0) / media_s;
  ev["completion_fraction"] = completion;
  const double util = ratio * avg_encoding_bps / path_bandwidth_bps;
  ev["path_utilization"] = util;
  const double req_per_conn = ev["requests_per_connection"];

  auto decide = [&](TechniqueLabel label, std::string rule, double confidence) {
    res.label = label;
    res.rule = std::move(rule);
    res.confidence = confidence;
    return res;
  };

  if (n_conns >= 2 && max_conn_gap >= cfg.long_gap_s) {
    return decide(TechniqueLabel::OnOffPerBurst, "reconnects after long silences",
                  margin_confidence(max_conn_gap / cfg.long_gap_s - 1.0, 1.0));
  }
  if (zw_probes > 0 && max_gap >= cfg.long_gap_s) {
    return decide(TechniqueLabel::OnOffPersistent, "zero-window probes across long idle gaps",
                  margin_confidence(max_gap / cfg.long_gap_s - 1.0, 1.0));
  }
  const double enc_dev = std::abs(ratio - 1.0);
  const double enc_band = 0.5 * (cfg.enc_ratio_high - cfg.enc_ratio_low);
  if (ratio >= cfg.enc_ratio_low && ratio <= cfg.enc_ratio_high &&
      (ev["zero_window_ads_per_min"] >= cfg.zero_window_ads_per_min || util >= cfg.path_utilization)) {
    return decide(TechniqueLabel::EncodingRate, "steady throughput at the encoding rate",
                  margin_confidence((enc_band - enc_dev) / enc_band, 0.5));
  }
  if (zw_ads == 0 && zw_probes == 0 && ratio > cfg.enc_ratio_high && ratio <= cfg.throttle_ratio_high &&
      completion < cfg.early_completion && req_per_conn <= 1.0) {
    const double m = std::min(ratio - cfg.enc_ratio_high, cfg.throttle_ratio_high - ratio);
    return decide(TechniqueLabel::Throttle, "paced above the encoding rate, early completion",
                  margin_confidence(m, 0.1));
  }
  if (n_conns == 1 && req_per_conn >= cfg.dash_min_requests && max_gap > 0.0) {
    return decide(TechniqueLabel::Dash, "repeated requests on one connection",
                  margin_confidence(req_per_conn / cfg.dash_min_requests - 1.0, 1.0));
  }
  if (util >= cfg.path_utilization && completion < cfg.fast_caching_completion) {
    return decide(TechniqueLabel::FastCaching, "path-limited download well ahead of playback",
                  margin_confidence(util - cfg.path_utilization, 0.1));
  }
  res.rule = "no rule matched";
  return res;
}

std::vector<Bytes> read_encoding_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != "second,bytes") {
    throw FormatError("encoding CSV must start with the header 'second,bytes'");
  }
  std::vector<Bytes> out;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(trim(line), ',');
    if (fields.size() != 2) throw FormatError(fmt::format("line {}: expected 2 fields", line_no));
    try {
      const auto second = parse_int(fields[0]);
      const auto bytes = parse_int(fields[1]);
      if (second != static_cast<long long>(out.size())) {
        throw FormatError(fmt::format("line {}: seconds must be consecutive from 0", line_no));
      }
      if (bytes <= 0) throw FormatError(fmt::format("line {}: bytes must be > 0", line_no));
      out.push_back(bytes);
    } catch (const std::invalid_argument& e) {
      throw FormatError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  if (out.empty()) throw FormatError("encoding CSV has no rows");
  return out;
}

void write_encoding_csv(std::ostream& os, const std::vector<Bytes>& schedule) {
  os << "second,bytes\n";
  for (std::size_t i = 0; i < schedule.size(); ++i) os << i << ',' << schedule[i] << '\n';
}

}  // namespace mvs
