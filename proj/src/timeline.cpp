#include "mvs/timeline.hpp"

#include "mvs/util.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace mvs {

std::string_view to_string(Direction d) {
  return d == Direction::Down ? "DOWN" : "UP";
}

std::string_view to_string(PacketKind k) {
  switch (k) {
    case PacketKind::Data: return "DATA";
    case PacketKind::ZeroWindowAd: return "ZERO_WINDOW_AD";
    case PacketKind::ZeroWindowProbe: return "ZERO_WINDOW_PROBE";
    case PacketKind::Open: return "OPEN";
    case PacketKind::CloseFin: return "CLOSE_FIN";
    case PacketKind::CloseRst: return "CLOSE_RST";
    case PacketKind::Request: return "REQUEST";
  }
  return "?";
}

Direction parse_direction(std::string_view s) {
  if (s == "DOWN") return Direction::Down;
  if (s == "UP") return Direction::Up;
  throw FormatError(fmt::format("unknown direction '{}'", s));
}

PacketKind parse_packet_kind(std::string_view s) {
  static constexpr PacketKind all[] = {
      PacketKind::Data,     PacketKind::ZeroWindowAd, PacketKind::ZeroWindowProbe,
      PacketKind::Open,     PacketKind::CloseFin,     PacketKind::CloseRst,
      PacketKind::Request,
  };
  for (auto k : all) {
    if (to_string(k) == s) return k;
  }
  throw FormatError(fmt::format("unknown packet kind '{}'", s));
}

void write_timeline_csv(std::ostream& out, const PacketTimeline& timeline) {
  out << kTimelineCsvHeader << '\n';
  for (const auto& r : timeline) {
    out << fmt::format("{:.6f},{},{},{},{}\n", r.time, to_string(r.direction), r.bytes,
                       to_string(r.kind), r.conn_id);
  }
}

std::string timeline_to_csv(const PacketTimeline& timeline) {
  std::ostringstream out;
  write_timeline_csv(out, timeline);
  return out.str();
}

PacketTimeline read_timeline_csv(std::istream& in) {
  PacketTimeline timeline;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = trim(line);
    if (text.empty()) continue;
    if (!header_seen) {
      if (text != kTimelineCsvHeader) {
        throw FormatError(fmt::format("line {}: expected header '{}'", line_no, kTimelineCsvHeader));
      }
      header_seen = true;
      continue;
    }
    auto fields = split(text, ',');
    if (fields.size() != 5) {
      throw FormatError(fmt::format("line {}: expected 5 fields, got {}", line_no, fields.size()));
    }
    try {
      PacketRecord r;
      r.time = parse_double(fields[0]);
      r.direction = parse_direction(trim(fields[1]));
      r.bytes = parse_int(fields[2]);
      r.kind = parse_packet_kind(trim(fields[3]));
      r.conn_id = static_cast<ConnectionId>(parse_int(fields[4]));
      timeline.push_back(r);
    } catch (const std::exception& e) {
      throw FormatError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  if (!header_seen) throw FormatError("empty timeline file (missing header)");
  return timeline;
}

PacketTimeline parse_timeline_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_timeline_csv(in);
}

bool is_time_sorted(const PacketTimeline& timeline) {
  return std::is_sorted(timeline.begin(), timeline.end(),
                        [](const auto& a, const auto& b) { return a.time < b.time; });
}

void sort_by_time(PacketTimeline& timeline) {
  std::stable_sort(timeline.begin(), timeline.end(),
                   [](const auto& a, const auto& b) { return a.time < b.time; });
}

PacketTimeline apply_jitter(PacketTimeline timeline, double fraction, std::uint64_t seed) {
  if (fraction <= 0.0 || timeline.size() < 2) return timeline;
  if (fraction >= 1.0) throw std::invalid_argument("jitter fraction must be < 1");
  SplitRng rng(seed);
  std::vector<double> original(timeline.size());
  for (std::size_t i = 0; i < timeline.size(); ++i) original[i] = timeline[i].time;
  for (std::size_t i = 1; i < timeline.size(); ++i) {
    const double gap = original[i] - original[i - 1];
    timeline[i].time = original[i] + rng.uniform(-fraction, fraction) * gap;
  }
  sort_by_time(timeline);
  return timeline;
}

Bytes total_data_bytes(const PacketTimeline& timeline) {
  Bytes total = 0;
  for (const auto& r : timeline) {
    if (r.kind == PacketKind::Data) total += r.bytes;
  }
  return total;
}

}  // namespace mvs
