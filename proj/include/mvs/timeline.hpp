#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mvs {

using Bytes = std::int64_t;
using ConnectionId = int;

enum class Direction { Down, Up };

enum class PacketKind {
  Data,
  ZeroWindowAd,
  ZeroWindowProbe,
  Open,
  CloseFin,
  CloseRst,
  Request,
};

/// One on-wire event as seen by a passive observer near the client.
///
/// DATA records carry payload > 0 and may aggregate everything delivered on a
/// connection within one delivery quantum. Zero-window probes and ads carry 0.
struct PacketRecord {
  double time = 0.0;
  Direction direction = Direction::Down;
  Bytes bytes = 0;
  PacketKind kind = PacketKind::Data;
  ConnectionId conn_id = 0;

  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

using PacketTimeline = std::vector<PacketRecord>;

class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string_view to_string(Direction d);
std::string_view to_string(PacketKind k);
Direction parse_direction(std::string_view s);
PacketKind parse_packet_kind(std::string_view s);

/// Header line of the interchange CSV.
inline constexpr std::string_view kTimelineCsvHeader = "time_s,direction,bytes,kind,conn_id";

void write_timeline_csv(std::ostream& out, const PacketTimeline& timeline);
std::string timeline_to_csv(const PacketTimeline& timeline);
PacketTimeline read_timeline_csv(std::istream& in);
PacketTimeline parse_timeline_csv(std::string_view text);

/// True when record times are non-decreasing.
bool is_time_sorted(const PacketTimeline& timeline);

/// Stable sort by time; records at equal times keep emission order.
void sort_by_time(PacketTimeline& timeline);

/// Perturbs each record's time by a uniform draw in ±fraction of the gap to
/// the previous record, then restores time order. fraction = 0 is a no-op.
PacketTimeline apply_jitter(PacketTimeline timeline, double fraction, std::uint64_t seed);

Bytes total_data_bytes(const PacketTimeline& timeline);

}  // namespace mvs
