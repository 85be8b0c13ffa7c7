#pragma once

#include "mvs/timeline.hpp"

#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mvs {

inline constexpr double kUnlimitedRate = std::numeric_limits<double>::infinity();

class TransportError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Fixed-rate downlink pipe between server and client.
struct PathSpec {
  double bandwidth_bps = 6'000'000.0;
  double rtt_s = 0.1;
  /// Timing jitter fraction applied to exported timelines; 0 = clean.
  double jitter = 0.0;

  /// Throws std::invalid_argument on bandwidth <= 0, rtt < 0, jitter outside [0,1).
  void validate() const;
};

enum class ConnState { Open, Closed };
enum class CloseMode { None, Fin, Rst };
enum class WindowState { Open, Zero };

struct Connection {
  ConnectionId id = 0;
  ConnState state = ConnState::Open;
  CloseMode close_mode = CloseMode::None;
  /// Bytes pending at the server (all queued chunks, ready or not).
  Bytes send_queue = 0;
  double send_rate_cap = kUnlimitedRate;
  Bytes recv_buffer_capacity = 0;
  Bytes recv_buffer_occupancy = 0;
  WindowState window_state = WindowState::Open;
  double probe_interval = 5.0;

  double opened_at = 0.0;
  /// Virtual time this connection has been advanced to.
  double clock = 0.0;
  Bytes enqueued_total = 0;
  Bytes delivered_total = 0;
  Bytes read_total = 0;
  Bytes discarded_at_close = 0;

  Bytes free_space() const { return recv_buffer_capacity - recv_buffer_occupancy; }
  bool blocked() const { return window_state == WindowState::Zero && send_queue > 0; }
};

/// Flow-controlled byte streams over one path. No loss, no congestion
/// control: delivery rate is min(server pacing, path bandwidth) gated by the
/// receiver's free buffer space.
///
/// Each connection keeps its own clock; read/enqueue/close act at that clock
/// and advance() moves it forward. Delivered bytes are reported as DATA
/// records coalesced per delivery quantum. A full receive buffer produces one
/// ZERO_WINDOW_AD, then a ZERO_WINDOW_PROBE/ZERO_WINDOW_AD pair every
/// probe_interval while the server still has data queued. Freeing space in a
/// zero window lets the sender resume one rtt later.
class Transport {
public:
  static constexpr double kDeliveryQuantum = 0.010;

  explicit Transport(PathSpec path);

  const PathSpec& path() const noexcept { return path_; }

  /// Emits OPEN and REQUEST records at `now`; the server can start sending at now + rtt.
  ConnectionId open(double now, Bytes recv_capacity, double probe_interval = 5.0);

  /// Appends server data. It becomes sendable `ready_delay` after the
  /// connection clock (use rtt for data answering a fresh request).
  Bytes enqueue_server_data(ConnectionId id, Bytes bytes, double rate_cap = kUnlimitedRate,
                            double ready_delay = 0.0);

  void set_rate_cap(ConnectionId id, double rate_cap);

  /// Emits a REQUEST record on an open connection (e.g. next DASH segment).
  PacketRecord request(ConnectionId id);

  /// Removes up to max_bytes from the receive buffer. Allowed on closed connections.
  Bytes read_client(ConnectionId id, Bytes max_bytes);

  /// Moves the connection clock forward by dt (> 0) and returns the records emitted.
  std::vector<PacketRecord> advance(ConnectionId id, double dt);

  /// Closes an open connection; discards undelivered server data.
  PacketRecord close(ConnectionId id, CloseMode mode);

  const Connection& connection(ConnectionId id) const;
  std::size_t connection_count() const noexcept { return connections_.size(); }

  /// All records emitted so far, in emission order.
  const PacketTimeline& timeline() const noexcept { return timeline_; }

private:
  struct Chunk {
    double ready_at;
    Bytes bytes;
  };
  struct Slot {
    Connection conn;
    std::deque<Chunk> chunks;
    double resume_at = 0.0;
    double next_probe_at = 0.0;
    double credit = 0.0;
  };

  Slot& slot(ConnectionId id);
  const Slot& slot(ConnectionId id) const;
  void step(Slot& s, double a, double b, std::vector<PacketRecord>& out);
  void emit(const PacketRecord& r, std::vector<PacketRecord>* out);

  PathSpec path_;
  std::vector<Slot> connections_;
  PacketTimeline timeline_;
};

}  // namespace mvs
