#pragma once

#include "mvs/timeline.hpp"
#include "mvs/transport.hpp"
#include "mvs/video.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace mvs {

enum class TechniqueKind { EncodingRate, Throttle, OnOff, FastCaching, Dash };
enum class ConnectionMode { Persistent, PerBurst };

std::string_view to_string(TechniqueKind k);
TechniqueKind parse_technique_kind(std::string_view s);
std::string_view to_string(ConnectionMode m);
ConnectionMode parse_connection_mode(std::string_view s);

/// Raised for inconsistent technique/session parameters.
class SpecError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a session can never make progress again.
class SimulationDeadlock : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when an accounting invariant breaks mid-run (a simulator bug).
class InvariantViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

struct TechniqueSpec {
  TechniqueKind kind = TechniqueKind::FastCaching;
  /// Media seconds buffered at full speed before playback starts. The server
  /// grants the same allowance at unlimited pacing on every new connection.
  double fast_start_s = 0.0;

  // THROTTLE
  double throttle_factor = 0.0;
  /// 0 = smooth pacing at factor x encoding rate; otherwise periodic bursts.
  Bytes burst_size = 0;

  // ON_OFF
  ConnectionMode connection_mode = ConnectionMode::Persistent;
  double low_watermark_s = 0.0;
  double high_watermark_s = 0.0;

  /// Player buffer cap in bytes (0 = none). When reached the player closes
  /// the connection with RST and reconnects once reopen_headroom bytes are free.
  Bytes buffer_cap = 0;
  Bytes reopen_headroom = 0;
  /// Reconnects restart at the beginning of the partially received key frame.
  bool keyframe_waste = false;

  // DASH
  double dash_target_buffer_s = 0.0;
  double dash_safety = 1.0;
  /// On an up-switch, discard buffered future segments and fetch them again
  /// at the new quality; discarded bytes count as waste.
  bool dash_refetch_on_upswitch = false;

  // socket
  Bytes recv_buffer = 256 * 1024;
  double probe_interval_s = 5.0;

  void validate() const;
};

/// Burst spacing that makes periodic bursts average throttle_factor x rate.
double bursty_interval_s(Bytes burst_size, double throttle_factor, double avg_encoding_bps);

/// Harmonic mean; 0 for an empty input.
double harmonic_mean(const std::vector<double>& values);

/// Highest level with bandwidth <= safety * bw_estimate, else the lowest level.
std::size_t dash_pick_quality(const std::vector<QualityLevel>& ladder, double bw_estimate,
                              double safety);

enum class SessionPhase { FastStart, Steady, Drained };
std::string_view to_string(SessionPhase p);

struct ConnectionSummary {
  ConnectionId id = 0;
  double opened_at = 0.0;
  std::optional<double> closed_at;
  CloseMode close_mode = CloseMode::None;
  Bytes bytes_delivered = 0;
};

struct Stall {
  double start = 0.0;
  double end = 0.0;
};

struct BufferSample {
  double time = 0.0;
  Bytes playback_bytes = 0;   // read by the player, not yet consumed
  Bytes socket_bytes = 0;     // delivered, still in TCP receive buffers
  double media_s = 0.0;       // playback buffer in media seconds

  Bytes client_held() const { return playback_bytes + socket_bytes; }
};

struct SessionState {
  SessionPhase phase = SessionPhase::FastStart;
  double playhead_s = 0.0;
  std::optional<double> playback_started_at;
  Bytes playback_buffer_bytes = 0;
  Bytes received_total = 0;
  Bytes consumed_total = 0;
  Bytes wasted_total = 0;
  std::vector<Stall> stalls;
  std::size_t current_quality = 0;
  std::vector<ConnectionSummary> connections;
};

struct SessionOptions {
  double tick_s = 0.010;
  double watched_fraction = 1.0;
  double sample_interval_s = 0.1;
  /// No delivery and no playback progress for this long => deadlock.
  double deadlock_timeout_s = 600.0;
  std::uint64_t seed = 1;
};

/// What server_step did on the wire.
struct ServerDirective {
  ConnectionId conn = -1;
  Bytes enqueued = 0;
  double rate_cap = kUnlimitedRate;
  double ready_delay = 0.0;
};

/// What client_step did.
struct ClientDirectives {
  Bytes read = 0;
  Bytes wasted = 0;
  std::optional<ConnectionId> opened;
  std::optional<ConnectionId> closed;
  bool requested_segment = false;
};

struct PlaybackResult {
  Bytes consumed = 0;
  double advanced_s = 0.0;
  double stalled_s = 0.0;
};

struct SessionMetrics {
  Bytes total_size = 0;
  Bytes received_total = 0;
  Bytes consumed_total = 0;
  Bytes wasted_total = 0;
  Bytes buffer_at_end = 0;
  std::size_t stall_count = 0;
  double stall_duration_s = 0.0;
  double playback_started_at = 0.0;
  double end_time = 0.0;
  double watched_media_s = 0.0;
  std::vector<ConnectionSummary> connections;
  std::vector<BufferSample> buffer_series;
  std::vector<std::size_t> dash_qualities;
  std::uint64_t invariant_checks = 0;

  double overhead_ratio() const {
    return total_size > 0 ? static_cast<double>(received_total) / static_cast<double>(total_size) : 0.0;
  }
};

/// One streaming session: a server pacing policy, a client read policy, the
/// transport between them and the playback process.
///
/// The session is advanced in fixed ticks. Each tick moves the transport to
/// the tick instant, plays back, runs the client policy and then the server
/// policy, and re-checks the byte conservation identity
///   received = consumed + playback buffer + wasted.
class StreamingSession {
public:
  /// start_session: validates inputs and opens the first connection at t=0.
  StreamingSession(VideoSpec video, TechniqueSpec technique, PathSpec path,
                   SessionOptions options = {});

  std::vector<ServerDirective> server_step(double now);
  ClientDirectives client_step(double now);
  PlaybackResult playback_tick(double dt);

  /// Full tick ending at `now`; returns false once the session has finished.
  bool tick(double now);

  bool finished() const noexcept { return finished_; }
  const SessionState& state() const noexcept { return state_; }
  const Transport& transport() const noexcept { return transport_; }
  const VideoSpec& video() const noexcept { return video_; }
  const TechniqueSpec& technique() const noexcept { return technique_; }
  const SessionOptions& options() const noexcept { return options_; }

  Bytes fast_start_target_bytes() const noexcept { return fast_start_bytes_; }
  double buffered_media_s() const;
  Bytes socket_bytes() const;
  double watch_end_media_s() const noexcept { return watch_end_media_; }

  /// Requires a finished session.
  SessionMetrics metrics() const;

  /// Time-sorted packet timeline; jittered when the path requests it.
  PacketTimeline timeline() const;

private:
  struct ServerConn {
    ConnectionId id = -1;
    Bytes range_start = 0;
    Bytes remaining = 0;       // content not yet handed to the transport
    bool fast_start_done = false;
    bool throttling = false;
    double next_release = 0.0;
  };
  struct DashRequest {
    std::size_t segment = 0;
    Bytes bytes = 0;
    Bytes end_offset = 0;
    double requested_at = 0.0;
  };

  void open_connection(double now, Bytes range_start);
  void close_active(CloseMode mode);
  Bytes read_into_buffer(Bytes max_bytes);
  Bytes content_end() const noexcept { return state_.consumed_total + state_.playback_buffer_bytes; }
  Bytes content_total() const;
  bool all_content_read() const;
  bool startup_reached() const;
  void dash_maybe_request(double now, ClientDirectives& out);
  Bytes dash_segment_bytes(std::size_t segment, std::size_t quality) const;
  void check_invariants();
  void record_sample(double now);
  void finish(double now);

  VideoSpec video_;
  TechniqueSpec technique_;
  PathSpec path_;
  SessionOptions options_;
  Transport transport_;
  ContentMap content_;
  SessionState state_;

  Bytes fast_start_bytes_ = 0;
  double watch_end_media_ = 0.0;
  std::optional<ConnectionId> active_;
  std::optional<ServerConn> server_conn_;
  std::vector<Bytes> pending_request_bytes_;
  Bytes pending_duplicate_ = 0;
  bool reading_ = true;

  // DASH
  ContentMap reference_;  // reference rendition, per second
  std::size_t segment_count_ = 0;
  std::size_t next_segment_ = 0;
  std::optional<DashRequest> outstanding_;
  std::vector<double> throughput_history_;
  std::vector<std::size_t> dash_qualities_;
  std::vector<Bytes> segment_end_offsets_;

  double now_ = 0.0;
  double last_progress_ = 0.0;
  Bytes last_delivered_ = 0;
  double next_sample_ = 0.0;
  std::vector<BufferSample> samples_;
  std::uint64_t invariant_checks_ = 0;
  bool finished_ = false;
};

struct SessionRun {
  SessionMetrics metrics;
  PacketTimeline timeline;
  double end_time = 0.0;
};

/// Drives a session to completion on a SimKernel with one tick event per tick_s.
SessionRun simulate_session(const VideoSpec& video, const TechniqueSpec& technique,
                            const PathSpec& path, const SessionOptions& options = {});

}  // namespace mvs
