#include "mvs/session.hpp"

#include "mvs/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace mvs {

namespace {

constexpr double kMediaEps = 1e-9;
constexpr Bytes kNoLimit = std::numeric_limits<Bytes>::max() / 4;

}  // namespace

std::string_view to_string(TechniqueKind k) {
  switch (k) {
    case TechniqueKind::EncodingRate: return "ENCODING_RATE";
    case TechniqueKind::Throttle: return "THROTTLE";
    case TechniqueKind::OnOff: return "ON_OFF";
    case TechniqueKind::FastCaching: return "FAST_CACHING";
    case TechniqueKind::Dash: return "DASH";
  }
  return "?";
}

TechniqueKind parse_technique_kind(std::string_view s) {
  for (auto k : {TechniqueKind::EncodingRate, TechniqueKind::Throttle, TechniqueKind::OnOff,
                 TechniqueKind::FastCaching, TechniqueKind::Dash}) {
    if (to_string(k) == s) return k;
  }
  throw SpecError(fmt::format("unknown technique '{}'", s));
}

std::string_view to_string(ConnectionMode m) {
  return m == ConnectionMode::Persistent ? "PERSISTENT" : "PER_BURST";
}

ConnectionMode parse_connection_mode(std::string_view s) {
  if (s == "PERSISTENT") return ConnectionMode::Persistent;
  if (s == "PER_BURST") return ConnectionMode::PerBurst;
  throw SpecError(fmt::format("unknown connection mode '{}'", s));
}

std::string_view to_string(SessionPhase p) {
  switch (p) {
    case SessionPhase::FastStart: return "FAST_START";
    case SessionPhase::Steady: return "STEADY";
    case SessionPhase::Drained: return "DRAINED";
  }
  return "?";
}

void TechniqueSpec::validate() const {
  if (!(fast_start_s >= 0.0)) throw SpecError("fast_start_s must be >= 0");
  if (recv_buffer <= 0) throw SpecError("recv_buffer must be > 0");
  if (!(probe_interval_s > 0.0)) throw SpecError("probe_interval_s must be > 0");
  if (buffer_cap < 0) throw SpecError("buffer_cap must be >= 0");
  if (buffer_cap > 0 && (reopen_headroom <= 0 || reopen_headroom >= buffer_cap)) {
    throw SpecError("a buffer cap needs 0 < reopen_headroom < buffer_cap");
  }
  switch (kind) {
    case TechniqueKind::EncodingRate:
      if (!(fast_start_s > 0.0)) throw SpecError("ENCODING_RATE needs fast_start_s > 0");
      break;
    case TechniqueKind::Throttle:
      if (!(throttle_factor > 1.0)) throw SpecError("THROTTLE needs throttle_factor > 1");
      if (burst_size < 0) throw SpecError("burst_size must be >= 0");
      break;
    case TechniqueKind::OnOff:
      if (!(low_watermark_s >= 0.0 && low_watermark_s < high_watermark_s)) {
        throw SpecError("ON_OFF needs 0 <= low_watermark_s < high_watermark_s");
      }
      break;
    case TechniqueKind::FastCaching:
      break;
    case TechniqueKind::Dash:
      if (!(dash_target_buffer_s > 0.0)) throw SpecError("DASH needs dash_target_buffer_s > 0");
      if (!(dash_safety > 0.0 && dash_safety <= 1.0)) throw SpecError("DASH needs dash_safety in (0, 1]");
      if (buffer_cap > 0) throw SpecError("DASH does not support a byte buffer cap");
      break;
  }
}

double bursty_interval_s(Bytes burst_size, double throttle_factor, double avg_encoding_bps) {
  return static_cast<double>(burst_size) * 8.0 / (throttle_factor * avg_encoding_bps);
}

double harmonic_mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double inv = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) return 0.0;
    inv += 1.0 / v;
  }
  return static_cast<double>(values.size()) / inv;
}

std::size_t dash_pick_quality(const std::vector<QualityLevel>& ladder, double bw_estimate,
                              double safety) {
  if (ladder.empty()) throw SpecError("quality ladder is empty");
  std::optional<std::size_t> best;
  std::size_t lowest = 0;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i].bandwidth_bps < ladder[lowest].bandwidth_bps) lowest = i;
    if (ladder[i].bandwidth_bps <= safety * bw_estimate &&
        (!best || ladder[i].bandwidth_bps > ladder[*best].bandwidth_bps)) {
      best = i;
    }
  }
  return best.value_or(lowest);
}

// ---------------------------------------------------------------------------

StreamingSession::StreamingSession(VideoSpec video, TechniqueSpec technique, PathSpec path,
                                   SessionOptions options)
    : video_(std::move(video)),
      technique_(technique),
      path_(path),
      options_(options),
      transport_(path) {
  video_.validate();
  technique_.validate();
  if (!(options_.tick_s > 0.0)) throw SpecError("tick must be > 0");
  if (!(options_.watched_fraction > 0.0 && options_.watched_fraction <= 1.0)) {
    throw SpecError("watched_fraction must be in (0, 1]");
  }
  if (technique_.keyframe_waste && video_.keyframe_spacing <= 0) {
    throw SpecError("keyframe_waste needs a positive keyframe_spacing");
  }

  const double avg = video_.avg_encoding_bps();
  fast_start_bytes_ = static_cast<Bytes>(std::llround(technique_.fast_start_s * avg / 8.0));
  watch_end_media_ = options_.watched_fraction * video_.duration_s();

  if (technique_.kind == TechniqueKind::Dash) {
    if (video_.quality_ladder.empty()) throw SpecError("DASH needs a non-empty quality ladder");
    const double seg = video_.quality_ladder.front().segment_duration_s;
    segment_count_ = static_cast<std::size_t>(std::ceil(video_.duration_s() / seg - kMediaEps));
    reference_ = ContentMap(video_.encoding_schedule);
  } else {
    content_ = ContentMap(video_.encoding_schedule);
  }

  open_connection(0.0, 0);
  if (technique_.kind == TechniqueKind::Dash) {
    ClientDirectives ignored;
    dash_maybe_request(0.0, ignored);
  }
  check_invariants();
  record_sample(0.0);
}

Bytes StreamingSession::content_total() const {
  if (technique_.kind == TechniqueKind::Dash) return content_.total_bytes();
  return video_.total_size();
}

bool StreamingSession::all_content_read() const {
  if (technique_.kind == TechniqueKind::Dash) {
    return next_segment_ >= segment_count_ && !outstanding_;
  }
  return content_end() >= video_.total_size();
}

double StreamingSession::buffered_media_s() const {
  return std::max(0.0, content_.media_at_bytes(static_cast<double>(content_end())) - state_.playhead_s);
}

Bytes StreamingSession::socket_bytes() const {
  Bytes total = 0;
  for (std::size_t i = 0; i < transport_.connection_count(); ++i) {
    total += transport_.connection(static_cast<ConnectionId>(i)).recv_buffer_occupancy;
  }
  return total;
}

bool StreamingSession::startup_reached() const {
  if (all_content_read()) return true;
  if (technique_.kind == TechniqueKind::Dash) {
    return buffered_media_s() + kMediaEps >= technique_.fast_start_s;
  }
  return state_.playback_buffer_bytes >= fast_start_bytes_;
}

void StreamingSession::open_connection(double now, Bytes range_start) {
  const auto id = transport_.open(now, technique_.recv_buffer, technique_.probe_interval_s);
  active_ = id;
  ConnectionSummary summary;
  summary.id = id;
  summary.opened_at = now;
  state_.connections.push_back(summary);

  ServerConn sc;
  sc.id = id;
  sc.range_start = range_start;
  sc.remaining = technique_.kind == TechniqueKind::Dash ? 0 : video_.total_size() - range_start;
  server_conn_ = sc;
  pending_request_bytes_.clear();
}

void StreamingSession::close_active(CloseMode mode) {
  if (!active_) return;
  const auto id = *active_;
  if (transport_.connection(id).state == ConnState::Closed) return;
  transport_.close(id, mode);
  // residue left in the socket is thrown away with the connection
  const Bytes residue = transport_.read_client(id, kNoLimit);
  state_.received_total += residue;
  state_.wasted_total += residue;
  auto& summary = state_.connections.back();
  summary.closed_at = now_;
  summary.close_mode = mode;
  summary.bytes_delivered = transport_.connection(id).delivered_total;
  if (mode == CloseMode::Rst && technique_.keyframe_waste) {
    const Bytes end = content_end();
    pending_duplicate_ = end % video_.keyframe_spacing;
  }
  server_conn_.reset();
}

Bytes StreamingSession::read_into_buffer(Bytes max_bytes) {
  if (!active_ || max_bytes <= 0) return 0;
  const Bytes limit = max_bytes >= kNoLimit ? kNoLimit : max_bytes + pending_duplicate_;
  const Bytes n = transport_.read_client(*active_, limit);
  const Bytes dup = std::min(n, pending_duplicate_);
  pending_duplicate_ -= dup;
  state_.received_total += n;
  state_.wasted_total += dup;
  state_.playback_buffer_bytes += n - dup;
  return n;
}

Bytes StreamingSession::dash_segment_bytes(std::size_t segment, std::size_t quality) const {
  const double seg = video_.quality_ladder.front().segment_duration_s;
  const double start = static_cast<double>(segment) * seg;
  const double end = std::min(video_.duration_s(), start + seg);
  const double base_bytes = reference_.bytes_at_media(end) - reference_.bytes_at_media(start);
  const double scale = video_.quality_ladder[quality].bandwidth_bps / video_.avg_encoding_bps();
  return std::max<Bytes>(1, static_cast<Bytes>(std::llround(base_bytes * scale)));
}

void StreamingSession::dash_maybe_request(double now, ClientDirectives& out) {
  if (outstanding_ || next_segment_ >= segment_count_) return;
  if (!active_ || transport_.connection(*active_).state == ConnState::Closed) return;
  if (buffered_media_s() >= technique_.dash_target_buffer_s) return;

  std::vector<double> recent = throughput_history_;
  if (recent.size() > 3) recent.erase(recent.begin(), recent.end() - 3);
  const double estimate = harmonic_mean(recent);
  const std::size_t q = dash_pick_quality(video_.quality_ladder, estimate, technique_.dash_safety);

  const bool upswitch = !dash_qualities_.empty() &&
                        video_.quality_ladder[q].bandwidth_bps >
                            video_.quality_ladder[state_.current_quality].bandwidth_bps;
  if (technique_.dash_refetch_on_upswitch && upswitch && content_.chunk_count() > 0) {
    const std::size_t playing = content_.chunk_index_at_media(state_.playhead_s);
    if (playing + 1 < content_.chunk_count()) {
      const Bytes keep = content_.chunk_end_bytes(playing);
      const Bytes dropped = std::max<Bytes>(0, content_end() - keep);
      state_.playback_buffer_bytes -= dropped;
      state_.wasted_total += dropped;
      content_.truncate(playing + 1);
      segment_end_offsets_.resize(playing + 1);
      dash_qualities_.resize(playing + 1);
      next_segment_ = playing + 1;
    }
  }

  const double seg = video_.quality_ladder.front().segment_duration_s;
  const double media = std::min(seg, video_.duration_s() - static_cast<double>(next_segment_) * seg);
  const Bytes bytes = dash_segment_bytes(next_segment_, q);
  content_.append(media, bytes);
  segment_end_offsets_.push_back(content_.total_bytes());
  outstanding_ = DashRequest{next_segment_, bytes, content_.total_bytes(), now};
  // the first segment rides on the REQUEST emitted when the connection opened
  if (!dash_qualities_.empty() || next_segment_ > 0) transport_.request(*active_);
  pending_request_bytes_.push_back(bytes);
  dash_qualities_.push_back(q);
  state_.current_quality = q;
  ++next_segment_;
  out.requested_segment = true;
}

std::vector<ServerDirective> StreamingSession::server_step(double now) {
  std::vector<ServerDirective> out;
  if (!server_conn_ || finished_) return out;
  auto& sc = *server_conn_;
  const auto& conn = transport_.connection(sc.id);
  if (conn.state == ConnState::Closed) return out;

  auto send = [&](Bytes bytes, double cap, double ready_delay) {
    transport_.enqueue_server_data(sc.id, bytes, cap, ready_delay);
    out.push_back({sc.id, bytes, cap, ready_delay});
  };

  switch (technique_.kind) {
    case TechniqueKind::Dash:
      for (Bytes b : pending_request_bytes_) {
        // the first request arrives with the connection; later ones cost an rtt
        const bool first = conn.enqueued_total == 0;
        send(b, kUnlimitedRate, first ? 0.0 : path_.rtt_s);
      }
      pending_request_bytes_.clear();
      break;

    case TechniqueKind::EncodingRate:
    case TechniqueKind::OnOff:
    case TechniqueKind::FastCaching:
      if (sc.remaining > 0) {
        send(sc.remaining, kUnlimitedRate, 0.0);
        sc.remaining = 0;
      }
      break;

    case TechniqueKind::Throttle: {
      const double cap = technique_.throttle_factor * video_.avg_encoding_bps();
      if (!sc.fast_start_done && conn.enqueued_total == 0) {
        const Bytes n = std::min(fast_start_bytes_, sc.remaining);
        if (n > 0) {
          send(n, kUnlimitedRate, 0.0);
          sc.remaining -= n;
        }
      }
      if (!sc.fast_start_done && conn.send_queue == 0) {
        sc.fast_start_done = true;
        sc.throttling = true;
        sc.next_release = now;
        if (technique_.burst_size == 0 && sc.remaining > 0) {
          send(sc.remaining, cap, 0.0);
          sc.remaining = 0;
        }
      }
      if (sc.throttling && technique_.burst_size > 0) {
        const double interval =
            bursty_interval_s(technique_.burst_size, technique_.throttle_factor, video_.avg_encoding_bps());
        while (sc.remaining > 0 && now + kMediaEps >= sc.next_release) {
          const Bytes n = std::min(technique_.burst_size, sc.remaining);
          send(n, kUnlimitedRate, 0.0);
          sc.remaining -= n;
          sc.next_release += interval;
        }
      }
      break;
    }
  }
  return out;
}

ClientDirectives StreamingSession::client_step(double now) {
  ClientDirectives out;
  if (finished_) return out;
  const Bytes wasted_before = state_.wasted_total;
  const bool conn_open = active_ && transport_.connection(*active_).state == ConnState::Open;
  const Bytes cap = technique_.buffer_cap;

  Bytes want = kNoLimit;
  switch (technique_.kind) {
    case TechniqueKind::EncodingRate:
      want = std::max<Bytes>(0, fast_start_bytes_ - state_.playback_buffer_bytes);
      break;
    case TechniqueKind::Throttle:
    case TechniqueKind::FastCaching:
    case TechniqueKind::Dash:
      break;
    case TechniqueKind::OnOff:
      if (reading_) {
        const double goal = content_.bytes_at_media(state_.playhead_s + technique_.high_watermark_s);
        want = std::max<Bytes>(0, static_cast<Bytes>(std::ceil(goal)) - content_end());
      } else {
        want = 0;
      }
      break;
  }
  if (cap > 0) want = std::min(want, std::max<Bytes>(0, cap - state_.playback_buffer_bytes));
  out.read = read_into_buffer(want);

  // DASH segment bookkeeping
  if (technique_.kind == TechniqueKind::Dash && outstanding_ && content_end() >= outstanding_->end_offset) {
    const double elapsed = std::max(now - outstanding_->requested_at, options_.tick_s);
    throughput_history_.push_back(static_cast<double>(outstanding_->bytes) * 8.0 / elapsed);
    outstanding_.reset();
  }

  const bool more_content = !all_content_read();

  // buffer cap: close when full, reconnect once headroom is free
  if (cap > 0 && more_content) {
    if (conn_open && state_.playback_buffer_bytes >= cap) {
      close_active(CloseMode::Rst);
      out.closed = state_.connections.back().id;
    }
    const bool open_now = active_ && transport_.connection(*active_).state == ConnState::Open;
    const bool on_off_waiting = technique_.kind == TechniqueKind::OnOff && !reading_;
    if (!open_now && !on_off_waiting && cap - state_.playback_buffer_bytes >= technique_.reopen_headroom) {
      open_connection(now, content_end() - pending_duplicate_);
      out.opened = active_;
    }
  }

  if (technique_.kind == TechniqueKind::OnOff) {
    const double buffered = buffered_media_s();
    if (reading_ && buffered + kMediaEps >= technique_.high_watermark_s) {
      reading_ = false;
      if (technique_.connection_mode == ConnectionMode::PerBurst && more_content &&
          active_ && transport_.connection(*active_).state == ConnState::Open) {
        close_active(CloseMode::Rst);
        out.closed = state_.connections.back().id;
      }
    } else if (!reading_ && buffered <= technique_.low_watermark_s + kMediaEps && more_content) {
      reading_ = true;
      const bool open_now = active_ && transport_.connection(*active_).state == ConnState::Open;
      if (!open_now) {
        open_connection(now, content_end() - pending_duplicate_);
        out.opened = active_;
      }
      // the buffered socket data is available right away
      const double goal = content_.bytes_at_media(state_.playhead_s + technique_.high_watermark_s);
      Bytes more = std::max<Bytes>(0, static_cast<Bytes>(std::ceil(goal)) - content_end());
      if (cap > 0) more = std::min(more, std::max<Bytes>(0, cap - state_.playback_buffer_bytes));
      out.read += read_into_buffer(more);
    }
  }

  if (technique_.kind == TechniqueKind::Dash) dash_maybe_request(now, out);

  // orderly close once everything has been read
  if (active_ && transport_.connection(*active_).state == ConnState::Open && all_content_read() &&
      transport_.connection(*active_).send_queue == 0 &&
      transport_.connection(*active_).recv_buffer_occupancy == 0) {
    close_active(CloseMode::Fin);
    out.closed = state_.connections.back().id;
  }

  if (state_.phase == SessionPhase::FastStart && startup_reached()) {
    state_.phase = SessionPhase::Steady;
    state_.playback_started_at = now;
  }
  out.wasted = state_.wasted_total - wasted_before;
  return out;
}

PlaybackResult StreamingSession::playback_tick(double dt) {
  PlaybackResult result;
  if (state_.phase != SessionPhase::Steady || !(dt > 0.0)) return result;

  const double start = state_.playhead_s;
  double target = std::min(start + dt, watch_end_media_);
  double new_playhead = target;
  Bytes need;
  if (target >= content_.total_media()) {
    new_playhead = std::min(target, content_.total_media());
    need = content_.total_bytes();
  } else {
    need = static_cast<Bytes>(std::floor(content_.bytes_at_media(target) + 1e-6));
  }
  if (need > content_end()) {
    need = content_end();
    new_playhead = std::clamp(content_.media_at_bytes(static_cast<double>(need)), start, target);
  }
  need = std::max(need, state_.consumed_total);

  result.consumed = need - state_.consumed_total;
  result.advanced_s = new_playhead - start;
  result.stalled_s = std::max(0.0, dt - result.advanced_s);
  if (watch_end_media_ - start < dt && new_playhead >= watch_end_media_ - kMediaEps) {
    result.stalled_s = 0.0;  // the final partial tick is not a stall
  }

  state_.consumed_total = need;
  state_.playback_buffer_bytes -= result.consumed;
  state_.playhead_s = new_playhead;

  if (result.stalled_s > kMediaEps) {
    const double tick_start = now_ - dt;
    const double stall_start = tick_start + result.advanced_s;
    if (!state_.stalls.empty() && std::abs(state_.stalls.back().end - stall_start) < 1e-6) {
      state_.stalls.back().end = now_;
    } else {
      state_.stalls.push_back({stall_start, now_});
    }
  }
  if (state_.playhead_s >= watch_end_media_ - kMediaEps) state_.phase = SessionPhase::Drained;
  return result;
}

bool StreamingSession::tick(double now) {
  if (finished_) return false;
  const double dt = now - now_;
  if (!(dt > 0.0)) throw std::invalid_argument("tick time must move forward");

  Bytes delivered = 0;
  for (std::size_t i = 0; i < transport_.connection_count(); ++i) {
    const auto id = static_cast<ConnectionId>(i);
    const auto& c = transport_.connection(id);
    if (now > c.clock) transport_.advance(id, now - c.clock);
    delivered += transport_.connection(id).delivered_total;
  }
  now_ = now;

  const double playhead_before = state_.playhead_s;
  playback_tick(dt);
  client_step(now);
  server_step(now);
  check_invariants();
  record_sample(now);

  if (delivered != last_delivered_ || state_.playhead_s > playhead_before) {
    last_delivered_ = delivered;
    last_progress_ = now;
  }
  if (state_.phase == SessionPhase::Drained) {
    finish(now);
    return false;
  }
  if (now - last_progress_ > options_.deadlock_timeout_s) {
    throw SimulationDeadlock(fmt::format(
        "no delivery or playback progress for {:.1f}s at t={:.2f}s (playhead {:.2f}s, buffer {} B)",
        now - last_progress_, now, state_.playhead_s, state_.playback_buffer_bytes));
  }
  return true;
}

void StreamingSession::check_invariants() {
  ++invariant_checks_;
  const auto& s = state_;
  if (s.received_total != s.consumed_total + s.playback_buffer_bytes + s.wasted_total) {
    throw InvariantViolation(fmt::format(
        "conservation broken at t={}: received {} != consumed {} + buffer {} + wasted {}", now_,
        s.received_total, s.consumed_total, s.playback_buffer_bytes, s.wasted_total));
  }
  if (s.playback_buffer_bytes < 0) {
    throw InvariantViolation(fmt::format("negative playback buffer at t={}", now_));
  }
  if (technique_.buffer_cap > 0 && s.playback_buffer_bytes > technique_.buffer_cap) {
    throw InvariantViolation(fmt::format("buffer cap exceeded at t={}", now_));
  }
  for (std::size_t i = 0; i < transport_.connection_count(); ++i) {
    const auto& c = transport_.connection(static_cast<ConnectionId>(i));
    if (c.recv_buffer_occupancy > c.recv_buffer_capacity || c.recv_buffer_occupancy < 0) {
      throw InvariantViolation(fmt::format("receive buffer out of range on connection {}", c.id));
    }
  }
}

void StreamingSession::record_sample(double now) {
  if (now + kMediaEps < next_sample_) return;
  samples_.push_back({now, state_.playback_buffer_bytes, socket_bytes(), buffered_media_s()});
  next_sample_ = now + options_.sample_interval_s;
}

void StreamingSession::finish(double now) {
  finished_ = true;
  state_.phase = SessionPhase::Drained;
  samples_.push_back({now, state_.playback_buffer_bytes, socket_bytes(), buffered_media_s()});
  // abandoned content: whatever is still buffered or sitting in sockets
  for (std::size_t i = 0; i < transport_.connection_count(); ++i) {
    const Bytes residue = transport_.read_client(static_cast<ConnectionId>(i), kNoLimit);
    state_.received_total += residue;
    state_.wasted_total += residue;
  }
  state_.wasted_total += state_.playback_buffer_bytes;
  state_.playback_buffer_bytes = 0;
  for (auto& summary : state_.connections) {
    summary.bytes_delivered = transport_.connection(summary.id).delivered_total;
  }
  check_invariants();
}

SessionMetrics StreamingSession::metrics() const {
  if (!finished_) throw std::logic_error("session metrics requested before the session finished");
  SessionMetrics m;
  m.total_size = technique_.kind == TechniqueKind::Dash ? content_.total_bytes() : video_.total_size();
  m.received_total = state_.received_total;
  m.consumed_total = state_.consumed_total;
  m.wasted_total = state_.wasted_total;
  m.buffer_at_end = samples_.empty() ? 0 : samples_.back().playback_bytes;
  m.stall_count = state_.stalls.size();
  for (const auto& s : state_.stalls) m.stall_duration_s += s.end - s.start;
  m.playback_started_at = state_.playback_started_at.value_or(now_);
  m.end_time = now_;
  m.watched_media_s = state_.playhead_s;
  m.connections = state_.connections;
  m.buffer_series = samples_;
  m.dash_qualities = dash_qualities_;
  m.invariant_checks = invariant_checks_;
  return m;
}

PacketTimeline StreamingSession::timeline() const {
  PacketTimeline t = transport_.timeline();
  sort_by_time(t);
  if (path_.jitter > 0.0) t = apply_jitter(std::move(t), path_.jitter, options_.seed);
  return t;
}

SessionRun simulate_session(const VideoSpec& video, const TechniqueSpec& technique,
                            const PathSpec& path, const SessionOptions& options) {
  StreamingSession session(video, technique, path, options);
  SimKernel kernel;
  std::uint64_t tick_index = 0;
  std::function<void()> on_tick = [&] {
    if (session.tick(kernel.now())) {
      ++tick_index;
      kernel.schedule(static_cast<double>(tick_index + 1) * options.tick_s, on_tick);
    }
  };
  kernel.schedule(options.tick_s, on_tick);
  kernel.run_all();

  SessionRun run;
  run.metrics = session.metrics();
  run.timeline = session.timeline();
  run.end_time = run.metrics.end_time;
  return run;
}

}  // namespace mvs
