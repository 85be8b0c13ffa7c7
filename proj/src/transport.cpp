#include "mvs/transport.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace mvs {

void PathSpec::validate() const {
  if (!(bandwidth_bps > 0.0)) throw std::invalid_argument("path bandwidth must be > 0");
  if (!(rtt_s >= 0.0)) throw std::invalid_argument("path rtt must be >= 0");
  if (!(jitter >= 0.0 && jitter < 1.0)) throw std::invalid_argument("path jitter must be in [0, 1)");
}

Transport::Transport(PathSpec path) : path_(path) { path_.validate(); }

Transport::Slot& Transport::slot(ConnectionId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= connections_.size()) {
    throw TransportError(fmt::format("unknown connection {}", id));
  }
  return connections_[static_cast<std::size_t>(id)];
}

const Transport::Slot& Transport::slot(ConnectionId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= connections_.size()) {
    throw TransportError(fmt::format("unknown connection {}", id));
  }
  return connections_[static_cast<std::size_t>(id)];
}

const Connection& Transport::connection(ConnectionId id) const { return slot(id).conn; }

void Transport::emit(const PacketRecord& r, std::vector<PacketRecord>* out) {
  timeline_.push_back(r);
  if (out) out->push_back(r);
}

ConnectionId Transport::open(double now, Bytes recv_capacity, double probe_interval) {
  if (recv_capacity <= 0) throw TransportError("receive buffer capacity must be > 0");
  if (!(probe_interval > 0.0)) throw TransportError("probe interval must be > 0");
  Slot s;
  s.conn.id = static_cast<ConnectionId>(connections_.size());
  s.conn.recv_buffer_capacity = recv_capacity;
  s.conn.probe_interval = probe_interval;
  s.conn.opened_at = now;
  s.conn.clock = now;
  s.resume_at = now + path_.rtt_s;
  connections_.push_back(std::move(s));
  const auto id = connections_.back().conn.id;
  emit({now, Direction::Up, 0, PacketKind::Open, id}, nullptr);
  emit({now, Direction::Up, 0, PacketKind::Request, id}, nullptr);
  return id;
}

Bytes Transport::enqueue_server_data(ConnectionId id, Bytes bytes, double rate_cap,
                                     double ready_delay) {
  auto& s = slot(id);
  if (s.conn.state == ConnState::Closed) {
    throw TransportError(fmt::format("enqueue on closed connection {}", id));
  }
  if (bytes < 0) throw TransportError("cannot enqueue a negative byte count");
  if (!(rate_cap > 0.0)) throw TransportError("rate cap must be > 0");
  s.conn.send_rate_cap = rate_cap;
  if (bytes == 0) return 0;
  s.chunks.push_back({s.conn.clock + std::max(0.0, ready_delay), bytes});
  s.conn.send_queue += bytes;
  s.conn.enqueued_total += bytes;
  return bytes;
}

void Transport::set_rate_cap(ConnectionId id, double rate_cap) {
  auto& s = slot(id);
  if (!(rate_cap > 0.0)) throw TransportError("rate cap must be > 0");
  s.conn.send_rate_cap = rate_cap;
}

PacketRecord Transport::request(ConnectionId id) {
  auto& s = slot(id);
  if (s.conn.state == ConnState::Closed) {
    throw TransportError(fmt::format("request on closed connection {}", id));
  }
  PacketRecord r{s.conn.clock, Direction::Up, 0, PacketKind::Request, id};
  emit(r, nullptr);
  return r;
}

Bytes Transport::read_client(ConnectionId id, Bytes max_bytes) {
  auto& s = slot(id);
  const Bytes n = std::clamp<Bytes>(max_bytes, 0, s.conn.recv_buffer_occupancy);
  if (n == 0) return 0;
  s.conn.recv_buffer_occupancy -= n;
  s.conn.read_total += n;
  if (s.conn.window_state == WindowState::Zero) {
    s.conn.window_state = WindowState::Open;
    s.resume_at = std::max(s.resume_at, s.conn.clock + path_.rtt_s);
  }
  return n;
}

std::vector<PacketRecord> Transport::advance(ConnectionId id, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("advance requires dt > 0");
  auto& s = slot(id);
  std::vector<PacketRecord> out;
  const double end = s.conn.clock + dt;
  if (s.conn.state == ConnState::Closed) {
    s.conn.clock = end;
    return out;
  }
  double a = s.conn.clock;
  while (a < end) {
    const double b = std::min(end, a + kDeliveryQuantum);
    step(s, a, b, out);
    a = b;
  }
  s.conn.clock = end;
  return out;
}

void Transport::step(Slot& s, double a, double b, std::vector<PacketRecord>& out) {
  auto& c = s.conn;
  if (c.window_state == WindowState::Zero) {
    if (c.send_queue <= 0) return;
    while (s.next_probe_at <= b) {
      emit({s.next_probe_at, Direction::Down, 0, PacketKind::ZeroWindowProbe, c.id}, &out);
      emit({s.next_probe_at, Direction::Up, 0, PacketKind::ZeroWindowAd, c.id}, &out);
      s.next_probe_at += c.probe_interval;
    }
    return;
  }

  const double rate = std::min(c.send_rate_cap, path_.bandwidth_bps);
  const double bytes_per_s = rate / 8.0;
  double cursor = a;
  Bytes moved = 0;
  double last_arrival = a;

  while (cursor < b && !s.chunks.empty() && c.free_space() > 0) {
    auto& chunk = s.chunks.front();
    const double start = std::max({cursor, s.resume_at, chunk.ready_at});
    if (start >= b) break;
    const double budget = s.credit + bytes_per_s * (b - start);
    const auto whole = static_cast<Bytes>(std::floor(budget));
    const Bytes n = std::min({whole, chunk.bytes, c.free_space()});
    if (n <= 0) {
      s.credit = budget;
      break;
    }
    double arrival;
    if (n == whole) {
      // pacing-limited: the pipe is busy for the whole sub-interval
      s.credit = budget - static_cast<double>(n);
      arrival = b;
    } else {
      arrival = start + std::max(0.0, static_cast<double>(n) - s.credit) / bytes_per_s;
      arrival = std::min(arrival, b);
      s.credit = 0.0;
    }
    chunk.bytes -= n;
    if (chunk.bytes == 0) s.chunks.pop_front();
    c.send_queue -= n;
    c.recv_buffer_occupancy += n;
    c.delivered_total += n;
    moved += n;
    last_arrival = arrival;
    cursor = arrival;
    if (n == whole) break;
  }

  if (moved > 0) {
    emit({last_arrival, Direction::Down, moved, PacketKind::Data, c.id}, &out);
  }
  if (s.chunks.empty()) s.credit = 0.0;
  if (c.free_space() == 0 && moved > 0) {
    c.window_state = WindowState::Zero;
    s.credit = 0.0;
    emit({last_arrival, Direction::Up, 0, PacketKind::ZeroWindowAd, c.id}, &out);
    s.next_probe_at = last_arrival + c.probe_interval;
  }
}

PacketRecord Transport::close(ConnectionId id, CloseMode mode) {
  auto& s = slot(id);
  if (s.conn.state == ConnState::Closed) {
    throw TransportError(fmt::format("connection {} is already closed", id));
  }
  if (mode == CloseMode::None) throw TransportError("close requires FIN or RST");
  s.conn.state = ConnState::Closed;
  s.conn.close_mode = mode;
  s.conn.discarded_at_close = s.conn.send_queue;
  s.conn.send_queue = 0;
  s.chunks.clear();
  PacketRecord r{s.conn.clock, Direction::Up, 0,
                 mode == CloseMode::Fin ? PacketKind::CloseFin : PacketKind::CloseRst, id};
  emit(r, nullptr);
  return r;
}

}  // namespace mvs
