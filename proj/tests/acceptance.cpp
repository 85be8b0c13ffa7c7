// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "mvs/analysis.hpp"
#include "mvs/harness.hpp"
#include "mvs/radio.hpp"
#include "mvs/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

using namespace mvs;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Scenario bundled(const std::string& name) { return load_scenario_file(bundled_scenario_dir() / (name + ".scn")); }

double last_packet_time(const PacketTimeline& t) {
  double last = 0.0;
  for (const auto& r : t) last = std::max(last, r.time);
  return last;
}

double last_data_time(const PacketTimeline& t) {
  double last = 0.0;
  for (const auto& r : t) {
    if (r.kind == PacketKind::Data) last = std::max(last, r.time);
  }
  return last;
}

constexpr double kExact = 1e-9;

// 1. single packet, T1 = 8, T2 = 3
Outcome rrc_ladder() {
  const PacketTimeline t = {{0.0, Direction::Down, 1448, PacketKind::Data, 0}};
  const auto r = rrc_drive(t, RrcParams{}, 0.0, 100.0);
  const bool ok = r.size() == 3 && r[0].state == RadioState::Dch && r[0].start == 0.0 && r[0].end == 8.0 &&
                  r[1].state == RadioState::Fach && r[1].start == 8.0 && r[1].end == 11.0 &&
                  r[2].state == RadioState::Pch && r[2].start == 11.0 && r[2].end == 100.0;
  std::string segs;
  for (const auto& s : r) segs += fmt::format("{} [{:g},{:g}) ", to_string(s.state), s.start, s.end);
  return {ok, segs};
}

// 2. 5 s probes hold DCH; 9 s probes let the radio drop to FACH
Outcome probes_hold_dch() {
  auto s = bundled("youtube-nexus-s-app-3g-on-off");
  const auto five = run_scenario(s);
  const double end5 = last_packet_time(five.session.timeline);
  const double dch5 = dwell_within(five.radio, RadioState::Dch, 0.0, end5);

  s.technique.probe_interval_s = 9.0;
  const auto nine = run_scenario(s);
  const double end9 = last_packet_time(nine.session.timeline);
  const double fach9 = dwell_within(nine.radio, RadioState::Fach, 0.0, end9);
  const bool ok = std::abs(dch5 - end5) <= kExact && fach9 > 0.0;
  return {ok, fmt::format("5 s probes: DCH {:.3f} of {:.3f} s; 9 s probes: FACH {:.3f} s", dch5, end5, fach9)};
}

// 3. per-burst / persistent streaming current
Outcome per_burst_saves_half() {
  const auto persistent = run_scenario(bundled("youtube-nexus-s-app-3g-on-off"));
  const auto per_burst = run_scenario(bundled("youtube-galaxy-s3-app-3g-on-off"));
  const double ratio = per_burst.energy.avg_streaming_current_ma / persistent.energy.avg_streaming_current_ma;
  return {ratio <= 0.5, fmt::format("{:.2f} / {:.2f} mA = {:.3f}", per_burst.energy.avg_streaming_current_ma,
                                    persistent.energy.avg_streaming_current_ma, ratio)};
}

// 4. the same bursty trace sleeps on Wi-Fi and stays in DCH on 3G
Outcome bursty_interface_asymmetry() {
  const auto wifi = bundled("youtube-nexus-s-browser-wifi-throttle");
  const double spacing =
      bursty_interval_s(wifi.technique.burst_size, wifi.technique.throttle_factor, wifi.video.avg_encoding_bps());
  const auto run = run_scenario(wifi);
  const auto& trace = run.session.timeline;
  const double from = fast_start_exclusion(trace);
  const double to = last_data_time(trace);
  const double sleep = dwell_within(run.radio, RadioState::WifiSleep, from, to);
  const double sleep_share = sleep / (to - from);

  auto rrc = bundled("youtube-nexus-s-browser-3g-throttle");
  const auto radio_3g = drive_radio(rrc, trace, 0.0, run.session.end_time);
  const double dch = dwell_within(radio_3g, RadioState::Dch, from, to);
  const bool ok = sleep_share >= 0.70 && std::abs(dch - (to - from)) <= kExact;
  return {ok, fmt::format("spacing {:.3f} s; steady [{:.1f},{:.1f}] s: Wi-Fi SLEEP {:.1f}%, 3G DCH {:.3f}%", spacing,
                          from, to, 100.0 * sleep_share, 100.0 * dch / (to - from))};
}

// 5. at bandwidth = encoding rate every technique looks like encoding-rate streaming
Outcome bandwidth_limited_convergence() {
  const std::vector<std::string> names = {"youtube-n9-3g-encoding-rate", "youtube-nexus-s-browser-3g-throttle",
                                          "youtube-nexus-s-app-3g-on-off", "youtube-lumia-800-3g-fast-caching",
                                          "vimeo-iphone-3g-dash"};
  std::vector<double> current;
  int as_enc = 0;
  std::string detail;
  for (const auto& n : names) {
    auto s = bundled(n);
    s.path.bandwidth_bps = s.video.avg_encoding_bps();
    const auto r = run_scenario(s);
    const auto label = classify(r.session.timeline, s.video.avg_encoding_bps(), s.path.bandwidth_bps).label;
    as_enc += label == TechniqueLabel::EncodingRate ? 1 : 0;
    current.push_back(r.energy.avg_streaming_current_ma);
    detail += fmt::format("{} {:.2f} mA {}; ", to_string(s.technique.kind), r.energy.avg_streaming_current_ma,
                          to_string(label));
  }
  bool within = true;
  for (double c : current) within = within && std::abs(c - current[0]) <= 0.05 * current[0];
  return {within && as_enc >= 4, detail + fmt::format("{}/5 labelled ENCODING_RATE", as_enc)};
}

// 6. byte conservation at every tick; HD buffer below 33 MB
Outcome conservation() {
  bool ok = true;
  std::uint64_t checks = 0;
  Bytes hd_peak = 0;
  std::string failures;
  for (const auto& f : list_scenarios(bundled_scenario_dir())) {
    try {
      const auto s = load_scenario_file(f);
      const auto r = run_scenario(s);  // every tick re-checks the identity and throws on a violation
      const auto& m = r.session.metrics;
      checks += m.invariant_checks;
      const bool closed = m.received_total == m.consumed_total + m.buffer_at_end + m.wasted_total;
      bool non_negative = true;
      Bytes peak = 0;
      for (const auto& b : m.buffer_series) {
        non_negative = non_negative && b.playback_bytes >= 0 && b.socket_bytes >= 0;
        peak = std::max(peak, b.client_held());
      }
      if (s.name == "youtube-iphone-hd-wifi-multiconn") hd_peak = peak;
      if (!closed || !non_negative || m.invariant_checks == 0) {
        ok = false;
        failures += s.name + " ";
      }
    } catch (const std::exception& e) {
      ok = false;
      failures += fmt::format("{}: {} ", f.filename().string(), e.what());
    }
  }
  ok = ok && hd_peak > 0 && hd_peak <= 33'000'000;
  return {ok, fmt::format("{} tick checks; HD peak buffer {} bytes {}", checks, hd_peak, failures)};
}

// 7. classifier round trip, clean and with 10% jitter
Outcome classifier_round_trip() {
  int clean_ok = 0, clean_n = 0, jit_ok = 0, jit_n = 0;
  std::string misses;
  for (const auto& f : list_scenarios(bundled_scenario_dir())) {
    auto s = load_scenario_file(f);
    const auto r = run_scenario(s);
    ++clean_n;
    clean_ok += r.classifier_agrees ? 1 : 0;
    if (!r.classifier_agrees) misses += s.name + " ";
    for (std::uint64_t seed : {1, 2, 3}) {
      s.path.jitter = 0.10;
      s.seed = seed;
      const auto j = run_scenario(s);
      ++jit_n;
      jit_ok += j.classifier_agrees ? 1 : 0;
    }
  }
  const double jit_share = static_cast<double>(jit_ok) / jit_n;
  return {clean_ok == clean_n && jit_share >= 0.9,
          fmt::format("clean {}/{}; jittered {}/{} ({:.0f}%) {}", clean_ok, clean_n, jit_ok, jit_n, 100 * jit_share,
                      misses)};
}

// 8. throttle factor recovery
Outcome throttle_factor_recovery() {
  bool ok = true;
  std::string detail;
  for (const auto& n : {"youtube-nexus-s-browser-3g-throttle", "dailymotion-n9-3g-throttle", "youtube-iphone-3g-throttle"}) {
    const auto s = bundled(n);
    const auto r = run_scenario(s);
    const double est = estimate_throttle_factor(r.session.timeline, s.video.avg_encoding_bps());
    const double rel = std::abs(est - s.technique.throttle_factor) / s.technique.throttle_factor;
    ok = ok && rel <= 0.05;
    detail += fmt::format("{:.2f}->{:.3f} ", s.technique.throttle_factor, est);
  }
  return {ok, detail};
}

// 9. fast-start recovery
Outcome fast_start_recovery() {
  bool ok = true;
  std::string detail;
  for (const auto& n : {"youtube-nexus-s-browser-3g-throttle", "youtube-iphone-3g-throttle", "dailymotion-n9-3g-throttle"}) {
    const auto s = bundled(n);
    const auto r = run_scenario(s);
    const double est = estimate_fast_start_media(r.session.timeline, s.video.avg_encoding_bps());
    const double rel = std::abs(est - s.technique.fast_start_s) / s.technique.fast_start_s;
    ok = ok && rel <= 0.10;
    detail += fmt::format("{:g}s->{:.1f}s ", s.technique.fast_start_s, est);
  }
  return {ok, detail};
}

// Fluid model of capped multi-connection delivery with key-frame restarts:
// refill to the cap, close, wait for headroom, reconnect one rtt later, fetch
// the partial key frame again, refill. Constant encoding rate.
double overhead_oracle(double total, double rate, double bw, double rtt, double fast_start_bytes, double throttle_rate,
                       double cap, double headroom, double keyframe) {
  double t = rtt + fast_start_bytes / bw;
  double position = fast_start_bytes;
  double consumed = 0.0;
  double waste = 0.0;
  const double t_play = t;
  auto buffer = [&] { return position - consumed; };

  // steady throttled growth at (throttle_rate - rate) until the cap
  {
    const double dt = (cap - buffer()) / (throttle_rate - rate);
    if (position + throttle_rate * dt >= total) return 1.0;
    position += throttle_rate * dt;
    t += dt;
    consumed = rate * (t - t_play);
  }
  while (position < total) {
    const double dup = std::fmod(position, keyframe);
    waste += dup;
    // idle until headroom is free, then one rtt before data flows
    t += headroom / rate + rtt;
    consumed = rate * (t - t_play);
    // the duplicate prefix at full speed
    t += dup / bw;
    consumed = rate * (t - t_play);
    // new content: the rest of the fast-start allowance at bw, then throttled
    double allowance = std::max(0.0, fast_start_bytes - dup);
    double need = cap - buffer();
    const double fast_dt = std::min(need / (bw - rate), allowance / bw);
    double fresh = bw * fast_dt;
    t += fast_dt;
    need -= (bw - rate) * fast_dt;
    if (need > 1e-9) {
      const double slow_dt = need / (throttle_rate - rate);
      fresh += throttle_rate * slow_dt;
      t += slow_dt;
    }
    consumed = rate * (t - t_play);
    position = std::min(total, position + fresh);
  }
  return (total + waste) / total;
}

// 10. iPhone HD overhead with calibrated key-frame spacing; monotone in spacing
Outcome hd_overhead() {
  const auto s = bundled("youtube-iphone-hd-wifi-multiconn");
  const double rate = s.video.avg_encoding_bps() / 8.0;
  const double total = static_cast<double>(s.video.total_size());
  auto oracle = [&](double k) {
    return overhead_oracle(total, rate, s.path.bandwidth_bps / 8.0, s.path.rtt_s, s.technique.fast_start_s * rate,
                           s.technique.throttle_factor * rate, static_cast<double>(s.technique.buffer_cap),
                           static_cast<double>(s.technique.reopen_headroom), k);
  };
  // calibrate: smallest spacing on a 10 kB grid whose oracle overhead reaches 2.0
  double k_star = 0.0;
  for (double k = 100e3; k <= 8e6; k += 10e3) {
    if (oracle(k) >= 2.0) {
      k_star = k;
      break;
    }
  }
  auto simulate = [&](Bytes k) {
    auto copy = s;
    copy.video.keyframe_spacing = k;
    return run_scenario(copy).session.metrics.overhead_ratio();
  };
  const double at_star = simulate(static_cast<Bytes>(k_star));
  const double bundled_ratio = run_scenario(s).session.metrics.overhead_ratio();

  std::vector<double> series;
  for (Bytes k = 128 * 1024; k <= 4 * 1024 * 1024; k *= 2) series.push_back(simulate(k));
  const bool monotone = std::is_sorted(series.begin(), series.end()) && series.back() > series.front();
  std::string curve;
  for (double v : series) curve += fmt::format("{:.3f} ", v);

  const bool ok = k_star > 0 && at_star >= 1.8 && at_star <= 2.2 && bundled_ratio >= 1.8 && bundled_ratio <= 2.2 &&
                  monotone;
  return {ok, fmt::format("oracle K*={:.0f} B -> sim {:.3f}; bundled K={} -> {:.3f}; 128KiB..4MiB: {}", k_star,
                          at_star, s.video.keyframe_spacing, bundled_ratio, curve)};
}

// 11. DASH buffer stays within one segment of the target after warm-up
Outcome dash_buffer() {
  const auto s = bundled("vimeo-iphone-3g-dash");
  const auto r = run_scenario(s);
  const double target = s.technique.dash_target_buffer_s;
  const double seg = s.video.quality_ladder.front().segment_duration_s;
  const double end = last_data_time(r.session.timeline);
  double warm = -1.0, lo = 1e9, hi = -1e9;
  for (const auto& b : r.session.metrics.buffer_series) {
    if (warm < 0 && b.media_s >= target - seg) warm = b.time;
    if (warm < 0 || b.time > end) continue;
    lo = std::min(lo, b.media_s);
    hi = std::max(hi, b.media_s);
  }
  const bool ok = warm >= 0 && lo >= target - seg && hi <= target + seg;
  return {ok, fmt::format("warm-up at {:.1f} s; buffered media in [{:.2f}, {:.2f}] s until {:.1f} s", warm, lo, hi, end)};
}

// 12. watched-fraction sweep shape
Outcome sweep_shape() {
  std::vector<double> fractions;
  for (int i = 1; i <= 10; ++i) fractions.push_back(i / 10.0);
  const auto fc = sweep_watched_fraction(bundled("youtube-lumia-800-3g-fast-caching"), fractions);
  const auto oo = sweep_watched_fraction(bundled("youtube-galaxy-s3-app-3g-on-off"), fractions);
  auto non_increasing = [](const std::vector<SweepPoint>& p) {
    for (std::size_t i = 1; i < p.size(); ++i) {
      if (p[i].avg_streaming_current_ma > p[i - 1].avg_streaming_current_ma) return false;
    }
    return true;
  };
  bool fc_above = true;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (fractions[i] <= 0.4 + 1e-9) fc_above = fc_above && fc[i].avg_streaming_current_ma >= oo[i].avg_streaming_current_ma;
  }
  std::string a, b;
  for (const auto& p : fc) a += fmt::format("{:.1f} ", p.avg_streaming_current_ma);
  for (const auto& p : oo) b += fmt::format("{:.1f} ", p.avg_streaming_current_ma);
  return {non_increasing(fc) && non_increasing(oo) && fc_above,
          fmt::format("FAST_CACHING: {}| ON_OFF: {}", a, b)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double time_limit_s;
  };
  const std::vector<Criterion> criteria = {
      {"RRC timer ladder", rrc_ladder, 1.0},
      {"zero-window probes keep DCH", probes_hold_dch, 1.0},
      {"per-burst on-off at most half of persistent", per_burst_saves_half, 10.0},
      {"bursty throttling: Wi-Fi sleeps, 3G stays in DCH", bursty_interface_asymmetry, 10.0},
      {"bandwidth-limited convergence to encoding rate", bandwidth_limited_convergence, 30.0},
      {"byte conservation", conservation, 0.0},
      {"classifier round trip", classifier_round_trip, 60.0},
      {"throttle factor recovery", throttle_factor_recovery, 0.0},
      {"fast-start recovery", fast_start_recovery, 0.0},
      {"HD overhead with key-frame restarts", hd_overhead, 0.0},
      {"DASH steady buffer", dash_buffer, 0.0},
      {"watched-fraction sweep shape", sweep_shape, 0.0},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("error: {}", e.what())};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit_s > 0 && elapsed >= c.time_limit_s) {
      o.pass = false;
      o.detail += fmt::format(" (over the {:g} s limit)", c.time_limit_s);
    }
    failed += o.pass ? 0 : 1;
    fmt::print("{} {:2}. {}: {} [{:.2f} s]\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, o.detail, elapsed);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
