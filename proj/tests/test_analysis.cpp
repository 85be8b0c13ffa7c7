#include <doctest.h>

#include "mvs/analysis.hpp"
#include "mvs/session.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace mvs;

namespace {

PacketRecord data(double t, Bytes b = 1000) { return {t, Direction::Down, b, PacketKind::Data, 0}; }

VideoSpec constant_video(double bps, int seconds) {
  VideoSpec v;
  v.encoding_schedule.assign(static_cast<std::size_t>(seconds), static_cast<Bytes>(bps / 8.0));
  return v;
}

PathSpec path(double bw = 6e6) {
  PathSpec p;
  p.bandwidth_bps = bw;
  p.rtt_s = 0.1;
  return p;
}

TechniqueSpec throttle(double factor, double fast_start, Bytes burst = 0) {
  TechniqueSpec t;
  t.kind = TechniqueKind::Throttle;
  t.throttle_factor = factor;
  t.fast_start_s = fast_start;
  t.burst_size = burst;
  return t;
}

TechniqueSpec simple(TechniqueKind k, double fast_start) {
  TechniqueSpec t;
  t.kind = k;
  t.fast_start_s = fast_start;
  return t;
}

}  // namespace

TEST_CASE("packets closer than 50 ms form one burst") {
  const auto b = group_bursts({data(0.0), data(0.01), data(0.02), data(1.0)});
  REQUIRE(b.size() == 2);
  CHECK(b[0].packet_count == 3);
  CHECK(b[0].bytes == 3000);
  CHECK(b[1].packet_count == 1);
  CHECK(group_bursts({}).empty());
}

TEST_CASE("burst grouping partitions all data bytes and is idempotent") {
  PacketTimeline t;
  for (int i = 0; i < 500; ++i) t.push_back(data(i * (i % 7 == 0 ? 0.2 : 0.01), 100 + i));
  sort_by_time(t);
  t.push_back({t.back().time, Direction::Up, 0, PacketKind::ZeroWindowAd, 0});
  const auto bursts = group_bursts(t);
  Bytes sum = 0;
  std::size_t packets = 0;
  for (const auto& b : bursts) {
    sum += b.bytes;
    packets += b.packet_count;
  }
  CHECK(sum == total_data_bytes(t));
  CHECK(packets == 500);

  PacketTimeline again;
  for (const auto& b : bursts) again.push_back(data(b.start, b.bytes));
  CHECK(group_bursts(again).size() <= bursts.size());
}

TEST_CASE("empirical CDF") {
  const auto c = empirical_cdf({3, 1, 2});
  REQUIRE(c.size() == 3);
  CHECK(c[0].value == 1);
  CHECK(c[0].fraction == doctest::Approx(1.0 / 3));
  CHECK(c[1].fraction == doctest::Approx(2.0 / 3));
  CHECK(c[2].fraction == 1.0);

  const auto step = empirical_cdf(std::vector<double>(10, 65536.0));
  REQUIRE(step.size() == 1);
  CHECK(step[0].value == 65536.0);
  CHECK(step[0].fraction == 1.0);

  const auto single = burst_cdf({{0.0, 0.1, 500, 3}});
  CHECK(single.sizes.size() == 1);
  CHECK(single.intervals.empty());

  std::ostringstream os;
  write_cdf_csv(os, c);
  CHECK(os.str().rfind("value,fraction\n", 0) == 0);
}

TEST_CASE("simulated 64 KiB bursts measure as 64 KiB") {
  const auto run = simulate_session(constant_video(250000, 300), throttle(1.25, 40, 65536), path());
  const double excl = fast_start_exclusion(run.timeline);
  const auto bursts = group_bursts(run.timeline);
  std::size_t steady = 0;
  for (std::size_t i = 0; i + 1 < bursts.size(); ++i) {  // the last one may be a short tail
    if (bursts[i].start < excl) continue;
    CHECK(bursts[i].bytes == 65536);
    ++steady;
  }
  CHECK(steady > 50);
}

TEST_CASE("burst intervals shrink for a higher encoding rate while sizes stay") {
  const auto low = simulate_session(constant_video(250000, 300), throttle(1.25, 40, 65536), path());
  const auto high = simulate_session(constant_video(500000, 300), throttle(1.25, 40, 65536), path());
  auto median = [](const Cdf& c) {
    for (const auto& p : c) {
      if (p.fraction >= 0.5) return p.value;
    }
    return 0.0;
  };
  const auto a = burst_cdf(group_bursts(low.timeline));
  const auto b = burst_cdf(group_bursts(high.timeline));
  CHECK(median(b.intervals) < median(a.intervals));
  CHECK(median(a.sizes) == median(b.sizes));
}

TEST_CASE("throttle factor estimates") {
  for (double factor : {1.25, 2.0}) {
    const auto run = simulate_session(constant_video(250000, 600), throttle(factor, 40, 65536), path());
    CHECK(estimate_throttle_factor(run.timeline, 250000) == doctest::Approx(factor).epsilon(0.05));
  }
  const auto enc = simulate_session(constant_video(250000, 600), simple(TechniqueKind::EncodingRate, 40), path());
  CHECK(estimate_throttle_factor(enc.timeline, 250000) == doctest::Approx(1.0).epsilon(0.05));
  CHECK_THROWS_AS(estimate_throttle_factor({data(0.0), data(0.01)}, 250000, 5.0), AnalysisError);
}

TEST_CASE("fast-start media estimate") {
  const auto run = simulate_session(constant_video(250000, 600), throttle(1.25, 40, 65536), path());
  CHECK(estimate_fast_start_media(run.timeline, 250000) == doctest::Approx(40.0).epsilon(0.1));
}

TEST_CASE("buffer estimate tracks the simulated buffer within one delivery quantum") {
  const double quantum = 6e6 / 8.0 * 0.010;
  for (const auto& tech : {throttle(1.25, 40, 65536), simple(TechniqueKind::EncodingRate, 40)}) {
    const auto v = constant_video(250000, 300);
    const auto run = simulate_session(v, tech, path());
    std::vector<double> times;
    std::vector<double> truth;
    for (const auto& s : run.metrics.buffer_series) {
      if (s.time < run.metrics.playback_started_at) continue;
      times.push_back(s.time);
      truth.push_back(static_cast<double>(s.client_held()));
    }
    const auto est = estimate_buffer(run.timeline, v.encoding_schedule, run.metrics.playback_started_at, times);
    REQUIRE(est.points.size() == times.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) worst = std::max(worst, std::abs(est.points[i].bytes - truth[i]));
    CHECK(worst <= quantum);
  }
}

TEST_CASE("buffer estimate error cases") {
  CHECK_THROWS_AS(estimate_buffer({data(0.0)}, {}, 0.0), AnalysisError);
  CHECK_THROWS_AS(estimate_buffer({data(0.0, 5000)}, {1000, 1000}, 0.0), AnalysisError);
}

TEST_CASE("an empty trace is unknown") {
  const auto r = classify({}, 250000, 6e6);
  CHECK(r.label == TechniqueLabel::Unknown);
}

TEST_CASE("clean simulated traces classify correctly across parameters") {
  struct Case {
    TechniqueSpec tech;
    double bps;
    TechniqueLabel expected;
  };
  std::vector<Case> cases;
  for (double bps : {250000.0, 500000.0, 1e6}) {
    for (double fs : {15.0, 30.0, 40.0}) {
      cases.push_back({simple(TechniqueKind::EncodingRate, fs), bps, TechniqueLabel::EncodingRate});
      cases.push_back({throttle(1.25, fs, 65536), bps, TechniqueLabel::Throttle});
      cases.push_back({throttle(2.0, fs), bps, TechniqueLabel::Throttle});
      cases.push_back({simple(TechniqueKind::FastCaching, fs), bps, TechniqueLabel::FastCaching});
      auto on_off = simple(TechniqueKind::OnOff, fs);
      on_off.low_watermark_s = 20;
      on_off.high_watermark_s = 100;
      cases.push_back({on_off, bps, TechniqueLabel::OnOffPersistent});
      on_off.connection_mode = ConnectionMode::PerBurst;
      cases.push_back({on_off, bps, TechniqueLabel::OnOffPerBurst});
    }
  }
  for (const auto& c : cases) {
    const auto run = simulate_session(constant_video(c.bps, 600), c.tech, path());
    const auto r = classify(run.timeline, c.bps, 6e6);
    INFO(to_string(c.tech.kind), " at ", c.bps, " fs ", c.tech.fast_start_s, " -> ", r.rule);
    CHECK(r.label == c.expected);
    CHECK(r.confidence >= 0.9);
  }
}

TEST_CASE("encoding schedule CSV round trip") {
  std::ostringstream os;
  write_encoding_csv(os, {100, 200, 300});
  CHECK(os.str().rfind("second,bytes\n", 0) == 0);
  std::istringstream is(os.str());
  CHECK(read_encoding_csv(is) == std::vector<Bytes>{100, 200, 300});
  std::istringstream bad("second,bytes\n0,abc\n");
  CHECK_THROWS(read_encoding_csv(bad));
}
