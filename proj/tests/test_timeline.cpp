#include <doctest.h>

#include "mvs/timeline.hpp"

#include <sstream>

using namespace mvs;

namespace {

PacketTimeline sample() {
  return {{0.0, Direction::Up, 0, PacketKind::Open, 0},
          {0.0, Direction::Up, 0, PacketKind::Request, 0},
          {0.11, Direction::Down, 7500, PacketKind::Data, 0},
          {0.12, Direction::Down, 7500, PacketKind::Data, 0},
          {0.12, Direction::Up, 0, PacketKind::ZeroWindowAd, 0},
          {5.12, Direction::Down, 0, PacketKind::ZeroWindowProbe, 0},
          {9.0, Direction::Up, 0, PacketKind::CloseRst, 0}};
}

}  // namespace

TEST_CASE("timeline CSV round trip") {
  const auto t = sample();
  const auto text = timeline_to_csv(t);
  CHECK(text.rfind("time_s,direction,bytes,kind,conn_id\n", 0) == 0);
  const auto back = parse_timeline_csv(text);
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(back[i].time == doctest::Approx(t[i].time));
    CHECK(back[i].direction == t[i].direction);
    CHECK(back[i].bytes == t[i].bytes);
    CHECK(back[i].kind == t[i].kind);
    CHECK(back[i].conn_id == t[i].conn_id);
  }
}

TEST_CASE("malformed timeline CSV is reported with its line") {
  CHECK_THROWS_AS(parse_timeline_csv("time,dir\n"), FormatError);
  try {
    parse_timeline_csv("time_s,direction,bytes,kind,conn_id\n0.1,DOWN,10,DATA,0\n0.2,SIDEWAYS,1,DATA,0\n");
    FAIL("expected a FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("jitter keeps records and bytes, stays sorted and is seeded") {
  PacketTimeline t;
  for (int i = 0; i < 200; ++i) t.push_back({0.01 * i, Direction::Down, 1000, PacketKind::Data, 0});
  const auto a = apply_jitter(t, 0.1, 42);
  const auto b = apply_jitter(t, 0.1, 42);
  const auto c = apply_jitter(t, 0.1, 43);
  CHECK(a.size() == t.size());
  CHECK(total_data_bytes(a) == total_data_bytes(t));
  CHECK(is_time_sorted(a));
  CHECK(timeline_to_csv(a) == timeline_to_csv(b));
  CHECK(timeline_to_csv(a) != timeline_to_csv(c));
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(std::abs(a[i].time - t[i].time) <= 0.1 * 0.01 + 1e-12);
  CHECK_THROWS(apply_jitter(t, 1.0, 1));
}

TEST_CASE("enum labels parse back") {
  for (auto k : {PacketKind::Data, PacketKind::ZeroWindowAd, PacketKind::ZeroWindowProbe, PacketKind::Open,
                 PacketKind::CloseFin, PacketKind::CloseRst, PacketKind::Request}) {
    CHECK(parse_packet_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_packet_kind("ACK"), FormatError);
}
