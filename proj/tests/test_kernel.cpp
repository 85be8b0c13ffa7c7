#include <doctest.h>

#include "mvs/kernel.hpp"

#include <string>
#include <vector>

using namespace mvs;

TEST_CASE("events fire in time order, ties in scheduling order") {
  SimKernel k;
  std::vector<std::string> log;
  k.schedule(2.0, [&] { log.push_back("b"); });
  k.schedule(1.0, [&] { log.push_back("a"); });
  k.schedule(2.0, [&] { log.push_back("c"); });
  CHECK(k.run_all() == 3);
  CHECK(log == std::vector<std::string>{"a", "b", "c"});
  CHECK(k.now() == doctest::Approx(2.0));
}

TEST_CASE("run_until stops at the horizon and advances the clock") {
  SimKernel k;
  int fired = 0;
  k.schedule(1.0, [&] { ++fired; });
  k.schedule(5.0, [&] { ++fired; });
  CHECK(k.run_until(3.0) == 1);
  CHECK(k.now() == 3.0);
  CHECK(k.pending() == 1);
  CHECK_THROWS_AS(k.run_until(2.0), SchedulingError);
  CHECK(k.run_until(5.0) == 1);
  CHECK(fired == 2);
}

TEST_CASE("events scheduled for the current instant run in the same pass") {
  SimKernel k;
  std::vector<int> order;
  k.schedule(1.0, [&] {
    order.push_back(1);
    k.schedule_in(0.0, [&] { order.push_back(2); });
  });
  k.run_until(1.0);
  CHECK(order == std::vector<int>{1, 2});
}

TEST_CASE("scheduling into the past is rejected") {
  SimKernel k;
  k.schedule(1.0, [] {});
  k.run_all();
  CHECK_THROWS_AS(k.schedule(0.5, [] {}), SchedulingError);
}

TEST_CASE("cancelled events never fire") {
  SimKernel k;
  int fired = 0;
  const auto h = k.schedule(1.0, [&] { ++fired; });
  CHECK(k.cancel(h));
  CHECK_FALSE(k.cancel(h));
  k.run_all();
  CHECK(fired == 0);
  CHECK(k.executed_total() == 0);
}
