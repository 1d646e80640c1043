#include "rplatoon/drivers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "test_support.hpp"

using namespace rplatoon;
using frp::TimeDelta;

TEST_CASE("shifting hysteresis") {
  CHECK(shifting(6500, 3) == 4);
  CHECK(shifting(6500, 6) == 6);
  CHECK(shifting(2500, 1) == 1);
  CHECK(shifting(4000, 3) == 3);
  CHECK(shifting(6000, 3) == 3);  // thresholds are strict
  CHECK(shifting(3000, 3) == 3);
}

TEST_CASE("shifting never leaves the drivable range") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> rpm(0, 10000);
  for (int g0 = 1; g0 <= 6; ++g0) {
    int g = g0;
    for (int i = 0; i < 1000; ++i) {
      g = shifting(rpm(rng), g);
      REQUIRE((g >= 1 && g <= 6));
    }
  }
}

TEST_CASE("gear is a fixed point of shifting in the hysteresis band") {
  for (int g = 1; g <= 6; ++g)
    for (double rpm = 3000; rpm <= 6000; rpm += 250) CHECK(shifting(rpm, g) == g);
}

TEST_CASE("steering formula and clipping") {
  CHECK(steering(0.0, 0.0) == 0.0);
  CHECK(steering(std::numbers::pi / 14.0, 0.0) == 1.0);
  CHECK(steering(0.1, 0.5) == Catch::Approx(0.395633840657307).margin(1e-9));
  CHECK(steering(1.0, 0.0) == 1.0);    // clipped high
  CHECK(steering(-1.0, 0.0) == -1.0);  // clipped low
}

TEST_CASE("steering output sign matches the unclipped expression") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> angle(-0.5, 0.5);
  std::uniform_real_distribution<double> pos(-1.5, 1.5);
  for (int i = 0; i < 5000; ++i) {
    double a = angle(rng), p = pos(rng);
    double raw = a * 14.0 / std::numbers::pi - p * 0.1;
    double s = steering(a, p);
    if (raw != 0.0) CHECK(std::signbit(s) == std::signbit(raw));
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("gas threshold shrinks while steering") {
  CHECK(gas(50, 0) == 1.0);
  CHECK(gas(120, 0) == 0.0);
  CHECK(gas(80, 0.5) == 0.0);   // threshold 100 - 25 = 75
  CHECK(gas(74, 0.5) == 1.0);
  CHECK(gas(100, 0) == 0.0);    // strict inequality
}

TEST_CASE("request fires strictly below 3 m") {
  CHECK(request(2.9) == "faster");
  CHECK(request(3.0) == "");
  CHECK(request(200) == "");
}

TEST_CASE("adjust_speed raises the target while any peer asks") {
  CHECK(adjust_speed({"", ""}, 80) == 80);
  CHECK(adjust_speed({"faster", ""}, 80) == 90);
  CHECK(adjust_speed({}, 80) == 80);
  CHECK(adjust_speed({"slower", "faster"}, 80) == 90);
}

TEST_CASE("control laws are bit-deterministic") {
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> u(-200, 200);
  for (int i = 0; i < 10000; ++i) {
    double a = u(rng), b = u(rng);
    int g = static_cast<int>(u(rng)) % 7;
    CHECK(shifting(a, g) == shifting(a, g));
    CHECK(steering(a, b) == steering(a, b));
    CHECK(gas(a, b) == gas(a, b));
    CHECK(request(a) == request(a));
    CHECK(adjust_speed({request(a)}, b) == adjust_speed({request(a)}, b));
  }
}

TEST_CASE("min_forward_range scans the +-30 degree beams") {
  CarState cs;
  CHECK(min_forward_range(cs) == kRangeCapMeters);
  cs.track[9] = 2.0;  // straight ahead
  CHECK(min_forward_range(cs) == 2.0);
  cs.track[9] = kRangeCapMeters;
  cs.track[6] = 1.5;  // -30 deg
  cs.track[12] = 4.0; // +30 deg
  CHECK(min_forward_range(cs) == 1.5);
  cs.track[5] = 0.1;  // -40 deg: outside the forward cone
  CHECK(min_forward_range(cs) == 1.5);
  cs.track.fill(kOffTrackReading);
  CHECK(min_forward_range(cs) == kRangeCapMeters);
}

TEST_CASE("my_driver first step from rest") {
  CarState cs;
  cs.rpm = 2500;
  cs.angle = 0;
  cs.track_pos = 0;
  cs.speed_x = 0;
  auto [out, next] = my_driver().step(TimeDelta(0.02), cs);
  CHECK(out.gear == 1);
  CHECK(out.steer == 0.0);
  CHECK(out.accel == 1.0);
  // untouched fields keep their defaults
  CHECK(out.brake == 0.0);
  CHECK(out.clutch == 0.0);
  CHECK(out.meta == 0);
  CHECK(out.broadcast.empty());
}

namespace {

// Explicitly state-threaded reference fold of the three control laws.
std::vector<DriveState> reference_drive(const std::vector<CarState>& inputs) {
  std::vector<DriveState> outs;
  outs.reserve(inputs.size());
  int old_gear = 0;
  for (const auto& cs : inputs) {
    int g = shifting(cs.rpm, old_gear);
    double s = steering(cs.angle, cs.track_pos);
    double a = gas(cs.speed_x, s);
    DriveState out;
    out.accel = a;
    out.gear = g;
    out.steer = s;
    outs.push_back(out);
    old_gear = g;
  }
  return outs;
}

}  // namespace

TEST_CASE("my_driver equals the reference fold on random streams") {
  std::mt19937 rng(777);
  std::vector<CarState> inputs;
  inputs.reserve(10000);
  for (int i = 0; i < 10000; ++i) inputs.push_back(testing::random_car_state(rng));

  auto stream = frp::uniform_stream(0.02, inputs);
  auto got = frp::run(my_driver(), stream);
  auto expected = reference_drive(inputs);
  REQUIRE(got.size() == expected.size());
  for (size_t i = 0; i < got.size(); ++i) {
    REQUIRE(got[i] == expected[i]);
    CHECK(got[i].steer >= -1.0);
    CHECK(got[i].steer <= 1.0);
  }
}

TEST_CASE("platoon_driver throttles toward its target") {
  CarState cs;
  cs.speed_x = 75;

  auto slow = platoon_driver(70.0);
  auto [out1, s1] = slow.step(TimeDelta(0.02), cs);
  CHECK(out1.accel == 0.0);  // above target, no requests

  cs.communications = {{1, "faster"}};
  auto [out2, s2] = slow.step(TimeDelta(0.02), cs);
  CHECK(out2.accel == 1.0);  // raised target 80

  cs.communications = {{1, ""}, {2, ""}};
  cs.speed_x = 69;
  auto [out3, s3] = slow.step(TimeDelta(0.02), cs);
  CHECK(out3.accel == 1.0);  // below base target
}

TEST_CASE("platoon_driver broadcasts on imminent collision only") {
  CarState cs;
  auto driver = platoon_driver(60.0);
  auto [open_road, d1] = driver.step(TimeDelta(0.02), cs);
  CHECK(open_road.broadcast.empty());

  cs.track[9] = 2.0;
  auto [closing, d2] = d1.step(TimeDelta(0.02), cs);
  CHECK(closing.broadcast == "faster");

  cs.track[9] = 3.0;
  auto [at_limit, d3] = d2.step(TimeDelta(0.02), cs);
  CHECK(at_limit.broadcast.empty());
}

TEST_CASE("platoon_driver keeps the solo steering and shifting") {
  std::mt19937 rng(4242);
  std::vector<CarState> inputs;
  for (int i = 0; i < 2000; ++i) inputs.push_back(testing::random_car_state(rng));
  auto stream = frp::uniform_stream(0.02, inputs);
  auto solo = frp::run(my_driver(), stream);
  auto platoon = frp::run(platoon_driver(80.0), stream);
  for (size_t i = 0; i < solo.size(); ++i) {
    CHECK(platoon[i].steer == solo[i].steer);
    CHECK(platoon[i].gear == solo[i].gear);
  }
}

TEST_CASE("make_driver resolves names") {
  CHECK_NOTHROW(make_driver("solo"));
  CHECK_NOTHROW(make_driver("parked"));
  CHECK_NOTHROW(make_driver("platoon"));
  CHECK_NOTHROW(make_driver("platoon:35"));
  CHECK_THROWS_AS(make_driver("warp"), std::invalid_argument);
  CHECK_THROWS_AS(make_driver("platoon:nope"), std::invalid_argument);
  CHECK_THROWS_AS(make_driver("platoon:-5"), std::invalid_argument);

  CarState cs;
  auto [parked, rest] = make_driver("parked").step(TimeDelta(0.02), cs);
  CHECK(parked == DriveState{});
}
