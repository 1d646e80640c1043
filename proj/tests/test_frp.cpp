#include "rplatoon/frp.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <utility>
#include <vector>

using namespace rplatoon;
using frp::SampleStream;
using frp::SignalFunction;
using frp::TimeDelta;

namespace {

SampleStream<int> ints(std::vector<int> values) {
  return frp::uniform_stream(0.1, std::move(values));
}

}  // namespace

TEST_CASE("lift_pure applies the function pointwise") {
  auto id = frp::lift_pure<int>([](int x) { return x; });
  CHECK(frp::run(id, ints({1, 2, 3})) == std::vector<int>{1, 2, 3});

  auto dbl = frp::lift_pure<int>([](int x) { return 2 * x; });
  CHECK(frp::run(dbl, ints({1, 2, 3})) == std::vector<int>{2, 4, 6});
}

TEST_CASE("lift_pure composes over tuple inputs") {
  // A pure (image, steer) -> steer style adjustment wired after another SF.
  auto adjust = frp::lift_pure<std::pair<int, double>>(
      [](const std::pair<int, double>& in) { return in.second + in.first; });
  auto widen = frp::lift_pure<int>([](int x) { return std::pair<int, double>(x, 0.5); });
  auto sf = frp::compose(widen, adjust);
  auto out = frp::run(sf, ints({2, 4}));
  CHECK(out == std::vector<double>{2.5, 4.5});
}

TEST_CASE("compose feeds first into second within the same step") {
  auto inc = frp::lift_pure<int>([](int x) { return x + 1; });
  auto dbl = frp::lift_pure<int>([](int x) { return 2 * x; });
  CHECK(frp::run(frp::compose(inc, dbl), ints({1, 2})) == std::vector<int>{4, 6});

  auto sf = frp::lift_pure<int>([](int x) { return x * x; });
  auto stream = ints({3, -1, 4});
  CHECK(frp::run(frp::compose(sf, frp::identity<int>()), stream) == frp::run(sf, stream));

  // Hand-unrolled: delay emits [0,5]; +1 gives [1,6].
  CHECK(frp::run(frp::compose(frp::delay_one<int>(0), inc), ints({5, 6})) ==
        std::vector<int>{1, 6});
}

TEST_CASE("fanout duplicates the input to both branches") {
  auto id = frp::identity<int>();
  auto out = frp::run(frp::fanout(id, id), ints({7}));
  CHECK(out == std::vector<std::pair<int, int>>{{7, 7}});

  auto inc = frp::lift_pure<int>([](int x) { return x + 1; });
  auto dec = frp::lift_pure<int>([](int x) { return x - 1; });
  CHECK(frp::run(frp::fanout(inc, dec), ints({0, 10})) ==
        std::vector<std::pair<int, int>>{{1, -1}, {11, 9}});

  CHECK(frp::run(frp::fanout(frp::delay_one<int>(0), id), ints({1, 2})) ==
        std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
}

TEST_CASE("identity and constant") {
  CHECK(frp::run(frp::identity<int>(), ints({3, 1, 4})) == std::vector<int>{3, 1, 4});
  CHECK(frp::run(frp::constant<int>(9), ints({3, 1, 4})) == std::vector<int>{9, 9, 9});

  auto inc = frp::lift_pure<int>([](int x) { return x + 1; });
  CHECK(frp::run(frp::compose(frp::constant<int>(9), inc), ints({0})) ==
        std::vector<int>{10});
}

TEST_CASE("delay_one emits the initial value, then inputs one step late") {
  CHECK(frp::run(frp::delay_one<int>(0), ints({1, 2, 3})) == std::vector<int>{0, 1, 2});

  auto strs = frp::uniform_stream<std::string>(0.1, {"a"});
  CHECK(frp::run(frp::delay_one<std::string>(""), strs) == std::vector<std::string>{""});
}

namespace {

// Gear-shift rule hand-copied for the feedback examples; the production
// controller version is covered in test_drivers.cpp.
int shift_rule(double rpm, int gear) {
  if (rpm > 6000) return std::min(6, gear + 1);
  if (rpm < 3000) return std::max(1, gear - 1);
  return gear;
}

}  // namespace

TEST_CASE("delay_one seeds the first gear computation") {
  // oldGear at step 0 is the delay's initial 0, so shift_rule(2500, 0) == 1.
  auto old_gear = frp::run(frp::delay_one<int>(0), ints({2}));
  CHECK(old_gear[0] == 0);
  CHECK(shift_rule(2500, old_gear[0]) == 1);
}

TEST_CASE("feedback threads state through a unit delay") {
  auto sum_body = frp::lift_pure<std::pair<int, int>>(
      [](const std::pair<int, int>& in) {
        int s = in.first + in.second;
        return std::pair<int, int>(s, s);
      });
  CHECK(frp::run(frp::feedback(0, sum_body), ints({1, 2, 3})) ==
        std::vector<int>{1, 3, 6});

  // Body ignoring state behaves as the plain pointwise map.
  auto ignore_body = frp::lift_pure<std::pair<int, int>>(
      [](const std::pair<int, int>& in) {
        return std::pair<int, int>(in.first * 10, 0);
      });
  CHECK(frp::run(frp::feedback(99, ignore_body), ints({1, 2})) ==
        std::vector<int>{10, 20});

  auto gear_body = frp::lift_pure<std::pair<double, int>>(
      [](const std::pair<double, int>& in) {
        int g = shift_rule(in.first, in.second);
        return std::pair<int, int>(g, g);
      });
  auto rpms = frp::uniform_stream<double>(0.1, {2500, 6500, 6500});
  CHECK(frp::run(frp::feedback(0, gear_body), rpms) == std::vector<int>{1, 2, 3});
}

TEST_CASE("step returns the output and the successor") {
  auto inc = frp::lift_pure<int>([](int x) { return x + 1; });
  auto [out, next] = inc.step(TimeDelta(0.02), 5);
  CHECK(out == 6);
  auto [out2, next2] = next.step(TimeDelta(0.02), 7);
  CHECK(out2 == 8);

  auto delay = frp::delay_one<int>(0);
  auto [d0, delay2] = delay.step(TimeDelta(0.02), 5);
  CHECK(d0 == 0);
  auto [d1, delay3] = delay2.step(TimeDelta(0.02), 9);
  CHECK(d1 == 5);

  CHECK_THROWS_AS(inc.step(TimeDelta(0.0), 1), std::invalid_argument);
  CHECK_THROWS_AS(TimeDelta(-0.5), std::invalid_argument);
  CHECK_THROWS_AS(TimeDelta(std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
}

TEST_CASE("run folds over the stream") {
  SampleStream<int> s{{TimeDelta(0.1), 1}, {TimeDelta(0.1), 2}};
  CHECK(frp::run(frp::identity<int>(), s) == std::vector<int>{1, 2});
  CHECK(frp::run(frp::delay_one<int>(9), ints({1})) == std::vector<int>{9});

  // run(compose(a,b), s) == run(b, zip(dts, run(a, s)))
  auto a = frp::lift_pure<int>([](int x) { return x - 3; });
  auto b = frp::lift_pure<int>([](int x) { return x * x; });
  auto stream = ints({4, 5, 6});
  auto mid = frp::run(a, stream);
  SampleStream<int> mid_stream;
  for (size_t i = 0; i < mid.size(); ++i) mid_stream.push_back({stream[i].dt, mid[i]});
  CHECK(frp::run(frp::compose(a, b), stream) == frp::run(b, mid_stream));
}

// ---------------------------------------------------------------------------
// Law properties on randomized integer streams.
// ---------------------------------------------------------------------------

namespace {

struct Affine {
  int mul;
  int add;
  int operator()(int x) const { return mul * x + add; }
};

SampleStream<int> random_stream(std::mt19937& rng, size_t max_len = 64) {
  std::uniform_int_distribution<size_t> len(0, max_len);
  std::uniform_int_distribution<int> val(-1000, 1000);
  std::uniform_real_distribution<double> dt(1e-3, 1.0);
  SampleStream<int> s;
  size_t n = len(rng);
  s.reserve(n);
  for (size_t i = 0; i < n; ++i) s.push_back({TimeDelta(dt(rng)), val(rng)});
  return s;
}

Affine random_affine(std::mt19937& rng) {
  std::uniform_int_distribution<int> coeff(-9, 9);
  return {coeff(rng), coeff(rng)};
}

}  // namespace

TEST_CASE("arrow identity laws hold on random streams") {
  std::mt19937 rng(20240811);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = random_stream(rng);
    auto f = random_affine(rng);
    auto sf = frp::compose(frp::delay_one<int>(f.add), frp::lift_pure<int>(f));
    auto expected = frp::run(sf, s);
    CHECK(frp::run(frp::compose(frp::identity<int>(), sf), s) == expected);
    CHECK(frp::run(frp::compose(sf, frp::identity<int>()), s) == expected);
  }
}

TEST_CASE("functor law: composing lifted functions equals lifting the composition") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = random_stream(rng);
    auto f = random_affine(rng);
    auto g = random_affine(rng);
    auto piped = frp::compose(frp::lift_pure<int>(f), frp::lift_pure<int>(g));
    auto fused = frp::lift_pure<int>([=](int x) { return g(f(x)); });
    CHECK(frp::run(piped, s) == frp::run(fused, s));
  }
}

TEST_CASE("compose is associative") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = random_stream(rng);
    auto a = frp::compose(frp::delay_one<int>(0), frp::lift_pure<int>(random_affine(rng)));
    auto b = frp::lift_pure<int>(random_affine(rng));
    auto c = frp::delay_one<int>(random_affine(rng).add);
    CHECK(frp::run(frp::compose(frp::compose(a, b), c), s) ==
          frp::run(frp::compose(a, frp::compose(b, c)), s));
  }
}

TEST_CASE("unit-delay law") {
  std::mt19937 rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = random_stream(rng);
    int init = random_affine(rng).add;
    auto out = frp::run(frp::delay_one<int>(init), s);
    REQUIRE(out.size() == s.size());
    if (!s.empty()) {
      CHECK(out[0] == init);
      for (size_t n = 1; n < s.size(); ++n) CHECK(out[n] == s[n - 1].value);
    }
  }
}

TEST_CASE("feedback equals an explicitly state-threaded fold") {
  std::mt19937 rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = random_stream(rng);
    auto fo = random_affine(rng);
    auto fs = random_affine(rng);
    int init = random_affine(rng).add;

    auto body = frp::lift_pure<std::pair<int, int>>(
        [=](const std::pair<int, int>& in) {
          return std::pair<int, int>(fo(in.first) + in.second, fs(in.first) - in.second);
        });
    auto got = frp::run(frp::feedback(init, body), s);

    std::vector<int> expected;
    int state = init;
    for (const auto& sample : s) {
      expected.push_back(fo(sample.value) + state);
      state = fs(sample.value) - state;
    }
    CHECK(got == expected);
  }
}

TEST_CASE("stepping is deterministic and non-mutating") {
  std::mt19937 rng(5150);
  auto s = random_stream(rng, 128);
  auto f = random_affine(rng);
  auto body = frp::lift_pure<std::pair<int, int>>(
      [=](const std::pair<int, int>& in) {
        return std::pair<int, int>(f(in.first) + in.second, in.first);
      });
  auto sf = frp::feedback(3, body);
  auto first = frp::run(sf, s);
  auto second = frp::run(sf, s);  // same object: stepping must not have mutated it
  CHECK(first == second);
}
