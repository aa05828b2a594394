#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "streamcorr/rng.hpp"
#include "streamcorr/windows.hpp"

using namespace streamcorr;

TEST_CASE("window layout times") {
  WindowConfig cfg;  // tau=60 lambda=30
  CHECK(cfg.close_time(1) == 60.0);
  CHECK(cfg.close_time(2) == 90.0);
  CHECK(cfg.open_time(1) == 0.0);
  CHECK(cfg.open_time(3) == 60.0);
}

TEST_CASE("config validation") {
  WindowConfig bad;
  bad.tau = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = WindowConfig{};
  bad.lambda = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = WindowConfig{};
  bad.k = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("windows_for with tau=60 lambda=30") {
  WindowConfig cfg;
  CHECK(windows_for(10, cfg) == std::vector<long>{1});
  CHECK(windows_for(45, cfg) == std::vector<long>{1, 2});
  // 60 sits on the shared boundary of [0,60], [30,90] and [60,120].
  CHECK(windows_for(60, cfg) == std::vector<long>{1, 2, 3});
  CHECK(windows_for(0, cfg) == std::vector<long>{1});
  CHECK(windows_for(89.999, cfg) == std::vector<long>{2, 3});
}

TEST_CASE("every timestamp lands in floor(tau/lambda) or one more window") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    WindowConfig cfg;
    cfg.tau = 1.0 + 99.0 * rng.unit();
    cfg.lambda = cfg.tau / (1.0 + 5.0 * rng.unit());
    // Steady state: before the first full window the early indices clip at 1.
    double ts = cfg.tau + 1000.0 * rng.unit();
    auto ws = windows_for(ts, cfg);
    REQUIRE(!ws.empty());
    long base = static_cast<long>(std::floor(cfg.tau / cfg.lambda + 1e-9));
    CHECK(ws.size() >= static_cast<std::size_t>(base));
    CHECK(ws.size() <= static_cast<std::size_t>(base) + 1);
    for (std::size_t i = 0; i < ws.size(); ++i) {
      if (i) CHECK(ws[i] == ws[i - 1] + 1);
      CHECK(ts >= cfg.open_time(ws[i]) - 1e-9);
      CHECK(ts <= cfg.close_time(ws[i]) + 1e-9);
    }
  }
}

TEST_CASE("reservoir keeps everything under capacity") {
  WindowConfig cfg;
  cfg.k = 100;
  WindowReservoir r(1, cfg, 99);
  for (int i = 0; i < 50; ++i)
    r.offer({static_cast<double>(i), "a" + std::to_string(i), "b"});
  auto [samples, m] = r.close();
  CHECK(m == 50);
  CHECK(samples.size() == 50);
}

TEST_CASE("reservoir size caps at k and reports m") {
  WindowConfig cfg;
  cfg.k = 10;
  WindowReservoir r(1, cfg, 7);
  for (int i = 0; i < 500; ++i)
    r.offer({static_cast<double>(i % 60), "a" + std::to_string(i), "b"});
  CHECK(r.seen() == 500);
  auto [samples, m] = r.close();
  CHECK(m == 500);
  CHECK(samples.size() == 10);
}

TEST_CASE("reservoir rejects edges outside its interval and offers after close") {
  WindowConfig cfg;
  WindowReservoir r(2, cfg, 1);  // [30, 90]
  CHECK_THROWS_AS(r.offer({10.0, "a", "b"}), std::range_error);
  CHECK_THROWS_AS(r.offer({90.5, "a", "b"}), std::range_error);
  r.offer({30.0, "a", "b"});
  r.offer({90.0, "a", "b"});
  r.close();
  CHECK_THROWS_AS(r.offer({45.0, "a", "b"}), std::logic_error);
  CHECK_THROWS_AS(r.close(), std::logic_error);
}

TEST_CASE("k=1 reservoir picks each of five edges uniformly") {
  WindowConfig cfg;
  cfg.k = 1;
  std::vector<long> counts(5, 0);
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    WindowReservoir r(1, cfg, 1000 + t);
    for (int e = 0; e < 5; ++e)
      r.offer({10.0 + e, "n" + std::to_string(e), "m"});
    auto [samples, m] = r.close();
    REQUIRE(samples.size() == 1);
    ++counts[static_cast<int>(samples[0].ts - 10.0)];
  }
  double expected = trials / 5.0;
  for (long c : counts)
    CHECK(std::abs(c - expected) <= 3.0 * std::sqrt(expected * 0.8));
  CHECK(testutil::chi_square_uniform(counts, expected) <
        testutil::chi_square_99(4));
}

TEST_CASE("k=5 reservoir over 20 edges is uniform by chi-square") {
  WindowConfig cfg;
  cfg.k = 5;
  const int trials = 10000;
  std::vector<long> counts(20, 0);
  for (int t = 0; t < trials; ++t) {
    WindowReservoir r(1, cfg, 5000 + t);
    for (int e = 0; e < 20; ++e)
      r.offer({1.0 * e, "n" + std::to_string(e), "m"});
    auto [samples, m] = r.close();
    REQUIRE(samples.size() == 5);
    for (const auto& s : samples) ++counts[static_cast<int>(s.ts)];
  }
  double expected = trials * 5.0 / 20.0;
  CHECK(testutil::chi_square_uniform(counts, expected) <
        testutil::chi_square_99(19));
}

TEST_CASE("reservoir samples are always a subset of offered edges") {
  WindowConfig cfg;
  cfg.k = 8;
  WindowReservoir r(1, cfg, 3);
  std::set<std::string> offered;
  Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    std::string src = "s" + std::to_string(rng.below(40));
    offered.insert(src);
    r.offer({60.0 * rng.unit(), src, "d"});
  }
  auto [samples, m] = r.close();
  CHECK(m == 300);
  for (const auto& e : samples) CHECK(offered.count(e.src) == 1);
}
