#include <doctest.h>

#include <cmath>

#include "pcshift/environments.hpp"
#include "pcshift/regret.hpp"

using namespace pcshift;

TEST_CASE("step primitives") {
  CHECK(left_step()(0.0) == 1.0);
  CHECK(left_step()(0.4999) == 1.0);
  CHECK(left_step()(0.5) == 0.0);
  CHECK(left_step()(1.0) == 0.0);
  CHECK(right_step()(0.5) == 1.0);
  CHECK(right_step()(1.0) == 1.0);
  CHECK(box(0.0, 0.25).breakpoints() == std::vector<double>{0.25});
  CHECK(box(0.25, 1.0).breakpoints() == std::vector<double>{0.25});
  CHECK(box(0.25, 0.5).values() == std::vector<double>{0.0, 1.0, 0.0});
  CHECK_THROWS_AS(box(0.5, 0.5), ParameterError);
}

TEST_CASE("counterexample stream") {
  const auto s = counterexample_stream(6);
  REQUIRE(s.horizon() == 6);
  for (std::size_t t = 0; t < 3; ++t) CHECK(s.functions[t] == left_step());
  for (std::size_t t = 3; t < 6; ++t) CHECK(s.functions[t] == right_step());
  CHECK(s.provenance.at("generator") == "counterexample");
  CHECK_THROWS_AS(counterexample_stream(5), ParameterError);
  CHECK_THROWS_AS(counterexample_stream(0), ParameterError);
}

TEST_CASE("alternating stream") {
  const auto s = alternating_stream(7, 3);
  REQUIRE(s.horizon() == 7);
  CHECK(s.functions[0] == left_step());
  CHECK(s.functions[2] == left_step());
  CHECK(s.functions[3] == right_step());
  CHECK(s.functions[5] == right_step());
  CHECK(s.functions[6] == left_step());
  CHECK(shifted_opt(s.view(), 3).value == 7.0);
}

TEST_CASE("two-expert stream") {
  Rng rng(11);
  const auto s = two_expert_stream(64, 4, rng);
  std::size_t left = 0;
  for (const auto& u : s.functions) {
    CHECK((u == left_step() || u == right_step()));
    if (u == left_step()) ++left;
  }
  // Any fixed point collects exactly the rounds of its side.
  CHECK(interval_best(s.view(), 1, 64).value == static_cast<double>(std::max(left, 64 - left)));
  const double half = 0.5 * 64;
  CHECK(std::abs(static_cast<double>(left) - half) < 4 * std::sqrt(64.0 / 4));
  CHECK(shifted_opt(s.view(), 64).value == 64.0);
  CHECK_THROWS_AS(two_expert_stream(10, 4, rng), ParameterError);
}

TEST_CASE("random stream") {
  Rng a(3), b(3);
  const auto s = random_stream(40, 4, 2.0, a, 1.0 / 8);
  const auto t = random_stream(40, 4, 2.0, b, 1.0 / 8);
  CHECK(s.functions == t.functions);
  CHECK_NOTHROW(s.validate());
  for (const auto& u : s.functions) {
    CHECK(u.breakpoints().size() <= 4);
    CHECK(u.min_value() >= 0.0);
    CHECK(u.max_value() <= 2.0);
    for (double v : u.values()) CHECK(std::fmod(v * 8, 1.0) == 0.0);
  }
  CHECK(s.H == 2.0);
}

TEST_CASE("lower-bound stream structure") {
  Rng rng(5);
  const std::size_t T = 512;
  const std::size_t s = 4;
  const double beta = 0.6;
  const auto st = lower_bound_stream(T, s, beta, rng);
  CHECK(st.horizon() == T);
  CHECK(st.declared_beta == beta);
  CHECK_NOTHROW(st.validate());
  const auto& phases = st.provenance.at("phases");
  REQUIRE(phases.size() == s);
  const double delta = std::pow(static_cast<double>(T), -beta);
  CHECK(st.provenance.at("spacing").get<double>() == doctest::Approx(delta).epsilon(1e-15));
  const auto halving = static_cast<std::size_t>(std::llround(std::pow(512.0, 0.4)));
  std::size_t total = 0;
  for (const auto& ph : phases) {
    const auto pts = ph.at("points").get<std::vector<double>>();
    const auto iv = ph.at("interval").get<std::vector<double>>();
    for (std::size_t j = 1; j < pts.size(); ++j) CHECK(std::abs(pts[j] - pts[j - 1] - delta) < 1e-12);
    CHECK(pts.front() > iv[0]);
    CHECK(pts.back() < iv[1]);
    CHECK(ph.at("halving_functions") == halving);
    const auto fin = ph.at("final_interval").get<std::vector<double>>();
    CHECK(fin[0] >= iv[0]);
    CHECK(fin[1] <= iv[1]);
    total += ph.at("main_functions").get<std::size_t>() + ph.at("halving_functions").get<std::size_t>();
  }
  CHECK(total == T);
  // Every function is a box with at most two cuts and unit height.
  for (const auto& u : st.functions) {
    CHECK(u.breakpoints().size() <= 2);
    CHECK(u.max_value() == 1.0);
  }
}

TEST_CASE("lower-bound stream rejects beta at or below the critical value") {
  Rng rng(0);
  const double critical = std::log(12.0) / std::log(512.0);
  CHECK_THROWS_AS(lower_bound_stream(512, 4, critical, rng), ParameterError);
  CHECK_THROWS_AS(lower_bound_stream(512, 4, 0.3, rng), ParameterError);
  CHECK_THROWS_AS(lower_bound_stream(512, 4, 1.0, rng), ParameterError);
  CHECK_NOTHROW(lower_bound_stream(512, 4, critical + 0.05, rng));
}

TEST_CASE("lower-bound stream is deterministic in its rng") {
  Rng a(9), b(9);
  CHECK(lower_bound_stream(256, 2, 0.7, a).functions == lower_bound_stream(256, 2, 0.7, b).functions);
}

TEST_CASE("dispersion profile") {
  SUBCASE("a shared discontinuity counts every function") {
    std::vector<PiecewiseConstant> u(10, left_step());
    const std::vector<double> eps{1e-6, 0.1};
    CHECK(dispersion_profile(u, eps) == std::vector<std::size_t>{10, 10});
  }
  SUBCASE("evenly spread discontinuities") {
    const std::size_t T = 16;
    std::vector<PiecewiseConstant> u;
    for (std::size_t i = 1; i <= T; ++i) u.push_back(box(0.0, static_cast<double>(i) / (T + 1)));
    const double gap = 1.0 / (T + 1);
    const std::vector<double> eps{0.4 * gap, 0.6 * gap, 1.1 * gap};
    CHECK(dispersion_profile(u, eps) == std::vector<std::size_t>{1, 2, 3});
  }
  SUBCASE("breakpoints that join equal values are not discontinuities") {
    std::vector<PiecewiseConstant> u{PiecewiseConstant({0.5}, {1.0, 1.0}), left_step()};
    const std::vector<double> eps{0.01};
    CHECK(dispersion_profile(u, eps) == std::vector<std::size_t>{1});
  }
  SUBCASE("monotone in epsilon") {
    Rng rng(4);
    const auto s = random_stream(50, 3, 1.0, rng);
    const std::vector<double> eps{0.001, 0.01, 0.05, 0.2, 0.6};
    const auto p = dispersion_profile(s.view(), eps);
    for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] >= p[i - 1]);
    CHECK(p.back() <= 50);
  }
}

TEST_CASE("lower-bound stream is dispersed at its declared rate") {
  Rng rng(21);
  const std::size_t T = 1024;
  const double beta = 0.6;
  const auto st = lower_bound_stream(T, 4, beta, rng);
  const std::vector<double> eps{std::pow(static_cast<double>(T), -beta)};
  const double count = static_cast<double>(dispersion_profile(st.view(), eps)[0]);
  const double scale = std::pow(static_cast<double>(T), 1 - beta) * std::log(static_cast<double>(T));
  CHECK(count / scale <= 10.0);
}
