#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pcshift/environments.hpp"
#include "pcshift/piecewise.hpp"
#include "pcshift/stream.hpp"

using namespace pcshift;

namespace {

const double kE = std::numbers::e;

LogDensity random_density(Rng& rng, std::size_t max_pieces, double scale) {
  const auto s = random_stream(1, max_pieces - 1, 1.0, rng);
  std::vector<double> v = s.functions[0].values();
  for (double& x : v) x = scale * (2.0 * x - 1.0);
  return LogDensity(s.functions[0].breakpoints(), v);
}

}  // namespace

TEST_CASE("eval follows the half-open piece convention") {
  CHECK(PiecewiseConstant(0.7)(0.3) == 0.7);
  const auto u0 = left_step();
  CHECK(u0(0.5) == 0.0);
  CHECK(u0(0.49999) == 1.0);
  CHECK(u0(0.0) == 1.0);
  CHECK(u0(1.0) == 0.0);
  CHECK(eval(u0, 0.25) == 1.0);
  CHECK_THROWS_AS(u0(-0.1), DomainError);
  CHECK_THROWS_AS(u0(1.0000001), DomainError);
  CHECK_THROWS_AS(u0(std::nan("")), DomainError);
}

TEST_CASE("construction rejects malformed functions") {
  CHECK_THROWS_AS(PiecewiseConstant({0.5}, {1.0}), ValidationError);
  CHECK_THROWS_AS(PiecewiseConstant({0.6, 0.4}, {1.0, 0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(PiecewiseConstant({0.0}, {1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(PiecewiseConstant({1.0}, {1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(PiecewiseConstant({0.5, 0.5}, {1.0, 0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(PiecewiseConstant({}, {-std::numeric_limits<double>::infinity()}),
                  ValidationError);
  CHECK_NOTHROW(LogDensity({0.5}, {0.0, -std::numeric_limits<double>::infinity()}));
  CHECK_THROWS_AS(validate_utility(PiecewiseConstant({}, {1.5}), 1.0), ValidationError);
  CHECK_THROWS_AS(validate_utility(PiecewiseConstant({}, {-0.1}), 1.0), ValidationError);
}

TEST_CASE("merge is an exact sorted union") {
  const std::vector<std::vector<double>> a{{0.5}, {0.25, 0.5}};
  CHECK(merge(a) == std::vector<double>{0.25, 0.5});
  const std::vector<std::vector<double>> b{{}, {}};
  CHECK(merge(b).empty());
  const std::vector<std::vector<double>> c{{0.1, 0.9}, {0.5}};
  CHECK(merge(c) == std::vector<double>{0.1, 0.5, 0.9});
  CHECK(merge({0.1, 0.9}, {0.1, 0.3}) == std::vector<double>{0.1, 0.3, 0.9});
}

TEST_CASE("refining onto a merged grid keeps every value") {
  Rng rng(11);
  for (int c = 0; c < 50; ++c) {
    const auto s = random_stream(2, 6, 1.0, rng);
    const auto grid = merge(s.functions[0].breakpoints(), s.functions[1].breakpoints());
    const auto r = refine(s.functions[0], grid);
    for (int i = 0; i <= 200; ++i) {
      const double x = i / 200.0;
      CHECK(r(x) == s.functions[0](x));
    }
    CHECK(compact(r) == s.functions[0]);
  }
}

TEST_CASE("accumulate adds lambda u on the merged grid") {
  const LogDensity zero;
  const auto a = accumulate(zero, left_step(), 1.0);
  CHECK(a.breakpoints() == std::vector<double>{0.5});
  CHECK(a.values() == std::vector<double>{1.0, 0.0});
  CHECK(accumulate(zero, PiecewiseConstant(0.0), 1.0) == zero);
  const auto b = accumulate(a, right_step(), 1.0);
  CHECK(b.values() == std::vector<double>{1.0, 1.0});
  CHECK_THROWS_AS(accumulate(zero, left_step(), 0.0), ParameterError);
  CHECK_THROWS_AS(accumulate(zero, left_step(), 1.5), ParameterError);
  CHECK_THROWS_AS(accumulate(zero, left_step(), 0.6, 2.0), ParameterError);
  CHECK_NOTHROW(accumulate(zero, left_step(), 0.5, 2.0));
}

TEST_CASE("log_integral matches closed forms") {
  CHECK(log_integral(LogDensity()) == 0.0);
  const auto w = accumulate(LogDensity(), left_step(), 1.0);
  // log((e + 1) / 2)
  CHECK(log_integral(w) == doctest::Approx(0.6201145069582775).epsilon(1e-14));
  CHECK(log_integral(LogDensity({0.3}, {100.0, 100.0})) == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(log_integral(LogDensity({0.5}, {800.0, 0.0})) == doctest::Approx(800.0 + std::log(0.5)));
}

TEST_CASE("log_integral agrees with quadrature of exp(lambda u)") {
  Rng rng(5);
  for (int c = 0; c < 20; ++c) {
    const auto u = random_stream(1, 19, 1.0, rng).functions[0];
    const double lambda = 0.1 + 0.9 * rng.uniform();
    const double exact = log_integral(accumulate(LogDensity(), u, lambda));
    const double quad =
        std::log(oracle::quadrature([&](double x) { return lambda * u(x); }, 100000));
    CHECK(std::abs(exact - quad) < 1e-4);
    // The cell oracle is exact, so it pins the tighter tolerance.
    const std::vector<PiecewiseConstant> one{u};
    CHECK(std::abs(exact - std::log(oracle::restarted_normalizer(one, 1, 2, lambda))) < 1e-12);
  }
}

TEST_CASE("redundant breakpoints change neither values nor integral") {
  Rng rng(8);
  for (int c = 0; c < 30; ++c) {
    const auto w = random_density(rng, 6, 3.0);
    auto bp = w.breakpoints();
    auto v = w.values();
    const double cut = 0.5 * (w.piece_left(0) + w.piece_right(0));
    bp.insert(bp.begin(), cut);
    v.insert(v.begin(), v.front());
    const LogDensity split(bp, v);
    CHECK(std::abs(log_integral(split) - log_integral(w)) < 1e-12);
    for (int i = 0; i <= 100; ++i) CHECK(split(i / 100.0) == w(i / 100.0));
  }
}

TEST_CASE("shifting log values by c shifts the integral by c") {
  Rng rng(9);
  for (int c = 0; c < 20; ++c) {
    const auto w = random_density(rng, 8, 5.0);
    const double k = 50.0 * (rng.uniform() - 0.5);
    auto v = w.values();
    for (double& x : v) x += k;
    const LogDensity shifted(w.breakpoints(), v);
    CHECK(log_integral(shifted) == doctest::Approx(log_integral(w) + k).epsilon(1e-12));
    const auto a = piece_masses(w);
    const auto b = piece_masses(shifted);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("sample draws pieces by mass") {
  SUBCASE("uniform weight") {
    Rng rng(1);
    int left = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) left += sample(LogDensity({0.25}, {0.0, 0.0}), rng) < 0.25;
    CHECK(std::abs(left / double(n) - 0.25) < 4.0 * std::sqrt(0.25 * 0.75 / n));
  }
  SUBCASE("one accumulated step") {
    Rng rng(2);
    const auto w = accumulate(LogDensity(), left_step(), 1.0);
    const double p = kE / (kE + 1.0);
    CHECK(p == doctest::Approx(0.7310585786300049).epsilon(1e-15));
    CHECK(piece_masses(w)[0] == doctest::Approx(p).epsilon(1e-14));
    const int n = 1000000;
    int left = 0;
    for (int i = 0; i < n; ++i) left += sample(w, rng) < 0.5;
    CHECK(std::abs(left / double(n) - p) < 4.0 * std::sqrt(p * (1 - p) / n));
  }
  SUBCASE("degenerate mass") {
    Rng rng(3);
    const LogDensity w({0.3}, {0.0, -1e6});
    CHECK(piece_masses(w)[0] == doctest::Approx(1.0).epsilon(1e-15));
    for (int i = 0; i < 10000; ++i) CHECK(sample(w, rng) < 0.3);
  }
  SUBCASE("zero-mass pieces are never drawn") {
    Rng rng(4);
    const double ninf = -std::numeric_limits<double>::infinity();
    const LogDensity w({0.2, 0.6}, {ninf, 0.0, ninf});
    for (int i = 0; i < 10000; ++i) {
      const double x = sample(w, rng);
      CHECK(x >= 0.2);
      CHECK(x < 0.6);
    }
  }
}

TEST_CASE("per-piece sample frequencies sit within four standard errors") {
  Rng gen(21);
  for (int c = 0; c < 10; ++c) {
    const auto w = random_density(gen, 20, 2.0);
    const auto mass = piece_masses(w);
    std::vector<int> hits(w.pieces(), 0);
    Rng rng(100 + c);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++hits[w.piece_index(sample(w, rng))];
    for (std::size_t i = 0; i < mass.size(); ++i) {
      const double se = std::sqrt(mass[i] * (1 - mass[i]) / n);
      CHECK(std::abs(hits[i] / double(n) - mass[i]) <= 4.0 * se + 1e-12);
    }
  }
}

TEST_CASE("identical seeds give identical draws") {
  const auto w = accumulate(LogDensity(), left_step(), 0.7);
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) CHECK(sample(w, a) == sample(w, b));
}

TEST_CASE("expectation integrates the utility against the normalized weight") {
  CHECK(expectation(LogDensity(), left_step()) == doctest::Approx(0.5).epsilon(1e-15));
  const auto w = accumulate(LogDensity(), left_step(), 1.0);
  CHECK(expectation(w, left_step()) == doctest::Approx(kE / (kE + 1.0)).epsilon(1e-14));
}

TEST_CASE("log_sum_exp handles empty and infinite inputs") {
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::vector<double> none;
  CHECK(log_sum_exp(none) == ninf);
  const std::vector<double> xs{ninf, 0.0, 0.0};
  CHECK(log_sum_exp(xs) == doctest::Approx(std::log(2.0)));
  CHECK(log_add_exp(ninf, ninf) == ninf);
  CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
}

TEST_CASE("streams round-trip through JSON") {
  Rng rng(6);
  auto s = random_stream(12, 4, 2.0, rng);
  s.declared_beta = 0.5;
  const auto path = std::filesystem::temp_directory_path() / "pcshift_stream_roundtrip.json";
  save_stream(s, path);
  const auto back = load_stream(path);
  CHECK(back.functions == s.functions);
  CHECK(back.H == 2.0);
  CHECK(back.declared_beta == 0.5);
  CHECK(back.provenance == s.provenance);
  CHECK(back.truncated(5).horizon() == 5);
  CHECK_THROWS_AS(back.truncated(13), ParameterError);
  std::filesystem::remove(path);
}

TEST_CASE("malformed stream JSON is a validation error") {
  CHECK_THROWS_AS(json::parse(R"({"breakpoints":[0.5],"values":[1]})").get<PiecewiseConstant>(),
                  ValidationError);
  CHECK_THROWS_AS(json::parse(R"({"functions":[{"breakpoints":[],"values":[2]}],"H":1})")
                      .get<UtilityStream>(),
                  ValidationError);
}
