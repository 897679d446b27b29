#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "topofield/condfield.hpp"
#include "topofield/errors.hpp"
#include "topofield/rng.hpp"

using namespace topofield;

namespace {
GridDomain strip(int n) { return GridDomain{n, 1}; }
}  // namespace

TEST_CASE("percentile_99 examples") {
  std::vector<double> ascending;
  for (int i = 1; i <= 100; ++i) ascending.push_back(i);
  // index 0.99 * 99 = 98.01, between order statistics 99 and 100
  CHECK(percentile_99(ascending) == doctest::Approx(99.01).epsilon(1e-12));
  CHECK(percentile_99(std::vector<double>{5.0}) == 5.0);
  CHECK(percentile_99(std::vector<double>(17, 3.25)) == 3.25);
  CHECK_THROWS_AS(percentile_99(std::vector<double>{}), ParameterError);
}

TEST_CASE("gamma filter direct evaluation") {
  // With the linear-interpolation percentile, P99 of [0, 0.25, 1] is 0.985,
  // so the clip is active on a 3-vector: middle = 0.4 (0.25 / 0.985)^0.5.
  const GridDomain g3 = strip(3);
  const ConditioningField f = gamma_filter(std::vector<double>{0.0, 0.25, 1.0}, 0.5, g3);
  CHECK(f.values[0] == 0.0);
  CHECK(f.values[1] == doctest::Approx(0.4 * std::sqrt(0.25 / 0.985)).epsilon(1e-14));
  CHECK(f.values[2] == 0.4);

  // Duplicated top value keeps P99 at the max, so no clipping: 0.4 sqrt(0.25).
  const GridDomain g4 = strip(4);
  const ConditioningField nf = gamma_filter(std::vector<double>{0.0, 0.25, 1.0, 1.0}, 0.5, g4);
  CHECK(nf.values[0] == 0.0);
  CHECK(nf.values[1] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(nf.values[2] == 0.4);
  CHECK(nf.values[3] == 0.4);
}

TEST_CASE("gamma filter degenerate and error cases") {
  const ConditioningField f = gamma_filter(std::vector<double>(5, 2.5), 0.4, strip(5));
  for (double v : f.values) CHECK(v == 0.0);

  CHECK_THROWS_AS(gamma_filter(std::vector<double>{1.0, -0.5}, 0.4, strip(2)), ParameterError);
  CHECK_THROWS_AS(
      gamma_filter(std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()}, 0.4,
                   strip(2)),
      ParameterError);
  CHECK_THROWS_AS(gamma_filter(std::vector<double>{}, 0.4, strip(1)), ParameterError);
  CHECK_THROWS_AS(gamma_filter(std::vector<double>{1.0, 2.0}, 0.0, strip(2)), ParameterError);
  CHECK_THROWS_AS(gamma_filter(std::vector<double>{1.0, 2.0}, 1.0, strip(2)), ParameterError);
}

TEST_CASE("log filter direct evaluation") {
  const double e = std::exp(1.0);
  const ConditioningField f = log_filter(std::vector<double>{1.0, e, e * e}, strip(3));
  CHECK(f.values[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(f.values[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(f.values[2] == 0.4);
}

TEST_CASE("log filter floors zero entries") {
  const ConditioningField f = log_filter(std::vector<double>{0.0, 2.0, 8.0}, strip(3));
  CHECK(f.values[0] == 0.0);  // floored entry is the minimum
  for (double v : f.values) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
    CHECK(v <= 0.4);
  }
  CHECK(f.values[2] == 0.4);
}

TEST_CASE("log filter degenerate cases") {
  for (const auto& input : {std::vector<double>(4, 3.0), std::vector<double>(4, 0.0)}) {
    const ConditioningField f = log_filter(input, strip(4));
    for (double v : f.values) CHECK(v == 0.0);
  }
}

TEST_CASE("filters are bit-identical under power-of-two input scaling") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 40);
    std::vector<double> raw;
    for (int i = 0; i < n; ++i) raw.push_back(rng.uniform(0.0, 10.0));
    const double scale = std::ldexp(1.0, static_cast<int>(rng.next_u64() % 41) - 20);
    std::vector<double> scaled = raw;
    for (double& v : scaled) v *= scale;

    const double vf = rng.uniform(0.1, 0.9);
    CHECK(gamma_filter(raw, vf, strip(n)).values == gamma_filter(scaled, vf, strip(n)).values);
    CHECK(log_filter(raw, strip(n)).values == log_filter(scaled, strip(n)).values);
  }
}

TEST_CASE("filters are invariant under arbitrary positive scaling to near round-off") {
  std::vector<double> raw{0.0, 0.25, 1.0, 0.03, 0.7};
  std::vector<double> scaled = raw;
  for (double& v : scaled) v *= 7.3;
  const auto a = gamma_filter(raw, 0.5, strip(5)).values;
  const auto b = gamma_filter(scaled, 0.5, strip(5)).values;
  const auto la = log_filter(raw, strip(5)).values;
  const auto lb = log_filter(scaled, strip(5)).values;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
    CHECK(la[i] == doctest::Approx(lb[i]).epsilon(1e-13));
  }
}

TEST_CASE("filter range, endpoints and monotonicity properties") {
  Rng rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 60);
    std::vector<double> raw;
    for (int i = 0; i < n; ++i) raw.push_back(rng.uniform(0.0, 100.0));
    const double vf = rng.uniform(0.05, 0.95);

    const auto g = gamma_filter(raw, vf, strip(n)).values;
    const auto l = log_filter(raw, strip(n)).values;
    double gmin = 1e30, gmax = -1e30, lmin = 1e30, lmax = -1e30;
    for (int i = 0; i < n; ++i) {
      CHECK(g[static_cast<std::size_t>(i)] >= 0.0);
      CHECK(g[static_cast<std::size_t>(i)] <= 0.4);
      CHECK(l[static_cast<std::size_t>(i)] >= 0.0);
      CHECK(l[static_cast<std::size_t>(i)] <= 0.4);
      gmin = std::min(gmin, g[static_cast<std::size_t>(i)]);
      gmax = std::max(gmax, g[static_cast<std::size_t>(i)]);
      lmin = std::min(lmin, l[static_cast<std::size_t>(i)]);
      lmax = std::max(lmax, l[static_cast<std::size_t>(i)]);
    }
    // endpoint attainment on non-constant input
    CHECK(gmin <= 1e-12);
    CHECK(gmax >= 0.4 - 1e-12);
    CHECK(lmin <= 1e-12);
    CHECK(lmax >= 0.4 - 1e-12);

    // monotone: log everywhere; gamma after the P99 clip ties the top values
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (raw[static_cast<std::size_t>(i)] <= raw[static_cast<std::size_t>(j)]) {
          CHECK(l[static_cast<std::size_t>(i)] <= l[static_cast<std::size_t>(j)] + 1e-15);
          CHECK(g[static_cast<std::size_t>(i)] <= g[static_cast<std::size_t>(j)] + 1e-15);
        }
      }
    }
  }
}

TEST_CASE("filters are deterministic") {
  Rng rng(5);
  std::vector<double> raw;
  for (int i = 0; i < 33; ++i) raw.push_back(rng.uniform(0.0, 4.0));
  CHECK(gamma_filter(raw, 0.33, strip(33)).values == gamma_filter(raw, 0.33, strip(33)).values);
  CHECK(log_filter(raw, strip(33)).values == log_filter(raw, strip(33)).values);
}

TEST_CASE("bilinear sampling reproduces lattice points and pair midpoints") {
  ConditioningField f;
  f.grid = {3, 3};
  f.filter = FilterKind::none;
  f.values = {0.1, 0.2, 0.3, 0.15, 0.25, 0.35, 0.05, 0.4, 0.0};  // element order

  for (int ex = 0; ex < 3; ++ex) {
    for (int ey = 0; ey < 3; ++ey) {
      const double got = sample_at_grid(f, ex, ey);
      CHECK(got == f.values[static_cast<std::size_t>(f.grid.element_index(ex, ey))]);
    }
  }
  const double a = f.values[static_cast<std::size_t>(f.grid.element_index(0, 1))];
  const double b = f.values[static_cast<std::size_t>(f.grid.element_index(1, 1))];
  CHECK(sample_at_grid(f, 0.5, 1.0) == doctest::Approx((a + b) / 2).epsilon(1e-15));
}

TEST_CASE("bilinear sampling matches the closed-form oracle at random interior points") {
  ConditioningField f;
  f.grid = {3, 3};
  f.values = {0.1, 0.2, 0.3, 0.15, 0.25, 0.35, 0.05, 0.4, 0.0};
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const double gx = rng.uniform(0.0, 2.0);
    const double gy = rng.uniform(0.0, 2.0);
    const int ex = std::min(1, static_cast<int>(gx));
    const int ey = std::min(1, static_cast<int>(gy));
    auto v = [&](int x, int y) {
      return f.values[static_cast<std::size_t>(f.grid.element_index(x, y))];
    };
    const double expected = oracle::bilinear_formula(v(ex, ey), v(ex + 1, ey), v(ex, ey + 1),
                                                     v(ex + 1, ey + 1), gx - ex, gy - ey);
    CHECK(std::abs(sample_at_grid(f, gx, gy) - expected) <= 1e-12);
  }
}

TEST_CASE("normalized-coordinate sampling clamps boundary half-cells and checks bounds") {
  ConditioningField f;
  f.grid = {4, 2};
  f.values = {0.0, 0.1, 0.2, 0.3, 0.25, 0.05, 0.4, 0.34};
  // domain box: x in [-0.5, 0.5], y in [-0.25, 0.25]
  CHECK(sample_bilinear(f, -0.5, -0.25) ==
        f.values[static_cast<std::size_t>(f.grid.element_index(0, 0))]);
  CHECK(sample_bilinear(f, 0.5, 0.25) ==
        f.values[static_cast<std::size_t>(f.grid.element_index(3, 1))]);
  CHECK_THROWS_AS(sample_bilinear(f, 0.51, 0.0), ParameterError);
  CHECK_THROWS_AS(sample_bilinear(f, 0.0, 0.3), ParameterError);
}

TEST_CASE("single-row and single-column fields sample without neighbours") {
  ConditioningField f;
  f.grid = {1, 1};
  f.values = {0.2};
  CHECK(sample_at_grid(f, 0.0, 0.0) == 0.2);
  CHECK(sample_bilinear(f, 0.0, 0.0) == 0.2);

  ConditioningField row;
  row.grid = {3, 1};
  row.values = {0.0, 0.2, 0.4};
  CHECK(sample_at_grid(row, 1.5, 0.0) == doctest::Approx(0.3).epsilon(1e-15));
}
