#include <doctest.h>

#include <cmath>
#include <numbers>
#include <thread>

#include "fibdisc/splines.hpp"
#include "oracles.hpp"

using namespace fibdisc;

namespace {

constexpr double kPi = std::numbers::pi;

double hat(int r, double u, double x) { return hat_eval(HatSpec(r, u), x); }

}  // namespace

TEST_CASE("hat_eval examples") {
  CHECK(hat(1, 0.5, 0.0) == 1.0);
  CHECK(hat(2, 0.3, 0.1) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(hat(3, 1.0, 0.0) == doctest::Approx(0.75).epsilon(1e-15));
  // half-open indicator
  CHECK(hat(1, 0.5, -0.25) == 1.0);
  CHECK(hat(1, 0.5, 0.25) == 0.0);
  CHECK_THROWS_AS(HatSpec(2, 0.0), std::domain_error);
  CHECK_THROWS_AS(HatSpec(2, -1.0), std::domain_error);
  CHECK_THROWS_AS(HatSpec(0, 1.0), std::domain_error);
}

TEST_CASE("exact spline coefficients") {
  // M_2 pieces around their midpoints -1/2 and 1/2: 1/2 + t and 1/2 - t
  const auto m2 = cardinal_bspline_exact(2);
  REQUIRE(m2.size() == 2);
  CHECK(m2[0][0] == "1/2");
  CHECK(m2[0][1] == "1");
  CHECK(m2[1][1] == "-1");
  // the middle piece of M_3 at its midpoint is 3/4
  CHECK(cardinal_bspline_exact(3)[1][0] == "3/4");
}

TEST_CASE("property: hat agrees with the Cox-de Boor recurrence") {
  oracle::Gen gen(201);
  for (int r = 1; r <= kMaxSplineOrder; ++r) {
    for (int i = 0; i < 60; ++i) {
      const double u = gen.real(0.05, 1.0);
      const double x = gen.real(-0.6 * r * u, 0.6 * r * u);
      const double ref = oracle::hat(r, u, x);
      CHECK(std::abs(hat(r, u, x) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("property: hat invariants") {
  oracle::Gen gen(202);
  for (int r = 1; r <= 6; ++r) {
    for (int i = 0; i < 20; ++i) {
      const double u = gen.real(0.05, 1.0);
      const HatSpec spec(r, u);
      // nonnegative, supported on the open interval of half-width r u / 2
      for (int j = 0; j < 50; ++j) {
        const double x = gen.real(-r * u, r * u);
        CHECK(hat_eval(spec, x) >= 0.0);
        if (std::abs(x) >= spec.half_width()) CHECK(hat_eval(spec, x) == 0.0);
      }
      // integral u^r
      const double integral =
          oracle::integrate([&](double x) { return hat_eval(spec, x); }, -spec.half_width(),
                            spec.half_width(), oracle::knots(r, u));
      CHECK(integral == doctest::Approx(std::pow(u, r)).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: convolution identity") {
  oracle::Gen gen(203);
  for (int r = 2; r <= 4; ++r) {
    for (int i = 0; i < 200; ++i) {
      const double u = gen.real(0.05, 1.0);
      const double x = gen.real(-0.6 * r * u, 0.6 * r * u);
      const double conv = oracle::integrate([&](double y) { return hat(r - 1, u, x - y); },
                                            -0.5 * u, 0.5 * u, oracle::knots(r - 1, -u, x));
      CHECK(std::abs(conv - hat(r, u, x)) <= 1e-9);
    }
  }
}

TEST_CASE("property: r = 2 closed form") {
  oracle::Gen gen(204);
  for (int i = 0; i < 500; ++i) {
    const double u = gen.real(0.01, 1.0);
    const double x = gen.real(-1.5 * u, 1.5 * u);
    CHECK(std::abs(hat(2, u, x) - std::max(u - std::abs(x), 0.0)) <= 1e-15);
  }
}

TEST_CASE("hat_fourier examples") {
  CHECK(hat_fourier(HatSpec(3, 0.4), 0.0) == doctest::Approx(0.064).epsilon(1e-15));
  CHECK(hat_fourier(HatSpec(1, 1.0), 0.5) == doctest::Approx(2.0 / kPi).epsilon(1e-15));
  CHECK(hat_fourier(HatSpec(2, 0.5), 1.0) == doctest::Approx(1.0 / (kPi * kPi)).epsilon(1e-15));
}

TEST_CASE("property: transform matches quadrature of the hat") {
  oracle::Gen gen(205);
  for (int r = 1; r <= 4; ++r) {
    for (int i = 0; i < 50; ++i) {
      const double u = gen.real(0.05, 1.0);
      const double y = gen.real(-20.0, 20.0);
      const HatSpec spec(r, u);
      const auto k = oracle::knots(r, u);
      const double w = spec.half_width();
      const double re = oracle::integrate(
          [&](double x) { return oracle::hat(r, u, x) * std::cos(2 * kPi * y * x); }, -w, w, k, 16);
      const double im = oracle::integrate(
          [&](double x) { return -oracle::hat(r, u, x) * std::sin(2 * kPi * y * x); }, -w, w, k,
          16);
      CHECK(std::abs(re - hat_fourier(spec, y)) <= 1e-8);
      CHECK(std::abs(im) <= 1e-8);
    }
  }
}

TEST_CASE("boxes") {
  const SmoothBox box(2, {0.5, 0.5}, {0.3, 0.2});
  const std::vector<double> x{0.6, 0.5};
  CHECK(box_hat_eval(box, x) == doctest::Approx(0.04).epsilon(1e-14));
  const std::vector<double> center{0.5, 0.5};
  CHECK(box_hat_eval(box, center) == doctest::Approx(0.3 * 0.2).epsilon(1e-14));
  const std::vector<double> outside{0.5, 0.71};
  CHECK(box_hat_eval(box, outside) == 0.0);
  CHECK(box_hat_integral(box) == doctest::Approx(0.0036).epsilon(1e-14));
  CHECK(box_hat_integral(SmoothBox(1, {0.5, 0.5}, {0.5, 0.5})) == 0.25);
  CHECK(box.volume() == doctest::Approx(0.6 * 0.4).epsilon(1e-14));
  CHECK(box.inside_unit_cube());
  CHECK(box.periodic_admissible());
  CHECK_FALSE(SmoothBox(2, {0.1, 0.5}, {0.3, 0.2}).inside_unit_cube());
  CHECK_FALSE(SmoothBox(2, {0.5, 0.5}, {0.6, 0.2}).periodic_admissible());
  CHECK_THROWS_AS(SmoothBox(2, {0.5}, {0.3, 0.2}), std::domain_error);
}

TEST_CASE("periodized box hat") {
  const SmoothBox box(2, {0.0, 0.0}, {0.4, 0.4});
  const std::vector<double> x{0.9, 0.0};
  CHECK(periodized_box_hat_eval(box, x) == doctest::Approx(0.12).epsilon(1e-14));
  const std::vector<double> gap{0.5, 0.0};
  CHECK(periodized_box_hat_eval(box, gap) == 0.0);
  CHECK_THROWS_AS(periodized_box_hat_eval(SmoothBox(2, {0.0, 0.0}, {0.6, 0.4}), x),
                  std::domain_error);

  oracle::Gen gen(206);
  for (int i = 0; i < 200; ++i) {
    const int r = static_cast<int>(gen.integer(1, 5));
    const double u1 = gen.real(0.02, 1.0) / r;
    const double u2 = gen.real(0.02, 1.0) / r;
    const double z1 = gen.real(0.0, 1.0);
    const double z2 = gen.real(0.0, 1.0);
    const std::vector<double> p{gen.real(0.0, 1.0), gen.real(0.0, 1.0)};
    const double ref = oracle::periodized_hat(r, u1, p[0] - z1) * oracle::periodized_hat(r, u2, p[1] - z2);
    CHECK(periodized_box_hat_eval(SmoothBox(r, {z1, z2}, {u1, u2}), p) ==
          doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("periodized Fourier coefficients") {
  const SmoothBox box(1, {0.0, 0.0}, {0.5, 0.5});
  const auto c = periodized_fourier_coeff(box, {1, 1});
  CHECK(c.real() == doctest::Approx(1.0 / (kPi * kPi)).epsilon(1e-14));
  CHECK(std::abs(c.imag()) <= 1e-15);
  CHECK(periodized_fourier_coeff(box, {0, 0}).real() == 0.25);

  // coefficient of the periodization by 2-D quadrature over the torus
  const SmoothBox b2(2, {0.3, 0.7}, {0.2, 0.35});
  for (const FreqIndex k : {FreqIndex{1, 2}, FreqIndex{-3, 1}, FreqIndex{4, -5}}) {
    auto axis = [&](int j, std::int64_t kj, bool imag) {
      const double zj = b2.z()[static_cast<std::size_t>(j)];
      const double uj = b2.u()[static_cast<std::size_t>(j)];
      return oracle::integrate(
          [&](double x) {
            const double ph = -2 * kPi * static_cast<double>(kj) * x;
            return oracle::periodized_hat(2, uj, x - zj) * (imag ? std::sin(ph) : std::cos(ph));
          },
          0.0, 1.0, {zj - uj, zj, zj + uj, zj - uj + 1, zj + 1, zj + uj - 1, zj - 1}, 8);
    };
    const std::complex<double> c1{axis(0, k.k1, false), axis(0, k.k1, true)};
    const std::complex<double> c2{axis(1, k.k2, false), axis(1, k.k2, true)};
    CHECK(std::abs(c1 * c2 - periodized_fourier_coeff(b2, k)) <= 1e-12);
  }
}

TEST_CASE("shell majorant and sigma sums") {
  const SmoothBox box(2, {0.5, 0.5}, {0.25, 0.25});
  CHECK(shell_majorant(box, DyadicShell({2, 2})) == doctest::Approx(1.0 / 256).epsilon(1e-14));
  CHECK(shell_majorant(box, DyadicShell({0, 0})) == doctest::Approx(std::pow(1.0 / 16, 2)).epsilon(1e-14));

  const std::vector<double> u{0.5, 0.5};
  CHECK(sigma_sum(2.0, u, 2) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(sigma_sum(2.0, u, 0) == doctest::Approx(0.25).epsilon(1e-14));
  const std::vector<double> one{0.3};
  for (int t = 0; t < 8; ++t) {
    const double a = std::exp2(t) * 0.3;
    CHECK(sigma_sum(3.0, one, t) == doctest::Approx(std::pow(std::min(a, 1 / a), 1.5)).epsilon(1e-14));
  }

  // decay in t
  double prev = 1.0;
  for (int t = 4; t <= 30; t += 2) {
    double top = 0.0;
    for (const auto& s : DyadicShell::at_level(2, t)) top = std::max(top, shell_majorant(box, s));
    CHECK(top <= prev);
    prev = top;
  }
  CHECK(prev < 1e-12);
}

TEST_CASE("property: majorant dominates coefficients on its shell") {
  oracle::Gen gen(207);
  for (int i = 0; i < 500; ++i) {
    const int r = static_cast<int>(gen.integer(1, 4));
    const SmoothBox box(r, {gen.real(0, 1), gen.real(0, 1)},
                        {gen.log_uniform(1e-3, 1.0) / r, gen.log_uniform(1e-3, 1.0) / r});
    const FreqIndex k{gen.integer(-4096, 4096), gen.integer(-4096, 4096)};
    CHECK(std::abs(periodized_fourier_coeff(box, k)) <=
          shell_majorant(box, DyadicShell::containing(k)) + 1e-12);
  }
}

TEST_CASE("property: L1 modulus of smoothness is at most (2 t)^r") {
  oracle::Gen gen(208);
  for (int r : {1, 2, 3}) {
    for (int i = 0; i < 20; ++i) {
      const double u = gen.real(0.05, 1.0);
      const double t = gen.real(1e-3, u);
      auto diff = [&](double x) {
        double acc = 0.0;
        double binom = 1.0;
        for (int j = 0; j <= r; ++j) {
          acc += ((r - j) % 2 ? -1.0 : 1.0) * binom * oracle::hat(r, u, x + j * t);
          binom = binom * (r - j) / (j + 1);
        }
        return std::abs(acc);
      };
      std::vector<double> cuts;
      for (int j = 0; j <= r; ++j) {
        for (double k : oracle::knots(r, u, -j * t)) cuts.push_back(k);
      }
      const double l1 = oracle::integrate(diff, -0.5 * r * u - r * t, 0.5 * r * u, cuts, 16);
      CHECK(l1 <= std::pow(2.0 * t, r) * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("concurrent first use of the spline table") {
  std::vector<std::thread> pool;
  std::vector<double> out(8);
  for (int i = 0; i < 8; ++i) {
    pool.emplace_back([i, &out] { out[static_cast<std::size_t>(i)] = cardinal_bspline(9 + i % 4)(0.0); });
  }
  for (auto& th : pool) th.join();
  for (int i = 0; i < 8; ++i) {
    CHECK(out[static_cast<std::size_t>(i)] == doctest::Approx(oracle::cardinal_n(9 + i % 4, 0.5 * (9 + i % 4))));
  }
}
