#include <doctest.h>

#include <complex>
#include <numbers>
#include <set>

#include "fibdisc/lattice.hpp"
#include "oracles.hpp"

using namespace fibdisc;

TEST_CASE("fib base values and recurrence") {
  CHECK(fib(0) == 1);
  CHECK(fib(1) == 1);
  CHECK(fib(10) == 89);
  for (int n = 2; n <= kMaxFibIndex; ++n) CHECK(fib(n) == fib(n - 1) + fib(n - 2));
  for (int n = 0; n <= 60; ++n) CHECK(fib(n) == oracle::fib(n));
  CHECK_THROWS_AS(fib(-1), std::out_of_range);
  CHECK_THROWS_AS(fib(kMaxFibIndex + 1), std::out_of_range);
  CHECK(FibIndex(4).b() == 5);
  CHECK(FibIndex(4).b_prev() == 3);
}

TEST_CASE("fibonacci point set") {
  const auto p4 = fibonacci_point_set(FibIndex(4));
  REQUIRE(p4.points.size() == 5);
  CHECK(p4.points[0].x1 == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(p4.points[0].x2 == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(p4.points[4].x1 == 0.0);
  CHECK(p4.points[4].x2 == 0.0);

  const auto p2 = fibonacci_point_set(FibIndex(2));
  REQUIRE(p2.points.size() == 2);
  CHECK(p2.points[0].x1 == 0.5);
  CHECK(p2.points[0].x2 == 0.5);

  CHECK_THROWS_AS(fibonacci_point_set(FibIndex(1)), std::domain_error);

  for (int n : {5, 9, 13, 17}) {
    const auto ps = fibonacci_point_set(FibIndex(n));
    const auto ref = oracle::points(n);
    REQUIRE(ps.points.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(ps.points[i].x1 == doctest::Approx(ref[i][0]).epsilon(1e-15));
      CHECK(ps.points[i].x2 == doctest::Approx(ref[i][1]).epsilon(1e-15));
      CHECK(ps.points[i].x1 >= 0.0);
      CHECK(ps.points[i].x1 < 1.0);
      CHECK(ps.points[i].x2 >= 0.0);
      CHECK(ps.points[i].x2 < 1.0);
    }
  }
}

TEST_CASE("dual lattice membership and phase") {
  const FibIndex n4(4);
  CHECK(in_dual_lattice({0, 0}, n4));
  CHECK(in_dual_lattice({2, 1}, n4));
  CHECK_FALSE(in_dual_lattice({1, 1}, n4));
  CHECK(dual_phase({0, 0}, n4) == 1.0);
  CHECK(dual_phase({2, 1}, n4) == 1.0);
  CHECK(dual_phase({1, 0}, n4) == 0.0);

  // exact integer arithmetic near the top of the supported range
  const FibIndex n90(90);
  CHECK(in_dual_lattice({n90.b(), 0}, n90));
  CHECK(in_dual_lattice({-n90.b_prev(), 1}, n90));
  CHECK_FALSE(in_dual_lattice({-n90.b_prev() + 1, 1}, n90));
}

TEST_CASE("property: phase equals the normalized exponential sum") {
  oracle::Gen gen(101);
  for (int n : {5, 8, 12}) {
    const auto pts = oracle::points(n);
    for (int i = 0; i < 200; ++i) {
      const FreqIndex k{gen.integer(-1000, 1000), gen.integer(-1000, 1000)};
      std::complex<double> acc = 0.0;
      for (const auto& y : pts) {
        acc += std::polar(1.0, 2.0 * std::numbers::pi * (k.k1 * y[0] + k.k2 * y[1]));
      }
      acc /= static_cast<double>(pts.size());
      CHECK(std::abs(acc - dual_phase(k, FibIndex(n))) <= 1e-10);
    }
  }
}

TEST_CASE("enumerate_dual_in_box") {
  CHECK(enumerate_dual_in_box(FibIndex(4), 1).empty());

  const auto box2 = enumerate_dual_in_box(FibIndex(4), 2);
  const std::vector<FreqIndex> expect4{{-2, -1}, {-1, 2}, {1, -2}, {2, 1}};
  CHECK(box2 == expect4);

  const auto box_n2 = enumerate_dual_in_box(FibIndex(2), 1);
  const std::vector<FreqIndex> expect2{{-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
  CHECK(box_n2 == expect2);

  CHECK_THROWS_AS(enumerate_dual_in_box(FibIndex(4), 0), std::domain_error);
}

TEST_CASE("property: enumeration matches the full scan") {
  oracle::Gen gen(102);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = static_cast<int>(gen.integer(2, 12));
    const auto K = gen.integer(1, 60);
    std::vector<FreqIndex> ref;
    for (const auto& [a, b] : oracle::dual_box(n, K)) ref.push_back({a, b});
    CHECK(enumerate_dual_in_box(FibIndex(n), K) == ref);
  }
}

TEST_CASE("min_hyperbolic_norm") {
  CHECK(min_hyperbolic_norm(FibIndex(4)) == 2);
  CHECK(min_hyperbolic_norm(FibIndex(3)) == 1);
  for (int n = 3; n <= 14; ++n) {
    CHECK(min_hyperbolic_norm(FibIndex(n)) == oracle::min_hyperbolic_norm(n));
    CHECK(min_hyperbolic_norm(FibIndex(n)) <= fib(n));
  }
  CHECK_THROWS_AS(min_hyperbolic_norm(FibIndex(2)), std::domain_error);
}

TEST_CASE("property: no dual point inside the hyperbolic cross below the minimum") {
  double gamma = 1.0;
  for (int n = 5; n <= 10; ++n) {
    gamma = std::min(gamma, static_cast<double>(oracle::min_hyperbolic_norm(n)) /
                                static_cast<double>(oracle::fib(n)));
  }
  for (int n = 5; n <= 20; ++n) {
    const FibIndex idx(n);
    const auto m = min_hyperbolic_norm(idx);
    bool clean = true;
    for_each_dual_in_box(idx, idx.b(), [&](const FreqIndex& k) {
      if (k.hyperbolic_norm() < m) clean = false;
    });
    CHECK(clean);
    CHECK(static_cast<double>(m) / static_cast<double>(idx.b()) >= gamma);
  }
}

TEST_CASE("dyadic shells") {
  const DyadicShell s21({2, 1});
  CHECK(s21.level() == 3);
  CHECK(s21.contains(FreqIndex{2, 1}));
  CHECK(s21.contains(FreqIndex{-3, -1}));
  CHECK_FALSE(s21.contains(FreqIndex{1, 1}));
  CHECK_FALSE(s21.contains(FreqIndex{4, 1}));
  CHECK(DyadicShell::containing(FreqIndex{0, 0}) == DyadicShell({0, 0}));
  CHECK(DyadicShell::containing(FreqIndex{-5, 1}) == DyadicShell({3, 1}));

  const auto level2 = DyadicShell::at_level(2, 2);
  REQUIRE(level2.size() == 3);
  CHECK(level2[0] == DyadicShell({0, 2}));
  CHECK(level2[1] == DyadicShell({1, 1}));
  CHECK(level2[2] == DyadicShell({2, 0}));
  CHECK(DyadicShell::at_level(3, 4).size() == 15);
  CHECK_THROWS_AS(DyadicShell({-1, 0}), std::domain_error);
}

TEST_CASE("property: shells partition the integer plane") {
  for (std::int64_t k1 = -1024; k1 <= 1024; k1 += 7) {
    for (std::int64_t k2 = -1024; k2 <= 1024; k2 += 5) {
      const FreqIndex k{k1, k2};
      int hits = 0;
      for (int t = 0; t <= 22; ++t) {
        for (const auto& s : DyadicShell::at_level(2, t)) hits += s.contains(k) ? 1 : 0;
      }
      CHECK(hits == 1);
      CHECK(DyadicShell::containing(k).contains(k));
    }
  }
}

TEST_CASE("shell_members_in_dual") {
  for (int n : {3, 7, 11}) {
    const auto zero = shell_members_in_dual(FibIndex(n), DyadicShell({0, 0}));
    REQUIRE(zero.size() == 1);
    CHECK(zero[0].is_zero());
  }
  CHECK(shell_members_in_dual(FibIndex(4), DyadicShell({1, 1})).empty());
  const std::vector<FreqIndex> expect{{-3, 1}, {-2, -1}, {2, 1}, {3, -1}};
  CHECK(shell_members_in_dual(FibIndex(4), DyadicShell({2, 1})) == expect);
  CHECK_THROWS_AS(shell_members_in_dual(FibIndex(4), DyadicShell({1})), std::domain_error);
}

TEST_CASE("property: shell members agree with scan and filter") {
  oracle::Gen gen(103);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = static_cast<int>(gen.integer(3, 12));
    const DyadicShell s({static_cast<int>(gen.integer(0, 7)), static_cast<int>(gen.integer(0, 7))});
    std::vector<FreqIndex> ref;
    for (std::int64_t k1 = -128; k1 <= 128; ++k1) {
      for (std::int64_t k2 = -128; k2 <= 128; ++k2) {
        if (s.contains(FreqIndex{k1, k2}) && oracle::dual(k1, k2, n)) ref.push_back({k1, k2});
      }
    }
    CHECK(shell_members_in_dual(FibIndex(n), s) == ref);
  }
}

TEST_CASE("property: dual lattice closed under addition") {
  oracle::Gen gen(104);
  for (int n : {5, 8, 12, 16}) {
    const auto pts = enumerate_dual_in_box(FibIndex(n), 300);
    for (int i = 0; i < 50; ++i) {
      const auto& a = pts[static_cast<std::size_t>(gen.integer(0, std::ssize(pts) - 1))];
      const auto& b = pts[static_cast<std::size_t>(gen.integer(0, std::ssize(pts) - 1))];
      CHECK(in_dual_lattice(FreqIndex{a.k1 + b.k1, a.k2 + b.k2}, FibIndex(n)));
      CHECK(in_dual_lattice(FreqIndex{a.k1 - b.k1, a.k2 - b.k2}, FibIndex(n)));
    }
  }
}

TEST_CASE("smallest_shell_level") {
  CHECK(smallest_shell_level(FibIndex(4), 0.25) == 1);
  CHECK(smallest_shell_level(FibIndex(10), 1.0) == 7);
  CHECK(smallest_shell_level(FibIndex(2), 0.5) == 1);
  CHECK_THROWS_AS(smallest_shell_level(FibIndex(4), 0.0), std::domain_error);
  for (int n = 2; n <= 30; ++n) {
    for (double g : {0.1, 0.375, 1.0}) {
      const int t = smallest_shell_level(FibIndex(n), g);
      CHECK(std::exp2(t) > g * static_cast<double>(fib(n)));
      if (t > 0) CHECK(std::exp2(t - 1) <= g * static_cast<double>(fib(n)));
    }
  }
}

TEST_CASE("hyperbolic norm") {
  CHECK(FreqIndex{0, 0}.hyperbolic_norm() == 1);
  CHECK(FreqIndex{-3, 0}.hyperbolic_norm() == 3);
  CHECK(FreqIndex{-3, 4}.hyperbolic_norm() == 12);
}
