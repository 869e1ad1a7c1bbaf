#include "fibdisc/lattice.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fibdisc {

namespace {

constexpr std::array<std::int64_t, kMaxFibIndex + 1> make_fib_table() {
  std::array<std::int64_t, kMaxFibIndex + 1> t{};
  t[0] = 1;
  t[1] = 1;
  for (int i = 2; i <= kMaxFibIndex; ++i) t[i] = t[i - 1] + t[i - 2];
  return t;
}

constexpr auto kFib = make_fib_table();

std::uint64_t magnitude(std::int64_t k) {
  // well-defined for INT64_MIN as well
  return k < 0 ? ~static_cast<std::uint64_t>(k) + 1 : static_cast<std::uint64_t>(k);
}

}  // namespace

std::int64_t fib(int n) {
  if (n < 0 || n > kMaxFibIndex) {
    throw std::out_of_range("fib: index " + std::to_string(n) +
                            " outside [0, " + std::to_string(kMaxFibIndex) + "]");
  }
  return kFib[static_cast<std::size_t>(n)];
}

FibIndex::FibIndex(int n) : n_(n), b_(fib(n)), b_prev_(n >= 1 ? fib(n - 1) : 1) {}

PointSet fibonacci_point_set(const FibIndex& n) {
  if (n.n() < 2) {
    throw std::domain_error("fibonacci_point_set: requires n >= 2");
  }
  const std::int64_t b = n.b();
  const auto bb = static_cast<__int128>(b);
  PointSet set{n, {}};
  set.points.reserve(static_cast<std::size_t>(b));
  for (std::int64_t mu = 1; mu <= b; ++mu) {
    const auto second = static_cast<std::int64_t>(
        (static_cast<__int128>(mu) * n.b_prev()) % bb);
    const std::int64_t first = mu % b;
    set.points.push_back({static_cast<double>(first) / static_cast<double>(b),
                          static_cast<double>(second) / static_cast<double>(b)});
  }
  return set;
}

std::int64_t FreqIndex::hyperbolic_norm() const {
  const auto a = std::max<std::int64_t>(k1 < 0 ? -k1 : k1, 1);
  const auto c = std::max<std::int64_t>(k2 < 0 ? -k2 : k2, 1);
  return a * c;
}

int dyadic_band(std::int64_t k) { return static_cast<int>(std::bit_width(magnitude(k))); }

DyadicShell::DyadicShell(std::vector<int> s) : s_(std::move(s)) {
  for (int sj : s_) {
    if (sj < 0 || sj > 62) throw std::domain_error("DyadicShell: component out of range");
    level_ += sj;
  }
}

DyadicShell DyadicShell::containing(std::span<const std::int64_t> k) {
  std::vector<int> s;
  s.reserve(k.size());
  for (auto kj : k) s.push_back(dyadic_band(kj));
  return DyadicShell(std::move(s));
}

DyadicShell DyadicShell::containing(const FreqIndex& k) {
  const std::array<std::int64_t, 2> kk{k.k1, k.k2};
  return containing(kk);
}

std::vector<DyadicShell> DyadicShell::at_level(int d, int t) {
  if (d < 1 || t < 0) throw std::domain_error("DyadicShell::at_level: need d >= 1, t >= 0");
  std::vector<DyadicShell> out;
  std::vector<int> s(static_cast<std::size_t>(d), 0);
  // compositions of t into d non-negative parts, lexicographic
  auto recurse = [&](auto&& self, int j, int remaining) -> void {
    if (j == d - 1) {
      s[static_cast<std::size_t>(j)] = remaining;
      out.emplace_back(s);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      s[static_cast<std::size_t>(j)] = v;
      self(self, j + 1, remaining - v);
    }
  };
  recurse(recurse, 0, t);
  return out;
}

bool DyadicShell::contains(std::span<const std::int64_t> k) const {
  if (k.size() != s_.size()) return false;
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (dyadic_band(k[j]) != s_[j]) return false;
  }
  return true;
}

bool DyadicShell::contains(const FreqIndex& k) const {
  const std::array<std::int64_t, 2> kk{k.k1, k.k2};
  return contains(kk);
}

std::int64_t dual_residue(std::int64_t k2, const FibIndex& n) {
  const auto b = static_cast<__int128>(n.b());
  __int128 c = -(static_cast<__int128>(n.b_prev()) * k2) % b;
  if (c < 0) c += b;
  return static_cast<std::int64_t>(c);
}

bool in_dual_lattice(const FreqIndex& k, const FibIndex& n) {
  const auto b = static_cast<__int128>(n.b());
  const __int128 lhs = static_cast<__int128>(k.k1) + static_cast<__int128>(n.b_prev()) * k.k2;
  return lhs % b == 0;
}

double dual_phase(const FreqIndex& k, const FibIndex& n) {
  return in_dual_lattice(k, n) ? 1.0 : 0.0;
}

std::vector<FreqIndex> enumerate_dual_in_box(const FibIndex& n, std::int64_t K) {
  if (K < 1) throw std::domain_error("enumerate_dual_in_box: K must be >= 1");
  std::vector<FreqIndex> out;
  for_each_dual_in_box(n, K, [&](const FreqIndex& k) { out.push_back(k); });
  std::sort(out.begin(), out.end());
  return out;
}

std::int64_t min_hyperbolic_norm(const FibIndex& n) {
  if (n.n() < 3 || n.n() > kMaxExhaustiveIndex) {
    throw std::domain_error("min_hyperbolic_norm: requires 3 <= n <= " +
                            std::to_string(kMaxExhaustiveIndex));
  }
  const std::int64_t b = n.b();
  // (b, 0) is in L(n) with norm b; any better point has |k_2| < b. Since
  // L(n) = -L(n) it suffices to scan k_2 >= 0, and for fixed k_2 only the
  // residue representative nearest zero can be optimal.
  std::int64_t best = b;
  for (std::int64_t k2 = 0; k2 < b; ++k2) {
    const std::int64_t c = dual_residue(k2, n);
    for (std::int64_t k1 : {c, c - b}) {
      if (k1 == 0 && k2 == 0) continue;
      best = std::min(best, FreqIndex{k1, k2}.hyperbolic_norm());
    }
  }
  return best;
}

std::vector<FreqIndex> shell_members_in_dual(const FibIndex& n, const DyadicShell& s) {
  if (s.dim() != 2) throw std::domain_error("shell_members_in_dual: shell must be 2-dimensional");
  auto band = [](int sj) {
    // |k| range [lo, hi) of a dyadic band
    const std::int64_t lo = sj == 0 ? 0 : (std::int64_t{1} << (sj - 1));
    const std::int64_t hi = std::int64_t{1} << sj;
    return std::pair{lo, hi};
  };
  const auto [lo1, hi1] = band(s.s()[0]);
  const auto [lo2, hi2] = band(s.s()[1]);
  const std::int64_t b = n.b();

  std::vector<FreqIndex> out;
  auto scan_k2 = [&](std::int64_t k2) {
    const std::int64_t c = dual_residue(k2, n);
    auto scan_range = [&](std::int64_t from, std::int64_t to) {  // k1 in [from, to)
      if (from >= to) return;
      const std::int64_t offset = ((c - from) % b + b) % b;
      for (std::int64_t k1 = from + offset; k1 < to; k1 += b) out.push_back({k1, k2});
    };
    scan_range(-hi1 + 1, -lo1 + 1);
    scan_range(std::max<std::int64_t>(lo1, 1), hi1);
  };
  for (std::int64_t m = lo2; m < hi2; ++m) {
    scan_k2(m);
    if (m != 0) scan_k2(-m);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int smallest_shell_level(const FibIndex& n, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::domain_error("smallest_shell_level: gamma must be positive and finite");
  }
  const double target = gamma * static_cast<double>(n.b());
  int t = 0;
  while (std::ldexp(1.0, t) <= target) ++t;
  return t;
}

}  // namespace fibdisc
