#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace fibdisc {

/// Largest supported Fibonacci index; b_90 is the last value that fits the
/// signed 64-bit arithmetic used by the congruence routines.
inline constexpr int kMaxFibIndex = 90;

/// b_n with b_0 = b_1 = 1. Throws std::out_of_range outside [0, kMaxFibIndex].
std::int64_t fib(int n);

/// A Fibonacci index n together with b_n and b_{n-1}.
class FibIndex {
 public:
  explicit FibIndex(int n);

  int n() const { return n_; }
  std::int64_t b() const { return b_; }
  std::int64_t b_prev() const { return b_prev_; }

 private:
  int n_;
  std::int64_t b_;
  std::int64_t b_prev_;
};

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// The Fibonacci lattice F_n, ordered by mu = 1..b_n. The point for mu = b_n
/// is reduced to (0, 0).
struct PointSet {
  FibIndex index;
  std::vector<Point2> points;
};

PointSet fibonacci_point_set(const FibIndex& n);

/// Integer frequency vector in Z^2.
struct FreqIndex {
  std::int64_t k1 = 0;
  std::int64_t k2 = 0;

  /// prod_j max(|k_j|, 1)
  std::int64_t hyperbolic_norm() const;
  bool is_zero() const { return k1 == 0 && k2 == 0; }

  friend auto operator<=>(const FreqIndex&, const FreqIndex&) = default;
};

/// Dyadic shell rho(s): k belongs iff [2^{s_j-1}] <= |k_j| < 2^{s_j} for all j.
class DyadicShell {
 public:
  explicit DyadicShell(std::vector<int> s);

  /// The unique shell containing k.
  static DyadicShell containing(std::span<const std::int64_t> k);
  static DyadicShell containing(const FreqIndex& k);

  /// All shells of dimension d with ||s||_1 = t, in lexicographic order.
  static std::vector<DyadicShell> at_level(int d, int t);

  std::span<const int> s() const { return s_; }
  int dim() const { return static_cast<int>(s_.size()); }
  int level() const { return level_; }

  bool contains(std::span<const std::int64_t> k) const;
  bool contains(const FreqIndex& k) const;

  friend bool operator==(const DyadicShell&, const DyadicShell&) = default;

 private:
  std::vector<int> s_;
  int level_ = 0;
};

/// Dyadic band index of a single coordinate: 0 for k = 0, else bit_width(|k|).
int dyadic_band(std::int64_t k);

/// k_1 + b_{n-1} k_2 == 0 (mod b_n), evaluated in exact integer arithmetic.
bool in_dual_lattice(const FreqIndex& k, const FibIndex& n);

/// Phi(k): 1 on the dual lattice L(n), 0 elsewhere.
double dual_phase(const FreqIndex& k, const FibIndex& n);

/// The residue c in [0, b_n) with k_1 == c (mod b_n) for members with this k_2.
std::int64_t dual_residue(std::int64_t k2, const FibIndex& n);

/// Visits every nonzero k in L(n) with |k_1|, |k_2| <= K, k_2-major. For each
/// k_2 only the arithmetic progression k_1 == -b_{n-1} k_2 (mod b_n) is
/// walked, so the cost is O(K + K^2 / b_n).
template <class Visitor>
void for_each_dual_in_box(const FibIndex& n, std::int64_t K, Visitor&& visit) {
  const std::int64_t b = n.b();
  for (std::int64_t k2 = -K; k2 <= K; ++k2) {
    const std::int64_t c = dual_residue(k2, n);
    // first k1 >= -K congruent to c
    const std::int64_t offset = ((c + K) % b + b) % b;
    for (std::int64_t k1 = -K + offset; k1 <= K; k1 += b) {
      if (k1 == 0 && k2 == 0) continue;
      visit(FreqIndex{k1, k2});
      if (b > 2 * K) break;
    }
  }
}

/// Sorted (lexicographic in (k_1, k_2)) list of nonzero dual points in the box.
std::vector<FreqIndex> enumerate_dual_in_box(const FibIndex& n, std::int64_t K);

/// Largest n accepted by min_hyperbolic_norm (the scan is O(b_n)).
inline constexpr int kMaxExhaustiveIndex = 40;

/// min over k in L(n) \ {0} of prod_j max(|k_j|, 1). Requires 3 <= n <= 40.
std::int64_t min_hyperbolic_norm(const FibIndex& n);

/// Exact rho(s) ∩ L(n) for a two-dimensional shell, sorted lexicographically.
std::vector<FreqIndex> shell_members_in_dual(const FibIndex& n,
                                             const DyadicShell& s);

/// t_0 = min { t : 2^t > gamma * b_n }.
int smallest_shell_level(const FibIndex& n, double gamma);

}  // namespace fibdisc
