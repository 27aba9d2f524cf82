#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bnfstab {

/// Largest number of canonical pairs a polynomial may carry.
inline constexpr int kMaxDof = 8;

/// Exponent pair (j, k) of a monomial x^j y^k in up to kMaxDof canonical
/// pairs. Exponents are packed one byte each: x exponents in the low word,
/// y exponents in the high word, so monomial products are word additions.
class MultiIndex {
 public:
  MultiIndex() = default;

  static MultiIndex from_exponents(std::span<const int> j, std::span<const int> k);

  int j(int i) const noexcept { return static_cast<int>((x_ >> (8 * i)) & 0xffu); }
  int k(int i) const noexcept { return static_cast<int>((y_ >> (8 * i)) & 0xffu); }

  /// Total degree |j| + |k|.
  int degree() const noexcept { return byte_sum(x_) + byte_sum(y_); }
  int x_degree() const noexcept { return byte_sum(x_); }
  int y_degree() const noexcept { return byte_sum(y_); }

  /// True when j == k componentwise.
  bool is_diagonal() const noexcept { return x_ == y_; }

  MultiIndex with_j(int i, int value) const noexcept;
  MultiIndex with_k(int i, int value) const noexcept;

  /// Componentwise sum. Caller guarantees no byte overflows (degree <= 255).
  friend MultiIndex operator+(MultiIndex a, MultiIndex b) noexcept {
    return MultiIndex(a.x_ + b.x_, a.y_ + b.y_);
  }

  /// Decrement j_i and k_i by one each; both must be positive.
  MultiIndex drop_pair(int i) const noexcept {
    const std::uint64_t one = std::uint64_t{1} << (8 * i);
    return MultiIndex(x_ - one, y_ - one);
  }

  std::vector<int> j_vector(int num_dof) const;
  std::vector<int> k_vector(int num_dof) const;

  friend bool operator==(MultiIndex a, MultiIndex b) noexcept = default;

  /// Graded lexicographic order: lower total degree first; within a degree,
  /// larger exponent of x_1 first, then x_2, ..., then y_1, ...
  friend bool operator<(MultiIndex a, MultiIndex b) noexcept {
    const int da = a.degree();
    const int db = b.degree();
    if (da != db) return da < db;
    const std::uint64_t ax = __builtin_bswap64(a.x_);
    const std::uint64_t bx = __builtin_bswap64(b.x_);
    if (ax != bx) return ax > bx;
    return __builtin_bswap64(a.y_) > __builtin_bswap64(b.y_);
  }

  std::size_t hash() const noexcept {
    std::uint64_t h = x_ * 0x9e3779b97f4a7c15ull ^ (y_ + 0x632be59bd9b4e019ull + (x_ << 6));
    h ^= h >> 31;
    h *= 0xbf58476d1ce4e5b9ull;
    h ^= h >> 29;
    return static_cast<std::size_t>(h);
  }

 private:
  MultiIndex(std::uint64_t x, std::uint64_t y) : x_(x), y_(y) {}

  static int byte_sum(std::uint64_t w) noexcept {
    return static_cast<int>((w * 0x0101010101010101ull) >> 56);
  }

  std::uint64_t x_ = 0;
  std::uint64_t y_ = 0;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& m) const noexcept { return m.hash(); }
};

}  // namespace bnfstab
