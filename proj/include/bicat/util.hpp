#pragma once

// Small shared utilities: exact rationals, disjoint-set forests, deterministic
// RNG seeding, and enumeration helpers used by the brute-force oracles.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bicat {

using Idx = int;
inline constexpr Idx kNone = -1;

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CheckError : std::runtime_error {
  explicit CheckError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Exact rational arithmetic (small numerators/denominators only).

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { reduce(); }

  void reduce() {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num * b.num, a.den * b.den);
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num * b.den < b.num * a.den;
  }
  std::string str() const {
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

// ---------------------------------------------------------------------------
// Disjoint-set forest with least-index representatives.

class DisjointSet {
 public:
  explicit DisjointSet(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int a) const {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Keep the least index as the root so class representatives are canonical.
    if (a < b)
      parent_[b] = a;
    else
      parent_[a] = b;
  }

  bool same(int a, int b) const { return find(a) == find(b); }

  int size() const { return static_cast<int>(parent_.size()); }

  // Roots in increasing order; the root is the least member of its class.
  std::vector<int> representatives() const {
    std::vector<int> reps;
    for (int i = 0; i < size(); ++i)
      if (find(i) == i) reps.push_back(i);
    return reps;
  }

 private:
  mutable std::vector<int> parent_;
};

// ---------------------------------------------------------------------------
// Deterministic RNG: seeded from the BICAT_SEED environment variable when set.

inline std::uint64_t default_seed() {
  if (const char* s = std::getenv("BICAT_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end && *end == '\0') return static_cast<std::uint64_t>(v);
  }
  return 0x5eedcafef00dULL;
}

inline std::mt19937_64 make_rng(std::uint64_t salt = 0) {
  return std::mt19937_64(default_seed() ^ (salt * 0x9e3779b97f4a7c15ULL));
}

template <typename Rng>
int rand_int(Rng& rng, int lo, int hi) {  // inclusive range
  std::uniform_int_distribution<int> d(lo, hi);
  return d(rng);
}

// ---------------------------------------------------------------------------
// Enumeration helpers.

// All functions {0..dom-1} -> {0..cod-1}, each as a vector of images.
inline std::vector<std::vector<int>> all_functions(int dom, int cod) {
  std::vector<std::vector<int>> out;
  if (dom == 0) {
    out.push_back({});
    return out;
  }
  if (cod == 0) return out;  // no functions from a nonempty set into the empty set
  std::vector<int> cur(dom, 0);
  while (true) {
    out.push_back(cur);
    int i = 0;
    while (i < dom) {
      if (++cur[i] < cod) break;
      cur[i] = 0;
      ++i;
    }
    if (i == dom) break;
  }
  return out;
}

// All subsets of {0..n-1} as sorted vectors, in mask order.
inline std::vector<std::vector<int>> all_subsets(int n) {
  std::vector<std::vector<int>> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) s.push_back(i);
    out.push_back(std::move(s));
  }
  return out;
}

inline bool is_sorted_subset(const std::vector<int>& s, int n) {
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] >= n) return false;
    if (i > 0 && s[i - 1] >= s[i]) return false;
  }
  return true;
}

inline std::vector<int> sorted_image(const std::vector<int>& g,
                                     const std::vector<int>& dom) {
  std::vector<int> img;
  img.reserve(dom.size());
  for (int d : dom) img.push_back(g[static_cast<size_t>(d)]);
  std::sort(img.begin(), img.end());
  img.erase(std::unique(img.begin(), img.end()), img.end());
  return img;
}

// Cartesian-product iteration: calls fn on every tuple of choices, where
// choice i ranges over {0..sizes[i]-1}. Returns false if fn ever returns
// false (and stops early).
template <typename Fn>
bool for_each_tuple(const std::vector<int>& sizes, Fn&& fn) {
  std::vector<int> cur(sizes.size(), 0);
  for (int s : sizes)
    if (s <= 0) return true;  // empty product: no tuples
  while (true) {
    if (!fn(cur)) return false;
    size_t i = 0;
    while (i < sizes.size()) {
      if (++cur[i] < sizes[i]) break;
      cur[i] = 0;
      ++i;
    }
    if (i == sizes.size()) break;
  }
  return true;
}

}  // namespace bicat
