#pragma once

// Four concrete Set-monads on finite sets -- powerset, finitely-supported
// rational distributions, filters (encoded by their minimum set, improper
// filter admitted), and principal ultrafilters -- together with the
// direct-sum calculus on (ultra)filters and brute-force law validation.
//
// Finite sets are {0..n-1}; functions are vectors of images. A T-element
// never stores the ambient size; operations take it where needed.

#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bicat/fincat.hpp"
#include "bicat/util.hpp"

namespace bicat {

enum class MonadName { powerset, distribution, filter, ultrafilter };

inline std::string monad_name_str(MonadName m) {
  switch (m) {
    case MonadName::powerset: return "powerset";
    case MonadName::distribution: return "distribution";
    case MonadName::filter: return "filter";
    case MonadName::ultrafilter: return "ultrafilter";
  }
  return "?";
}

inline MonadName parse_monad_name(const std::string& s) {
  if (s == "powerset") return MonadName::powerset;
  if (s == "distribution") return MonadName::distribution;
  if (s == "filter") return MonadName::filter;
  if (s == "ultrafilter") return MonadName::ultrafilter;
  throw ParseError("unknown monad name: " + s);
}

// ---------------------------------------------------------------------------
// T-elements

struct TElem {
  MonadName monad = MonadName::powerset;
  Idx point = kNone;                            // ultrafilter: base point
  std::vector<Idx> set;                         // powerset: subset; filter: minimum set
  std::vector<std::pair<Idx, Rational>> dist;   // distribution: sorted support

  friend bool operator==(const TElem& a, const TElem& b) {
    return a.monad == b.monad && a.point == b.point && a.set == b.set &&
           a.dist == b.dist;
  }
  friend bool operator!=(const TElem& a, const TElem& b) { return !(a == b); }
  friend bool operator<(const TElem& a, const TElem& b) {
    if (a.monad != b.monad) return a.monad < b.monad;
    if (a.point != b.point) return a.point < b.point;
    if (a.set != b.set) return a.set < b.set;
    return a.dist < b.dist;
  }

  std::string str() const {
    std::ostringstream os;
    switch (monad) {
      case MonadName::powerset:
      case MonadName::filter: {
        os << (monad == MonadName::filter ? "up{" : "{");
        for (size_t i = 0; i < set.size(); ++i) os << (i ? "," : "") << set[i];
        os << "}";
        break;
      }
      case MonadName::ultrafilter:
        os << "@" << point;
        break;
      case MonadName::distribution: {
        os << "[";
        for (size_t i = 0; i < dist.size(); ++i)
          os << (i ? " " : "") << dist[i].first << ":" << dist[i].second.str();
        os << "]";
        break;
      }
    }
    return os.str();
  }
};

inline TElem pw_elem(std::vector<Idx> subset) {
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  TElem t;
  t.monad = MonadName::powerset;
  t.set = std::move(subset);
  return t;
}

inline TElem filter_elem(std::vector<Idx> min_set) {
  std::sort(min_set.begin(), min_set.end());
  min_set.erase(std::unique(min_set.begin(), min_set.end()), min_set.end());
  TElem t;
  t.monad = MonadName::filter;
  t.set = std::move(min_set);
  return t;
}

inline TElem ultra_elem(Idx point) {
  TElem t;
  t.monad = MonadName::ultrafilter;
  t.point = point;
  return t;
}

// Merges duplicate indices and drops zero weights.
inline TElem dist_elem(const std::vector<std::pair<Idx, Rational>>& weights) {
  std::map<Idx, Rational> acc;
  for (const auto& [x, w] : weights) {
    auto [it, inserted] = acc.insert({x, w});
    if (!inserted) it->second = it->second + w;
  }
  TElem t;
  t.monad = MonadName::distribution;
  for (const auto& [x, w] : acc)
    if (w != Rational(0)) t.dist.push_back({x, w});
  return t;
}

inline ValidationReport validate_telem(const TElem& t, int n) {
  ValidationReport rep;
  switch (t.monad) {
    case MonadName::powerset:
    case MonadName::filter:
      if (!is_sorted_subset(t.set, n))
        rep.fail("payload is not a sorted subset of the base set");
      if (t.point != kNone || !t.dist.empty())
        rep.fail("unused payload fields must be empty");
      break;
    case MonadName::ultrafilter:
      if (t.point < 0 || t.point >= n) rep.fail("base point out of range");
      if (!t.set.empty() || !t.dist.empty())
        rep.fail("unused payload fields must be empty");
      break;
    case MonadName::distribution: {
      Rational total(0);
      Idx prev = -1;
      for (const auto& [x, w] : t.dist) {
        if (x < 0 || x >= n) rep.fail("support index out of range");
        if (x <= prev) rep.fail("support must be strictly increasing");
        prev = x;
        if (!(Rational(0) < w)) rep.fail("weights must be positive");
        total = total + w;
      }
      if (total != Rational(1)) rep.fail("weights must sum to 1");
      if (t.point != kNone || !t.set.empty())
        rep.fail("unused payload fields must be empty");
      break;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Indexed coproducts (lexicographic pair encoding)

// Flattens the disjoint union of {0..sizes[x]-1} over x, blocks in order.
struct SumIndex {
  std::vector<int> sizes;
  std::vector<int> offset;
  int total = 0;

  explicit SumIndex(std::vector<int> sz) : sizes(std::move(sz)) {
    offset.resize(sizes.size());
    for (size_t i = 0; i < sizes.size(); ++i) {
      offset[i] = total;
      total += sizes[i];
    }
  }

  Idx flat(Idx x, Idx y) const { return offset[x] + y; }

  std::pair<Idx, Idx> unflat(Idx s) const {
    Idx x = static_cast<Idx>(sizes.size()) - 1;
    while (x > 0 && offset[x] > s) --x;
    return {x, s - offset[x]};
  }

  // The coprojection of block x as a function {0..sizes[x]-1} -> total.
  std::vector<Idx> coprojection(Idx x) const {
    std::vector<Idx> f(sizes[x]);
    for (Idx y = 0; y < sizes[x]; ++y) f[y] = flat(x, y);
    return f;
  }
};

// ---------------------------------------------------------------------------
// The monads

struct FinSetMonad {
  MonadName name = MonadName::powerset;
  // Enumeration granularity for distribution carriers: distributions whose
  // weights have denominator at most den_cap. Operations are exact and
  // unaffected; only carrier() probing is truncated by this.
  int den_cap = 4;
  // Test hook: when set, replaces mult() (used by negative controls).
  std::function<TElem(const TElem&, const std::vector<TElem>&, int)>
      mult_override;

  std::string str() const { return monad_name_str(name); }

  // Canonical enumeration of T-elements over {0..n-1}.
  std::vector<TElem> carrier(int n) const {
    std::vector<TElem> out;
    switch (name) {
      case MonadName::powerset:
        for (auto& s : all_subsets(n)) out.push_back(pw_elem(s));
        break;
      case MonadName::filter:
        for (auto& s : all_subsets(n)) out.push_back(filter_elem(s));
        break;
      case MonadName::ultrafilter:
        for (Idx x = 0; x < n; ++x) out.push_back(ultra_elem(x));
        break;
      case MonadName::distribution: {
        std::set<TElem> seen;
        for (int d = 1; d <= den_cap; ++d) {
          std::vector<int> w(n, 0);
          // Enumerate compositions of d into n non-negative parts.
          std::function<void(int, int)> go = [&](int i, int rest) {
            if (i == n - 1) {
              w[i] = rest;
              std::vector<std::pair<Idx, Rational>> ws;
              for (int j = 0; j < n; ++j)
                if (w[j] > 0) ws.push_back({j, Rational(w[j], d)});
              seen.insert(dist_elem(ws));
              return;
            }
            for (int k = 0; k <= rest; ++k) {
              w[i] = k;
              go(i + 1, rest - k);
            }
          };
          if (n > 0) go(0, d);
        }
        out.assign(seen.begin(), seen.end());
        break;
      }
    }
    return out;
  }

  TElem unit(int n, Idx x) const {
    if (x < 0 || x >= n) throw CheckError("unit point out of range");
    switch (name) {
      case MonadName::powerset: return pw_elem({x});
      case MonadName::filter: return filter_elem({x});
      case MonadName::ultrafilter: return ultra_elem(x);
      case MonadName::distribution: return dist_elem({{x, Rational(1)}});
    }
    throw CheckError("unreachable");
  }

  // T f for f : {0..f.size()-1} -> {0..n_cod-1}.
  TElem map(const std::vector<Idx>& f, int n_cod, const TElem& t) const {
    (void)n_cod;
    switch (name) {
      case MonadName::powerset: {
        std::vector<Idx> img;
        for (Idx x : t.set) img.push_back(f[x]);
        return pw_elem(img);
      }
      case MonadName::filter: {
        std::vector<Idx> img;
        for (Idx x : t.set) img.push_back(f[x]);
        return filter_elem(img);
      }
      case MonadName::ultrafilter:
        return ultra_elem(f[t.point]);
      case MonadName::distribution: {
        std::vector<std::pair<Idx, Rational>> ws;
        for (const auto& [x, w] : t.dist) ws.push_back({f[x], w});
        return dist_elem(ws);
      }
    }
    throw CheckError("unreachable");
  }

  // mu applied to an element of T(T X) presented as `outer` over the index
  // set {0..inner.size()-1} together with the list of inner elements (which
  // need not be distinct); result is over the inner elements' base of size
  // n_base.
  TElem mult(const TElem& outer, const std::vector<TElem>& inner,
             int n_base) const {
    if (mult_override) return mult_override(outer, inner, n_base);
    switch (name) {
      case MonadName::powerset: {
        std::vector<Idx> u;
        for (Idx i : outer.set)
          u.insert(u.end(), inner[i].set.begin(), inner[i].set.end());
        return pw_elem(u);
      }
      case MonadName::filter: {
        // up(S) flattens to up of the union of the minimum sets over S.
        std::vector<Idx> u;
        for (Idx i : outer.set)
          u.insert(u.end(), inner[i].set.begin(), inner[i].set.end());
        return filter_elem(u);
      }
      case MonadName::ultrafilter:
        return ultra_elem(inner[outer.point].point);
      case MonadName::distribution: {
        std::vector<std::pair<Idx, Rational>> ws;
        for (const auto& [i, w] : outer.dist)
          for (const auto& [x, v] : inner[i].dist) ws.push_back({x, w * v});
        return dist_elem(ws);
      }
    }
    throw CheckError("unreachable");
  }
};

inline FinSetMonad monad_instance(MonadName name) {
  FinSetMonad m;
  m.name = name;
  return m;
}

inline FinSetMonad monad_instance(const std::string& name) {
  return monad_instance(parse_monad_name(name));
}

// Position of t in a canonical carrier enumeration.
inline Idx carrier_index(const std::vector<TElem>& carrier, const TElem& t) {
  for (size_t i = 0; i < carrier.size(); ++i)
    if (carrier[i] == t) return static_cast<Idx>(i);
  throw CheckError("element not found in carrier enumeration: " + t.str());
}

// ---------------------------------------------------------------------------
// Direct sums of (ultra)filters over indexed families

// For nu over {0..k-1} and xi[x] over block x of the sum, the direct sum is
// the (ultra)filter of those S with S cap Y_x in xi_x for all x in a set of
// nu; in the minimum-set encoding this is up of the union of {x} x min(xi_x)
// over x in min(nu). For principal ultrafilters it is principal at the pair.
inline TElem direct_sum(MonadName name, const TElem& nu,
                        const std::vector<TElem>& xi, const SumIndex& si) {
  if (xi.size() != si.sizes.size())
    throw CheckError("direct sum: family size does not match the index");
  switch (name) {
    case MonadName::filter: {
      std::vector<Idx> m;
      for (Idx x : nu.set)
        for (Idx y : xi[x].set) m.push_back(si.flat(x, y));
      return filter_elem(m);
    }
    case MonadName::ultrafilter:
      return ultra_elem(si.flat(nu.point, xi[nu.point].point));
    default:
      throw CheckError("direct sum is defined for filter and ultrafilter");
  }
}

// Membership of a subset (of the elements' base) in a filter or principal
// ultrafilter.
inline bool filter_member(const TElem& t, const std::vector<Idx>& subset) {
  switch (t.monad) {
    case MonadName::filter:
      for (Idx x : t.set)
        if (!std::binary_search(subset.begin(), subset.end(), x)) return false;
      return true;
    case MonadName::ultrafilter:
      return std::binary_search(subset.begin(), subset.end(), t.point);
    default:
      throw CheckError("membership is defined for filter and ultrafilter");
  }
}

// ---------------------------------------------------------------------------
// Law validation

struct MonadLawReport {
  bool ok = true;
  std::vector<std::string> errors;
  std::vector<std::string> coverage;  // what each law was checked against

  void fail(const std::string& msg) {
    ok = false;
    if (errors.size() < 32) errors.push_back(msg);
  }
  std::string summary() const {
    std::ostringstream os;
    os << (ok ? "ok" : "FAILED");
    for (const auto& c : coverage) os << "\n  " << c;
    for (const auto& e : errors) os << "\n  error: " << e;
    return os.str();
  }
};

namespace detail {

// Nested carriers use a coarser distribution granularity to keep double and
// triple towers enumerable; operations stay exact.
inline FinSetMonad nested_view(const FinSetMonad& m) {
  FinSetMonad n = m;
  n.den_cap = std::min(m.den_cap, 2);
  return n;
}

}  // namespace detail

// Exhaustively checks functoriality, unit naturality, mu naturality, unit
// laws, and associativity over sets of size <= max_size. Levels whose full
// enumeration exceeds `budget` iterations fall back to outer elements of
// support size <= 2 (recorded in the coverage notes).
inline MonadLawReport validate_monad_laws(const FinSetMonad& T,
                                          int max_size = 3,
                                          long long budget = 300000) {
  MonadLawReport rep;
  FinSetMonad nested = detail::nested_view(T);

  // --- carrier well-formedness and uniqueness
  for (int n = 0; n <= max_size; ++n) {
    auto car = T.carrier(n);
    std::set<TElem> seen;
    for (const auto& t : car) {
      auto v = validate_telem(t, n);
      if (!v.ok) rep.fail("carrier(" + std::to_string(n) + ") element invalid: " + t.str());
      if (!seen.insert(t).second)
        rep.fail("carrier(" + std::to_string(n) + ") has duplicates");
    }
  }
  rep.coverage.push_back("carriers: exhaustive up to size " +
                         std::to_string(max_size));

  // --- functoriality: T(id) = id and T(g . f) = T g . T f
  for (int n = 0; n <= max_size; ++n) {
    auto car = T.carrier(n);
    std::vector<Idx> idf(n);
    for (int i = 0; i < n; ++i) idf[i] = i;
    for (const auto& t : car)
      if (T.map(idf, n, t) != t) rep.fail("T(id) != id at size " + std::to_string(n));
    for (int m = 0; m <= max_size; ++m)
      for (int k = 0; k <= max_size; ++k)
        for (const auto& f : all_functions(n, m))
          for (const auto& g : all_functions(m, k)) {
            std::vector<Idx> gf(n);
            for (int i = 0; i < n; ++i) gf[i] = g[f[i]];
            for (const auto& t : car)
              if (T.map(gf, k, t) != T.map(g, k, T.map(f, m, t)))
                rep.fail("T(g.f) != Tg . Tf for " + t.str());
          }
  }
  rep.coverage.push_back("functoriality: exhaustive over functions between sets <= " +
                         std::to_string(max_size));

  // --- unit naturality: T f . eta = eta . f
  for (int n = 0; n <= max_size; ++n)
    for (int m = 0; m <= max_size; ++m)
      for (const auto& f : all_functions(n, m))
        for (Idx x = 0; x < n; ++x)
          if (T.map(f, m, T.unit(n, x)) != T.unit(m, f[x]))
            rep.fail("unit naturality fails at x=" + std::to_string(x));
  rep.coverage.push_back("unit naturality: exhaustive");

  // --- unit laws: mu . eta_T = id and mu . T eta = id on T X
  for (int n = 0; n <= max_size; ++n) {
    auto car = T.carrier(n);
    for (const auto& t : car) {
      // eta_{TX}(t) is the unit over a one-element index set, paired with [t].
      if (T.mult(T.unit(1, 0), {t}, n) != t)
        rep.fail("mu . eta_T != id at " + t.str());
      // T eta (t): reinterpret t as an element over indices and pair it with
      // the units.
      std::vector<TElem> units;
      for (Idx i = 0; i < n; ++i) units.push_back(T.unit(n, i));
      if (T.mult(t, units, n) != t) rep.fail("mu . T eta != id at " + t.str());
    }
  }
  rep.coverage.push_back("unit laws: exhaustive over T X, size <= " +
                         std::to_string(max_size));

  // --- mu naturality: T f . mu = mu . T T f
  for (int n = 0; n <= max_size; ++n) {
    auto c1 = nested.carrier(n);
    auto outer_pool = nested.carrier(static_cast<int>(c1.size()));
    for (int m = 0; m <= max_size; ++m) {
      auto c1m = nested.carrier(m);
      for (const auto& f : all_functions(n, m)) {
        // The index-level action of T f on the enumerated carrier.
        std::vector<TElem> mapped;
        for (const auto& t : c1) mapped.push_back(T.map(f, m, t));
        for (const auto& outer : outer_pool) {
          TElem lhs = T.map(f, m, T.mult(outer, c1, n));
          TElem rhs = T.mult(outer, mapped, m);
          if (lhs != rhs)
            rep.fail("mu naturality fails at outer " + outer.str());
        }
      }
    }
  }
  rep.coverage.push_back("mu naturality: exhaustive over T T X (nested granularity)");

  // --- associativity: mu . T mu = mu . mu_T on T T T X
  for (int n = 0; n <= max_size; ++n) {
    auto c1 = nested.carrier(n);
    auto c2 = nested.carrier(static_cast<int>(c1.size()));
    long long full = 1;
    {
      // Estimated size of the top-level enumeration.
      int k = static_cast<int>(c2.size());
      switch (T.name) {
        case MonadName::powerset:
        case MonadName::filter:
          full = (k >= 62) ? budget + 1 : (1LL << k);
          break;
        case MonadName::ultrafilter:
          full = k;
          break;
        case MonadName::distribution:
          full = 1LL * k * k * k;  // coarse over-estimate at nested cap 2
          break;
      }
    }
    std::vector<TElem> outer_pool;
    bool bounded = false;
    if (full <= budget) {
      outer_pool = nested.carrier(static_cast<int>(c2.size()));
    } else {
      bounded = true;
      int k = static_cast<int>(c2.size());
      switch (T.name) {
        case MonadName::powerset:
        case MonadName::filter: {
          auto mk = (T.name == MonadName::powerset)
                        ? +[](std::vector<Idx> s) { return pw_elem(std::move(s)); }
                        : +[](std::vector<Idx> s) { return filter_elem(std::move(s)); };
          outer_pool.push_back(mk({}));
          for (Idx i = 0; i < k; ++i) outer_pool.push_back(mk({i}));
          for (Idx i = 0; i < k; ++i)
            for (Idx j = i + 1; j < k; ++j) outer_pool.push_back(mk({i, j}));
          break;
        }
        case MonadName::ultrafilter:
          for (Idx i = 0; i < k; ++i) outer_pool.push_back(ultra_elem(i));
          break;
        case MonadName::distribution:
          for (Idx i = 0; i < k; ++i) {
            outer_pool.push_back(dist_elem({{i, Rational(1)}}));
            for (Idx j = i + 1; j < k; ++j)
              outer_pool.push_back(dist_elem(
                  {{i, Rational(1, 2)}, {j, Rational(1, 2)}}));
          }
          break;
      }
    }
    // Path A: collapse the inner two levels first. Path B: collapse the
    // outer two levels first.
    std::vector<TElem> collapsed;
    for (const auto& mid : c2) collapsed.push_back(T.mult(mid, c1, n));
    for (const auto& outer : outer_pool) {
      TElem a = T.mult(outer, collapsed, n);
      TElem v = T.mult(outer, c2, static_cast<int>(c1.size()));
      TElem b = T.mult(v, c1, n);
      if (a != b) rep.fail("associativity fails at outer " + outer.str());
    }
    if (bounded && n == max_size)
      rep.coverage.push_back(
          "associativity at size " + std::to_string(n) +
          ": outer elements of support <= 2 (full tower exceeds budget)");
    else if (n == max_size)
      rep.coverage.push_back("associativity: exhaustive over T T T X (nested granularity)");
  }

  return rep;
}

}  // namespace bicat
