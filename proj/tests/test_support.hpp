#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// are written directly from definitions, on purpose not reusing the library's
// computation paths, so frozen expected values stay independent.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "bicat/fincat.hpp"

namespace bicat::testing {

// ---------------------------------------------------------------------------
// Fixture categories.

inline FinCategory chain3() {  // poset 0 <= 1 <= 2
  return thin_from_preorder({{true, true, true}, {false, true, true}, {false, false, true}});
}

inline FinCategory poset_square() {  // 0 <= 1,2 <= 3, with 1,2 incomparable
  return thin_from_preorder({{true, true, true, true},
                             {false, true, false, true},
                             {false, false, true, true},
                             {false, false, false, true}});
}

inline FinCategory walking_iso() {
  CategoryBuilder b;
  Idx a = b.add_object("a"), c = b.add_object("b");
  Idx ia = b.add_morphism(a, a, "1a"), ic = b.add_morphism(c, c, "1b");
  Idx f = b.add_morphism(a, c, "f"), g = b.add_morphism(c, a, "g");
  b.set_identity(a, ia);
  b.set_identity(c, ic);
  b.set_composite(g, f, ia);
  b.set_composite(f, g, ic);
  return b.build();
}

inline FinCategory parallel_pair() {
  CategoryBuilder b;
  Idx a = b.add_object("a"), c = b.add_object("b");
  Idx ia = b.add_morphism(a, a, "1a"), ic = b.add_morphism(c, c, "1b");
  b.add_morphism(a, c, "f");
  b.add_morphism(a, c, "g");
  b.set_identity(a, ia);
  b.set_identity(c, ic);
  return b.build();
}

inline FinCategory z2_monoid() {
  CategoryBuilder b;
  Idx o = b.add_object("*");
  Idx e = b.add_morphism(o, o, "1"), s = b.add_morphism(o, o, "s");
  b.set_identity(o, e);
  b.set_composite(s, s, e);
  return b.build();
}

inline FinCategory walking_idempotent() {
  CategoryBuilder b;
  Idx o = b.add_object("*");
  Idx e = b.add_morphism(o, o, "1"), s = b.add_morphism(o, o, "e");
  b.set_identity(o, e);
  b.set_composite(s, s, s);
  return b.build();
}

// A pool of small categories (<= 3 objects, <= 6 morphisms) for sampling.
inline std::vector<CatPtr> category_pool() {
  std::vector<CatPtr> pool;
  pool.push_back(make_cat(terminal_category()));
  pool.push_back(make_cat(discrete_category(2)));
  pool.push_back(make_cat(discrete_category(3)));
  pool.push_back(make_cat(walking_arrow()));
  pool.push_back(make_cat(chain3()));
  pool.push_back(make_cat(walking_iso()));
  pool.push_back(make_cat(parallel_pair()));
  pool.push_back(make_cat(z2_monoid()));
  pool.push_back(make_cat(walking_idempotent()));
  pool.push_back(make_cat(thin_from_preorder(
      {{true, true, false}, {false, true, false}, {false, true, true}})));  // 0->1<-2
  return pool;
}

// ---------------------------------------------------------------------------
// Functor enumeration (backtracking over morphism images).

namespace detail {
inline void enum_functors_rec(const FinCategory& c, const FinCategory& d,
                              const std::vector<Idx>& obj_map, Idx next_mor,
                              std::vector<Idx>& mor_map,
                              std::vector<Functor>& out, CatPtr cp, CatPtr dp,
                              size_t limit) {
  if (out.size() >= limit) return;
  if (next_mor == c.n_mor()) {
    Functor f;
    f.dom = cp;
    f.cod = dp;
    f.obj_map = obj_map;
    f.mor_map = mor_map;
    if (validate_functor(f).ok) out.push_back(std::move(f));
    return;
  }
  for (Idx n : d.hom(obj_map[c.src[next_mor]], obj_map[c.tgt[next_mor]])) {
    mor_map[next_mor] = n;
    bool ok = true;
    if (next_mor == c.identity[c.src[next_mor]] && c.src[next_mor] == c.tgt[next_mor]) {
      // fine; full check happens at the leaf
    }
    for (Idx g = 0; g <= next_mor && ok; ++g) {
      for (Idx f2 = 0; f2 <= next_mor && ok; ++f2) {
        if (!c.composable(g, f2)) continue;
        Idx gf = c.compose(g, f2);
        if (gf <= next_mor && d.compose(mor_map[g], mor_map[f2]) != mor_map[gf]) ok = false;
      }
    }
    if (ok)
      enum_functors_rec(c, d, obj_map, next_mor + 1, mor_map, out, cp, dp, limit);
    if (out.size() >= limit) return;
  }
}
}  // namespace detail

inline std::vector<Functor> all_functors(CatPtr cp, CatPtr dp, size_t limit = 100000) {
  const FinCategory& c = *cp;
  const FinCategory& d = *dp;
  std::vector<Functor> out;
  for (const auto& obj_map : all_functions(c.n_obj, d.n_obj)) {
    std::vector<Idx> om(obj_map.begin(), obj_map.end());
    std::vector<Idx> mor_map(c.n_mor(), kNone);
    detail::enum_functors_rec(c, d, om, 0, mor_map, out, cp, dp, limit);
    if (out.size() >= limit) break;
  }
  return out;
}

template <typename Rng>
std::optional<Functor> sample_functor(Rng& rng, CatPtr c, CatPtr d) {
  auto fs = all_functors(c, d);
  if (fs.empty()) return std::nullopt;
  return fs[rand_int(rng, 0, static_cast<int>(fs.size()) - 1)];
}

// All natural transformations between two parallel functors.
inline std::vector<NatTrans> all_nattrans(const Functor& f, const Functor& g) {
  const FinCategory& a = *f.dom;
  const FinCategory& b = *f.cod;
  std::vector<NatTrans> out;
  std::vector<std::vector<Idx>> choices(a.n_obj);
  for (Idx o = 0; o < a.n_obj; ++o)
    choices[o] = b.hom(f.obj_map[o], g.obj_map[o]);
  std::vector<int> sizes;
  for (auto& ch : choices) sizes.push_back(static_cast<int>(ch.size()));
  for_each_tuple(sizes, [&](const std::vector<int>& pick) {
    NatTrans t;
    t.dom = f;
    t.cod = g;
    for (Idx o = 0; o < a.n_obj; ++o) t.component.push_back(choices[o][pick[o]]);
    if (validate_nattrans(t).ok) out.push_back(std::move(t));
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Random preorders (for thin-category sampling).

template <typename Rng>
std::vector<std::vector<bool>> random_preorder(Rng& rng, int n) {
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) leq[i][i] = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && rand_int(rng, 0, 2) == 0) leq[i][j] = true;
  // transitive closure
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (leq[i][k] && leq[k][j]) leq[i][j] = true;
  return leq;
}

}  // namespace bicat::testing
