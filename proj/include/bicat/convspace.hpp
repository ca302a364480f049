#pragma once

// Convergence structures presented by finite tables.
//
// A space consists of a discrete category of points, the category of
// index-bounded families over it generated by a finitary monad (towers
// (X, labels, nu) with reindexing germs between them), a table of
// convergence arrows from families to points, a unit arrow at every point,
// and a composition table: for every arrow r converging at a point over an
// outer family, and every assignment of a converging arrow to each index
// point of that family, a composite arrow over the flattened family.
//
// Validation checks the table structure and five exhaustively quantified
// invariants over the bounded index universe: composition is natural in
// reindexings of the outer family and of the fiber families, the unit
// arrows are left and right neutral, and composition is associative.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "fincat.hpp"
#include "loke.hpp"
#include "monads.hpp"
#include "profunctor.hpp"
#include "util.hpp"

namespace bicat {

// ---------------------------------------------------------------------------
// Composition-table keys

// One composable input: an arrow (`arrow`) converging at `pt` over the outer
// family `fam`, plus, for every index point x of that family, a fiber family
// and an arrow over it converging at the x-th label of the outer family.
struct CompositeKey {
  Idx pt = kNone;
  Idx fam = kNone;
  Idx arrow = kNone;
  std::vector<std::pair<Idx, Idx>> fibers;  // per index point: (family, arrow)

  friend bool operator==(const CompositeKey& a, const CompositeKey& b) {
    return a.pt == b.pt && a.fam == b.fam && a.arrow == b.arrow &&
           a.fibers == b.fibers;
  }
  friend bool operator<(const CompositeKey& a, const CompositeKey& b) {
    if (a.pt != b.pt) return a.pt < b.pt;
    if (a.fam != b.fam) return a.fam < b.fam;
    if (a.arrow != b.arrow) return a.arrow < b.arrow;
    return a.fibers < b.fibers;
  }
};

// ---------------------------------------------------------------------------
// The space

struct ConvergenceSpace {
  FinSetMonad T;
  CatPtr base;       // the points; a discrete category
  int universe = 3;  // families carry index sets {0..k-1} with k <= universe
  QuotCategoryResult fam;  // category of index-bounded families over base
  Profunctor arrows;       // dom = fam.cat, cod = base
  std::vector<Idx> id_arrow;         // per point: unit arrow at (pt, eta(pt))
  std::map<CompositeKey, Idx> comp;  // composite at the flattened family

  // Lookup acceleration for family objects; fill with index_families().
  std::map<LObject, Idx> fam_lookup;

  int n_points() const { return base->n_obj; }
  int n_families() const { return static_cast<int>(fam.objects.size()); }
  int family_size(Idx f) const { return fam.objects[f].size(); }
  int count(Idx pt, Idx f) const { return arrows.count(pt, f); }

  void index_families() {
    fam_lookup.clear();
    for (size_t i = 0; i < fam.objects.size(); ++i)
      fam_lookup.emplace(fam.objects[i], static_cast<Idx>(i));
  }

  Idx family_index(const LObject& a) const {
    auto it = fam_lookup.find(a);
    if (it != fam_lookup.end()) return it->second;
    return fam.object_index(a);  // slow path for hand-built spaces
  }

  Idx eta_index(Idx pt) const { return family_index(eta_obj(T, pt)); }

  // The family obtained by substituting each fiber family for the matching
  // index point of the outer family and summing the index sets.
  LObject flattened_object(Idx f,
                           const std::vector<std::pair<Idx, Idx>>& fibers) const {
    LLObject w;
    w.nu = fam.objects[f].nu;
    w.labels.reserve(fibers.size());
    for (const auto& fb : fibers) w.labels.push_back(fam.objects[fb.first]);
    return flatten_obj(T, w);
  }

  Idx flattened_index(const CompositeKey& k) const {
    return family_index(flattened_object(k.fam, k.fibers));
  }
};

// ---------------------------------------------------------------------------
// Rendering helpers for diagnostics

inline std::string family_str(const ConvergenceSpace& A, Idx f) {
  const LObject& o = A.fam.objects[f];
  std::string s = "#" + std::to_string(f) + "(";
  for (int i = 0; i < o.size(); ++i) {
    if (i) s += " ";
    s += std::to_string(o.labels[i]);
  }
  s += "; " + o.nu.str() + ")";
  return s;
}

inline std::string key_str(const ConvergenceSpace& A, const CompositeKey& k) {
  std::string s = "pt=" + std::to_string(k.pt) + " fam=" + family_str(A, k.fam) +
                  " arrow=" + std::to_string(k.arrow) + " fibers=[";
  for (size_t i = 0; i < k.fibers.size(); ++i) {
    if (i) s += ", ";
    s += "(" + family_str(A, k.fibers[i].first) + "," +
         std::to_string(k.fibers[i].second) + ")";
  }
  return s + "]";
}

// ---------------------------------------------------------------------------
// Enumerating the composition-table domain

namespace detail {

// Assign to every index point of F a fiber family (with total size budget)
// and an arrow over it converging at the matching label.
template <typename Fn>
inline void fiber_assignments(const ConvergenceSpace& A, const LObject& F,
                              int budget,
                              std::vector<std::pair<Idx, Idx>>& acc, Fn&& fn) {
  int x = static_cast<int>(acc.size());
  if (x == F.size()) {
    const auto& done = acc;
    fn(done);
    return;
  }
  Idx b = F.labels[x];
  for (Idx g = 0; g < A.n_families(); ++g) {
    int sz = A.family_size(g);
    if (sz > budget) continue;
    int c = A.count(b, g);
    for (Idx ar = 0; ar < c; ++ar) {
      acc.emplace_back(g, ar);
      fiber_assignments(A, F, budget - sz, acc, fn);
      acc.pop_back();
    }
  }
}

}  // namespace detail

// Visits every well-typed composition input whose flattened family stays in
// the index universe.  The composition table must be defined exactly there.
template <typename Fn>
inline void for_each_composite_key(const ConvergenceSpace& A, Fn&& fn) {
  const int np = A.n_points();
  for (Idx f = 0; f < A.n_families(); ++f) {
    int maxc = 0;
    for (Idx pt = 0; pt < np; ++pt) maxc = std::max(maxc, A.count(pt, f));
    if (maxc == 0) continue;
    std::vector<std::pair<Idx, Idx>> acc;
    detail::fiber_assignments(
        A, A.fam.objects[f], A.universe, acc,
        [&](const std::vector<std::pair<Idx, Idx>>& fib) {
          CompositeKey k;
          k.fam = f;
          k.fibers = fib;
          const CompositeKey& ck = k;
          for (Idx pt = 0; pt < np; ++pt) {
            int c = A.count(pt, f);
            for (Idx r = 0; r < c; ++r) {
              k.pt = pt;
              k.arrow = r;
              fn(ck);
            }
          }
        });
  }
}

// ---------------------------------------------------------------------------
// Reindexing germs between flattened families

// Germ between flattened sums induced by reindexing the outer family while
// keeping the matched fiber families fixed.  `ghat` maps support positions of
// tgt_outer.nu to index points of src_outer; the caller guarantees
// tgt_fibers[y] == src_fibers[ghat(pos of y)] for y in the support.  Target
// position (y, v) maps to source position (ghat(y), v) with an identity
// label component (the matched fibers are literally equal).
inline LMorphism tensor_g_id(const FinSetMonad& T, const CatPtr& base,
                             const LObject& src_outer,
                             const std::vector<LObject>& src_fibers,
                             const LObject& tgt_outer,
                             const std::vector<LObject>& tgt_fibers,
                             const std::vector<Idx>& ghat) {
  LLObject ws{src_fibers, src_outer.nu};
  LLObject wt{tgt_fibers, tgt_outer.nu};
  SumIndex ss = tower_sum_index(ws);
  SumIndex st = tower_sum_index(wt);
  LObject flat_t = flatten_obj(T, wt);
  std::vector<Idx> osup = germ_support(tgt_outer.nu);
  std::map<Idx, Idx> pos;
  for (size_t j = 0; j < osup.size(); ++j) pos[osup[j]] = static_cast<Idx>(j);
  LMorphism out;
  for (Idx s : germ_support(flat_t.nu)) {
    auto [y, v] = st.unflat(s);
    auto it = pos.find(y);
    if (it == pos.end())
      throw CheckError("flattened support escapes the outer support");
    out.g.push_back(ss.flat(ghat[it->second], v));
    out.alpha.push_back(base->identity[flat_t.labels[s]]);
  }
  return out;
}

// Germ between flattened sums induced by reindexing each fiber family in
// place: target position (x, v) maps to (x, ghat_x(v)) with the label
// component of the x-th fiber germ.
inline LMorphism tensor_id_gx(const FinSetMonad& T, const LObject& outer,
                              const std::vector<LObject>& src_fibers,
                              const std::vector<LObject>& tgt_fibers,
                              const std::vector<LMorphism>& fiber_germs) {
  LLObject ws{src_fibers, outer.nu};
  LLObject wt{tgt_fibers, outer.nu};
  SumIndex ss = tower_sum_index(ws);
  SumIndex st = tower_sum_index(wt);
  LObject flat_t = flatten_obj(T, wt);
  std::vector<std::map<Idx, Idx>> pos(tgt_fibers.size());
  for (size_t x = 0; x < tgt_fibers.size(); ++x) {
    auto sup = germ_support(tgt_fibers[x].nu);
    for (size_t q = 0; q < sup.size(); ++q)
      pos[x][sup[q]] = static_cast<Idx>(q);
  }
  LMorphism out;
  for (Idx s : germ_support(flat_t.nu)) {
    auto [x, v] = st.unflat(s);
    auto it = pos[x].find(v);
    if (it == pos[x].end())
      throw CheckError("flattened support escapes the fiber support");
    out.g.push_back(ss.flat(x, fiber_germs[x].g[it->second]));
    out.alpha.push_back(fiber_germs[x].alpha[it->second]);
  }
  return out;
}

// The family-category morphism carrying the given germ, by representative.
inline Idx find_family_morphism(const ConvergenceSpace& A, Idx src, Idx tgt,
                                const LMorphism& germ) {
  for (Idx m : A.fam.cat->hom(src, tgt))
    if (A.fam.mor_reps[m] == germ) return m;
  throw CheckError("reindexing germ is missing from the family category");
}

// ---------------------------------------------------------------------------
// Validation

struct SpaceValidation {
  bool structure = true;
  bool outer_naturality = true;  // reindexing the outer family
  bool fiber_naturality = true;  // reindexing the fiber families
  bool left_unit = true;         // unit arrow at the point is neutral below
  bool right_unit = true;        // unit fibers are neutral above
  bool associativity = true;
  int universe = 0;         // index bound the invariants were certified at
  long long checked = 0;    // instances visited across all invariants
  std::vector<std::string> errors;

  bool ok() const {
    return structure && outer_naturality && fiber_naturality && left_unit &&
           right_unit && associativity;
  }
};

namespace detail {

// Shared lookup tables used by the validators.
struct SpaceScan {
  const ConvergenceSpace& A;
  // (src, tgt, germ) -> family-category morphism
  std::map<std::tuple<Idx, Idx, LMorphism>, Idx> germ_at;
  // morphisms listed by source family
  std::vector<std::vector<Idx>> out_mors;
  // (outer family, fiber family tuple) -> flattened family
  std::map<std::pair<Idx, std::vector<Idx>>, Idx> flat_memo;

  explicit SpaceScan(const ConvergenceSpace& a) : A(a) {
    const FinCategory& Fc = *A.fam.cat;
    out_mors.resize(A.n_families());
    for (Idx m = 0; m < Fc.n_mor(); ++m) {
      germ_at[{Fc.src[m], Fc.tgt[m], A.fam.mor_reps[m]}] = m;
      out_mors[Fc.src[m]].push_back(m);
    }
  }

  Idx flat_of(Idx f, const std::vector<std::pair<Idx, Idx>>& fibers) {
    std::vector<Idx> fams(fibers.size());
    for (size_t i = 0; i < fibers.size(); ++i) fams[i] = fibers[i].first;
    auto key = std::make_pair(f, std::move(fams));
    auto it = flat_memo.find(key);
    if (it != flat_memo.end()) return it->second;
    Idx v = A.family_index(A.flattened_object(f, fibers));
    flat_memo.emplace(std::move(key), v);
    return v;
  }

  Idx find_germ(Idx src, Idx tgt, const LMorphism& rep) const {
    auto it = germ_at.find({src, tgt, rep});
    if (it == germ_at.end())
      throw CheckError("reindexing germ is missing from the family category");
    return it->second;
  }
};

}  // namespace detail

// Checks the table structure and the five invariants, exhaustively over the
// index universe.  Invariant instances whose reindexed input leaves the
// universe are outside the certified bound and are skipped.
inline SpaceValidation validate_space(const ConvergenceSpace& A,
                                      int max_errors = 12) {
  SpaceValidation rep;
  rep.universe = A.universe;
  auto fail = [&](bool& flag, std::string msg) {
    flag = false;
    if (static_cast<int>(rep.errors.size()) < max_errors)
      rep.errors.push_back(std::move(msg));
  };

  // ---- structure ----
  const FinCategory& base = *A.base;
  if (base.n_mor() != base.n_obj) {
    fail(rep.structure, "points must form a discrete category");
    return rep;
  }
  if (!same_category(*A.arrows.dom, *A.fam.cat) ||
      !same_category(*A.arrows.cod, *A.base)) {
    fail(rep.structure,
         "arrow table is not indexed by the family category and the points");
    return rep;
  }
  {
    auto pv = validate_profunctor(A.arrows);
    if (!pv.ok) {
      fail(rep.structure, "arrow table is not functorial: " + pv.errors[0]);
      return rep;
    }
  }
  for (Idx f = 0; f < A.n_families(); ++f)
    if (A.family_size(f) > A.universe) {
      fail(rep.structure, "family " + family_str(A, f) +
                              " exceeds the index universe");
      return rep;
    }
  if (static_cast<int>(A.id_arrow.size()) != A.n_points()) {
    fail(rep.structure, "unit arrow table has wrong size");
    return rep;
  }
  for (Idx pt = 0; pt < A.n_points(); ++pt) {
    Idx e;
    try {
      e = A.eta_index(pt);
    } catch (const CheckError&) {
      fail(rep.structure, "unit family of point " + std::to_string(pt) +
                              " is missing from the family category");
      return rep;
    }
    if (A.id_arrow[pt] < 0 || A.id_arrow[pt] >= A.count(pt, e)) {
      fail(rep.structure,
           "unit arrow of point " + std::to_string(pt) + " is out of range");
      return rep;
    }
  }

  detail::SpaceScan scan(A);

  long long expected = 0;
  bool domain_ok = true;
  for_each_composite_key(A, [&](const CompositeKey& k) {
    ++expected;
    auto it = A.comp.find(k);
    if (it == A.comp.end()) {
      if (domain_ok || rep.errors.empty())
        fail(rep.structure,
             "composition table is missing an entry: " + key_str(A, k));
      domain_ok = false;
      return;
    }
    Idx flat = scan.flat_of(k.fam, k.fibers);
    if (it->second < 0 || it->second >= A.count(k.pt, flat)) {
      fail(rep.structure,
           "composite out of range at " + key_str(A, k));
      domain_ok = false;
    }
  });
  if (domain_ok && A.comp.size() != static_cast<size_t>(expected)) {
    fail(rep.structure, "composition table has " +
                            std::to_string(A.comp.size()) +
                            " entries, expected " + std::to_string(expected));
    domain_ok = false;
  }
  if (!rep.structure) return rep;

  const int np = A.n_points();

  // ---- unit laws ----
  // Unit below: composing the one-point family carrying r over the unit
  // arrow at pt returns r.
  for (Idx pt = 0; pt < np; ++pt) {
    Idx e = A.eta_index(pt);
    for (Idx f = 0; f < A.n_families(); ++f)
      for (Idx r = 0; r < A.count(pt, f); ++r) {
        ++rep.checked;
        CompositeKey k{pt, e, A.id_arrow[pt], {{f, r}}};
        Idx got = A.comp.at(k);
        if (got != r)
          fail(rep.left_unit, "unit arrow is not neutral below at " +
                                  key_str(A, k) + ": got " +
                                  std::to_string(got) + ", expected " +
                                  std::to_string(r));
      }
  }
  // Unit above: composing unit fibers over r returns r.
  for (Idx pt = 0; pt < np; ++pt)
    for (Idx f = 0; f < A.n_families(); ++f) {
      const LObject& F = A.fam.objects[f];
      std::vector<std::pair<Idx, Idx>> fib(F.size());
      for (int x = 0; x < F.size(); ++x)
        fib[x] = {A.eta_index(F.labels[x]), A.id_arrow[F.labels[x]]};
      for (Idx r = 0; r < A.count(pt, f); ++r) {
        ++rep.checked;
        CompositeKey k{pt, f, r, fib};
        Idx got = A.comp.at(k);
        if (got != r)
          fail(rep.right_unit, "unit fibers are not neutral above at " +
                                   key_str(A, k) + ": got " +
                                   std::to_string(got) + ", expected " +
                                   std::to_string(r));
      }
    }

  // ---- naturality in the outer family ----
  // Every reindexing of the outer family arises from a total map g into its
  // index set together with a target family element; the fiber assignment is
  // transported along g and the composites must match under the induced
  // reindexing of the flattened families.
  for (Idx f = 0; f < A.n_families(); ++f) {
    const LObject& F = A.fam.objects[f];
    const int X = F.size();
    std::vector<std::vector<std::pair<Idx, Idx>>> assigns;
    {
      std::vector<std::pair<Idx, Idx>> acc;
      detail::fiber_assignments(
          A, F, A.universe, acc,
          [&](const std::vector<std::pair<Idx, Idx>>& v) {
            assigns.push_back(v);
          });
    }
    if (assigns.empty()) continue;
    std::vector<LObject> src_fibers(X);
    for (int n2 = 0; n2 <= A.universe; ++n2) {
      for (const TElem& nu2 : A.T.carrier(n2)) {
        for (const auto& g : all_functions(n2, X)) {
          if (A.T.map(g, X, nu2) != F.nu) continue;
          LObject F2;
          F2.nu = nu2;
          F2.labels.resize(n2);
          for (int y = 0; y < n2; ++y) F2.labels[y] = F.labels[g[y]];
          Idx f2 = A.family_index(F2);
          LMorphism total;
          total.g = g;
          total.alpha.resize(n2);
          for (int y = 0; y < n2; ++y)
            total.alpha[y] = base.identity[F2.labels[y]];
          LMorphism germ = restrict_to_support(nu2, total);
          Idx m = scan.find_germ(f, f2, germ);
          for (const auto& s : assigns) {
            std::vector<std::pair<Idx, Idx>> s2(n2);
            int sz = 0;
            for (int y = 0; y < n2; ++y) {
              s2[y] = s[g[y]];
              sz += A.family_size(s2[y].first);
            }
            if (sz > A.universe) continue;  // outside the certified bound
            for (int x = 0; x < X; ++x)
              src_fibers[x] = A.fam.objects[s[x].first];
            std::vector<LObject> tgt_fibers(n2);
            for (int y = 0; y < n2; ++y)
              tgt_fibers[y] = A.fam.objects[s2[y].first];
            Idx flat_src = scan.flat_of(f, s);
            Idx flat_tgt = scan.flat_of(f2, s2);
            LMorphism tg = tensor_g_id(A.T, A.base, F, src_fibers, F2,
                                       tgt_fibers, germ.g);
            Idx mflat = scan.find_germ(flat_src, flat_tgt, tg);
            for (Idx pt = 0; pt < np; ++pt)
              for (Idx r = 0; r < A.count(pt, f); ++r) {
                ++rep.checked;
                Idx r2 = A.arrows.ract(m, pt, r);
                Idx lhs = A.comp.at(CompositeKey{pt, f2, r2, s2});
                Idx rhs = A.arrows.ract(mflat, pt,
                                        A.comp.at(CompositeKey{pt, f, r, s}));
                if (lhs != rhs)
                  fail(rep.outer_naturality,
                       "composition is not natural in the outer family at " +
                           key_str(A, CompositeKey{pt, f, r, s}) +
                           " reindexed to " + family_str(A, f2) + ": " +
                           std::to_string(lhs) + " vs " + std::to_string(rhs));
              }
          }
        }
      }
    }
  }

  // ---- naturality in the fiber families ----
  // Single-fiber moves suffice: a simultaneous move factors into single-fiber
  // moves inside the family category, and the arrow table is functorial.
  for (const auto& [k, val] : A.comp) {
    const LObject& F = A.fam.objects[k.fam];
    const int X = F.size();
    int total_sz = 0;
    for (const auto& fb : k.fibers) total_sz += A.family_size(fb.first);
    for (int x = 0; x < X; ++x) {
      auto [gx, ax] = k.fibers[x];
      for (Idx h : scan.out_mors[gx]) {
        Idx g2 = A.fam.cat->tgt[h];
        int sz = total_sz - A.family_size(gx) + A.family_size(g2);
        if (sz > A.universe) continue;  // outside the certified bound
        ++rep.checked;
        CompositeKey k2 = k;
        k2.fibers[x] = {g2, A.arrows.ract(h, F.labels[x], ax)};
        Idx lhs = A.comp.at(k2);
        std::vector<LObject> sf(X), tf(X);
        std::vector<LMorphism> germs(X);
        for (int i = 0; i < X; ++i) {
          sf[i] = A.fam.objects[k.fibers[i].first];
          tf[i] = A.fam.objects[k2.fibers[i].first];
          germs[i] = (i == x) ? A.fam.mor_reps[h]
                              : identity_germ(*A.base, sf[i]);
        }
        LMorphism tg = tensor_id_gx(A.T, F, sf, tf, germs);
        Idx mflat = scan.find_germ(scan.flat_of(k.fam, k.fibers),
                                   scan.flat_of(k2.fam, k2.fibers), tg);
        Idx rhs = A.arrows.ract(mflat, k.pt, val);
        if (lhs != rhs)
          fail(rep.fiber_naturality,
               "composition is not natural in fiber " + std::to_string(x) +
                   " at " + key_str(A, k) + ": " + std::to_string(lhs) +
                   " vs " + std::to_string(rhs));
      }
    }
  }

  // ---- associativity ----
  for (const auto& [k, c1] : A.comp) {
    const LObject& F = A.fam.objects[k.fam];
    const int X = F.size();
    Idx fi = scan.flat_of(k.fam, k.fibers);
    const LObject& flatF = A.fam.objects[fi];
    std::vector<int> sizes(X);
    for (int x = 0; x < X; ++x) sizes[x] = A.family_size(k.fibers[x].first);
    SumIndex si(sizes);
    std::vector<std::pair<Idx, Idx>> acc;
    detail::fiber_assignments(
        A, flatF, A.universe, acc,
        [&](const std::vector<std::pair<Idx, Idx>>& t) {
          ++rep.checked;
          Idx lhs = A.comp.at(CompositeKey{k.pt, fi, c1, t});
          std::vector<std::pair<Idx, Idx>> fib2(X);
          for (int x = 0; x < X; ++x) {
            std::vector<std::pair<Idx, Idx>> slice(
                t.begin() + si.offset[x],
                t.begin() + si.offset[x] + sizes[x]);
            Idx inner = A.comp.at(
                CompositeKey{F.labels[x], k.fibers[x].first,
                             k.fibers[x].second, slice});
            fib2[x] = {scan.flat_of(k.fibers[x].first, slice), inner};
          }
          if (scan.flat_of(k.fam, fib2) != scan.flat_of(fi, t)) {
            fail(rep.associativity,
                 "flattened targets disagree at " + key_str(A, k));
            return;
          }
          Idx rhs = A.comp.at(CompositeKey{k.pt, k.fam, k.arrow, fib2});
          if (lhs != rhs)
            fail(rep.associativity,
                 "composition is not associative at " + key_str(A, k) +
                     " with refibering: " + std::to_string(lhs) + " vs " +
                     std::to_string(rhs));
        });
  }

  return rep;
}

// ---------------------------------------------------------------------------
// Topological character of a space

// The shape shared by spaces arising from point-set data: the points form a
// set, there is at most one arrow per (point, family) pair, and arrow
// existence is reflected along every family reindexing (the action already
// preserves it).
struct TopologicalCharacter {
  bool discrete_points = true;
  bool thin = true;
  bool reflective = true;
  std::vector<std::string> errors;
  bool ok() const { return discrete_points && thin && reflective; }
};

inline TopologicalCharacter topological_character(const ConvergenceSpace& A) {
  TopologicalCharacter rep;
  auto fail = [&](bool& flag, std::string msg) {
    flag = false;
    if (rep.errors.size() < 8) rep.errors.push_back(std::move(msg));
  };
  if (A.base->n_mor() != A.base->n_obj)
    fail(rep.discrete_points, "points do not form a discrete category");
  for (Idx pt = 0; pt < A.n_points(); ++pt)
    for (Idx f = 0; f < A.n_families(); ++f)
      if (A.count(pt, f) > 1)
        fail(rep.thin, "more than one arrow at point " + std::to_string(pt) +
                           " over " + family_str(A, f));
  const FinCategory& Fc = *A.fam.cat;
  for (Idx m = 0; m < Fc.n_mor(); ++m)
    for (Idx pt = 0; pt < A.n_points(); ++pt)
      if (A.count(pt, Fc.tgt[m]) > 0 && A.count(pt, Fc.src[m]) == 0)
        fail(rep.reflective,
             "arrow existence is not reflected along the reindexing " +
                 family_str(A, Fc.src[m]) + " -> " + family_str(A, Fc.tgt[m]) +
                 " at point " + std::to_string(pt));
  return rep;
}

// ---------------------------------------------------------------------------
// Building a space from a convergence criterion

namespace detail {

// Fills arrows, unit arrows, and the composition table of a space whose
// arrow sets all have size at most one, from an existence criterion on
// (point, family).  The criterion must be closed under the family actions
// and under composition; violations are reported as errors.
inline void build_thin_space(ConvergenceSpace& A,
                             const std::function<bool(Idx, const LObject&)>&
                                 converges) {
  const int np = A.n_points();
  const int nf = A.n_families();
  const FinCategory& Fc = *A.fam.cat;
  A.arrows.dom = A.fam.cat;
  A.arrows.cod = A.base;
  A.arrows.counts.assign(static_cast<size_t>(np) * nf, 0);
  for (Idx pt = 0; pt < np; ++pt)
    for (Idx f = 0; f < nf; ++f)
      A.arrows.counts[static_cast<size_t>(pt) * nf + f] =
          converges(pt, A.fam.objects[f]) ? 1 : 0;
  // Point side: only identities (discrete base).
  A.arrows.lact_tab.resize(A.base->n_mor());
  for (Idx t = 0; t < A.base->n_mor(); ++t) {
    A.arrows.lact_tab[t].resize(nf);
    for (Idx f = 0; f < nf; ++f) {
      int c = A.arrows.count(A.base->tgt[t], f);
      A.arrows.lact_tab[t][f].resize(c);
      for (int i = 0; i < c; ++i) A.arrows.lact_tab[t][f][i] = i;
    }
  }
  // Family side: transport the unique arrow along each reindexing.
  A.arrows.ract_tab.resize(Fc.n_mor());
  for (Idx m = 0; m < Fc.n_mor(); ++m) {
    A.arrows.ract_tab[m].resize(np);
    for (Idx pt = 0; pt < np; ++pt) {
      int c = A.arrows.count(pt, Fc.src[m]);
      A.arrows.ract_tab[m][pt].resize(c);
      if (c == 1) {
        if (A.arrows.count(pt, Fc.tgt[m]) != 1)
          throw CheckError(
              "convergence criterion is not closed under family reindexing");
        A.arrows.ract_tab[m][pt][0] = 0;
      }
    }
  }
  A.id_arrow.assign(np, 0);
  for (Idx pt = 0; pt < np; ++pt)
    if (A.count(pt, A.eta_index(pt)) != 1)
      throw CheckError("one-point family of a point does not converge to it");
  A.comp.clear();
  for_each_composite_key(A, [&](const CompositeKey& k) {
    if (!converges(k.pt, A.flattened_object(k.fam, k.fibers)))
      throw CheckError("convergence criterion is not closed under composition");
    A.comp.emplace(k, 0);
  });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Topologies

// Opens must be sorted subsets of {0..n-1}, pairwise distinct, containing the
// empty set and the full set, and closed under union and intersection.
inline ValidationReport validate_topology(
    int n, const std::vector<std::vector<Idx>>& opens) {
  ValidationReport rep;
  std::set<std::vector<Idx>> seen;
  for (const auto& o : opens) {
    if (!std::is_sorted(o.begin(), o.end()) ||
        std::adjacent_find(o.begin(), o.end()) != o.end())
      rep.fail("open sets must be sorted and duplicate-free");
    for (Idx x : o)
      if (x < 0 || x >= n) rep.fail("open set contains an unknown point");
    if (!seen.insert(o).second) rep.fail("duplicate open set");
  }
  if (!rep.ok) return rep;
  std::vector<Idx> full(n);
  for (int i = 0; i < n; ++i) full[i] = i;
  if (!seen.count({})) rep.fail("the empty set must be open");
  if (!seen.count(full)) rep.fail("the full set must be open");
  for (const auto& a : opens)
    for (const auto& b : opens) {
      std::vector<Idx> u, i;
      std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                     std::back_inserter(u));
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::back_inserter(i));
      if (!seen.count(u)) rep.fail("opens are not closed under union");
      if (!seen.count(i)) rep.fail("opens are not closed under intersection");
      if (!rep.ok) return rep;
    }
  return rep;
}

// The space of an open-set topology: a family converges to a point exactly
// when the label at the family's base point belongs to every open
// neighbourhood of that point.  Uses the point-selecting monad, so every
// family carries a base point.
inline ConvergenceSpace from_topology(int n,
                                      const std::vector<std::vector<Idx>>& opens,
                                      int universe = 3,
                                      long long max_morphisms = 20000) {
  auto v = validate_topology(n, opens);
  if (!v.ok) throw CheckError("not a topology: " + v.errors[0]);
  ConvergenceSpace A;
  A.T = monad_instance(MonadName::ultrafilter);
  A.base = make_cat(discrete_category(n));
  A.universe = universe;
  A.fam = build_quotient_category(A.T, A.base, universe, max_morphisms);
  A.index_families();
  detail::build_thin_space(A, [&](Idx pt, const LObject& F) {
    Idx label = F.labels[F.nu.point];
    for (const auto& o : opens)
      if (std::binary_search(o.begin(), o.end(), pt) &&
          !std::binary_search(o.begin(), o.end(), label))
        return false;
    return true;
  });
  return A;
}

// ---------------------------------------------------------------------------
// Closure spaces

// cl is a table over all 2^n subsets (bitmask-indexed, bit x = point x) of
// sorted subsets; it must be extensive, monotone, and idempotent.
inline ValidationReport validate_closure_operator(
    int n, const std::vector<std::vector<Idx>>& cl) {
  ValidationReport rep;
  if (static_cast<int>(cl.size()) != (1 << n)) {
    rep.fail("closure table must have one row per subset");
    return rep;
  }
  auto mask_of = [&](const std::vector<Idx>& s) {
    int m = 0;
    for (Idx x : s) m |= 1 << x;
    return m;
  };
  for (int m = 0; m < (1 << n); ++m) {
    const auto& c = cl[m];
    if (!std::is_sorted(c.begin(), c.end()) ||
        std::adjacent_find(c.begin(), c.end()) != c.end())
      rep.fail("closure values must be sorted and duplicate-free");
    for (Idx x : c)
      if (x < 0 || x >= n) rep.fail("closure value contains an unknown point");
  }
  if (!rep.ok) return rep;
  for (int m = 0; m < (1 << n); ++m) {
    int cm = mask_of(cl[m]);
    if ((m & cm) != m) rep.fail("closure is not extensive");
    if (mask_of(cl[cm]) != cm) rep.fail("closure is not idempotent");
    for (int m2 = m;; m2 = (m2 + 1) | m) {  // supersets of m
      if ((mask_of(cl[m2]) & cm) != cm) rep.fail("closure is not monotone");
      if (m2 == (1 << n) - 1) break;
    }
    if (!rep.ok) return rep;
  }
  return rep;
}

// The space of a closure operator: a family converges to a point exactly when
// the point lies in the closure of the labels on the family's minimal
// up-set.  Uses the up-set monad, so a family may have an empty minimal set
// (its closure criterion then reads from cl of the empty set).  Idempotence
// is what makes the criterion closed under composition.
inline ConvergenceSpace from_closure_space(
    int n, const std::vector<std::vector<Idx>>& cl, int universe = 3,
    long long max_morphisms = 200000) {
  auto v = validate_closure_operator(n, cl);
  if (!v.ok) throw CheckError("not a closure operator: " + v.errors[0]);
  ConvergenceSpace A;
  A.T = monad_instance(MonadName::filter);
  A.base = make_cat(discrete_category(n));
  A.universe = universe;
  A.fam = build_quotient_category(A.T, A.base, universe, max_morphisms);
  A.index_families();
  detail::build_thin_space(A, [&](Idx pt, const LObject& F) {
    int mask = 0;
    for (Idx x : germ_support(F.nu)) mask |= 1 << F.labels[x];
    const auto& c = cl[mask];
    return std::binary_search(c.begin(), c.end(), pt);
  });
  return A;
}

// ---------------------------------------------------------------------------
// The category of points

// Morphisms a -> b of the point category, in construction order: the arrows
// at (a, one-point family at b), enumerated by (a, b, arrow index).
inline std::vector<std::tuple<Idx, Idx, Idx>> point_morphisms(
    const ConvergenceSpace& A) {
  std::vector<std::tuple<Idx, Idx, Idx>> out;
  for (Idx a = 0; a < A.n_points(); ++a)
    for (Idx b = 0; b < A.n_points(); ++b)
      for (Idx r = 0; r < A.count(a, A.eta_index(b)); ++r)
        out.emplace_back(a, b, r);
  return out;
}

// The category whose objects are the points and whose morphisms a -> b are
// the arrows from a to the one-point family at b, composed through the
// composition table.  Morphism order matches point_morphisms.
inline FinCategory category_of_points(const ConvergenceSpace& A) {
  CategoryBuilder bld;
  for (Idx a = 0; a < A.n_points(); ++a)
    bld.add_object("p" + std::to_string(a));
  auto mors = point_morphisms(A);
  std::map<std::tuple<Idx, Idx, Idx>, Idx> mor_idx;
  for (const auto& m : mors)
    mor_idx[m] = bld.add_morphism(std::get<0>(m), std::get<1>(m));
  for (Idx a = 0; a < A.n_points(); ++a)
    bld.set_identity(a, mor_idx.at({a, a, A.id_arrow[a]}));
  for (const auto& mf : mors) {
    auto [a, b, rf] = mf;
    for (const auto& mg : mors) {
      auto [b2, c, rg] = mg;
      if (b2 != b) continue;
      CompositeKey k{a, A.eta_index(b), rf, {{A.eta_index(c), rg}}};
      bld.set_composite(mor_idx.at(mg), mor_idx.at(mf), mor_idx.at({a, c, A.comp.at(k)}));
    }
  }
  return bld.build();
}

// ---------------------------------------------------------------------------
// Algebra-witness presentation
//
// The same tables, read as an algebra for the family pseudomonad: the arrow
// table is the structure carrier, the unit arrows are the components of the
// unit comparison cell, and the composition table stores the multiplication
// comparison cell on its canonical generating inputs (an arrow paired with a
// fiber assignment).  Unlike a space, a witness may sit over a non-discrete
// category of points, with the point-side action of the carrier recording
// how arrows restrict along point morphisms.

struct LaxAlgebraWitness : ConvergenceSpace {
  bool colax = false;       // orientation of the comparison cells
  bool invertible = false;  // pseudo rather than merely lax

  std::vector<Idx>& unitor() { return id_arrow; }
  const std::vector<Idx>& unitor() const { return id_arrow; }
  std::map<CompositeKey, Idx>& multiplicator() { return comp; }
  const std::map<CompositeKey, Idx>& multiplicator() const { return comp; }
};

// Reads a space as an algebra witness over its own (discrete) points.
inline LaxAlgebraWitness to_lax_algebra(const ConvergenceSpace& A) {
  LaxAlgebraWitness w;
  static_cast<ConvergenceSpace&>(w) = A;
  return w;
}

// Reads a witness over a discrete point category back as a space.  Witnesses
// over non-discrete point categories must go through discretize.
inline ConvergenceSpace from_lax_algebra(const LaxAlgebraWitness& w) {
  if (w.base->n_mor() != w.base->n_obj)
    throw CheckError(
        "witness sits over a non-discrete point category; discretize it");
  return static_cast<const ConvergenceSpace&>(w);
}

// ---------------------------------------------------------------------------
// Normalization

// Whether the comparison functor from the point category of the witness's
// base into its arrow-defined point category is fully faithful: for every
// pair of base objects, sending t to the restriction of the unit comparison
// along t is a bijection onto the arrows at (src, one-point family at tgt).
inline bool is_normalized(const LaxAlgebraWitness& w) {
  for (Idx a = 0; a < w.n_points(); ++a)
    for (Idx b = 0; b < w.n_points(); ++b) {
      auto homs = w.base->hom(a, b);
      Idx e = w.eta_index(b);
      if (static_cast<int>(homs.size()) != w.count(a, e)) return false;
      std::set<Idx> image;
      for (Idx t : homs)
        image.insert(w.arrows.lact(t, e, w.id_arrow[b]));
      if (image.size() != homs.size()) return false;
    }
  return true;
}

// Rebases a valid space onto its category of points.  Families keep their
// label and element data; the family category acquires reindexing germs with
// point-morphism components, whose action is computed from the space's own
// composition table: first reindex along the label-preserving germ, then
// compose with the one-point families of the corresponding point morphisms.
inline LaxAlgebraWitness normalize(const ConvergenceSpace& A,
                                   long long max_morphisms = 200000) {
  LaxAlgebraWitness w;
  w.T = A.T;
  w.universe = A.universe;
  w.colax = false;
  w.invertible = false;
  auto mors = point_morphisms(A);
  w.base = make_cat(category_of_points(A));
  w.fam = build_quotient_category(w.T, w.base, A.universe, max_morphisms);
  if (w.fam.objects != A.fam.objects)
    throw CheckError("rebased family category lists different objects");
  w.index_families();

  const int np = A.n_points();
  const int nf = A.n_families();
  w.arrows.dom = w.fam.cat;
  w.arrows.cod = w.base;
  w.arrows.counts = A.arrows.counts;

  // Point side: restriction along a point morphism composes the one-point
  // family carrying it under the arrow being restricted.
  const FinCategory& P = *w.base;
  w.arrows.lact_tab.resize(P.n_mor());
  for (Idx t = 0; t < P.n_mor(); ++t) {
    auto [a, b, rt] = mors[t];
    w.arrows.lact_tab[t].resize(nf);
    for (Idx f = 0; f < nf; ++f) {
      int c = A.count(b, f);
      w.arrows.lact_tab[t][f].resize(c);
      for (Idx r = 0; r < c; ++r)
        w.arrows.lact_tab[t][f][r] =
            A.comp.at(CompositeKey{a, A.eta_index(b), rt, {{f, r}}});
    }
  }

  // Family side: a germ with point-morphism components factors as the
  // label-preserving reindexing germ into an intermediate family, followed
  // by composition with one-point fibers carrying the components.
  std::map<std::tuple<Idx, Idx, LMorphism>, Idx> germ_at;
  {
    const FinCategory& Fc = *A.fam.cat;
    for (Idx m = 0; m < Fc.n_mor(); ++m)
      germ_at[{Fc.src[m], Fc.tgt[m], A.fam.mor_reps[m]}] = m;
  }
  const FinCategory& F2c = *w.fam.cat;
  w.arrows.ract_tab.resize(F2c.n_mor());
  for (Idx m2 = 0; m2 < F2c.n_mor(); ++m2) {
    Idx fsrc = F2c.src[m2], ftgt = F2c.tgt[m2];
    const LObject& F = A.fam.objects[fsrc];
    const LObject& Ft = A.fam.objects[ftgt];
    const LMorphism& rep = w.fam.mor_reps[m2];
    std::vector<Idx> sup = germ_support(Ft.nu);
    // Intermediate family: target indices, source labels along the germ.
    LObject mid;
    mid.nu = Ft.nu;
    mid.labels = Ft.labels;
    for (size_t j = 0; j < sup.size(); ++j)
      mid.labels[sup[j]] = F.labels[rep.g[j]];
    Idx fmid = A.family_index(mid);
    LMorphism rep0;
    rep0.g = rep.g;
    rep0.alpha.resize(sup.size());
    for (size_t j = 0; j < sup.size(); ++j)
      rep0.alpha[j] = A.base->identity[mid.labels[sup[j]]];
    auto it0 = germ_at.find({fsrc, fmid, rep0});
    if (it0 == germ_at.end())
      throw CheckError("label-preserving germ is missing from the original space");
    Idx m0 = it0->second;
    // Fibers: unit arrows off the support, the point-morphism components on it.
    std::vector<std::pair<Idx, Idx>> fib(Ft.size());
    for (int y = 0; y < Ft.size(); ++y)
      fib[y] = {A.eta_index(Ft.labels[y]), A.id_arrow[Ft.labels[y]]};
    for (size_t j = 0; j < sup.size(); ++j) {
      auto [pa, pb, pr] = mors[rep.alpha[j]];
      if (pa != mid.labels[sup[j]] || pb != Ft.labels[sup[j]])
        throw CheckError("germ component is not typed by its labels");
      fib[sup[j]] = {A.eta_index(pb), pr};
    }
    w.arrows.ract_tab[m2].resize(np);
    for (Idx pt = 0; pt < np; ++pt) {
      int c = A.count(pt, fsrc);
      w.arrows.ract_tab[m2][pt].resize(c);
      for (Idx r = 0; r < c; ++r) {
        Idx r0 = A.arrows.ract(m0, pt, r);
        w.arrows.ract_tab[m2][pt][r] =
            A.comp.at(CompositeKey{pt, fmid, r0, fib});
      }
    }
  }

  w.id_arrow = A.id_arrow;
  w.comp = A.comp;
  return w;
}

// Forgets the point morphisms of a witness, returning the space over the
// same points made discrete.  Inverse to normalize on valid spaces.
inline ConvergenceSpace discretize(const LaxAlgebraWitness& w,
                                   long long max_morphisms = 200000) {
  ConvergenceSpace A;
  A.T = w.T;
  A.universe = w.universe;
  A.base = make_cat(discrete_category(w.base->n_obj));
  A.fam = build_quotient_category(A.T, A.base, A.universe, max_morphisms);
  if (A.fam.objects != w.fam.objects)
    throw CheckError("discrete family category lists different objects");
  A.index_families();
  const int np = A.n_points();
  A.arrows.dom = A.fam.cat;
  A.arrows.cod = A.base;
  A.arrows.counts = w.arrows.counts;
  A.arrows.lact_tab.resize(np);
  for (Idx t = 0; t < np; ++t) {
    A.arrows.lact_tab[t].resize(A.n_families());
    for (Idx f = 0; f < A.n_families(); ++f) {
      int c = A.count(t, f);
      A.arrows.lact_tab[t][f].resize(c);
      for (int i = 0; i < c; ++i) A.arrows.lact_tab[t][f][i] = i;
    }
  }
  std::map<std::tuple<Idx, Idx, LMorphism>, Idx> germ_at;
  {
    const FinCategory& Fw = *w.fam.cat;
    for (Idx m = 0; m < Fw.n_mor(); ++m)
      germ_at[{Fw.src[m], Fw.tgt[m], w.fam.mor_reps[m]}] = m;
  }
  const FinCategory& F3 = *A.fam.cat;
  A.arrows.ract_tab.resize(F3.n_mor());
  for (Idx m3 = 0; m3 < F3.n_mor(); ++m3) {
    Idx fsrc = F3.src[m3], ftgt = F3.tgt[m3];
    const LObject& Ft = A.fam.objects[ftgt];
    LMorphism rep = A.fam.mor_reps[m3];
    std::vector<Idx> sup = germ_support(Ft.nu);
    for (size_t j = 0; j < sup.size(); ++j)
      rep.alpha[j] = w.base->identity[Ft.labels[sup[j]]];
    auto it = germ_at.find({fsrc, ftgt, rep});
    if (it == germ_at.end())
      throw CheckError("identity-component germ is missing from the witness");
    A.arrows.ract_tab[m3] = w.arrows.ract_tab[it->second];
  }
  A.id_arrow = w.id_arrow;
  A.comp = w.comp;
  return A;
}

// ---------------------------------------------------------------------------
// Maps between spaces
//
// A map of spaces consists of a point function together with, for every
// family F and point a, an arrow function from the arrows F => a into the
// arrows over the image family at the image point.  Validation runs two
// independent routes: the direct laws against the space tables, and the
// pasting laws against the unitor/multiplicator tables of the algebra
// witnesses, reporting whether the verdicts agree.

struct ContinuousMap {
  std::vector<Idx> point_map;  // source point -> target point
  // am[f][a][i]: image of arrow i in arrows(a, f) inside
  // arrows(point_map[a], image family of f).
  std::vector<std::vector<std::vector<Idx>>> am;
};

// The point function as a functor between the discrete point categories.
inline Functor base_functor(const ConvergenceSpace& A, const ConvergenceSpace& B,
                            const std::vector<Idx>& point_map) {
  Functor fb;
  fb.dom = A.base;
  fb.cod = B.base;
  fb.obj_map = point_map;
  fb.mor_map.resize(A.base->n_mor());
  for (Idx m = 0; m < A.base->n_mor(); ++m)
    fb.mor_map[m] = B.base->identity[point_map[A.base->src[m]]];
  return fb;
}

// Indices in B of the images of A's families under the point function.
inline std::vector<Idx> image_families(const ConvergenceSpace& A,
                                       const ConvergenceSpace& B,
                                       const Functor& fb) {
  std::vector<Idx> img(A.n_families());
  for (Idx f = 0; f < A.n_families(); ++f)
    img[f] = B.family_index(apply_L_obj(fb, A.fam.objects[f]));
  return img;
}

// Existence-level continuity: every convergent family has a convergent image.
inline bool preserves_convergence(const ConvergenceSpace& A,
                                  const ConvergenceSpace& B,
                                  const std::vector<Idx>& point_map) {
  Functor fb = base_functor(A, B, point_map);
  std::vector<Idx> img = image_families(A, B, fb);
  for (Idx f = 0; f < A.n_families(); ++f)
    for (Idx a = 0; a < A.n_points(); ++a)
      if (A.count(a, f) > 0 && B.count(point_map[a], img[f]) == 0) return false;
  return true;
}

// Arrow functions forced by the point function when the target has at most
// one arrow per slot.  Throws when some convergent family acquires a
// divergent image.
inline ContinuousMap continuous_map_from_base(const ConvergenceSpace& A,
                                              const ConvergenceSpace& B,
                                              const std::vector<Idx>& point_map) {
  Functor fb = base_functor(A, B, point_map);
  std::vector<Idx> img = image_families(A, B, fb);
  ContinuousMap cm;
  cm.point_map = point_map;
  cm.am.resize(A.n_families());
  for (Idx f = 0; f < A.n_families(); ++f) {
    cm.am[f].resize(A.n_points());
    for (Idx a = 0; a < A.n_points(); ++a) {
      int c = A.count(a, f);
      if (c > 0 && B.count(point_map[a], img[f]) == 0)
        throw CheckError("a convergent family has a divergent image");
      cm.am[f][a].assign(static_cast<size_t>(c), 0);
    }
  }
  return cm;
}

inline ContinuousMap identity_map(const ConvergenceSpace& A) {
  ContinuousMap cm;
  cm.point_map.resize(A.n_points());
  std::iota(cm.point_map.begin(), cm.point_map.end(), 0);
  cm.am.resize(A.n_families());
  for (Idx f = 0; f < A.n_families(); ++f) {
    cm.am[f].resize(A.n_points());
    for (Idx a = 0; a < A.n_points(); ++a) {
      cm.am[f][a].resize(A.count(a, f));
      std::iota(cm.am[f][a].begin(), cm.am[f][a].end(), 0);
    }
  }
  return cm;
}

// The composite map A -> C of cm1 : A -> B and cm2 : B -> C.
inline ContinuousMap compose_maps(const ConvergenceSpace& A,
                                  const ConvergenceSpace& B,
                                  const ConvergenceSpace& C,
                                  const ContinuousMap& cm2,
                                  const ContinuousMap& cm1) {
  Functor fb = base_functor(A, B, cm1.point_map);
  std::vector<Idx> img = image_families(A, B, fb);
  ContinuousMap out;
  out.point_map.resize(A.n_points());
  for (Idx a = 0; a < A.n_points(); ++a)
    out.point_map[a] = cm2.point_map[cm1.point_map[a]];
  out.am.resize(A.n_families());
  for (Idx f = 0; f < A.n_families(); ++f) {
    out.am[f].resize(A.n_points());
    for (Idx a = 0; a < A.n_points(); ++a) {
      int c = A.count(a, f);
      out.am[f][a].resize(c);
      for (int i = 0; i < c; ++i)
        out.am[f][a][i] = cm2.am[img[f]][cm1.point_map[a]][cm1.am[f][a][i]];
    }
  }
  return out;
}

struct MapValidation {
  bool structure = true;
  bool germ_naturality = true;    // squares against family reindexings
  bool unit_law = true;           // unit arrows map to unit arrows
  bool composition_law = true;    // composites map to composites
  bool colax_unit = true;         // pasting against the witness unitors
  bool colax_composition = true;  // pasting against the witness multiplicators
  bool routes_agree = true;
  long long checked = 0;
  std::vector<std::string> errors;

  bool ok() const {
    return structure && germ_naturality && unit_law && composition_law &&
           routes_agree;
  }
};

// The image of a composition input under the map.
inline CompositeKey map_composite_key(const ContinuousMap& cm,
                                      const std::vector<Idx>& img,
                                      const ConvergenceSpace& A,
                                      const CompositeKey& k) {
  CompositeKey out;
  out.pt = cm.point_map[k.pt];
  out.fam = img[k.fam];
  out.arrow = cm.am[k.fam][k.pt][k.arrow];
  out.fibers.resize(k.fibers.size());
  const LObject& F = A.fam.objects[k.fam];
  for (size_t x = 0; x < k.fibers.size(); ++x) {
    Idx b = F.labels[x];
    out.fibers[x] = {img[k.fibers[x].first],
                     cm.am[k.fibers[x].first][b][k.fibers[x].second]};
  }
  return out;
}

inline MapValidation validate_continuous_map(const ConvergenceSpace& A,
                                             const ConvergenceSpace& B,
                                             const ContinuousMap& cm,
                                             int max_errors = 12) {
  MapValidation rep;
  auto fail = [&](bool MapValidation::*flag, const std::string& msg) {
    rep.*flag = false;
    if (static_cast<int>(rep.errors.size()) < max_errors) rep.errors.push_back(msg);
  };

  // Structure: shapes, ranges, and image families must exist in the target.
  if (A.T.name != B.T.name) {
    fail(&MapValidation::structure,
         "source and target spaces use different family functors");
    return rep;
  }
  if (static_cast<int>(cm.point_map.size()) != A.n_points()) {
    fail(&MapValidation::structure, "point function has the wrong arity");
    return rep;
  }
  for (Idx v : cm.point_map)
    if (v < 0 || v >= B.n_points()) {
      fail(&MapValidation::structure, "point function value out of range");
      return rep;
    }
  Functor fb = base_functor(A, B, cm.point_map);
  std::vector<Idx> img;
  try {
    img = image_families(A, B, fb);
  } catch (const CheckError& e) {
    fail(&MapValidation::structure,
         std::string("image family is outside the target universe: ") + e.what());
    return rep;
  }
  if (static_cast<int>(cm.am.size()) != A.n_families()) {
    fail(&MapValidation::structure, "arrow table has the wrong family arity");
    return rep;
  }
  for (Idx f = 0; f < A.n_families() && rep.structure; ++f) {
    if (static_cast<int>(cm.am[f].size()) != A.n_points()) {
      fail(&MapValidation::structure, "arrow table has the wrong point arity");
      break;
    }
    for (Idx a = 0; a < A.n_points(); ++a) {
      if (static_cast<int>(cm.am[f][a].size()) != A.count(a, f)) {
        fail(&MapValidation::structure,
             "arrow table size mismatch at " + family_str(A, f));
        break;
      }
      for (Idx v : cm.am[f][a])
        if (v < 0 || v >= B.count(cm.point_map[a], img[f])) {
          fail(&MapValidation::structure,
               "arrow image out of range at " + family_str(A, f));
          break;
        }
    }
  }
  if (!rep.structure) return rep;

  // Germ naturality: arrow functions commute with family reindexing.
  {
    const FinCategory& Fc = *A.fam.cat;
    for (Idx m = 0; m < Fc.n_mor(); ++m) {
      Idx fs = Fc.src[m], ft = Fc.tgt[m];
      LMorphism irep = apply_L_mor(fb, A.fam.mor_reps[m]);
      Idx m2;
      try {
        m2 = find_family_morphism(B, img[fs], img[ft], irep);
      } catch (const CheckError&) {
        fail(&MapValidation::germ_naturality,
             "image of a reindexing germ is missing from the target");
        continue;
      }
      for (Idx a = 0; a < A.n_points(); ++a) {
        int c = A.count(a, fs);
        for (Idx i = 0; i < c; ++i) {
          ++rep.checked;
          if (cm.am[ft][a][A.arrows.ract(m, a, i)] !=
              B.arrows.ract(m2, cm.point_map[a], cm.am[fs][a][i]))
            fail(&MapValidation::germ_naturality,
                 "reindexing square fails at " + family_str(A, fs));
        }
      }
    }
  }

  // Direct unit and composition laws against the space tables.
  for (Idx a = 0; a < A.n_points(); ++a) {
    ++rep.checked;
    if (cm.am[A.eta_index(a)][a][A.id_arrow[a]] != B.id_arrow[cm.point_map[a]])
      fail(&MapValidation::unit_law,
           "unit arrow at point " + std::to_string(a) + " is not preserved");
  }
  for (const auto& kv : A.comp) {
    ++rep.checked;
    CompositeKey ik = map_composite_key(cm, img, A, kv.first);
    auto it = B.comp.find(ik);
    if (it == B.comp.end()) {
      fail(&MapValidation::composition_law,
           "image of a composition input is outside the target table");
      continue;
    }
    Idx flat = A.family_index(A.flattened_object(kv.first.fam, kv.first.fibers));
    if (cm.am[flat][kv.first.pt][kv.second] != it->second)
      fail(&MapValidation::composition_law,
           "composite is not preserved at " + key_str(A, kv.first));
  }

  // Pasting route: the same laws read through the algebra witnesses.
  {
    LaxAlgebraWitness wa = to_lax_algebra(A);
    LaxAlgebraWitness wb = to_lax_algebra(B);
    for (Idx a = 0; a < A.n_points(); ++a) {
      ++rep.checked;
      if (cm.am[wa.eta_index(a)][a][wa.unitor()[a]] !=
          wb.unitor()[cm.point_map[a]])
        fail(&MapValidation::colax_unit,
             "unitor pasting fails at point " + std::to_string(a));
    }
    for (const auto& kv : wa.multiplicator()) {
      ++rep.checked;
      CompositeKey ik = map_composite_key(cm, img, A, kv.first);
      auto it = wb.multiplicator().find(ik);
      if (it == wb.multiplicator().end()) {
        fail(&MapValidation::colax_composition,
             "multiplicator pasting leaves the witness table");
        continue;
      }
      Idx flat = wa.flattened_index(kv.first);
      if (cm.am[flat][kv.first.pt][kv.second] != it->second)
        fail(&MapValidation::colax_composition,
             "multiplicator pasting fails at " + key_str(A, kv.first));
    }
  }
  if (rep.unit_law != rep.colax_unit ||
      rep.composition_law != rep.colax_composition) {
    rep.routes_agree = false;
    if (static_cast<int>(rep.errors.size()) < max_errors)
      rep.errors.push_back("direct and pasting routes disagree");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Transformations between maps
//
// A transformation f => g assigns to each point a an arrow from the one-point
// family at g(a) to f(a).  Validation again runs two routes: the exchange law
// against the target's composition table, and the cell square against the
// germ actions of the normalized witness over the target's point category.

struct Transformation {
  std::vector<Idx> at;  // at[a] in arrows(f(a), one-point family at g(a))
};

struct TransformationValidation {
  bool structure = true;
  bool exchange = true;     // composite with the component on either side
  bool cell_square = true;  // normalized-witness germ/point action square
  bool routes_agree = true;
  long long checked = 0;
  std::vector<std::string> errors;

  bool ok() const {
    return structure && exchange && cell_square && routes_agree;
  }
};

inline TransformationValidation validate_transformation(
    const ConvergenceSpace& A, const ConvergenceSpace& B,
    const ContinuousMap& f, const ContinuousMap& g, const Transformation& tr,
    int max_errors = 12) {
  TransformationValidation rep;
  auto fail = [&](bool TransformationValidation::*flag, const std::string& msg) {
    rep.*flag = false;
    if (static_cast<int>(rep.errors.size()) < max_errors) rep.errors.push_back(msg);
  };

  Functor fbf = base_functor(A, B, f.point_map);
  Functor fbg = base_functor(A, B, g.point_map);
  std::vector<Idx> imgf = image_families(A, B, fbf);
  std::vector<Idx> imgg = image_families(A, B, fbg);

  if (static_cast<int>(tr.at.size()) != A.n_points()) {
    fail(&TransformationValidation::structure, "component list has wrong arity");
    return rep;
  }
  for (Idx a = 0; a < A.n_points(); ++a) {
    Idx eg = B.eta_index(g.point_map[a]);
    if (tr.at[a] < 0 || tr.at[a] >= B.count(f.point_map[a], eg)) {
      fail(&TransformationValidation::structure,
           "component at point " + std::to_string(a) + " is out of range");
      return rep;
    }
  }

  // Route one: the exchange law in the target's composition table.  Composing
  // the component below the g-image equals composing the components above the
  // f-image.
  for (Idx fa = 0; fa < A.n_families(); ++fa) {
    const LObject& F = A.fam.objects[fa];
    for (Idx a = 0; a < A.n_points(); ++a) {
      int c = A.count(a, fa);
      for (Idx r = 0; r < c; ++r) {
        ++rep.checked;
        CompositeKey lhs;
        lhs.pt = f.point_map[a];
        lhs.fam = B.eta_index(g.point_map[a]);
        lhs.arrow = tr.at[a];
        lhs.fibers = {{imgg[fa], g.am[fa][a][r]}};
        CompositeKey rhs;
        rhs.pt = f.point_map[a];
        rhs.fam = imgf[fa];
        rhs.arrow = f.am[fa][a][r];
        rhs.fibers.resize(F.size());
        for (int x = 0; x < F.size(); ++x) {
          Idx b = F.labels[x];
          rhs.fibers[x] = {B.eta_index(g.point_map[b]), tr.at[b]};
        }
        if (B.comp.at(lhs) != B.comp.at(rhs))
          fail(&TransformationValidation::exchange,
               "exchange law fails at " + family_str(A, fa) + " over point " +
                   std::to_string(a));
      }
    }
  }

  // Route two: read the components as point morphisms of the normalized
  // witness and check the action square there.
  try {
    LaxAlgebraWitness nb = normalize(B);
    std::vector<Idx> p(A.n_points(), -1);
    for (Idx a = 0; a < A.n_points(); ++a) {
      Idx ga = g.point_map[a];
      Idx eg = nb.eta_index(ga);
      for (Idx t : nb.base->hom(f.point_map[a], ga))
        if (nb.arrows.lact(t, eg, nb.id_arrow[ga]) == tr.at[a]) {
          p[a] = t;
          break;
        }
      if (p[a] < 0)
        fail(&TransformationValidation::cell_square,
             "component at point " + std::to_string(a) +
                 " is not the trace of a point morphism");
    }
    if (rep.cell_square) {
      for (Idx fa = 0; fa < A.n_families(); ++fa) {
        const LObject& F = A.fam.objects[fa];
        std::vector<Idx> sup = germ_support(F.nu);
        LMorphism cell;
        cell.g = sup;
        cell.alpha.resize(sup.size());
        for (size_t j = 0; j < sup.size(); ++j) cell.alpha[j] = p[F.labels[sup[j]]];
        Idx m;
        try {
          m = find_family_morphism(nb, imgf[fa], imgg[fa], cell);
        } catch (const CheckError&) {
          fail(&TransformationValidation::cell_square,
               "component germ is missing at " + family_str(A, fa));
          continue;
        }
        for (Idx a = 0; a < A.n_points(); ++a) {
          int c = A.count(a, fa);
          for (Idx r = 0; r < c; ++r) {
            ++rep.checked;
            Idx lhs = nb.arrows.ract(m, f.point_map[a], f.am[fa][a][r]);
            Idx rhs = nb.arrows.lact(p[a], imgg[fa], g.am[fa][a][r]);
            if (lhs != rhs)
              fail(&TransformationValidation::cell_square,
                   "cell square fails at " + family_str(A, fa) + " over point " +
                       std::to_string(a));
          }
        }
      }
    }
  } catch (const CheckError& e) {
    fail(&TransformationValidation::cell_square,
         std::string("target does not normalize: ") + e.what());
  }

  if (rep.exchange != rep.cell_square) {
    rep.routes_agree = false;
    if (static_cast<int>(rep.errors.size()) < max_errors)
      rep.errors.push_back("exchange and cell-square routes disagree");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Pseudoalgebra validation
//
// A witness is a pseudoalgebra when its unit and multiplication comparison
// cells are invertible.  The unit cells are invertible exactly when the two
// unit laws hold: each component pastes to the map the law equates with the
// identity.  The multiplication cell has one component per point and
// second-level family; its source glues unit decompositions of composite
// arrows along the reindexing germs of the family category, so the component
// is invertible exactly when the gluing classes at that component biject onto
// the composite arrows through the multiplication table.
//
// Components are certified at the second-level families with one-point outer
// index: a fiber family G sitting over a one-point family at a point b.  For
// families with principal support (every ultrafilter family is one), each
// second-level family is isomorphic to a certified one, so the certificate
// covers every component up to isomorphism; for the other family functors the
// report records how many components were certified.
//
// The gluing classes at (pt, G) are generated by nodes (b, r, s) with r an
// arrow pt => eta(b) and s an arrow b => G, modulo one move per germ
// m : eta(b) -> eta(b2) with point component al : b -> b2:
//
//   (b, r, lact(al)(s'))  ~  (b2, ract(m)(r), s')
//
// and the multiplication table must descend to a bijection from the classes
// onto the arrows pt => G.

struct PseudoalgebraValidation {
  bool structure = true;
  bool unitor_invertible = true;
  bool multiplicator_invertible = true;
  int universe = 0;
  long long components = 0;  // multiplication components certified
  long long checked = 0;
  std::vector<std::string> errors;
  bool ok() const {
    return structure && unitor_invertible && multiplicator_invertible;
  }
};

inline PseudoalgebraValidation validate_pseudoalgebra(const ConvergenceSpace& A,
                                                      int max_errors = 12) {
  PseudoalgebraValidation rep;
  rep.universe = A.universe;
  auto fail = [&](bool& flag, std::string msg) {
    flag = false;
    if (static_cast<int>(rep.errors.size()) < max_errors)
      rep.errors.push_back(std::move(msg));
  };

  // ---- structure (the base category may have morphisms) ----
  if (!same_category(*A.arrows.dom, *A.fam.cat) ||
      !same_category(*A.arrows.cod, *A.base)) {
    fail(rep.structure,
         "arrow table is not indexed by the family category and the points");
    return rep;
  }
  {
    auto pv = validate_profunctor(A.arrows);
    if (!pv.ok) {
      fail(rep.structure, "arrow table is not functorial: " + pv.errors[0]);
      return rep;
    }
  }
  for (Idx f = 0; f < A.n_families(); ++f)
    if (A.family_size(f) > A.universe) {
      fail(rep.structure,
           "family " + family_str(A, f) + " exceeds the index universe");
      return rep;
    }
  if (static_cast<int>(A.id_arrow.size()) != A.n_points()) {
    fail(rep.structure, "unit arrow table has wrong size");
    return rep;
  }
  const int np = A.n_points();
  std::vector<Idx> eta(np);
  for (Idx pt = 0; pt < np; ++pt) {
    try {
      eta[pt] = A.eta_index(pt);
    } catch (const CheckError&) {
      fail(rep.structure, "unit family of point " + std::to_string(pt) +
                              " is missing from the family category");
      return rep;
    }
    if (A.id_arrow[pt] < 0 || A.id_arrow[pt] >= A.count(pt, eta[pt])) {
      fail(rep.structure,
           "unit arrow of point " + std::to_string(pt) + " is out of range");
      return rep;
    }
  }
  {
    long long expected = 0;
    bool domain_ok = true;
    for_each_composite_key(A, [&](const CompositeKey& k) {
      ++expected;
      auto it = A.comp.find(k);
      if (it == A.comp.end()) {
        if (domain_ok)
          fail(rep.structure,
               "composition table is missing an entry: " + key_str(A, k));
        domain_ok = false;
        return;
      }
      Idx flat = A.family_index(A.flattened_object(k.fam, k.fibers));
      if (it->second < 0 || it->second >= A.count(k.pt, flat)) {
        fail(rep.structure, "composite out of range at " + key_str(A, k));
        domain_ok = false;
      }
    });
    if (domain_ok && A.comp.size() != static_cast<size_t>(expected)) {
      fail(rep.structure,
           "composition table has " + std::to_string(A.comp.size()) +
               " entries, expected " + std::to_string(expected));
      domain_ok = false;
    }
    if (!domain_ok) return rep;
  }

  // ---- unit comparisons ----
  for (Idx pt = 0; pt < np; ++pt)
    for (Idx f = 0; f < A.n_families(); ++f)
      for (Idx r = 0; r < A.count(pt, f); ++r) {
        ++rep.checked;
        CompositeKey k{pt, eta[pt], A.id_arrow[pt], {{f, r}}};
        if (A.comp.at(k) != r)
          fail(rep.unitor_invertible,
               "unit comparison below is not the identity at " + key_str(A, k));
      }
  for (Idx pt = 0; pt < np; ++pt)
    for (Idx f = 0; f < A.n_families(); ++f) {
      const LObject& F = A.fam.objects[f];
      std::vector<std::pair<Idx, Idx>> fib(F.size());
      for (int x = 0; x < F.size(); ++x)
        fib[x] = {eta[F.labels[x]], A.id_arrow[F.labels[x]]};
      for (Idx r = 0; r < A.count(pt, f); ++r) {
        ++rep.checked;
        CompositeKey k{pt, f, r, fib};
        if (A.comp.at(k) != r)
          fail(rep.unitor_invertible,
               "unit comparison above is not the identity at " + key_str(A, k));
      }
    }

  // ---- multiplication components ----
  for (Idx pt = 0; pt < np; ++pt)
    for (Idx G = 0; G < A.n_families(); ++G) {
      // Composite arrows the component must reach: the one-point outer family
      // flattens onto the fiber family itself.
      Idx flat = A.family_index(
          A.flattened_object(eta[0], {{G, 0}}));
      int cg = A.count(pt, flat);
      std::vector<std::tuple<Idx, Idx, Idx>> nodes;
      std::map<std::tuple<Idx, Idx, Idx>, int> node_at;
      for (Idx b = 0; b < np; ++b)
        for (Idx r = 0; r < A.count(pt, eta[b]); ++r)
          for (Idx s = 0; s < A.count(b, G); ++s) {
            node_at[{b, r, s}] = static_cast<int>(nodes.size());
            nodes.emplace_back(b, r, s);
          }
      if (nodes.empty() && cg == 0) continue;
      ++rep.components;
      if (nodes.empty()) {
        fail(rep.multiplicator_invertible,
             "no unit decomposition reaches the composite arrows at point " +
                 std::to_string(pt) + " over " + family_str(A, G));
        continue;
      }
      std::vector<int> parent(nodes.size());
      for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
      std::function<int(int)> find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
      };
      auto unite = [&](int i, int j) {
        i = find(i);
        j = find(j);
        if (i != j) parent[i] = j;
      };
      for (Idx b = 0; b < np; ++b)
        for (Idx b2 = 0; b2 < np; ++b2)
          for (Idx m : A.fam.cat->hom(eta[b], eta[b2])) {
            Idx al = A.fam.mor_reps[m].alpha[0];
            for (Idx r = 0; r < A.count(pt, eta[b]); ++r) {
              Idx r2 = A.arrows.ract(m, pt, r);
              for (Idx s2 = 0; s2 < A.count(b2, G); ++s2) {
                ++rep.checked;
                unite(node_at.at({b, r, A.arrows.lact(al, G, s2)}),
                      node_at.at({b2, r2, s2}));
              }
            }
          }
      // The multiplication table must descend to a bijection from the
      // gluing classes onto the composite arrows.
      std::map<int, Idx> class_value;
      std::map<Idx, int> value_class;
      bool component_ok = true;
      long long n_classes = 0;
      for (size_t i = 0; i < nodes.size() && component_ok; ++i) {
        auto [b, r, s] = nodes[i];
        Idx v = A.comp.at(CompositeKey{pt, eta[b], r, {{G, s}}});
        int c = find(static_cast<int>(i));
        auto [it, fresh] = class_value.emplace(c, v);
        if (fresh) {
          ++n_classes;
          auto [jt, unseen] = value_class.emplace(v, c);
          if (!unseen) {
            fail(rep.multiplicator_invertible,
                 "two gluing classes at point " + std::to_string(pt) +
                     " over " + family_str(A, G) +
                     " share the composite arrow " + std::to_string(v));
            component_ok = false;
          }
        } else if (it->second != v) {
          fail(rep.multiplicator_invertible,
               "multiplication is not constant on a gluing class at point " +
                   std::to_string(pt) + " over " + family_str(A, G));
          component_ok = false;
        }
      }
      if (component_ok && n_classes != cg)
        fail(rep.multiplicator_invertible,
             "multiplication component at point " + std::to_string(pt) +
                 " over " + family_str(A, G) + " has " +
                 std::to_string(n_classes) + " gluing classes for " +
                 std::to_string(cg) + " composite arrows");
    }

  return rep;
}

// ---------------------------------------------------------------------------
// Representable structures
//
// A functor from the family category to the base that sends every family to
// the label at its principal point induces a space: arrows pt => F are the
// base morphisms pt -> phi(F), units are identities, and composition is
// composition in the base.  The collapse functor is the canonical such
// functor, sending a reindexing germ to its component at the principal point.

inline Functor collapse_functor(const QuotCategoryResult& fam,
                                const CatPtr& base) {
  Functor phi;
  phi.dom = fam.cat;
  phi.cod = base;
  phi.obj_map.resize(fam.cat->n_obj);
  for (Idx f = 0; f < fam.cat->n_obj; ++f) {
    const LObject& F = fam.objects[f];
    auto sup = germ_support(F.nu);
    if (sup.size() != 1)
      throw CheckError("the collapse functor needs families with principal support");
    phi.obj_map[f] = F.labels[sup[0]];
  }
  phi.mor_map.resize(fam.cat->n_mor());
  for (Idx m = 0; m < fam.cat->n_mor(); ++m)
    phi.mor_map[m] = fam.mor_reps[m].alpha[0];
  return phi;
}

inline LaxAlgebraWitness representable_from_pseudoalgebra(
    const FinSetMonad& T, const QuotCategoryResult& fam, const Functor& phi,
    int universe) {
  if (!same_category(*phi.dom, *fam.cat))
    throw CheckError("functor domain is not the family category");
  {
    auto v = validate_functor(phi);
    if (!v.ok)
      throw CheckError("structure functor is not functorial: " + v.summary());
  }
  LaxAlgebraWitness w;
  w.T = T;
  w.base = phi.cod;
  w.universe = universe;
  w.fam = fam;
  w.index_families();
  w.invertible = true;
  const FinCategory& C = *phi.cod;
  std::vector<Idx> principal(w.n_families());
  for (Idx f = 0; f < w.n_families(); ++f) {
    const LObject& F = fam.objects[f];
    auto sup = germ_support(F.nu);
    if (sup.size() != 1)
      throw CheckError("representable structures need families with principal support");
    principal[f] = sup[0];
    if (phi.obj_map[f] != F.labels[sup[0]])
      throw CheckError(
          "the functor must send a family to the label at its principal point");
  }
  w.arrows = representable_graph(phi);
  w.id_arrow.resize(w.n_points());
  for (Idx pt = 0; pt < w.n_points(); ++pt)
    w.id_arrow[pt] = hom_position(C, C.identity[pt]);
  for_each_composite_key(w, [&](const CompositeKey& k) {
    const LObject& F = fam.objects[k.fam];
    Idx x0 = principal[k.fam];
    Idx r = C.hom(k.pt, phi.obj_map[k.fam])[k.arrow];
    auto [gx, sx] = k.fibers[x0];
    Idx s = C.hom(F.labels[x0], phi.obj_map[gx])[sx];
    w.comp[k] = hom_position(C, C.compose(s, r));
  });
  return w;
}

// Searches for a structure functor whose representable space reproduces the
// given tables exactly.  The object assignment is forced: a family must land
// on the label at its principal point, since the one-point families must land
// on their points and every family receives a reindexing germ from its
// one-point collapse.  Morphism images are searched among the base morphisms
// matching the reindexing action, and each complete functorial assignment is
// verified by rebuilding the space.  A negative answer is relative to the
// reported index universe.

struct RepresentabilityReport {
  bool representable = false;
  int universe = 0;
  std::string reason;
  Functor functor;  // the structure functor, when representable
};

inline RepresentabilityReport is_representable(const ConvergenceSpace& A,
                                               long long max_assignments = 4096) {
  RepresentabilityReport out;
  out.universe = A.universe;
  const FinCategory& C = *A.base;
  const int np = A.n_points();
  Functor phi;
  phi.dom = A.fam.cat;
  phi.cod = A.base;
  phi.obj_map.resize(A.n_families());
  for (Idx f = 0; f < A.n_families(); ++f) {
    const LObject& F = A.fam.objects[f];
    auto sup = germ_support(F.nu);
    if (sup.size() != 1) {
      out.reason = "family " + family_str(A, f) + " has no principal point";
      return out;
    }
    Idx c = F.labels[sup[0]];
    phi.obj_map[f] = c;
    for (Idx pt = 0; pt < np; ++pt)
      if (static_cast<int>(C.hom(pt, c).size()) != A.count(pt, f)) {
        int limits = 0;
        for (Idx q = 0; q < np; ++q) limits += A.count(q, f) > 0 ? 1 : 0;
        if (C.n_mor() == C.n_obj && limits >= 2)
          out.reason = "family " + family_str(A, f) + " converges to " +
                       std::to_string(limits) +
                       " distinct points, so no single limit can represent it";
        else
          out.reason = "family " + family_str(A, f) + " has " +
                       std::to_string(A.count(pt, f)) + " arrows from point " +
                       std::to_string(pt) + " but its principal label admits " +
                       std::to_string(C.hom(pt, c).size());
        return out;
      }
  }
  for (Idx pt = 0; pt < np; ++pt)
    if (A.id_arrow[pt] != hom_position(C, C.identity[pt])) {
      out.reason = "the unit arrow at point " + std::to_string(pt) +
                   " is not the identity on it";
      return out;
    }
  for (Idx t = 0; t < C.n_mor(); ++t) {
    Idx a = C.src[t], b = C.tgt[t];
    for (Idx f = 0; f < A.n_families(); ++f) {
      auto homs = C.hom(b, phi.obj_map[f]);
      for (Idx i = 0; i < A.count(b, f); ++i)
        if (A.arrows.lact(t, f, i) !=
            hom_position(C, C.compose(homs[i], t))) {
          out.reason =
              "restriction along a point morphism is not composition with it";
          return out;
        }
    }
  }
  // Morphism candidates matching the reindexing action of each germ.
  const FinCategory& Fc = *A.fam.cat;
  std::vector<std::vector<Idx>> cands(Fc.n_mor());
  for (Idx m = 0; m < Fc.n_mor(); ++m) {
    Idx fs = Fc.src[m], ft = Fc.tgt[m];
    for (Idx u : C.hom(phi.obj_map[fs], phi.obj_map[ft])) {
      bool match = true;
      for (Idx pt = 0; pt < np && match; ++pt) {
        auto homs = C.hom(pt, phi.obj_map[fs]);
        for (Idx r = 0; r < A.count(pt, fs) && match; ++r)
          if (A.arrows.ract(m, pt, r) !=
              hom_position(C, C.compose(u, homs[r])))
            match = false;
      }
      if (match) cands[m].push_back(u);
    }
    if (cands[m].empty()) {
      out.reason = "no morphism image matches the reindexing action of a germ " +
                   std::to_string(Fc.src[m]) + " -> " + std::to_string(Fc.tgt[m]);
      return out;
    }
  }
  // Walk the candidate assignments, verifying each complete functor by
  // rebuilding the space.
  long long tried = 0;
  std::vector<size_t> pick(Fc.n_mor(), 0);
  while (true) {
    if (++tried > max_assignments) {
      out.reason = "search truncated after " + std::to_string(max_assignments) +
                   " candidate assignments at universe " +
                   std::to_string(A.universe);
      return out;
    }
    phi.mor_map.resize(Fc.n_mor());
    for (Idx m = 0; m < Fc.n_mor(); ++m) phi.mor_map[m] = cands[m][pick[m]];
    if (validate_functor(phi).ok) {
      LaxAlgebraWitness w =
          representable_from_pseudoalgebra(A.T, A.fam, phi, A.universe);
      if (w.comp == A.comp) {
        out.representable = true;
        out.functor = phi;
        return out;
      }
    }
    // next assignment
    size_t i = 0;
    for (; i < pick.size(); ++i) {
      if (++pick[i] < cands[i].size()) break;
      pick[i] = 0;
    }
    if (i == pick.size()) break;
  }
  out.reason =
      "every candidate functor fails functoriality or the composition table";
  return out;
}

}  // namespace bicat
