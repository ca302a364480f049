#pragma once

// Extending a profunctor F between base categories to a profunctor between
// the indexed-family categories over them. A value at a pair of family
// objects is a set of equivalence classes of witnesses: a family over the
// two-sided category of elements of F, with a morphism in from the first
// object and a morphism out to the second, identified under zig-zags of
// element-family morphisms making both triangles commute. Witness index sets
// are capped by an explicit bound; a stabilization check compares class sets
// across bounds. The degenerate case of relations between discrete sets
// yields the classical relational liftings on monad carriers.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "bicat/fincat.hpp"
#include "bicat/loke.hpp"
#include "bicat/monads.hpp"
#include "bicat/profunctor.hpp"
#include "bicat/util.hpp"

namespace bicat {

// Whether family morphisms are taken in full (total reindexings with
// components everywhere) or as support germs (the quotient flavor).
enum class ExtensionFlavor { total, quotient };

// One witness node: a family (Z, l, chi) over the category of elements,
// a morphism in from the queried source-side object, and a morphism out to
// the queried target-side object. In the quotient flavor the two legs are
// germs aligned with the support of their target's element.
struct ExtensionElement {
  LObject witness;   // labels: element-category objects; nu: chi over Z
  LMorphism m_in;    // a -> (Z, pi_cod . l, chi) over the cod base
  LMorphism m_out;   // (Z, pi_dom . l, chi) -> b over the dom base

  friend bool operator==(const ExtensionElement& x, const ExtensionElement& y) {
    return x.witness == y.witness && x.m_in == y.m_in && x.m_out == y.m_out;
  }
  friend bool operator<(const ExtensionElement& x, const ExtensionElement& y) {
    if (!(x.witness == y.witness)) return x.witness < y.witness;
    if (!(x.m_in == y.m_in)) return x.m_in < y.m_in;
    return x.m_out < y.m_out;
  }
};

struct ExtensionClasses {
  std::vector<ExtensionElement> nodes;  // all witness nodes, sorted
  std::vector<Idx> class_of;            // node index -> class id
  std::vector<Idx> reps;                // class id -> node index of least member

  int n_classes() const { return static_cast<int>(reps.size()); }

  Idx find_node(const ExtensionElement& e) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), e);
    if (it == nodes.end() || !(*it == e)) return kNone;
    return static_cast<Idx>(it - nodes.begin());
  }
  Idx find_class(const ExtensionElement& e) const {
    Idx n = find_node(e);
    if (n == kNone)
      throw CheckError("witness node is not part of the enumerated bound");
    return class_of[n];
  }
};

// Shared data for many queries against one profunctor: the category of
// elements and a memo of its family hom-sets.
struct ExtensionContext {
  FinSetMonad T;
  Profunctor F;
  ElementsResult el;
  ExtensionFlavor flavor = ExtensionFlavor::quotient;
  int bound = kNone;  // kNone: per query |X| + |Y|
  long long max_nodes = 200000;
  std::map<std::pair<LObject, LObject>, std::vector<LMorphism>> rhom_memo;
};

inline ExtensionContext make_extension_context(
    const FinSetMonad& T, const Profunctor& F, int bound = kNone,
    ExtensionFlavor flavor = ExtensionFlavor::quotient,
    long long max_nodes = 200000) {
  ExtensionContext ctx;
  ctx.T = T;
  ctx.F = F;
  ctx.el = category_of_elements(F);
  ctx.flavor = flavor;
  ctx.bound = bound;
  ctx.max_nodes = max_nodes;
  return ctx;
}

namespace detail {

// Family morphisms over the element category, memoized.
inline const std::vector<LMorphism>& el_homs(ExtensionContext& ctx,
                                             const LObject& w,
                                             const LObject& w2) {
  auto key = std::make_pair(w, w2);
  auto it = ctx.rhom_memo.find(key);
  if (it != ctx.rhom_memo.end()) return it->second;
  std::vector<LMorphism> hs;
  if (ctx.flavor == ExtensionFlavor::quotient) {
    for (auto& q : quotient_hom_set(ctx.T, *ctx.el.cat, w, w2))
      hs.push_back(q.rep);
  } else {
    hs = hom_set(ctx.T, *ctx.el.cat, w, w2);
  }
  return ctx.rhom_memo.emplace(std::move(key), std::move(hs)).first->second;
}

inline LMorphism leg_compose(const ExtensionContext& ctx, const FinCategory& C,
                             const TElem& mid_nu, const LMorphism& m2,
                             const LMorphism& m1) {
  if (ctx.flavor == ExtensionFlavor::quotient)
    return compose_germs(C, mid_nu, m2, m1);
  (void)mid_nu;
  return compose_lmorphisms(C, m2, m1);
}

}  // namespace detail

// All classes of the extended profunctor's value at (a, b): a lives over the
// cod base of F, b over the dom base. Witness index sets range up to the
// context's bound (default |X_a| + |X_b|, never below max of the two).
inline ExtensionClasses extend_at(ExtensionContext& ctx, const LObject& a,
                                  const LObject& b) {
  const FinCategory& D = *ctx.F.cod;
  const FinCategory& C = *ctx.F.dom;
  int n_el = static_cast<int>(ctx.el.obj_data.size());
  int bound = ctx.bound == kNone ? a.size() + b.size() : ctx.bound;
  if (bound < std::max(a.size(), b.size()))
    throw CheckError("witness bound is below the larger index-set size");

  // Witness objects (keyed by their family over the element category) with
  // their leg sets.
  std::map<LObject, std::pair<std::vector<LMorphism>, std::vector<LMorphism>>>
      table;  // witness -> (m_in list, m_out list)

  auto d_face = [&](const LObject& w) {
    LObject f;
    for (Idx r : w.labels) f.labels.push_back(ctx.el.proj_cod.obj_map[r]);
    f.nu = w.nu;
    return f;
  };
  auto c_face = [&](const LObject& w) {
    LObject f;
    for (Idx r : w.labels) f.labels.push_back(ctx.el.proj_dom.obj_map[r]);
    f.nu = w.nu;
    return f;
  };

  long long node_count = 0;
  for (int z = 0; z <= bound; ++z) {
    for (const auto& l : all_functions(z, n_el)) {
      LObject shape;
      shape.labels.assign(l.begin(), l.end());
      // Candidate chi values over Z: in the quotient flavor, exactly the
      // pushforwards realized by out-leg germs; in the total flavor, the
      // whole carrier.
      std::vector<TElem> chis;
      if (ctx.flavor == ExtensionFlavor::quotient) {
        std::vector<Idx> supp_b = germ_support(b.nu);
        for (const auto& g : all_functions(static_cast<int>(supp_b.size()), z)) {
          TElem chi = germ_pushforward(b.nu, g);
          if (std::find(chis.begin(), chis.end(), chi) == chis.end())
            chis.push_back(chi);
        }
      } else {
        chis = ctx.T.carrier(z);
      }
      for (const auto& chi : chis) {
        LObject w = shape;
        w.nu = chi;
        std::vector<LMorphism> outs;
        LObject cf = c_face(w);
        if (ctx.flavor == ExtensionFlavor::quotient) {
          for (auto& q : quotient_hom_set(ctx.T, C, cf, b)) outs.push_back(q.rep);
        } else {
          outs = hom_set(ctx.T, C, cf, b);
        }
        if (outs.empty()) continue;
        std::vector<LMorphism> ins;
        LObject df = d_face(w);
        if (ctx.flavor == ExtensionFlavor::quotient) {
          for (auto& q : quotient_hom_set(ctx.T, D, a, df)) ins.push_back(q.rep);
        } else {
          ins = hom_set(ctx.T, D, a, df);
        }
        if (ins.empty()) continue;
        node_count += static_cast<long long>(ins.size()) * outs.size();
        if (node_count > ctx.max_nodes)
          throw CheckError("witness enumeration exceeds the node budget");
        table[w] = {std::move(ins), std::move(outs)};
      }
    }
  }

  ExtensionClasses out;
  std::vector<LObject> wits;
  std::vector<std::pair<Idx, Idx>> node_span;  // per witness: [first, last)
  for (auto& [w, legs] : table) {
    Idx first = static_cast<Idx>(out.nodes.size());
    for (const auto& mi : legs.first)
      for (const auto& mo : legs.second)
        out.nodes.push_back({w, mi, mo});
    wits.push_back(w);
    node_span.push_back({first, static_cast<Idx>(out.nodes.size())});
  }
  std::sort(out.nodes.begin(), out.nodes.end());
  // Recompute spans after sorting: witnesses are the leading key, so nodes of
  // one witness stay contiguous.
  {
    node_span.assign(wits.size(), {0, 0});
    size_t w_ix = 0;
    for (size_t i = 0; i < out.nodes.size(); ++i) {
      while (!(out.nodes[i].witness == wits[w_ix])) ++w_ix;
      if (node_span[w_ix].second == 0)
        node_span[w_ix] = {static_cast<Idx>(i), static_cast<Idx>(i)};
      node_span[w_ix].second = static_cast<Idx>(i + 1);
    }
  }

  DisjointSet ds(static_cast<int>(out.nodes.size()));
  for (size_t wi = 0; wi < wits.size(); ++wi)
    for (size_t wj = 0; wj < wits.size(); ++wj) {
      const auto& ns = detail::el_homs(ctx, wits[wi], wits[wj]);
      for (const auto& n : ns) {
        LMorphism pd = apply_L_mor(ctx.el.proj_cod, n);
        LMorphism pc = apply_L_mor(ctx.el.proj_dom, n);
        for (Idx u = node_span[wi].first; u < node_span[wi].second; ++u) {
          LMorphism in2 = detail::leg_compose(ctx, D, wits[wi].nu, pd,
                                              out.nodes[u].m_in);
          for (Idx v = node_span[wj].first; v < node_span[wj].second; ++v) {
            if (!(out.nodes[v].m_in == in2)) continue;
            LMorphism back = detail::leg_compose(ctx, C, wits[wj].nu,
                                                 out.nodes[v].m_out, pc);
            if (back == out.nodes[u].m_out) ds.unite(static_cast<int>(u),
                                                     static_cast<int>(v));
          }
        }
      }
    }

  std::map<int, Idx> root_to_class;
  out.class_of.resize(out.nodes.size());
  for (size_t i = 0; i < out.nodes.size(); ++i) {
    int r = ds.find(static_cast<int>(i));
    auto it = root_to_class.find(r);
    if (it == root_to_class.end()) {
      it = root_to_class.insert({r, static_cast<Idx>(out.reps.size())}).first;
      out.reps.push_back(static_cast<Idx>(i));
    }
    out.class_of[i] = it->second;
  }
  return out;
}

inline ExtensionClasses extend_profunctor(
    const FinSetMonad& T, const Profunctor& F, const LObject& a,
    const LObject& b, int bound = kNone,
    ExtensionFlavor flavor = ExtensionFlavor::quotient) {
  ExtensionContext ctx = make_extension_context(T, F, bound, flavor);
  return extend_at(ctx, a, b);
}

// True when the class sets at the two bounds correspond bijectively under
// the inclusion of bounded witness sets.
inline bool stabilization_check(const FinSetMonad& T, const Profunctor& F,
                                const LObject& a, const LObject& b, int bound,
                                int bound2,
                                ExtensionFlavor flavor = ExtensionFlavor::quotient) {
  if (bound >= bound2) throw CheckError("bounds must increase");
  ExtensionClasses c1 = extend_profunctor(T, F, a, b, bound, flavor);
  ExtensionClasses c2 = extend_profunctor(T, F, a, b, bound2, flavor);
  if (c1.n_classes() != c2.n_classes()) return false;
  std::vector<bool> hit(c2.n_classes(), false);
  for (Idx rep : c1.reps) {
    Idx cl = c2.find_class(c1.nodes[rep]);  // inclusion: same node at larger bound
    if (hit[cl]) return false;
    hit[cl] = true;
  }
  return std::all_of(hit.begin(), hit.end(), [](bool h) { return h; });
}

// Action of a transformation between parallel profunctors on class sets:
// relabel witnesses along the induced map of element categories. Returns the
// per-class image under ext(F) -> ext(F2).
inline std::vector<Idx> extend_nattrans(ExtensionContext& ctxF,
                                        ExtensionContext& ctxF2,
                                        const ProfNatTrans& sigma,
                                        const LObject& a, const LObject& b) {
  int n_el = static_cast<int>(ctxF.el.obj_data.size());
  std::vector<Idx> el_map(n_el);
  for (Idx k = 0; k < n_el; ++k) {
    auto [bb, aa, i] = ctxF.el.obj_data[k];
    Idx k2 = ctxF2.el.obj_index(bb, aa, sigma.at(bb, aa, i));
    if (k2 == kNone)
      throw CheckError("transformation image leaves the element category");
    el_map[k] = k2;
  }
  ExtensionClasses from = extend_at(ctxF, a, b);
  ExtensionClasses to = extend_at(ctxF2, a, b);
  std::vector<Idx> out;
  for (Idx rep : from.reps) {
    ExtensionElement e = from.nodes[rep];
    for (auto& l : e.witness.labels) l = el_map[l];
    out.push_back(to.find_class(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Materialized extension over explicit quotient universes

// Index of a germ among the materialized quotient category's morphisms
// between objects i -> j.
inline Idx quot_mor_index(const QuotCategoryResult& Q, Idx i, Idx j,
                          const LMorphism& germ) {
  for (Idx m : Q.cat->hom(i, j))
    if (Q.mor_reps[m] == germ) return m;
  throw CheckError("germ not present in the materialized quotient category");
}

// The quotient-level functor induced by a base functor, on a pair of
// materialized universes (objects must close under relabeling, which holds
// for the size-capped enumerations).
inline Functor quotient_functor(const FinSetMonad& T, const Functor& f,
                                const QuotCategoryResult& QC,
                                const QuotCategoryResult& QD) {
  (void)T;
  Functor out;
  out.dom = QC.cat;
  out.cod = QD.cat;
  for (const auto& obj : QC.objects)
    out.obj_map.push_back(QD.object_index(apply_L_obj(f, obj)));
  for (Idx m = 0; m < QC.cat->n_mor(); ++m) {
    Idx i = QC.cat->src[m], j = QC.cat->tgt[m];
    out.mor_map.push_back(quot_mor_index(QD, out.obj_map[i], out.obj_map[j],
                                         apply_L_mor(f, QC.mor_reps[m])));
  }
  return out;
}

// Materializes the extended profunctor on the given quotient universes
// (cod side QD over F.cod, dom side QC over F.dom), with actions by
// precomposition and postcomposition of the legs. Quotient flavor only.
inline Profunctor materialize_extension(ExtensionContext& ctx,
                                        const QuotCategoryResult& QD,
                                        const QuotCategoryResult& QC) {
  if (ctx.flavor != ExtensionFlavor::quotient)
    throw CheckError("materialization requires the quotient flavor");
  const FinCategory& D = *ctx.F.cod;
  const FinCategory& C = *ctx.F.dom;
  int nD = static_cast<int>(QD.objects.size());
  int nC = static_cast<int>(QC.objects.size());

  // The actions move classes between object pairs, so every entry must be
  // computed at one shared witness bound: per-pair defaults would let a
  // class land at a pair whose enumeration stopped short of its witness.
  int saved_bound = ctx.bound;
  if (ctx.bound == kNone) {
    int mx_d = 0, mx_c = 0;
    for (const auto& o : QD.objects) mx_d = std::max(mx_d, o.size());
    for (const auto& o : QC.objects) mx_c = std::max(mx_c, o.size());
    ctx.bound = mx_d + mx_c;
  }

  std::vector<std::vector<ExtensionClasses>> val(nD);
  for (Idx d = 0; d < nD; ++d) {
    val[d].reserve(nC);
    for (Idx c = 0; c < nC; ++c)
      val[d].push_back(extend_at(ctx, QD.objects[d], QC.objects[c]));
  }

  Profunctor P;
  P.dom = QC.cat;
  P.cod = QD.cat;
  P.counts.assign(static_cast<size_t>(nD) * nC, 0);
  for (Idx d = 0; d < nD; ++d)
    for (Idx c = 0; c < nC; ++c)
      P.counts[static_cast<size_t>(d) * nC + c] = val[d][c].n_classes();

  P.lact_tab.resize(QD.cat->n_mor());
  for (Idx t = 0; t < QD.cat->n_mor(); ++t) {
    Idx d1 = QD.cat->src[t], d2 = QD.cat->tgt[t];
    P.lact_tab[t].resize(nC);
    for (Idx c = 0; c < nC; ++c) {
      auto& col = P.lact_tab[t][c];
      col.resize(val[d2][c].n_classes());
      for (Idx cl = 0; cl < static_cast<Idx>(col.size()); ++cl) {
        ExtensionElement e = val[d2][c].nodes[val[d2][c].reps[cl]];
        e.m_in = compose_germs(D, QD.objects[d2].nu, e.m_in, QD.mor_reps[t]);
        col[cl] = val[d1][c].find_class(e);
      }
    }
  }
  P.ract_tab.resize(QC.cat->n_mor());
  for (Idx s = 0; s < QC.cat->n_mor(); ++s) {
    Idx c1 = QC.cat->src[s], c2 = QC.cat->tgt[s];
    P.ract_tab[s].resize(nD);
    for (Idx d = 0; d < nD; ++d) {
      auto& row = P.ract_tab[s][d];
      row.resize(val[d][c1].n_classes());
      for (Idx cl = 0; cl < static_cast<Idx>(row.size()); ++cl) {
        ExtensionElement e = val[d][c1].nodes[val[d][c1].reps[cl]];
        e.m_out = compose_germs(C, QC.objects[c1].nu, QC.mor_reps[s], e.m_out);
        row[cl] = val[d][c2].find_class(e);
      }
    }
  }
  ctx.bound = saved_bound;
  return P;
}

// ---------------------------------------------------------------------------
// Functoriality checks (materialized on capped universes)

inline bool extension_preserves_hom(const FinSetMonad& T, const CatPtr& C,
                                    int max_index = 1, int bound = kNone) {
  auto Q = build_quotient_category(T, C, max_index);
  auto ctx = make_extension_context(T, identity_profunctor(C), bound);
  Profunctor P = materialize_extension(ctx, Q, Q);
  if (!validate_profunctor(P).ok) return false;
  return profunctors_isomorphic(P, identity_profunctor(Q.cat));
}

inline bool extension_preserves_graph(const FinSetMonad& T, const Functor& f,
                                      int max_index = 1, int bound = kNone) {
  auto QC = build_quotient_category(T, f.dom, max_index);
  auto QD = build_quotient_category(T, f.cod, max_index);
  auto ctx = make_extension_context(T, representable_graph(f), bound);
  Profunctor P = materialize_extension(ctx, QD, QC);
  if (!validate_profunctor(P).ok) return false;
  Functor qf = quotient_functor(T, f, QC, QD);
  return profunctors_isomorphic(P, representable_graph(qf));
}

inline bool extension_preserves_composition(const FinSetMonad& T,
                                            const Profunctor& psi,
                                            const Profunctor& phi,
                                            int max_index = 1,
                                            int bound = kNone) {
  auto QC = build_quotient_category(T, phi.dom, max_index);
  auto QD = build_quotient_category(T, phi.cod, max_index);
  auto QE = build_quotient_category(T, psi.cod, max_index);
  auto ctx_phi = make_extension_context(T, phi, bound);
  auto ctx_psi = make_extension_context(T, psi, bound);
  Profunctor comp = compose_profunctors(psi, phi).pro;
  auto ctx_comp = make_extension_context(T, comp, bound);
  Profunctor Pphi = materialize_extension(ctx_phi, QD, QC);
  Profunctor Ppsi = materialize_extension(ctx_psi, QE, QD);
  Profunctor Pcomp = materialize_extension(ctx_comp, QE, QC);
  if (!validate_profunctor(Pphi).ok || !validate_profunctor(Ppsi).ok ||
      !validate_profunctor(Pcomp).ok)
    return false;
  return profunctors_isomorphic(Pcomp, compose_profunctors(Ppsi, Pphi).pro);
}

// ---------------------------------------------------------------------------
// Relational lifting on monad carriers

inline LObject lobject_of_element(const TElem& t, int n) {
  LObject a;
  a.labels.resize(n);
  std::iota(a.labels.begin(), a.labels.end(), 0);
  a.nu = t;
  return a;
}

// Support-minimal family for a monad element: the index set is the element's
// support, labeled by the supported points, carrying the restricted element.
// Isomorphic to the identity-labeled family in the quotient, with the
// smallest possible index set (so default witness bounds stay small).
inline LObject lobject_of_support(const TElem& t) {
  LObject a;
  switch (t.monad) {
    case MonadName::powerset:
      a.labels = t.set;
      a.nu = pw_elem([&] {
        std::vector<Idx> all(t.set.size());
        std::iota(all.begin(), all.end(), 0);
        return all;
      }());
      break;
    case MonadName::filter:
      a.labels = t.set;
      a.nu = filter_elem([&] {
        std::vector<Idx> all(t.set.size());
        std::iota(all.begin(), all.end(), 0);
        return all;
      }());
      break;
    case MonadName::ultrafilter:
      a.labels = {t.point};
      a.nu = ultra_elem(0);
      break;
    case MonadName::distribution: {
      std::vector<std::pair<Idx, Rational>> d;
      for (size_t i = 0; i < t.dist.size(); ++i) {
        a.labels.push_back(t.dist[i].first);
        d.push_back({static_cast<Idx>(i), t.dist[i].second});
      }
      a.nu = dist_elem(d);
      break;
    }
  }
  return a;
}

// The lifted relation between T-carriers induced by a relation between
// discrete sets.  A relation is the span of its two projections, and the lift
// acts on both legs at once: (t_a, t_b) are related exactly when some element
// of T over the set of related pairs pushes forward to t_a along the first
// projection and to t_b along the second.  For the powerset monad this is the
// two-sided (Egli-Milner) covering relation; for distributions it relates
// exactly the marginals of couplings supported on the relation; for
// ultrafilters it transports the relation along the principal bijection.
inline std::vector<std::pair<TElem, TElem>> barr_relational_lift(
    const FinSetMonad& T, int na, int nb,
    const std::vector<std::pair<Idx, Idx>>& pairs) {
  int nr = static_cast<int>(pairs.size());
  std::vector<Idx> proj_a(nr), proj_b(nr);
  for (int i = 0; i < nr; ++i) {
    proj_a[i] = pairs[i].first;
    proj_b[i] = pairs[i].second;
  }
  std::set<std::pair<TElem, TElem>> seen;
  for (const auto& chi : T.carrier(nr))
    seen.insert({T.map(proj_a, na, chi), T.map(proj_b, nb, chi)});
  return {seen.begin(), seen.end()};
}

}  // namespace bicat
