#pragma once

// Finite categories presented by explicit tables: dense integer indices for
// objects and morphisms, a total source/target/identity assignment and a
// composition table. All validators are brute force and exhaustive.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "bicat/util.hpp"

namespace bicat {

struct FinCategory {
  int n_obj = 0;
  std::vector<Idx> src;       // per morphism
  std::vector<Idx> tgt;       // per morphism
  std::vector<Idx> identity;  // per object
  // comp[g * n_mor + f] = g . f (apply f first); kNone when not composable.
  std::vector<Idx> comp_table;
  std::vector<std::string> obj_names;  // optional; empty = use indices
  std::vector<std::string> mor_names;

  int n_mor() const { return static_cast<int>(src.size()); }

  bool composable(Idx g, Idx f) const { return src[g] == tgt[f]; }

  Idx compose(Idx g, Idx f) const {
    Idx gf = comp_table[static_cast<size_t>(g) * src.size() + f];
    if (gf == kNone) throw CheckError("composing non-composable morphisms");
    return gf;
  }

  std::vector<Idx> hom(Idx a, Idx b) const {
    std::vector<Idx> out;
    for (Idx m = 0; m < n_mor(); ++m)
      if (src[m] == a && tgt[m] == b) out.push_back(m);
    return out;
  }

  bool is_iso(Idx m) const {
    for (Idx w : hom(tgt[m], src[m]))
      if (compose(w, m) == identity[src[m]] && compose(m, w) == identity[tgt[m]])
        return true;
    return false;
  }

  std::string obj_name(Idx a) const {
    if (a >= 0 && a < static_cast<int>(obj_names.size()) && !obj_names[a].empty())
      return obj_names[a];
    return "o" + std::to_string(a);
  }
  std::string mor_name(Idx m) const {
    if (m >= 0 && m < static_cast<int>(mor_names.size()) && !mor_names[m].empty())
      return mor_names[m];
    return "m" + std::to_string(m);
  }
};

using CatPtr = std::shared_ptr<const FinCategory>;

// On-the-nose equality of presentations (same object and morphism indices).
// Distinct from isomorphism: index-level agreement is what makes action
// tables of two profunctors directly compatible.
inline bool same_category(const FinCategory& a, const FinCategory& b) {
  return a.n_obj == b.n_obj && a.src == b.src && a.tgt == b.tgt &&
         a.identity == b.identity && a.comp_table == b.comp_table;
}

inline CatPtr make_cat(FinCategory c) {
  return std::make_shared<const FinCategory>(std::move(c));
}

// ---------------------------------------------------------------------------
// Validation.

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> errors;

  void fail(const std::string& msg) {
    ok = false;
    if (errors.size() < 32) errors.push_back(msg);
  }
  std::string summary() const {
    if (ok) return "ok";
    std::ostringstream os;
    for (const auto& e : errors) os << e << "\n";
    return os.str();
  }
};

inline ValidationReport validate_category(const FinCategory& c) {
  ValidationReport r;
  const int nm = c.n_mor();
  if (static_cast<int>(c.tgt.size()) != nm) r.fail("src/tgt size mismatch");
  if (static_cast<int>(c.identity.size()) != c.n_obj) r.fail("identity table size mismatch");
  if (static_cast<int>(c.comp_table.size()) != static_cast<size_t>(nm) * nm &&
      !(nm == 0 && c.comp_table.empty()))
    r.fail("composition table size mismatch");
  if (!r.ok) return r;

  for (Idx m = 0; m < nm; ++m) {
    if (c.src[m] < 0 || c.src[m] >= c.n_obj || c.tgt[m] < 0 || c.tgt[m] >= c.n_obj)
      r.fail("morphism " + c.mor_name(m) + " has out-of-range endpoints");
  }
  for (Idx a = 0; a < c.n_obj; ++a) {
    Idx i = c.identity[a];
    if (i < 0 || i >= nm || c.src[i] != a || c.tgt[i] != a)
      r.fail("identity of " + c.obj_name(a) + " is not an endomorphism of it");
  }
  if (!r.ok) return r;

  for (Idx g = 0; g < nm; ++g)
    for (Idx f = 0; f < nm; ++f) {
      Idx gf = c.comp_table[static_cast<size_t>(g) * nm + f];
      if (c.composable(g, f)) {
        if (gf == kNone) {
          r.fail("missing composite " + c.mor_name(g) + " . " + c.mor_name(f));
        } else if (gf < 0 || gf >= nm || c.src[gf] != c.src[f] || c.tgt[gf] != c.tgt[g]) {
          r.fail("composite " + c.mor_name(g) + " . " + c.mor_name(f) +
                 " has wrong endpoints");
        }
      } else if (gf != kNone) {
        r.fail("composite defined for non-composable pair " + c.mor_name(g) + " . " +
               c.mor_name(f));
      }
    }
  if (!r.ok) return r;

  for (Idx f = 0; f < nm; ++f) {
    if (c.compose(c.identity[c.tgt[f]], f) != f)
      r.fail("left unit law fails at " + c.mor_name(f));
    if (c.compose(f, c.identity[c.src[f]]) != f)
      r.fail("right unit law fails at " + c.mor_name(f));
  }
  for (Idx h = 0; h < nm; ++h)
    for (Idx g = 0; g < nm; ++g) {
      if (!c.composable(h, g)) continue;
      for (Idx f = 0; f < nm; ++f) {
        if (!c.composable(g, f)) continue;
        if (c.compose(c.compose(h, g), f) != c.compose(h, c.compose(g, f)))
          r.fail("associativity fails at " + c.mor_name(h) + " . " + c.mor_name(g) +
                 " . " + c.mor_name(f));
      }
    }
  return r;
}

// ---------------------------------------------------------------------------
// Builders.

class CategoryBuilder {
 public:
  Idx add_object(std::string name = "") {
    obj_names_.push_back(std::move(name));
    return static_cast<Idx>(obj_names_.size()) - 1;
  }

  Idx add_morphism(Idx s, Idx t, std::string name = "") {
    src_.push_back(s);
    tgt_.push_back(t);
    mor_names_.push_back(std::move(name));
    return static_cast<Idx>(src_.size()) - 1;
  }

  void set_identity(Idx obj, Idx mor) { identities_[obj] = mor; }
  void set_composite(Idx g, Idx f, Idx gf) { composites_[{g, f}] = gf; }

  FinCategory build() const {
    FinCategory c;
    c.n_obj = static_cast<int>(obj_names_.size());
    c.src = src_;
    c.tgt = tgt_;
    c.obj_names = obj_names_;
    c.mor_names = mor_names_;
    c.identity.assign(c.n_obj, kNone);
    for (const auto& [o, m] : identities_) c.identity[o] = m;
    const int nm = c.n_mor();
    c.comp_table.assign(static_cast<size_t>(nm) * nm, kNone);
    for (const auto& [gf, r] : composites_)
      c.comp_table[static_cast<size_t>(gf.first) * nm + gf.second] = r;
    // Fill unit composites automatically when omitted.
    for (Idx f = 0; f < nm; ++f) {
      for (Idx a = 0; a < c.n_obj; ++a) {
        Idx i = c.identity[a];
        if (i == kNone) continue;
        if (c.src[f] == a && c.comp_table[static_cast<size_t>(f) * nm + i] == kNone)
          c.comp_table[static_cast<size_t>(f) * nm + i] = f;
        if (c.tgt[f] == a && c.comp_table[static_cast<size_t>(i) * nm + f] == kNone)
          c.comp_table[static_cast<size_t>(i) * nm + f] = f;
      }
    }
    return c;
  }

 private:
  std::vector<std::string> obj_names_;
  std::vector<Idx> src_, tgt_;
  std::vector<std::string> mor_names_;
  std::map<Idx, Idx> identities_;
  std::map<std::pair<Idx, Idx>, Idx> composites_;
};

inline FinCategory discrete_category(int n) {
  CategoryBuilder b;
  for (int i = 0; i < n; ++i) {
    Idx o = b.add_object();
    b.set_identity(o, b.add_morphism(o, o));
  }
  return b.build();
}

inline FinCategory terminal_category() { return discrete_category(1); }

// Thin category from a preorder given by its reachability matrix:
// leq[a][b] == true means there is exactly one arrow a -> b.
inline FinCategory thin_from_preorder(const std::vector<std::vector<bool>>& leq) {
  const int n = static_cast<int>(leq.size());
  CategoryBuilder b;
  for (int i = 0; i < n; ++i) b.add_object();
  std::map<std::pair<int, int>, Idx> arrow;
  for (int a = 0; a < n; ++a) {
    if (!leq[a][a]) throw ParseError("preorder lacks reflexivity");
    for (int c = 0; c < n; ++c)
      if (leq[a][c]) arrow[{a, c}] = b.add_morphism(a, c);
  }
  for (int a = 0; a < n; ++a) b.set_identity(a, arrow[{a, a}]);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      if (!leq[a][c]) continue;
      for (int e = 0; e < n; ++e) {
        if (!leq[c][e]) continue;
        if (!leq[a][e]) throw ParseError("preorder lacks transitivity");
        b.set_composite(arrow[{c, e}], arrow[{a, c}], arrow[{a, e}]);
      }
    }
  return b.build();
}

// The walking arrow: objects 0 -> 1.
inline FinCategory walking_arrow() {
  return thin_from_preorder({{true, true}, {false, true}});
}

inline FinCategory opposite_category(const FinCategory& c) {
  FinCategory o = c;
  std::swap(o.src, o.tgt);
  const int nm = c.n_mor();
  for (Idx g = 0; g < nm; ++g)
    for (Idx f = 0; f < nm; ++f)
      o.comp_table[static_cast<size_t>(g) * nm + f] =
          c.comp_table[static_cast<size_t>(f) * nm + g];
  return o;
}

// ---------------------------------------------------------------------------
// Functors, natural transformations, squares.

struct Functor {
  CatPtr dom, cod;
  std::vector<Idx> obj_map;
  std::vector<Idx> mor_map;

  Idx on_obj(Idx a) const { return obj_map[a]; }
  Idx on_mor(Idx m) const { return mor_map[m]; }
};

inline ValidationReport validate_functor(const Functor& f) {
  ValidationReport r;
  const FinCategory& d = *f.dom;
  const FinCategory& c = *f.cod;
  if (static_cast<int>(f.obj_map.size()) != d.n_obj ||
      static_cast<int>(f.mor_map.size()) != d.n_mor()) {
    r.fail("functor table sizes do not match the domain");
    return r;
  }
  for (Idx m = 0; m < d.n_mor(); ++m) {
    Idx fm = f.mor_map[m];
    if (fm < 0 || fm >= c.n_mor() || c.src[fm] != f.obj_map[d.src[m]] ||
        c.tgt[fm] != f.obj_map[d.tgt[m]])
      r.fail("functor image of " + d.mor_name(m) + " has wrong endpoints");
  }
  if (!r.ok) return r;
  for (Idx a = 0; a < d.n_obj; ++a)
    if (f.mor_map[d.identity[a]] != c.identity[f.obj_map[a]])
      r.fail("functor does not preserve the identity of " + d.obj_name(a));
  for (Idx g = 0; g < d.n_mor(); ++g)
    for (Idx m = 0; m < d.n_mor(); ++m) {
      if (!d.composable(g, m)) continue;
      if (f.mor_map[d.compose(g, m)] != c.compose(f.mor_map[g], f.mor_map[m]))
        r.fail("functor does not preserve " + d.mor_name(g) + " . " + d.mor_name(m));
    }
  return r;
}

inline Functor identity_functor(CatPtr c) {
  Functor f;
  f.dom = c;
  f.cod = c;
  f.obj_map.resize(c->n_obj);
  f.mor_map.resize(c->n_mor());
  std::iota(f.obj_map.begin(), f.obj_map.end(), 0);
  std::iota(f.mor_map.begin(), f.mor_map.end(), 0);
  return f;
}

inline Functor compose_functors(const Functor& g, const Functor& f) {
  Functor h;
  h.dom = f.dom;
  h.cod = g.cod;
  h.obj_map.reserve(f.obj_map.size());
  h.mor_map.reserve(f.mor_map.size());
  for (Idx a : f.obj_map) h.obj_map.push_back(g.obj_map[a]);
  for (Idx m : f.mor_map) h.mor_map.push_back(g.mor_map[m]);
  return h;
}

inline Functor constant_functor(CatPtr dom, CatPtr cod, Idx obj) {
  Functor f;
  f.dom = dom;
  f.cod = cod;
  f.obj_map.assign(dom->n_obj, obj);
  f.mor_map.assign(dom->n_mor(), cod->identity[obj]);
  return f;
}

struct NatTrans {
  Functor dom, cod;            // parallel functors
  std::vector<Idx> component;  // per object of dom.dom, a morphism of dom.cod

  Idx at(Idx a) const { return component[a]; }
};

inline ValidationReport validate_nattrans(const NatTrans& t) {
  ValidationReport r;
  const FinCategory& a = *t.dom.dom;
  const FinCategory& b = *t.dom.cod;
  if (static_cast<int>(t.component.size()) != a.n_obj) {
    r.fail("component table size mismatch");
    return r;
  }
  for (Idx o = 0; o < a.n_obj; ++o) {
    Idx c = t.component[o];
    if (c < 0 || c >= b.n_mor() || b.src[c] != t.dom.obj_map[o] ||
        b.tgt[c] != t.cod.obj_map[o])
      r.fail("component at " + a.obj_name(o) + " has wrong endpoints");
  }
  if (!r.ok) return r;
  for (Idx m = 0; m < a.n_mor(); ++m) {
    Idx s = a.src[m], t2 = a.tgt[m];
    if (b.compose(t.component[t2], t.dom.mor_map[m]) !=
        b.compose(t.cod.mor_map[m], t.component[s]))
      r.fail("naturality fails at " + a.mor_name(m));
  }
  return r;
}

inline NatTrans identity_nattrans(const Functor& f) {
  NatTrans t;
  t.dom = f;
  t.cod = f;
  t.component.reserve(f.obj_map.size());
  for (Idx a : f.obj_map) t.component.push_back(f.cod->identity[a]);
  return t;
}

// A square gamma : x.u => y.v with u : A -> B, v : A -> C, x : B -> D,
// y : C -> D.
struct Square {
  Functor u, v, x, y;
  NatTrans gamma;
};

inline ValidationReport validate_square(const Square& s) {
  ValidationReport r;
  auto vu = validate_functor(s.u);
  auto vv = validate_functor(s.v);
  auto vx = validate_functor(s.x);
  auto vy = validate_functor(s.y);
  for (const ValidationReport* p : {&vu, &vv, &vx, &vy})
    if (!p->ok) {
      r.fail("square has an invalid functor leg");
      return r;
    }
  auto vg = validate_nattrans(s.gamma);
  if (!vg.ok) {
    r.fail("square 2-cell is not natural: " + vg.summary());
    return r;
  }
  // gamma must go from x.u to y.v.
  const Functor xu = compose_functors(s.x, s.u);
  const Functor yv = compose_functors(s.y, s.v);
  if (s.gamma.dom.obj_map != xu.obj_map || s.gamma.dom.mor_map != xu.mor_map ||
      s.gamma.cod.obj_map != yv.obj_map || s.gamma.cod.mor_map != yv.mor_map)
    r.fail("square 2-cell does not have boundary x.u => y.v");
  return r;
}

// ---------------------------------------------------------------------------
// Comma category of a cospan f : B -> C <- A : g.
//
// Objects are triples (b, a, m : f(b) -> g(a)); morphisms (b,a,m) -> (b',a',m')
// are pairs (beta : b -> b', alpha : a -> a') with m' . f(beta) = g(alpha) . m.

struct CommaResult {
  CatPtr cat;
  Functor dom_leg;  // projection to B
  Functor cod_leg;  // projection to A
  NatTrans canonical;  // f . dom_leg => g . cod_leg
  std::vector<std::tuple<Idx, Idx, Idx>> obj_data;   // (b, a, m in C)
  std::vector<std::pair<Idx, Idx>> mor_data;         // (beta in B, alpha in A)
};

inline CommaResult comma_category(const Functor& f, const Functor& g) {
  if (f.cod->n_obj != g.cod->n_obj || f.cod->n_mor() != g.cod->n_mor())
    throw CheckError("comma of a non-cospan");
  const FinCategory& B = *f.dom;
  const FinCategory& A = *g.dom;
  const FinCategory& C = *f.cod;

  CommaResult out;
  CategoryBuilder bld;
  std::map<std::tuple<Idx, Idx, Idx>, Idx> obj_index;
  for (Idx b = 0; b < B.n_obj; ++b)
    for (Idx a = 0; a < A.n_obj; ++a)
      for (Idx m : C.hom(f.obj_map[b], g.obj_map[a])) {
        Idx o = bld.add_object(B.obj_name(b) + "," + A.obj_name(a) + "," + C.mor_name(m));
        obj_index[{b, a, m}] = o;
        out.obj_data.emplace_back(b, a, m);
      }

  std::map<std::pair<Idx, Idx>, std::map<std::pair<Idx, Idx>, Idx>> mor_index;
  for (size_t o1 = 0; o1 < out.obj_data.size(); ++o1)
    for (size_t o2 = 0; o2 < out.obj_data.size(); ++o2) {
      auto [b1, a1, m1] = out.obj_data[o1];
      auto [b2, a2, m2] = out.obj_data[o2];
      for (Idx beta : B.hom(b1, b2))
        for (Idx alpha : A.hom(a1, a2)) {
          if (C.compose(m2, f.mor_map[beta]) != C.compose(g.mor_map[alpha], m1))
            continue;
          Idx m = bld.add_morphism(static_cast<Idx>(o1), static_cast<Idx>(o2));
          mor_index[{static_cast<Idx>(o1), static_cast<Idx>(o2)}][{beta, alpha}] = m;
          out.mor_data.emplace_back(beta, alpha);
        }
    }

  for (size_t o = 0; o < out.obj_data.size(); ++o) {
    auto [b, a, m] = out.obj_data[o];
    bld.set_identity(static_cast<Idx>(o),
                     mor_index[{static_cast<Idx>(o), static_cast<Idx>(o)}]
                              [{B.identity[b], A.identity[a]}]);
  }
  // Composition: componentwise in B and A.
  {
    size_t next = 0;
    std::vector<std::tuple<Idx, Idx, Idx, Idx>> flat;  // (src, tgt, beta, alpha)
    for (const auto& [st, inner] : mor_index)
      for (const auto& [ba, idx] : inner) {
        (void)idx;
        flat.emplace_back(st.first, st.second, ba.first, ba.second);
        ++next;
      }
    for (const auto& [s1, t1, be1, al1] : flat)
      for (const auto& [s2, t2, be2, al2] : flat) {
        if (t1 != s2) continue;
        Idx fm = mor_index[{s1, t1}][{be1, al1}];
        Idx gm = mor_index[{s2, t2}][{be2, al2}];
        Idx comp = mor_index[{s1, t2}][{B.compose(be2, be1), A.compose(al2, al1)}];
        bld.set_composite(gm, fm, comp);
      }
  }

  out.cat = make_cat(bld.build());

  out.dom_leg.dom = out.cat;
  out.dom_leg.cod = f.dom;
  out.cod_leg.dom = out.cat;
  out.cod_leg.cod = g.dom;
  for (auto& [b, a, m] : out.obj_data) {
    (void)m;
    out.dom_leg.obj_map.push_back(b);
    out.cod_leg.obj_map.push_back(a);
  }
  for (auto& [beta, alpha] : out.mor_data) {
    out.dom_leg.mor_map.push_back(beta);
    out.cod_leg.mor_map.push_back(alpha);
  }

  out.canonical.dom = compose_functors(f, out.dom_leg);
  out.canonical.cod = compose_functors(g, out.cod_leg);
  for (auto& [b, a, m] : out.obj_data) {
    (void)b;
    (void)a;
    out.canonical.component.push_back(m);
  }
  return out;
}

// The unique strict factorization of a competitor square through the comma.
// Given p : X -> A, q : X -> B and theta : f.q => g.p, build u : X -> K with
// dom_leg . u = q, cod_leg . u = p and canonical . u = theta.
inline std::optional<Functor> factor_through_comma(const CommaResult& k,
                                                   const Functor& f,
                                                   const Functor& g,
                                                   const Functor& p,
                                                   const Functor& q,
                                                   const NatTrans& theta) {
  const FinCategory& X = *p.dom;
  std::map<std::tuple<Idx, Idx, Idx>, Idx> obj_index;
  for (size_t o = 0; o < k.obj_data.size(); ++o) obj_index[k.obj_data[o]] = static_cast<Idx>(o);
  std::map<std::tuple<Idx, Idx, Idx, Idx>, Idx> mor_index;  // (src,tgt,beta,alpha)
  for (Idx m = 0; m < k.cat->n_mor(); ++m)
    mor_index[{k.cat->src[m], k.cat->tgt[m], k.mor_data[m].first, k.mor_data[m].second}] = m;

  Functor u;
  u.dom = p.dom;
  u.cod = k.cat;
  for (Idx x = 0; x < X.n_obj; ++x) {
    auto it = obj_index.find({q.obj_map[x], p.obj_map[x], theta.component[x]});
    if (it == obj_index.end()) return std::nullopt;
    u.obj_map.push_back(it->second);
  }
  for (Idx m = 0; m < X.n_mor(); ++m) {
    auto it = mor_index.find(
        {u.obj_map[X.src[m]], u.obj_map[X.tgt[m]], q.mor_map[m], p.mor_map[m]});
    if (it == mor_index.end()) return std::nullopt;
    u.mor_map.push_back(it->second);
  }
  (void)f;
  (void)g;
  return u;
}

// ---------------------------------------------------------------------------
// Full subcategory on a chosen set of objects, with provenance.

struct SubcategoryResult {
  CatPtr cat;
  std::vector<Idx> obj_of;  // subcategory object -> ambient object
  std::vector<Idx> mor_of;  // subcategory morphism -> ambient morphism
  Functor inclusion;
};

inline SubcategoryResult full_subcategory(CatPtr ambient, const std::vector<Idx>& objs) {
  const FinCategory& c = *ambient;
  SubcategoryResult out;
  out.obj_of = objs;
  std::vector<Idx> obj_to_sub(c.n_obj, kNone);
  CategoryBuilder bld;
  for (size_t i = 0; i < objs.size(); ++i) {
    obj_to_sub[objs[i]] = static_cast<Idx>(i);
    bld.add_object(c.obj_name(objs[i]));
  }
  std::vector<Idx> mor_to_sub(c.n_mor(), kNone);
  for (Idx m = 0; m < c.n_mor(); ++m) {
    if (obj_to_sub[c.src[m]] == kNone || obj_to_sub[c.tgt[m]] == kNone) continue;
    Idx sm = bld.add_morphism(obj_to_sub[c.src[m]], obj_to_sub[c.tgt[m]], c.mor_name(m));
    mor_to_sub[m] = sm;
    out.mor_of.push_back(m);
  }
  for (size_t i = 0; i < objs.size(); ++i)
    bld.set_identity(static_cast<Idx>(i), mor_to_sub[c.identity[objs[i]]]);
  for (Idx g = 0; g < c.n_mor(); ++g) {
    if (mor_to_sub[g] == kNone) continue;
    for (Idx f = 0; f < c.n_mor(); ++f) {
      if (mor_to_sub[f] == kNone || !c.composable(g, f)) continue;
      bld.set_composite(mor_to_sub[g], mor_to_sub[f], mor_to_sub[c.compose(g, f)]);
    }
  }
  out.cat = make_cat(bld.build());
  out.inclusion.dom = out.cat;
  out.inclusion.cod = ambient;
  out.inclusion.obj_map = out.obj_of;
  out.inclusion.mor_map = out.mor_of;
  return out;
}

// Pseudopullback of a cospan: the full subcategory of the comma category on
// the objects whose canonical component is invertible.
struct PseudopullbackResult {
  CatPtr cat;
  Functor to_b;  // projection to the domain of f
  Functor to_a;  // projection to the domain of g
  NatTrans canonical;
  std::vector<std::tuple<Idx, Idx, Idx>> obj_data;
};

inline PseudopullbackResult pseudopullback(const Functor& f, const Functor& g) {
  CommaResult k = comma_category(f, g);
  std::vector<Idx> iso_objs;
  for (size_t o = 0; o < k.obj_data.size(); ++o)
    if (f.cod->is_iso(std::get<2>(k.obj_data[o]))) iso_objs.push_back(static_cast<Idx>(o));
  SubcategoryResult sub = full_subcategory(k.cat, iso_objs);
  PseudopullbackResult out;
  out.cat = sub.cat;
  out.to_b = compose_functors(k.dom_leg, sub.inclusion);
  out.to_a = compose_functors(k.cod_leg, sub.inclusion);
  out.canonical.dom = compose_functors(f, out.to_b);
  out.canonical.cod = compose_functors(g, out.to_a);
  for (Idx o : iso_objs) {
    out.obj_data.push_back(k.obj_data[o]);
    out.canonical.component.push_back(std::get<2>(k.obj_data[o]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive isomorphism search between categories (small inputs only).

namespace detail {

inline bool extend_mor_iso(const FinCategory& c, const FinCategory& d,
                           const std::vector<Idx>& obj_map,
                           const std::vector<Idx>& todo, size_t i,
                           std::vector<Idx>& mor_map, std::vector<char>& mused) {
  auto consistent = [&]() {
    for (Idx g = 0; g < c.n_mor(); ++g) {
      if (mor_map[g] == kNone) continue;
      for (Idx f2 = 0; f2 < c.n_mor(); ++f2) {
        if (mor_map[f2] == kNone || !c.composable(g, f2)) continue;
        Idx gf = c.compose(g, f2);
        if (mor_map[gf] != kNone &&
            d.compose(mor_map[g], mor_map[f2]) != mor_map[gf])
          return false;
      }
    }
    return true;
  };
  if (i == todo.size()) return consistent();
  Idx m = todo[i];
  for (Idx n : d.hom(obj_map[c.src[m]], obj_map[c.tgt[m]])) {
    if (mused[n]) continue;
    mor_map[m] = n;
    mused[n] = 1;
    if (consistent() && extend_mor_iso(c, d, obj_map, todo, i + 1, mor_map, mused))
      return true;
    mused[n] = 0;
    mor_map[m] = kNone;
  }
  return false;
}

inline bool extend_cat_iso(const FinCategory& c, const FinCategory& d,
                           std::vector<Idx>& obj_map, std::vector<char>& used,
                           Idx next) {
  if (next == c.n_obj) {
    // Objects fixed; biject the morphisms hom-set by hom-set.
    std::vector<Idx> mor_map(c.n_mor(), kNone);
    std::vector<char> mused(d.n_mor(), 0);
    for (Idx a = 0; a < c.n_obj; ++a) {
      Idx di = d.identity[obj_map[a]];
      if (mused[di]) return false;
      mor_map[c.identity[a]] = di;
      mused[di] = 1;
    }
    std::vector<Idx> todo;
    for (Idx m = 0; m < c.n_mor(); ++m)
      if (mor_map[m] == kNone) todo.push_back(m);
    return extend_mor_iso(c, d, obj_map, todo, 0, mor_map, mused);
  }
  for (Idx b = 0; b < d.n_obj; ++b) {
    if (used[b]) continue;
    obj_map[next] = b;
    used[b] = 1;
    bool ok = true;
    for (Idx a = 0; a <= next && ok; ++a)
      if (c.hom(a, next).size() != d.hom(obj_map[a], b).size() ||
          c.hom(next, a).size() != d.hom(b, obj_map[a]).size())
        ok = false;
    if (ok && extend_cat_iso(c, d, obj_map, used, next + 1)) return true;
    used[b] = 0;
    obj_map[next] = kNone;
  }
  return false;
}

}  // namespace detail

inline bool categories_isomorphic(const FinCategory& c, const FinCategory& d) {
  if (c.n_obj != d.n_obj || c.n_mor() != d.n_mor()) return false;
  std::vector<Idx> obj_map(c.n_obj, kNone);
  std::vector<char> used(d.n_obj, 0);
  return detail::extend_cat_iso(c, d, obj_map, used, 0);
}

// ---------------------------------------------------------------------------
// Functor properties used by the exactness experiments.

inline bool is_fully_faithful(const Functor& f) {
  const FinCategory& a = *f.dom;
  const FinCategory& b = *f.cod;
  for (Idx x = 0; x < a.n_obj; ++x)
    for (Idx y = 0; y < a.n_obj; ++y) {
      auto ha = a.hom(x, y);
      auto hb = b.hom(f.obj_map[x], f.obj_map[y]);
      std::set<Idx> images;
      for (Idx m : ha) images.insert(f.mor_map[m]);
      if (images.size() != ha.size() || images.size() != hb.size()) return false;
    }
  return true;
}

inline bool is_full(const Functor& f) {
  const FinCategory& a = *f.dom;
  const FinCategory& b = *f.cod;
  for (Idx x = 0; x < a.n_obj; ++x)
    for (Idx y = 0; y < a.n_obj; ++y) {
      std::set<Idx> images;
      for (Idx m : a.hom(x, y)) images.insert(f.mor_map[m]);
      for (Idx n : b.hom(f.obj_map[x], f.obj_map[y]))
        if (!images.count(n)) return false;
    }
  return true;
}

inline bool is_essentially_surjective(const Functor& f) {
  const FinCategory& b = *f.cod;
  std::vector<char> hit(b.n_obj, 0);
  for (Idx a : f.obj_map) hit[a] = 1;
  for (Idx c = 0; c < b.n_obj; ++c) {
    if (hit[c]) continue;
    bool iso_to_image = false;
    for (Idx a = 0; a < b.n_obj && !iso_to_image; ++a) {
      if (!hit[a]) continue;
      for (Idx m : b.hom(a, c))
        if (b.is_iso(m)) {
          iso_to_image = true;
          break;
        }
    }
    if (!iso_to_image) return false;
  }
  return true;
}

}  // namespace bicat
