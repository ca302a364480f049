#pragma once

// JSON serialization for the kernel's finite structures.
//
// Categories:   {"objects":[names...],
//                "morphisms":[{"id":i,"src":a,"tgt":b,"name":...}...],
//                "identity":{"obj":mor,...},
//                "compose":[[g,f,gf]...]}        (composable pairs only)
// Functors:     {"obj":[...],"mor":[...]}        (index maps)
// Squares:      {"P","B","C","D"} categories, legs "u":P->B, "v":P->C,
//               "x":B->D, "y":C->D, and "gamma":[per P-object a D-morphism]
// Profunctors:  {"src":cat,"tgt":cat,
//                "values":{"<tgt obj>,<src obj>":[elements...]},
//                "lact":[...],"ract":[...]}
//               or the relation shorthand {"pairs":[[a,b]...],"na":n,"nb":m},
//               elaborated onto discrete categories.
// T-elements:   {"monad":"ultrafilter","point":p}, {"monad":"powerset",
//               "set":[...]}, {"monad":"filter","min":[...]},
//               {"monad":"distribution","dist":[[point,num,den]...]}
// Families:     {"index":n,"labels":[...],"nu":<T-element>}
// Topologies:   {"points":[...],"opens":[[...]...]}
// Closures:     {"points":[...],"cl":{"<subset>":[...],...}} with subsets
//               written as comma-joined sorted point indices ("" = empty).
// Spaces:       monad, point count, universe cap, arrow table keyed by
//               (point, index size, labels, T-element), identity and
//               composition tables, the family enumeration, and the
//               reindexing action table.
//
// Parsers throw CheckError with a message on malformed input; emitters are
// deterministic (object keys sorted), so equal inputs give equal bytes.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "convspace.hpp"
#include "fincat.hpp"
#include "loke.hpp"
#include "monads.hpp"
#include "profunctor.hpp"
#include "util.hpp"

namespace bicat {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Helpers

namespace jsondetail {

inline void expect(bool cond, const std::string& msg) {
  if (!cond) throw CheckError(msg);
}

inline const Json& field(const Json& j, const std::string& key) {
  auto it = j.find(key);
  expect(it != j.end(), "missing field \"" + key + "\"");
  return *it;
}

inline std::vector<Idx> idx_list(const Json& j, const std::string& what) {
  expect(j.is_array(), what + " must be an array");
  std::vector<Idx> out;
  for (const auto& v : j) {
    expect(v.is_number_integer(), what + " must list integers");
    out.push_back(v.get<Idx>());
  }
  return out;
}

}  // namespace jsondetail

// ---------------------------------------------------------------------------
// Categories

inline Json category_to_json(const FinCategory& c) {
  Json j;
  Json objs = Json::array();
  for (Idx a = 0; a < c.n_obj; ++a) objs.push_back(c.obj_name(a));
  j["objects"] = std::move(objs);
  Json mors = Json::array();
  for (Idx m = 0; m < c.n_mor(); ++m) {
    Json e;
    e["id"] = m;
    e["src"] = c.src[m];
    e["tgt"] = c.tgt[m];
    e["name"] = c.mor_name(m);
    mors.push_back(std::move(e));
  }
  j["morphisms"] = std::move(mors);
  Json ident = Json::object();
  for (Idx a = 0; a < c.n_obj; ++a) ident[std::to_string(a)] = c.identity[a];
  j["identity"] = std::move(ident);
  Json comp = Json::array();
  for (Idx g = 0; g < c.n_mor(); ++g)
    for (Idx f = 0; f < c.n_mor(); ++f)
      if (c.composable(g, f)) comp.push_back(Json::array({g, f, c.compose(g, f)}));
  j["compose"] = std::move(comp);
  return j;
}

inline FinCategory category_from_json(const Json& j) {
  using jsondetail::expect;
  using jsondetail::field;
  FinCategory c;
  const Json& objs = field(j, "objects");
  expect(objs.is_array(), "\"objects\" must be an array");
  c.n_obj = static_cast<int>(objs.size());
  for (const auto& o : objs)
    c.obj_names.push_back(o.is_string() ? o.get<std::string>() : o.dump());
  const Json& mors = field(j, "morphisms");
  expect(mors.is_array(), "\"morphisms\" must be an array");
  for (size_t i = 0; i < mors.size(); ++i) {
    const Json& e = mors[i];
    expect(field(e, "id").get<Idx>() == static_cast<Idx>(i),
           "morphism ids must equal their positions");
    Idx s = field(e, "src").get<Idx>();
    Idx t = field(e, "tgt").get<Idx>();
    expect(s >= 0 && s < c.n_obj && t >= 0 && t < c.n_obj,
           "morphism endpoints out of range");
    c.src.push_back(s);
    c.tgt.push_back(t);
    c.mor_names.push_back(e.contains("name") ? e["name"].get<std::string>()
                                             : std::string());
  }
  c.identity.assign(c.n_obj, kNone);
  for (const auto& [key, val] : field(j, "identity").items()) {
    Idx a = static_cast<Idx>(std::stol(key));
    expect(a >= 0 && a < c.n_obj, "identity key out of range");
    c.identity[a] = val.get<Idx>();
  }
  c.comp_table.assign(static_cast<size_t>(c.n_mor()) * c.n_mor(), kNone);
  for (const auto& t : field(j, "compose")) {
    expect(t.is_array() && t.size() == 3, "compose entries must be triples");
    Idx g = t[0].get<Idx>(), f = t[1].get<Idx>(), gf = t[2].get<Idx>();
    expect(g >= 0 && g < c.n_mor() && f >= 0 && f < c.n_mor() && gf >= 0 &&
               gf < c.n_mor(),
           "compose entry out of range");
    c.comp_table[static_cast<size_t>(g) * c.n_mor() + f] = gf;
  }
  auto v = validate_category(c);
  expect(v.ok, "not a category: " + v.summary());
  return c;
}

// ---------------------------------------------------------------------------
// Functors and squares

inline Json functor_to_json(const Functor& f) {
  Json j;
  j["obj"] = f.obj_map;
  j["mor"] = f.mor_map;
  return j;
}

inline Functor functor_from_json(const Json& j, CatPtr dom, CatPtr cod) {
  using jsondetail::expect;
  Functor f;
  f.dom = std::move(dom);
  f.cod = std::move(cod);
  f.obj_map = jsondetail::idx_list(jsondetail::field(j, "obj"), "functor \"obj\"");
  f.mor_map = jsondetail::idx_list(jsondetail::field(j, "mor"), "functor \"mor\"");
  auto v = validate_functor(f);
  expect(v.ok, "not a functor: " + v.summary());
  return f;
}

inline Square square_from_json(const Json& j) {
  using jsondetail::field;
  CatPtr P = make_cat(category_from_json(field(j, "P")));
  CatPtr B = make_cat(category_from_json(field(j, "B")));
  CatPtr C = make_cat(category_from_json(field(j, "C")));
  CatPtr D = make_cat(category_from_json(field(j, "D")));
  Square sq;
  sq.u = functor_from_json(field(j, "u"), P, B);
  sq.v = functor_from_json(field(j, "v"), P, C);
  sq.x = functor_from_json(field(j, "x"), B, D);
  sq.y = functor_from_json(field(j, "y"), C, D);
  sq.gamma.dom = compose_functors(sq.x, sq.u);
  sq.gamma.cod = compose_functors(sq.y, sq.v);
  sq.gamma.component =
      jsondetail::idx_list(field(j, "gamma"), "square \"gamma\"");
  auto v = validate_square(sq);
  jsondetail::expect(v.ok, "not a square: " + v.summary());
  return sq;
}

// ---------------------------------------------------------------------------
// Profunctors

inline Json profunctor_to_json(const Profunctor& p) {
  Json j;
  j["src"] = category_to_json(*p.dom);
  j["tgt"] = category_to_json(*p.cod);
  Json values = Json::object();
  for (Idx b = 0; b < p.cod->n_obj; ++b)
    for (Idx a = 0; a < p.dom->n_obj; ++a) {
      int c = p.count(b, a);
      if (c == 0) continue;
      Json elems = Json::array();
      for (Idx i = 0; i < c; ++i) elems.push_back(i);
      values[std::to_string(b) + "," + std::to_string(a)] = std::move(elems);
    }
  j["values"] = std::move(values);
  j["lact"] = p.lact_tab;
  j["ract"] = p.ract_tab;
  return j;
}

// Accepts the full form or the relation shorthand; relations are elaborated
// onto discrete categories with singleton value sets at the related pairs.
inline Profunctor profunctor_from_json(const Json& j) {
  using jsondetail::expect;
  using jsondetail::field;
  Profunctor p;
  if (j.contains("pairs")) {
    std::vector<std::pair<Idx, Idx>> pairs;
    Idx max_a = -1, max_b = -1;
    for (const auto& e : field(j, "pairs")) {
      expect(e.is_array() && e.size() == 2, "\"pairs\" entries must be pairs");
      Idx a = e[0].get<Idx>(), b = e[1].get<Idx>();
      expect(a >= 0 && b >= 0, "pair entries must be nonnegative");
      pairs.emplace_back(a, b);
      max_a = std::max(max_a, a);
      max_b = std::max(max_b, b);
    }
    int na = j.contains("na") ? j["na"].get<int>() : max_a + 1;
    int nb = j.contains("nb") ? j["nb"].get<int>() : max_b + 1;
    expect(na > max_a && nb > max_b, "\"na\"/\"nb\" must exceed the pair entries");
    p.dom = make_cat(discrete_category(na));
    p.cod = make_cat(discrete_category(nb));
    p.counts.assign(static_cast<size_t>(nb) * na, 0);
    for (auto [a, b] : pairs) p.counts[static_cast<size_t>(b) * na + a] = 1;
    p.lact_tab.resize(nb);
    for (Idx t = 0; t < nb; ++t) {
      p.lact_tab[t].resize(na);
      for (Idx a = 0; a < na; ++a)
        p.lact_tab[t][a].assign(p.count(t, a), 0);
    }
    p.ract_tab.resize(na);
    for (Idx s = 0; s < na; ++s) {
      p.ract_tab[s].resize(nb);
      for (Idx b = 0; b < nb; ++b)
        p.ract_tab[s][b].assign(p.count(b, s), 0);
    }
    return p;
  }
  p.dom = make_cat(category_from_json(field(j, "src")));
  p.cod = make_cat(category_from_json(field(j, "tgt")));
  p.counts.assign(static_cast<size_t>(p.cod->n_obj) * p.dom->n_obj, 0);
  for (const auto& [key, val] : field(j, "values").items()) {
    auto comma = key.find(',');
    expect(comma != std::string::npos, "values keys must be \"tgt,src\"");
    Idx b = static_cast<Idx>(std::stol(key.substr(0, comma)));
    Idx a = static_cast<Idx>(std::stol(key.substr(comma + 1)));
    expect(b >= 0 && b < p.cod->n_obj && a >= 0 && a < p.dom->n_obj,
           "values key out of range");
    expect(val.is_array(), "values entries must be arrays");
    p.counts[static_cast<size_t>(b) * p.dom->n_obj + a] =
        static_cast<int>(val.size());
  }
  p.lact_tab =
      field(j, "lact").get<std::vector<std::vector<std::vector<Idx>>>>();
  p.ract_tab =
      field(j, "ract").get<std::vector<std::vector<std::vector<Idx>>>>();
  auto v = validate_profunctor(p);
  expect(v.ok, "not a profunctor: " + (v.errors.empty() ? std::string("table shape")
                                                        : v.errors[0]));
  return p;
}

// The support of a profunctor between discrete categories, as relation pairs.
inline Json profunctor_support_json(const Profunctor& p) {
  Json pairs = Json::array();
  for (Idx a = 0; a < p.dom->n_obj; ++a)
    for (Idx b = 0; b < p.cod->n_obj; ++b)
      if (p.count(b, a) > 0) pairs.push_back(Json::array({a, b}));
  return pairs;
}

// ---------------------------------------------------------------------------
// T-elements and families

inline Json telem_to_json(const TElem& t) {
  Json j;
  j["monad"] = monad_name(t.monad);
  switch (t.monad) {
    case MonadName::ultrafilter:
      j["point"] = t.point;
      break;
    case MonadName::powerset:
      j["set"] = t.set;
      break;
    case MonadName::filter:
      j["min"] = t.set;
      break;
    case MonadName::distribution: {
      Json d = Json::array();
      for (const auto& [x, q] : t.dist)
        d.push_back(Json::array({x, q.num, q.den}));
      j["dist"] = std::move(d);
      break;
    }
  }
  return j;
}

inline TElem telem_from_json(const Json& j) {
  using jsondetail::expect;
  using jsondetail::field;
  TElem t;
  t.monad = monad_instance(field(j, "monad").get<std::string>()).name;
  switch (t.monad) {
    case MonadName::ultrafilter:
      t.point = field(j, "point").get<Idx>();
      break;
    case MonadName::powerset:
      t.set = jsondetail::idx_list(field(j, "set"), "\"set\"");
      break;
    case MonadName::filter:
      t.set = jsondetail::idx_list(field(j, "min"), "\"min\"");
      break;
    case MonadName::distribution:
      for (const auto& e : field(j, "dist")) {
        expect(e.is_array() && e.size() == 3,
               "\"dist\" entries must be [point,num,den]");
        t.dist.emplace_back(e[0].get<Idx>(),
                            Rational(e[1].get<std::int64_t>(),
                                     e[2].get<std::int64_t>()));
      }
      break;
  }
  return t;
}

inline Json lobject_to_json(const LObject& o) {
  Json j;
  j["index"] = o.size();
  j["labels"] = o.labels;
  j["nu"] = telem_to_json(o.nu);
  return j;
}

inline LObject lobject_from_json(const Json& j) {
  using jsondetail::expect;
  LObject o;
  o.labels = jsondetail::idx_list(jsondetail::field(j, "labels"), "\"labels\"");
  expect(jsondetail::field(j, "index").get<int>() == o.size(),
         "\"index\" must equal the number of labels");
  o.nu = telem_from_json(jsondetail::field(j, "nu"));
  return o;
}

// ---------------------------------------------------------------------------
// Topologies and closure operators

inline void topology_from_json(const Json& j, int& n,
                               std::vector<std::vector<Idx>>& opens) {
  using jsondetail::expect;
  const Json& pts = jsondetail::field(j, "points");
  expect(pts.is_array(), "\"points\" must be an array");
  n = static_cast<int>(pts.size());
  opens.clear();
  for (const auto& o : jsondetail::field(j, "opens"))
    opens.push_back(jsondetail::idx_list(o, "\"opens\" entries"));
}

inline std::string subset_key(int mask) {
  std::string key;
  for (int x = 0; mask >> x; ++x)
    if (mask & (1 << x)) {
      if (!key.empty()) key += ",";
      key += std::to_string(x);
    }
  return key;
}

inline void closure_from_json(const Json& j, int& n,
                              std::vector<std::vector<Idx>>& cl) {
  using jsondetail::expect;
  const Json& pts = jsondetail::field(j, "points");
  expect(pts.is_array(), "\"points\" must be an array");
  n = static_cast<int>(pts.size());
  const Json& table = jsondetail::field(j, "cl");
  cl.assign(1 << n, {});
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::string key = subset_key(mask);
    auto it = table.find(key);
    expect(it != table.end(), "\"cl\" is missing the subset \"" + key + "\"");
    cl[mask] = jsondetail::idx_list(*it, "\"cl\" entries");
  }
}

// ---------------------------------------------------------------------------
// Spaces

inline Json space_to_json(const ConvergenceSpace& A) {
  Json j;
  j["monad"] = monad_name(A.T.name);
  j["points"] = A.n_points();
  j["universe"] = A.universe;
  Json fams = Json::array();
  for (Idx f = 0; f < A.n_families(); ++f)
    fams.push_back(lobject_to_json(A.fam.objects[f]));
  j["families"] = std::move(fams);
  Json arrows = Json::array();
  for (Idx pt = 0; pt < A.n_points(); ++pt)
    for (Idx f = 0; f < A.n_families(); ++f) {
      int c = A.count(pt, f);
      if (c == 0) continue;
      const LObject& F = A.fam.objects[f];
      Json e;
      e["point"] = pt;
      e["index"] = F.size();
      e["labels"] = F.labels;
      e["nu"] = telem_to_json(F.nu);
      e["count"] = c;
      arrows.push_back(std::move(e));
    }
  j["arrows"] = std::move(arrows);
  j["identity"] = A.id_arrow;
  Json comp = Json::array();
  for (const auto& [k, v] : A.comp) {
    Json e;
    e["point"] = k.pt;
    e["family"] = k.fam;
    e["arrow"] = k.arrow;
    Json fib = Json::array();
    for (auto [g, s] : k.fibers) fib.push_back(Json::array({g, s}));
    e["fibers"] = std::move(fib);
    e["value"] = v;
    comp.push_back(std::move(e));
  }
  j["composition"] = std::move(comp);
  j["ract"] = A.arrows.ract_tab;
  return j;
}

// Rebuilds a space over bare points from its tables.  The family category is
// regenerated from the monad and the universe cap, so family indices in the
// composition table refer to the canonical enumeration (mirrored in
// "families").  The reindexing action is read from "ract" when present;
// without it every arrow set must be thin, since the action is then forced.
inline ConvergenceSpace space_from_json(const Json& j,
                                        long long max_morphisms = 200000) {
  using jsondetail::expect;
  using jsondetail::field;
  ConvergenceSpace A;
  A.T = monad_instance(field(j, "monad").get<std::string>());
  int n = field(j, "points").get<int>();
  expect(n >= 0, "\"points\" must be nonnegative");
  A.base = make_cat(discrete_category(n));
  A.universe = field(j, "universe").get<int>();
  A.fam = build_quotient_category(A.T, A.base, A.universe, max_morphisms);
  A.index_families();
  if (j.contains("families")) {
    expect(j["families"].is_array() &&
               j["families"].size() == static_cast<size_t>(A.n_families()),
           "\"families\" does not match the canonical enumeration");
    for (Idx f = 0; f < A.n_families(); ++f)
      expect(lobject_from_json(j["families"][f]) == A.fam.objects[f],
             "\"families\" entry " + std::to_string(f) +
                 " does not match the canonical enumeration");
  }
  const int nf = A.n_families();
  A.arrows.dom = A.fam.cat;
  A.arrows.cod = A.base;
  A.arrows.counts.assign(static_cast<size_t>(nf) * n, 0);
  for (const auto& e : field(j, "arrows")) {
    LObject F;
    F.labels = jsondetail::idx_list(field(e, "labels"), "arrow \"labels\"");
    F.nu = telem_from_json(field(e, "nu"));
    expect(field(e, "index").get<int>() == F.size(),
           "arrow \"index\" must equal the number of labels");
    Idx f = A.family_index(F);
    Idx pt = field(e, "point").get<Idx>();
    expect(pt >= 0 && pt < n, "arrow \"point\" out of range");
    A.arrows.counts[static_cast<size_t>(f) * n + pt] =
        field(e, "count").get<int>();
  }
  // Bare points: restriction along an identity is the identity.
  A.arrows.lact_tab.resize(n);
  for (Idx t = 0; t < n; ++t) {
    A.arrows.lact_tab[t].resize(nf);
    for (Idx f = 0; f < nf; ++f) {
      A.arrows.lact_tab[t][f].resize(A.count(t, f));
      for (int i = 0; i < A.count(t, f); ++i) A.arrows.lact_tab[t][f][i] = i;
    }
  }
  if (j.contains("ract")) {
    A.arrows.ract_tab =
        j["ract"].get<std::vector<std::vector<std::vector<Idx>>>>();
  } else {
    const FinCategory& Fc = *A.fam.cat;
    A.arrows.ract_tab.resize(Fc.n_mor());
    for (Idx m = 0; m < Fc.n_mor(); ++m) {
      A.arrows.ract_tab[m].resize(n);
      for (Idx pt = 0; pt < n; ++pt) {
        int cs = A.count(pt, Fc.src[m]);
        expect(cs <= 1 && A.count(pt, Fc.tgt[m]) <= 1,
               "space tables need \"ract\" when arrows are not thin");
        A.arrows.ract_tab[m][pt].assign(cs, 0);
      }
    }
  }
  A.id_arrow = jsondetail::idx_list(field(j, "identity"), "\"identity\"");
  for (const auto& e : field(j, "composition")) {
    CompositeKey k;
    k.pt = field(e, "point").get<Idx>();
    k.fam = field(e, "family").get<Idx>();
    k.arrow = field(e, "arrow").get<Idx>();
    for (const auto& fb : field(e, "fibers")) {
      expect(fb.is_array() && fb.size() == 2,
             "composition \"fibers\" entries must be pairs");
      k.fibers.emplace_back(fb[0].get<Idx>(), fb[1].get<Idx>());
    }
    A.comp[k] = field(e, "value").get<Idx>();
  }
  return A;
}

}  // namespace bicat
