#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "bicat/convspace.hpp"
#include "test_support.hpp"

using namespace bicat;

namespace {

// ---------------------------------------------------------------------------
// Independent oracles.  These enumerate point-set structures directly from
// their definitions, without the library's validation paths.

std::vector<Idx> set_of_mask(int mask) {
  std::vector<Idx> out;
  for (int x = 0; mask >> x; ++x)
    if (mask & (1 << x)) out.push_back(x);
  return out;
}

// All topologies on {0..n-1}, each as a list of sorted open sets.
std::vector<std::vector<std::vector<Idx>>> all_topologies(int n) {
  int subsets = 1 << n;
  int full = subsets - 1;
  std::vector<std::vector<std::vector<Idx>>> out;
  for (long long fam = 0; fam < (1LL << subsets); ++fam) {
    auto has = [&](int m) { return (fam >> m) & 1; };
    if (!has(0) || !has(full)) continue;
    bool ok = true;
    for (int a = 0; a < subsets && ok; ++a)
      for (int b = a; b < subsets && ok; ++b)
        if (has(a) && has(b) && (!has(a | b) || !has(a & b))) ok = false;
    if (!ok) continue;
    std::vector<std::vector<Idx>> opens;
    for (int m = 0; m < subsets; ++m)
      if (has(m)) opens.push_back(set_of_mask(m));
    out.push_back(std::move(opens));
  }
  return out;
}

// All closure operators on {0..n-1}, each as a table over subset bitmasks.
// A closure operator is determined by its family of closed sets: any
// intersection-closed family containing the full set.
std::vector<std::vector<std::vector<Idx>>> all_closure_operators(int n) {
  int subsets = 1 << n;
  int full = subsets - 1;
  std::vector<std::vector<std::vector<Idx>>> out;
  for (long long fam = 0; fam < (1LL << subsets); ++fam) {
    auto has = [&](int m) { return (fam >> m) & 1; };
    if (!has(full)) continue;
    bool ok = true;
    for (int a = 0; a < subsets && ok; ++a)
      for (int b = a; b < subsets && ok; ++b)
        if (has(a) && has(b) && !has(a & b)) ok = false;
    if (!ok) continue;
    std::vector<std::vector<Idx>> cl(subsets);
    for (int m = 0; m < subsets; ++m) {
      int c = full;
      for (int k = 0; k < subsets; ++k)
        if (has(k) && (k & m) == m) c &= k;
      cl[m] = set_of_mask(c);
    }
    out.push_back(std::move(cl));
  }
  return out;
}

// arrow_exists[a][b]: every open neighbourhood of a contains b.
std::vector<std::vector<bool>> point_arrows_of_opens(
    int n, const std::vector<std::vector<Idx>>& opens) {
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, true));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (const auto& o : opens)
        if (std::binary_search(o.begin(), o.end(), a) &&
            !std::binary_search(o.begin(), o.end(), b))
          leq[a][b] = false;
  return leq;
}

// arrow_exists[a][b]: a lies in the closure of {b}.
std::vector<std::vector<bool>> point_arrows_of_closure(
    int n, const std::vector<std::vector<Idx>>& cl) {
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      leq[a][b] = std::binary_search(cl[1 << b].begin(), cl[1 << b].end(), a);
  return leq;
}

// Independent count of the composition-table domain: per point and family
// with arrows, the number of budgeted fiber assignments.
long long count_keys(const ConvergenceSpace& A) {
  long long total = 0;
  std::function<long long(const LObject&, int, int)> assigns =
      [&](const LObject& F, int x, int budget) -> long long {
    if (x == F.size()) return 1;
    long long acc = 0;
    for (Idx g = 0; g < A.n_families(); ++g) {
      int sz = A.family_size(g);
      if (sz > budget) continue;
      acc += static_cast<long long>(A.count(F.labels[x], g)) *
             assigns(F, x + 1, budget - sz);
    }
    return acc;
  };
  for (Idx pt = 0; pt < A.n_points(); ++pt)
    for (Idx f = 0; f < A.n_families(); ++f)
      if (A.count(pt, f) > 0)
        total += A.count(pt, f) * assigns(A.fam.objects[f], 0, A.universe);
  return total;
}

void check_points_match(const ConvergenceSpace& A,
                        const std::vector<std::vector<bool>>& leq) {
  FinCategory P = category_of_points(A);
  REQUIRE(P.n_obj == A.n_points());
  for (Idx a = 0; a < P.n_obj; ++a)
    for (Idx b = 0; b < P.n_obj; ++b) {
      size_t expect = leq[a][b] ? 1 : 0;
      REQUIRE(P.hom(a, b).size() == expect);
    }
  // The table is an actual category: composites exist, typed correctly.
  for (Idx f = 0; f < P.n_mor(); ++f)
    for (Idx g = 0; g < P.n_mor(); ++g) {
      if (P.src[g] != P.tgt[f]) continue;
      Idx gf = P.compose(g, f);
      REQUIRE(P.src[gf] == P.src[f]);
      REQUIRE(P.tgt[gf] == P.tgt[g]);
    }
  for (Idx a = 0; a < P.n_obj; ++a) {
    REQUIRE(P.identity[a] != kNone);
    REQUIRE(P.src[P.identity[a]] == a);
    REQUIRE(P.tgt[P.identity[a]] == a);
  }
}

void check_valid_space(const ConvergenceSpace& A) {
  auto rep = validate_space(A);
  INFO((rep.errors.empty() ? std::string("no errors") : rep.errors[0]));
  REQUIRE(rep.structure);
  REQUIRE(rep.outer_naturality);
  REQUIRE(rep.fiber_naturality);
  REQUIRE(rep.left_unit);
  REQUIRE(rep.right_unit);
  REQUIRE(rep.associativity);
  REQUIRE(rep.ok());
}

// The parity space: one point, two arrows everywhere, composition adds the
// outer arrow to the fiber arrow sitting at the outer family's base point.
ConvergenceSpace parity_space(int universe = 3, int n_points = 1) {
  ConvergenceSpace A;
  A.T = monad_instance(MonadName::ultrafilter);
  A.base = make_cat(discrete_category(n_points));
  A.universe = universe;
  A.fam = build_quotient_category(A.T, A.base, universe);
  A.index_families();
  const int nf = A.n_families();
  A.arrows.dom = A.fam.cat;
  A.arrows.cod = A.base;
  A.arrows.counts.assign(static_cast<size_t>(nf) * n_points, 2);
  A.arrows.lact_tab.resize(A.base->n_mor());
  for (Idx t = 0; t < A.base->n_mor(); ++t)
    A.arrows.lact_tab[t].assign(nf, {0, 1});
  A.arrows.ract_tab.assign(
      A.fam.cat->n_mor(),
      std::vector<std::vector<Idx>>(static_cast<size_t>(n_points), {0, 1}));
  A.id_arrow.assign(n_points, 0);
  for_each_composite_key(A, [&](const CompositeKey& k) {
    Idx x0 = A.fam.objects[k.fam].nu.point;
    A.comp[k] = (k.arrow + k.fibers[x0].second) % 2;
  });
  return A;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST_CASE("point-set enumerations have the known counts") {
  REQUIRE(all_topologies(1).size() == 1);
  REQUIRE(all_topologies(2).size() == 4);
  REQUIRE(all_topologies(3).size() == 29);
  REQUIRE(all_closure_operators(1).size() == 2);
  REQUIRE(all_closure_operators(2).size() == 7);
  REQUIRE(all_closure_operators(3).size() == 61);
}

TEST_CASE("topology validation rejects non-topologies") {
  REQUIRE(validate_topology(2, {{}, {0}, {1}, {0, 1}}).ok);
  REQUIRE_FALSE(validate_topology(2, {{0}, {0, 1}}).ok);    // no empty set
  REQUIRE_FALSE(validate_topology(2, {{}, {0}, {1}}).ok);   // no full set
  REQUIRE_FALSE(validate_topology(3, {{}, {0}, {1}, {0, 1, 2}}).ok);  // union
  REQUIRE_FALSE(validate_topology(2, {{}, {1, 0}, {0, 1}}).ok);  // unsorted
  REQUIRE_THROWS_AS(from_topology(2, {{0}, {0, 1}}), CheckError);
}

TEST_CASE("closure validation rejects non-closure operators") {
  // Identity operator is fine.
  std::vector<std::vector<Idx>> ident = {{}, {0}, {1}, {0, 1}};
  REQUIRE(validate_closure_operator(2, ident).ok);
  // Not extensive.
  REQUIRE_FALSE(validate_closure_operator(2, {{}, {}, {1}, {0, 1}}).ok);
  // Not monotone: cl({0}) = {0,1} but cl({0,1}) = {0,1} is fine; break with
  // cl(full) smaller than cl of a subset is impossible while extensive, so
  // break monotonicity via incomparable middles.
  REQUIRE_FALSE(
      validate_closure_operator(2, {{0, 1}, {0}, {1}, {0, 1}}).ok);
  // Not idempotent: cl{0} = {0,1} but cl{0,1} = {0,1,2}.
  std::vector<std::vector<Idx>> notidem = {
      {},        {0, 1},    {1, 2}, {0, 1, 2},
      {2},       {0, 1, 2}, {1, 2}, {0, 1, 2}};
  REQUIRE_FALSE(validate_closure_operator(3, notidem).ok);
  REQUIRE_THROWS_AS(from_closure_space(3, notidem), CheckError);
}

TEST_CASE("two-point topologies have the frozen arrow tables") {
  // Points 0 and 1; the open point of the two-point non-discrete,
  // non-indiscrete topology is 1.
  auto sierp = from_topology(2, {{}, {1}, {0, 1}});
  Idx e0 = sierp.eta_index(0), e1 = sierp.eta_index(1);
  CHECK(sierp.count(0, e0) == 1);  // 0 converges to itself
  CHECK(sierp.count(1, e1) == 1);  // 1 converges to itself
  CHECK(sierp.count(0, e1) == 1);  // the closed point sees the open one
  CHECK(sierp.count(1, e0) == 0);  // not conversely
  check_valid_space(sierp);
  auto tc = topological_character(sierp);
  CHECK(tc.discrete_points);
  CHECK(tc.thin);
  CHECK(tc.reflective);
  REQUIRE(tc.ok());

  auto discrete = from_topology(2, {{}, {0}, {1}, {0, 1}});
  for (Idx pt = 0; pt < 2; ++pt)
    for (Idx f = 0; f < discrete.n_families(); ++f) {
      const LObject& F = discrete.fam.objects[f];
      CHECK(discrete.count(pt, f) == (F.labels[F.nu.point] == pt ? 1 : 0));
    }
  check_valid_space(discrete);

  auto indiscrete = from_topology(2, {{}, {0, 1}});
  for (Idx pt = 0; pt < 2; ++pt)
    for (Idx f = 0; f < indiscrete.n_families(); ++f)
      CHECK(indiscrete.count(pt, f) == 1);
  check_valid_space(indiscrete);
  CHECK(count_keys(indiscrete) == static_cast<long long>(indiscrete.comp.size()));
}

TEST_CASE("every topology on at most two points validates and matches its specialization") {
  for (int n = 1; n <= 2; ++n)
    for (const auto& opens : all_topologies(n)) {
      auto A = from_topology(n, opens);
      check_valid_space(A);
      REQUIRE(topological_character(A).ok());
      check_points_match(A, point_arrows_of_opens(n, opens));
    }
}

TEST_CASE("sampled three-point topologies validate and match their specialization") {
  auto tops = all_topologies(3);
  REQUIRE(tops.size() == 29);
  // Indiscrete, discrete, and a few in between (the full sweep runs in the
  // acceptance suite).
  std::vector<size_t> picks = {0, tops.size() - 1, 7, 13, 21};
  for (size_t i : picks) {
    const auto& opens = tops[i];
    auto A = from_topology(3, opens);
    REQUIRE(A.n_families() == 102);
    check_valid_space(A);
    REQUIRE(topological_character(A).ok());
    check_points_match(A, point_arrows_of_opens(3, opens));
    CHECK(count_keys(A) == static_cast<long long>(A.comp.size()));
  }
}

TEST_CASE("every family is reindexing-isomorphic to the one-point family at its base label") {
  auto A = from_topology(2, {{}, {1}, {0, 1}});
  for (Idx f = 0; f < A.n_families(); ++f) {
    const LObject& F = A.fam.objects[f];
    Idx label = F.labels[F.nu.point];
    Idx e = A.eta_index(label);
    LMorphism down;  // F -> eta(label): the unit family's point maps to F's
    down.g = {F.nu.point};
    down.alpha = {A.base->identity[label]};
    Idx m = find_family_morphism(A, f, e, down);
    REQUIRE(A.fam.cat->is_iso(m));
    for (Idx pt = 0; pt < A.n_points(); ++pt)
      REQUIRE(A.count(pt, f) == A.count(pt, e));
  }
}

TEST_CASE("closure fixtures have the frozen arrow tables") {
  // Identity closure: only matching singletons converge; the family with an
  // empty minimal set reads cl of the empty set, which is empty.
  auto ident = from_closure_space(2, {{}, {0}, {1}, {0, 1}}, 2);
  Idx e0 = ident.eta_index(0), e1 = ident.eta_index(1);
  CHECK(ident.count(0, e0) == 1);
  CHECK(ident.count(1, e1) == 1);
  CHECK(ident.count(0, e1) == 0);
  CHECK(ident.count(1, e0) == 0);
  LObject improper;  // zero-size family: empty minimal set
  improper.nu = filter_elem({});
  Idx fi = ident.family_index(improper);
  CHECK(ident.count(0, fi) == 0);
  CHECK(ident.count(1, fi) == 0);
  check_valid_space(ident);

  // Everything closes to the full set: every family converges everywhere,
  // including the empty-minimal-set family.
  auto indis = from_closure_space(2, {{0, 1}, {0, 1}, {0, 1}, {0, 1}}, 2);
  for (Idx pt = 0; pt < 2; ++pt)
    for (Idx f = 0; f < indis.n_families(); ++f)
      CHECK(indis.count(pt, f) == 1);
  check_valid_space(indis);
  CHECK(count_keys(indis) == static_cast<long long>(indis.comp.size()));

  // cl({0}) = {0,1}: point 1 sees the one-point family at 0, not conversely.
  auto half = from_closure_space(2, {{}, {0, 1}, {1}, {0, 1}}, 2);
  CHECK(half.count(1, half.eta_index(0)) == 1);
  CHECK(half.count(0, half.eta_index(1)) == 0);
  check_valid_space(half);
  check_points_match(half, point_arrows_of_closure(2, {{}, {0, 1}, {1}, {0, 1}}));
}

TEST_CASE("every closure operator on at most two points validates and matches specialization") {
  for (int n = 1; n <= 2; ++n)
    for (const auto& cl : all_closure_operators(n)) {
      auto A = from_closure_space(n, cl, 2);
      check_valid_space(A);
      REQUIRE(topological_character(A).ok());
      check_points_match(A, point_arrows_of_closure(n, cl));
    }
}

TEST_CASE("sampled three-point closure operators validate at universe two") {
  auto ops = all_closure_operators(3);
  REQUIRE(ops.size() == 61);
  std::vector<size_t> picks = {0, ops.size() - 1, 11, 30, 47};
  for (size_t i : picks) {
    const auto& cl = ops[i];
    auto A = from_closure_space(3, cl, 2);
    check_valid_space(A);
    REQUIRE(topological_character(A).ok());
    check_points_match(A, point_arrows_of_closure(3, cl));
  }
}

TEST_CASE("tensor germs match hand-computed reindexings") {
  FinSetMonad T = monad_instance(MonadName::filter);
  CatPtr base = make_cat(discrete_category(1));

  // Outer family over two index points, both live; fibers of sizes 2 and 1.
  LObject outer;
  outer.labels = {0, 0};
  outer.nu = filter_elem({0, 1});
  LObject g0, g1, g0to;
  g0.labels = {0, 0};
  g0.nu = filter_elem({1});
  g1.labels = {0};
  g1.nu = filter_elem({0});
  g0to.labels = {0};
  g0to.nu = filter_elem({0});

  // Reindex fiber 0 along the germ sending the surviving point to index 1.
  LMorphism h0;
  h0.g = {1};
  h0.alpha = {base->identity[0]};
  LMorphism id1;
  id1.g = {0};
  id1.alpha = {base->identity[0]};
  LMorphism tg = tensor_id_gx(T, outer, {g0, g1}, {g0to, g1}, {h0, id1});
  // Target flatten has minimal set {0,1}; source positions are 1 and 2.
  REQUIRE(tg.g == std::vector<Idx>{1, 2});

  // Outer reindexing: collapse a two-point outer family onto one index point
  // with matched fibers.
  LObject outer2;
  outer2.labels = {0};
  outer2.nu = filter_elem({0});
  LMorphism tg2 = tensor_g_id(T, base, outer, {g0, g1}, outer2, {g0}, {0});
  // Target flatten = g0 with minimal set {1}; source block 0 holds g0.
  REQUIRE(tg2.g == std::vector<Idx>{1});
}

TEST_CASE("a two-valued arrow space composes by parity") {
  auto A = parity_space(3);
  REQUIRE(A.n_families() == 6);
  CHECK(count_keys(A) == static_cast<long long>(A.comp.size()));
  check_valid_space(A);

  SECTION("tampering one composite is caught by the laws") {
    auto B = A;
    // A non-unit key: outer family of size two, mixed fiber arrows.
    auto it = std::find_if(B.comp.begin(), B.comp.end(), [&](const auto& kv) {
      return B.family_size(kv.first.fam) == 2 && kv.first.fibers[0].second != kv.first.fibers[1].second;
    });
    REQUIRE(it != B.comp.end());
    it->second = 1 - it->second;
    auto rep = validate_space(B);
    REQUIRE(rep.structure);
    REQUIRE_FALSE(rep.ok());
    CHECK_FALSE(rep.associativity);
  }

  SECTION("a missing composition entry is a structure error") {
    auto B = A;
    B.comp.erase(B.comp.begin());
    auto rep = validate_space(B);
    REQUIRE_FALSE(rep.structure);
  }

  SECTION("a stray composition entry is a structure error") {
    auto B = A;
    CompositeKey k = B.comp.begin()->first;
    k.arrow = 5;  // no such arrow
    B.comp[k] = 0;
    auto rep = validate_space(B);
    REQUIRE_FALSE(rep.structure);
  }

  SECTION("a wrong unit arrow is caught by the unit laws") {
    auto B = A;
    B.id_arrow[0] = 1;  // in range, but not the neutral arrow
    auto rep = validate_space(B);
    REQUIRE(rep.structure);
    CHECK_FALSE(rep.left_unit);
    CHECK_FALSE(rep.right_unit);
    REQUIRE_FALSE(rep.ok());
  }
}

namespace {

void check_same_tables(const ConvergenceSpace& A, const ConvergenceSpace& B) {
  REQUIRE(A.universe == B.universe);
  REQUIRE(A.base->n_obj == B.base->n_obj);
  REQUIRE(A.arrows.counts == B.arrows.counts);
  REQUIRE(A.arrows.lact_tab == B.arrows.lact_tab);
  REQUIRE(A.arrows.ract_tab == B.arrows.ract_tab);
  REQUIRE(A.id_arrow == B.id_arrow);
  REQUIRE(A.comp == B.comp);
}

}  // namespace

TEST_CASE("algebra witnesses round-trip with spaces") {
  std::vector<ConvergenceSpace> fixtures;
  fixtures.push_back(from_topology(2, {{}, {1}, {0, 1}}));
  fixtures.push_back(from_closure_space(2, {{}, {0}, {1}, {0, 1}}, 2));
  fixtures.push_back(parity_space(3));
  for (const auto& A : fixtures) {
    auto w = to_lax_algebra(A);
    CHECK_FALSE(w.colax);
    CHECK_FALSE(w.invertible);
    REQUIRE(w.unitor() == A.id_arrow);
    REQUIRE(w.multiplicator() == A.comp);
    check_same_tables(from_lax_algebra(w), A);
  }
}

TEST_CASE("normalization rebases a space onto its point category") {
  auto A = from_topology(2, {{}, {1}, {0, 1}});
  // The discrete presentation is not normalized: there is an arrow from 0 to
  // the one-point family at 1 but no point morphism under it.
  REQUIRE_FALSE(is_normalized(to_lax_algebra(A)));
  auto w = normalize(A);
  REQUIRE(w.base->n_obj == 2);
  REQUIRE(w.base->n_mor() == 3);
  REQUIRE(is_normalized(w));
  REQUIRE(validate_profunctor(w.arrows).ok);
  REQUIRE_THROWS_AS(from_lax_algebra(w), CheckError);
  check_same_tables(discretize(w), A);
}

TEST_CASE("already-normalized presentations are recognized") {
  // Discrete-like spaces: arrows at one-point families match identities.
  CHECK(is_normalized(to_lax_algebra(from_topology(2, {{}, {0}, {1}, {0, 1}}))));
  CHECK(is_normalized(
      to_lax_algebra(from_closure_space(2, {{}, {0}, {1}, {0, 1}}, 2))));
  CHECK_FALSE(is_normalized(to_lax_algebra(from_topology(2, {{}, {0, 1}}))));
  CHECK_FALSE(is_normalized(to_lax_algebra(parity_space(3))));
}

TEST_CASE("normalizing the parity space yields a two-element endomorphism group") {
  auto A = parity_space(3);
  auto w = normalize(A);
  REQUIRE(w.base->n_obj == 1);
  REQUIRE(w.base->n_mor() == 2);
  const FinCategory& P = *w.base;
  Idx e = P.identity[0];
  Idx s = (e == 0) ? 1 : 0;
  REQUIRE(P.compose(s, s) == e);
  REQUIRE(is_normalized(w));
  REQUIRE(validate_profunctor(w.arrows).ok);
  check_same_tables(discretize(w), A);
  // The rebased family category carries a germ with the nontrivial point
  // component; its action shifts arrows by one.
  Idx e0 = w.eta_index(0);
  LMorphism rep;
  rep.g = {0};
  rep.alpha = {s};
  Idx m = find_family_morphism(w, e0, e0, rep);
  CHECK(w.arrows.ract(m, 0, 0) == 1);
  CHECK(w.arrows.ract(m, 0, 1) == 0);
}

TEST_CASE("breaking a witness multiplication entry breaks the naturality laws") {
  auto w = to_lax_algebra(parity_space(3));
  auto it = std::find_if(
      w.multiplicator().begin(), w.multiplicator().end(), [&](const auto& kv) {
        return w.family_size(kv.first.fam) == 2 &&
               kv.first.fibers[0].second != kv.first.fibers[1].second;
      });
  REQUIRE(it != w.multiplicator().end());
  it->second = 1 - it->second;
  auto rep = validate_space(from_lax_algebra(w));
  REQUIRE(rep.structure);
  CHECK_FALSE(rep.outer_naturality);
  CHECK_FALSE(rep.fiber_naturality);
  REQUIRE_FALSE(rep.ok());
}

namespace {

// Classical continuity between finite topological spaces: the preimage of
// every open set is open.
bool preimage_continuous(int n_src, const std::vector<std::vector<Idx>>& opens_src,
                         const std::vector<std::vector<Idx>>& opens_tgt,
                         const std::vector<Idx>& pm) {
  std::set<std::set<Idx>> open_sets;
  for (const auto& u : opens_src) open_sets.insert({u.begin(), u.end()});
  for (const auto& u : opens_tgt) {
    std::set<Idx> uu(u.begin(), u.end());
    std::set<Idx> pre;
    for (Idx x = 0; x < n_src; ++x)
      if (uu.count(pm[x])) pre.insert(x);
    if (!open_sets.count(pre)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("identity maps validate on every fixture") {
  std::vector<ConvergenceSpace> fixtures;
  fixtures.push_back(from_topology(2, {{}, {1}, {0, 1}}));
  fixtures.push_back(from_closure_space(2, {{}, {0, 1}, {1}, {0, 1}}, 2));
  fixtures.push_back(parity_space(3));
  for (const auto& A : fixtures) {
    auto rep = validate_continuous_map(A, A, identity_map(A));
    INFO((rep.errors.empty() ? std::string("no errors") : rep.errors.front()));
    REQUIRE(rep.ok());
    REQUIRE(rep.colax_unit);
    REQUIRE(rep.colax_composition);
    REQUIRE(rep.routes_agree);
  }
}

TEST_CASE("continuity agrees with open-preimage continuity on two points") {
  std::vector<std::vector<std::vector<Idx>>> tops = {
      {{}, {0, 1}},
      {{}, {1}, {0, 1}},
      {{}, {0}, {0, 1}},
      {{}, {0}, {1}, {0, 1}},
  };
  std::vector<ConvergenceSpace> spaces;
  for (const auto& t : tops) spaces.push_back(from_topology(2, t));
  std::vector<std::vector<Idx>> maps = {{0, 1}, {1, 0}, {0, 0}, {1, 1}};
  int continuous_count = 0;
  for (size_t i = 0; i < tops.size(); ++i)
    for (size_t j = 0; j < tops.size(); ++j)
      for (const auto& pm : maps) {
        bool classical = preimage_continuous(2, tops[i], tops[j], pm);
        bool existence = preserves_convergence(spaces[i], spaces[j], pm);
        bool structural = false;
        try {
          auto cm = continuous_map_from_base(spaces[i], spaces[j], pm);
          structural = validate_continuous_map(spaces[i], spaces[j], cm).ok();
        } catch (const CheckError&) {
          structural = false;
        }
        INFO("src=" << i << " tgt=" << j << " map=(" << pm[0] << pm[1] << ")");
        REQUIRE(existence == classical);
        REQUIRE(structural == classical);
        if (classical) ++continuous_count;
      }
  REQUIRE(continuous_count == 50);  // of the 64 candidate triples
}

TEST_CASE("continuous maps compose") {
  auto S = from_topology(2, {{}, {1}, {0, 1}});
  auto C3 = from_topology(3, {{}, {2}, {1, 2}, {0, 1, 2}});
  auto f = continuous_map_from_base(S, C3, {0, 2});
  auto h = continuous_map_from_base(C3, S, {0, 0, 1});
  REQUIRE(validate_continuous_map(S, C3, f).ok());
  REQUIRE(validate_continuous_map(C3, S, h).ok());
  auto hf = compose_maps(S, C3, S, h, f);
  REQUIRE(hf.point_map == std::vector<Idx>{0, 1});
  REQUIRE(validate_continuous_map(S, S, hf).ok());
}

TEST_CASE("maps that break convergence fail both routes") {
  auto S = from_topology(2, {{}, {1}, {0, 1}});
  std::vector<Idx> swap = {1, 0};
  REQUIRE_FALSE(preserves_convergence(S, S, swap));
  REQUIRE_THROWS_AS(continuous_map_from_base(S, S, swap), CheckError);
  // Hand-built arrow tables cannot rescue it: the required images are absent.
  ContinuousMap cm;
  cm.point_map = swap;
  cm.am.resize(S.n_families());
  for (Idx f = 0; f < S.n_families(); ++f) {
    cm.am[f].resize(S.n_points());
    for (Idx a = 0; a < S.n_points(); ++a)
      cm.am[f][a].assign(static_cast<size_t>(S.count(a, f)), 0);
  }
  auto rep = validate_continuous_map(S, S, cm);
  REQUIRE_FALSE(rep.structure);
  REQUIRE_FALSE(rep.ok());
}

TEST_CASE("negating every arrow preserves germs but breaks the unit laws") {
  auto A = parity_space(3);
  ContinuousMap cm = identity_map(A);
  for (auto& per_fam : cm.am)
    for (auto& tab : per_fam)
      for (auto& v : tab) v = 1 - v;
  auto rep = validate_continuous_map(A, A, cm);
  REQUIRE(rep.structure);
  CHECK(rep.germ_naturality);
  CHECK_FALSE(rep.unit_law);
  CHECK_FALSE(rep.composition_law);
  CHECK_FALSE(rep.colax_unit);
  CHECK_FALSE(rep.colax_composition);
  REQUIRE(rep.routes_agree);
  REQUIRE_FALSE(rep.ok());
}

TEST_CASE("transformations order the maps by specialization") {
  auto S = from_topology(2, {{}, {1}, {0, 1}});
  auto id = identity_map(S);
  auto c0 = continuous_map_from_base(S, S, {0, 0});
  auto c1 = continuous_map_from_base(S, S, {1, 1});
  Transformation tr;
  tr.at = {0, 0};
  // Point 1 lies in every open set, point 0 only in the total one: the
  // constant map at 1 dominates the identity, which dominates the constant
  // map at 0.
  REQUIRE(validate_transformation(S, S, id, c1, tr).ok());
  REQUIRE(validate_transformation(S, S, c0, id, tr).ok());
  REQUIRE(validate_transformation(S, S, c0, c1, tr).ok());
  REQUIRE_FALSE(validate_transformation(S, S, c1, id, tr).structure);
  REQUIRE_FALSE(validate_transformation(S, S, id, c0, tr).structure);
}

TEST_CASE("transformation routes agree on every parity candidate") {
  auto A = parity_space(2, 3);
  check_valid_space(A);
  auto id = identity_map(A);
  int valid = 0;
  for (int mask = 0; mask < 8; ++mask) {
    Transformation tr;
    tr.at = {Idx(mask & 1), Idx((mask >> 1) & 1), Idx((mask >> 2) & 1)};
    auto rep = validate_transformation(A, A, id, id, tr);
    REQUIRE(rep.structure);
    INFO("candidate mask " << mask);
    REQUIRE(rep.routes_agree);
    if (rep.ok()) ++valid;
  }
  // Exactly the two constant assignments commute with every composite.
  REQUIRE(valid == 2);
}

TEST_CASE("point categories compose through the composition table") {
  // Chain topology on three points: opens are upward-closed sets of
  // 0 <= 1 <= 2 in the specialization order induced below.
  auto A = from_topology(3, {{}, {2}, {1, 2}, {0, 1, 2}});
  check_points_match(A, point_arrows_of_opens(3, {{}, {2}, {1, 2}, {0, 1, 2}}));
  FinCategory P = category_of_points(A);
  // 0 -> 1 -> 2 composes to 0 -> 2.
  REQUIRE(P.hom(0, 1).size() == 1);
  REQUIRE(P.hom(1, 2).size() == 1);
  REQUIRE(P.hom(0, 2).size() == 1);
  REQUIRE(P.compose(P.hom(1, 2)[0], P.hom(0, 1)[0]) == P.hom(0, 2)[0]);
}

// ---------------------------------------------------------------------------
// Pseudoalgebra validation and representability

namespace {

LaxAlgebraWitness collapse_witness(const CatPtr& C, int universe = 3) {
  auto T = monad_instance(MonadName::ultrafilter);
  auto fam = build_quotient_category(T, C, universe, 200000);
  Functor phi = collapse_functor(fam, C);
  REQUIRE(validate_functor(phi).ok);
  return representable_from_pseudoalgebra(T, fam, phi, universe);
}

}  // namespace

TEST_CASE("collapse pseudoalgebras validate on small categories") {
  std::vector<std::pair<std::string, FinCategory>> cats;
  cats.emplace_back("discrete2", discrete_category(2));
  cats.emplace_back("chain3", testing::chain3());
  cats.emplace_back("z2", testing::z2_monoid());
  cats.emplace_back("walking_iso", testing::walking_iso());
  cats.emplace_back("parallel_pair", testing::parallel_pair());
  for (auto& [name, cat] : cats) {
    INFO("category " << name);
    auto C = make_cat(cat);
    auto w = collapse_witness(C);
    auto rep = validate_pseudoalgebra(w);
    INFO((rep.errors.empty() ? std::string("no errors") : rep.errors.front()));
    REQUIRE(rep.structure);
    REQUIRE(rep.unitor_invertible);
    REQUIRE(rep.multiplicator_invertible);
    REQUIRE(rep.components > 0);
    // The underlying space over the bare points is a valid space.
    auto space = discretize(w);
    auto sv = validate_space(space);
    INFO((sv.errors.empty() ? std::string("no errors") : sv.errors.front()));
    REQUIRE(sv.ok());
    // The witness is recognized as representable, by its own collapse.
    auto rr = is_representable(w);
    INFO(rr.reason);
    REQUIRE(rr.representable);
  }
}

TEST_CASE("the collapse of a discrete category is the discrete topology") {
  auto C = make_cat(discrete_category(2));
  auto w = collapse_witness(C);
  auto S = from_topology(2, {{}, {0}, {1}, {0, 1}});
  REQUIRE(same_category(*w.base, *S.base));
  check_same_tables(w, S);
}

TEST_CASE("pseudoalgebra validation separates lax structures from pseudo ones") {
  // Sierpinski space over bare points: the one-point family at 1 converges
  // to both points, so two gluing classes hit one composite arrow.
  auto S = from_topology(2, {{}, {1}, {0, 1}});
  auto lax = validate_pseudoalgebra(to_lax_algebra(S));
  REQUIRE(lax.structure);
  REQUIRE(lax.unitor_invertible);
  REQUIRE_FALSE(lax.multiplicator_invertible);
  // Rebasing onto the point category makes the comparison invertible.
  auto norm = validate_pseudoalgebra(normalize(S));
  INFO((norm.errors.empty() ? std::string("no errors") : norm.errors.front()));
  REQUIRE(norm.ok());

  // The parity space composes by addition: over a bare point the four unit
  // decompositions stay separate, over its endomorphism group they glue
  // into the two composite arrows.
  auto P = parity_space(3);
  auto plax = validate_pseudoalgebra(to_lax_algebra(P));
  REQUIRE(plax.structure);
  REQUIRE(plax.unitor_invertible);
  REQUIRE_FALSE(plax.multiplicator_invertible);
  auto pnorm = validate_pseudoalgebra(normalize(P));
  INFO((pnorm.errors.empty() ? std::string("no errors") : pnorm.errors.front()));
  REQUIRE(pnorm.ok());

  // Forgetting the point morphisms of the collapse witness keeps a valid
  // space but destroys invertibility.
  auto wz = collapse_witness(make_cat(testing::z2_monoid()));
  REQUIRE(validate_pseudoalgebra(wz).ok());
  auto dz = discretize(wz);
  REQUIRE(validate_space(dz).ok());
  auto dlax = validate_pseudoalgebra(to_lax_algebra(dz));
  REQUIRE(dlax.structure);
  REQUIRE(dlax.unitor_invertible);
  REQUIRE_FALSE(dlax.multiplicator_invertible);
}

TEST_CASE("representability reports name the obstruction") {
  auto S = from_topology(2, {{}, {1}, {0, 1}});
  auto rs = is_representable(S);
  REQUIRE_FALSE(rs.representable);
  REQUIRE(rs.universe == 3);
  INFO(rs.reason);
  REQUIRE(rs.reason.find("distinct points") != std::string::npos);

  // The indiscrete space is not representable over bare points but becomes
  // representable over its point category, where every family collapses to
  // its principal label.
  auto I = from_topology(2, {{}, {0, 1}});
  REQUIRE_FALSE(is_representable(I).representable);
  auto rn = is_representable(normalize(I));
  INFO(rn.reason);
  REQUIRE(rn.representable);

  auto P = parity_space(3);
  REQUIRE_FALSE(is_representable(P).representable);
  auto rp = is_representable(normalize(P));
  INFO(rp.reason);
  REQUIRE(rp.representable);
  // The recovered structure functor is the collapse onto the base.
  REQUIRE(validate_functor(rp.functor).ok);
}
