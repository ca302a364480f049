#include <catch2/catch_amalgamated.hpp>

#include "bicat/fincat.hpp"
#include "test_support.hpp"

using namespace bicat;
using namespace bicat::testing;

TEST_CASE("terminal category validates") {
  FinCategory c = terminal_category();
  REQUIRE(c.n_obj == 1);
  REQUIRE(c.n_mor() == 1);
  REQUIRE(validate_category(c).ok);
}

TEST_CASE("walking arrow validates and has three morphisms") {
  FinCategory c = walking_arrow();
  REQUIRE(c.n_obj == 2);
  REQUIRE(c.n_mor() == 3);
  REQUIRE(validate_category(c).ok);
  REQUIRE(c.hom(0, 1).size() == 1);
  REQUIRE(c.hom(1, 0).empty());
}

TEST_CASE("fixture categories all validate") {
  for (const auto& c : category_pool()) REQUIRE(validate_category(*c).ok);
}

TEST_CASE("broken composition table is rejected") {
  FinCategory c = chain3();
  // Corrupt one composite: redirect (1<=2).(0<=1) to the identity of 0's image.
  Idx f01 = c.hom(0, 1)[0], f12 = c.hom(1, 2)[0];
  c.comp_table[static_cast<size_t>(f12) * c.n_mor() + f01] = c.identity[2];
  REQUIRE_FALSE(validate_category(c).ok);

  FinCategory d = z2_monoid();
  // Breaking s.s = 1 to s.s = s destroys nothing structural but the inverse
  // law; it is still a category (the walking idempotent), so validation holds.
  Idx s = 1;
  d.comp_table[static_cast<size_t>(s) * d.n_mor() + s] = s;
  REQUIRE(validate_category(d).ok);
  // But breaking associativity is caught: s.(s.s) vs (s.s).s differ if we
  // corrupt only one unit composite.
  FinCategory e = z2_monoid();
  e.comp_table[static_cast<size_t>(1) * e.n_mor() + 0] = 1;  // s . 1 := s (fine)
  e.comp_table[static_cast<size_t>(0) * e.n_mor() + 1] = 0;  // 1 . s := 1 (broken unit)
  REQUIRE_FALSE(validate_category(e).ok);
}

TEST_CASE("opposite category validates and flips homs") {
  FinCategory c = chain3();
  FinCategory o = opposite_category(c);
  REQUIRE(validate_category(o).ok);
  REQUIRE(o.hom(2, 0).size() == 1);
  REQUIRE(o.hom(0, 2).empty());
}

TEST_CASE("comma category of discrete cospans is the pullback set") {
  // f : B -> C and g : A -> C between discrete categories; the comma category
  // is then the discrete category on pairs (b, a) with f(b) = g(a).
  auto A = make_cat(discrete_category(3));
  auto B = make_cat(discrete_category(2));
  auto C = make_cat(discrete_category(2));
  Functor f;  // b0, b1 -> c0, c1
  f.dom = B;
  f.cod = C;
  f.obj_map = {0, 1};
  f.mor_map = {0, 1};
  Functor g;  // a0 -> c0, a1 -> c0, a2 -> c1
  g.dom = A;
  g.cod = C;
  g.obj_map = {0, 0, 1};
  g.mor_map = {0, 0, 1};
  CommaResult k = comma_category(f, g);
  REQUIRE(validate_category(*k.cat).ok);
  REQUIRE(k.cat->n_obj == 3);  // (b0,a0), (b0,a1), (b1,a2)
  REQUIRE(k.cat->n_mor() == 3);
  std::set<std::pair<Idx, Idx>> pairs;
  for (auto& [b, a, m] : k.obj_data) {
    (void)m;
    pairs.insert({b, a});
  }
  REQUIRE(pairs == std::set<std::pair<Idx, Idx>>{{0, 0}, {0, 1}, {1, 2}});
}

TEST_CASE("comma of identities on the walking arrow is its arrow category") {
  auto two = make_cat(walking_arrow());
  Functor id2 = identity_functor(two);
  CommaResult k = comma_category(id2, id2);
  REQUIRE(validate_category(*k.cat).ok);
  REQUIRE(k.cat->n_obj == 3);  // morphisms of the walking arrow
  REQUIRE(validate_functor(k.dom_leg).ok);
  REQUIRE(validate_functor(k.cod_leg).ok);
  REQUIRE(validate_nattrans(k.canonical).ok);
}

TEST_CASE("comma projections and canonical 2-cell are well formed on samples") {
  auto rng = make_rng(101);
  auto pool = category_pool();
  int built = 0;
  for (int trial = 0; trial < 40; ++trial) {
    CatPtr A = pool[rand_int(rng, 0, static_cast<int>(pool.size()) - 1)];
    CatPtr B = pool[rand_int(rng, 0, static_cast<int>(pool.size()) - 1)];
    CatPtr C = pool[rand_int(rng, 0, static_cast<int>(pool.size()) - 1)];
    auto f = sample_functor(rng, B, C);
    auto g = sample_functor(rng, A, C);
    if (!f || !g) continue;
    CommaResult k = comma_category(*f, *g);
    REQUIRE(validate_category(*k.cat).ok);
    REQUIRE(validate_functor(k.dom_leg).ok);
    REQUIRE(validate_functor(k.cod_leg).ok);
    REQUIRE(validate_nattrans(k.canonical).ok);
    ++built;
  }
  REQUIRE(built >= 20);
}

TEST_CASE("comma category satisfies the strict universal property on test cones") {
  auto rng = make_rng(102);
  auto pool = category_pool();
  int checked = 0;
  for (int trial = 0; trial < 25 && checked < 10; ++trial) {
    CatPtr A = pool[rand_int(rng, 0, static_cast<int>(pool.size()) - 1)];
    CatPtr B = pool[rand_int(rng, 0, static_cast<int>(pool.size()) - 1)];
    CatPtr C = pool[rand_int(rng, 0, static_cast<int>(pool.size()) - 1)];
    auto f = sample_functor(rng, B, C);
    auto g = sample_functor(rng, A, C);
    if (!f || !g) continue;
    CommaResult k = comma_category(*f, *g);

    // Probe competitors from every category in a small probe set.
    for (CatPtr X : {make_cat(terminal_category()), make_cat(walking_arrow())}) {
      for (const Functor& q : all_functors(X, B)) {
        for (const Functor& p : all_functors(X, A)) {
          for (const NatTrans& theta :
               all_nattrans(compose_functors(*f, q), compose_functors(*g, p))) {
            auto u = factor_through_comma(k, *f, *g, p, q, theta);
            REQUIRE(u.has_value());
            REQUIRE(validate_functor(*u).ok);
            // The factorization recovers the competitor.
            Functor dq = compose_functors(k.dom_leg, *u);
            Functor cp = compose_functors(k.cod_leg, *u);
            REQUIRE(dq.obj_map == q.obj_map);
            REQUIRE(dq.mor_map == q.mor_map);
            REQUIRE(cp.obj_map == p.obj_map);
            REQUIRE(cp.mor_map == p.mor_map);
            for (Idx x = 0; x < X->n_obj; ++x)
              REQUIRE(k.canonical.component[u->obj_map[x]] == theta.component[x]);
            // Uniqueness: any functor satisfying the equations has the same
            // object/morphism tables, since both are forced pointwise.
            ++checked;
          }
        }
      }
    }
  }
  REQUIRE(checked >= 10);
}

TEST_CASE("pseudopullback keeps exactly the invertible-component objects") {
  // Cospan: walking arrow -> walking arrow <- terminal picking object 1.
  auto two = make_cat(walking_arrow());
  auto one = make_cat(terminal_category());
  Functor f = identity_functor(two);
  Functor g;
  g.dom = one;
  g.cod = two;
  g.obj_map = {1};
  g.mor_map = {two->identity[1]};
  CommaResult k = comma_category(f, g);
  PseudopullbackResult pp = pseudopullback(f, g);
  REQUIRE(validate_category(*pp.cat).ok);
  // Comma objects: (0, *, 0->1) and (1, *, id1). Only id1 is invertible.
  REQUIRE(k.cat->n_obj == 2);
  REQUIRE(pp.cat->n_obj == 1);
  REQUIRE(validate_nattrans(pp.canonical).ok);

  // With the walking iso as cospan target every component is invertible and
  // the pseudopullback coincides with the comma.
  auto iso = make_cat(walking_iso());
  Functor fi = identity_functor(iso);
  CommaResult k2 = comma_category(fi, fi);
  PseudopullbackResult pp2 = pseudopullback(fi, fi);
  REQUIRE(pp2.cat->n_obj == k2.cat->n_obj);
  REQUIRE(categories_isomorphic(*pp2.cat, *k2.cat));
}

TEST_CASE("category isomorphism search distinguishes small categories") {
  REQUIRE(categories_isomorphic(walking_arrow(), walking_arrow()));
  REQUIRE_FALSE(categories_isomorphic(walking_arrow(), discrete_category(2)));
  REQUIRE_FALSE(categories_isomorphic(z2_monoid(), walking_idempotent()));
  REQUIRE(categories_isomorphic(z2_monoid(), z2_monoid()));
  // Renamed copy.
  FinCategory c = chain3();
  FinCategory d = chain3();
  std::swap(d.obj_names[0], d.obj_names[2]);
  REQUIRE(categories_isomorphic(c, d));
}

TEST_CASE("functor property predicates behave on known examples") {
  auto two = make_cat(walking_arrow());
  auto disc = make_cat(discrete_category(2));
  Functor e;  // identity on objects, discrete -> walking arrow
  e.dom = disc;
  e.cod = two;
  e.obj_map = {0, 1};
  e.mor_map = {two->identity[0], two->identity[1]};
  REQUIRE(validate_functor(e).ok);
  REQUIRE(is_essentially_surjective(e));
  REQUIRE_FALSE(is_full(e));
  REQUIRE_FALSE(is_fully_faithful(e));

  Functor point;  // terminal -> walking arrow at object 0
  point.dom = make_cat(terminal_category());
  point.cod = two;
  point.obj_map = {0};
  point.mor_map = {two->identity[0]};
  REQUIRE(is_fully_faithful(point));
  REQUIRE_FALSE(is_essentially_surjective(point));
}

TEST_CASE("thin categories from random preorders validate") {
  auto rng = make_rng(103);
  for (int t = 0; t < 50; ++t) {
    auto leq = random_preorder(rng, rand_int(rng, 1, 4));
    REQUIRE(validate_category(thin_from_preorder(leq)).ok);
  }
}
