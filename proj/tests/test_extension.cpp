#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "bicat/extension.hpp"
#include "bicat/fincat.hpp"
#include "bicat/loke.hpp"
#include "bicat/monads.hpp"
#include "bicat/profunctor.hpp"
#include "test_support.hpp"

using namespace bicat;
using namespace bicat::testing;

namespace {

std::vector<FinSetMonad> all_monads() {
  return {monad_instance(MonadName::powerset),
          monad_instance(MonadName::distribution),
          monad_instance(MonadName::filter),
          monad_instance(MonadName::ultrafilter)};
}

// Independent oracle for the classical lifting of a relation to subsets:
// S_A and S_B are related iff every point of S_A sees some point of S_B
// through R and every point of S_B is seen from some point of S_A.
bool egli_milner(const std::vector<std::pair<Idx, Idx>>& R,
                 const std::vector<Idx>& sa, const std::vector<Idx>& sb) {
  auto related = [&](Idx a, Idx b) {
    return std::find(R.begin(), R.end(), std::make_pair(a, b)) != R.end();
  };
  for (Idx a : sa) {
    bool hit = false;
    for (Idx b : sb) hit = hit || related(a, b);
    if (!hit) return false;
  }
  for (Idx b : sb) {
    bool hit = false;
    for (Idx a : sa) hit = hit || related(a, b);
    if (!hit) return false;
  }
  return true;
}

std::vector<std::vector<std::pair<Idx, Idx>>> all_relations(int na, int nb) {
  std::vector<std::pair<Idx, Idx>> cells;
  for (Idx a = 0; a < na; ++a)
    for (Idx b = 0; b < nb; ++b) cells.push_back({a, b});
  std::vector<std::vector<std::pair<Idx, Idx>>> out;
  for (int mask = 0; mask < (1 << cells.size()); ++mask) {
    std::vector<std::pair<Idx, Idx>> R;
    for (size_t i = 0; i < cells.size(); ++i)
      if (mask & (1 << i)) R.push_back(cells[i]);
    out.push_back(R);
  }
  return out;
}

}  // namespace

TEST_CASE("terminal hom-extension has one class at unit pairs") {
  auto term = make_cat(terminal_category());
  Profunctor I = identity_profunctor(term);
  for (const auto& T : all_monads()) {
    INFO("monad " << T.str());
    LObject e = eta_obj(T, 0);
    ExtensionClasses cls = extend_profunctor(T, I, e, e);
    CHECK(cls.n_classes() == 1);
    CHECK(stabilization_check(T, I, e, e, 1, 2));
  }
}

TEST_CASE("powerset singleton relation extends to the frozen support pairs") {
  auto pw = monad_instance(MonadName::powerset);
  // R = {(a1, b)} inside {a1, a2} x {b}.
  auto lift = barr_relational_lift(pw, 2, 1, {{0, 0}});
  std::vector<std::pair<TElem, TElem>> want = {
      {pw_elem({}), pw_elem({})}, {pw_elem({0}), pw_elem({0})}};
  REQUIRE(lift.size() == 2);
  CHECK(std::is_permutation(lift.begin(), lift.end(), want.begin()));
}

TEST_CASE("powerset lift equals the two-sided covering formula") {
  auto pw = monad_instance(MonadName::powerset);
  for (int na = 1; na <= 2; ++na)
    for (int nb = 1; nb <= 2; ++nb)
      for (const auto& R : all_relations(na, nb)) {
        auto lift = barr_relational_lift(pw, na, nb, R);
        std::set<std::pair<std::vector<Idx>, std::vector<Idx>>> got;
        for (auto& [ta, tb] : lift) got.insert({ta.set, tb.set});
        for (const auto& sa : all_subsets(na))
          for (const auto& sb : all_subsets(nb)) {
            INFO("na=" << na << " nb=" << nb << " |R|=" << R.size());
            CHECK(egli_milner(R, sa, sb) == (got.count({sa, sb}) > 0));
          }
      }
}

TEST_CASE("identity relations lift to the diagonal on every carrier") {
  for (const auto& T : all_monads()) {
    INFO("monad " << T.str());
    std::vector<std::pair<Idx, Idx>> id_rel = {{0, 0}, {1, 1}};
    auto lift = barr_relational_lift(T, 2, 2, id_rel);
    auto carrier = T.carrier(2);
    REQUIRE(lift.size() == carrier.size());
    for (auto& [ta, tb] : lift) CHECK(ta == tb);
  }
}

TEST_CASE("ultrafilter lift transports relations along the principal bijection") {
  auto ult = monad_instance(MonadName::ultrafilter);
  for (int na = 1; na <= 2; ++na)
    for (int nb = 1; nb <= 2; ++nb)
      for (const auto& R : all_relations(na, nb)) {
        auto lift = barr_relational_lift(ult, na, nb, R);
        std::vector<std::pair<Idx, Idx>> back;
        for (auto& [ta, tb] : lift) back.push_back({ta.point, tb.point});
        std::sort(back.begin(), back.end());
        auto want = R;
        std::sort(want.begin(), want.end());
        INFO("na=" << na << " nb=" << nb);
        CHECK(back == want);
      }
}

TEST_CASE("every ultrafilter extension class has a singleton witness") {
  auto ult = monad_instance(MonadName::ultrafilter);
  Profunctor F = profunctor_from_relation(3, 2, {{0, 0}, {1, 0}, {2, 1}, {0, 1}});
  ExtensionContext ctx = make_extension_context(ult, F);
  for (Idx x = 0; x < 3; ++x)
    for (Idx y = 0; y < 2; ++y) {
      LObject a = lobject_of_support(ultra_elem(y));
      LObject b = lobject_of_support(ultra_elem(x));
      ExtensionClasses cls = extend_at(ctx, a, b);
      for (Idx cl = 0; cl < cls.n_classes(); ++cl) {
        bool has_singleton = false;
        for (size_t n = 0; n < cls.nodes.size(); ++n)
          if (cls.class_of[n] == cl && cls.nodes[n].witness.size() == 1)
            has_singleton = true;
        INFO("pair (@" << x << ",@" << y << ") class " << cl);
        CHECK(has_singleton);
      }
      // Principal data stabilizes from the smallest legal bound.
      CHECK(stabilization_check(ult, F, a, b, 1, 3));
    }
}

TEST_CASE("hom-extension classes match quotient hom-sets pointwise") {
  for (auto base : {make_cat(walking_arrow()), make_cat(chain3())}) {
    Profunctor I = identity_profunctor(base);
    for (const auto& T : all_monads()) {
      ExtensionContext ctx = make_extension_context(T, I);
      std::vector<LObject> objs;
      for (Idx c = 0; c < base->n_obj; ++c) objs.push_back(eta_obj(T, c));
      {  // one two-index object per monad
        LObject two;
        two.labels = {0, base->n_obj - 1};
        auto carrier2 = T.carrier(2);
        two.nu = carrier2.back();
        objs.push_back(two);
      }
      for (const auto& a : objs)
        for (const auto& b : objs) {
          ExtensionClasses cls = extend_at(ctx, a, b);
          auto qh = quotient_hom_set(T, *base, a, b);
          INFO("monad " << T.str() << " |a|=" << a.size() << " |b|=" << b.size());
          CHECK(cls.n_classes() == static_cast<int>(qh.size()));
        }
    }
  }
}

TEST_CASE("extension classes are deterministic across contexts") {
  auto pw = monad_instance(MonadName::powerset);
  Profunctor F = profunctor_from_relation(2, 2, {{0, 0}, {1, 0}, {1, 1}});
  ExtensionContext c1 = make_extension_context(pw, F);
  ExtensionContext c2 = make_extension_context(pw, F);
  LObject a = lobject_of_support(pw_elem({0, 1}));
  LObject b = lobject_of_support(pw_elem({0, 1}));
  ExtensionClasses e1 = extend_at(c1, a, b);
  ExtensionClasses e2 = extend_at(c2, a, b);
  CHECK(e1.nodes == e2.nodes);
  CHECK(e1.class_of == e2.class_of);
  CHECK(e1.reps == e2.reps);
  // Repeat with the memoized context already warm.
  ExtensionClasses e3 = extend_at(c1, a, b);
  CHECK(e3.nodes == e1.nodes);
  CHECK(e3.class_of == e1.class_of);
}

TEST_CASE("bound and budget guards reject bad queries") {
  auto pw = monad_instance(MonadName::powerset);
  Profunctor F = profunctor_from_relation(2, 2, {{0, 0}, {1, 1}});
  LObject a = lobject_of_support(pw_elem({0, 1}));
  LObject b = lobject_of_support(pw_elem({0, 1}));
  CHECK_THROWS_AS(extend_profunctor(pw, F, a, b, 1), CheckError);
  CHECK_THROWS_AS(stabilization_check(pw, F, a, b, 3, 3), CheckError);
  ExtensionContext tiny = make_extension_context(pw, F, kNone,
                                                 ExtensionFlavor::quotient, 2);
  CHECK_THROWS_AS(extend_at(tiny, a, b), CheckError);
}

TEST_CASE("class sets stabilize from the index-size bound on random data") {
  auto rng = make_rng(1201);
  auto monads = all_monads();
  int runs = 0;
  while (runs < 100) {
    const auto& T = monads[runs % monads.size()];
    int na = rand_int(rng, 1, 3), nb = rand_int(rng, 1, 3);
    std::vector<std::pair<Idx, Idx>> R;
    for (Idx a = 0; a < na; ++a)
      for (Idx b = 0; b < nb; ++b)
        if (rand_int(rng, 0, 1)) R.push_back({a, b});
    Profunctor F = profunctor_from_relation(na, nb, R);
    auto ca = T.carrier(na), cb = T.carrier(nb);
    if (ca.empty() || cb.empty()) continue;
    LObject a = lobject_of_support(cb[rand_int(rng, 0, (int)cb.size() - 1)]);
    LObject b = lobject_of_support(ca[rand_int(rng, 0, (int)ca.size() - 1)]);
    int b0 = std::max(a.size(), b.size());
    INFO("monad " << T.str() << " na=" << na << " nb=" << nb
                  << " |R|=" << R.size() << " b0=" << b0);
    CHECK(stabilization_check(T, F, a, b, b0, b0 + 2));
    ++runs;
  }
}

TEST_CASE("powerset extensions stabilize by bound four on two-point data") {
  auto pw = monad_instance(MonadName::powerset);
  for (const auto& R : all_relations(2, 2)) {
    Profunctor F = profunctor_from_relation(2, 2, R);
    LObject a = lobject_of_element(pw_elem({0, 1}), 2);
    LObject b = lobject_of_element(pw_elem({0}), 2);
    INFO("|R|=" << R.size());
    CHECK(stabilization_check(pw, F, a, b, 4, 6));
  }
}

TEST_CASE("support and identity encodings agree on inhabitation") {
  auto pw = monad_instance(MonadName::powerset);
  for (const auto& R : all_relations(2, 2)) {
    Profunctor F = profunctor_from_relation(2, 2, R);
    ExtensionContext ctx = make_extension_context(pw, F);
    for (const auto& sa : all_subsets(2))
      for (const auto& sb : all_subsets(2)) {
        TElem ta = pw_elem(sa), tb = pw_elem(sb);
        ExtensionClasses via_support =
            extend_at(ctx, lobject_of_support(tb), lobject_of_support(ta));
        ExtensionClasses via_identity = extend_at(
            ctx, lobject_of_element(tb, 2), lobject_of_element(ta, 2));
        INFO("|R|=" << R.size() << " |sa|=" << sa.size() << " |sb|=" << sb.size());
        CHECK((via_support.n_classes() > 0) == (via_identity.n_classes() > 0));
      }
  }
}

TEST_CASE("identity transformations act as the identity on classes") {
  auto fil = monad_instance(MonadName::filter);
  Profunctor F = profunctor_from_relation(2, 2, {{0, 0}, {1, 0}, {1, 1}});
  ProfNatTrans id = identity_prof_nattrans(F);
  ExtensionContext c1 = make_extension_context(fil, F);
  ExtensionContext c2 = make_extension_context(fil, F);
  for (const auto& sa : {std::vector<Idx>{0}, std::vector<Idx>{0, 1}}) {
    LObject a = lobject_of_support(filter_elem(sa));
    LObject b = lobject_of_support(filter_elem({0, 1}));
    auto img = extend_nattrans(c1, c2, id, a, b);
    for (size_t i = 0; i < img.size(); ++i) CHECK(img[i] == static_cast<Idx>(i));
  }
}

TEST_CASE("invertible transformations act as bijections on classes") {
  auto pw = monad_instance(MonadName::powerset);
  // A two-element fiber over the single object pair, with the swap map.
  Profunctor F;
  F.dom = make_cat(discrete_category(1));
  F.cod = make_cat(discrete_category(1));
  F.counts = {2};
  F.lact_tab = {{{0, 1}}};
  F.ract_tab = {{{0, 1}}};
  REQUIRE(validate_profunctor(F).ok);
  ProfNatTrans swp;
  swp.dom = F;
  swp.cod = F;
  swp.comp = {{1, 0}};
  REQUIRE(validate_prof_nattrans(swp).ok);
  REQUIRE(is_iso_prof_nattrans(swp));

  ExtensionContext c1 = make_extension_context(pw, F);
  ExtensionContext c2 = make_extension_context(pw, F);
  LObject a = lobject_of_support(pw_elem({0}));
  LObject b = lobject_of_support(pw_elem({0}));
  ExtensionClasses cls = extend_at(c1, a, b);
  REQUIRE(cls.n_classes() == 2);

  auto img = extend_nattrans(c1, c2, swp, a, b);
  std::vector<bool> seen(img.size(), false);
  for (Idx i : img) {
    REQUIRE(i >= 0);
    REQUIRE(i < static_cast<Idx>(img.size()));
    CHECK_FALSE(seen[i]);
    seen[i] = true;
  }
  // Vertical composition: applying the swap twice equals the identity action.
  auto img_id = extend_nattrans(c1, c2, identity_prof_nattrans(F), a, b);
  std::vector<Idx> twice(img.size());
  for (size_t i = 0; i < img.size(); ++i) twice[i] = img[img[i]];
  CHECK(twice == img_id);
  // And it matches the action of the composed transformation.
  auto img_comp = extend_nattrans(c1, c2, vertical_compose(swp, swp), a, b);
  CHECK(twice == img_comp);
}

TEST_CASE("hom extension materializes to the identity profunctor") {
  auto term = make_cat(terminal_category());
  auto arrow = make_cat(walking_arrow());
  for (const auto& T : all_monads()) {
    INFO("monad " << T.str());
    CHECK(extension_preserves_hom(T, term, 1));
    CHECK(extension_preserves_hom(T, arrow, 1));
  }
  CHECK(extension_preserves_hom(monad_instance(MonadName::powerset), term, 2));
}

TEST_CASE("graph extension matches the graph of the quotient functor") {
  auto arrow = make_cat(walking_arrow());
  auto term = make_cat(terminal_category());
  auto d1 = make_cat(discrete_category(1));

  Functor point0;  // picks out the source of the arrow
  point0.dom = d1;
  point0.cod = arrow;
  point0.obj_map = {0};
  point0.mor_map = {arrow->identity[0]};

  Functor collapse;  // unique functor to the terminal category
  collapse.dom = arrow;
  collapse.cod = term;
  collapse.obj_map = {0, 0};
  collapse.mor_map = {0, 0, 0};
  REQUIRE(validate_functor(collapse).ok);

  for (const auto& T : all_monads()) {
    INFO("monad " << T.str());
    CHECK(extension_preserves_graph(T, point0, 1));
    CHECK(extension_preserves_graph(T, collapse, 1));
  }
}

TEST_CASE("composition of extensions matches extension of composites") {
  Profunctor phi = profunctor_from_relation(2, 2, {{0, 0}, {1, 0}, {1, 1}});
  Profunctor psi = profunctor_from_relation(2, 2, {{0, 1}, {1, 1}});
  for (const auto& T : all_monads()) {
    INFO("monad " << T.str() << " on composed relations");
    CHECK(extension_preserves_composition(T, psi, phi, 1));
  }
  // A non-discrete pair: the graph and cograph of a functor compose to a
  // profunctor on the walking arrow.
  auto arrow = make_cat(walking_arrow());
  auto d1 = make_cat(discrete_category(1));
  Functor point0;
  point0.dom = d1;
  point0.cod = arrow;
  point0.obj_map = {0};
  point0.mor_map = {arrow->identity[0]};
  auto ult = monad_instance(MonadName::ultrafilter);
  CHECK(extension_preserves_composition(ult, representable_cograph(point0),
                                        representable_graph(point0), 1));
}
