#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "stackcheck/core/equivalence.hpp"
#include "stackcheck/core/errors.hpp"
#include "stackcheck/harness/finset.hpp"
#include "stackcheck/homotopy/descent_data.hpp"
#include "stackcheck/homotopy/domain_range.hpp"
#include "stackcheck/homotopy/local.hpp"
#include "stackcheck/homotopy/stack.hpp"
#include "stackcheck/homotopy/weak_equivalence.hpp"
#include "stackcheck/psh/cech.hpp"
#include "stackcheck/psh/groupoid_object.hpp"
#include "stackcheck/site/set_presheaf.hpp"
#include "zoo.hpp"

namespace {

using namespace stackcheck;

/// Three-object poset V < U < X.
CategoryData chain_vux() {
  CategoryData raw;
  raw.object_names = {"V", "U", "X"};
  raw.morphism_names = {"idV", "idU", "idX", "v", "u", "uv"};
  raw.dom = {0, 1, 2, 0, 1, 0};
  raw.cod = {0, 1, 2, 1, 2, 2};
  raw.identity = {0, 1, 2};
  raw.compose.assign(36, kNone);
  raw.at(0, 0) = 0;
  raw.at(1, 1) = 1;
  raw.at(2, 2) = 2;
  raw.at(3, 0) = 3;
  raw.at(1, 3) = 3;
  raw.at(4, 1) = 4;
  raw.at(2, 4) = 4;
  raw.at(5, 0) = 5;
  raw.at(2, 5) = 5;
  raw.at(4, 3) = 5;  // u ∘ v
  return raw;
}

/// Finite sets of sizes 0..4 with jointly-surjective covers, carrying every
/// cover shape the descent checks exercise in the basis: the trivial covers,
/// the split point collapse 2 -> 1, the two-chart bijective atlas of 2, and
/// the point covers of each set with at least two elements.
const Site& hw() {
  static Site s = [] {
    auto cat =
        std::make_shared<const FinCategory>(zoo::make_category(finset_category_data(4)));
    const FinCategory& c = *cat;
    std::vector<Sieve> declared;
    declared.push_back(empty_sieve(c, 0));
    for (Obj x = 2; x < c.n_objects(); ++x)
      declared.push_back(sieve_generated_by(c, x, c.hom(1, x)));
    std::vector<CoverFamily> basis;
    basis.push_back({0, {}});
    basis.push_back({1, {c.id(1)}});
    basis.push_back({1, {finset_morphism(c, 2, 1, {0, 0})}});
    basis.push_back({2, {c.id(2), finset_morphism(c, 2, 2, {1, 0})}});
    basis.push_back({2, c.hom(1, 2)});
    basis.push_back({3, c.hom(1, 3)});
    basis.push_back({4, c.hom(1, 4)});
    return Site::build(std::move(cat), std::move(declared), std::move(basis), {});
  }();
  return s;
}

Site make_chain_site(bool saturate) {
  auto cat = std::make_shared<const FinCategory>(zoo::make_category(chain_vux()));
  const FinCategory& c = *cat;
  Mor v = *c.find_morphism("v"), u = *c.find_morphism("u");
  std::vector<CoverFamily> basis = {{2, {u}}, {1, {v}}, {0, {c.id(0)}}};
  SiteOptions opts;
  opts.saturate = saturate;
  return Site::build(std::move(cat), {}, std::move(basis), opts);
}

const Site& chain_sat() {
  static Site s = make_chain_site(true);
  return s;
}

const Site& chain_raw() {
  static Site s = make_chain_site(false);
  return s;
}

/// Value tuple of a finite-set morphism, recovered from its name.
std::vector<int> finset_values(const FinCategory& c, Mor m) {
  const std::string& name = c.morphism_name(m);
  std::vector<int> vals;
  std::size_t us = name.find('_');
  if (us == std::string::npos) return vals;
  for (std::size_t i = us + 1; i < name.size(); ++i) vals.push_back(name[i] - '0');
  return vals;
}

/// Z/2^k as a one-object groupoid: arrow b is the function i ↦ bit i of b,
/// composed by exclusive-or, so arrow 0 is the identity.
FinGroupoid xor_groupoid(int k) {
  CategoryData raw;
  raw.object_names = {"*"};
  int n = 1 << k;
  for (int b = 0; b < n; ++b) {
    std::string name = "m";
    for (int i = 0; i < k; ++i) name += static_cast<char>('0' + ((b >> i) & 1));
    raw.morphism_names.push_back(name);
    raw.dom.push_back(0);
    raw.cod.push_back(0);
  }
  raw.identity = {0};
  raw.compose.assign(static_cast<std::size_t>(n) * n, kNone);
  for (int g = 0; g < n; ++g)
    for (int f = 0; f < n; ++f) raw.at(g, f) = g ^ f;
  return zoo::make_groupoid(raw);
}

/// Map(-, Z/2) on finite sets as a presheaf of one-object groupoids: the
/// value on the k-element set is Z/2^k and restriction precomposes masks.
PshGrpd xor_bg(const FinCategory& c) {
  PshGrpd p;
  for (Obj x = 0; x < c.n_objects(); ++x) p.value.push_back(xor_groupoid(x));
  p.restriction.resize(c.n_morphisms());
  for (Mor w = 0; w < c.n_morphisms(); ++w) {
    std::vector<int> wv = finset_values(c, w);
    int a = c.dom(w), b = c.cod(w);
    Functor f;
    f.ob = {0};
    f.mor.resize(std::size_t{1} << b);
    for (int mb = 0; mb < (1 << b); ++mb) {
      int ma = 0;
      for (int i = 0; i < a; ++i) ma |= ((mb >> wv[i]) & 1) << i;
      f.mor[mb] = ma;
    }
    p.restriction[w] = std::move(f);
  }
  return p;
}

/// The unique map to the terminal presheaf.
PshMor to_terminal(const FinCategory& c, const PshGrpd& m) {
  PshMor f;
  for (Obj x = 0; x < c.n_objects(); ++x) {
    Functor g;
    g.ob.assign(m.value[x].n_objects(), 0);
    g.mor.assign(m.value[x].n_morphisms(), 0);
    f.component.push_back(std::move(g));
  }
  return f;
}

/// The canonical point of a presheaf whose values all have object 0 — the
/// component functor picks that object with its identity.
PshMor point_of(const FinCategory& c, const PshGrpd& n) {
  PshMor f;
  for (Obj x = 0; x < c.n_objects(); ++x) {
    Functor g;
    g.ob = {0};
    g.mor = {n.value[x].id(0)};
    f.component.push_back(std::move(g));
  }
  return f;
}

/// Z/2 as a groupoid object in finite sets: one object, two arrows, and the
/// multiplication read off through the chosen composable-pairs cone.
GroupoidObject bg_object(const FinCategory& c, const LimitCache& lim) {
  GroupoidObject g;
  g.objects = 1;
  g.arrows = 2;
  g.source = g.target = finset_morphism(c, 2, 1, {0, 0});
  g.unit = finset_morphism(c, 1, 2, {0});
  g.inverse = c.id(2);
  const PullbackCone& pb = lim.require_pullback(g.source, g.target);
  int apex_size = std::stoi(c.object_name(pb.apex));
  std::vector<int> vals(apex_size);
  for (int i = 0; i < apex_size; ++i) {
    Mor pt = finset_morphism(c, 1, pb.apex, {i});
    vals[i] = finset_values(c, c.compose(pb.p, pt))[0] ^ finset_values(c, c.compose(pb.q, pt))[0];
  }
  g.compose = finset_morphism(c, apex_size, 2, vals);
  return g;
}

bool same_functor(const Functor& a, const Functor& b) { return a.ob == b.ob && a.mor == b.mor; }

bool same_psh_mor(const PshMor& a, const PshMor& b) {
  if (a.component.size() != b.component.size()) return false;
  for (std::size_t i = 0; i < a.component.size(); ++i)
    if (!same_functor(a.component[i], b.component[i])) return false;
  return true;
}

bool levelwise_equivalence(const FinCategory& c, const PshGrpd& m, const PshGrpd& n,
                           const PshMor& f) {
  for (Obj x = 0; x < c.n_objects(); ++x)
    if (!functor_equivalence_report(m.value[x], n.value[x], f.component[x]).is_equivalence())
      return false;
  return true;
}

const ReportNode* find_node(const ReportNode& n, const std::string& label) {
  if (n.label == label) return &n;
  for (const ReportNode& ch : n.children)
    if (const ReportNode* hit = find_node(ch, label)) return hit;
  return nullptr;
}

bool has_fact(const ReportNode& n, const std::string& key, const std::string& value) {
  for (const auto& [k, v] : n.facts)
    if (k == key && v == value) return true;
  return false;
}

std::vector<int> object_sizes(const PshGrpd& m) {
  std::vector<int> out;
  for (const FinGroupoid& g : m.value) out.push_back(g.n_objects());
  return out;
}

}  // namespace

TEST_CASE("local truth of a predicate is decided by its covering sieve") {
  const Site& s = hw();
  const FinCategory& c = s.cat();
  auto always = [](Mor) { return true; };
  auto never = [](Mor) { return false; };

  std::optional<Sieve> top = locally_holds(s, 2, always);
  REQUIRE(top.has_value());
  CHECK(sieves_equal(*top, maximal_sieve(c, 2)));
  CHECK_FALSE(locally_holds(s, 2, never).has_value());

  // the empty sieve covers the empty set, so over it even a nowhere-true
  // predicate holds locally
  std::optional<Sieve> vacuous = locally_holds(s, 0, never);
  REQUIRE(vacuous.has_value());
  CHECK(sieve_members(c, *vacuous).empty());

  CHECK_THROWS_AS(locally_holds(s, 5, always), AmbientMismatch);

  const FinCategory& cc = chain_sat().cat();
  Mor u = *cc.find_morphism("u"), v = *cc.find_morphism("v"), uv = *cc.find_morphism("uv");
  Obj x = cc.cod(u);
  auto through_uv = [&](Mor g) { return factors_through(cc, g, uv); };
  std::optional<Sieve> loc = locally_holds(chain_sat(), x, through_uv);
  REQUIRE(loc.has_value());
  CHECK(sieve_members(cc, *loc) == std::vector<Mor>{uv});
  // without saturation the composite sieve is not recognized as covering
  CHECK_FALSE(locally_holds(chain_raw(), x, through_uv).has_value());

  // a predicate singling out u alone is not closed under precomposition
  auto only_u = [&](Mor g) { return g == u; };
  try {
    locally_holds(chain_sat(), x, only_u);
    FAIL("expected a stability violation");
  } catch (const PredicateNotSieveStable& e) {
    CHECK(std::string(e.what()).find("(u, v)") != std::string::npos);
  }
  (void)v;
}

TEST_CASE("levelwise comparisons delegate to the value groupoids") {
  const Site& s = hw();
  const FinCategory& c = s.cat();
  PshGrpd bg = xor_bg(c);
  PshMor idbg = identity_psh_mor(c, bg);
  CHECK(is_levelwise_equivalence(c, bg, bg, idbg));
  CHECK(is_levelwise_isofibration(c, bg, bg, idbg));

  PshGrpd one = terminal_psh_grpd(c);
  PshMor flat = to_terminal(c, bg);
  LevelwiseReport rep = levelwise_equivalence_report(c, bg, one, flat);
  CHECK_FALSE(rep.verdict);
  REQUIRE(rep.failure.has_value());
  CHECK(*rep.failure == 1);  // collapsing Z/2 first loses faithfulness on the one-point set
  CHECK(rep.level[0].is_equivalence());
  CHECK_FALSE(rep.level[1].faithful);
  CHECK(is_levelwise_isofibration(c, bg, one, flat));

  // picking one point of the pair groupoid is an equivalence but cannot
  // lift the cross isomorphisms
  PshGrpd pairs = constant_psh_grpd(c, zoo::make_groupoid(zoo::pair_groupoid(2)));
  PshMor at0 = point_of(c, pairs);
  CHECK(is_levelwise_equivalence(c, one, pairs, at0));
  std::optional<std::pair<Obj, std::pair<Obj, Mor>>> cx;
  CHECK_FALSE(is_levelwise_isofibration(c, one, pairs, at0, &cx));
  REQUIRE(cx.has_value());
  CHECK(cx->first == 0);
}

TEST_CASE("the identity is a local equivalence and collapse to a point is not") {
  const Site& s = hw();
  const FinCategory& c = s.cat();
  PshGrpd bg = xor_bg(c);

  WeakEquivalenceResult we = is_weak_equivalence(s, bg, bg, identity_psh_mor(c, bg));
  CHECK(we.verdict);
  CHECK(we.object_probes == 5);
  CHECK(we.morphism_probes == 31);
  CHECK(we.automorphism_probes == 0);
  CHECK(we.failures.empty());
  CHECK(we.witnesses.size() == 36);
  CHECK(we.report.verdict);
  CHECK(has_fact(we.report.root, "morphism probes", "31"));
  CHECK(has_fact(we.report.root, "lifts that need a nontrivial cover", "0"));

  PshGrpd one = terminal_psh_grpd(c);
  WeakEquivalenceResult down = is_weak_equivalence(s, bg, one, to_terminal(c, bg));
  CHECK_FALSE(down.verdict);
  CHECK(down.automorphism_probes == 26);
  CHECK(down.failures.size() == 26);
  for (const LocalWitness& f : down.failures) CHECK(f.probe.kind == ProbeKind::Automorphism);
  CHECK(down.failures.front().probe.base == 1);
  CHECK_FALSE(down.report.verdict);

  // a global point misses the loops upstairs, but its composite with the
  // collapse is the identity — exactly one leg of the triangle is local,
  // consistent with two-out-of-three
  PshMor in = point_of(c, bg);
  CHECK(validate_psh_mor(c, one, bg, in).empty());
  CHECK_FALSE(is_weak_equivalence(s, one, bg, in).verdict);
  PshMor round = compose_psh_mors(to_terminal(c, bg), in);
  CHECK(same_psh_mor(round, identity_psh_mor(c, one)));
  CHECK(is_weak_equivalence(s, one, one, round).verdict);

  // the local checks refuse to run against a truncated covering table
  PshGrpd pt = terminal_psh_grpd(chain_raw().cat());
  CHECK_THROWS_AS(
      is_weak_equivalence(chain_raw(), pt, pt, identity_psh_mor(chain_raw().cat(), pt)),
      HypothesisFailure);
}

TEST_CASE("nerve augmentations are local equivalences exactly like their covers") {
  const Site& s = hw();
  const FinCategory& c = s.cat();

  CoverFamily split{1, {finset_morphism(c, 2, 1, {0, 0})}};
  CechResult sq = cech_groupoid(c, s.limits(), split);
  WeakEquivalenceResult aug = is_weak_equivalence(s, sq.nerve, sq.base, sq.augmentation);
  CHECK(aug.verdict);
  // the collapse is split, so here the augmentation is even levelwise
  CHECK(levelwise_equivalence(c, sq.nerve, sq.base, sq.augmentation));

  const Site& sat = chain_sat();
  const FinCategory& cc = sat.cat();
  Mor u = *cc.find_morphism("u"), uv = *cc.find_morphism("uv");
  Obj x = cc.cod(u);
  CechResult nv = cech_groupoid(cc, sat.limits(), {x, {u}});
  WeakEquivalenceResult w = is_weak_equivalence(sat, nv.nerve, nv.base, nv.augmentation);
  CHECK(w.verdict);
  // ...but only locally: over the base object the nerve has no sections
  CHECK_FALSE(levelwise_equivalence(cc, nv.nerve, nv.base, nv.augmentation));

  // the identity of the base lifts exactly over the sieve generated by the
  // cover, and that locus agrees with the generic local-truth decision
  const LocalWitness* hit = nullptr;
  for (const LocalWitness& cand : w.witnesses)
    if (cand.probe.kind == ProbeKind::Object && cand.probe.base == x) hit = &cand;
  REQUIRE(hit != nullptr);
  CHECK(sieve_members(cc, hit->sieve) == std::vector<Mor>{u, uv});
  CHECK_FALSE(sieves_equal(hit->sieve, maximal_sieve(cc, x)));
  auto through_u = [&](Mor g) { return factors_through(cc, g, u); };
  std::optional<Sieve> direct = locally_holds(sat, x, through_u);
  REQUIRE(direct.has_value());
  CHECK(sieves_equal(*direct, hit->sieve));
}

TEST_CASE("restriction along a split point is not locally injective on arrows") {
  const Site& s = hw();
  const FinCategory& c = s.cat();
  Mor split = finset_morphism(c, 2, 1, {0, 0});
  PshGrpd y2 = yoneda(c, 2), y1 = yoneda(c, 1);
  PshMor post = yoneda_map(c, split);

  WeakEquivalenceResult we = is_weak_equivalence(s, y2, y1, post);
  CHECK_FALSE(we.verdict);
  CHECK_FALSE(levelwise_equivalence(c, y2, y1, post));
  REQUIRE(!we.failures.empty());
  // the two points of 2 become equal downstairs but agree on no cover, and
  // the same happens to the identity and the swap
  CHECK(we.failures.front().probe.kind == ProbeKind::Morphism);
  CHECK(we.failures.front().probe.base == 1);
  bool swap_conflict = false;
  for (const LocalWitness& f : we.failures)
    if (f.probe.kind == ProbeKind::Morphism && f.probe.base == 2) swap_conflict = true;
  CHECK(swap_conflict);
}

TEST_CASE("torsor-style sections glue where constant ones fail") {
  const Site& s = hw();
  const FinCategory& c = s.cat();
  PshGrpd bg = xor_bg(c);

  StackReport sr = is_stack(s, bg);
  CHECK(sr.verdict);
  REQUIRE(sr.covers.size() == 7);
  std::vector<int> data;
  for (const StackCoverReport& cr : sr.covers) {
    CHECK(cr.verdict);
    data.push_back(cr.data);
  }
  CHECK(data == std::vector<int>{1, 1, 2, 4, 1, 1, 1});
  CHECK(has_fact(sr.report.root, "covers checked", "7"));
  CHECK(sr.report.to_json() == is_stack(s, bg).report.to_json());

  // the atlas descent groupoid is one object with Map(2, Z/2) as its arrows
  CoverDescent atlas(s, bg, {2, {c.id(2), finset_morphism(c, 2, 2, {1, 0})}});
  std::vector<CoverDescent::Datum> dd = atlas.enumerate_data();
  REQUIRE(dd.size() == 4);
  CHECK(atlas.morphisms(dd[0], dd[0]).size() == 4);

  PshGrpd bits = constant_psh_grpd(c, zoo::make_groupoid(zoo::discrete(2)));
  StackReport bad = is_stack(s, bits);
  CHECK_FALSE(bad.verdict);
  REQUIRE(bad.covers.size() == 1);  // already the empty cover of the empty set fails
  CHECK(bad.covers[0].base == 0);
  CHECK(bad.covers[0].data == 1);
  CHECK(bad.covers[0].equivalence.essentially_surjective);
  CHECK_FALSE(bad.covers[0].equivalence.full);

  StackReport rep = is_stack(s, yoneda(c, 2));
  CHECK(rep.verdict);
  CHECK(rep.covers.back().data == 16);

  // resource guards: a cover whose overlap leaves the category, and a data
  // budget too small for the split cover
  CHECK_THROWS_AS(CoverDescent(s, bg, CoverFamily{1, {finset_morphism(c, 4, 1, {0, 0, 0, 0})}}),
                  MissingPullback);
  CHECK_THROWS_AS(is_stack(s, bg, 1), SizeBound);
}

TEST_CASE("family and sieve descent agree on the comparison verdict") {
  const Site& s = hw();
  const FinCategory& c = s.cat();
  std::vector<PshGrpd> presheaves;
  presheaves.push_back(yoneda(c, 2));
  presheaves.push_back(constant_psh_grpd(c, zoo::make_groupoid(zoo::discrete(2))));
  std::vector<CoverFamily> covers;
  covers.push_back({0, {}});
  covers.push_back({1, {finset_morphism(c, 2, 1, {0, 0})}});
  covers.push_back({2, {c.id(2), finset_morphism(c, 2, 2, {1, 0})}});
  covers.push_back({2, c.hom(1, 2)});

  int disagreements = 0, negatives = 0;
  for (const PshGrpd& m : presheaves)
    for (const CoverFamily& cov : covers) {
      CoverDescent fam(s, m, cov);
      CoverDescent::Materialized mf = fam.materialize();
      bool family_ok =
          functor_equivalence_report(m.value[cov.base], mf.groupoid, mf.comparison)
              .is_equivalence();
      SieveDescent sv(s, m, sieve_generated_by(c, cov.base, cov.members));
      SieveDescent::Materialized ms = sv.materialize();
      bool sieve_ok =
          functor_equivalence_report(m.value[cov.base], ms.groupoid, ms.comparison)
              .is_equivalence();
      if (family_ok != sieve_ok) ++disagreements;
      if (!family_ok) ++negatives;
    }
  CHECK(disagreements == 0);
  CHECK(negatives == 1);  // the constants over the empty cover, on both routes
}

TEST_CASE("completion stabilizes constants in two steps") {
  const Site& s = hw();
  const FinCategory& c = s.cat();
  PshGrpd bits = constant_psh_grpd(c, zoo::make_groupoid(zoo::discrete(2)));

  StackifyResult st = stackify(s, bits);
  CHECK(st.iterations == 2);
  CHECK(object_sizes(st.stack) == std::vector<int>{1, 2, 4, 8, 16});
  CHECK(validate_psh_grpd(c, st.stack).empty());
  CHECK(validate_psh_mor(c, bits, st.stack, st.unit).empty());
  CHECK(st.certificate.verdict);
  CHECK(has_fact(st.certificate.root, "completion steps", "2"));

  // after one step the sections still glue only diagonally along the points
  GrpdPlusResult once = plus_construction(s, bits);
  CHECK(validate_psh_grpd(c, once.presheaf).empty());
  CHECK(validate_psh_mor(c, bits, once.presheaf, once.unit).empty());
  CHECK(object_sizes(once.presheaf) == std::vector<int>{1, 2, 2, 2, 2});
  StackReport mid = is_stack(s, once.presheaf);
  CHECK_FALSE(mid.verdict);
  REQUIRE(mid.covers.size() == 5);
  CHECK(mid.covers.back().base == 2);
  CHECK(mid.covers.back().members == c.hom(1, 2));
  CHECK_FALSE(mid.covers.back().equivalence.essentially_surjective);

  CHECK_THROWS_AS(stackify(s, bits, 1), IterationBoundExceeded);

  // a presheaf that already satisfies descent completes in zero steps
  PshGrpd bg = xor_bg(c);
  StackifyResult fix = stackify(s, bg);
  CHECK(fix.iterations == 0);
  CHECK(same_psh_mor(fix.unit, identity_psh_mor(c, bg)));
}

TEST_CASE("completing a chain nerve recovers the represented base") {
  const Site& sat = chain_sat();
  const FinCategory& cc = sat.cat();
  Mor u = *cc.find_morphism("u");
  Obj x = cc.cod(u);
  CechResult nv = cech_groupoid(cc, sat.limits(), {x, {u}});

  StackifyResult st = stackify(sat, nv.nerve);
  CHECK(st.iterations == 1);
  for (Obj w = 0; w < cc.n_objects(); ++w) {
    CHECK(st.stack.value[w].n_objects() == 1);
    CHECK(st.stack.value[w].n_morphisms() == 1);
  }
  WeakEquivalenceResult unit = is_weak_equivalence(sat, nv.nerve, st.stack, st.unit);
  CHECK(unit.verdict);
  CHECK_FALSE(levelwise_equivalence(cc, nv.nerve, st.stack, st.unit));

  // the completed nerve is the presheaf represented by the base object
  PshGrpd yx = yoneda(cc, x);
  PshMor collapse;
  for (Obj w = 0; w < cc.n_objects(); ++w) {
    Functor g;
    g.ob = {0};
    g.mor = {yx.value[w].id(0)};
    collapse.component.push_back(std::move(g));
  }
  CHECK(validate_psh_mor(cc, st.stack, yx, collapse).empty());
  CHECK(levelwise_equivalence(cc, st.stack, yx, collapse));
}

TEST_CASE("groupoid completion tracks set-level sheafification") {
  const Site& s = hw();
  const FinCategory& c = s.cat();
  SetPresheaf p = constant_set_presheaf(c, 2);
  SheafifyResult sh = sheafify(s, p);
  StackifyResult st = stackify(s, discrete_psh_grpd(c, p));

  SetPresheaf q = pi0(c, st.stack);
  REQUIRE(q.size == sh.sheaf.size);
  CHECK(is_sheaf(s, q));

  // both sheaves are separated, so evaluation at points embeds them into
  // the same product once the units are matched over the one-point set
  REQUIRE(q.size[1] == 2);
  std::vector<int> to_set(q.size[1], -1);
  for (int sec = 0; sec < p.size[1]; ++sec)
    to_set[st.unit.component[1].ob[sec]] = sh.unit[1][sec];

  for (Obj x = 0; x < c.n_objects(); ++x) {
    std::vector<std::vector<int>> a, b;
    for (int t = 0; t < q.size[x]; ++t) {
      std::vector<int> ev;
      for (Mor pt : c.hom(1, x)) ev.push_back(to_set[q.restrict_section(pt, t)]);
      a.push_back(std::move(ev));
    }
    for (int t = 0; t < sh.sheaf.size[x]; ++t) {
      std::vector<int> ev;
      for (Mor pt : c.hom(1, x)) ev.push_back(sh.sheaf.restrict_section(pt, t));
      b.push_back(std::move(ev));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
  }

  // and the identification is compatible with the two units
  for (Obj x = 0; x < c.n_objects(); ++x)
    for (int sec = 0; sec < p.size[x]; ++sec)
      for (Mor pt : c.hom(1, x))
        CHECK(to_set[q.restrict_section(pt, st.unit.component[x].ob[sec])] ==
              sh.sheaf.restrict_section(pt, sh.unit[x][sec]));
}

TEST_CASE("completion of representables is already levelwise") {
  const Site& s = hw();
  const FinCategory& c = s.cat();
  PshGrpd y2 = yoneda(c, 2);
  GrpdPlusResult py = plus_construction(s, y2);
  CHECK(validate_psh_grpd(c, py.presheaf).empty());
  CHECK(validate_psh_mor(c, y2, py.presheaf, py.unit).empty());
  CHECK(object_sizes(py.presheaf) == object_sizes(y2));
  CHECK(levelwise_equivalence(c, y2, py.presheaf, py.unit));
  // a levelwise equivalence is in particular a local one
  CHECK(is_weak_equivalence(s, y2, py.presheaf, py.unit).verdict);
}

TEST_CASE("arrows present the homotopy self-overlap over the target") {
  const Site& s = hw();
  const FinCategory& c = s.cat();

  // the unit groupoid on 2 presents the presheaf it represents
  GroupoidObject triv;
  triv.objects = 2;
  triv.arrows = 2;
  triv.source = triv.target = c.id(2);
  triv.unit = c.id(2);
  triv.inverse = c.id(2);
  triv.compose = c.id(2);
  REQUIRE(validate_groupoid_object(c, s.limits(), triv).empty());
  PshGrpd flat = groupoid_object_presheaf(c, s.limits(), triv);
  DomainRangeResult dr = domain_range_check(s, triv, flat, identity_psh_mor(c, flat));
  CHECK(dr.verdict);
  REQUIRE(dr.levelwise.has_value());
  CHECK(*dr.levelwise);
  CHECK(has_fact(dr.report.root, "target is a stack", "yes"));
  CHECK(has_fact(dr.report.root, "homotopy overlap sizes", "1,2,4,8,16"));

  // Z/2 as arrows over a point presents Map(-, Z/2)
  GroupoidObject gz2 = bg_object(c, s.limits());
  PshGrpd gop = groupoid_object_presheaf(c, s.limits(), gz2);
  PshGrpd bg = xor_bg(c);
  PshMor pres;
  for (Obj x = 0; x < c.n_objects(); ++x) {
    Functor g;
    g.ob = {0};
    const std::vector<Mor>& arrows = c.hom(x, gz2.arrows);
    g.mor.resize(arrows.size());
    for (std::size_t i = 0; i < arrows.size(); ++i) {
      std::vector<int> vals = finset_values(c, arrows[i]);
      int mask = 0;
      for (std::size_t j = 0; j < vals.size(); ++j) mask |= vals[j] << j;
      g.mor[i] = mask;
    }
    pres.component.push_back(std::move(g));
  }
  REQUIRE(validate_psh_mor(c, gop, bg, pres).empty());
  DomainRangeResult db = domain_range_check(s, gz2, bg, pres);
  CHECK(db.verdict);
  REQUIRE(db.levelwise.has_value());
  CHECK(*db.levelwise);
  CHECK(has_fact(db.report.root, "homotopy overlap sizes", "1,2,4,8,16"));

  // the same arrows cannot present the terminal presheaf: their overlap is
  // too small to recognize the loops
  DomainRangeResult dn = domain_range_check(s, gz2, terminal_psh_grpd(c), to_terminal(c, gop));
  CHECK_FALSE(dn.verdict);
  REQUIRE(dn.levelwise.has_value());
  CHECK_FALSE(*dn.levelwise);
  CHECK(has_fact(dn.report.root, "target is a stack", "yes"));
}

TEST_CASE("a chain cover groupoid presents its base") {
  const Site& sat = chain_sat();
  const FinCategory& cc = sat.cat();
  Mor u = *cc.find_morphism("u");
  Obj base = cc.cod(u), mid = cc.dom(u);

  // the overlap of u with itself is trivial, so the pair groupoid of the
  // cover degenerates to the unit groupoid on its domain
  GroupoidObject pairg;
  pairg.objects = mid;
  pairg.arrows = mid;
  pairg.source = pairg.target = cc.id(mid);
  pairg.unit = cc.id(mid);
  pairg.inverse = cc.id(mid);
  pairg.compose = cc.id(mid);
  REQUIRE(validate_groupoid_object(cc, sat.limits(), pairg).empty());
  PshGrpd gop = groupoid_object_presheaf(cc, sat.limits(), pairg);
  PshMor leg = yoneda_map(cc, u);
  REQUIRE(validate_psh_mor(cc, gop, yoneda(cc, base), leg).empty());

  DomainRangeResult dr = domain_range_check(sat, pairg, yoneda(cc, base), leg);
  CHECK(dr.verdict);
  REQUIRE(dr.levelwise.has_value());
  CHECK(*dr.levelwise);
  CHECK(has_fact(dr.report.root, "homotopy overlap sizes", "1,1,0"));
}

TEST_CASE("a missing overlap leaves the stack question open but not the local one") {
  auto cat = std::make_shared<const FinCategory>(zoo::make_category(finset_category_data(4)));
  const FinCategory& c = *cat;
  std::vector<Sieve> declared;
  declared.push_back(empty_sieve(c, 0));
  for (Obj x = 2; x < c.n_objects(); ++x)
    declared.push_back(sieve_generated_by(c, x, c.hom(1, x)));
  // the collapse of 4 needs a 16-element self-overlap this category lacks
  std::vector<CoverFamily> basis = {{1, {finset_morphism(c, 4, 1, {0, 0, 0, 0})}}};
  Site s = Site::build(std::move(cat), std::move(declared), std::move(basis), {});

  const FinCategory& sc = s.cat();
  GroupoidObject gz2 = bg_object(sc, s.limits());
  PshGrpd gop = groupoid_object_presheaf(sc, s.limits(), gz2);
  PshGrpd bg = xor_bg(sc);
  PshMor pres;
  for (Obj x = 0; x < sc.n_objects(); ++x) {
    Functor g;
    g.ob = {0};
    const std::vector<Mor>& arrows = sc.hom(x, gz2.arrows);
    g.mor.resize(arrows.size());
    for (std::size_t i = 0; i < arrows.size(); ++i) {
      std::vector<int> vals = finset_values(sc, arrows[i]);
      int mask = 0;
      for (std::size_t j = 0; j < vals.size(); ++j) mask |= vals[j] << j;
      g.mor[i] = mask;
    }
    pres.component.push_back(std::move(g));
  }

  CHECK_THROWS_AS(is_stack(s, bg), MissingPullback);
  DomainRangeResult dr = domain_range_check(s, gz2, bg, pres);
  CHECK(dr.verdict);  // the topology is the same, so the comparison is still local
  CHECK_FALSE(dr.levelwise.has_value());
  CHECK(has_fact(dr.report.root, "target is a stack",
                 "undecided: no pullback of f41_0000 and f41_0000"));
}
