#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "stackcheck/core/equivalence.hpp"
#include "stackcheck/core/errors.hpp"
#include "stackcheck/core/fincat.hpp"
#include "stackcheck/site/set_presheaf.hpp"

namespace stackcheck {

/// A presheaf of finite groupoids on the ambient category: one value
/// groupoid per object, one restriction functor per morphism, contravariant
/// (restriction[m] maps sections at cod(m) to sections at dom(m)).
/// Functoriality is strict: identities restrict to identity functors and
/// composites to composites on the nose; validate_psh_grpd enforces this,
/// pseudo-functorial tables are rejected rather than repaired.
struct PshGrpd {
  std::vector<FinGroupoid> value;    // per ambient object
  std::vector<Functor> restriction;  // per ambient morphism
};

/// A map of groupoid presheaves: one component functor per ambient object,
/// strictly natural in the ambient morphisms.
struct PshMor {
  std::vector<Functor> component;  // per ambient object: M(x) -> N(x)
};

/// A homotopy between two parallel maps f, g: M -> N: one natural
/// isomorphism f(x) => g(x) per ambient object, compatible with restriction
/// on the nose.
struct Homotopy2Cell {
  std::vector<NatIso> component;  // per ambient object
};

/// Builds a value groupoid from raw tables, translating validation failures
/// into a typed error.  Constructions in this module synthesize their tables,
/// so a failure here is an internal bug or garbage input, never a verdict.
inline FinGroupoid make_value_groupoid(const CategoryData& raw, const std::string& context) {
  GroupoidValidation gv = validate_groupoid(raw);
  if (!gv.ok()) {
    const AxiomViolation& v = gv.violations.front();
    throw AxiomViolationError(context + ": " + to_string(v.kind) +
                              (v.detail.empty() ? "" : " (" + v.detail + ")"));
  }
  return std::move(*gv.groupoid);
}

inline std::vector<std::string> validate_psh_grpd(const FinCategory& c, const PshGrpd& p) {
  std::vector<std::string> out;
  if (p.value.size() != static_cast<std::size_t>(c.n_objects()) ||
      p.restriction.size() != static_cast<std::size_t>(c.n_morphisms())) {
    out.push_back("table sizes disagree with the ambient category");
    return out;
  }
  for (Mor m = 0; m < c.n_morphisms(); ++m) {
    for (const AxiomViolation& v :
         validate_functor(p.value[c.cod(m)].cat(), p.value[c.dom(m)].cat(), p.restriction[m]))
      out.push_back("restriction along " + c.morphism_name(m) + ": " + to_string(v.kind) +
                    " (" + v.detail + ")");
  }
  if (!out.empty()) return out;
  for (Obj x = 0; x < c.n_objects(); ++x) {
    Functor idf = identity_functor(p.value[x].cat());
    if (p.restriction[c.id(x)].ob != idf.ob || p.restriction[c.id(x)].mor != idf.mor)
      out.push_back("restriction along the identity of " + c.object_name(x) +
                    " is not the identity functor");
  }
  for (Mor f = 0; f < c.n_morphisms(); ++f) {
    for (Mor g : c.out_of(c.cod(f))) {
      Mor gf = c.try_compose(g, f);
      if (gf == kNone) continue;
      Functor both = compose_functors(p.restriction[f], p.restriction[g]);
      if (p.restriction[gf].ob != both.ob || p.restriction[gf].mor != both.mor)
        out.push_back("restriction along " + c.morphism_name(gf) +
                      " differs from the composite of restrictions along " + c.morphism_name(g) +
                      " and " + c.morphism_name(f));
    }
  }
  return out;
}

inline std::vector<std::string> validate_psh_mor(const FinCategory& c, const PshGrpd& m,
                                                 const PshGrpd& n, const PshMor& f) {
  std::vector<std::string> out;
  if (f.component.size() != static_cast<std::size_t>(c.n_objects())) {
    out.push_back("component count disagrees with the ambient category");
    return out;
  }
  for (Obj x = 0; x < c.n_objects(); ++x) {
    for (const AxiomViolation& v :
         validate_functor(m.value[x].cat(), n.value[x].cat(), f.component[x]))
      out.push_back("component at " + c.object_name(x) + ": " + std::string(to_string(v.kind)) +
                    " (" + v.detail + ")");
  }
  if (!out.empty()) return out;
  for (Mor w = 0; w < c.n_morphisms(); ++w) {
    Functor around = compose_functors(f.component[c.dom(w)], m.restriction[w]);
    Functor across = compose_functors(n.restriction[w], f.component[c.cod(w)]);
    if (around.ob != across.ob || around.mor != across.mor)
      out.push_back("naturality fails along " + c.morphism_name(w));
  }
  return out;
}

inline std::vector<std::string> validate_homotopy_2cell(const FinCategory& c, const PshGrpd& m,
                                                        const PshGrpd& n, const PshMor& f,
                                                        const PshMor& g, const Homotopy2Cell& h) {
  std::vector<std::string> out;
  if (h.component.size() != static_cast<std::size_t>(c.n_objects())) {
    out.push_back("component count disagrees with the ambient category");
    return out;
  }
  for (Obj x = 0; x < c.n_objects(); ++x) {
    for (const AxiomViolation& v :
         validate_nat_iso(m.value[x].cat(), n.value[x].cat(), f.component[x], g.component[x],
                          h.component[x]))
      out.push_back("component at " + c.object_name(x) + ": " + std::string(to_string(v.kind)) +
                    " (" + v.detail + ")");
  }
  if (!out.empty()) return out;
  // restricting the component at cod(w) along w gives the component at dom(w)
  for (Mor w = 0; w < c.n_morphisms(); ++w) {
    Obj x = c.cod(w), y = c.dom(w);
    for (Obj a = 0; a < m.value[x].n_objects(); ++a) {
      if (n.restriction[w].mor[h.component[x].component[a]] !=
          h.component[y].component[m.restriction[w].ob[a]]) {
        out.push_back("restriction compatibility fails along " + c.morphism_name(w) + " at " +
                      m.value[x].object_name(a));
        break;
      }
    }
  }
  return out;
}

inline PshMor identity_psh_mor(const FinCategory& c, const PshGrpd& m) {
  PshMor f;
  f.component.reserve(c.n_objects());
  for (Obj x = 0; x < c.n_objects(); ++x) f.component.push_back(identity_functor(m.value[x].cat()));
  return f;
}

/// g after f, componentwise.
inline PshMor compose_psh_mors(const PshMor& g, const PshMor& f) {
  PshMor gf;
  gf.component.reserve(f.component.size());
  for (std::size_t x = 0; x < f.component.size(); ++x)
    gf.component.push_back(compose_functors(g.component[x], f.component[x]));
  return gf;
}

/// The discrete groupoid on a list of labels: one identity per object.
inline FinGroupoid discrete_groupoid(const std::vector<std::string>& labels) {
  CategoryData raw;
  raw.object_names = labels;
  int n = static_cast<int>(labels.size());
  raw.morphism_names.reserve(n);
  for (const std::string& l : labels) raw.morphism_names.push_back("id(" + l + ")");
  raw.dom.resize(n);
  raw.cod.resize(n);
  raw.identity.resize(n);
  for (int i = 0; i < n; ++i) {
    raw.dom[i] = raw.cod[i] = i;
    raw.identity[i] = i;
  }
  raw.compose.assign(static_cast<std::size_t>(n) * n, kNone);
  for (int i = 0; i < n; ++i) raw.at(i, i) = i;
  return make_value_groupoid(raw, "discrete groupoid");
}

/// Lifts a presheaf of sets to a presheaf of discrete groupoids.  Sections
/// keep their indices, so pi0 of the result is the input again.
inline PshGrpd discrete_psh_grpd(const FinCategory& c, const SetPresheaf& p) {
  PshGrpd out;
  out.value.reserve(c.n_objects());
  for (Obj x = 0; x < c.n_objects(); ++x) {
    std::vector<std::string> labels;
    labels.reserve(p.size[x]);
    bool named = p.labels.size() > static_cast<std::size_t>(x) && !p.labels[x].empty();
    for (int s = 0; s < p.size[x]; ++s)
      labels.push_back(named ? p.label(x, s) : std::to_string(s));
    out.value.push_back(discrete_groupoid(labels));
  }
  out.restriction.resize(c.n_morphisms());
  for (Mor m = 0; m < c.n_morphisms(); ++m) {
    out.restriction[m].ob = p.restriction[m];
    out.restriction[m].mor = p.restriction[m];  // identities map to identities
  }
  return out;
}

/// Constant presheaf of one groupoid: all restrictions are the identity.
inline PshGrpd constant_psh_grpd(const FinCategory& c, const FinGroupoid& g) {
  PshGrpd out;
  out.value.assign(c.n_objects(), g);
  out.restriction.assign(c.n_morphisms(), identity_functor(g.cat()));
  return out;
}

inline PshGrpd terminal_psh_grpd(const FinCategory& c) {
  return discrete_psh_grpd(c, constant_set_presheaf(c, 1));
}

/// The representable presheaf of Z as a discrete groupoid presheaf: sections
/// over V are the morphisms V -> Z, restriction is precomposition.
inline PshGrpd yoneda(const FinCategory& c, Obj z) {
  return discrete_psh_grpd(c, representable_set_presheaf(c, z));
}

/// Functoriality of yoneda: a morphism w: Y -> Z induces the postcomposition
/// map yoneda(Y) -> yoneda(Z).
inline PshMor yoneda_map(const FinCategory& c, Mor w) {
  Obj y = c.dom(w), z = c.cod(w);
  PshMor f;
  f.component.resize(c.n_objects());
  for (Obj v = 0; v < c.n_objects(); ++v) {
    std::unordered_map<Mor, int> pos;
    const std::vector<Mor>& hz = c.hom(v, z);
    for (int i = 0; i < static_cast<int>(hz.size()); ++i) pos.emplace(hz[i], i);
    const std::vector<Mor>& hy = c.hom(v, y);
    Functor& comp = f.component[v];
    comp.ob.resize(hy.size());
    for (std::size_t i = 0; i < hy.size(); ++i) comp.ob[i] = pos.at(c.compose(w, hy[i]));
    comp.mor = comp.ob;
  }
  return f;
}

/// Connected components, sectionwise: (pi0 P)(x) = iso classes of P(x), with
/// the induced restrictions.  Each class is labeled by its first object.
inline SetPresheaf pi0(const FinCategory& c, const PshGrpd& p) {
  SetPresheaf out;
  out.size.resize(c.n_objects());
  out.labels.resize(c.n_objects());
  std::vector<ComponentIndex> comps;
  comps.reserve(c.n_objects());
  for (Obj x = 0; x < c.n_objects(); ++x) {
    comps.push_back(groupoid_components(p.value[x]));
    out.size[x] = comps[x].count;
    out.labels[x].assign(comps[x].count, "");
    for (Obj o = p.value[x].n_objects() - 1; o >= 0; --o)
      out.labels[x][comps[x].component[o]] = p.value[x].object_name(o);
  }
  out.restriction.resize(c.n_morphisms());
  for (Mor m = 0; m < c.n_morphisms(); ++m) {
    const ComponentIndex& src = comps[c.cod(m)];
    const ComponentIndex& dst = comps[c.dom(m)];
    out.restriction[m].assign(src.count, -1);
    for (Obj o = 0; o < p.value[c.cod(m)].n_objects(); ++o)
      out.restriction[m][src.component[o]] = dst.component[p.restriction[m].ob[o]];
  }
  return out;
}

}  // namespace stackcheck
