#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stackcheck/homotopy/descent_data.hpp"
#include "stackcheck/homotopy/weak_equivalence.hpp"

namespace stackcheck {

/// Per-cover outcome of the stack condition: the size of the descent
/// groupoid and the equivalence diagnosis of the comparison functor into it.
struct StackCoverReport {
  Obj base = -1;
  std::vector<Mor> members;
  int data = 0;
  EquivalenceReport equivalence;
  bool verdict = false;
};

struct StackReport {
  bool verdict = false;
  std::vector<StackCoverReport> covers;  // basis order; stops after the first failure
  CheckReport report;
};

/// The stack condition over the declared basis: for every cover, the
/// comparison from sections over the base to the groupoid of descent data is
/// an equivalence.  Covers are taken in declaration order and the scan stops
/// at the first failing one, which is therefore the recorded counterexample.
inline StackReport is_stack(const Site& site, const PshGrpd& m, std::size_t data_cap = 500000,
                            std::size_t mor_cap = 100000) {
  const FinCategory& c = site.cat();
  StackReport out;
  out.verdict = true;
  CheckReport& rep = out.report;
  rep.check = "is_stack";
  rep.root.label = "sections and their isomorphisms glue along every basis cover";

  for (const CoverFamily& fam : site.basis()) {
    CoverDescent ctx(site, m, fam);
    CoverDescent::Materialized mat = ctx.materialize(data_cap, mor_cap);

    StackCoverReport cr;
    cr.base = fam.base;
    cr.members = fam.members;
    cr.data = static_cast<int>(mat.data.size());
    cr.equivalence = functor_equivalence_report(m.value[fam.base], mat.groupoid, mat.comparison);
    cr.verdict = cr.equivalence.is_equivalence();

    ReportNode& node = rep.root.child("cover");
    std::string mem = "{";
    for (std::size_t i = 0; i < fam.members.size(); ++i) {
      if (i) mem += ", ";
      mem += c.morphism_name(fam.members[i]);
    }
    mem += "}";
    node.fact("base", c.object_name(fam.base));
    node.fact("members", mem);
    node.fact("descent data", std::to_string(cr.data));
    node.fact("essentially surjective", cr.equivalence.essentially_surjective ? "yes" : "no");
    node.fact("fully faithful", cr.equivalence.full && cr.equivalence.faithful ? "yes" : "no");
    node.set(cr.verdict);

    bool failed = !cr.verdict;
    out.covers.push_back(std::move(cr));
    if (failed) {
      out.verdict = false;
      break;
    }
  }

  rep.root.fact("covers checked", std::to_string(out.covers.size()));
  rep.verdict = out.verdict;
  rep.root.set(out.verdict);
  return out;
}

/// One completion step and its unit.  The value over x is the groupoid of
/// descent data indexed by the minimal covering sieve on x — the stage where
/// the covering-sieve-indexed colimit stabilizes, just as in the set-level
/// construction — and restriction re-reads a datum along the composite
/// members, which stay inside the minimal sieve upstairs by minimality.
struct GrpdPlusResult {
  PshGrpd presheaf;
  PshMor unit;
};

inline GrpdPlusResult plus_construction(const Site& site, const PshGrpd& m,
                                        std::size_t data_cap = 500000,
                                        std::size_t mor_cap = 100000) {
  const FinCategory& c = site.cat();
  int no = c.n_objects();
  GrpdPlusResult r;
  r.presheaf.value.resize(no);
  r.presheaf.restriction.resize(c.n_morphisms());
  r.unit.component.resize(no);

  std::vector<SieveDescent> desc;
  desc.reserve(no);
  std::vector<SieveDescent::Materialized> mat(no);
  for (Obj x = 0; x < no; ++x) {
    desc.emplace_back(site, m, site.minimal_covering_sieve(x));
    mat[x] = desc[x].materialize(data_cap, mor_cap);
    r.presheaf.value[x] = mat[x].groupoid;
    r.unit.component[x] = mat[x].comparison;
  }

  for (Mor g = 0; g < c.n_morphisms(); ++g) {
    Obj x = c.cod(g), y = c.dom(g);
    const std::vector<Mor>& ymem = desc[y].members();
    // positions, inside the upstairs sieve, of the downstairs members
    // composed with g (minimality puts them there)
    std::vector<int> up(ymem.size());
    for (std::size_t t = 0; t < ymem.size(); ++t) {
      up[t] = desc[x].member_pos(c.compose(g, ymem[t]));
      if (up[t] < 0)
        throw AxiomViolationError("restricted member escapes the minimal covering sieve");
    }
    Functor& f = r.presheaf.restriction[g];
    f.ob.resize(mat[x].data.size());
    for (std::size_t i = 0; i < mat[x].data.size(); ++i) {
      SieveDescent::Datum pulled;
      pulled.object.resize(ymem.size());
      pulled.coherence.assign(desc[y].coherence_slots(), kNone);
      for (std::size_t t = 0; t < ymem.size(); ++t) {
        pulled.object[t] = mat[x].data[i].object[up[t]];
        for (Mor w : c.into(c.dom(ymem[t])))
          pulled.coherence[desc[y].slot(static_cast<int>(t), w)] =
              mat[x].data[i].coherence[desc[x].slot(up[t], w)];
      }
      auto it = mat[y].index.find(std::make_pair(pulled.object, pulled.coherence));
      if (it == mat[y].index.end())
        throw AxiomViolationError("restriction of a descent datum is not a descent datum");
      f.ob[i] = it->second;
    }
    f.mor.resize(mat[x].tuple.size());
    for (std::size_t k = 0; k < mat[x].tuple.size(); ++k) {
      std::vector<Mor> pulled(ymem.size());
      for (std::size_t t = 0; t < ymem.size(); ++t) pulled[t] = mat[x].tuple[k][up[t]];
      const FinGroupoid& gx = mat[x].groupoid;
      auto it = mat[y].tuple_index.find(std::make_tuple(
          f.ob[gx.dom(static_cast<Mor>(k))], f.ob[gx.cod(static_cast<Mor>(k))], pulled));
      if (it == mat[y].tuple_index.end())
        throw AxiomViolationError("restriction of a descent morphism is not a descent morphism");
      f.mor[k] = it->second;
    }
  }
  return r;
}

/// The completion of a presheaf of groupoids into a stack, with the unit map
/// and a certificate.  Applies the completion step until the stack condition
/// holds — at most three times, which suffices in general; needing more
/// would mean the construction is broken, so that throws rather than
/// reporting a verdict.  The certificate records the final stack check and
/// the proof that the unit is a local equivalence; a unit that fails to be
/// one is likewise an internal failure, not an answer.
struct StackifyResult {
  PshGrpd stack;
  PshMor unit;
  int iterations = 0;
  CheckReport certificate;
};

inline StackifyResult stackify(const Site& site, const PshGrpd& m, int max_iterations = 3,
                               std::size_t data_cap = 500000, std::size_t mor_cap = 100000) {
  const FinCategory& c = site.cat();
  StackifyResult out;
  out.stack = m;
  out.unit = identity_psh_mor(c, m);
  for (int it = 0;; ++it) {
    StackReport sr = is_stack(site, out.stack, data_cap, mor_cap);
    if (sr.verdict) {
      out.iterations = it;
      WeakEquivalenceResult we = is_weak_equivalence(site, m, out.stack, out.unit);
      if (!we.verdict)
        throw AxiomViolationError("completion unit failed to be a local equivalence");
      CheckReport& rep = out.certificate;
      rep.check = "stackify";
      rep.verdict = true;
      rep.root.label = "completion is a stack and the unit is a local equivalence";
      rep.root.fact("completion steps", std::to_string(it));
      rep.root.children.push_back(sr.report.root);
      rep.root.children.push_back(we.report.root);
      rep.root.set(true);
      return out;
    }
    if (it == max_iterations)
      throw IterationBoundExceeded("stack condition still fails after " +
                                   std::to_string(max_iterations) + " completion steps");
    GrpdPlusResult step = plus_construction(site, out.stack, data_cap, mor_cap);
    out.unit = compose_psh_mors(step.unit, out.unit);
    out.stack = std::move(step.presheaf);
  }
}

}  // namespace stackcheck
