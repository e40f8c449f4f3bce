#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "stackcheck/homotopy/stack.hpp"
#include "stackcheck/homotopy/weak_equivalence.hpp"
#include "stackcheck/psh/fiber_product.hpp"
#include "stackcheck/psh/groupoid_object.hpp"

namespace stackcheck {

/// Outcome of the arrows-vs-overlap comparison.  `verdict` is the local
/// equivalence; `levelwise` sharpens it to the levelwise notion when the
/// target is known to be a stack (the two agree there, so a disagreement
/// would be a bug, not geometry).
struct DomainRangeResult {
  bool verdict = false;
  std::optional<bool> levelwise;
  PshMor comparison;  // representable of arrows -> homotopy self-overlap of objects
  WeakEquivalenceResult weak;
  CheckReport report;
};

/// The presentation condition on a groupoid object mapping to a target: the
/// representable of the arrows object must be, locally in the topology, the
/// homotopy fiber product of the objects object with itself over the target.
/// An arrow h is sent to (source∘h, target∘h) together with the structural
/// isomorphism its image under f provides between their two images.
inline DomainRangeResult domain_range_check(const Site& site, const GroupoidObject& g,
                                            const PshGrpd& m, const PshMor& f,
                                            std::size_t data_cap = 500000,
                                            std::size_t mor_cap = 100000) {
  const FinCategory& c = site.cat();
  const LimitCache& lim = site.limits();
  {
    std::vector<std::string> bad = validate_groupoid_object(c, lim, g);
    if (!bad.empty()) throw AxiomViolationError("groupoid object: " + bad.front());
  }
  PshGrpd x = groupoid_object_presheaf(c, lim, g);
  {
    std::vector<std::string> bad = validate_psh_mor(c, x, m, f);
    if (!bad.empty())
      throw CodomainMismatch("map is not one from the groupoid object's presheaf: " + bad.front());
  }

  // both legs: the objects object, included as identity sections, then f
  PshGrpd yon0 = yoneda(c, g.objects);
  PshMor j0;
  j0.component.resize(c.n_objects());
  for (Obj v = 0; v < c.n_objects(); ++v) {
    int no = yon0.value[v].n_objects();  // sections over v are arranged in hom order both sides
    j0.component[v].ob.resize(no);
    j0.component[v].mor.resize(no);
    for (int i = 0; i < no; ++i) {
      j0.component[v].ob[i] = i;
      j0.component[v].mor[i] = x.value[v].id(i);
    }
  }
  PshMor l = compose_psh_mors(f, j0);
  FiberProductResult fp = homotopy_fiber_product(c, yon0, yon0, m, l, l);

  DomainRangeResult out;
  PshGrpd yon1 = yoneda(c, g.arrows);
  out.comparison.component.resize(c.n_objects());
  for (Obj v = 0; v < c.n_objects(); ++v) {
    std::map<Mor, int> pos0;
    const std::vector<Mor>& h0 = c.hom(v, g.objects);
    for (int i = 0; i < static_cast<int>(h0.size()); ++i) pos0.emplace(h0[i], i);
    std::map<std::tuple<Obj, Obj, Mor>, int> triple_at;
    for (int s = 0; s < static_cast<int>(fp.triple[v].size()); ++s)
      triple_at.emplace(std::make_tuple(fp.triple[v][s].a, fp.triple[v][s].b, fp.triple[v][s].phi),
                        s);
    const std::vector<Mor>& h1 = c.hom(v, g.arrows);
    Functor& comp = out.comparison.component[v];
    comp.ob.resize(h1.size());
    comp.mor.resize(h1.size());
    for (int i = 0; i < static_cast<int>(h1.size()); ++i) {
      Obj a = pos0.at(c.compose(g.source, h1[i]));
      Obj b = pos0.at(c.compose(g.target, h1[i]));
      auto it = triple_at.find(std::make_tuple(a, b, f.component[v].mor[i]));
      if (it == triple_at.end())
        throw AxiomViolationError("image of an arrow is missing from the homotopy overlap");
      comp.ob[i] = it->second;
      comp.mor[i] = fp.presheaf.value[v].id(it->second);
    }
  }

  out.weak = is_weak_equivalence(site, yon1, fp.presheaf, out.comparison);
  out.verdict = out.weak.verdict;

  std::string stack_status;
  bool target_is_stack = false;
  try {
    target_is_stack = is_stack(site, m, data_cap, mor_cap).verdict;
    stack_status = target_is_stack ? "yes" : "no";
  } catch (const MissingPullback& e) {
    stack_status = "undecided: no pullback of " + e.left + " and " + e.right;
  }
  if (target_is_stack)
    out.levelwise = is_levelwise_equivalence(c, yon1, fp.presheaf, out.comparison);

  CheckReport& rep = out.report;
  rep.check = "domain_range_check";
  rep.verdict = out.verdict;
  rep.root.label = "arrows present the homotopy self-overlap of objects over the target";
  std::string sizes;
  for (Obj v = 0; v < c.n_objects(); ++v) {
    if (v) sizes += ",";
    sizes += std::to_string(fp.triple[v].size());
  }
  rep.root.fact("homotopy overlap sizes", sizes);
  rep.root.fact("target is a stack", stack_status);
  if (out.levelwise) rep.root.fact("levelwise equivalence", *out.levelwise ? "yes" : "no");
  rep.root.children.push_back(out.weak.report.root);
  rep.root.set(out.verdict);
  return out;
}

}  // namespace stackcheck
