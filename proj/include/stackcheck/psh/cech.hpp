#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stackcheck/core/limits.hpp"
#include "stackcheck/psh/presheaf.hpp"
#include "stackcheck/site/topology.hpp"

namespace stackcheck {

/// The Cech groupoid of a cover {u_i: U_i -> X}, as a presheaf: a section
/// over V is a pair (i, v: V -> U_i), and two sections are connected by
/// exactly one morphism when they agree after pushing to X.  Sectionwise
/// this is the codiscrete groupoid on the fibers of ⊔ Hom(V, U_i) ->
/// Hom(V, X), so it comes with an augmentation to the presheaf represented
/// by X.  All pairwise overlaps U_i x_X U_j must exist in the ambient
/// category — the groupoid is the nerve of an internal groupoid on those
/// overlaps, and we refuse to build it where that internal object is
/// missing.
struct CechResult {
  CoverFamily cover;
  PshGrpd nerve;
  std::vector<std::vector<std::pair<int, Mor>>> tag;  // per ambient object, per nerve object: (member, v)
  PshGrpd base;         // the presheaf represented by cover.base
  PshMor augmentation;  // nerve -> base, (i, v) -> u_i . v
};

inline CechResult cech_groupoid(const FinCategory& c, const LimitCache& lim,
                                const CoverFamily& cover) {
  for (Mor ui : cover.members)
    for (Mor uj : cover.members) lim.require_pullback(ui, uj);

  CechResult out;
  out.cover = cover;
  out.tag.resize(c.n_objects());
  out.nerve.value.resize(c.n_objects());
  out.base = yoneda(c, cover.base);
  out.augmentation.component.resize(c.n_objects());

  int k = static_cast<int>(cover.members.size());
  // per ambient object: (member, v) -> nerve object, (o1, o2) -> nerve morphism
  std::vector<std::unordered_map<std::uint64_t, int>> ob_index(c.n_objects());
  std::vector<std::unordered_map<std::uint64_t, int>> mor_index(c.n_objects());

  for (Obj v = 0; v < c.n_objects(); ++v) {
    CategoryData raw;
    std::vector<Mor> push;  // per nerve object, the composite u_i . v as a morphism into the base
    for (int i = 0; i < k; ++i) {
      for (Mor t : c.hom(v, c.dom(cover.members[i]))) {
        ob_index[v].emplace(static_cast<std::uint64_t>(i) * c.n_morphisms() + t,
                            static_cast<int>(raw.object_names.size()));
        out.tag[v].push_back({i, t});
        push.push_back(c.compose(cover.members[i], t));
        raw.object_names.push_back("(" + std::to_string(i) + ", " + c.morphism_name(t) + ")");
      }
    }
    int no = static_cast<int>(raw.object_names.size());
    raw.identity.assign(no, kNone);
    for (int o1 = 0; o1 < no; ++o1) {
      for (int o2 = 0; o2 < no; ++o2) {
        if (push[o1] != push[o2]) continue;
        int mi = static_cast<int>(raw.morphism_names.size());
        mor_index[v].emplace(static_cast<std::uint64_t>(o1) * no + o2, mi);
        raw.morphism_names.push_back(raw.object_names[o1] + " -> " + raw.object_names[o2]);
        raw.dom.push_back(o1);
        raw.cod.push_back(o2);
        if (o1 == o2) raw.identity[o1] = mi;
      }
    }
    int nm = static_cast<int>(raw.morphism_names.size());
    raw.compose.assign(static_cast<std::size_t>(nm) * nm, kNone);
    for (int a = 0; a < nm; ++a)
      for (int b = 0; b < nm; ++b)
        if (raw.cod[a] == raw.dom[b])
          raw.at(b, a) = mor_index[v].at(static_cast<std::uint64_t>(raw.dom[a]) * no + raw.cod[b]);

    out.nerve.value[v] = make_value_groupoid(raw, "cech groupoid at " + c.object_name(v));

    std::unordered_map<Mor, int> pos;
    const std::vector<Mor>& hx = c.hom(v, cover.base);
    for (int i = 0; i < static_cast<int>(hx.size()); ++i) pos.emplace(hx[i], i);
    Functor& aug = out.augmentation.component[v];
    aug.ob.resize(no);
    for (int o = 0; o < no; ++o) aug.ob[o] = pos.at(push[o]);
    aug.mor.resize(nm);
    for (int m = 0; m < nm; ++m) aug.mor[m] = aug.ob[raw.dom[m]];
  }

  out.nerve.restriction.resize(c.n_morphisms());
  for (Mor w = 0; w < c.n_morphisms(); ++w) {
    Obj src = c.cod(w), dst = c.dom(w);
    Functor& rw = out.nerve.restriction[w];
    int no = static_cast<int>(out.tag[src].size());
    rw.ob.resize(no);
    for (int o = 0; o < no; ++o) {
      const std::pair<int, Mor>& t = out.tag[src][o];
      rw.ob[o] = ob_index[dst].at(static_cast<std::uint64_t>(t.first) * c.n_morphisms() +
                                  c.compose(t.second, w));
    }
    const FinGroupoid& sg = out.nerve.value[src];
    int ndst = static_cast<int>(out.tag[dst].size());
    rw.mor.resize(sg.n_morphisms());
    for (Mor m = 0; m < sg.n_morphisms(); ++m)
      rw.mor[m] =
          mor_index[dst].at(static_cast<std::uint64_t>(rw.ob[sg.dom(m)]) * ndst + rw.ob[sg.cod(m)]);
  }

  return out;
}

}  // namespace stackcheck
