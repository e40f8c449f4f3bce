#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "stackcheck/core/errors.hpp"
#include "stackcheck/psh/presheaf.hpp"

namespace stackcheck {

/// The homotopy fiber product of f: M1 -> N and g: M2 -> N, computed
/// sectionwise as the iso-comma groupoid: objects over an ambient V are
/// triples (a, b, phi) with a in M1(V), b in M2(V) and phi: f(a) -> g(b) in
/// N(V); a morphism (a, b, phi) -> (a', b', phi') is a pair (alpha, beta)
/// making the square commute, so for fixed (alpha, beta, phi) the target
/// phi' = g(beta) . phi . f(alpha)^-1 is forced.  Restriction acts on all
/// three coordinates, and the projections come with the tautological
/// homotopy between f . left and g . right.
struct FiberProductResult {
  struct Triple {
    Obj a = -1, b = -1;  // objects of M1(V) and M2(V)
    Mor phi = kNone;     // f(a) -> g(b) in N(V)
  };
  struct Pair {
    Mor alpha = kNone, beta = kNone;  // morphisms of M1(V) and M2(V)
  };

  PshGrpd presheaf;
  PshMor left, right;      // projections onto M1 and M2
  Homotopy2Cell homotopy;  // from (f after left) to (g after right)
  std::vector<std::vector<Triple>> triple;  // per ambient object, per value object
  std::vector<std::vector<Pair>> pair;      // per ambient object, per value morphism
};

inline FiberProductResult homotopy_fiber_product(const FinCategory& c, const PshGrpd& m1,
                                                 const PshGrpd& m2, const PshGrpd& n,
                                                 const PshMor& f, const PshMor& g) {
  for (Obj x = 0; x < c.n_objects(); ++x) {
    if (f.component.size() <= static_cast<std::size_t>(x) ||
        !validate_functor(m1.value[x].cat(), n.value[x].cat(), f.component[x]).empty())
      throw CodomainMismatch("left leg does not land in the shared codomain at " +
                             c.object_name(x));
    if (g.component.size() <= static_cast<std::size_t>(x) ||
        !validate_functor(m2.value[x].cat(), n.value[x].cat(), g.component[x]).empty())
      throw CodomainMismatch("right leg does not land in the shared codomain at " +
                             c.object_name(x));
  }

  FiberProductResult out;
  out.triple.resize(c.n_objects());
  out.pair.resize(c.n_objects());
  out.presheaf.value.resize(c.n_objects());
  out.left.component.resize(c.n_objects());
  out.right.component.resize(c.n_objects());
  out.homotopy.component.resize(c.n_objects());

  // per ambient object: triple -> value-object index, (source, alpha, beta) -> value-morphism index
  std::vector<std::unordered_map<std::uint64_t, int>> ob_index(c.n_objects());
  std::vector<std::unordered_map<std::uint64_t, int>> mor_index(c.n_objects());

  auto ob_key = [](const FinGroupoid& g2, const FinGroupoid& vn, const FiberProductResult::Triple& t) {
    return (static_cast<std::uint64_t>(t.a) * g2.n_objects() + t.b) * vn.n_morphisms() + t.phi;
  };

  for (Obj x = 0; x < c.n_objects(); ++x) {
    const FinGroupoid& g1 = m1.value[x];
    const FinGroupoid& g2 = m2.value[x];
    const FinGroupoid& vn = n.value[x];
    const Functor& fx = f.component[x];
    const Functor& gx = g.component[x];

    CategoryData raw;
    for (Obj a = 0; a < g1.n_objects(); ++a) {
      for (Obj b = 0; b < g2.n_objects(); ++b) {
        for (Mor phi : vn.cat().hom(fx.ob[a], gx.ob[b])) {
          FiberProductResult::Triple t{a, b, phi};
          ob_index[x].emplace(ob_key(g2, vn, t), static_cast<int>(out.triple[x].size()));
          out.triple[x].push_back(t);
          raw.object_names.push_back("(" + g1.object_name(a) + ", " + g2.object_name(b) + "; " +
                                     vn.morphism_name(phi) + ")");
        }
      }
    }

    int nt = static_cast<int>(out.triple[x].size());
    raw.identity.assign(nt, kNone);
    std::vector<int> target;  // per value morphism
    for (int s = 0; s < nt; ++s) {
      const FiberProductResult::Triple& t = out.triple[x][s];
      for (Mor alpha = 0; alpha < g1.n_morphisms(); ++alpha) {
        if (g1.dom(alpha) != t.a) continue;
        for (Mor beta = 0; beta < g2.n_morphisms(); ++beta) {
          if (g2.dom(beta) != t.b) continue;
          // phi' = g(beta) . phi . f(alpha)^-1
          Mor phi2 = vn.cat().compose(vn.cat().compose(gx.mor[beta], t.phi),
                                      vn.inverse(fx.mor[alpha]));
          FiberProductResult::Triple t2{g1.cod(alpha), g2.cod(beta), phi2};
          int s2 = ob_index[x].at(ob_key(g2, vn, t2));
          std::uint64_t key =
              (static_cast<std::uint64_t>(s) * g1.n_morphisms() + alpha) * g2.n_morphisms() + beta;
          int mi = static_cast<int>(out.pair[x].size());
          mor_index[x].emplace(key, mi);
          out.pair[x].push_back({alpha, beta});
          raw.morphism_names.push_back("(" + g1.morphism_name(alpha) + ", " +
                                       g2.morphism_name(beta) + ") @ " + raw.object_names[s]);
          raw.dom.push_back(s);
          raw.cod.push_back(s2);
          target.push_back(s2);
          if (alpha == g1.id(t.a) && beta == g2.id(t.b)) raw.identity[s] = mi;
        }
      }
    }

    int nm = static_cast<int>(out.pair[x].size());
    raw.compose.assign(static_cast<std::size_t>(nm) * nm, kNone);
    for (int m1i = 0; m1i < nm; ++m1i) {
      for (int m2i = 0; m2i < nm; ++m2i) {
        if (target[m1i] != raw.dom[m2i]) continue;
        Mor alpha = g1.compose(out.pair[x][m2i].alpha, out.pair[x][m1i].alpha);
        Mor beta = g2.compose(out.pair[x][m2i].beta, out.pair[x][m1i].beta);
        std::uint64_t key =
            (static_cast<std::uint64_t>(raw.dom[m1i]) * g1.n_morphisms() + alpha) *
                g2.n_morphisms() +
            beta;
        raw.at(m2i, m1i) = mor_index[x].at(key);
      }
    }

    out.presheaf.value[x] =
        make_value_groupoid(raw, "fiber product at " + c.object_name(x));

    Functor& lx = out.left.component[x];
    Functor& rx = out.right.component[x];
    NatIso& hx = out.homotopy.component[x];
    lx.ob.resize(nt);
    rx.ob.resize(nt);
    hx.component.resize(nt);
    for (int s = 0; s < nt; ++s) {
      lx.ob[s] = out.triple[x][s].a;
      rx.ob[s] = out.triple[x][s].b;
      hx.component[s] = out.triple[x][s].phi;
    }
    lx.mor.resize(nm);
    rx.mor.resize(nm);
    for (int mi = 0; mi < nm; ++mi) {
      lx.mor[mi] = out.pair[x][mi].alpha;
      rx.mor[mi] = out.pair[x][mi].beta;
    }
  }

  // restriction acts coordinatewise; strictness of the inputs makes it strict
  out.presheaf.restriction.resize(c.n_morphisms());
  for (Mor w = 0; w < c.n_morphisms(); ++w) {
    Obj src = c.cod(w), dst = c.dom(w);
    const FinGroupoid& dg2 = m2.value[dst];
    const FinGroupoid& dvn = n.value[dst];
    Functor& rw = out.presheaf.restriction[w];
    rw.ob.resize(out.triple[src].size());
    for (std::size_t s = 0; s < out.triple[src].size(); ++s) {
      const FiberProductResult::Triple& t = out.triple[src][s];
      FiberProductResult::Triple rt{m1.restriction[w].ob[t.a], m2.restriction[w].ob[t.b],
                                    n.restriction[w].mor[t.phi]};
      rw.ob[s] = ob_index[dst].at(ob_key(dg2, dvn, rt));
    }
    rw.mor.resize(out.pair[src].size());
    for (std::size_t mi = 0; mi < out.pair[src].size(); ++mi) {
      const FiberProductResult::Pair& pr = out.pair[src][mi];
      Obj s = out.presheaf.value[src].dom(static_cast<Mor>(mi));
      std::uint64_t key = (static_cast<std::uint64_t>(rw.ob[s]) * m1.value[dst].n_morphisms() +
                           m1.restriction[w].mor[pr.alpha]) *
                              m2.value[dst].n_morphisms() +
                          m2.restriction[w].mor[pr.beta];
      rw.mor[mi] = mor_index[dst].at(key);
    }
  }

  return out;
}

}  // namespace stackcheck
