#pragma once

#include <string>
#include <vector>

#include "stackcheck/harness/report.hpp"
#include "stackcheck/site/set_presheaf.hpp"
#include "stackcheck/site/topology.hpp"

namespace stackcheck {

/// Short human-readable tag for a sieve: the names of its class
/// representatives.
inline std::string sieve_tag(const FinCategory& c, const FactorClasses& fc, std::uint64_t mask) {
  std::string out = "{";
  bool first = true;
  for (int k : mask_classes(mask)) {
    if (!first) out += ", ";
    first = false;
    out += c.morphism_name(fc.rep[k]);
  }
  out += "}";
  return out;
}

/// Every representable presheaf satisfies the equalizer condition for every
/// covering sieve.  The witness on failure names the representing object,
/// the sieve, the matching family, and its amalgamation count.
inline CheckReport is_subcanonical(const Site& site) {
  const FinCategory& c = site.cat();
  CheckReport rep;
  rep.check = "is_subcanonical";
  rep.verdict = true;
  rep.root.label = "representables are sheaves";
  long long sieves_checked = 0, families_checked = 0;
  for (Obj z = 0; z < c.n_objects() && rep.verdict; ++z) {
    SetPresheaf yz = representable_set_presheaf(c, z);
    for (Obj x = 0; x < c.n_objects() && rep.verdict; ++x) {
      const FactorClasses& fc = site.classes(x);
      for (std::uint64_t mask : site.sieve_universe(x)) {
        if (!site.is_covering_mask(x, mask)) continue;
        ++sieves_checked;
        for (const MatchingFamily& fam : enumerate_matching_families(c, fc, mask, yz)) {
          ++families_checked;
          int n = static_cast<int>(amalgamations(fc, mask, yz, x, fam).size());
          if (n != 1) {
            rep.verdict = false;
            ReportNode& w = rep.root.child("violation");
            w.set(false);
            w.fact("representing object", c.object_name(z));
            w.fact("base", c.object_name(x));
            w.fact("sieve", sieve_tag(c, fc, mask));
            std::string vals;
            std::vector<int> ks = mask_classes(mask);
            for (std::size_t i = 0; i < ks.size(); ++i) {
              if (i) vals += ", ";
              vals += c.morphism_name(fc.rep[ks[i]]) + " -> " +
                      yz.label(c.dom(fc.rep[ks[i]]), fam.value[i]);
            }
            w.fact("matching family", vals);
            w.fact("amalgamations", std::to_string(n));
            break;
          }
        }
      }
    }
  }
  rep.root.fact("covering sieves checked", std::to_string(sieves_checked));
  rep.root.fact("matching families checked", std::to_string(families_checked));
  rep.root.set(rep.verdict);
  return rep;
}

/// Locality of the covering table: for every basis cover {u_i → X} and every
/// sieve T on X, if every pullback u_i*T is covering then T is covering.
/// Sieves stand in for arbitrary collections {V_j → X}: the condition
/// depends only on the sieve a collection generates, and every sieve is
/// generated by its class representatives.  On a saturated site this is the
/// local-character axiom restricted to basis covers; on a raw-basis site it
/// can fail honestly.
inline CheckReport is_local(const Site& site) {
  const FinCategory& c = site.cat();
  CheckReport rep;
  rep.check = "is_local";
  rep.verdict = true;
  rep.root.label = "covers are local on the target";
  long long candidates = 0;
  for (const CoverFamily& fam : site.basis()) {
    if (!rep.verdict) break;
    Obj x = fam.base;
    for (std::uint64_t tmask : site.sieve_universe(x)) {
      ++candidates;
      bool hypothesis = true;
      for (Mor u : fam.members) {
        if (!site.is_covering_mask(c.dom(u), site.pullback_mask(u, tmask))) {
          hypothesis = false;
          break;
        }
      }
      if (!hypothesis || site.is_covering_mask(x, tmask)) continue;
      rep.verdict = false;
      ReportNode& w = rep.root.child("violation");
      w.set(false);
      w.fact("base", c.object_name(x));
      std::string mem = "{";
      for (std::size_t i = 0; i < fam.members.size(); ++i) {
        if (i) mem += ", ";
        mem += c.morphism_name(fam.members[i]);
      }
      mem += "}";
      w.fact("cover", mem);
      w.fact("collection generating", sieve_tag(c, site.classes(x), tmask));
      w.fact("detail", "every pullback of the collection covers the cover member, "
                       "but the collection does not cover the base");
      break;
    }
  }
  rep.root.fact("cover/collection pairs checked", std::to_string(candidates));
  rep.root.set(rep.verdict);
  return rep;
}

/// Direct re-verification of the three Grothendieck-topology axioms on the
/// computed covering table (maximal sieves covering, pullback stability,
/// local character).  Used by the property suite; a saturated build must
/// always pass.
inline CheckReport topology_axioms_report(const Site& site) {
  const FinCategory& c = site.cat();
  CheckReport rep;
  rep.check = "topology_axioms";
  rep.verdict = true;
  rep.root.label = "Grothendieck topology axioms";

  ReportNode& maximal = rep.root.child("maximal sieves covering");
  maximal.set(true);
  for (Obj x = 0; x < c.n_objects(); ++x) {
    if (!site.is_covering(maximal_sieve(c, x))) {
      maximal.set(false).fact("object", c.object_name(x));
      rep.verdict = false;
      break;
    }
  }

  ReportNode& stab = rep.root.child("pullback stability");
  stab.set(true);
  for (Mor g = 0; g < c.n_morphisms() && stab.verdict.value(); ++g) {
    Obj x = c.cod(g);
    for (std::uint64_t mask : site.sieve_universe(x)) {
      if (!site.is_covering_mask(x, mask)) continue;
      if (!site.is_covering_mask(c.dom(g), site.pullback_mask(g, mask))) {
        stab.set(false).fact("morphism", c.morphism_name(g));
        stab.fact("sieve", sieve_tag(c, site.classes(x), mask));
        rep.verdict = false;
        break;
      }
    }
  }

  ReportNode& local = rep.root.child("local character");
  local.set(true);
  for (Obj x = 0; x < c.n_objects() && local.verdict.value(); ++x) {
    const FactorClasses& fc = site.classes(x);
    for (std::uint64_t smask : site.sieve_universe(x)) {
      if (!site.is_covering_mask(x, smask)) continue;
      for (std::uint64_t tmask : site.sieve_universe(x)) {
        if (site.is_covering_mask(x, tmask)) continue;
        bool forced = true;
        for (int k : mask_classes(smask)) {
          Mor r = fc.rep[k];
          if (!site.is_covering_mask(c.dom(r), site.pullback_mask(r, tmask))) {
            forced = false;
            break;
          }
        }
        if (forced) {
          local.set(false).fact("base", c.object_name(x));
          local.fact("covering sieve", sieve_tag(c, fc, smask));
          local.fact("uncovered sieve", sieve_tag(c, fc, tmask));
          rep.verdict = false;
          break;
        }
      }
      if (!local.verdict.value()) break;
    }
  }

  rep.root.set(rep.verdict);
  return rep;
}

/// Basis sanity: families end where declared, and each pulled-back basis
/// family is refined by some basis family (identity families are implied on
/// every object).  Pullbacks of members must exist for the check to run.
inline CheckReport basis_axioms_report(const Site& site) {
  const FinCategory& c = site.cat();
  CheckReport rep;
  rep.check = "basis_axioms";
  rep.verdict = true;
  rep.root.label = "cover basis axioms";
  for (const CoverFamily& fam : site.basis()) {
    for (Mor u : fam.members)
      if (c.cod(u) != fam.base)
        throw AmbientMismatch("cover member " + c.morphism_name(u) + " does not end at " +
                              c.object_name(fam.base));
  }

  auto refines = [&](const std::vector<Mor>& fine, const std::vector<Mor>& coarse) {
    // every member of `fine` factors through some member of `coarse`
    for (Mor f : fine) {
      bool ok = false;
      for (Mor co : coarse) {
        if (factors_through(c, f, co)) {
          ok = true;
          break;
        }
      }
      if (!ok) return false;
    }
    return true;
  };

  for (const CoverFamily& fam : site.basis()) {
    if (!rep.verdict) break;
    for (Mor g : c.into(fam.base)) {
      // pulled-back family on dom(g)
      std::vector<Mor> pulled;
      for (Mor u : fam.members)
        pulled.push_back(site.limits().require_pullback(u, g).q);
      bool refined = refines({c.id(c.dom(g))}, pulled);  // implied identity family
      for (const CoverFamily* cand : site.basis_on(c.dom(g))) {
        if (refined) break;
        refined = refines(cand->members, pulled);
      }
      if (!refined) {
        rep.verdict = false;
        ReportNode& w = rep.root.child("violation");
        w.set(false);
        w.fact("family base", c.object_name(fam.base));
        w.fact("pulled along", c.morphism_name(g));
        break;
      }
    }
  }
  rep.root.set(rep.verdict);
  return rep;
}

}  // namespace stackcheck
