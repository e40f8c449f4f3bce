#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "stackcheck/site/topology.hpp"

namespace stackcheck {

/// A presheaf of finite sets: a section count per object and, per morphism
/// m, the restriction table P(cod m) → P(dom m).  Section labels are carried
/// for reports only and never affect computation.
struct SetPresheaf {
  std::vector<int> size;                         // per object
  std::vector<std::vector<int>> restriction;     // per morphism: index table
  std::vector<std::vector<std::string>> labels;  // per object, per section (may be empty)

  int restrict_section(Mor m, int s) const { return restriction[m][s]; }
  const std::string& label(Obj x, int s) const { return labels[x][s]; }
};

inline void default_labels(SetPresheaf& p) {
  p.labels.resize(p.size.size());
  for (std::size_t x = 0; x < p.size.size(); ++x) {
    p.labels[x].resize(p.size[x]);
    for (int s = 0; s < p.size[x]; ++s)
      if (p.labels[x][s].empty()) p.labels[x][s] = std::to_string(s);
  }
}

/// Strict contravariant functoriality by direct enumeration.
inline std::vector<std::string> validate_set_presheaf(const FinCategory& c, const SetPresheaf& p) {
  std::vector<std::string> v;
  if (p.size.size() != static_cast<std::size_t>(c.n_objects()) ||
      p.restriction.size() != static_cast<std::size_t>(c.n_morphisms())) {
    v.push_back("table sizes disagree with the ambient category");
    return v;
  }
  for (Mor m = 0; m < c.n_morphisms(); ++m) {
    if (p.restriction[m].size() != static_cast<std::size_t>(p.size[c.cod(m)])) {
      v.push_back("restriction along " + c.morphism_name(m) + " has wrong arity");
      return v;
    }
    for (int s : p.restriction[m])
      if (s < 0 || s >= p.size[c.dom(m)]) {
        v.push_back("restriction along " + c.morphism_name(m) + " escapes its section set");
        return v;
      }
  }
  for (Obj x = 0; x < c.n_objects(); ++x)
    for (int s = 0; s < p.size[x]; ++s)
      if (p.restrict_section(c.id(x), s) != s) {
        v.push_back("identity restriction acts nontrivially at " + c.object_name(x));
        return v;
      }
  for (Mor f = 0; f < c.n_morphisms(); ++f)
    for (Mor g : c.out_of(c.cod(f))) {
      Mor gf = c.try_compose(g, f);
      if (gf == kNone) continue;
      for (int s = 0; s < p.size[c.cod(g)]; ++s)
        if (p.restrict_section(f, p.restrict_section(g, s)) != p.restrict_section(gf, s)) {
          v.push_back("functoriality fails at (" + c.morphism_name(g) + ", " +
                      c.morphism_name(f) + ")");
          return v;
        }
    }
  return v;
}

/// Hom(−, z) as a set-presheaf; sections over x are indexed by the position
/// of the morphism in hom(x, z), labeled with morphism names.
inline SetPresheaf representable_set_presheaf(const FinCategory& c, Obj z) {
  SetPresheaf p;
  p.size.resize(c.n_objects());
  p.labels.resize(c.n_objects());
  std::vector<std::unordered_map<Mor, int>> pos(c.n_objects());
  for (Obj x = 0; x < c.n_objects(); ++x) {
    const std::vector<Mor>& h = c.hom(x, z);
    p.size[x] = static_cast<int>(h.size());
    for (int i = 0; i < p.size[x]; ++i) {
      pos[x].emplace(h[i], i);
      p.labels[x].push_back(c.morphism_name(h[i]));
    }
  }
  p.restriction.resize(c.n_morphisms());
  for (Mor m = 0; m < c.n_morphisms(); ++m) {
    const std::vector<Mor>& h = c.hom(c.cod(m), z);
    p.restriction[m].resize(h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
      p.restriction[m][i] = pos[c.dom(m)].at(c.try_compose(h[i], m));
  }
  return p;
}

/// Constant presheaf with k sections everywhere and identity restrictions.
inline SetPresheaf constant_set_presheaf(const FinCategory& c, int k) {
  SetPresheaf p;
  p.size.assign(c.n_objects(), k);
  p.restriction.resize(c.n_morphisms());
  for (Mor m = 0; m < c.n_morphisms(); ++m) {
    p.restriction[m].resize(k);
    for (int s = 0; s < k; ++s) p.restriction[m][s] = s;
  }
  default_labels(p);
  return p;
}

/// A matching family for a sieve, stored as one section per factorization
/// class present in the sieve (ascending class id).  The value on an
/// arbitrary member r∘u of the sieve is the restriction P(u) of the value on
/// the class representative r; the compatibility constraints make that
/// independent of the chosen factorization.
struct MatchingFamily {
  std::vector<int> value;  // parallel to the ascending list of classes in the sieve
};

/// One compatibility constraint between class positions a and b of a family:
/// P(u)(value[a]) must equal P(v)(value[b]).
struct MatchConstraint {
  int a, b;
  Mor u, v;
};

/// The classes of a mask in ascending order.
inline std::vector<int> mask_classes(std::uint64_t mask) {
  std::vector<int> ks;
  for (int k = 0; k < 64; ++k)
    if (mask >> k & 1) ks.push_back(k);
  return ks;
}

/// All pairs (u, v) with r_a∘u = r_b∘v, collected by bucketing composites.
/// These are exactly the agreements a matching family must satisfy.
inline std::vector<MatchConstraint> matching_constraints(const FinCategory& c,
                                                         const FactorClasses& fc,
                                                         std::uint64_t mask) {
  std::vector<int> ks = mask_classes(mask);
  std::vector<MatchConstraint> out;
  for (std::size_t ia = 0; ia < ks.size(); ++ia)
    for (std::size_t ib = ia; ib < ks.size(); ++ib) {
      Mor ra = fc.rep[ks[ia]], rb = fc.rep[ks[ib]];
      for (Obj v = 0; v < c.n_objects(); ++v) {
        std::unordered_map<Mor, std::vector<Mor>> bucket;
        for (Mor u : c.hom(v, c.dom(ra))) bucket[c.try_compose(ra, u)].push_back(u);
        for (Mor w : c.hom(v, c.dom(rb))) {
          auto it = bucket.find(c.try_compose(rb, w));
          if (it == bucket.end()) continue;
          for (Mor u : it->second) {
            if (ia == ib && u == w) continue;  // trivially satisfied
            out.push_back({static_cast<int>(ia), static_cast<int>(ib), u, w});
          }
        }
      }
    }
  return out;
}

/// Backtracking enumeration of all matching families for the sieve given by
/// `mask`, in lexicographic order of their value vectors.
inline std::vector<MatchingFamily> enumerate_matching_families(const FinCategory& c,
                                                               const FactorClasses& fc,
                                                               std::uint64_t mask,
                                                               const SetPresheaf& p,
                                                               std::size_t cap = 2000000) {
  std::vector<int> ks = mask_classes(mask);
  std::vector<MatchConstraint> cons = matching_constraints(c, fc, mask);
  // constraints indexed by the later of the two classes they touch
  std::vector<std::vector<const MatchConstraint*>> at(ks.size());
  for (const MatchConstraint& mc : cons) at[std::max(mc.a, mc.b)].push_back(&mc);

  std::vector<MatchingFamily> out;
  MatchingFamily cur;
  cur.value.assign(ks.size(), -1);
  std::vector<std::size_t> stack{0};
  // iterative backtracking to keep deep sieves off the call stack
  std::vector<int> next(ks.size() + 1, 0);
  std::size_t depth = 0;
  if (ks.empty()) {
    out.push_back(cur);  // the empty sieve has exactly one (empty) family
    return out;
  }
  while (true) {
    if (depth == ks.size()) {
      out.push_back(cur);
      if (out.size() > cap) throw SizeBound("matching families exceed " + std::to_string(cap));
      --depth;
      continue;
    }
    Obj w = c.dom(fc.rep[ks[depth]]);
    int s = next[depth]++;
    if (s >= p.size[w]) {
      next[depth] = 0;
      if (depth == 0) break;
      --depth;
      continue;
    }
    cur.value[depth] = s;
    bool ok = true;
    for (const MatchConstraint* mc : at[depth]) {
      if (p.restrict_section(mc->u, cur.value[mc->a]) !=
          p.restrict_section(mc->v, cur.value[mc->b])) {
        ok = false;
        break;
      }
    }
    if (ok) ++depth;
  }
  return out;
}

/// Sections of p over x that restrict to the given family on the sieve.
inline std::vector<int> amalgamations(const FactorClasses& fc, std::uint64_t mask,
                                      const SetPresheaf& p, Obj x, const MatchingFamily& fam) {
  std::vector<int> ks = mask_classes(mask);
  std::vector<int> out;
  for (int s = 0; s < p.size[x]; ++s) {
    bool match = true;
    for (std::size_t i = 0; i < ks.size() && match; ++i)
      if (p.restrict_section(fc.rep[ks[i]], s) != fam.value[i]) match = false;
    if (match) out.push_back(s);
  }
  return out;
}

/// Where the equalizer sheaf condition fails, if anywhere: an object, a
/// covering sieve, and a matching family with amalgamation count ≠ 1.
struct SheafViolation {
  Obj base;
  std::uint64_t mask;
  MatchingFamily family;
  int amalgamation_count;
};

inline std::optional<SheafViolation> sheaf_condition_violation(const Site& site,
                                                               const SetPresheaf& p) {
  const FinCategory& c = site.cat();
  for (Obj x = 0; x < c.n_objects(); ++x) {
    const FactorClasses& fc = site.classes(x);
    const std::vector<std::uint64_t>& universe = site.sieve_universe(x);
    for (std::uint64_t mask : universe) {
      if (!site.is_covering_mask(x, mask)) continue;
      for (const MatchingFamily& fam : enumerate_matching_families(c, fc, mask, p)) {
        int n = static_cast<int>(amalgamations(fc, mask, p, x, fam).size());
        if (n != 1) return SheafViolation{x, mask, fam, n};
      }
    }
  }
  return std::nullopt;
}

inline bool is_sheaf(const Site& site, const SetPresheaf& p) {
  return !sheaf_condition_violation(site, p).has_value();
}

/// One application of the plus construction, together with its unit.  The
/// sieve-indexed colimit of matching-family sets collapses to its terminal
/// stage: the minimal covering sieve (the intersection of all covering
/// sieves, reached because covering sieves are intersection-closed).
struct PlusResult {
  SetPresheaf presheaf;
  std::vector<std::vector<int>> unit;  // per object: p(x) → presheaf(x)
};

inline PlusResult plus_construction(const Site& site, const SetPresheaf& p) {
  const FinCategory& c = site.cat();
  int no = c.n_objects();
  PlusResult r;
  r.presheaf.size.resize(no);
  r.presheaf.labels.resize(no);
  r.presheaf.restriction.resize(c.n_morphisms());
  r.unit.resize(no);

  std::vector<std::vector<MatchingFamily>> fams(no);
  std::vector<std::map<std::vector<int>, int>> index(no);
  std::vector<std::vector<int>> classes(no);
  for (Obj x = 0; x < no; ++x) {
    classes[x] = mask_classes(site.minimal_covering_mask(x));
    fams[x] = enumerate_matching_families(c, site.classes(x), site.minimal_covering_mask(x), p);
    r.presheaf.size[x] = static_cast<int>(fams[x].size());
    for (int i = 0; i < r.presheaf.size[x]; ++i) index[x].emplace(fams[x][i].value, i);
  }

  // restriction along g: Y→X evaluates the family at the members g∘rep and
  // re-reads them as a family over the minimal sieve on Y
  auto value_at_member = [&](Obj x, const MatchingFamily& fam, Mor h) {
    const FactorClasses& fc = site.classes(x);
    int k = fc.class_of[h];
    for (std::size_t i = 0; i < classes[x].size(); ++i)
      if (classes[x][i] == k) {
        for (Mor u : c.hom(c.dom(h), c.dom(fc.rep[k])))
          if (c.try_compose(fc.rep[k], u) == h) return p.restrict_section(u, fam.value[i]);
        throw AxiomViolationError("class member fails to factor through its representative");
      }
    throw AxiomViolationError("sieve member outside the minimal covering sieve");
  };
  for (Mor g = 0; g < c.n_morphisms(); ++g) {
    Obj x = c.cod(g), y = c.dom(g);
    r.presheaf.restriction[g].resize(r.presheaf.size[x]);
    for (int i = 0; i < r.presheaf.size[x]; ++i) {
      MatchingFamily pulled;
      pulled.value.reserve(classes[y].size());
      for (int k : classes[y]) {
        // g∘rep lies in the minimal sieve on X: the pullback of that sieve is
        // covering on Y, hence contains the minimal sieve on Y
        pulled.value.push_back(value_at_member(x, fams[x][i], c.try_compose(g, site.classes(y).rep[k])));
      }
      auto it = index[y].find(pulled.value);
      if (it == index[y].end())
        throw AxiomViolationError("restriction of a matching family is not matching");
      r.presheaf.restriction[g][i] = it->second;
    }
  }

  for (Obj x = 0; x < no; ++x) {
    r.unit[x].resize(p.size[x]);
    for (int s = 0; s < p.size[x]; ++s) {
      std::vector<int> v;
      v.reserve(classes[x].size());
      for (int k : classes[x]) v.push_back(p.restrict_section(site.classes(x).rep[k], s));
      auto it = index[x].find(v);
      if (it == index[x].end())
        throw AxiomViolationError("unit image of a section is not a matching family");
      r.unit[x][s] = it->second;
    }
    r.presheaf.labels[x].resize(r.presheaf.size[x]);
    for (int i = 0; i < r.presheaf.size[x]; ++i) {
      std::string& lab = r.presheaf.labels[x][i];
      lab = "[";
      for (std::size_t j = 0; j < fams[x][i].value.size(); ++j) {
        if (j) lab += ",";
        Obj w = c.dom(site.classes(x).rep[classes[x][j]]);
        lab += p.labels.empty() ? std::to_string(fams[x][i].value[j])
                                : p.labels[w][fams[x][i].value[j]];
      }
      lab += "]";
    }
  }
  return r;
}

/// Sheafification: the plus construction twice, with the composite unit.
/// The result is asserted to be a sheaf — a failed assertion would mean the
/// construction itself is broken, not the input.
struct SheafifyResult {
  SetPresheaf sheaf;
  std::vector<std::vector<int>> unit;  // per object: p(x) → sheaf(x)
};

inline SheafifyResult sheafify(const Site& site, const SetPresheaf& p) {
  PlusResult once = plus_construction(site, p);
  PlusResult twice = plus_construction(site, once.presheaf);
  SheafifyResult r;
  r.sheaf = std::move(twice.presheaf);
  r.unit.resize(p.size.size());
  for (std::size_t x = 0; x < p.size.size(); ++x) {
    r.unit[x].resize(p.size[x]);
    for (int s = 0; s < p.size[x]; ++s) r.unit[x][s] = twice.unit[x][once.unit[x][s]];
  }
  if (!is_sheaf(site, r.sheaf))
    throw AxiomViolationError("sheafification failed to produce a sheaf");
  return r;
}

/// True when the unit tables are bijections everywhere (used for the
/// "already a sheaf" fixed-point checks).
inline bool unit_is_isomorphism(const SetPresheaf& p, const SheafifyResult& r) {
  for (std::size_t x = 0; x < p.size.size(); ++x) {
    if (p.size[x] != r.sheaf.size[x]) return false;
    std::vector<char> hit(p.size[x], 0);
    for (int s = 0; s < p.size[x]; ++s) {
      if (hit[r.unit[x][s]]) return false;
      hit[r.unit[x][s]] = 1;
    }
  }
  return true;
}

}  // namespace stackcheck
