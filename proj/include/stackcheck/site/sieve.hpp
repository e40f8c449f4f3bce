#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "stackcheck/core/fincat.hpp"

namespace stackcheck {

/// A sieve on `base`: a set of morphisms into base closed under
/// precomposition.  Membership is a flag per morphism of the ambient
/// category; flags can only be set on morphisms whose codomain is base.
struct Sieve {
  Obj base = -1;
  std::vector<char> member;  // indexed by Mor

  bool contains(Mor m) const { return member[m] != 0; }
};

inline Sieve empty_sieve(const FinCategory& c, Obj x) {
  Sieve s;
  s.base = x;
  s.member.assign(c.n_morphisms(), 0);
  return s;
}

inline Sieve maximal_sieve(const FinCategory& c, Obj x) {
  Sieve s = empty_sieve(c, x);
  for (Mor m : c.into(x)) s.member[m] = 1;
  return s;
}

/// Smallest sieve containing the given morphisms into x: all their
/// precompositions.
inline Sieve sieve_generated_by(const FinCategory& c, Obj x, const std::vector<Mor>& members) {
  Sieve s = empty_sieve(c, x);
  for (Mor m : members) {
    if (c.cod(m) != x)
      throw AmbientMismatch("sieve generator " + c.morphism_name(m) + " does not end at " +
                            c.object_name(x));
    for (Mor u : c.into(c.dom(m))) s.member[c.try_compose(m, u)] = 1;
    s.member[m] = 1;
  }
  return s;
}

/// Checks closure under precomposition (and that members end at base).
inline bool is_sieve(const FinCategory& c, const Sieve& s) {
  for (Mor m = 0; m < c.n_morphisms(); ++m) {
    if (!s.contains(m)) continue;
    if (c.cod(m) != s.base) return false;
    for (Mor u : c.into(c.dom(m)))
      if (!s.contains(c.try_compose(m, u))) return false;
  }
  return true;
}

/// g*S = { h ending at dom(g) | g∘h ∈ S }, a sieve on dom(g).
inline Sieve pullback_sieve(const FinCategory& c, const Sieve& s, Mor g) {
  if (c.cod(g) != s.base)
    throw AmbientMismatch("cannot pull back a sieve on " + c.object_name(s.base) + " along " +
                          c.morphism_name(g));
  Sieve r = empty_sieve(c, c.dom(g));
  for (Mor h : c.into(c.dom(g)))
    if (s.contains(c.try_compose(g, h))) r.member[h] = 1;
  return r;
}

inline bool sieves_equal(const Sieve& a, const Sieve& b) {
  return a.base == b.base && a.member == b.member;
}

inline bool sieve_subset(const Sieve& a, const Sieve& b) {
  if (a.base != b.base) return false;
  for (std::size_t m = 0; m < a.member.size(); ++m)
    if (a.member[m] && !b.member[m]) return false;
  return true;
}

inline std::vector<Mor> sieve_members(const FinCategory& c, const Sieve& s) {
  std::vector<Mor> out;
  for (Mor m : c.into(s.base))
    if (s.contains(m)) out.push_back(m);
  return out;
}

/// Morphisms into a fixed object, grouped by mutual factorization: f and g
/// share a class when each factors through the other.  Sieves on the object
/// are exactly the downsets of the induced poset on classes, which keeps
/// sieve enumeration exponential in the (small) class count rather than in
/// the morphism count.
struct FactorClasses {
  Obj base = -1;
  int count = 0;
  std::vector<int> class_of;         // indexed by Mor; -1 for morphisms not into base
  std::vector<Mor> rep;              // per class, first member in declaration order
  std::vector<std::uint64_t> below;  // per class, bitmask of classes factoring through it (incl. self)
};

inline constexpr int kMaxFactorClasses = 64;

/// f factors through g (both into the same object) iff some u has f = g∘u.
inline bool factors_through(const FinCategory& c, Mor f, Mor g) {
  for (Mor u : c.hom(c.dom(f), c.dom(g)))
    if (c.try_compose(g, u) == f) return true;
  return false;
}

inline FactorClasses factor_classes(const FinCategory& c, Obj x) {
  FactorClasses fc;
  fc.base = x;
  fc.class_of.assign(c.n_morphisms(), -1);
  for (Mor m : c.into(x)) {
    int assigned = -1;
    for (int k = 0; k < fc.count; ++k) {
      if (factors_through(c, m, fc.rep[k]) && factors_through(c, fc.rep[k], m)) {
        assigned = k;
        break;
      }
    }
    if (assigned == -1) {
      if (fc.count == kMaxFactorClasses)
        throw SizeBound("factorization classes on " + c.object_name(x) + " exceed " +
                        std::to_string(kMaxFactorClasses));
      assigned = fc.count++;
      fc.rep.push_back(m);
    }
    fc.class_of[m] = assigned;
  }
  fc.below.assign(fc.count, 0);
  for (int a = 0; a < fc.count; ++a)
    for (int b = 0; b < fc.count; ++b)
      if (factors_through(c, fc.rep[b], fc.rep[a])) fc.below[a] |= std::uint64_t{1} << b;
  return fc;
}

/// The classes whose members all lie in s (equivalently: whose rep lies in s,
/// since sieves are unions of classes).
inline std::uint64_t class_mask(const FactorClasses& fc, const Sieve& s) {
  std::uint64_t mask = 0;
  for (int k = 0; k < fc.count; ++k)
    if (s.contains(fc.rep[k])) mask |= std::uint64_t{1} << k;
  return mask;
}

inline Sieve sieve_from_class_mask(const FinCategory& c, const FactorClasses& fc,
                                   std::uint64_t mask) {
  Sieve s = empty_sieve(c, fc.base);
  for (Mor m : c.into(fc.base))
    if (mask >> fc.class_of[m] & 1) s.member[m] = 1;
  return s;
}

/// All sieves on fc's base, as class masks, ascending.  A mask is a sieve iff
/// it is downward closed in the factorization order.  Classes are processed
/// in a linear extension of that order (strictly smaller classes have
/// strictly smaller below-sets), so every downset is reached.
inline std::vector<std::uint64_t> enumerate_sieve_masks(const FactorClasses& fc,
                                                        std::size_t cap) {
  std::vector<int> order(fc.count);
  for (int k = 0; k < fc.count; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    int pa = __builtin_popcountll(fc.below[a]), pb = __builtin_popcountll(fc.below[b]);
    return pa != pb ? pa < pb : a < b;
  });

  std::vector<std::uint64_t> partial{0};
  for (int k : order) {
    std::size_t n = partial.size();
    for (std::size_t i = 0; i < n; ++i) {
      // include class k: everything below it must already be included
      std::uint64_t need = fc.below[k] & ~(std::uint64_t{1} << k);
      if ((partial[i] & need) == need) partial.push_back(partial[i] | std::uint64_t{1} << k);
    }
    if (partial.size() > cap)
      throw SizeBound("sieve lattice exceeds " + std::to_string(cap) + " sieves");
  }
  std::sort(partial.begin(), partial.end());
  return partial;
}

}  // namespace stackcheck
