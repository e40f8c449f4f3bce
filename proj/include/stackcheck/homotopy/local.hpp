#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stackcheck/site/topology.hpp"

namespace stackcheck {

/// The three lifting problems a map of groupoid presheaves must solve locally
/// to be a weak equivalence: hitting an object up to isomorphism, hitting a
/// morphism between chosen sources, and killing an automorphism that the map
/// already kills.
enum class ProbeKind { Object, Morphism, Automorphism };

inline const char* probe_kind_name(ProbeKind k) {
  switch (k) {
    case ProbeKind::Object: return "object";
    case ProbeKind::Morphism: return "morphism";
    default: return "automorphism";
  }
}

/// One lifting problem instance: which kind, the ambient object it lives
/// over, and a human-readable statement of what has to be lifted.
struct LiftingProbe {
  ProbeKind kind = ProbeKind::Object;
  Obj base = -1;
  std::string subject;
};

/// The outcome of one probe: the sieve of restrictions where a lift exists
/// and, per factor class of that sieve, the lift found at the class
/// representative.  When the sieve covers, this is a certificate that the
/// instance is solved; when it does not, it is the exact locus that failed
/// to cover.
struct LocalWitness {
  LiftingProbe probe;
  Sieve sieve;
  std::vector<std::string> lift;
};

/// Decides whether a property of restrictions holds locally at x: evaluates
/// the predicate on every morphism into x, checks that the true locus is
/// closed under precomposition (a predicate that is not stable cannot define
/// a sieve, and the question is ill-posed — that throws rather than answers),
/// and returns the locus when it is a covering sieve, nullopt otherwise.
inline std::optional<Sieve> locally_holds(const Site& site, Obj x,
                                          const std::function<bool(Mor)>& pred) {
  const FinCategory& c = site.cat();
  if (x < 0 || x >= c.n_objects()) throw AmbientMismatch("locally_holds: no such object");
  Sieve s = empty_sieve(c, x);
  for (Mor f : c.into(x)) s.member[f] = pred(f) ? 1 : 0;
  for (Mor f : c.into(x)) {
    if (!s.member[f]) continue;
    for (Mor w : c.into(c.dom(f)))
      if (!s.member[c.compose(f, w)])
        throw PredicateNotSieveStable("(" + c.morphism_name(f) + ", " + c.morphism_name(w) + ")");
  }
  if (site.is_covering(s)) return s;
  return std::nullopt;
}

}  // namespace stackcheck
