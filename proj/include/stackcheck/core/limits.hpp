#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "stackcheck/core/fincat.hpp"

namespace stackcheck {

/// A chosen pullback cone for a cospan (f, g) with common codomain.  Besides
/// the apex and projections it carries the pairing table: every competing
/// cone (a, b) over some V factors uniquely through the apex, and `pair`
/// returns that unique factorization.  Generalized-element arguments
/// downstream (descent data, internal groupoid axioms) lean on this table.
struct PullbackCone {
  Mor f = kNone, g = kNone;
  Obj apex = -1;
  Mor p = kNone, q = kNone;  // f∘p = g∘q
  std::unordered_map<std::uint64_t, Mor> pair_index;

  /// The unique t with p∘t = a and q∘t = b; requires f∘a = g∘b.
  Mor pair(Mor a, Mor b) const {
    auto it = pair_index.find(pair_key(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b)));
    return it == pair_index.end() ? kNone : it->second;
  }
};

/// Exhaustive chosen-pullback search.  The canonical choice is the universal
/// cone whose apex has the smallest object identifier, ties broken by the
/// lexicographically least pair of projection identifiers; enumeration order
/// below realizes exactly that rule.  Absence is a value, not an error.
inline std::optional<PullbackCone> compute_pullback(const FinCategory& c, Mor f, Mor g) {
  if (c.cod(f) != c.cod(g))
    throw AmbientMismatch("pullback of (" + c.morphism_name(f) + ", " + c.morphism_name(g) +
                          "): codomains differ");
  const Obj A = c.dom(f), B = c.dom(g);
  const int no = c.n_objects();

  // All cones over the cospan, grouped per vertex object.
  std::vector<std::vector<std::pair<Mor, Mor>>> cones(no);
  std::vector<std::unordered_set<std::uint64_t>> cone_keys(no);
  for (Obj v = 0; v < no; ++v) {
    for (Mor a : c.hom(v, A))
      for (Mor b : c.hom(v, B))
        if (c.try_compose(f, a) == c.try_compose(g, b)) {
          cones[v].push_back({a, b});
          cone_keys[v].insert(pair_key(a, b));
        }
  }

  std::unordered_set<std::uint64_t> seen;
  for (Obj w = 0; w < no; ++w) {
    for (const auto& [p, q] : cones[w]) {
      // Quick necessary condition: |Hom(v, w)| must match the cone count.
      bool sizes_ok = true;
      for (Obj v = 0; v < no && sizes_ok; ++v)
        sizes_ok = c.hom(v, w).size() == cones[v].size();
      if (!sizes_ok) continue;

      bool universal = true;
      for (Obj v = 0; v < no && universal; ++v) {
        seen.clear();
        for (Mor t : c.hom(v, w)) {
          Mor a = c.compose(p, t), b = c.compose(q, t);
          if (!seen.insert(pair_key(a, b)).second) {  // not injective
            universal = false;
            break;
          }
        }
        // injective + equal counts + lands in cones ⇒ bijective onto cones
        if (universal && seen.size() != cones[v].size()) universal = false;
      }
      if (!universal) continue;

      PullbackCone cone;
      cone.f = f;
      cone.g = g;
      cone.apex = w;
      cone.p = p;
      cone.q = q;
      for (Obj v = 0; v < no; ++v)
        for (Mor t : c.hom(v, w))
          cone.pair_index.emplace(pair_key(c.compose(p, t), c.compose(q, t)), t);
      return cone;
    }
  }
  return std::nullopt;
}

/// Memoized chosen pullbacks for one ambient category.  Thread-safe; the
/// stored values are deterministic functions of the cospan, so lock order
/// never influences results.
class LimitCache {
public:
  explicit LimitCache(const FinCategory& cat) : cat_(&cat) {}

  const std::optional<PullbackCone>& pullback(Mor f, Mor g) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = pair_key(static_cast<std::uint64_t>(f), static_cast<std::uint64_t>(g));
    auto it = memo_.find(key);
    if (it == memo_.end())
      it = memo_.emplace(key, std::make_unique<std::optional<PullbackCone>>(
                                  compute_pullback(*cat_, f, g)))
               .first;
    return *it->second;
  }

  /// As `pullback` but raises the typed error naming the cospan when absent.
  const PullbackCone& require_pullback(Mor f, Mor g) const {
    const auto& pb = pullback(f, g);
    if (!pb) throw MissingPullback(cat_->morphism_name(f), cat_->morphism_name(g));
    return *pb;
  }

  const FinCategory& cat() const { return *cat_; }

private:
  const FinCategory* cat_;
  mutable std::mutex mu_;
  // unique_ptr values keep references stable across rehashing.
  mutable std::unordered_map<std::uint64_t, std::unique_ptr<std::optional<PullbackCone>>> memo_;
};

}  // namespace stackcheck
