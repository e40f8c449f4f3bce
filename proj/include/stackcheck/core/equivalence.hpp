#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "stackcheck/core/fincat.hpp"

namespace stackcheck {

/// Connected (= isomorphism) components of a groupoid: a component index per
/// object, numbered by first appearance in declaration order so that the
/// labeling is deterministic.
struct ComponentIndex {
  std::vector<int> component;  // per object
  int count = 0;
};

inline ComponentIndex groupoid_components(const FinGroupoid& g) {
  int n = g.n_objects();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Mor m = 0; m < g.n_morphisms(); ++m) {
    int a = find(g.dom(m)), b = find(g.cod(m));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  ComponentIndex out;
  out.component.assign(n, -1);
  for (Obj x = 0; x < n; ++x) {
    int r = find(x);
    if (out.component[r] == -1) out.component[r] = out.count++;
    out.component[x] = out.component[r];
  }
  return out;
}

/// Verdicts and witnesses for essential surjectivity, fullness, and
/// faithfulness of a functor between finite groupoids.
struct EquivalenceReport {
  bool essentially_surjective = true;
  bool full = true;
  bool faithful = true;
  std::optional<Obj> eso_counterexample;                       // unhit target object
  std::optional<std::tuple<Obj, Obj, Mor>> fullness_counterexample;  // (x, x', unliftable β)
  std::optional<std::pair<Mor, Mor>> faithfulness_counterexample;    // distinct α, α' with equal image
  bool is_equivalence() const { return essentially_surjective && full && faithful; }
};

inline EquivalenceReport functor_equivalence_report(const FinGroupoid& src, const FinGroupoid& dst,
                                                    const Functor& F) {
  EquivalenceReport r;

  ComponentIndex idx = groupoid_components(dst);
  const std::vector<int>& comp = idx.component;
  std::vector<char> hit(idx.count, 0);
  for (Obj x = 0; x < src.n_objects(); ++x) hit[comp[F.ob[x]]] = 1;
  for (Obj y = 0; y < dst.n_objects(); ++y) {
    if (!hit[comp[y]]) {
      r.essentially_surjective = false;
      r.eso_counterexample = y;
      break;
    }
  }

  std::unordered_set<std::uint64_t> image;
  for (Obj x = 0; x < src.n_objects() && (r.full || r.faithful); ++x) {
    for (Obj x2 = 0; x2 < src.n_objects() && (r.full || r.faithful); ++x2) {
      image.clear();
      for (Mor a : src.hom(x, x2)) {
        if (!image.insert(static_cast<std::uint64_t>(F.mor[a])).second && r.faithful) {
          r.faithful = false;
          for (Mor a2 : src.hom(x, x2))
            if (a2 != a && F.mor[a2] == F.mor[a]) {
              r.faithfulness_counterexample = {a2, a};
              break;
            }
        }
      }
      if (r.full) {
        for (Mor b : dst.hom(F.ob[x], F.ob[x2])) {
          if (!image.count(static_cast<std::uint64_t>(b))) {
            r.full = false;
            r.fullness_counterexample = {x, x2, b};
            break;
          }
        }
      }
    }
  }
  return r;
}

/// Isofibration test: every morphism of the target starting at an image
/// object lifts to one starting at the preimage.  In a groupoid every
/// morphism is an isomorphism, so this is the usual iso-lifting property.
/// Returns the first non-lifting (source object, target morphism) pair, or
/// nullopt when F is an isofibration.
inline std::optional<std::pair<Obj, Mor>> isofibration_counterexample(const FinGroupoid& src,
                                                                      const FinGroupoid& dst,
                                                                      const Functor& F) {
  for (Obj a = 0; a < src.n_objects(); ++a) {
    for (Mor b : dst.out_of(F.ob[a])) {
      bool lifts = false;
      for (Mor al : src.out_of(a)) {
        if (F.mor[al] == b) {
          lifts = true;
          break;
        }
      }
      if (!lifts) return std::make_pair(a, b);
    }
  }
  return std::nullopt;
}

inline bool is_isofibration(const FinGroupoid& src, const FinGroupoid& dst, const Functor& F) {
  return !isofibration_counterexample(src, dst, F).has_value();
}

}  // namespace stackcheck
