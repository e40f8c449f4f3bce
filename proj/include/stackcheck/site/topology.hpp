#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stackcheck/core/fincat.hpp"
#include "stackcheck/core/limits.hpp"
#include "stackcheck/site/sieve.hpp"

namespace stackcheck {

/// A declared cover {U_i → X}: finitely many morphisms with common codomain.
/// An empty member list is admitted (it declares the empty sieve as covering,
/// which is how a strict initial object gets its empty cover).
struct CoverFamily {
  Obj base = -1;
  std::vector<Mor> members;
};

struct SiteOptions {
  // When false the covering table holds only maximal, declared, and
  // basis-generated sieves, with no closure applied.  That is deliberately
  // not a topology; it exists so the hypothesis checks can exhibit honest
  // failures of an unsaturated basis.
  bool saturate = true;
  std::size_t max_sieves_per_object = 500000;
};

/// An ambient finite category with a covering-sieve table, built from
/// declared sieves and basis cover families by saturation: the least
/// collection containing the declarations and all maximal sieves, closed
/// under pullback and local character.  All tables are immutable after
/// build(); queries are lookups.
class Site {
public:
  static Site build(std::shared_ptr<const FinCategory> cat, std::vector<Sieve> declared,
                    std::vector<CoverFamily> basis, SiteOptions opts = {}) {
    Site s(std::move(cat), std::move(declared), std::move(basis), opts);
    return s;
  }

  const FinCategory& cat() const { return *cat_; }
  const std::shared_ptr<const FinCategory>& cat_ptr() const { return cat_; }
  LimitCache& limits() const { return *limits_; }

  bool saturated() const { return saturated_; }
  const std::vector<Sieve>& declared() const { return declared_; }
  const std::vector<CoverFamily>& basis() const { return basis_; }

  std::vector<const CoverFamily*> basis_on(Obj x) const {
    std::vector<const CoverFamily*> out;
    for (const CoverFamily& f : basis_)
      if (f.base == x) out.push_back(&f);
    return out;
  }

  const FactorClasses& classes(Obj x) const { return classes_[x]; }
  const std::vector<std::uint64_t>& sieve_universe(Obj x) const { return universe_[x]; }

  int sieve_index(Obj x, std::uint64_t mask) const {
    auto it = index_[x].find(mask);
    return it == index_[x].end() ? -1 : it->second;
  }

  bool is_covering_mask(Obj x, std::uint64_t mask) const {
    int i = sieve_index(x, mask);
    return i >= 0 && covering_[x][i] != 0;
  }

  bool is_covering(const Sieve& s) const {
    return is_covering_mask(s.base, class_mask(classes_[s.base], s));
  }

  /// A derived family covers iff its generated sieve is in the table.
  bool family_covers(const CoverFamily& fam) const {
    return is_covering(sieve_generated_by(*cat_, fam.base, fam.members));
  }

  int covering_count(Obj x) const {
    int n = 0;
    for (char c : covering_[x]) n += c != 0;
    return n;
  }

  /// Intersection of all covering sieves on x; itself covering (covering
  /// sieves of a topology are closed under finite intersection), and the
  /// stage at which every sieve-indexed colimit below stabilizes.
  Sieve minimal_covering_sieve(Obj x) const {
    return sieve_from_class_mask(*cat_, classes_[x], minimal_mask_[x]);
  }
  std::uint64_t minimal_covering_mask(Obj x) const { return minimal_mask_[x]; }

  /// Memoized pullback of a sieve (as a class mask on cod g) along g.
  std::uint64_t pullback_mask(Mor g, std::uint64_t mask) const {
    std::uint64_t key = pair_key(static_cast<std::uint64_t>(g),
                                 static_cast<std::uint64_t>(sieve_index(cat_->cod(g), mask)));
    auto it = pullback_memo_.find(key);
    if (it != pullback_memo_.end()) return it->second;
    Sieve s = sieve_from_class_mask(*cat_, classes_[cat_->cod(g)], mask);
    std::uint64_t r = class_mask(classes_[cat_->dom(g)], pullback_sieve(*cat_, s, g));
    pullback_memo_.emplace(key, r);
    return r;
  }

private:
  Site(std::shared_ptr<const FinCategory> cat, std::vector<Sieve> declared,
       std::vector<CoverFamily> basis, SiteOptions opts)
      : cat_(std::move(cat)),
        declared_(std::move(declared)),
        basis_(std::move(basis)),
        saturated_(opts.saturate),
        limits_(std::make_unique<LimitCache>(*cat_)) {
    const FinCategory& c = *cat_;
    int no = c.n_objects();
    classes_.reserve(no);
    for (Obj x = 0; x < no; ++x) classes_.push_back(factor_classes(c, x));
    universe_.resize(no);
    index_.resize(no);
    covering_.resize(no);
    for (Obj x = 0; x < no; ++x) {
      universe_[x] = enumerate_sieve_masks(classes_[x], opts.max_sieves_per_object);
      for (std::size_t i = 0; i < universe_[x].size(); ++i)
        index_[x].emplace(universe_[x][i], static_cast<int>(i));
      covering_[x].assign(universe_[x].size(), 0);
    }

    auto mark = [&](Obj x, std::uint64_t mask) -> bool {
      int i = sieve_index(x, mask);
      if (i < 0) throw AxiomViolationError("sieve escaped its own lattice");  // unreachable
      if (covering_[x][i]) return false;
      covering_[x][i] = 1;
      return true;
    };

    for (Obj x = 0; x < no; ++x) {
      std::uint64_t all = classes_[x].count == 64 ? ~std::uint64_t{0}
                                                  : (std::uint64_t{1} << classes_[x].count) - 1;
      mark(x, all);
    }
    for (const Sieve& s : declared_) {
      if (!is_sieve(c, s)) throw AxiomViolationError("declared covering set is not a sieve");
      mark(s.base, class_mask(classes_[s.base], s));
    }
    for (const CoverFamily& f : basis_)
      mark(f.base, class_mask(classes_[f.base], sieve_generated_by(c, f.base, f.members)));

    if (saturated_) {
      bool changed = true;
      while (changed) {
        changed = false;
        // pullback stability
        for (Mor g = 0; g < c.n_morphisms(); ++g) {
          Obj x = c.cod(g), y = c.dom(g);
          for (std::size_t i = 0; i < universe_[x].size(); ++i) {
            if (!covering_[x][i]) continue;
            if (mark(y, pullback_mask(g, universe_[x][i]))) changed = true;
          }
        }
        // local character: S covering, every pullback of T along S covering => T covering
        for (Obj x = 0; x < no; ++x) {
          const FactorClasses& fc = classes_[x];
          for (std::size_t si = 0; si < universe_[x].size(); ++si) {
            if (!covering_[x][si]) continue;
            std::uint64_t smask = universe_[x][si];
            for (std::size_t ti = 0; ti < universe_[x].size(); ++ti) {
              if (covering_[x][ti]) continue;
              bool local = true;
              for (int k = 0; k < fc.count && local; ++k) {
                if (!(smask >> k & 1)) continue;
                Mor r = fc.rep[k];
                if (!is_covering_mask(c.dom(r), pullback_mask(r, universe_[x][ti]))) local = false;
              }
              if (local && mark(x, universe_[x][ti])) changed = true;
            }
          }
        }
      }
    }

    minimal_mask_.resize(no);
    for (Obj x = 0; x < no; ++x) {
      std::uint64_t meet = ~std::uint64_t{0};
      for (std::size_t i = 0; i < universe_[x].size(); ++i)
        if (covering_[x][i]) meet &= universe_[x][i];
      minimal_mask_[x] = meet;
      if (saturated_ && !is_covering_mask(x, meet))
        throw AxiomViolationError("covering sieves on " + c.object_name(x) +
                                  " are not closed under intersection");
    }
  }

  std::shared_ptr<const FinCategory> cat_;
  std::vector<Sieve> declared_;
  std::vector<CoverFamily> basis_;
  bool saturated_;
  std::unique_ptr<LimitCache> limits_;
  std::vector<FactorClasses> classes_;
  std::vector<std::vector<std::uint64_t>> universe_;
  std::vector<std::unordered_map<std::uint64_t, int>> index_;
  std::vector<std::vector<char>> covering_;
  std::vector<std::uint64_t> minimal_mask_;
  mutable std::unordered_map<std::uint64_t, std::uint64_t> pullback_memo_;
};

}  // namespace stackcheck
