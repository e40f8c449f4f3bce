#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "stackcheck/core/errors.hpp"

namespace stackcheck {

using Obj = int;
using Mor = int;
inline constexpr Mor kNone = -1;

/// Packs an ordered pair of small non-negative ints into one hash key.
inline std::uint64_t pair_key(std::uint64_t a, std::uint64_t b) { return (a << 32) | b; }

/// Raw tables describing a finite category, prior to validation.  Identifiers
/// are indices; names are parallel arrays kept for parsing and reports.
/// Declaration order of objects and morphisms fixes every enumeration and
/// search order downstream.
struct CategoryData {
  std::vector<std::string> object_names;
  std::vector<std::string> morphism_names;
  std::vector<Obj> dom, cod;     // per morphism
  std::vector<Mor> identity;     // per object
  std::vector<Mor> compose;      // flat n_mor*n_mor table: compose[g*n+f] = g∘f, kNone if (g,f) not composable

  Mor& at(Mor g, Mor f) { return compose[static_cast<std::size_t>(g) * morphism_names.size() + f]; }
  Mor get(Mor g, Mor f) const { return compose[static_cast<std::size_t>(g) * morphism_names.size() + f]; }
};

struct AxiomViolation {
  enum class Kind {
    BadReference,
    DuplicateIdentifier,
    MissingIdentity,
    MissingComposite,
    SpuriousComposite,
    NonAssociative,
    IdentityLawViolation,
    NotInvertible,
  };
  Kind kind;
  std::string detail;
  // offending composable triple for NonAssociative reports, kNone otherwise
  Mor f = kNone, g = kNone, h = kNone;
};

inline const char* to_string(AxiomViolation::Kind k) {
  switch (k) {
    case AxiomViolation::Kind::BadReference: return "BadReference";
    case AxiomViolation::Kind::DuplicateIdentifier: return "DuplicateIdentifier";
    case AxiomViolation::Kind::MissingIdentity: return "MissingIdentity";
    case AxiomViolation::Kind::MissingComposite: return "MissingComposite";
    case AxiomViolation::Kind::SpuriousComposite: return "SpuriousComposite";
    case AxiomViolation::Kind::NonAssociative: return "NonAssociative";
    case AxiomViolation::Kind::IdentityLawViolation: return "IdentityLawViolation";
    case AxiomViolation::Kind::NotInvertible: return "NotInvertible";
  }
  return "?";
}

/// A validated finite category: the raw tables plus derived indexes.  All
/// data is immutable after construction; operations are pure lookups.
class FinCategory {
public:
  explicit FinCategory(CategoryData data) : d_(std::move(data)) { build_indexes(); }

  int n_objects() const { return static_cast<int>(d_.object_names.size()); }
  int n_morphisms() const { return static_cast<int>(d_.morphism_names.size()); }

  Obj dom(Mor m) const { return d_.dom[m]; }
  Obj cod(Mor m) const { return d_.cod[m]; }
  Mor id(Obj x) const { return d_.identity[x]; }

  /// g∘f for composable (g,f); kNone otherwise.
  Mor try_compose(Mor g, Mor f) const { return d_.get(g, f); }
  Mor compose(Mor g, Mor f) const {
    Mor r = d_.get(g, f);
    if (r == kNone)
      throw AmbientMismatch("compose(" + morphism_name(g) + ", " + morphism_name(f) + ") undefined");
    return r;
  }

  const std::vector<Mor>& into(Obj x) const { return into_[x]; }
  const std::vector<Mor>& out_of(Obj x) const { return out_[x]; }
  const std::vector<Mor>& hom(Obj a, Obj b) const { return hom_[static_cast<std::size_t>(a) * n_objects() + b]; }

  bool is_iso(Mor m) const { return inverse_[m] != kNone; }
  Mor inverse_of(Mor m) const { return inverse_[m]; }

  const std::string& object_name(Obj x) const { return d_.object_names[x]; }
  const std::string& morphism_name(Mor m) const { return d_.morphism_names[m]; }
  const std::vector<std::string>& object_names() const { return d_.object_names; }
  const std::vector<std::string>& morphism_names() const { return d_.morphism_names; }

  std::optional<Obj> find_object(const std::string& name) const {
    auto it = object_index_.find(name);
    if (it == object_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<Mor> find_morphism(const std::string& name) const {
    auto it = morphism_index_.find(name);
    if (it == morphism_index_.end()) return std::nullopt;
    return it->second;
  }

  const CategoryData& data() const { return d_; }

private:
  void build_indexes() {
    int no = n_objects(), nm = n_morphisms();
    into_.assign(no, {});
    out_.assign(no, {});
    hom_.assign(static_cast<std::size_t>(no) * no, {});
    for (Mor m = 0; m < nm; ++m) {
      into_[d_.cod[m]].push_back(m);
      out_[d_.dom[m]].push_back(m);
      hom_[static_cast<std::size_t>(d_.dom[m]) * no + d_.cod[m]].push_back(m);
    }
    inverse_.assign(nm, kNone);
    for (Mor m = 0; m < nm; ++m) {
      if (inverse_[m] != kNone) continue;
      for (Mor w : hom_[static_cast<std::size_t>(d_.cod[m]) * no + d_.dom[m]]) {
        if (d_.get(w, m) == d_.identity[d_.dom[m]] && d_.get(m, w) == d_.identity[d_.cod[m]]) {
          inverse_[m] = w;
          inverse_[w] = m;
          break;
        }
      }
    }
    for (int x = 0; x < no; ++x) object_index_[d_.object_names[x]] = x;
    for (int m = 0; m < nm; ++m) morphism_index_[d_.morphism_names[m]] = m;
  }

  CategoryData d_;
  std::vector<std::vector<Mor>> into_, out_;
  std::vector<std::vector<Mor>> hom_;
  std::vector<Mor> inverse_;
  std::unordered_map<std::string, Obj> object_index_;
  std::unordered_map<std::string, Mor> morphism_index_;
};

struct CategoryValidation {
  std::optional<FinCategory> category;  // present iff violations is empty
  std::vector<AxiomViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks the category axioms on raw tables: identifiers resolve and are
/// unique, compose is defined exactly on composable pairs, identity laws and
/// associativity hold by full enumeration.  Violations carry the offending
/// pair/triple by name.
inline CategoryValidation validate_category(const CategoryData& raw) {
  CategoryValidation out;
  auto bad = [&](AxiomViolation::Kind k, std::string s) {
    out.violations.push_back({k, std::move(s)});
  };

  const int no = static_cast<int>(raw.object_names.size());
  const int nm = static_cast<int>(raw.morphism_names.size());

  {
    std::unordered_map<std::string, int> seen;
    for (int i = 0; i < no; ++i)
      if (!seen.emplace(raw.object_names[i], i).second)
        bad(AxiomViolation::Kind::DuplicateIdentifier, "object " + raw.object_names[i]);
    seen.clear();
    for (int i = 0; i < nm; ++i)
      if (!seen.emplace(raw.morphism_names[i], i).second)
        bad(AxiomViolation::Kind::DuplicateIdentifier, "morphism " + raw.morphism_names[i]);
  }
  if (raw.dom.size() != static_cast<std::size_t>(nm) || raw.cod.size() != static_cast<std::size_t>(nm) ||
      raw.identity.size() != static_cast<std::size_t>(no) ||
      raw.compose.size() != static_cast<std::size_t>(nm) * nm) {
    bad(AxiomViolation::Kind::BadReference, "table sizes disagree with declarations");
    return out;
  }
  for (Mor m = 0; m < nm; ++m) {
    if (raw.dom[m] < 0 || raw.dom[m] >= no || raw.cod[m] < 0 || raw.cod[m] >= no)
      bad(AxiomViolation::Kind::BadReference, "morphism " + raw.morphism_names[m] + " has out-of-range endpoints");
  }
  for (Obj x = 0; x < no; ++x) {
    Mor e = raw.identity[x];
    if (e < 0 || e >= nm) {
      bad(AxiomViolation::Kind::MissingIdentity, "object " + raw.object_names[x]);
    } else if (raw.dom[e] != x || raw.cod[e] != x) {
      bad(AxiomViolation::Kind::IdentityLawViolation,
          "identity of " + raw.object_names[x] + " is not an endomorphism");
    }
  }
  if (!out.violations.empty()) return out;

  const std::string* mn = raw.morphism_names.data();
  for (Mor g = 0; g < nm; ++g) {
    for (Mor f = 0; f < nm; ++f) {
      Mor gf = raw.get(g, f);
      bool composable = raw.dom[g] == raw.cod[f];
      if (composable && gf == kNone)
        bad(AxiomViolation::Kind::MissingComposite, "compose(" + mn[g] + ", " + mn[f] + ")");
      if (!composable && gf != kNone)
        bad(AxiomViolation::Kind::SpuriousComposite, "compose(" + mn[g] + ", " + mn[f] + ")");
      if (composable && gf != kNone && (raw.dom[gf] != raw.dom[f] || raw.cod[gf] != raw.cod[g]))
        bad(AxiomViolation::Kind::BadReference,
            "compose(" + mn[g] + ", " + mn[f] + ") has wrong endpoints");
    }
  }
  if (!out.violations.empty()) return out;

  for (Mor m = 0; m < nm; ++m) {
    if (raw.get(m, raw.identity[raw.dom[m]]) != m || raw.get(raw.identity[raw.cod[m]], m) != m)
      bad(AxiomViolation::Kind::IdentityLawViolation, mn[m]);
  }

  // Associativity over every composable triple.  This is the hot loop of
  // validation (tens of millions of triples on the full finite-set fixture),
  // so it walks raw tables directly.
  std::vector<std::vector<Mor>> out_of(no);
  for (Mor m = 0; m < nm; ++m) out_of[raw.dom[m]].push_back(m);
  for (Mor f = 0; f < nm; ++f) {
    for (Mor g : out_of[raw.cod[f]]) {
      Mor gf = raw.get(g, f);
      if (gf == kNone) continue;
      for (Mor h : out_of[raw.cod[g]]) {
        if (raw.get(h, gf) != raw.get(raw.get(h, g), f)) {
          out.violations.push_back({AxiomViolation::Kind::NonAssociative,
                                    "(" + mn[h] + ", " + mn[g] + ", " + mn[f] + ")", f, g, h});
          if (out.violations.size() > 32) return out;  // enough witnesses
        }
      }
    }
  }
  if (!out.violations.empty()) return out;

  out.category.emplace(raw);
  return out;
}

/// A validated finite groupoid: a category in which every morphism is
/// invertible, with the inverse table materialized.
class FinGroupoid {
public:
  FinGroupoid() = default;
  explicit FinGroupoid(FinCategory cat) : cat_(std::make_shared<const FinCategory>(std::move(cat))) {
    inverse_.resize(cat_->n_morphisms());
    for (Mor m = 0; m < cat_->n_morphisms(); ++m) inverse_[m] = cat_->inverse_of(m);
  }

  const FinCategory& cat() const { return *cat_; }
  int n_objects() const { return cat_->n_objects(); }
  int n_morphisms() const { return cat_->n_morphisms(); }
  Obj dom(Mor m) const { return cat_->dom(m); }
  Obj cod(Mor m) const { return cat_->cod(m); }
  Mor id(Obj x) const { return cat_->id(x); }
  Mor compose(Mor g, Mor f) const { return cat_->compose(g, f); }
  Mor try_compose(Mor g, Mor f) const { return cat_->try_compose(g, f); }
  Mor inverse(Mor m) const { return inverse_[m]; }
  const std::vector<Mor>& hom(Obj a, Obj b) const { return cat_->hom(a, b); }
  const std::vector<Mor>& out_of(Obj x) const { return cat_->out_of(x); }
  const std::vector<Mor>& into(Obj x) const { return cat_->into(x); }
  const std::string& object_name(Obj x) const { return cat_->object_name(x); }
  const std::string& morphism_name(Mor m) const { return cat_->morphism_name(m); }

private:
  // shared_ptr keeps FinGroupoid cheap to copy; presheaves store one value
  // groupoid per site object and are copied freely by constructions.
  std::shared_ptr<const FinCategory> cat_;
  std::vector<Mor> inverse_;
};

struct GroupoidValidation {
  std::optional<FinGroupoid> groupoid;
  std::vector<AxiomViolation> violations;
  bool ok() const { return violations.empty(); }
};

inline GroupoidValidation validate_groupoid(const CategoryData& raw) {
  GroupoidValidation out;
  CategoryValidation cv = validate_category(raw);
  out.violations = std::move(cv.violations);
  if (!cv.category) return out;
  for (Mor m = 0; m < cv.category->n_morphisms(); ++m) {
    if (!cv.category->is_iso(m))
      out.violations.push_back({AxiomViolation::Kind::NotInvertible, cv.category->morphism_name(m)});
  }
  if (out.violations.empty()) out.groupoid.emplace(std::move(*cv.category));
  return out;
}

/// Object and morphism maps of a functor; source/target categories are passed
/// alongside wherever the maps are used, which keeps the struct copyable and
/// free of dangling references when value groupoids move.
struct Functor {
  std::vector<Obj> ob;
  std::vector<Mor> mor;
};

/// Strict functor laws by enumeration: endpoints, identities, composition.
inline std::vector<AxiomViolation> validate_functor(const FinCategory& src, const FinCategory& dst,
                                                    const Functor& F) {
  std::vector<AxiomViolation> v;
  if (F.ob.size() != static_cast<std::size_t>(src.n_objects()) ||
      F.mor.size() != static_cast<std::size_t>(src.n_morphisms())) {
    v.push_back({AxiomViolation::Kind::BadReference, "functor table sizes disagree with source"});
    return v;
  }
  for (Obj x = 0; x < src.n_objects(); ++x)
    if (F.ob[x] < 0 || F.ob[x] >= dst.n_objects())
      v.push_back({AxiomViolation::Kind::BadReference, "object image out of range"});
  for (Mor m = 0; m < src.n_morphisms(); ++m)
    if (F.mor[m] < 0 || F.mor[m] >= dst.n_morphisms())
      v.push_back({AxiomViolation::Kind::BadReference, "morphism image out of range"});
  if (!v.empty()) return v;

  for (Mor m = 0; m < src.n_morphisms(); ++m) {
    if (dst.dom(F.mor[m]) != F.ob[src.dom(m)] || dst.cod(F.mor[m]) != F.ob[src.cod(m)])
      v.push_back({AxiomViolation::Kind::BadReference,
                   "functor breaks endpoints at " + src.morphism_name(m)});
  }
  for (Obj x = 0; x < src.n_objects(); ++x)
    if (F.mor[src.id(x)] != dst.id(F.ob[x]))
      v.push_back({AxiomViolation::Kind::IdentityLawViolation,
                   "functor at identity of " + src.object_name(x)});
  for (Mor f = 0; f < src.n_morphisms(); ++f) {
    for (Mor g : src.out_of(src.cod(f))) {
      Mor gf = src.try_compose(g, f);
      if (gf == kNone) continue;
      if (dst.try_compose(F.mor[g], F.mor[f]) != F.mor[gf])
        v.push_back({AxiomViolation::Kind::NonAssociative,
                     "functor breaks composition at (" + src.morphism_name(g) + ", " +
                         src.morphism_name(f) + ")"});
    }
  }
  return v;
}

inline Functor identity_functor(const FinCategory& c) {
  Functor F;
  F.ob.resize(c.n_objects());
  F.mor.resize(c.n_morphisms());
  for (Obj x = 0; x < c.n_objects(); ++x) F.ob[x] = x;
  for (Mor m = 0; m < c.n_morphisms(); ++m) F.mor[m] = m;
  return F;
}

inline Functor compose_functors(const Functor& G, const Functor& F) {
  // G after F; F's target must be G's source.
  Functor GF;
  GF.ob.resize(F.ob.size());
  GF.mor.resize(F.mor.size());
  for (std::size_t x = 0; x < F.ob.size(); ++x) GF.ob[x] = G.ob[F.ob[x]];
  for (std::size_t m = 0; m < F.mor.size(); ++m) GF.mor[m] = G.mor[F.mor[m]];
  return GF;
}

/// Component table of a natural isomorphism F ⇒ G between functors src→dst.
struct NatIso {
  std::vector<Mor> component;  // per source object, a morphism F(x) → G(x) in dst
};

inline std::vector<AxiomViolation> validate_nat_iso(const FinCategory& src, const FinCategory& dst,
                                                    const Functor& F, const Functor& G,
                                                    const NatIso& a) {
  std::vector<AxiomViolation> v;
  if (a.component.size() != static_cast<std::size_t>(src.n_objects())) {
    v.push_back({AxiomViolation::Kind::BadReference, "component table size"});
    return v;
  }
  for (Obj x = 0; x < src.n_objects(); ++x) {
    Mor c = a.component[x];
    if (c < 0 || c >= dst.n_morphisms() || dst.dom(c) != F.ob[x] || dst.cod(c) != G.ob[x]) {
      v.push_back({AxiomViolation::Kind::BadReference,
                   "component at " + src.object_name(x) + " has wrong endpoints"});
      continue;
    }
    if (!dst.is_iso(c))
      v.push_back({AxiomViolation::Kind::NotInvertible, "component at " + src.object_name(x)});
  }
  if (!v.empty()) return v;
  for (Mor m = 0; m < src.n_morphisms(); ++m) {
    // naturality: component(cod m) ∘ F(m) = G(m) ∘ component(dom m)
    if (dst.try_compose(a.component[src.cod(m)], F.mor[m]) !=
        dst.try_compose(G.mor[m], a.component[src.dom(m)]))
      v.push_back({AxiomViolation::Kind::NonAssociative,
                   "naturality fails at " + src.morphism_name(m)});
  }
  return v;
}

}  // namespace stackcheck
