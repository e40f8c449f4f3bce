#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "stackcheck/harness/report.hpp"
#include "stackcheck/site/topology.hpp"

namespace stackcheck {

/// Isomorphisms (A, a) → (B, b) in the slice over the common codomain of a
/// and b: invertible φ with b∘φ = a.
inline std::vector<Mor> slice_isos(const FinCategory& c, Mor a, Mor b) {
  std::vector<Mor> out;
  for (Mor phi : c.hom(c.dom(a), c.dom(b)))
    if (c.is_iso(phi) && c.try_compose(b, phi) == a) out.push_back(phi);
  return out;
}

/// A descent datum for a cover {u_i → X} valued in slices: one slice object
/// a_i over each member's domain, and for every ordered pair (i, j) a slice
/// isomorphism over the chosen overlap P_ij between the two restrictions.
/// Validity is the cocycle condition on chosen triple overlaps.
struct SliceDescentDatum {
  std::vector<Mor> local;    // a_i: A_i → U_i
  std::vector<Mor> overlap;  // per ordered pair i*n+j: iso between restrictions over P_ij
};

/// Computation context for slice-valued descent along one cover family.
/// Every object in sight is a chosen pullback from the site's cache — the
/// pairwise overlaps P_ij = U_i ×_X U_j, the triple overlaps
/// T = P_ij ×_{U_j} P_jk, and the restrictions of slice objects to them.  A
/// cospan without a pullback surfaces as MissingPullback.
class SliceDescent {
public:
  SliceDescent(const Site& site, const CoverFamily& fam)
      : site_(site), c_(site.cat()), fam_(fam), n_(static_cast<int>(fam.members.size())) {}

  const FinCategory& cat() const { return c_; }
  int members() const { return n_; }
  Mor member(int i) const { return fam_.members[i]; }

  const PullbackCone& overlap_cone(int i, int j) const {
    return site_.limits().require_pullback(fam_.members[i], fam_.members[j]);
  }

  /// Restriction over the (i, j) overlap of a slice object on the i side
  /// (j_side=false) or j side (j_side=true).
  const PullbackCone& restriction_cone(int i, int j, Mor a, bool j_side) const {
    const PullbackCone& pij = overlap_cone(i, j);
    return site_.limits().require_pullback(a, j_side ? pij.q : pij.p);
  }

  /// Full cocycle validation of an externally assembled datum.
  bool is_valid(const SliceDescentDatum& d) const {
    for (int a = 1; a <= n_ * n_; ++a)
      if (!cocycle_holds(d, a)) return false;
    return true;
  }

  /// All valid descent data, local objects in declaration order, overlap
  /// isomorphisms enumerated lexicographically with cocycle pruning.
  std::vector<SliceDescentDatum> enumerate_data(std::size_t cap = 500000) const {
    std::vector<SliceDescentDatum> out;
    SliceDescentDatum d;
    d.local.assign(n_, kNone);
    d.overlap.assign(static_cast<std::size_t>(n_) * n_, kNone);

    std::function<void(int)> assign_overlap = [&](int p) {
      if (p == n_ * n_) {
        out.push_back(d);
        if (out.size() > cap) throw SizeBound("descent data exceed " + std::to_string(cap));
        return;
      }
      int i = p / n_, j = p % n_;
      const PullbackCone& ri = restriction_cone(i, j, d.local[i], false);
      const PullbackCone& rj = restriction_cone(i, j, d.local[j], true);
      for (Mor phi : slice_isos(c_, ri.q, rj.q)) {
        d.overlap[p] = phi;
        if (cocycle_holds(d, p + 1)) assign_overlap(p + 1);
      }
      d.overlap[p] = kNone;
    };

    std::function<void(int)> assign_local = [&](int i) {
      if (i == n_) {
        assign_overlap(0);
        return;
      }
      for (Mor a : c_.into(c_.dom(fam_.members[i]))) {
        d.local[i] = a;
        assign_local(i + 1);
      }
      d.local[i] = kNone;
    };

    if (n_ == 0) {
      out.push_back(d);
      return out;
    }
    assign_local(0);
    return out;
  }

  /// Morphisms of descent data d → e: per-member slice isomorphisms whose
  /// restrictions to every pairwise overlap intertwine the two overlap
  /// isomorphisms.
  std::vector<std::vector<Mor>> morphisms(const SliceDescentDatum& d, const SliceDescentDatum& e,
                                          std::size_t cap = 100000) const {
    return search(d, e, cap, false);
  }

  bool has_morphism(const SliceDescentDatum& d, const SliceDescentDatum& e) const {
    return !search(d, e, 1, true).empty();
  }

  bool isomorphic(const SliceDescentDatum& d, const SliceDescentDatum& e) const {
    return has_morphism(d, e);  // every descent morphism here is invertible
  }

  /// The canonical descent datum of a slice object b over the cover's base:
  /// restrictions along the members, with the coherence isomorphisms induced
  /// by the universal property of the chosen pullbacks.
  SliceDescentDatum comparison_image(Mor b) const {
    SliceDescentDatum d;
    d.local.resize(n_);
    d.overlap.resize(static_cast<std::size_t>(n_) * n_);
    for (int i = 0; i < n_; ++i)
      d.local[i] = site_.limits().require_pullback(b, fam_.members[i]).q;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        const PullbackCone& rbi = site_.limits().require_pullback(b, fam_.members[i]);
        const PullbackCone& rbj = site_.limits().require_pullback(b, fam_.members[j]);
        const PullbackCone& pij = overlap_cone(i, j);
        const PullbackCone& ri = restriction_cone(i, j, d.local[i], false);
        const PullbackCone& rj = restriction_cone(i, j, d.local[j], true);
        Mor to_b = c_.try_compose(rbi.p, ri.p);
        Mor to_uj = c_.try_compose(pij.q, ri.q);
        Mor x = rbj.pair(to_b, to_uj);
        if (x == kNone) throw AxiomViolationError("comparison pairing missing a cone");
        Mor phi = rj.pair(x, ri.q);
        if (phi == kNone) throw AxiomViolationError("comparison pairing missing a cone");
        d.overlap[static_cast<std::size_t>(i) * n_ + j] = phi;
      }
    return d;
  }

private:
  /// The overlap isomorphism φ_ij of a datum, restricted along w: T → P_ij,
  /// as a morphism between the given restrictions of a_i and a_j to T.  The
  /// caller guarantees pij.p∘w and pij.q∘w are the base legs of si and sj.
  Mor pulled_overlap(const SliceDescentDatum& d, int i, int j, const PullbackCone& si,
                     const PullbackCone& sj, Mor w) const {
    const PullbackCone& ri = restriction_cone(i, j, d.local[i], false);
    const PullbackCone& rj = restriction_cone(i, j, d.local[j], true);
    Mor x = ri.pair(si.p, c_.try_compose(w, si.q));
    if (x == kNone) throw AxiomViolationError("overlap pulling missing a cone");
    Mor y = c_.try_compose(d.overlap[static_cast<std::size_t>(i) * n_ + j], x);
    Mor out = sj.pair(c_.try_compose(rj.p, y), si.q);
    if (out == kNone) throw AxiomViolationError("overlap pulling missing a cone");
    return out;
  }

  /// Cocycle over chosen triple overlaps, restricted to triples all of whose
  /// overlap isomorphisms are assigned and whose last-assigned pair is
  /// exactly assigned-1 — so a full enumeration pass checks each triple
  /// exactly once.
  bool cocycle_holds(const SliceDescentDatum& d, int assigned) const {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) {
          if (i * n_ + j >= assigned || j * n_ + k >= assigned || i * n_ + k >= assigned)
            continue;
          int last = std::max(i * n_ + j, std::max(j * n_ + k, i * n_ + k));
          if (last != assigned - 1) continue;
          const PullbackCone& pij = overlap_cone(i, j);
          const PullbackCone& pjk = overlap_cone(j, k);
          const PullbackCone& pik = overlap_cone(i, k);
          const PullbackCone& t = site_.limits().require_pullback(pij.q, pjk.p);
          Mor to_ui = c_.try_compose(pij.p, t.p);
          Mor to_uj = c_.try_compose(pij.q, t.p);
          Mor to_uk = c_.try_compose(pjk.q, t.q);
          Mor gamma = pik.pair(to_ui, to_uk);
          if (gamma == kNone) throw AxiomViolationError("triple overlap missing a cone");
          const PullbackCone& si = site_.limits().require_pullback(d.local[i], to_ui);
          const PullbackCone& sj = site_.limits().require_pullback(d.local[j], to_uj);
          const PullbackCone& sk = site_.limits().require_pullback(d.local[k], to_uk);
          Mor f_ij = pulled_overlap(d, i, j, si, sj, t.p);
          Mor f_jk = pulled_overlap(d, j, k, sj, sk, t.q);
          Mor f_ik = pulled_overlap(d, i, k, si, sk, gamma);
          if (c_.try_compose(f_jk, f_ij) != f_ik) return false;
        }
    return true;
  }

  /// Restriction of a slice morphism ψ: (A, d_loc) → (A', e_loc) over U_m to
  /// the (i, j) overlap, on the requested side.
  Mor restricted_morphism(Mor psi, int i, int j, Mor d_loc, Mor e_loc, bool j_side) const {
    const PullbackCone& r = site_.limits().require_pullback(
        d_loc, j_side ? overlap_cone(i, j).q : overlap_cone(i, j).p);
    const PullbackCone& r2 = site_.limits().require_pullback(
        e_loc, j_side ? overlap_cone(i, j).q : overlap_cone(i, j).p);
    Mor m = r2.pair(c_.try_compose(psi, r.p), r.q);
    if (m == kNone) throw AxiomViolationError("morphism restriction missing a cone");
    return m;
  }

  bool pair_compatible(const SliceDescentDatum& d, const SliceDescentDatum& e,
                       const std::vector<Mor>& psi, int i, int j) const {
    Mor lhs = c_.try_compose(e.overlap[static_cast<std::size_t>(i) * n_ + j],
                             restricted_morphism(psi[i], i, j, d.local[i], e.local[i], false));
    Mor rhs = c_.try_compose(restricted_morphism(psi[j], i, j, d.local[j], e.local[j], true),
                             d.overlap[static_cast<std::size_t>(i) * n_ + j]);
    return lhs == rhs;
  }

  std::vector<std::vector<Mor>> search(const SliceDescentDatum& d, const SliceDescentDatum& e,
                                       std::size_t cap, bool first_only) const {
    std::vector<std::vector<Mor>> out;
    std::vector<Mor> psi(n_);
    std::function<bool(int)> go = [&](int i) -> bool {
      if (i == n_) {
        out.push_back(psi);
        if (first_only) return true;
        if (out.size() > cap) throw SizeBound("descent morphisms exceed " + std::to_string(cap));
        return false;
      }
      for (Mor cand : slice_isos(c_, d.local[i], e.local[i])) {
        psi[i] = cand;
        bool ok = true;
        for (int j = 0; j <= i && ok; ++j)
          ok = pair_compatible(d, e, psi, j, i) && (j == i || pair_compatible(d, e, psi, i, j));
        if (ok && go(i + 1)) return true;
      }
      return false;
    };
    if (n_ == 0) {
      out.push_back({});
      return out;
    }
    go(0);
    return out;
  }

  const Site& site_;
  const FinCategory& c_;
  const CoverFamily& fam_;
  int n_;
};

/// Effectivity of descent for morphisms-as-objects: for every basis cover,
/// the comparison from the isomorphism groupoid of the slice over the base
/// to the category of descent data is an equivalence.  Essential
/// surjectivity and full faithfulness are checked directly against the
/// enumerated descent data; neither groupoid is materialized.
inline CheckReport descent_for_morphisms(const Site& site) {
  const FinCategory& c = site.cat();
  CheckReport rep;
  rep.check = "descent_for_morphisms";
  rep.verdict = true;
  rep.root.label = "slice descent along basis covers";

  for (const CoverFamily& fam : site.basis()) {
    SliceDescent ctx(site, fam);
    ReportNode& node = rep.root.child("cover");
    std::string mem = "{";
    for (std::size_t i = 0; i < fam.members.size(); ++i) {
      if (i) mem += ", ";
      mem += c.morphism_name(fam.members[i]);
    }
    mem += "}";
    node.fact("base", c.object_name(fam.base));
    node.fact("members", mem);

    const std::vector<Mor>& slice = c.into(fam.base);
    std::vector<SliceDescentDatum> images;
    images.reserve(slice.size());
    for (Mor b : slice) images.push_back(ctx.comparison_image(b));

    std::vector<SliceDescentDatum> data = ctx.enumerate_data();
    node.fact("descent data", std::to_string(data.size()));
    node.fact("slice objects", std::to_string(slice.size()));

    bool eso = true, full = true, faithful = true;
    for (const SliceDescentDatum& d : data) {
      bool hit = false;
      for (std::size_t bi = 0; bi < slice.size() && !hit; ++bi) {
        bool plausible = true;
        for (int i = 0; i < ctx.members() && plausible; ++i)
          plausible = !slice_isos(c, images[bi].local[i], d.local[i]).empty();
        if (plausible && ctx.has_morphism(images[bi], d)) hit = true;
      }
      if (!hit) {
        eso = false;
        std::string locs = "(";
        for (std::size_t i = 0; i < d.local.size(); ++i) {
          if (i) locs += ", ";
          locs += c.morphism_name(d.local[i]);
        }
        locs += ")";
        node.child("not essentially surjective").set(false).fact("descent datum", locs);
        break;
      }
    }

    for (std::size_t bi = 0; bi < slice.size() && full && faithful; ++bi)
      for (std::size_t bj = 0; bj < slice.size() && full && faithful; ++bj) {
        std::vector<Mor> upstairs = slice_isos(c, slice[bi], slice[bj]);
        std::vector<std::vector<Mor>> downstairs = ctx.morphisms(images[bi], images[bj]);
        // restriction of each slice iso to the members
        std::vector<std::vector<Mor>> restricted;
        restricted.reserve(upstairs.size());
        for (Mor psi : upstairs) {
          std::vector<Mor> tuple(ctx.members());
          for (int i = 0; i < ctx.members(); ++i) {
            const PullbackCone& rbi = site.limits().require_pullback(slice[bi], fam.members[i]);
            const PullbackCone& rbj = site.limits().require_pullback(slice[bj], fam.members[i]);
            Mor m = rbj.pair(c.try_compose(psi, rbi.p), rbi.q);
            if (m == kNone) throw AxiomViolationError("slice restriction pairing missing a cone");
            tuple[i] = m;
          }
          restricted.push_back(std::move(tuple));
        }
        for (const std::vector<Mor>& tuple : restricted)
          if (std::find(downstairs.begin(), downstairs.end(), tuple) == downstairs.end()) {
            full = false;
            node.child("restriction is not a descent morphism")
                .set(false)
                .fact("objects", c.morphism_name(slice[bi]) + ", " + c.morphism_name(slice[bj]));
            break;
          }
        for (std::size_t a = 0; a < restricted.size() && faithful; ++a)
          for (std::size_t b2 = a + 1; b2 < restricted.size(); ++b2)
            if (restricted[a] == restricted[b2]) {
              faithful = false;
              node.child("not faithful")
                  .set(false)
                  .fact("objects", c.morphism_name(slice[bi]) + ", " + c.morphism_name(slice[bj]))
                  .fact("collapsing isomorphisms",
                        c.morphism_name(upstairs[a]) + ", " + c.morphism_name(upstairs[b2]));
            }
        if (faithful && restricted.size() != downstairs.size()) {
          full = false;
          node.child("not full")
              .set(false)
              .fact("objects", c.morphism_name(slice[bi]) + ", " + c.morphism_name(slice[bj]))
              .fact("slice isomorphisms", std::to_string(restricted.size()))
              .fact("descent morphisms", std::to_string(downstairs.size()));
        }
      }

    node.fact("essentially surjective", eso ? "true" : "false");
    node.fact("fully faithful", (full && faithful) ? "true" : "false");
    bool pass = eso && full && faithful;
    node.set(pass);
    if (!pass) rep.verdict = false;
  }
  rep.root.set(rep.verdict);
  return rep;
}

}  // namespace stackcheck
