#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "stackcheck/core/limits.hpp"
#include "stackcheck/psh/presheaf.hpp"
#include "stackcheck/site/topology.hpp"

namespace stackcheck {

namespace detail {

/// True when every hom set of every value groupoid has at most one element.
/// For such presheaves parallel morphisms are equal, so every coherence
/// equation between composites with matching endpoints holds automatically
/// and the enumerators skip cocycle checking altogether.
inline bool thin_values(const PshGrpd& m) {
  for (const FinGroupoid& g : m.value)
    for (Obj a = 0; a < g.n_objects(); ++a)
      for (Obj b = 0; b < g.n_objects(); ++b)
        if (g.hom(a, b).size() > 1) return false;
  return true;
}

/// A descent category materialized as a finite groupoid: objects are the
/// enumerated data, morphisms are the tuple solutions between them, and
/// composition is componentwise in the value groupoids.
struct DescentCategory {
  FinGroupoid groupoid;
  std::vector<std::vector<Mor>> tuple;  // per groupoid morphism
  // (dom datum, cod datum, tuple) -> groupoid morphism.  The endpoints are
  // part of the key: distinct data can share underlying objects and differ
  // only in coherences, and then the same tuple connects several pairs.
  std::map<std::tuple<int, int, std::vector<Mor>>, int> tuple_index;
};

/// Builds the groupoid from a datum count, the ambient object each tuple
/// slot lives over, and a callback producing the morphism tuples between two
/// data.
template <class Morphisms>
DescentCategory materialize_descent_category(const PshGrpd& m, const std::vector<Obj>& slot_object,
                                             int n_data, Morphisms&& morphisms_between,
                                             const std::string& context) {
  DescentCategory out;
  CategoryData raw;
  raw.object_names.resize(n_data);
  for (int i = 0; i < n_data; ++i) raw.object_names[i] = "d" + std::to_string(i);

  std::vector<std::pair<int, int>> ends;  // per morphism: (dom datum, cod datum)
  for (int i = 0; i < n_data; ++i)
    for (int j = 0; j < n_data; ++j)
      for (std::vector<Mor>& t : morphisms_between(i, j)) {
        int k = static_cast<int>(out.tuple.size());
        raw.morphism_names.push_back("t" + std::to_string(k));
        raw.dom.push_back(i);
        raw.cod.push_back(j);
        ends.emplace_back(i, j);
        out.tuple_index.emplace(std::make_tuple(i, j, t), k);
        out.tuple.push_back(std::move(t));
      }

  int nm = static_cast<int>(out.tuple.size());
  raw.identity.assign(n_data, kNone);
  raw.compose.assign(static_cast<std::size_t>(nm) * nm, kNone);
  for (int k = 0; k < nm; ++k) {
    bool is_id = true;
    for (std::size_t s = 0; s < slot_object.size() && is_id; ++s)
      is_id = out.tuple[k][s] == m.value[slot_object[s]].id(m.value[slot_object[s]].dom(out.tuple[k][s]));
    if (is_id && ends[k].first == ends[k].second) raw.identity[ends[k].first] = k;
  }
  std::vector<Mor> comp(slot_object.size());
  for (int k2 = 0; k2 < nm; ++k2)
    for (int k1 = 0; k1 < nm; ++k1) {
      if (ends[k1].second != ends[k2].first) continue;
      for (std::size_t s = 0; s < slot_object.size(); ++s)
        comp[s] = m.value[slot_object[s]].compose(out.tuple[k2][s], out.tuple[k1][s]);
      auto it = out.tuple_index.find(std::make_tuple(ends[k1].first, ends[k2].second, comp));
      if (it == out.tuple_index.end())
        throw AxiomViolationError(context + ": composite of descent morphisms is not one");
      raw.at(k2, k1) = it->second;
    }
  out.groupoid = make_value_groupoid(raw, context);
  return out;
}

}  // namespace detail

/// Descent data for a declared cover {u_i : U_i -> X}: a section over each
/// member plus a comparison morphism over every ordered pairwise overlap,
/// coherent along every V-point of every member triple.  Stating coherence
/// on V-points keeps the construction inside a truncated ambient category —
/// only the pairwise pullbacks are ever formed, and when one of those is
/// missing the constructor refuses with the pullback's name rather than
/// guessing.
class CoverDescent {
 public:
  struct Datum {
    std::vector<Obj> object;     // per member
    std::vector<Mor> coherence;  // per ordered member pair, row-major
  };

  CoverDescent(const Site& site, const PshGrpd& m, const CoverFamily& cover)
      : c_(site.cat()), m_(m), base_(cover.base), members_(cover.members) {
    n_ = static_cast<int>(members_.size());
    cone_.reserve(static_cast<std::size_t>(n_) * n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        cone_.push_back(site.limits().require_pullback(members_[i], members_[j]));
    thin_ = detail::thin_values(m);
    instances_at_.assign(static_cast<std::size_t>(n_) * n_, {});
    if (!thin_) collect_instances();
  }

  Obj base() const { return base_; }
  const std::vector<Mor>& members() const { return members_; }
  const PullbackCone& overlap(int i, int j) const { return cone_[i * n_ + j]; }

  /// All coherent data, in lexicographic order of (sections, coherences).
  std::vector<Datum> enumerate_data(std::size_t cap = 500000) const {
    std::vector<Datum> out;
    Datum d;
    d.object.assign(n_, -1);
    d.coherence.assign(static_cast<std::size_t>(n_) * n_, kNone);
    enum_objects(0, d, out, cap);
    return out;
  }

  /// Morphism tuples d -> e: one value morphism per member, compatible with
  /// both coherence families over every overlap.
  std::vector<std::vector<Mor>> morphisms(const Datum& d, const Datum& e,
                                          std::size_t cap = 100000) const {
    std::vector<std::vector<Mor>> out;
    std::vector<Mor> t(n_, kNone);
    mor_search(0, d, e, t, out, cap);
    return out;
  }

  /// The descent groupoid together with the comparison functor from the
  /// value over the base that sends a section to its constant datum.
  struct Materialized {
    std::vector<Datum> data;
    FinGroupoid groupoid;
    Functor comparison;  // M(base) -> groupoid
  };

  Materialized materialize(std::size_t data_cap = 500000, std::size_t mor_cap = 100000) const {
    Materialized out;
    out.data = enumerate_data(data_cap);
    std::map<std::pair<std::vector<Obj>, std::vector<Mor>>, int> index;
    for (int i = 0; i < static_cast<int>(out.data.size()); ++i)
      index.emplace(std::make_pair(out.data[i].object, out.data[i].coherence), i);

    std::vector<Obj> slot_object(n_);
    for (int i = 0; i < n_; ++i) slot_object[i] = c_.dom(members_[i]);
    detail::DescentCategory dc = detail::materialize_descent_category(
        m_, slot_object, static_cast<int>(out.data.size()),
        [&](int i, int j) { return morphisms(out.data[i], out.data[j], mor_cap); },
        "descent groupoid over " + c_.object_name(base_));

    const FinGroupoid& mx = m_.value[base_];
    out.comparison.ob.resize(mx.n_objects());
    for (Obj a = 0; a < mx.n_objects(); ++a) {
      auto it = index.find(std::make_pair(constant_objects(a), constant_coherences(a)));
      if (it == index.end())
        throw AxiomViolationError("constant descent datum missing from the enumeration");
      out.comparison.ob[a] = it->second;
    }
    out.comparison.mor.resize(mx.n_morphisms());
    std::vector<Mor> t(n_);
    for (Mor al = 0; al < mx.n_morphisms(); ++al) {
      for (int i = 0; i < n_; ++i) t[i] = m_.restriction[members_[i]].mor[al];
      auto it = dc.tuple_index.find(std::make_tuple(
          out.comparison.ob[mx.dom(al)], out.comparison.ob[mx.cod(al)], t));
      if (it == dc.tuple_index.end())
        throw AxiomViolationError("restricted section morphism is not a descent morphism");
      out.comparison.mor[al] = it->second;
    }
    out.groupoid = std::move(dc.groupoid);
    return out;
  }

 private:
  struct Instance {
    int s_ij, s_jk, s_ik;        // coherence slots of the triple
    Mor t_ij, t_jk, t_ik;        // V-points of the three overlaps
    Obj v;                       // where the equation lives
  };

  // Every V-point of a member triple yields one coherence equation; the
  // points are enumerated once (they do not depend on the datum) and grouped
  // under the last slot the equation mentions.
  void collect_instances() {
    for (Obj v = 0; v < c_.n_objects(); ++v) {
      std::map<Mor, std::vector<std::vector<Mor>>> leg;  // common map V->X -> per-member points
      for (int i = 0; i < n_; ++i)
        for (Mor r : c_.hom(v, c_.dom(members_[i]))) {
          auto& slot = leg[c_.compose(members_[i], r)];
          if (slot.empty()) slot.resize(n_);
          slot[i].push_back(r);
        }
      for (const auto& [s, points] : leg) {
        (void)s;
        for (int i = 0; i < n_; ++i)
          for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k)
              for (Mor ri : points[i])
                for (Mor rj : points[j])
                  for (Mor rk : points[k]) {
                    Instance ins;
                    ins.s_ij = i * n_ + j;
                    ins.s_jk = j * n_ + k;
                    ins.s_ik = i * n_ + k;
                    ins.t_ij = point(ins.s_ij, ri, rj);
                    ins.t_jk = point(ins.s_jk, rj, rk);
                    ins.t_ik = point(ins.s_ik, ri, rk);
                    ins.v = v;
                    instances_at_[std::max({ins.s_ij, ins.s_jk, ins.s_ik})].push_back(ins);
                  }
      }
    }
  }

  Mor point(int slot, Mor a, Mor b) const {
    Mor t = cone_[slot].pair(a, b);
    if (t == kNone)
      throw AxiomViolationError("pullback of " + c_.morphism_name(cone_[slot].f) + " and " +
                                c_.morphism_name(cone_[slot].g) + " misses a point");
    return t;
  }

  bool instance_ok(const Datum& d, const Instance& ins) const {
    const FinGroupoid& gv = m_.value[ins.v];
    Mor first = m_.restriction[ins.t_ij].mor[d.coherence[ins.s_ij]];
    Mor then = m_.restriction[ins.t_jk].mor[d.coherence[ins.s_jk]];
    return gv.compose(then, first) == m_.restriction[ins.t_ik].mor[d.coherence[ins.s_ik]];
  }

  std::pair<Obj, Obj> slot_endpoints(int slot, const Datum& d) const {
    const PullbackCone& pc = cone_[slot];
    return {m_.restriction[pc.p].ob[d.object[slot / n_]],
            m_.restriction[pc.q].ob[d.object[slot % n_]]};
  }

  void enum_objects(int t, Datum& d, std::vector<Datum>& out, std::size_t cap) const {
    if (t == n_) {
      enum_coherence(0, d, out, cap);
      return;
    }
    for (Obj a = 0; a < m_.value[c_.dom(members_[t])].n_objects(); ++a) {
      d.object[t] = a;
      bool viable = true;
      for (int i = 0; i <= t && viable; ++i) {
        auto [l1, r1] = slot_endpoints(i * n_ + t, d);
        auto [l2, r2] = slot_endpoints(t * n_ + i, d);
        viable = !m_.value[cone_[i * n_ + t].apex].hom(l1, r1).empty() &&
                 !m_.value[cone_[t * n_ + i].apex].hom(l2, r2).empty();
      }
      if (viable) enum_objects(t + 1, d, out, cap);
    }
    d.object[t] = -1;
  }

  void enum_coherence(int s, Datum& d, std::vector<Datum>& out, std::size_t cap) const {
    if (s == n_ * n_) {
      if (out.size() >= cap) throw SizeBound("descent data exceed " + std::to_string(cap));
      out.push_back(d);
      return;
    }
    auto [l, r] = slot_endpoints(s, d);
    for (Mor phi : m_.value[cone_[s].apex].hom(l, r)) {
      d.coherence[s] = phi;
      bool ok = true;
      for (const Instance& ins : instances_at_[s])
        if (!instance_ok(d, ins)) {
          ok = false;
          break;
        }
      if (ok) enum_coherence(s + 1, d, out, cap);
    }
    d.coherence[s] = kNone;
  }

  void mor_search(int t, const Datum& d, const Datum& e, std::vector<Mor>& tup,
                  std::vector<std::vector<Mor>>& out, std::size_t cap) const {
    if (t == n_) {
      if (out.size() >= cap) throw SizeBound("descent morphisms exceed " + std::to_string(cap));
      out.push_back(tup);
      return;
    }
    for (Mor cand : m_.value[c_.dom(members_[t])].hom(d.object[t], e.object[t])) {
      tup[t] = cand;
      bool ok = true;
      for (int i = 0; i <= t && ok; ++i)
        ok = mor_slot_ok(i * n_ + t, d, e, tup) && mor_slot_ok(t * n_ + i, d, e, tup);
      if (ok) mor_search(t + 1, d, e, tup, out, cap);
    }
    tup[t] = kNone;
  }

  // over the (i,j) overlap: e's coherence after m_i|p equals m_j|q after d's
  bool mor_slot_ok(int slot, const Datum& d, const Datum& e, const std::vector<Mor>& tup) const {
    const PullbackCone& pc = cone_[slot];
    const FinGroupoid& gp = m_.value[pc.apex];
    Mor lhs = gp.compose(e.coherence[slot], m_.restriction[pc.p].mor[tup[slot / n_]]);
    Mor rhs = gp.compose(m_.restriction[pc.q].mor[tup[slot % n_]], d.coherence[slot]);
    return lhs == rhs;
  }

  std::vector<Obj> constant_objects(Obj a) const {
    std::vector<Obj> v(n_);
    for (int i = 0; i < n_; ++i) v[i] = m_.restriction[members_[i]].ob[a];
    return v;
  }

  std::vector<Mor> constant_coherences(Obj a) const {
    std::vector<Mor> v(static_cast<std::size_t>(n_) * n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        const PullbackCone& pc = cone_[i * n_ + j];
        Obj over = m_.restriction[pc.p].ob[m_.restriction[members_[i]].ob[a]];
        v[i * n_ + j] = m_.value[pc.apex].id(over);
      }
    return v;
  }

  const FinCategory& c_;
  const PshGrpd& m_;
  Obj base_;
  std::vector<Mor> members_;
  int n_ = 0;
  bool thin_ = false;
  std::vector<PullbackCone> cone_;                     // row-major ordered pairs
  std::vector<std::vector<Instance>> instances_at_;    // grouped by last slot
};

/// Descent data indexed by a covering sieve: a section over every member and
/// a comparison morphism for every further restriction of every member,
/// unital and cocycle-coherent.  Sieves are precomposition-closed, so this
/// form needs no pullbacks at all — it is total on any site, and it is what
/// the completion construction runs on.
class SieveDescent {
 public:
  struct Datum {
    std::vector<Obj> object;     // per member, in member order
    std::vector<Mor> coherence;  // flat (member, restriction) table
  };

  SieveDescent(const Site& site, const PshGrpd& m, const Sieve& s)
      : c_(site.cat()), m_(m), base_(s.base), members_(sieve_members(c_, s)) {
    nm_ = static_cast<int>(members_.size());
    member_pos_.assign(c_.n_morphisms(), -1);
    for (int t = 0; t < nm_; ++t) member_pos_[members_[t]] = t;
    slot_base_.resize(nm_ + 1);
    slot_base_[0] = 0;
    for (int t = 0; t < nm_; ++t)
      slot_base_[t + 1] = slot_base_[t] + static_cast<int>(c_.into(c_.dom(members_[t])).size());
    into_pos_.assign(c_.n_objects(), {});
    for (Obj x = 0; x < c_.n_objects(); ++x) {
      into_pos_[x].assign(c_.n_morphisms(), -1);
      const std::vector<Mor>& in = c_.into(x);
      for (int i = 0; i < static_cast<int>(in.size()); ++i) into_pos_[x][in[i]] = i;
    }

    // rank the free slots (identity restrictions are forced to identities)
    free_rank_.assign(slot_base_[nm_], -1);
    for (int t = 0; t < nm_; ++t)
      for (Mor w : c_.into(c_.dom(members_[t]))) {
        if (w == c_.id(c_.dom(members_[t]))) continue;
        int s = slot(t, w);
        free_rank_[s] = static_cast<int>(free_slot_.size());
        free_slot_.push_back(s);
        if (member_pos_[c_.compose(members_[t], w)] < 0)
          throw AxiomViolationError("sieve is not closed under precomposition");
      }

    pair_checks_at_.assign(nm_, {});
    for (int t = 0; t < nm_; ++t)
      for (Mor w : c_.into(c_.dom(members_[t]))) {
        if (w == c_.id(c_.dom(members_[t]))) continue;
        PairCheck pc{t, member_pos_[c_.compose(members_[t], w)], w, slot(t, w)};
        pair_checks_at_[std::max(pc.from, pc.to)].push_back(pc);
      }

    thin_ = detail::thin_values(m);
    instances_at_.assign(free_slot_.size(), {});
    if (!thin_) collect_instances();
  }

  Obj base() const { return base_; }
  const std::vector<Mor>& members() const { return members_; }
  int member_pos(Mor g) const { return member_pos_[g]; }
  int slot(int t, Mor w) const { return slot_base_[t] + into_pos_[c_.dom(members_[t])][w]; }
  int coherence_slots() const { return slot_base_[nm_]; }

  std::vector<Datum> enumerate_data(std::size_t cap = 500000) const {
    std::vector<Datum> out;
    Datum d;
    d.object.assign(nm_, -1);
    d.coherence.assign(slot_base_[nm_], kNone);
    enum_objects(0, d, out, cap);
    return out;
  }

  std::vector<std::vector<Mor>> morphisms(const Datum& d, const Datum& e,
                                          std::size_t cap = 100000) const {
    std::vector<std::vector<Mor>> out;
    std::vector<Mor> t(nm_, kNone);
    mor_search(0, d, e, t, out, cap);
    return out;
  }

  /// Image of a plain section: restrictions of it with identity coherences.
  Datum constant_datum(Obj a) const {
    Datum d;
    d.object.resize(nm_);
    for (int t = 0; t < nm_; ++t) d.object[t] = m_.restriction[members_[t]].ob[a];
    d.coherence.assign(slot_base_[nm_], kNone);
    for (int t = 0; t < nm_; ++t)
      for (Mor w : c_.into(c_.dom(members_[t])))
        d.coherence[slot(t, w)] =
            m_.value[c_.dom(w)].id(m_.restriction[c_.compose(members_[t], w)].ob[a]);
    return d;
  }

  std::vector<Mor> constant_tuple(Mor al) const {
    std::vector<Mor> t(nm_);
    for (int i = 0; i < nm_; ++i) t[i] = m_.restriction[members_[i]].mor[al];
    return t;
  }

  /// The descent groupoid with lookup tables kept around: the completion
  /// needs to locate restricted data and tuples by value, so unlike the
  /// family-indexed variant this one exposes the index maps.
  struct Materialized {
    std::vector<Datum> data;
    FinGroupoid groupoid;
    std::vector<std::vector<Mor>> tuple;  // per morphism
    std::map<std::tuple<int, int, std::vector<Mor>>, int> tuple_index;
    std::map<std::pair<std::vector<Obj>, std::vector<Mor>>, int> index;  // datum -> object
    Functor comparison;  // M(base) -> groupoid
  };

  Materialized materialize(std::size_t data_cap = 500000, std::size_t mor_cap = 100000) const {
    Materialized out;
    out.data = enumerate_data(data_cap);
    for (int i = 0; i < static_cast<int>(out.data.size()); ++i)
      out.index.emplace(std::make_pair(out.data[i].object, out.data[i].coherence), i);

    std::vector<Obj> slot_object(nm_);
    for (int i = 0; i < nm_; ++i) slot_object[i] = c_.dom(members_[i]);
    detail::DescentCategory dc = detail::materialize_descent_category(
        m_, slot_object, static_cast<int>(out.data.size()),
        [&](int i, int j) { return morphisms(out.data[i], out.data[j], mor_cap); },
        "descent groupoid over a sieve on " + c_.object_name(base_));

    const FinGroupoid& mx = m_.value[base_];
    out.comparison.ob.resize(mx.n_objects());
    for (Obj a = 0; a < mx.n_objects(); ++a) {
      Datum d = constant_datum(a);
      auto it = out.index.find(std::make_pair(d.object, d.coherence));
      if (it == out.index.end())
        throw AxiomViolationError("constant descent datum missing from the enumeration");
      out.comparison.ob[a] = it->second;
    }
    out.comparison.mor.resize(mx.n_morphisms());
    for (Mor al = 0; al < mx.n_morphisms(); ++al) {
      auto it = dc.tuple_index.find(std::make_tuple(
          out.comparison.ob[mx.dom(al)], out.comparison.ob[mx.cod(al)], constant_tuple(al)));
      if (it == dc.tuple_index.end())
        throw AxiomViolationError("restricted section morphism is not a descent morphism");
      out.comparison.mor[al] = it->second;
    }
    out.groupoid = std::move(dc.groupoid);
    out.tuple = std::move(dc.tuple);
    out.tuple_index = std::move(dc.tuple_index);
    return out;
  }

 private:
  struct Instance {
    int s_w, s_v, s_wv;  // coherence slots: (g,w), (gw,v), (g,wv)
    Mor v;               // the inner restriction
    Obj home;            // dom(v), where the equation lives
  };

  struct PairCheck {
    int from, to;  // member positions of g and g∘w
    Mor w;
    int slot;
  };

  // coherence along w then v must equal coherence along w∘v; instances with
  // an identity restriction hold by unitality and are skipped
  void collect_instances() {
    for (int t = 0; t < nm_; ++t) {
      Obj dg = c_.dom(members_[t]);
      for (Mor w : c_.into(dg)) {
        if (w == c_.id(dg)) continue;
        int t2 = member_pos_[c_.compose(members_[t], w)];
        for (Mor v : c_.into(c_.dom(w))) {
          if (v == c_.id(c_.dom(w))) continue;
          Instance ins;
          ins.s_w = slot(t, w);
          ins.s_v = slot(t2, v);
          ins.s_wv = slot(t, c_.compose(w, v));
          ins.v = v;
          ins.home = c_.dom(v);
          int trigger = std::max(free_rank_[ins.s_w], free_rank_[ins.s_v]);
          trigger = std::max(trigger, free_rank_[ins.s_wv]);  // forced slots rank -1
          instances_at_[trigger].push_back(ins);
        }
      }
    }
  }

  bool instance_ok(const Datum& d, const Instance& ins) const {
    Mor around = m_.value[ins.home].compose(d.coherence[ins.s_v],
                                            m_.restriction[ins.v].mor[d.coherence[ins.s_w]]);
    return around == d.coherence[ins.s_wv];
  }

  void enum_objects(int t, Datum& d, std::vector<Datum>& out, std::size_t cap) const {
    if (t == nm_) {
      fill_forced(d);
      enum_coherence(0, d, out, cap);
      return;
    }
    for (Obj a = 0; a < m_.value[c_.dom(members_[t])].n_objects(); ++a) {
      d.object[t] = a;
      bool viable = true;
      for (const PairCheck& pc : pair_checks_at_[t]) {
        if (m_.value[c_.dom(pc.w)]
                .hom(m_.restriction[pc.w].ob[d.object[pc.from]], d.object[pc.to])
                .empty()) {
          viable = false;
          break;
        }
      }
      if (viable) enum_objects(t + 1, d, out, cap);
    }
    d.object[t] = -1;
  }

  void fill_forced(Datum& d) const {
    for (int t = 0; t < nm_; ++t) {
      Obj dg = c_.dom(members_[t]);
      d.coherence[slot(t, c_.id(dg))] = m_.value[dg].id(d.object[t]);
    }
  }

  void enum_coherence(int r, Datum& d, std::vector<Datum>& out, std::size_t cap) const {
    if (r == static_cast<int>(free_slot_.size())) {
      if (out.size() >= cap) throw SizeBound("descent data exceed " + std::to_string(cap));
      out.push_back(d);
      return;
    }
    int s = free_slot_[r];
    int t = slot_member(s);
    Mor w = c_.into(c_.dom(members_[t]))[s - slot_base_[t]];
    Obj from = m_.restriction[w].ob[d.object[t]];
    Obj to = d.object[member_pos_[c_.compose(members_[t], w)]];
    for (Mor g : m_.value[c_.dom(w)].hom(from, to)) {
      d.coherence[s] = g;
      bool ok = true;
      for (const Instance& ins : instances_at_[r])  // empty for thin values
        if (!instance_ok(d, ins)) {
          ok = false;
          break;
        }
      if (ok) enum_coherence(r + 1, d, out, cap);
    }
    d.coherence[s] = kNone;
  }

  int slot_member(int s) const {
    int lo = 0, hi = nm_;
    while (hi - lo > 1) {
      int mid = (lo + hi) / 2;
      (slot_base_[mid] <= s ? lo : hi) = mid;
    }
    return lo;
  }

  void mor_search(int t, const Datum& d, const Datum& e, std::vector<Mor>& tup,
                  std::vector<std::vector<Mor>>& out, std::size_t cap) const {
    if (t == nm_) {
      if (out.size() >= cap) throw SizeBound("descent morphisms exceed " + std::to_string(cap));
      out.push_back(tup);
      return;
    }
    for (Mor cand : m_.value[c_.dom(members_[t])].hom(d.object[t], e.object[t])) {
      tup[t] = cand;
      bool ok = true;
      for (const PairCheck& pc : pair_checks_at_[t]) {
        const FinGroupoid& gw = m_.value[c_.dom(pc.w)];
        Mor lhs = gw.compose(e.coherence[pc.slot], m_.restriction[pc.w].mor[tup[pc.from]]);
        Mor rhs = gw.compose(tup[pc.to], d.coherence[pc.slot]);
        if (lhs != rhs) {
          ok = false;
          break;
        }
      }
      if (ok) mor_search(t + 1, d, e, tup, out, cap);
    }
    tup[t] = kNone;
  }

  const FinCategory& c_;
  const PshGrpd& m_;
  Obj base_;
  std::vector<Mor> members_;
  int nm_ = 0;
  bool thin_ = false;
  std::vector<int> member_pos_;             // Mor -> member position
  std::vector<int> slot_base_;              // member -> first coherence slot
  std::vector<std::vector<int>> into_pos_;  // object -> (Mor -> position in into)
  std::vector<int> free_rank_;              // slot -> assignment rank, -1 if forced
  std::vector<int> free_slot_;              // rank -> slot
  std::vector<std::vector<PairCheck>> pair_checks_at_;
  std::vector<std::vector<Instance>> instances_at_;  // grouped by trigger rank
};

}  // namespace stackcheck
