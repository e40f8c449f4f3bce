#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "stackcheck/core/fincat.hpp"

namespace stackcheck {

/// Skeletal finite sets of sizes 0..max_size with all functions.  Object k is
/// the k-element set; a function f: d → c is named f<d><c>_<values> with the
/// value string f(0)f(1)…f(d-1) (empty suffix for d = 0).  Declaration order
/// — domain size, then codomain size, then lexicographic values — fixes every
/// downstream enumeration.
inline CategoryData finset_category_data(int max_size) {
  CategoryData raw;
  const int n = max_size + 1;  // object count
  for (int s = 0; s < n; ++s) raw.object_names.push_back(std::to_string(s));

  std::vector<std::vector<int>> values;  // value tuple per morphism
  auto pack = [&](int dom, int cod, const std::vector<int>& vals) {
    long key = dom * n + cod;
    for (int v : vals) key = key * n + v;
    return key;
  };
  std::unordered_map<long, Mor> lookup;

  raw.identity.assign(n, kNone);
  for (int d = 0; d < n; ++d) {
    for (int c = 0; c < n; ++c) {
      if (c == 0 && d > 0) continue;  // no maps from a nonempty set to 0
      long count = 1;
      for (int i = 0; i < d; ++i) count *= c;
      std::vector<int> vals(d, 0);
      for (long k = 0; k < count; ++k) {
        long rest = k;
        for (int i = d - 1; i >= 0; --i) {
          vals[i] = static_cast<int>(rest % c);
          rest /= c;
        }
        std::string name = "f" + std::to_string(d) + std::to_string(c);
        if (d > 0) {
          name += '_';
          for (int v : vals) name += static_cast<char>('0' + v);
        }
        Mor m = static_cast<Mor>(raw.morphism_names.size());
        raw.morphism_names.push_back(name);
        raw.dom.push_back(d);
        raw.cod.push_back(c);
        values.push_back(vals);
        lookup.emplace(pack(d, c, vals), m);
        bool is_id = d == c;
        for (int i = 0; i < d && is_id; ++i) is_id = vals[i] == i;
        if (is_id) raw.identity[d] = m;
      }
    }
  }

  const int nm = static_cast<int>(raw.morphism_names.size());
  raw.compose.assign(static_cast<std::size_t>(nm) * nm, kNone);
  std::vector<int> composed;
  for (Mor f = 0; f < nm; ++f) {
    for (Mor g = 0; g < nm; ++g) {
      if (raw.dom[g] != raw.cod[f]) continue;
      composed.resize(values[f].size());
      for (std::size_t i = 0; i < values[f].size(); ++i) composed[i] = values[g][values[f][i]];
      raw.at(g, f) = lookup.at(pack(raw.dom[f], raw.cod[g], composed));
    }
  }
  return raw;
}

/// Convenience: the named finite-set morphism for an explicit value tuple.
inline Mor finset_morphism(const FinCategory& c, int d, int cod, const std::vector<int>& vals) {
  std::string name = "f" + std::to_string(d) + std::to_string(cod);
  if (d > 0) {
    name += '_';
    for (int v : vals) name += static_cast<char>('0' + v);
  }
  auto m = c.find_morphism(name);
  if (!m) throw UnresolvedReference(name);
  return *m;
}

}  // namespace stackcheck
