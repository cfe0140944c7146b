#pragma once

#include <limits>
#include <memory>
#include <numeric>
#include <utility>

#include "lulu/lattice.hpp"

namespace lulu {

/// Integer-valued function on a lattice window. In zero_padded mode the
/// function is conceptually 0 outside the window, so its support is finite.
struct ScalarField {
  std::shared_ptr<const Lattice> lattice;
  std::vector<Value> values;

  ScalarField() = default;
  ScalarField(std::shared_ptr<const Lattice> lat, std::vector<Value> vals)
      : lattice(std::move(lat)), values(std::move(vals)) {
    if (!lattice) throw std::invalid_argument("ScalarField: null lattice");
    if (static_cast<Cell>(values.size()) != lattice->cell_count())
      throw std::invalid_argument("ScalarField: value count does not match window");
  }

  Value at(Cell c) const { return values[static_cast<std::size_t>(c)]; }
  Cell cell_count() const { return lattice->cell_count(); }

  CellSet support() const {
    CellSet s;
    for (Cell c = 0; c < cell_count(); ++c)
      if (values[c] != 0) s.push_back(c);
    return s;
  }

  bool is_zero() const {
    for (Value v : values)
      if (v != 0) return false;
    return true;
  }

  bool is_constant() const {
    for (Value v : values)
      if (v != values.front()) return false;
    return true;
  }
};

inline ScalarField make_field(std::shared_ptr<const Lattice> lat, std::vector<Value> vals) {
  return ScalarField(std::move(lat), std::move(vals));
}

inline void check_same_window(const ScalarField& a, const ScalarField& b) {
  if (!a.lattice->same_window(*b.lattice))
    throw std::invalid_argument("fields live on different windows");
}

inline bool operator==(const ScalarField& a, const ScalarField& b) {
  return a.lattice->same_window(*b.lattice) && a.values == b.values;
}

inline ScalarField add(const ScalarField& a, const ScalarField& b) {
  check_same_window(a, b);
  ScalarField out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
  return out;
}

inline ScalarField sub(const ScalarField& a, const ScalarField& b) {
  check_same_window(a, b);
  ScalarField out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

inline bool pointwise_leq(const ScalarField& a, const ScalarField& b) {
  check_same_window(a, b);
  for (std::size_t i = 0; i < a.values.size(); ++i)
    if (a.values[i] > b.values[i]) return false;
  return true;
}

enum class Extremum { minimum, maximum };

inline const char* to_string(Extremum e) { return e == Extremum::minimum ? "min" : "max"; }

/// Maximal connected constant-value region.
struct Zone {
  int id = 0;
  Value value = 0;
  CellSet cells;
  std::vector<int> neighbor_zone_ids;
  bool touches_outside = false;

  int size() const { return static_cast<int>(cells.size()); }
};

struct ZonePartition {
  std::vector<Zone> zones;
  std::vector<int> zone_of;  // cell -> zone id

  const Zone& zone_at(Cell c) const { return zones[static_cast<std::size_t>(zone_of[c])]; }
};

/// Partition of the window into flat zones. Zone ids are assigned by the
/// smallest member's linear index, so the partition is deterministic.
inline ZonePartition flat_zones(const ScalarField& f) {
  const Lattice& lat = *f.lattice;
  const Cell n = lat.cell_count();
  std::vector<Cell> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Cell c) {
    while (parent[c] != c) {
      parent[c] = parent[parent[c]];
      c = parent[c];
    }
    return c;
  };
  std::vector<unsigned char> border(n, 0);
  for (Cell c = 0; c < n; ++c) {
    const bool touch = lat.for_each_neighbor(c, [&](Cell w) {
      if (w > c && f.values[w] == f.values[c]) {
        const Cell rc = find(c);
        const Cell rw = find(w);
        if (rc != rw) parent[std::max(rc, rw)] = std::min(rc, rw);
      }
    });
    border[c] = touch ? 1 : 0;
  }

  ZonePartition out;
  out.zone_of.assign(n, -1);
  for (Cell c = 0; c < n; ++c) {
    const Cell r = find(c);
    if (out.zone_of[r] < 0) {
      out.zone_of[r] = static_cast<int>(out.zones.size());
      Zone z;
      z.id = out.zone_of[r];
      z.value = f.values[r];
      out.zones.push_back(std::move(z));
    }
    out.zone_of[c] = out.zone_of[r];
    Zone& z = out.zones[static_cast<std::size_t>(out.zone_of[c])];
    z.cells.push_back(c);
    z.touches_outside = z.touches_outside || border[c] != 0;
  }
  for (Cell c = 0; c < n; ++c) {
    lat.for_each_neighbor(c, [&](Cell w) {
      const int zc = out.zone_of[c];
      const int zw = out.zone_of[w];
      if (zc != zw) out.zones[static_cast<std::size_t>(zc)].neighbor_zone_ids.push_back(zw);
    });
  }
  for (Zone& z : out.zones) {
    auto& ids = z.neighbor_zone_ids;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  return out;
}

namespace detail {

/// Zone-level extremality test plus the target value a stage would move the
/// zone to. Returns {extremal, target}. A zone with no adjacency at all
/// (whole window in domain_only mode) is never extremal.
inline std::pair<bool, Value> zone_extremal_target(const ZonePartition& zp, const Zone& z,
                                                   Extremum pol, bool zero_padded) {
  const bool outside = zero_padded && z.touches_outside;
  if (z.neighbor_zone_ids.empty() && !outside) return {false, 0};
  Value best = outside ? 0
                       : (pol == Extremum::minimum ? std::numeric_limits<Value>::max()
                                                   : std::numeric_limits<Value>::min());
  for (int id : z.neighbor_zone_ids) {
    const Value v = zp.zones[static_cast<std::size_t>(id)].value;
    if (pol == Extremum::minimum)
      best = std::min(best, v);
    else
      best = std::max(best, v);
  }
  const bool extremal = pol == Extremum::minimum ? z.value < best : z.value > best;
  return {extremal, best};
}

}  // namespace detail

/// True iff max over V of f is strictly below min over adj(V) of f
/// (OUTSIDE contributes 0 in zero_padded mode). Throws on empty or
/// disconnected V. A set with no adjacency at all is not extremal.
inline bool is_local_min_set(const ScalarField& f, const CellSet& v) {
  if (v.empty()) throw std::invalid_argument("is_local_min_set: empty cell set");
  if (!is_connected(*f.lattice, v)) throw std::invalid_argument("is_local_min_set: disconnected cell set");
  const AdjacencyResult adj = adjacency_set(*f.lattice, v);
  const bool outside = adj.touches_outside;
  if (adj.cells.empty() && !outside) return false;
  Value inner = std::numeric_limits<Value>::min();
  for (Cell c : v) inner = std::max(inner, f.at(c));
  Value beyond = outside ? 0 : std::numeric_limits<Value>::max();
  for (Cell c : adj.cells) beyond = std::min(beyond, f.at(c));
  return inner < beyond;
}

inline bool is_local_max_set(const ScalarField& f, const CellSet& v) {
  if (v.empty()) throw std::invalid_argument("is_local_max_set: empty cell set");
  if (!is_connected(*f.lattice, v)) throw std::invalid_argument("is_local_max_set: disconnected cell set");
  const AdjacencyResult adj = adjacency_set(*f.lattice, v);
  const bool outside = adj.touches_outside;
  if (adj.cells.empty() && !outside) return false;
  Value inner = std::numeric_limits<Value>::max();
  for (Cell c : v) inner = std::min(inner, f.at(c));
  Value beyond = outside ? 0 : std::numeric_limits<Value>::min();
  for (Cell c : adj.cells) beyond = std::max(beyond, f.at(c));
  return inner > beyond;
}

inline bool is_local_extremal_set(const ScalarField& f, const CellSet& v, Extremum pol) {
  return pol == Extremum::minimum ? is_local_min_set(f, v) : is_local_max_set(f, v);
}

/// All flat zones of cardinality exactly n that are local min (resp. max)
/// sets, ordered by zone id.
inline std::vector<Zone> extremal_zones(const ScalarField& f, int n, Extremum pol) {
  if (n < 1) throw std::invalid_argument("extremal_zones: n must be >= 1");
  const ZonePartition zp = flat_zones(f);
  std::vector<Zone> out;
  for (const Zone& z : zp.zones) {
    if (z.size() != n) continue;
    if (detail::zone_extremal_target(zp, z, pol, f.lattice->zero_padded()).first) out.push_back(z);
  }
  return out;
}

struct AdjacentWitness {
  Value value = 0;
  Cell cell = -1;        // window witness, or -1 when the witness is OUTSIDE
  bool is_outside = false;
};

namespace detail {

inline AdjacentWitness adjacent_witness(const ScalarField& f, const CellSet& v, Extremum pol) {
  if (v.empty()) throw std::invalid_argument("adjacent_witness: empty cell set");
  if (!is_connected(*f.lattice, v)) throw std::invalid_argument("adjacent_witness: disconnected cell set");
  const AdjacencyResult adj = adjacency_set(*f.lattice, v);
  const bool outside = adj.touches_outside;
  if (adj.cells.empty() && !outside)
    throw std::invalid_argument("adjacent_witness: set has no adjacency (whole window in domain_only mode)");
  AdjacentWitness w;
  bool have = false;
  for (Cell c : adj.cells) {  // ascending: ties resolve to the smallest index
    const Value x = f.at(c);
    const bool better = pol == Extremum::minimum ? x < w.value : x > w.value;
    if (!have || better) {
      w.value = x;
      w.cell = c;
      have = true;
    }
  }
  if (outside) {
    const bool outside_wins = !have || (pol == Extremum::minimum ? 0 < w.value : 0 > w.value);
    if (outside_wins) {  // window cells are preferred at equal value
      w.value = 0;
      w.cell = -1;
      w.is_outside = true;
    }
  }
  return w;
}

}  // namespace detail

/// min over adj(V) of f (OUTSIDE counts as 0) together with a deterministic
/// witness cell: smallest row-major index attaining the minimum, window
/// cells preferred over OUTSIDE at equal value.
inline AdjacentWitness min_adjacent_witness(const ScalarField& f, const CellSet& v) {
  return detail::adjacent_witness(f, v, Extremum::minimum);
}

inline AdjacentWitness max_adjacent_witness(const ScalarField& f, const CellSet& v) {
  return detail::adjacent_witness(f, v, Extremum::maximum);
}

// ---------------------------------------------------------------------------
// Desk-scale brute force over all connected sets, used to validate the
// flat-zone based searches and the lemma preconditions.

namespace detail {

/// Extremality of an arbitrary connected set given as an unsorted span,
/// using reusable scratch. Strict inequalities; OUTSIDE contributes 0.
inline bool span_extremal(const ScalarField& f, std::span<const Cell> s, Extremum pol,
                          std::vector<unsigned char>& in_set) {
  const Lattice& lat = *f.lattice;
  for (Cell c : s) in_set[c] = 1;
  Value inner = pol == Extremum::minimum ? std::numeric_limits<Value>::min()
                                         : std::numeric_limits<Value>::max();
  Value beyond = pol == Extremum::minimum ? std::numeric_limits<Value>::max()
                                          : std::numeric_limits<Value>::min();
  bool outside = false;
  bool any_adj = false;
  for (Cell c : s) {
    if (pol == Extremum::minimum)
      inner = std::max(inner, f.at(c));
    else
      inner = std::min(inner, f.at(c));
    const bool touch = lat.for_each_neighbor(c, [&](Cell w) {
      if (!in_set[w]) {
        any_adj = true;
        if (pol == Extremum::minimum)
          beyond = std::min(beyond, f.at(w));
        else
          beyond = std::max(beyond, f.at(w));
      }
    });
    outside = outside || touch;
  }
  for (Cell c : s) in_set[c] = 0;
  if (outside) beyond = pol == Extremum::minimum ? std::min<Value>(beyond, 0) : std::max<Value>(beyond, 0);
  if (!any_adj && !outside) return false;
  return pol == Extremum::minimum ? inner < beyond : inner > beyond;
}

}  // namespace detail

/// All connected sets of exactly `size` cells that are local extremal sets,
/// found by exhaustive enumeration. Desk scale only.
inline std::vector<CellSet> brute_force_extremal_sets(const ScalarField& f, int size, Extremum pol) {
  std::vector<CellSet> out;
  std::vector<unsigned char> scratch(f.cell_count(), 0);
  for_each_connected_set(*f.lattice, size, [&](std::span<const Cell> s) {
    if (detail::span_extremal(f, s, pol, scratch)) {
      CellSet v(s.begin(), s.end());
      std::sort(v.begin(), v.end());
      out.push_back(std::move(v));
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

/// True iff some connected set of size < n is a local min or max set.
/// Desk scale only; this is the lemma hypothesis check.
inline bool has_extremal_set_smaller_than(const ScalarField& f, int n) {
  std::vector<unsigned char> scratch(f.cell_count(), 0);
  for (int s = 1; s < n; ++s) {
    bool found = false;
    for_each_connected_set(*f.lattice, s, [&](std::span<const Cell> set) {
      if (found) return;
      if (detail::span_extremal(f, set, Extremum::minimum, scratch) ||
          detail::span_extremal(f, set, Extremum::maximum, scratch))
        found = true;
    });
    if (found) return true;
  }
  return false;
}

}  // namespace lulu
