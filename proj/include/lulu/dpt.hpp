#pragma once

#include <map>
#include <random>

#include "lulu/operators.hpp"

namespace lulu {

/// Connected support carrying a single nonzero constant value. Down pulses
/// (negative) come from local minimum sets, up pulses from maximum sets.
struct Pulse {
  CellSet support;  // sorted
  Value value = 0;

  int scale() const { return static_cast<int>(support.size()); }
  int sign() const { return value < 0 ? -1 : 1; }
};

inline bool operator==(const Pulse& a, const Pulse& b) {
  return a.value == b.value && a.support == b.support;
}

/// Resolution layer D_n: all pulses of scale n.
struct Layer {
  int n = 0;
  std::vector<Pulse> down;
  std::vector<Pulse> up;

  bool empty() const { return down.empty() && up.empty(); }
  int gamma_minus() const { return static_cast<int>(down.size()); }
  int gamma_plus() const { return static_cast<int>(up.size()); }
};

inline bool operator==(const Layer& a, const Layer& b) {
  return a.n == b.n && a.down == b.down && a.up == b.up;
}

struct DptResult {
  std::shared_ptr<const Lattice> lattice;
  std::vector<Layer> layers;  // dense, layers[i].n == i + 1, trailing empties trimmed
  Value residual = 0;         // domain_only remainder; always 0 in zero_padded mode
  std::string source_digest;

  int max_scale() const { return static_cast<int>(layers.size()); }

  long long pulse_count() const {
    long long k = 0;
    for (const Layer& l : layers) k += l.gamma_minus() + l.gamma_plus();
    return k;
  }
};

// ---------------------------------------------------------------------------
// Content digest (FNV-1a 64).

namespace detail {

struct Fnv1a64 {
  std::uint64_t h = 1469598103934665603ull;
  void feed(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  }
  template <class T>
  void feed_int(T v) {
    const auto u = static_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    feed(b, 8);
  }
  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 0; i < 16; ++i) s[15 - i] = digits[(h >> (4 * i)) & 0xf];
    return s;
  }
};

}  // namespace detail

inline std::string field_digest(const ScalarField& f) {
  detail::Fnv1a64 d;
  d.feed_int(f.lattice->dims());
  for (int e : f.lattice->extents()) d.feed_int(e);
  d.feed_int(static_cast<int>(f.lattice->connectivity()));
  d.feed_int(static_cast<int>(f.lattice->boundary()));
  for (Value v : f.values) d.feed_int(v);
  return "fnv1a64:" + d.hex();
}

// ---------------------------------------------------------------------------
// Naive reference engine: full flat-zone rescan per scale.

/// One DPT step at scale n. U-phase extracts a down pulse from every size-n
/// local-min zone, then the L-phase extracts an up pulse from every size-n
/// local-max zone of the U-phase output; the returned field equals
/// p_n(state, n). The state must have no extremal sets of size < n.
inline std::pair<Layer, ScalarField> extract_layer(const ScalarField& state, int n) {
  if (n < 1) throw std::invalid_argument("extract_layer: n must be >= 1");
  Layer layer;
  layer.n = n;

  const ZonePartition zp = flat_zones(state);
  for (const Zone& z : zp.zones) {
    if (z.size() >= n) continue;
    const bool zpad = state.lattice->zero_padded();
    if (detail::zone_extremal_target(zp, z, Extremum::minimum, zpad).first ||
        detail::zone_extremal_target(zp, z, Extremum::maximum, zpad).first)
      throw std::logic_error("extract_layer: extremal zone of size " + std::to_string(z.size()) +
                             " < n=" + std::to_string(n) + " (engine invariant violated)");
  }

  ScalarField mid = state;
  for (const ZoneEdit& e : plan_extremal_stage(state, zp, n, Extremum::minimum)) {
    const Value v = e.from - e.to;
    if (v >= 0) throw std::logic_error("extract_layer: down pulse value must be negative");
    layer.down.push_back(Pulse{e.cells, v});
    for (Cell c : e.cells) mid.values[static_cast<std::size_t>(c)] = e.to;
  }

  const ZonePartition zp2 = flat_zones(mid);
  ScalarField out = mid;
  for (const ZoneEdit& e : plan_extremal_stage(mid, zp2, n, Extremum::maximum)) {
    const Value v = e.from - e.to;
    if (v <= 0) throw std::logic_error("extract_layer: up pulse value must be positive");
    layer.up.push_back(Pulse{e.cells, v});
    for (Cell c : e.cells) out.values[static_cast<std::size_t>(c)] = e.to;
  }
  return {std::move(layer), std::move(out)};
}

struct DecomposeOptions {
  enum class Engine { zone_graph, naive };
  Engine engine = Engine::zone_graph;
  // Test hook: when set, zones within each stage are processed in a
  // shuffled order; the result must not change.
  bool shuffle = false;
  std::uint64_t shuffle_seed = 0;
};

namespace detail {

inline void trim_layers(std::vector<Layer>& layers) {
  while (!layers.empty() && layers.back().empty()) layers.pop_back();
}

inline void sort_layer(Layer& l) {
  auto by_front = [](const Pulse& a, const Pulse& b) { return a.support.front() < b.support.front(); };
  std::sort(l.down.begin(), l.down.end(), by_front);
  std::sort(l.up.begin(), l.up.end(), by_front);
}

inline DptResult decompose_naive(const ScalarField& f) {
  DptResult r;
  r.lattice = f.lattice;
  r.source_digest = field_digest(f);
  ScalarField state = f;
  const bool zpad = f.lattice->zero_padded();
  for (int n = 1; n <= f.cell_count(); ++n) {
    if (zpad ? state.is_zero() : state.is_constant()) break;
    auto [layer, next] = extract_layer(state, n);
    sort_layer(layer);
    r.layers.push_back(std::move(layer));
    state = std::move(next);
  }
  if (zpad) {
    if (!state.is_zero()) throw std::logic_error("decompose: did not terminate at zero");
  } else {
    if (!state.is_constant()) throw std::logic_error("decompose: did not terminate at a flat field");
    r.residual = state.values.front();
  }
  trim_layers(r.layers);
  return r;
}

// ---------------------------------------------------------------------------
// Production engine: zone graph with union-find merging and a size-ordered
// work queue. Equivalent to the naive engine by construction; the equality
// is property-tested.

class ZoneGraphEngine {
public:
  explicit ZoneGraphEngine(const ScalarField& f, const DecomposeOptions& opt)
      : lat_(*f.lattice), opt_(opt), rng_(opt.shuffle_seed) {
    build(f);
  }

  DptResult run(const ScalarField& f) {
    DptResult r;
    r.lattice = f.lattice;
    r.source_digest = field_digest(f);
    const bool zpad = lat_.zero_padded();

    int n = 0;
    while (true) {
      if (live_ == 1) {
        const Cell root = only_live_root();
        if (!zpad || info_[root].value == 0) {
          r.residual = zpad ? 0 : info_[root].value;
          break;
        }
      }
      const int next = next_scale(n + 1);
      if (next < 0) throw std::logic_error("zone graph: no further scales but field not settled");
      n = next;
      while (static_cast<int>(r.layers.size()) < n) {
        Layer empty;
        empty.n = static_cast<int>(r.layers.size()) + 1;
        r.layers.push_back(std::move(empty));
      }
      Layer& layer = r.layers[static_cast<std::size_t>(n - 1)];
      phase(n, Extremum::minimum, layer);
      phase(n, Extremum::maximum, layer);
      sort_layer(layer);
    }
    trim_layers(r.layers);
    return r;
  }

private:
  struct ZInfo {
    Value value = 0;
    std::int32_t size = 0;
    Cell min_cell = 0;
    bool outside = false;
    bool alive = false;
    std::vector<Cell> nbrs;     // root cells, possibly stale
    std::vector<Cell> members;  // unsorted
  };

  const Lattice& lat_;
  DecomposeOptions opt_;
  std::mt19937_64 rng_;
  std::vector<Cell> parent_;
  std::vector<ZInfo> info_;
  std::map<std::int32_t, std::vector<Cell>> by_size_;  // lazily cleaned
  Cell live_ = 0;

  Cell find(Cell c) {
    while (parent_[c] != c) {
      parent_[c] = parent_[parent_[c]];
      c = parent_[c];
    }
    return c;
  }

  void build(const ScalarField& f) {
    const Cell n = lat_.cell_count();
    parent_.resize(n);
    std::iota(parent_.begin(), parent_.end(), 0);
    std::vector<unsigned char> border(n, 0);
    for (Cell c = 0; c < n; ++c) {
      const bool touch = lat_.for_each_neighbor(c, [&](Cell w) {
        if (w > c && f.values[w] == f.values[c]) {
          const Cell rc = find(c);
          const Cell rw = find(w);
          if (rc != rw) parent_[std::max(rc, rw)] = std::min(rc, rw);
        }
      });
      border[c] = touch ? 1 : 0;
    }
    info_.resize(n);
    for (Cell c = 0; c < n; ++c) {
      const Cell r = find(c);
      ZInfo& z = info_[r];
      if (!z.alive) {
        z.alive = true;
        z.value = f.values[r];
        z.min_cell = c;
        ++live_;
      }
      ++z.size;
      z.min_cell = std::min(z.min_cell, c);
      z.outside = z.outside || border[c] != 0;
      z.members.push_back(c);
    }
    for (Cell c = 0; c < n; ++c) {
      const Cell rc = find(c);
      lat_.for_each_neighbor(c, [&](Cell w) {
        const Cell rw = find(w);
        if (rw != rc) info_[rc].nbrs.push_back(rw);
      });
    }
    for (Cell r = 0; r < n; ++r) {
      if (!info_[r].alive) continue;
      dedupe_neighbors(r);
      by_size_[info_[r].size].push_back(r);
    }
  }

  void dedupe_neighbors(Cell r) {
    auto& nb = info_[r].nbrs;
    for (Cell& x : nb) x = find(x);
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    nb.erase(std::remove(nb.begin(), nb.end(), r), nb.end());
  }

  Cell only_live_root() {
    for (const auto& [size, roots] : by_size_)
      for (Cell r : roots)
        if (info_[find(r)].alive && find(r) == r) return r;
    throw std::logic_error("zone graph: no live zone");
  }

  int next_scale(int at_least) {
    for (auto it = by_size_.lower_bound(at_least); it != by_size_.end(); ++it) {
      auto& roots = it->second;
      roots.erase(std::remove_if(roots.begin(), roots.end(),
                                 [&](Cell r) { return !info_[r].alive || find(r) != r ||
                                                      info_[r].size != it->first; }),
                  roots.end());
      if (!roots.empty()) return static_cast<int>(it->first);
    }
    return -1;
  }

  void phase(int n, Extremum pol, Layer& layer) {
    auto it = by_size_.find(n);
    if (it == by_size_.end()) return;
    std::vector<Cell> candidates;
    for (Cell r : it->second)
      if (info_[r].alive && find(r) == r && info_[r].size == n) candidates.push_back(r);
    std::sort(candidates.begin(), candidates.end(),
              [&](Cell a, Cell b) { return info_[a].min_cell < info_[b].min_cell; });
    if (opt_.shuffle) std::shuffle(candidates.begin(), candidates.end(), rng_);

    for (Cell r : candidates) {
      if (!info_[r].alive || find(r) != r || info_[r].size != n) continue;
      dedupe_neighbors(r);
      ZInfo& z = info_[r];
      const bool outside = z.outside && lat_.zero_padded();
      if (z.nbrs.empty() && !outside) continue;
      Value target = outside ? 0
                             : (pol == Extremum::minimum ? std::numeric_limits<Value>::max()
                                                         : std::numeric_limits<Value>::min());
      for (Cell w : z.nbrs) {
        const Value v = info_[w].value;
        target = pol == Extremum::minimum ? std::min(target, v) : std::max(target, v);
      }
      const bool extremal = pol == Extremum::minimum ? z.value < target : z.value > target;
      if (!extremal) continue;

      Pulse pulse;
      pulse.support.assign(z.members.begin(), z.members.end());
      std::sort(pulse.support.begin(), pulse.support.end());
      pulse.value = z.value - target;
      (pol == Extremum::minimum ? layer.down : layer.up).push_back(std::move(pulse));

      merge_to_target(r, target);
    }
  }

  /// Re-values zone r to `target` and unites it with every neighbor already
  /// at that value. The witness neighbor always exists (or the zone borders
  /// OUTSIDE at value 0), so the merged zone is strictly larger unless it
  /// dissolves into the zero background.
  void merge_to_target(Cell r, Value target) {
    info_[r].value = target;
    std::vector<Cell> absorb;
    for (Cell w : info_[r].nbrs)
      if (info_[w].value == target) absorb.push_back(w);

    Cell survivor = r;
    for (Cell w : absorb) {
      if (w == survivor) continue;
      Cell big = survivor;
      Cell small = w;
      if (info_[small].members.size() > info_[big].members.size()) std::swap(big, small);
      parent_[small] = big;
      ZInfo& bz = info_[big];
      ZInfo& sz = info_[small];
      bz.size += sz.size;
      bz.min_cell = std::min(bz.min_cell, sz.min_cell);
      bz.outside = bz.outside || sz.outside;
      bz.value = target;
      bz.members.insert(bz.members.end(), sz.members.begin(), sz.members.end());
      if (bz.nbrs.size() < sz.nbrs.size()) bz.nbrs.swap(sz.nbrs);
      bz.nbrs.insert(bz.nbrs.end(), sz.nbrs.begin(), sz.nbrs.end());
      sz.alive = false;
      sz.members.clear();
      sz.members.shrink_to_fit();
      sz.nbrs.clear();
      sz.nbrs.shrink_to_fit();
      --live_;
      survivor = big;
    }
    dedupe_neighbors(survivor);
    by_size_[info_[survivor].size].push_back(survivor);
  }
};

}  // namespace detail

/// Full Discrete Pulse Transform. Iterates the layer extraction for
/// n = 1, 2, ... until the state is identically zero (zero_padded) or a
/// single flat zone (domain_only; its value becomes the residual).
inline DptResult decompose(const ScalarField& f, const DecomposeOptions& opt = {}) {
  if (opt.engine == DecomposeOptions::Engine::naive) {
    if (!opt.shuffle) return detail::decompose_naive(f);
    // Shuffled naive run: permute within-stage zone iteration by going
    // through the zone-graph machinery's order hook on a per-layer basis.
    // The naive planner applies edits simultaneously, so a shuffled order
    // is realized by shuffling the edit list before application.
    DptResult r;
    r.lattice = f.lattice;
    r.source_digest = field_digest(f);
    std::mt19937_64 rng(opt.shuffle_seed);
    ScalarField state = f;
    const bool zpad = f.lattice->zero_padded();
    for (int n = 1; n <= f.cell_count(); ++n) {
      if (zpad ? state.is_zero() : state.is_constant()) break;
      Layer layer;
      layer.n = n;
      const ZonePartition zp = flat_zones(state);
      auto down = plan_extremal_stage(state, zp, n, Extremum::minimum);
      std::shuffle(down.begin(), down.end(), rng);
      for (const ZoneEdit& e : down) {
        layer.down.push_back(Pulse{e.cells, e.from - e.to});
        for (Cell c : e.cells) state.values[static_cast<std::size_t>(c)] = e.to;
      }
      const ZonePartition zp2 = flat_zones(state);
      auto up = plan_extremal_stage(state, zp2, n, Extremum::maximum);
      std::shuffle(up.begin(), up.end(), rng);
      for (const ZoneEdit& e : up) {
        layer.up.push_back(Pulse{e.cells, e.from - e.to});
        for (Cell c : e.cells) state.values[static_cast<std::size_t>(c)] = e.to;
      }
      detail::sort_layer(layer);
      r.layers.push_back(std::move(layer));
    }
    r.residual = zpad ? 0 : state.values.front();
    detail::trim_layers(r.layers);
    return r;
  }
  detail::ZoneGraphEngine engine(f, opt);
  return engine.run(f);
}

/// Pointwise sum of all pulses with lo <= scale <= hi. The residual is
/// added only for a full-range reconstruction (lo == 1 and hi >= N).
inline ScalarField reconstruct(const DptResult& r, int lo, int hi) {
  if (lo < 1 || lo > hi) throw std::invalid_argument("reconstruct: need 1 <= lo <= hi");
  ScalarField out(r.lattice, std::vector<Value>(static_cast<std::size_t>(r.lattice->cell_count()), 0));
  for (const Layer& layer : r.layers) {
    if (layer.n < lo || layer.n > hi) continue;
    for (const auto* list : {&layer.down, &layer.up})
      for (const Pulse& p : *list)
        for (Cell c : p.support) out.values[static_cast<std::size_t>(c)] += p.value;
  }
  if (lo == 1 && hi >= r.max_scale())
    for (Value& v : out.values) v += r.residual;
  return out;
}

inline ScalarField reconstruct(const DptResult& r) {
  return reconstruct(r, 1, std::max(1, r.max_scale()));
}

struct SpectrumRow {
  int n = 0;
  int gamma_minus = 0;
  int gamma_plus = 0;
  long long energy = 0;  // sum of |value| * scale over the layer
};

/// Per-scale pulse counts and energy, one row per non-empty layer.
inline std::vector<SpectrumRow> spectrum(const DptResult& r) {
  std::vector<SpectrumRow> rows;
  for (const Layer& layer : r.layers) {
    if (layer.empty()) continue;
    SpectrumRow row;
    row.n = layer.n;
    row.gamma_minus = layer.gamma_minus();
    row.gamma_plus = layer.gamma_plus();
    for (const auto* list : {&layer.down, &layer.up})
      for (const Pulse& p : *list)
        row.energy += (p.value < 0 ? -p.value : p.value) * p.scale();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace lulu
