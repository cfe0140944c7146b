#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lulu {

using Cell = std::int32_t;
using Value = std::int64_t;

// Sorted, duplicate-free row-major cell indices.
using CellSet = std::vector<Cell>;

enum class Connectivity { facet, full };
enum class Boundary { zero_padded, domain_only };

inline const char* to_string(Connectivity c) { return c == Connectivity::facet ? "facet" : "full"; }
inline const char* to_string(Boundary b) { return b == Boundary::zero_padded ? "zero_padded" : "domain_only"; }

/// Finite window of Z^d with a symmetric, irreflexive adjacency relation.
///
/// In zero_padded mode the rest of Z^d is modeled as a single virtual
/// OUTSIDE region of constant value 0 and unbounded size. It is adjacent to
/// exactly the border cells and is reported through flags, never as a cell.
class Lattice {
public:
  explicit Lattice(std::vector<int> extents, Connectivity connectivity = Connectivity::facet,
                   Boundary boundary = Boundary::zero_padded)
      : extents_(std::move(extents)), connectivity_(connectivity), boundary_(boundary) {
    if (extents_.empty()) throw std::invalid_argument("Lattice: extents must be non-empty");
    long long cells = 1;
    for (int e : extents_) {
      if (e <= 0) throw std::invalid_argument("Lattice: extents must be positive");
      cells *= e;
      if (cells > (1LL << 30)) throw std::invalid_argument("Lattice: window too large");
    }
    if (connectivity_ == Connectivity::full && extents_.size() != 2)
      throw std::invalid_argument("Lattice: full connectivity is defined for d=2 only");
    strides_.assign(extents_.size(), 1);
    for (int a = static_cast<int>(extents_.size()) - 2; a >= 0; --a)
      strides_[a] = strides_[a + 1] * extents_[a + 1];
    cells_ = static_cast<Cell>(cells);
  }

  int dims() const { return static_cast<int>(extents_.size()); }
  const std::vector<int>& extents() const { return extents_; }
  Connectivity connectivity() const { return connectivity_; }
  Boundary boundary() const { return boundary_; }
  Cell cell_count() const { return cells_; }
  bool zero_padded() const { return boundary_ == Boundary::zero_padded; }

  bool same_window(const Lattice& o) const {
    return extents_ == o.extents_ && connectivity_ == o.connectivity_ && boundary_ == o.boundary_;
  }

  std::vector<int> coords(Cell c) const {
    check_cell(c);
    std::vector<int> out(extents_.size());
    for (std::size_t a = 0; a < extents_.size(); ++a) {
      out[a] = c / strides_[a];
      c %= strides_[a];
    }
    return out;
  }

  bool contains(std::span<const int> xyz) const {
    if (xyz.size() != extents_.size()) return false;
    for (std::size_t a = 0; a < extents_.size(); ++a)
      if (xyz[a] < 0 || xyz[a] >= extents_[a]) return false;
    return true;
  }

  Cell index(std::span<const int> xyz) const {
    if (!contains(xyz)) throw std::out_of_range("Lattice: coordinate outside window");
    long long c = 0;
    for (std::size_t a = 0; a < extents_.size(); ++a) c += static_cast<long long>(xyz[a]) * strides_[a];
    return static_cast<Cell>(c);
  }

  /// Visits all window neighbors of c. Returns true iff c also borders
  /// OUTSIDE (always false in domain_only mode).
  template <class F>
  bool for_each_neighbor(Cell c, F&& fn) const {
    bool outside = false;
    if (connectivity_ == Connectivity::facet) {
      Cell rest = c;
      for (std::size_t a = 0; a < extents_.size(); ++a) {
        const int x = rest / strides_[a];
        rest %= strides_[a];
        if (x > 0)
          fn(static_cast<Cell>(c - strides_[a]));
        else
          outside = true;
        if (x + 1 < extents_[a])
          fn(static_cast<Cell>(c + strides_[a]));
        else
          outside = true;
      }
    } else {
      const int r = c / strides_[0];
      const int col = c % strides_[0];
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int nr = r + dr;
          const int nc = col + dc;
          if (nr >= 0 && nr < extents_[0] && nc >= 0 && nc < extents_[1])
            fn(static_cast<Cell>(nr * strides_[0] + nc));
          else
            outside = true;
        }
    }
    return outside && zero_padded();
  }

  struct Neighborhood {
    CellSet cells;
    bool touches_outside = false;
  };

  Neighborhood neighbors(Cell c) const {
    check_cell(c);
    Neighborhood out;
    out.touches_outside = for_each_neighbor(c, [&](Cell w) { out.cells.push_back(w); });
    std::sort(out.cells.begin(), out.cells.end());
    return out;
  }

  void check_cell(Cell c) const {
    if (c < 0 || c >= cells_) throw std::out_of_range("Lattice: cell index outside window");
  }

  std::string describe() const {
    std::string s;
    for (std::size_t a = 0; a < extents_.size(); ++a) {
      if (a) s += 'x';
      s += std::to_string(extents_[a]);
    }
    s += ' ';
    s += to_string(connectivity_);
    s += ' ';
    s += to_string(boundary_);
    return s;
  }

private:
  std::vector<int> extents_;
  Connectivity connectivity_;
  Boundary boundary_;
  std::vector<int> strides_;
  Cell cells_ = 0;
};

struct AdjacencyResult {
  CellSet cells;
  bool touches_outside = false;
};

/// Cells not in v that are adjacent to a member of v. The flag reports
/// whether some member borders OUTSIDE (zero_padded mode only).
inline AdjacencyResult adjacency_set(const Lattice& lat, const CellSet& v) {
  if (v.empty()) throw std::invalid_argument("adjacency_set: empty cell set");
  std::vector<unsigned char> in(lat.cell_count(), 0);
  for (Cell c : v) {
    lat.check_cell(c);
    in[c] = 1;
  }
  AdjacencyResult out;
  std::vector<unsigned char> seen(lat.cell_count(), 0);
  for (Cell c : v) {
    const bool touch = lat.for_each_neighbor(c, [&](Cell w) {
      if (!in[w] && !seen[w]) {
        seen[w] = 1;
        out.cells.push_back(w);
      }
    });
    out.touches_outside = out.touches_outside || touch;
  }
  std::sort(out.cells.begin(), out.cells.end());
  return out;
}

/// True iff v is non-empty and path-connected inside v.
inline bool is_connected(const Lattice& lat, const CellSet& v) {
  if (v.empty()) return false;
  std::vector<unsigned char> in(lat.cell_count(), 0);
  Cell distinct = 0;
  for (Cell c : v) {
    lat.check_cell(c);
    if (!in[c]) {
      in[c] = 1;
      ++distinct;
    }
  }
  std::vector<Cell> stack{v.front()};
  in[v.front()] = 2;
  Cell reached = 1;
  while (!stack.empty()) {
    const Cell c = stack.back();
    stack.pop_back();
    lat.for_each_neighbor(c, [&](Cell w) {
      if (in[w] == 1) {
        in[w] = 2;
        ++reached;
        stack.push_back(w);
      }
    });
  }
  return reached == distinct;
}

namespace detail {

/// Enumerates every connected set S with root in S, |S| = size and all
/// members >= min_allowed, each exactly once. The emitted span is unsorted
/// scratch; callers must copy what they keep.
template <class F>
void connected_sets_from(const Lattice& lat, Cell root, int size, Cell min_allowed, F&& emit) {
  if (size <= 0 || root < min_allowed) return;
  std::vector<Cell> set;
  set.reserve(static_cast<std::size_t>(size));
  std::vector<unsigned char> seen(lat.cell_count(), 0);
  seen[root] = 1;
  set.push_back(root);
  if (size == 1) {
    emit(std::span<const Cell>(set));
    return;
  }
  auto rec = [&](auto&& self, std::vector<Cell>& untried) -> void {
    while (!untried.empty()) {
      const Cell u = untried.back();
      untried.pop_back();
      set.push_back(u);
      if (static_cast<int>(set.size()) == size) {
        emit(std::span<const Cell>(set));
        set.pop_back();
        continue;  // u stays seen: later sets at this level exclude it
      }
      std::vector<Cell> added;
      lat.for_each_neighbor(u, [&](Cell w) {
        if (w >= min_allowed && !seen[w]) {
          seen[w] = 1;
          added.push_back(w);
        }
      });
      std::vector<Cell> next = untried;
      next.insert(next.end(), added.begin(), added.end());
      self(self, next);
      for (Cell w : added) seen[w] = 0;
      set.pop_back();
    }
  };
  std::vector<Cell> untried;
  lat.for_each_neighbor(root, [&](Cell w) {
    if (w >= min_allowed && !seen[w]) {
      seen[w] = 1;
      untried.push_back(w);
    }
  });
  rec(rec, untried);
}

/// Window grown by `halo` cells on every side, as a domain_only lattice,
/// plus the coordinate offset of the original window inside it.
inline std::pair<Lattice, std::vector<int>> extended_window(const Lattice& lat, int halo) {
  std::vector<int> ext = lat.extents();
  for (int& e : ext) e += 2 * halo;
  std::vector<int> offset(lat.extents().size(), halo);
  return {Lattice(std::move(ext), lat.connectivity(), Boundary::domain_only), std::move(offset)};
}

}  // namespace detail

/// Enumerates every connected set of `size` cells in the window, each once,
/// in no particular order.
template <class F>
void for_each_connected_set(const Lattice& lat, int size, F&& emit) {
  for (Cell root = 0; root < lat.cell_count(); ++root)
    detail::connected_sets_from(lat, root, size, root, emit);
}

/// Connected superset of a window cell that may spill into the zero-valued
/// halo around the window (zero_padded mode). Halo members are reported as
/// window coordinates, which are out of range on at least one axis.
struct HaloCellSet {
  CellSet inside;
  std::vector<std::vector<int>> outside;
};

inline constexpr int kSupersetMaxSize = 5;
inline constexpr Cell kSupersetMaxCells = 32;

/// All connected sets of exactly `size` cells containing c. Desk-scale
/// oracle support; guarded to size <= 5 and windows <= 32 cells. In
/// zero_padded mode sets may include cells of a one-cell halo (value 0).
inline std::vector<HaloCellSet> connected_supersets(const Lattice& lat, Cell c, int size) {
  lat.check_cell(c);
  if (size < 1) throw std::invalid_argument("connected_supersets: size must be >= 1");
  if (size > kSupersetMaxSize || lat.cell_count() > kSupersetMaxCells)
    throw std::length_error("connected_supersets: resource guard (size <= 5, window <= 32 cells)");

  std::vector<HaloCellSet> out;
  if (!lat.zero_padded()) {
    detail::connected_sets_from(lat, c, size, 0, [&](std::span<const Cell> s) {
      HaloCellSet h;
      h.inside.assign(s.begin(), s.end());
      std::sort(h.inside.begin(), h.inside.end());
      out.push_back(std::move(h));
    });
  } else {
    auto [ext, offset] = detail::extended_window(lat, 1);
    std::vector<int> cc = lat.coords(c);
    for (std::size_t a = 0; a < cc.size(); ++a) cc[a] += offset[a];
    const Cell ce = ext.index(cc);
    detail::connected_sets_from(ext, ce, size, 0, [&](std::span<const Cell> s) {
      HaloCellSet h;
      for (Cell e : s) {
        std::vector<int> xyz = ext.coords(e);
        for (std::size_t a = 0; a < xyz.size(); ++a) xyz[a] -= offset[a];
        if (lat.contains(xyz))
          h.inside.push_back(lat.index(xyz));
        else
          h.outside.push_back(std::move(xyz));
      }
      std::sort(h.inside.begin(), h.inside.end());
      std::sort(h.outside.begin(), h.outside.end());
      out.push_back(std::move(h));
    });
  }
  std::sort(out.begin(), out.end(), [](const HaloCellSet& a, const HaloCellSet& b) {
    if (a.inside != b.inside) return a.inside < b.inside;
    return a.outside < b.outside;
  });
  return out;
}

}  // namespace lulu
