#pragma once

#include <string>

#include "lulu/field.hpp"

namespace lulu {

// ---------------------------------------------------------------------------
// Fast (flat-zone) smoothers.

/// One simultaneous stage: every local-min (resp. local-max) flat zone of
/// size exactly k moves to its adjacent-extreme value, targets taken from
/// the pre-stage field.
struct ZoneEdit {
  CellSet cells;
  Value from = 0;
  Value to = 0;
};

inline std::vector<ZoneEdit> plan_extremal_stage(const ScalarField& f, const ZonePartition& zp,
                                                 int k, Extremum pol) {
  std::vector<ZoneEdit> edits;
  for (const Zone& z : zp.zones) {
    if (z.size() != k) continue;
    const auto [extremal, target] = detail::zone_extremal_target(zp, z, pol, f.lattice->zero_padded());
    if (extremal) edits.push_back(ZoneEdit{z.cells, z.value, target});
  }
  return edits;
}

inline void apply_edits(ScalarField& f, const std::vector<ZoneEdit>& edits) {
  for (const ZoneEdit& e : edits)
    for (Cell c : e.cells) f.values[static_cast<std::size_t>(c)] = e.to;
}

/// U_n: removes local minimum sets of size <= n by raising them. Stages
/// k = 1..n keep each stage's candidates constant-valued, so the flat-zone
/// scan is complete for arbitrary inputs.
inline ScalarField u_n_fast(const ScalarField& f, int n) {
  if (n < 1) throw std::invalid_argument("u_n_fast: n must be >= 1");
  ScalarField g = f;
  for (int k = 1; k <= n; ++k) {
    const ZonePartition zp = flat_zones(g);
    apply_edits(g, plan_extremal_stage(g, zp, k, Extremum::minimum));
  }
  return g;
}

/// L_n: dual of U_n, lowers local maximum sets of size <= n.
inline ScalarField l_n_fast(const ScalarField& f, int n) {
  if (n < 1) throw std::invalid_argument("l_n_fast: n must be >= 1");
  ScalarField g = f;
  for (int k = 1; k <= n; ++k) {
    const ZonePartition zp = flat_zones(g);
    apply_edits(g, plan_extremal_stage(g, zp, k, Extremum::maximum));
  }
  return g;
}

/// P_n = L_n U_n.
inline ScalarField p_n(const ScalarField& f, int n) { return l_n_fast(u_n_fast(f, n), n); }

// ---------------------------------------------------------------------------
// Definition-level oracle, exponential; desk scale only.

inline constexpr Cell kOracleMaxCells = 48;
inline constexpr int kOracleMaxN = 5;

namespace detail {

inline ScalarField minmax_oracle(const ScalarField& f, int n, Extremum pol) {
  if (n < 1) throw std::invalid_argument("oracle: n must be >= 1");
  if (n > kOracleMaxN || f.cell_count() > kOracleMaxCells)
    throw std::length_error("oracle: resource guard (n <= 5, window <= 48 cells)");
  const Lattice& lat = *f.lattice;
  ScalarField out = f;
  // pol == minimum realizes U_n (min over sets of max); maximum realizes L_n.
  const bool is_u = pol == Extremum::minimum;
  auto fold = [&](const std::vector<Value>& vals, const Lattice& domain, Cell anchor, int k) {
    Value best = is_u ? std::numeric_limits<Value>::max() : std::numeric_limits<Value>::min();
    bool any = false;
    connected_sets_from(domain, anchor, k, 0, [&](std::span<const Cell> s) {
      Value m = is_u ? std::numeric_limits<Value>::min() : std::numeric_limits<Value>::max();
      for (Cell c : s) m = is_u ? std::max(m, vals[c]) : std::min(m, vals[c]);
      best = is_u ? std::min(best, m) : std::max(best, m);
      any = true;
    });
    if (!any) throw std::logic_error("oracle: no connected set of the requested size");
    return best;
  };
  if (lat.zero_padded()) {
    // Connected (n+1)-sets of Z^d containing a window cell stay within n
    // steps of it, so a halo of width n makes the enumeration exact.
    auto [ext, offset] = extended_window(lat, n);
    std::vector<Value> vals(ext.cell_count(), 0);
    for (Cell c = 0; c < lat.cell_count(); ++c) {
      std::vector<int> xyz = lat.coords(c);
      for (std::size_t a = 0; a < xyz.size(); ++a) xyz[a] += offset[a];
      vals[ext.index(xyz)] = f.at(c);
    }
    for (Cell c = 0; c < lat.cell_count(); ++c) {
      std::vector<int> xyz = lat.coords(c);
      for (std::size_t a = 0; a < xyz.size(); ++a) xyz[a] += offset[a];
      out.values[c] = fold(vals, ext, ext.index(xyz), n + 1);
    }
  } else {
    // Finite domain: set size saturates at the window size.
    const int k = static_cast<int>(std::min<long long>(n + 1, lat.cell_count()));
    for (Cell c = 0; c < lat.cell_count(); ++c) out.values[c] = fold(f.values, lat, c, k);
  }
  return out;
}

}  // namespace detail

/// U_n by its min-max definition: min over connected (n+1)-sets containing
/// x of the max over the set.
inline ScalarField u_n_oracle(const ScalarField& f, int n) {
  return detail::minmax_oracle(f, n, Extremum::minimum);
}

/// L_n by its max-min definition.
inline ScalarField l_n_oracle(const ScalarField& f, int n) {
  return detail::minmax_oracle(f, n, Extremum::maximum);
}

// ---------------------------------------------------------------------------
// Operator expressions for the verification harness.

/// Composition tree over {identity, U(m), L(m)} plus the formal difference
/// (identity - E) and a deliberately order-breaking `negation` used for
/// fault-injection tests.
class OperatorExpr {
  enum class Kind { identity, u, l, negation, compose, id_minus };

  struct Node {
    Kind kind;
    int m = 0;
    std::shared_ptr<const Node> a;  // outer for compose, operand for id_minus
    std::shared_ptr<const Node> b;  // inner for compose
  };

  std::shared_ptr<const Node> root_;

  explicit OperatorExpr(std::shared_ptr<const Node> n) : root_(std::move(n)) {}

  static std::shared_ptr<const Node> make_node(Kind k, int m = 0,
                                               std::shared_ptr<const Node> a = nullptr,
                                               std::shared_ptr<const Node> b = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->m = m;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  static ScalarField eval(const Node& n, const ScalarField& f) {
    switch (n.kind) {
      case Kind::identity:
        return f;
      case Kind::u:
        return u_n_fast(f, n.m);
      case Kind::l:
        return l_n_fast(f, n.m);
      case Kind::negation: {
        ScalarField g = f;
        for (Value& v : g.values) v = -v;
        return g;
      }
      case Kind::compose:
        return eval(*n.a, eval(*n.b, f));
      case Kind::id_minus:
        return sub(f, eval(*n.a, f));
    }
    throw std::logic_error("OperatorExpr: bad node");
  }

  static std::string print(const Node& n) {
    switch (n.kind) {
      case Kind::identity:
        return "id";
      case Kind::u:
        return "U(" + std::to_string(n.m) + ")";
      case Kind::l:
        return "L(" + std::to_string(n.m) + ")";
      case Kind::negation:
        return "neg";
      case Kind::compose:
        return print(*n.a) + "*" + print(*n.b);
      case Kind::id_minus:
        return "(id-" + print(*n.a) + ")";
    }
    return "?";
  }

public:
  OperatorExpr() : OperatorExpr(identity().root_) {}

  static OperatorExpr identity() { return OperatorExpr(make_node(Kind::identity)); }
  static OperatorExpr u(int m) {
    if (m < 1) throw std::invalid_argument("OperatorExpr: m must be >= 1");
    return OperatorExpr(make_node(Kind::u, m));
  }
  static OperatorExpr l(int m) {
    if (m < 1) throw std::invalid_argument("OperatorExpr: m must be >= 1");
    return OperatorExpr(make_node(Kind::l, m));
  }
  static OperatorExpr negation() { return OperatorExpr(make_node(Kind::negation)); }
  /// outer applied after inner.
  static OperatorExpr compose(const OperatorExpr& outer, const OperatorExpr& inner) {
    return OperatorExpr(make_node(Kind::compose, 0, outer.root_, inner.root_));
  }
  static OperatorExpr id_minus(const OperatorExpr& e) {
    return OperatorExpr(make_node(Kind::id_minus, 0, e.root_));
  }

  ScalarField operator()(const ScalarField& f) const { return eval(*root_, f); }
  std::string name() const { return print(*root_); }
};

inline ScalarField apply(const OperatorExpr& e, const ScalarField& f) { return e(f); }

// ---------------------------------------------------------------------------
// Trend preservation witnesses.

struct NtpResult {
  bool ok = true;
  Cell a = -1;              // violating pair, when ok is false
  Cell b = -1;              // -1 means OUTSIDE
  bool on_complement = false;  // the (id - E) side failed (FTP check only)

  explicit operator bool() const { return ok; }
};

/// Neighbor trend preservation of E on f: for every adjacent pair (x, y)
/// with f(x) >= f(y), Ef(x) >= Ef(y). In zero_padded mode border cells are
/// also paired with OUTSIDE (both fields are 0 there).
inline NtpResult is_ntp_on(const OperatorExpr& e, const ScalarField& f) {
  const ScalarField g = e(f);
  const Lattice& lat = *f.lattice;
  for (Cell c = 0; c < lat.cell_count(); ++c) {
    NtpResult bad;
    const bool outside = lat.for_each_neighbor(c, [&](Cell w) {
      if (w < c || !bad.ok) return;  // each unordered pair once
      if (f.at(c) >= f.at(w) && g.at(c) < g.at(w)) bad = NtpResult{false, c, w};
      if (f.at(w) >= f.at(c) && g.at(w) < g.at(c)) bad = NtpResult{false, w, c};
    });
    if (bad.ok && outside) {
      if (f.at(c) >= 0 && g.at(c) < 0) bad = NtpResult{false, c, -1};
      if (0 >= f.at(c) && 0 < g.at(c)) bad = NtpResult{false, c, -1};
    }
    if (!bad.ok) return bad;
  }
  return {};
}

/// Fully trend preserving on f: both E and (id - E) are ntp on f.
inline NtpResult is_ftp_on(const OperatorExpr& e, const ScalarField& f) {
  NtpResult r = is_ntp_on(e, f);
  if (!r.ok) return r;
  r = is_ntp_on(OperatorExpr::id_minus(e), f);
  r.on_complement = !r.ok;
  return r;
}

}  // namespace lulu
