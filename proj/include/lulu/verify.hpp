#pragma once

#include <cctype>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "lulu/dpt.hpp"

namespace lulu {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Trial reports.

struct AssertionResult {
  std::string id;
  bool pass = true;
  std::string witness;  // empty on pass
};

struct TrialReport {
  std::uint64_t seed = 0;
  std::string lattice;
  std::vector<Value> input;
  int n = 0;
  std::string op;  // identity-check trials only
  std::vector<AssertionResult> checks;

  enum class Verdict { pass, fail, inapplicable };
  Verdict verdict = Verdict::pass;
  std::string inapplicable_reason;

  int failures() const {
    int k = 0;
    for (const auto& c : checks)
      if (!c.pass) ++k;
    return k;
  }

  void add(std::string id, bool pass, std::string witness = {}) {
    if (!pass && verdict == Verdict::pass) verdict = Verdict::fail;
    checks.push_back(AssertionResult{std::move(id), pass, pass ? std::string{} : std::move(witness)});
  }

  json to_json() const {
    json j;
    j["seed"] = seed;
    j["lattice"] = lattice;
    j["input"] = input;
    j["n"] = n;
    if (!op.empty()) j["op"] = op;
    j["verdict"] = verdict == Verdict::pass ? "pass" : verdict == Verdict::fail ? "fail" : "inapplicable";
    if (!inapplicable_reason.empty()) j["inapplicable_reason"] = inapplicable_reason;
    json cs = json::array();
    for (const auto& c : checks) {
      json cj;
      cj["id"] = c.id;
      cj["pass"] = c.pass;
      if (!c.witness.empty()) cj["witness"] = c.witness;
      cs.push_back(std::move(cj));
    }
    j["checks"] = std::move(cs);
    return j;
  }
};

namespace detail {

inline std::string values_string(const std::vector<Value>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s + "]";
}

inline std::string cells_string(const CellSet& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s + "}";
}

inline bool sets_intersect(const CellSet& a, const CellSet& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib)
      ++ia;
    else if (*ib < *ia)
      ++ib;
    else
      return true;
  }
  return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Preconditioning.

/// Applies P_{n-1} ... P_1, the standard way to remove all extremal sets of
/// size < n before testing scale n.
inline ScalarField precondition(ScalarField f, int n) {
  for (int k = 1; k < n; ++k) f = p_n(f, k);
  return f;
}

/// Brute-force check of the hypothesis "no local minimum or maximum sets of
/// size smaller than n". Desk scale only.
inline bool satisfies_precondition(const ScalarField& f, int n) {
  return !has_extremal_set_smaller_than(f, n);
}

/// Draws a random integer field, preconditions it and verifies the
/// hypothesis by brute force. A verification failure is a framework alarm,
/// not an input defect; it is counted and the draw retried.
inline ScalarField generate_preconditioned(std::shared_ptr<const Lattice> lat, int n,
                                           std::mt19937_64& rng, Value lo, Value hi,
                                           long long* alarms = nullptr) {
  if (n < 1) throw std::invalid_argument("generate_preconditioned: n must be >= 1");
  std::uniform_int_distribution<Value> dist(lo, hi);
  for (int attempt = 0; attempt < 20; ++attempt) {
    std::vector<Value> vals(static_cast<std::size_t>(lat->cell_count()));
    for (Value& v : vals) v = dist(rng);
    ScalarField f = precondition(ScalarField(lat, std::move(vals)), n);
    if (satisfies_precondition(f, n)) return f;
    if (alarms) ++*alarms;
  }
  throw std::runtime_error("generate_preconditioned: exhausted retries");
}

// ---------------------------------------------------------------------------
// Lemma part a: pulse-layer structure of (id - P_n) f.

enum class FaultInjection { none, pulse_sum };

inline TrialReport check_lemma_a(const ScalarField& f, int n,
                                 FaultInjection fault = FaultInjection::none) {
  TrialReport rep;
  rep.lattice = f.lattice->describe();
  rep.input = f.values;
  rep.n = n;

  const bool zpad = f.lattice->zero_padded();
  const ZonePartition zp0 = flat_zones(f);
  {
    bool ok = true;
    std::string w;
    for (const Zone& z : zp0.zones) {
      if (z.size() >= n) continue;
      if (detail::zone_extremal_target(zp0, z, Extremum::minimum, zpad).first ||
          detail::zone_extremal_target(zp0, z, Extremum::maximum, zpad).first) {
        ok = false;
        w = "extremal zone of size " + std::to_string(z.size()) + " at " + detail::cells_string(z.cells);
        break;
      }
    }
    rep.add("lemma_a.precondition", ok, w);
  }

  const ScalarField uf = u_n_fast(f, n);
  const ScalarField pf = l_n_fast(uf, n);
  const ScalarField residue = sub(f, pf);

  const std::vector<Zone> min_zones = extremal_zones(f, n, Extremum::minimum);
  const std::vector<Zone> max_zones_u = extremal_zones(uf, n, Extremum::maximum);

  // Pulses = nonzero flat zones of the residue. The test-only fault
  // perturbs the extraction source, never the ground truth it is checked
  // against, so an injected fault must surface as assertion failures.
  ScalarField extraction_src = residue;
  if (fault == FaultInjection::pulse_sum && !extraction_src.values.empty())
    extraction_src.values[0] += 1;
  std::vector<Pulse> pulses;
  for (const Zone& z : flat_zones(extraction_src).zones)
    if (z.value != 0) pulses.push_back(Pulse{z.cells, z.value});

  {
    bool ok = true;
    std::string w;
    for (const Pulse& p : pulses) {
      if (p.scale() != n) {
        ok = false;
        w = "pulse " + detail::cells_string(p.support) + " has scale " + std::to_string(p.scale());
        break;
      }
      if (!is_connected(*f.lattice, p.support)) {
        ok = false;
        w = "pulse support disconnected";
        break;
      }
    }
    rep.add("lemma_a.pulse_scale", ok, w);
  }

  {
    // Negative pulse supports are exactly the size-n min zones of f;
    // positive ones the size-n max zones of U_n f.
    std::vector<CellSet> neg, pos;
    for (const Pulse& p : pulses) (p.value < 0 ? neg : pos).push_back(p.support);
    std::vector<CellSet> expect_neg, expect_pos;
    for (const Zone& z : min_zones) expect_neg.push_back(z.cells);
    for (const Zone& z : max_zones_u) expect_pos.push_back(z.cells);
    std::sort(neg.begin(), neg.end());
    std::sort(pos.begin(), pos.end());
    std::sort(expect_neg.begin(), expect_neg.end());
    std::sort(expect_pos.begin(), expect_pos.end());
    rep.add("lemma_a.down_supports_are_min_zones", neg == expect_neg,
            "down supports != min zones of f");
    rep.add("lemma_a.up_supports_are_max_zones_of_unf", pos == expect_pos,
            "up supports != max zones of U_n f");
  }

  {
    // Every up support is also a local max set of f itself (raising pits
    // can absorb further max sets of f into larger plateaus, so this is a
    // containment, not an equality).
    bool ok = true;
    std::string w;
    for (const Zone& z : max_zones_u)
      if (!is_local_max_set(f, z.cells)) {
        ok = false;
        w = "up support " + detail::cells_string(z.cells) + " is not a max set of f";
      }
    rep.add("lemma_a.up_supports_are_max_sets_of_f", ok, w);
  }

  {
    ScalarField total(f.lattice, std::vector<Value>(static_cast<std::size_t>(f.cell_count()), 0));
    for (const Pulse& p : pulses)
      for (Cell c : p.support) total.values[static_cast<std::size_t>(c)] += p.value;
    rep.add("lemma_a.eq1_sum", total == residue, "pulse sum != (id-P_n) f");
  }

  auto pairwise_separated = [&](const std::vector<Zone>& zs, const char* id) {
    bool ok = true;
    std::string w;
    for (std::size_t i = 0; i < zs.size() && ok; ++i)
      for (std::size_t j = i + 1; j < zs.size() && ok; ++j) {
        if (detail::sets_intersect(zs[i].cells, zs[j].cells)) {
          ok = false;
          w = "supports intersect";
        } else if (detail::sets_intersect(adjacency_set(*f.lattice, zs[i].cells).cells, zs[j].cells)) {
          ok = false;
          w = "supports adjacent: " + detail::cells_string(zs[i].cells) + " ~ " +
              detail::cells_string(zs[j].cells);
        }
      }
    rep.add(id, ok, w);
  };
  pairwise_separated(min_zones, "lemma_a.eq2_min_disjoint_nonadjacent");
  pairwise_separated(max_zones_u, "lemma_a.eq3_max_disjoint_nonadjacent");

  {
    bool ok = true;
    std::string w;
    for (const Zone& v : min_zones)
      for (const Zone& u : max_zones_u)
        if (detail::sets_intersect(v.cells, u.cells)) {
          ok = false;
          w = "min and max supports intersect";
        }
    rep.add("lemma_a.eq4_cross_disjoint", ok, w);
  }

  {
    // (V u {y}) does not meet any up support; the witness sits one step
    // outside V at the adjacent minimum.
    bool ok = true;
    std::string w;
    for (const Zone& v : min_zones) {
      const AdjacentWitness y = min_adjacent_witness(f, v.cells);
      if (y.is_outside) continue;  // OUTSIDE is never inside a support
      for (const Zone& u : max_zones_u)
        if (std::binary_search(u.cells.begin(), u.cells.end(), y.cell)) {
          ok = false;
          w = "witness cell " + std::to_string(y.cell) + " lies in an up support";
        }
    }
    rep.add("lemma_a.eq5_witness_outside_up_supports", ok, w);
  }

  {
    // Witness optimality: the recorded value really is min over adj(V).
    bool ok = true;
    std::string w;
    for (const Zone& v : min_zones) {
      const AdjacentWitness y = min_adjacent_witness(f, v.cells);
      const AdjacencyResult adj = adjacency_set(*f.lattice, v.cells);
      Value m = adj.touches_outside ? 0 : std::numeric_limits<Value>::max();
      for (Cell c : adj.cells) m = std::min(m, f.at(c));
      if (y.value != m || (!y.is_outside && f.at(y.cell) != m)) {
        ok = false;
        w = "witness value mismatch on " + detail::cells_string(v.cells);
      }
    }
    rep.add("lemma_a.witness_optimality", ok, w);
  }

  {
    // Piecewise forms: U_n f equals f away from the min zones and the
    // adjacent minimum on them; L_n U_n f dually on the max zones.
    ScalarField expect_u = f;
    for (const Zone& v : min_zones) {
      const Value t = min_adjacent_witness(f, v.cells).value;
      for (Cell c : v.cells) expect_u.values[static_cast<std::size_t>(c)] = t;
    }
    rep.add("lemma_a.piecewise_u", uf == expect_u, "U_n f differs from its piecewise form");

    ScalarField expect_l = uf;
    for (const Zone& z : max_zones_u) {
      const Value t = max_adjacent_witness(uf, z.cells).value;
      for (Cell c : z.cells) expect_l.values[static_cast<std::size_t>(c)] = t;
    }
    rep.add("lemma_a.piecewise_l", pf == expect_l, "L_n U_n f differs from its piecewise form");
  }

  {
    ScalarField down_sum(f.lattice, std::vector<Value>(static_cast<std::size_t>(f.cell_count()), 0));
    for (const Pulse& p : pulses)
      if (p.value < 0)
        for (Cell c : p.support) down_sum.values[static_cast<std::size_t>(c)] += p.value;
    rep.add("lemma_a.id_minus_un", sub(f, uf) == down_sum,
            "(id-U_n) f != sum of down pulses");

    ScalarField up_sum(f.lattice, std::vector<Value>(static_cast<std::size_t>(f.cell_count()), 0));
    for (const Pulse& p : pulses)
      if (p.value > 0)
        for (Cell c : p.support) up_sum.values[static_cast<std::size_t>(c)] += p.value;
    rep.add("lemma_a.id_minus_ln_un", sub(uf, pf) == up_sum, "(id-L_n) U_n f != sum of up pulses");
  }

  return rep;
}

// ---------------------------------------------------------------------------
// Lemma part b: quasi-linearity for fully trend preserving A.

inline TrialReport check_lemma_b(const ScalarField& f, int n, const OperatorExpr& a) {
  TrialReport rep;
  rep.lattice = f.lattice->describe();
  rep.input = f.values;
  rep.n = n;
  rep.op = a.name();

  const ScalarField uf = u_n_fast(f, n);
  const ScalarField lf = l_n_fast(f, n);

  // The identities only claim anything for fully trend preserving A, and A
  // is evaluated on U_n f and on L_n f. Gate on the empirical witness; a
  // failed gate makes the trial inapplicable, not failed.
  for (const auto& [g, side] : {std::pair<const ScalarField&, const char*>{uf, "U_n f"},
                                std::pair<const ScalarField&, const char*>{lf, "L_n f"}}) {
    const NtpResult ftp = is_ftp_on(a, g);
    if (!ftp.ok) {
      rep.verdict = TrialReport::Verdict::inapplicable;
      rep.inapplicable_reason = std::string("FTP witness failed for ") + a.name() + " on " + side +
                                " at pair (" + std::to_string(ftp.a) + "," +
                                (ftp.b < 0 ? "OUTSIDE" : std::to_string(ftp.b)) + ")" +
                                (ftp.on_complement ? " [id-A side]" : "");
      return rep;
    }
  }

  const ScalarField auf = a(uf);
  const ScalarField g = sub(f, auf);  // (id - A U_n) f

  rep.add("lemma_b.identity_u", u_n_fast(g, n) == sub(uf, auf),
          "U_n (id - A U_n) f != (U_n - A U_n) f");

  rep.add("lemma_b.split", g == add(sub(f, uf), sub(uf, auf)),
          "(id - A U_n) f != (id - U_n) f + ((id - A) U_n) f");

  {
    // ((id - A) U_n) f is constant on each V u {y}; its adjacent values
    // never drop below that constant.
    const ScalarField h = sub(uf, auf);
    bool const_ok = true;
    bool floor_ok = true;
    std::string wc, wf;
    for (const Zone& v : extremal_zones(f, n, Extremum::minimum)) {
      const AdjacentWitness y = min_adjacent_witness(f, v.cells);
      const Value w = y.is_outside ? 0 : h.at(y.cell);
      for (Cell c : v.cells)
        if (h.at(c) != w) {
          const_ok = false;
          wc = "h not constant on V u {y} for V=" + detail::cells_string(v.cells);
        }
      const AdjacencyResult adj = adjacency_set(*f.lattice, v.cells);
      Value floor = adj.touches_outside ? 0 : std::numeric_limits<Value>::max();
      for (Cell c : adj.cells) floor = std::min(floor, h.at(c));
      if (floor != w) {
        floor_ok = false;
        wf = "min over adj(V) of h != w for V=" + detail::cells_string(v.cells);
      }
      if (!is_local_min_set(g, v.cells)) {
        floor_ok = false;
        wf = "V is not a local min set of g for V=" + detail::cells_string(v.cells);
      }
    }
    rep.add("lemma_b.constancy_on_v_and_witness", const_ok, wc);
    rep.add("lemma_b.adjacent_floor", floor_ok, wf);
  }

  rep.add("lemma_b.id_minus_un_of_g", sub(g, u_n_fast(g, n)) == sub(f, uf),
          "(id - U_n) g != (id - U_n) f");

  const ScalarField alf = a(lf);
  const ScalarField gl = sub(f, alf);
  rep.add("lemma_b.identity_l", l_n_fast(gl, n) == sub(lf, alf),
          "L_n (id - A L_n) f != (L_n - A L_n) f");

  return rep;
}

// ---------------------------------------------------------------------------
// Operator library.

/// identity, U/L and their alternating compositions up to depth 3, m <= max_m.
inline std::vector<OperatorExpr> standard_operator_library(int max_m = 3) {
  std::vector<OperatorExpr> lib;
  lib.push_back(OperatorExpr::identity());
  for (int m = 1; m <= max_m; ++m) {
    const OperatorExpr u = OperatorExpr::u(m);
    const OperatorExpr l = OperatorExpr::l(m);
    lib.push_back(u);
    lib.push_back(l);
    lib.push_back(OperatorExpr::compose(l, u));
    lib.push_back(OperatorExpr::compose(u, l));
    lib.push_back(OperatorExpr::compose(l, OperatorExpr::compose(u, l)));
    lib.push_back(OperatorExpr::compose(u, OperatorExpr::compose(l, u)));
  }
  return lib;
}

// ---------------------------------------------------------------------------
// Suite driver.

struct SuiteConfig {
  std::uint64_t seed = 424243;
  int trials_a = 120;  // per (shape, mode, connectivity, n)
  int trials_b = 25;
  int n_max = 3;
  Value value_min = -5;
  Value value_max = 9;
  std::vector<std::vector<int>> shapes = {{8}, {3, 4}};
  std::vector<Boundary> modes = {Boundary::zero_padded, Boundary::domain_only};
  std::vector<Connectivity> connectivities = {Connectivity::facet, Connectivity::full};
  bool micro_universe = true;
  int max_m = 3;
  bool include_negation = false;  // adds the broken operator; its trials gate out
  FaultInjection fault = FaultInjection::none;

  /// Plain-text `key = value` configuration, '#' comments.
  static SuiteConfig from_stream(std::istream& in) {
    SuiteConfig cfg;
    std::string line;
    int lineno = 0;
    bool shapes_set = false;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        bool blank = true;
        for (char c : line)
          if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (blank) continue;
        throw std::runtime_error("suite config line " + std::to_string(lineno) + ": expected key = value");
      }
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      auto as_ll = [&] { return std::stoll(val); };
      auto as_bool = [&] { return val == "true" || val == "1" || val == "on"; };
      if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(as_ll());
      else if (key == "trials_a")
        cfg.trials_a = static_cast<int>(as_ll());
      else if (key == "trials_b")
        cfg.trials_b = static_cast<int>(as_ll());
      else if (key == "n_max")
        cfg.n_max = static_cast<int>(as_ll());
      else if (key == "value_min")
        cfg.value_min = as_ll();
      else if (key == "value_max")
        cfg.value_max = as_ll();
      else if (key == "micro_universe")
        cfg.micro_universe = as_bool();
      else if (key == "include_negation")
        cfg.include_negation = as_bool();
      else if (key == "max_m")
        cfg.max_m = static_cast<int>(as_ll());
      else if (key == "fault")
        cfg.fault = val == "pulse_sum" ? FaultInjection::pulse_sum : FaultInjection::none;
      else if (key == "modes") {
        cfg.modes.clear();
        std::stringstream ss(val);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          tok = trim(tok);
          if (tok == "zero" || tok == "zero_padded")
            cfg.modes.push_back(Boundary::zero_padded);
          else if (tok == "domain" || tok == "domain_only")
            cfg.modes.push_back(Boundary::domain_only);
          else
            throw std::runtime_error("suite config: unknown mode '" + tok + "'");
        }
      } else if (key == "connectivities") {
        cfg.connectivities.clear();
        std::stringstream ss(val);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          tok = trim(tok);
          if (tok == "facet" || tok == "4")
            cfg.connectivities.push_back(Connectivity::facet);
          else if (tok == "full" || tok == "8")
            cfg.connectivities.push_back(Connectivity::full);
          else
            throw std::runtime_error("suite config: unknown connectivity '" + tok + "'");
        }
      } else if (key == "shapes") {
        cfg.shapes.clear();
        shapes_set = true;
        std::stringstream ss(val);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          tok = trim(tok);
          if (tok.empty()) continue;
          std::vector<int> shape;
          std::stringstream ts(tok);
          std::string dim;
          while (std::getline(ts, dim, 'x')) shape.push_back(std::stoi(dim));
          cfg.shapes.push_back(std::move(shape));
        }
      } else {
        throw std::runtime_error("suite config: unknown key '" + key + "'");
      }
    }
    (void)shapes_set;
    return cfg;
  }

  json to_json() const {
    json j;
    j["seed"] = seed;
    j["trials_a"] = trials_a;
    j["trials_b"] = trials_b;
    j["n_max"] = n_max;
    j["value_min"] = value_min;
    j["value_max"] = value_max;
    j["micro_universe"] = micro_universe;
    j["include_negation"] = include_negation;
    j["max_m"] = max_m;
    j["fault"] = fault == FaultInjection::none ? "none" : "pulse_sum";
    json sh = json::array();
    for (const auto& s : shapes) sh.push_back(s);
    j["shapes"] = std::move(sh);
    json mo = json::array();
    for (Boundary b : modes) mo.push_back(to_string(b));
    j["modes"] = std::move(mo);
    json co = json::array();
    for (Connectivity c : connectivities) co.push_back(to_string(c));
    j["connectivities"] = std::move(co);
    return j;
  }
};

struct SuiteReport {
  json config;
  long long trials = 0;
  long long assertions = 0;
  long long failures = 0;
  long long inapplicable = 0;
  long long precondition_alarms = 0;
  std::map<std::string, long long> assertion_runs;
  std::map<std::string, long long> assertion_failures;
  std::vector<json> failed_trials;          // capped
  std::vector<json> inapplicable_trials;    // capped

  bool all_passed() const { return failures == 0; }

  void absorb(const TrialReport& t) {
    ++trials;
    if (t.verdict == TrialReport::Verdict::inapplicable) {
      ++inapplicable;
      if (inapplicable_trials.size() < 50) inapplicable_trials.push_back(t.to_json());
      return;
    }
    for (const auto& c : t.checks) {
      ++assertions;
      ++assertion_runs[c.id];
      if (!c.pass) {
        ++failures;
        ++assertion_failures[c.id];
      }
    }
    if (t.verdict == TrialReport::Verdict::fail && failed_trials.size() < 50)
      failed_trials.push_back(t.to_json());
  }

  json to_json() const {
    json j;
    j["config"] = config;
    j["totals"] = {{"trials", trials},
                   {"assertions", assertions},
                   {"failures", failures},
                   {"inapplicable", inapplicable},
                   {"precondition_alarms", precondition_alarms}};
    j["assertion_runs"] = assertion_runs;
    j["assertion_failures"] = assertion_failures;
    j["failed_trials"] = failed_trials;
    j["inapplicable_trials"] = inapplicable_trials;
    j["verdict"] = all_passed() ? "pass" : "fail";
    return j;
  }
};

/// Deterministic-by-seed execution of the lemma checks over the configured
/// lattice family, plus the exhaustive 1D micro universe.
inline SuiteReport run_suite(const SuiteConfig& cfg) {
  SuiteReport rep;
  rep.config = cfg.to_json();
  std::mt19937_64 master(cfg.seed);

  std::vector<OperatorExpr> lib = standard_operator_library(cfg.max_m);
  if (cfg.include_negation) lib.push_back(OperatorExpr::negation());

  auto lattice_combos = [&] {
    std::vector<std::shared_ptr<const Lattice>> lats;
    for (const auto& shape : cfg.shapes)
      for (Boundary mode : cfg.modes)
        for (Connectivity conn : cfg.connectivities) {
          if (conn == Connectivity::full && shape.size() != 2) continue;
          lats.push_back(std::make_shared<Lattice>(shape, conn, mode));
        }
    return lats;
  };

  if (cfg.micro_universe) {
    // All 1D fields of length <= 5 over {0,1,2}, both boundary modes,
    // preconditioned per n. Full enumeration, not sampling.
    for (Boundary mode : {Boundary::zero_padded, Boundary::domain_only}) {
      for (int len = 1; len <= 5; ++len) {
        auto lat = std::make_shared<Lattice>(std::vector<int>{len}, Connectivity::facet, mode);
        long long count = 1;
        for (int i = 0; i < len; ++i) count *= 3;
        for (long long code = 0; code < count; ++code) {
          std::vector<Value> vals(static_cast<std::size_t>(len));
          long long c = code;
          for (int i = 0; i < len; ++i) {
            vals[static_cast<std::size_t>(i)] = c % 3;
            c /= 3;
          }
          const ScalarField raw(lat, vals);
          for (int n = 1; n <= std::min(3, cfg.n_max); ++n) {
            ScalarField f = precondition(raw, n);
            if (!satisfies_precondition(f, n)) {
              ++rep.precondition_alarms;
              continue;
            }
            TrialReport t = check_lemma_a(f, n, cfg.fault);
            t.seed = static_cast<std::uint64_t>(code);
            rep.absorb(t);
          }
        }
      }
    }
  }

  for (const auto& lat : lattice_combos()) {
    for (int n = 1; n <= cfg.n_max; ++n) {
      for (int trial = 0; trial < cfg.trials_a; ++trial) {
        const std::uint64_t tseed = master();
        std::mt19937_64 rng(tseed);
        ScalarField f =
            generate_preconditioned(lat, n, rng, cfg.value_min, cfg.value_max, &rep.precondition_alarms);
        TrialReport t = check_lemma_a(f, n, cfg.fault);
        t.seed = tseed;
        rep.absorb(t);
      }
      for (int trial = 0; trial < cfg.trials_b; ++trial) {
        const std::uint64_t tseed = master();
        std::mt19937_64 rng(tseed);
        ScalarField f =
            generate_preconditioned(lat, n, rng, cfg.value_min, cfg.value_max, &rep.precondition_alarms);
        for (const OperatorExpr& a : lib) {
          TrialReport t = check_lemma_b(f, n, a);
          t.seed = tseed;
          rep.absorb(t);
        }
      }
    }
  }
  return rep;
}

}  // namespace lulu
