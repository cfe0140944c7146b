// Acceptance suite: one line per criterion, nonzero exit on any failure.
// All comparisons are exact integer equality; runtime budgets are wall
// clock on the build machine.

#include <sys/resource.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "lulu/synth.hpp"
#include "lulu/verify.hpp"

using namespace lulu;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
  std::string name;
  long long checks = 0;
  long long failures = 0;
  std::string first_failure;

  explicit Criterion(std::string n) : name(std::move(n)) {}

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      if (failures == 0) first_failure = what;
      ++failures;
    }
  }

  bool report(double seconds = -1.0) const {
    std::ostringstream line;
    line << (failures == 0 ? "[PASS] " : "[FAIL] ") << name << ": " << checks << " checks";
    if (failures > 0) line << ", " << failures << " failures; first: " << first_failure;
    if (seconds >= 0) line << " (" << seconds << " s)";
    std::cout << line.str() << "\n";
    return failures == 0;
  }
};

std::string fingerprint(const DptResult& r) {
  std::ostringstream out;
  out << r.source_digest << '|' << r.residual << '|';
  for (const Layer& l : r.layers) {
    out << 'n' << l.n << ':';
    for (const auto* list : {&l.down, &l.up}) {
      for (const Pulse& p : *list) {
        out << p.value << '@';
        for (Cell c : p.support) out << c << ',';
        out << ';';
      }
      out << '/';
    }
  }
  return out.str();
}

std::vector<ScalarField> micro_universe(int max_len) {
  std::vector<ScalarField> fields;
  for (Boundary mode : {Boundary::zero_padded, Boundary::domain_only}) {
    for (int len = 1; len <= max_len; ++len) {
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
        fields.emplace_back(lat, std::move(vals));
      }
    }
  }
  return fields;
}

std::vector<ScalarField> criterion1_corpus() {
  std::vector<ScalarField> corpus = micro_universe(5);
  std::mt19937_64 rng(20240601);
  const Boundary modes[2] = {Boundary::zero_padded, Boundary::domain_only};
  for (int i = 0; i < 500; ++i) {  // 1D, length <= 16, values 0..9
    std::uniform_int_distribution<int> len(1, 16);
    auto lat = std::make_shared<Lattice>(std::vector<int>{len(rng)}, Connectivity::facet,
                                         modes[i % 2]);
    corpus.push_back(uniform_random_field(lat, rng, 0, 9));
  }
  for (int i = 0; i < 500; ++i) {  // 2D, <= 6x6, values 0..7, both connectivities
    std::uniform_int_distribution<int> side(1, 6);
    const Connectivity conn = (i / 2) % 2 == 0 ? Connectivity::facet : Connectivity::full;
    auto lat = std::make_shared<Lattice>(std::vector<int>{side(rng), side(rng)}, conn,
                                         modes[i % 2]);
    corpus.push_back(uniform_random_field(lat, rng, 0, 7));
  }
  return corpus;
}

// Criteria 1 and 7 share the corpus: reconstruction via the naive reference
// engine, equivalence against the zone-graph engine.
bool run_criteria_1_and_7() {
  const auto t0 = Clock::now();
  Criterion c1{"criterion 1 (perfect reconstruction, exhaustive + 1000 random fields)"};
  Criterion c7{"criterion 7 (zone-graph engine identical to naive reference)"};
  for (const ScalarField& f : criterion1_corpus()) {
    DecomposeOptions naive;
    naive.engine = DecomposeOptions::Engine::naive;
    const DptResult rn = decompose(f, naive);
    const ScalarField back = reconstruct(rn);
    c1.expect(back == f, "reconstruction mismatch on " + f.lattice->describe());
    if (f.lattice->zero_padded())
      c1.expect(rn.residual == 0, "nonzero residual in zero_padded mode");
    const DptResult rg = decompose(f);
    c7.expect(fingerprint(rn) == fingerprint(rg),
              "engine mismatch on " + f.lattice->describe());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c1.expect(secs < 60.0, "runtime budget exceeded: " + std::to_string(secs) + " s");
  const bool ok1 = c1.report(secs);
  const bool ok7 = c7.report();
  return ok1 && ok7;
}

std::shared_ptr<const Lattice> trial_lattice(int index, int variant) {
  const Boundary mode = index % 2 == 0 ? Boundary::zero_padded : Boundary::domain_only;
  switch (variant % 3) {
    case 0:
      return std::make_shared<Lattice>(std::vector<int>{10}, Connectivity::facet, mode);
    case 1:
      return std::make_shared<Lattice>(std::vector<int>{3, 4}, Connectivity::facet, mode);
    default:
      return std::make_shared<Lattice>(std::vector<int>{3, 4}, Connectivity::full, mode);
  }
}

bool run_criterion_2() {
  const auto t0 = Clock::now();
  Criterion c{"criterion 2 (lemma part a on 500 preconditioned fields per n in {1,2,3})"};
  std::mt19937_64 rng(77001);
  long long alarms = 0;
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 500; ++trial) {
      const ScalarField f = generate_preconditioned(trial_lattice(trial, trial / 2), n, rng, -5,
                                                    9, &alarms);
      const TrialReport t = check_lemma_a(f, n);
      c.expect(t.verdict == TrialReport::Verdict::pass,
               "n=" + std::to_string(n) + " " + t.to_json().dump());
    }
  }
  c.expect(alarms == 0, "preconditioning alarms: " + std::to_string(alarms));
  return c.report(std::chrono::duration<double>(Clock::now() - t0).count());
}

bool run_criterion_3() {
  const auto t0 = Clock::now();
  Criterion c{"criterion 3 (lemma part b identities across the FTP library)"};
  const std::vector<OperatorExpr> lib = standard_operator_library(3);
  std::mt19937_64 rng(77002);
  long long inapplicable = 0;
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 500; ++trial) {
      const ScalarField f =
          generate_preconditioned(trial_lattice(trial, trial / 2), n, rng, -5, 9, nullptr);
      for (const OperatorExpr& a : lib) {
        const TrialReport t = check_lemma_b(f, n, a);
        if (t.verdict == TrialReport::Verdict::inapplicable) {
          ++inapplicable;
          continue;
        }
        c.expect(t.verdict == TrialReport::Verdict::pass,
                 a.name() + " n=" + std::to_string(n) + " " + t.to_json().dump());
      }
    }
  }
  c.expect(inapplicable == 0,
           "inapplicable trials for the shipped library: " + std::to_string(inapplicable));
  return c.report(std::chrono::duration<double>(Clock::now() - t0).count());
}

bool run_criterion_4() {
  const auto t0 = Clock::now();
  Criterion c{"criterion 4 (fast operators match the min-max oracle)"};
  for (const ScalarField& f : micro_universe(6)) {
    for (int n = 1; n <= 3; ++n) {
      c.expect(u_n_fast(f, n) == u_n_oracle(f, n), "U mismatch on " + f.lattice->describe());
      c.expect(l_n_fast(f, n) == l_n_oracle(f, n), "L mismatch on " + f.lattice->describe());
    }
  }
  std::mt19937_64 rng(77004);
  for (Boundary mode : {Boundary::zero_padded, Boundary::domain_only}) {
    auto lat = std::make_shared<Lattice>(std::vector<int>{3, 4}, Connectivity::facet, mode);
    for (int trial = 0; trial < 300; ++trial) {
      const ScalarField f = uniform_random_field(lat, rng, 0, 4);
      for (int n = 1; n <= 3; ++n) {
        c.expect(u_n_fast(f, n) == u_n_oracle(f, n), "2D U mismatch " + f.lattice->describe());
        c.expect(l_n_fast(f, n) == l_n_oracle(f, n), "2D L mismatch " + f.lattice->describe());
      }
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c.expect(secs < 300.0, "runtime budget exceeded: " + std::to_string(secs) + " s");
  return c.report(secs);
}

bool run_criterion_5() {
  const auto t0 = Clock::now();
  Criterion c{"criterion 5 (operator laws on 300 random fields per law)"};
  std::mt19937_64 rng(77005);
  const Boundary modes[2] = {Boundary::zero_padded, Boundary::domain_only};
  for (int trial = 0; trial < 300; ++trial) {
    auto lat = std::make_shared<Lattice>(
        trial % 2 == 0 ? std::vector<int>{12} : std::vector<int>{4, 4}, Connectivity::facet,
        modes[(trial / 2) % 2]);
    const ScalarField f = uniform_random_field(lat, rng, -5, 5);
    const int n = 1 + trial % 3;
    const ScalarField uf = u_n_fast(f, n);
    const ScalarField lf = l_n_fast(f, n);
    c.expect(u_n_fast(uf, n) == uf, "U idempotence");
    c.expect(l_n_fast(lf, n) == lf, "L idempotence");
    c.expect(pointwise_leq(lf, f) && pointwise_leq(f, uf), "ordering L f <= f <= U f");
    ScalarField g = f;
    std::uniform_int_distribution<Value> bump(0, 3);
    for (Value& v : g.values) v += bump(rng);
    c.expect(pointwise_leq(uf, u_n_fast(g, n)), "U monotonicity");
    c.expect(pointwise_leq(lf, l_n_fast(g, n)), "L monotonicity");
    const ScalarField pf = p_n(f, n);
    bool clean = true;
    for (int k = 1; k <= n; ++k) {
      for (const CellSet& v : brute_force_extremal_sets(pf, k, Extremum::minimum)) {
        (void)v;
        clean = false;
      }
      for (const CellSet& v : brute_force_extremal_sets(pf, k, Extremum::maximum)) {
        (void)v;
        clean = false;
      }
    }
    c.expect(clean, "P_n output has an extremal set of size <= n");
  }
  return c.report(std::chrono::duration<double>(Clock::now() - t0).count());
}

bool run_criterion_6() {
  const auto t0 = Clock::now();
  Criterion c{"criterion 6 (byte-identical decompositions across runs and shuffles)"};
  std::mt19937_64 rng(77006);
  const Boundary modes[2] = {Boundary::zero_padded, Boundary::domain_only};
  for (int trial = 0; trial < 50; ++trial) {
    auto lat = std::make_shared<Lattice>(std::vector<int>{5, 5}, Connectivity::facet,
                                         modes[trial % 2]);
    const ScalarField f = uniform_random_field(lat, rng, -6, 6);
    const std::string base = fingerprint(decompose(f));
    for (int rep = 0; rep < 4; ++rep)
      c.expect(fingerprint(decompose(f)) == base, "repeat run diverged");
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
      DecomposeOptions opt;
      opt.shuffle = true;
      opt.shuffle_seed = seed;
      c.expect(fingerprint(decompose(f, opt)) == base, "shuffled zone order diverged");
      opt.engine = DecomposeOptions::Engine::naive;
      c.expect(fingerprint(decompose(f, opt)) == base, "shuffled naive order diverged");
    }
  }
  return c.report(std::chrono::duration<double>(Clock::now() - t0).count());
}

long long peak_rss_kb() {
  rusage ru{};
  if (getrusage(RUSAGE_SELF, &ru) == 0 && ru.ru_maxrss > 0) return ru.ru_maxrss;
  std::ifstream in("/proc/self/status");  // fallback
  std::string key;
  while (in >> key) {
    if (key == "VmHWM:") {
      long long kb = 0;
      in >> kb;
      return kb;
    }
    std::string rest;
    std::getline(in, rest);
  }
  return -1;
}

bool run_criterion_8() {
  Criterion c{"criterion 8 (256x256 smoothed image: < 5 s, < 512 MB, exact)"};
  const ScalarField f = smoothed_random_field(256, 256, 20240602);
  const auto t0 = Clock::now();
  const DptResult r = decompose(f);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c.expect(secs < 5.0, "decompose took " + std::to_string(secs) + " s");
  c.expect(reconstruct(r) == f, "reconstruction mismatch");
  const long long rss = peak_rss_kb();
  c.expect(rss >= 0 && rss < 512 * 1024, "peak rss " + std::to_string(rss) + " kB");
  return c.report(secs);
}

}  // namespace

int main() {
  int failures = 0;
  if (!run_criteria_1_and_7()) ++failures;
  if (!run_criterion_2()) ++failures;
  if (!run_criterion_3()) ++failures;
  if (!run_criterion_4()) ++failures;
  if (!run_criterion_5()) ++failures;
  if (!run_criterion_6()) ++failures;
  if (!run_criterion_8()) ++failures;
  if (failures == 0)
    std::cout << "acceptance: all criteria passed\n";
  else
    std::cout << "acceptance: " << failures << " criteria FAILED\n";
  return failures == 0 ? 0 : 1;
}
