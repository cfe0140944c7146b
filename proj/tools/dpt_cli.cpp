// Batch front-end for the discrete pulse transform toolkit: ingest CSV/PGM
// grids, decompose into pulse streams, band-pass filter, run the operator
// identity verification suite, and benchmark the engine.
//
// Exit codes: 0 ok, 1 assertion failure, 2 usage, 3 I/O.

#include <sys/resource.h>

#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "lulu/io.hpp"
#include "lulu/synth.hpp"

namespace {

using namespace lulu;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Connectivity parse_connectivity(const std::string& s) {
  if (s == "4" || s == "facet") return Connectivity::facet;
  if (s == "8" || s == "full") return Connectivity::full;
  throw UsageError("unknown connectivity '" + s + "' (expected 4, 8 or facet)");
}

Boundary parse_boundary(const std::string& s) {
  if (s == "zero" || s == "zero_padded") return Boundary::zero_padded;
  if (s == "domain" || s == "domain_only") return Boundary::domain_only;
  throw UsageError("unknown boundary '" + s + "' (expected zero or domain)");
}

std::pair<int, int> parse_scales(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("--scales expects LO:HI");
  int lo = 0;
  int hi = 0;
  try {
    lo = std::stoi(s.substr(0, colon));
    hi = std::stoi(s.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("--scales expects integers LO:HI");
  }
  if (lo < 1 || lo > hi) throw UsageError("--scales requires 1 <= LO <= HI");
  return {lo, hi};
}

ScalarField load_field(const std::string& path, Connectivity conn, Boundary bound,
                       long long max_cells) {
  Grid g;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  if (path.ends_with(".csv")) {
    g = read_csv(in);
  } else if (path.ends_with(".pgm")) {
    g = read_pgm(in);
  } else {
    throw UsageError("unsupported input format for '" + path + "' (expected .csv or .pgm)");
  }
  if (static_cast<long long>(g.values.size()) > max_cells)
    throw UsageError("input has " + std::to_string(g.values.size()) +
                     " cells, above --max-cells=" + std::to_string(max_cells));
  if (conn == Connectivity::full && g.extents.size() != 2)
    throw UsageError("connectivity 8 requires a 2D input");
  auto lat = std::make_shared<Lattice>(g.extents, conn, bound);
  return ScalarField(std::move(lat), std::move(g.values));
}

void write_field(const std::string& path, const ScalarField& f) {
  std::ostringstream out;
  if (path.ends_with(".csv")) {
    write_csv(out, f);
  } else if (path.ends_with(".pgm")) {
    long long clamped = 0;
    write_pgm(out, f, 255, &clamped);
    std::cout << "clamped: " << clamped << "\n";
  } else {
    throw UsageError("unsupported output format for '" + path + "' (expected .csv or .pgm)");
  }
  atomic_write(path, out.str());
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

struct CommonOpts {
  std::string input;
  std::string output;
  std::string connectivity = "facet";
  std::string boundary = "zero";
  std::string scales;
  long long max_cells = 1LL << 22;
  std::uint64_t seed = 424243;
};

json command_echo(const CommonOpts& o) {
  json j;
  j["input"] = o.input;
  j["connectivity"] = to_string(parse_connectivity(o.connectivity));
  j["boundary"] = to_string(parse_boundary(o.boundary));
  j["max_cells"] = o.max_cells;
  return j;
}

int cmd_decompose(const CommonOpts& o, const std::string& engine) {
  const ScalarField f =
      load_field(o.input, parse_connectivity(o.connectivity), parse_boundary(o.boundary), o.max_cells);
  DecomposeOptions opt;
  if (engine == "naive") opt.engine = DecomposeOptions::Engine::naive;
  const DptResult r = decompose(f, opt);

  std::ostringstream pulses;
  write_pulses_jsonl(pulses, r);
  atomic_write(o.output + ".pulses.jsonl", pulses.str());

  atomic_write(o.output + ".summary.json", summary_json(r, command_echo(o)).dump(2) + "\n");

  std::ostringstream spec;
  write_spectrum_csv(spec, spectrum(r));
  atomic_write(o.output + ".spectrum.csv", spec.str());

  std::cout << "pulses: " << r.pulse_count() << "\nmax_scale: " << r.max_scale()
            << "\nresidual: " << r.residual << "\n";
  return 0;
}

int cmd_reconstruct(const CommonOpts& o) {
  json summary;
  try {
    summary = json::parse(read_file(o.input + ".summary.json"));
  } catch (const json::exception& e) {
    throw IoError("summary parse: " + std::string(e.what()));
  }
  std::ifstream pulses(o.input + ".pulses.jsonl", std::ios::binary);
  if (!pulses) throw IoError("cannot open " + o.input + ".pulses.jsonl");
  const DptResult r = read_result(summary, pulses);
  int lo = 1;
  int hi = std::max(1, r.max_scale());
  if (!o.scales.empty()) std::tie(lo, hi) = parse_scales(o.scales);
  write_field(o.output, reconstruct(r, lo, hi));
  return 0;
}

int cmd_filter(const CommonOpts& o) {
  const ScalarField f =
      load_field(o.input, parse_connectivity(o.connectivity), parse_boundary(o.boundary), o.max_cells);
  const DptResult r = decompose(f);
  int lo = 1;
  int hi = std::max(1, r.max_scale());
  if (!o.scales.empty()) std::tie(lo, hi) = parse_scales(o.scales);
  write_field(o.output, reconstruct(r, lo, hi));
  return 0;
}

int cmd_verify(const CommonOpts& o, const std::string& config_path, int trials, bool negation,
               bool inject_fault) {
  SuiteConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw IoError("cannot open " + config_path);
    cfg = SuiteConfig::from_stream(in);
  }
  cfg.seed = o.seed;
  if (trials >= 0) {
    cfg.trials_a = trials;
    cfg.trials_b = trials;
  }
  if (negation) cfg.include_negation = true;
  if (inject_fault) cfg.fault = FaultInjection::pulse_sum;

  const SuiteReport rep = run_suite(cfg);
  if (!o.output.empty()) atomic_write(o.output, rep.to_json().dump(2) + "\n");
  std::cout << "trials: " << rep.trials << "\nassertions: " << rep.assertions
            << "\nfailures: " << rep.failures << "\ninapplicable: " << rep.inapplicable
            << "\nprecondition_alarms: " << rep.precondition_alarms
            << "\nverdict: " << (rep.all_passed() ? "pass" : "fail") << "\n";
  if (!rep.all_passed() && !rep.failed_trials.empty())
    std::cout << "first_failure: " << rep.failed_trials.front().dump() << "\n";
  return rep.all_passed() ? 0 : 1;
}

int cmd_bench(const CommonOpts& o, int size) {
  const ScalarField f = smoothed_random_field(size, size, o.seed, parse_connectivity(o.connectivity),
                                              parse_boundary(o.boundary));
  const auto t0 = std::chrono::steady_clock::now();
  const DptResult r = decompose(f);
  const auto t1 = std::chrono::steady_clock::now();
  const ScalarField back = reconstruct(r);
  const bool exact = back == f;
  const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  json j;
  j["cells"] = f.cell_count();
  j["pulses"] = r.pulse_count();
  j["max_scale"] = r.max_scale();
  j["decompose_ms"] = ms;
  j["peak_rss_kb"] = peak_rss_kb();
  j["reconstruction_exact"] = exact;
  std::cout << j.dump(2) << "\n";
  return exact ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete pulse transform toolkit (LULU operators)"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string engine = "zone_graph";
  std::string config_path;
  int trials = -1;
  int bench_size = 256;
  bool negation = false;
  bool inject_fault = false;

  auto* dec = app.add_subcommand("decompose", "Decompose a grid into a pulse stream");
  dec->add_option("--input", o.input, "CSV or PGM grid")->required();
  dec->add_option("--output", o.output, "output prefix for .pulses.jsonl/.summary.json/.spectrum.csv")
      ->required();
  dec->add_option("--connectivity", o.connectivity, "4|8|facet");
  dec->add_option("--boundary", o.boundary, "zero|domain");
  dec->add_option("--max-cells", o.max_cells, "refuse larger inputs");
  dec->add_option("--engine", engine, "zone_graph|naive")->group("");

  auto* rec = app.add_subcommand("reconstruct", "Rebuild a field from a pulse stream");
  rec->add_option("--input", o.input, "prefix written by decompose")->required();
  rec->add_option("--output", o.output, "output .csv or .pgm")->required();
  rec->add_option("--scales", o.scales, "band LO:HI (default: full range)");

  auto* fil = app.add_subcommand("filter", "Band-pass a grid through its pulse decomposition");
  fil->add_option("--input", o.input, "CSV or PGM grid")->required();
  fil->add_option("--output", o.output, "output .csv or .pgm")->required();
  fil->add_option("--scales", o.scales, "band LO:HI (default: full range)");
  fil->add_option("--connectivity", o.connectivity, "4|8|facet");
  fil->add_option("--boundary", o.boundary, "zero|domain");
  fil->add_option("--max-cells", o.max_cells, "refuse larger inputs");

  auto* ver = app.add_subcommand("verify", "Run the operator identity verification suite");
  ver->add_option("--config", config_path, "plain-text key=value suite configuration");
  ver->add_option("--seed", o.seed, "suite seed");
  ver->add_option("--trials", trials, "override per-combination trial counts");
  ver->add_option("--output", o.output, "write the JSON report here");
  ver->add_flag("--include-negation", negation)->group("");
  ver->add_flag("--inject-fault", inject_fault)->group("");

  auto* ben = app.add_subcommand("bench", "Decompose a synthetic image and report timings");
  ben->add_option("--size", bench_size, "image side length");
  ben->add_option("--seed", o.seed, "noise seed");
  ben->add_option("--connectivity", o.connectivity, "4|8|facet");
  ben->add_option("--boundary", o.boundary, "zero|domain");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (dec->parsed()) return cmd_decompose(o, engine);
    if (rec->parsed()) return cmd_reconstruct(o);
    if (fil->parsed()) return cmd_filter(o);
    if (ver->parsed()) return cmd_verify(o, config_path, trials, negation, inject_fault);
    if (ben->parsed()) return cmd_bench(o, bench_size);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
