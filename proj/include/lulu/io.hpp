#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>

#include "lulu/verify.hpp"

namespace lulu {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CsvError : IoError {
  int row = 0;
  int col = 0;
  CsvError(const std::string& msg, int r, int c)
      : IoError("csv row " + std::to_string(r) + " column " + std::to_string(c) + ": " + msg),
        row(r),
        col(c) {}
};

struct Grid {
  std::vector<int> extents;  // {len} for one row, {rows, cols} otherwise
  std::vector<Value> values;
};

// ---------------------------------------------------------------------------
// CSV: row-major integers, one grid row per line.

inline Grid read_csv(std::istream& in) {
  Grid g;
  std::string line;
  int row = 0;
  int cols = -1;
  bool ended = false;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank) {
      if (cols >= 0) ended = true;  // only trailing blanks may follow
      continue;
    }
    if (ended) throw CsvError("content after a blank line", row, 1);
    int col = 0;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      ++col;
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      std::size_t b = pos;
      std::size_t e = comma;
      while (b < e && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
      while (e > b && std::isspace(static_cast<unsigned char>(line[e - 1]))) --e;
      if (b == e) throw CsvError("empty value", row, col);
      Value v = 0;
      const auto [ptr, ec] = std::from_chars(line.data() + b, line.data() + e, v);
      if (ec != std::errc{} || ptr != line.data() + e)
        throw CsvError("not an integer: '" + line.substr(b, e - b) + "'", row, col);
      g.values.push_back(v);
      pos = comma + 1;
      if (comma == line.size()) break;
    }
    if (cols < 0)
      cols = col;
    else if (col != cols)
      throw CsvError("expected " + std::to_string(cols) + " values, found " + std::to_string(col),
                     row, col);
  }
  if (cols < 0) throw CsvError("empty input", 1, 1);
  const int rows = static_cast<int>(g.values.size()) / cols;
  g.extents = rows == 1 ? std::vector<int>{cols} : std::vector<int>{rows, cols};
  return g;
}

inline void write_csv(std::ostream& out, const ScalarField& f) {
  const auto& ext = f.lattice->extents();
  if (ext.size() > 2) throw IoError("csv output supports 1D and 2D fields only");
  const int cols = ext.size() == 1 ? ext[0] : ext[1];
  for (Cell c = 0; c < f.cell_count(); ++c) {
    out << f.values[static_cast<std::size_t>(c)];
    out << ((c % cols == cols - 1) ? '\n' : ',');
  }
}

// ---------------------------------------------------------------------------
// PGM (P2/P5), 2D nonnegative integers.

inline Grid read_pgm(std::istream& in) {
  auto next_token = [&]() -> std::string {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
      if (ch == '#') {
        while ((ch = in.get()) != EOF && ch != '\n') {
        }
        continue;
      }
      if (std::isspace(ch)) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(static_cast<char>(ch));
    }
    return tok;
  };
  const std::string magic = next_token();
  if (magic != "P2" && magic != "P5") throw IoError("pgm: expected magic P2 or P5");
  auto next_int = [&] {
    const std::string t = next_token();
    if (t.empty()) throw IoError("pgm: truncated header");
    return std::stoll(t);
  };
  const long long w = next_int();
  const long long h = next_int();
  const long long maxval = next_int();
  if (w <= 0 || h <= 0) throw IoError("pgm: bad dimensions");
  if (maxval <= 0 || maxval > 65535) throw IoError("pgm: unsupported maxval");
  Grid g;
  g.extents = {static_cast<int>(h), static_cast<int>(w)};
  g.values.reserve(static_cast<std::size_t>(w * h));
  if (magic == "P2") {
    for (long long i = 0; i < w * h; ++i) {
      const std::string t = next_token();
      if (t.empty()) throw IoError("pgm: truncated pixel data");
      g.values.push_back(std::stoll(t));
    }
  } else {
    const int bytes = maxval > 255 ? 2 : 1;
    for (long long i = 0; i < w * h; ++i) {
      int hi = in.get();
      if (hi == EOF) throw IoError("pgm: truncated pixel data");
      if (bytes == 2) {
        const int lo = in.get();
        if (lo == EOF) throw IoError("pgm: truncated pixel data");
        g.values.push_back(static_cast<Value>(hi) * 256 + lo);
      } else {
        g.values.push_back(hi);
      }
    }
  }
  for (Value v : g.values)
    if (v < 0 || v > maxval) throw IoError("pgm: pixel out of range");
  return g;
}

/// Writes P2; values are clamped into [0, maxval] and the clamp count
/// reported through `clamped` when non-null.
inline void write_pgm(std::ostream& out, const ScalarField& f, int maxval = 255,
                      long long* clamped = nullptr) {
  const auto& ext = f.lattice->extents();
  if (ext.size() != 2) throw IoError("pgm output requires a 2D field");
  out << "P2\n" << ext[1] << ' ' << ext[0] << '\n' << maxval << '\n';
  long long clamps = 0;
  for (int r = 0; r < ext[0]; ++r) {
    for (int c = 0; c < ext[1]; ++c) {
      Value v = f.values[static_cast<std::size_t>(r) * ext[1] + c];
      if (v < 0) {
        v = 0;
        ++clamps;
      } else if (v > maxval) {
        v = maxval;
        ++clamps;
      }
      out << v << (c + 1 < ext[1] ? ' ' : '\n');
    }
  }
  if (clamped) *clamped = clamps;
}

// ---------------------------------------------------------------------------
// Pulse stream (JSON lines) and summary document.

inline json pulse_to_json(const Lattice& lat, const Pulse& p) {
  json cells = json::array();
  for (Cell c : p.support) cells.push_back(lat.coords(c));
  json j;
  j["scale"] = p.scale();
  j["sign"] = p.sign();
  j["value"] = p.value;
  j["cells"] = std::move(cells);
  return j;
}

/// One record per pulse, ordered by (scale asc, down before up, smallest
/// support cell asc).
inline void write_pulses_jsonl(std::ostream& out, const DptResult& r) {
  for (const Layer& layer : r.layers) {
    for (const Pulse& p : layer.down) out << pulse_to_json(*r.lattice, p).dump() << '\n';
    for (const Pulse& p : layer.up) out << pulse_to_json(*r.lattice, p).dump() << '\n';
  }
}

inline json summary_json(const DptResult& r, const json& command_echo) {
  json j;
  j["source_digest"] = r.source_digest;
  j["lattice"] = {{"extents", r.lattice->extents()},
                  {"connectivity", to_string(r.lattice->connectivity())},
                  {"boundary", to_string(r.lattice->boundary())}};
  j["residual"] = r.residual;
  j["max_scale"] = r.max_scale();
  j["pulses"] = r.pulse_count();
  json layers = json::array();
  for (const SpectrumRow& row : spectrum(r))
    layers.push_back({{"n", row.n},
                      {"gamma_minus", row.gamma_minus},
                      {"gamma_plus", row.gamma_plus},
                      {"energy", row.energy}});
  j["layers"] = std::move(layers);
  j["command"] = command_echo;
  return j;
}

/// Rebuilds a decomposition from a summary document and its pulse stream.
inline DptResult read_result(const json& summary, std::istream& pulses) {
  DptResult r;
  const json& lj = summary.at("lattice");
  std::vector<int> extents = lj.at("extents").get<std::vector<int>>();
  const std::string conn = lj.at("connectivity").get<std::string>();
  const std::string bound = lj.at("boundary").get<std::string>();
  r.lattice = std::make_shared<Lattice>(
      extents, conn == "full" ? Connectivity::full : Connectivity::facet,
      bound == "domain_only" ? Boundary::domain_only : Boundary::zero_padded);
  r.residual = summary.at("residual").get<Value>();
  r.source_digest = summary.value("source_digest", std::string{});
  const int max_scale = summary.at("max_scale").get<int>();
  r.layers.resize(static_cast<std::size_t>(std::max(0, max_scale)));
  for (std::size_t i = 0; i < r.layers.size(); ++i) r.layers[i].n = static_cast<int>(i) + 1;

  std::string line;
  int lineno = 0;
  while (std::getline(pulses, line)) {
    ++lineno;
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank) continue;
    json pj;
    try {
      pj = json::parse(line);
    } catch (const json::exception& e) {
      throw IoError("pulses line " + std::to_string(lineno) + ": " + e.what());
    }
    Pulse p;
    p.value = pj.at("value").get<Value>();
    if (p.value == 0) throw IoError("pulses line " + std::to_string(lineno) + ": zero pulse value");
    for (const json& cj : pj.at("cells")) {
      const std::vector<int> xyz = cj.get<std::vector<int>>();
      p.support.push_back(r.lattice->index(xyz));
    }
    std::sort(p.support.begin(), p.support.end());
    if (!is_connected(*r.lattice, p.support))
      throw IoError("pulses line " + std::to_string(lineno) + ": disconnected support");
    const int scale = pj.at("scale").get<int>();
    if (scale != p.scale())
      throw IoError("pulses line " + std::to_string(lineno) + ": scale does not match support");
    if (scale > static_cast<int>(r.layers.size())) {
      const std::size_t old = r.layers.size();
      r.layers.resize(static_cast<std::size_t>(scale));
      for (std::size_t i = old; i < r.layers.size(); ++i) r.layers[i].n = static_cast<int>(i) + 1;
    }
    Layer& layer = r.layers[static_cast<std::size_t>(scale - 1)];
    (p.value < 0 ? layer.down : layer.up).push_back(std::move(p));
  }
  for (Layer& layer : r.layers) detail::sort_layer(layer);
  return r;
}

inline void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumRow>& rows) {
  out << "n,gamma_minus,gamma_plus,energy\n";
  for (const SpectrumRow& r : rows)
    out << r.n << ',' << r.gamma_minus << ',' << r.gamma_plus << ',' << r.energy << '\n';
}

// ---------------------------------------------------------------------------
// Files.

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Write-then-rename so readers never observe a partial file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw IoError("write failed on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace lulu
