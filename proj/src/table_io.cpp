#include "wgqed/table_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace wgqed::io {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void fail(const fs::path& path, int line, const std::string& msg) {
  std::ostringstream os;
  os << path.string();
  if (line > 0) os << ": row at line " << line;
  os << ": " << msg;
  throw DataError(os.str());
}

double number(const fs::path& path, int line, const std::string& s, const std::string& column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    fail(path, line, "column " + column + ": expected a number, got '" + s + "'");
  return v;
}

void expect_header(const fs::path& path, const CsvTable& t, const std::vector<std::string>& want) {
  if (t.header != want) {
    std::string w;
    for (const auto& c : want) w += (w.empty() ? "" : ", ") + c;
    fail(path, 0, "expected header '" + w + "'");
  }
}

// Uniform grid through `values`; rows are reported against `lines`.
UniformGrid grid_from(const fs::path& path, const std::vector<double>& values, const std::vector<int>& lines,
                      const std::string& what) {
  if (values.size() < 2) fail(path, lines.empty() ? 0 : lines.front(), what + " needs at least two samples");
  const UniformGrid g = make_grid(values.front(), values.back(), values.size());
  if (!(g.step > 0.0)) fail(path, lines[1], what + " must increase");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (std::abs(values[i] - g[i]) > 1e-6 * g.step) fail(path, lines[i], what + " is not uniformly spaced");
  return g;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvTable::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return v;
  return {};
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      const auto eq = s.find('=');
      if (eq != std::string::npos) t.metadata.emplace_back(trim(s.substr(1, eq - 1)), trim(s.substr(eq + 1)));
      continue;
    }
    auto cells = split(s);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      fail(path, n, "expected " + std::to_string(t.header.size()) + " columns, found " + std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
    t.lines.push_back(n);
  }
  if (t.header.empty()) fail(path, 0, "missing header row");
  return t;
}

void write_csv(const fs::path& path, const CsvTable& t) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& [k, v] : t.metadata) out << "# " << k << " = " << v << '\n';
  for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  if (!out) throw DataError("failed writing " + path.string());
}

void write_intensity(const fs::path& path, const std::vector<IntensityScan>& scans, const Metadata& metadata) {
  CsvTable t;
  t.metadata = metadata;
  t.header = {"power_uW", "detuning_GHz", "I_t", "counts"};
  for (const auto& s : scans) {
    for (std::size_t i = 0; i < s.omega.size(); ++i) {
      const double c = s.counts.empty() ? 0.0 : s.counts[i];
      t.rows.push_back({format_number(s.power_uw), format_number(linear_from_angular(s.omega[i])),
                        format_number(s.intensity[i]), format_number(c)});
    }
  }
  write_csv(path, t);
}

std::vector<IntensityScan> read_intensity(const fs::path& path) {
  const CsvTable t = read_csv(path);
  expect_header(path, t, {"power_uW", "detuning_GHz", "I_t", "counts"});
  struct Block {
    double power;
    std::vector<double> f, i, c;
    std::vector<int> lines;
  };
  std::vector<Block> blocks;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const int ln = t.lines[r];
    const double p = number(path, ln, t.rows[r][0], "power_uW");
    if (!(p >= 0.0)) fail(path, ln, "power_uW must be >= 0");
    auto it = std::find_if(blocks.begin(), blocks.end(), [&](const Block& b) { return b.power == p; });
    if (it == blocks.end()) {
      blocks.push_back({p, {}, {}, {}, {}});
      it = blocks.end() - 1;
    }
    it->f.push_back(number(path, ln, t.rows[r][1], "detuning_GHz"));
    it->i.push_back(number(path, ln, t.rows[r][2], "I_t"));
    const double c = number(path, ln, t.rows[r][3], "counts");
    if (c < 0.0) fail(path, ln, "counts must be >= 0");
    it->c.push_back(c);
    it->lines.push_back(ln);
  }
  std::vector<IntensityScan> scans;
  for (auto& b : blocks) {
    std::vector<double> w(b.f.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = angular_from_linear(b.f[k]);
    IntensityScan s;
    s.power_uw = b.power;
    s.omega = grid_from(path, w, b.lines, "detuning_GHz");
    s.intensity = std::move(b.i);
    s.counts = std::move(b.c);
    scans.push_back(std::move(s));
  }
  return scans;
}

void write_g2(const fs::path& path, const std::vector<G2Record>& records, const Metadata& metadata) {
  CsvTable t;
  t.metadata = metadata;
  if (!records.empty()) {
    t.metadata.emplace_back("power_uW", format_number(records.front().power_uw));
    t.metadata.emplace_back("detuning_GHz", format_number(linear_from_angular(records.front().omega)));
  }
  t.header = {"pair", "tau_ns", "g2", "coincidences"};
  for (const auto& rec : records) {
    if (rec.power_uw != records.front().power_uw || rec.omega != records.front().omega)
      throw ArgumentError("write_g2: records of one file must share drive power and detuning");
    for (std::size_t i = 0; i < rec.trace.tau.size(); ++i) {
      const double c = rec.coincidences.empty() ? 0.0 : rec.coincidences[i];
      t.rows.push_back({to_string(rec.trace.pair), format_number(rec.trace.tau[i]), format_number(rec.trace.values[i]),
                        format_number(c)});
    }
  }
  write_csv(path, t);
}

std::vector<G2Record> read_g2(const fs::path& path) {
  const CsvTable t = read_csv(path);
  expect_header(path, t, {"pair", "tau_ns", "g2", "coincidences"});
  const std::string ps = t.meta("power_uW");
  const std::string fs_ = t.meta("detuning_GHz");
  if (ps.empty() || fs_.empty()) fail(path, 0, "metadata lines '# power_uW = ...' and '# detuning_GHz = ...' required");
  const double power = number(path, 0, ps, "power_uW metadata");
  const double omega = angular_from_linear(number(path, 0, fs_, "detuning_GHz metadata"));

  struct Block {
    PortPair pair;
    std::vector<double> tau, g, c;
    std::vector<int> lines;
  };
  std::vector<Block> blocks;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const int ln = t.lines[r];
    PortPair pair;
    try {
      pair = parse_port_pair(t.rows[r][0]);
    } catch (const Error&) {
      fail(path, ln, "unknown port pair '" + t.rows[r][0] + "'");
    }
    auto it = std::find_if(blocks.begin(), blocks.end(), [&](const Block& b) { return b.pair == pair; });
    if (it == blocks.end()) {
      blocks.push_back({pair, {}, {}, {}, {}});
      it = blocks.end() - 1;
    }
    it->tau.push_back(number(path, ln, t.rows[r][1], "tau_ns"));
    const double g = number(path, ln, t.rows[r][2], "g2");
    if (g < 0.0) fail(path, ln, "g2 must be >= 0");
    it->g.push_back(g);
    const double c = number(path, ln, t.rows[r][3], "coincidences");
    if (c < 0.0) fail(path, ln, "coincidences must be >= 0");
    it->c.push_back(c);
    it->lines.push_back(ln);
  }
  std::vector<G2Record> out;
  for (auto& b : blocks) {
    const UniformGrid tau = grid_from(path, b.tau, b.lines, "tau_ns");
    G2Record rec;
    try {
      rec.trace = CorrelationTrace(b.pair, tau, std::move(b.g));
    } catch (const Error& e) {
      fail(path, b.lines.front(), e.what());
    }
    rec.power_uw = power;
    rec.omega = omega;
    rec.coincidences = std::move(b.c);
    out.push_back(std::move(rec));
  }
  return out;
}

MeasurementSet read_measurement_set(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("data directory " + dir.string() + " does not exist");
  MeasurementSet m;
  const fs::path ipath = dir / "intensity.csv";
  if (fs::exists(ipath)) {
    m.intensity_scans = read_intensity(ipath);
    const CsvTable head = read_csv(ipath);
    if (const auto g = head.meta("gamma_tot"); !g.empty()) m.gamma_tot_fixed = number(ipath, 0, g, "gamma_tot metadata");
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.rfind("g2", 0) == 0 && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto recs = read_g2(f);
    m.g2_traces.insert(m.g2_traces.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
  }
  if (m.intensity_scans.empty() && m.g2_traces.empty())
    throw DataError(dir.string() + ": no intensity.csv or g2*.csv files found");
  return m;
}

void write_spectrum(const fs::path& path, const ComplexSpectrum& s, const Metadata& metadata) {
  CsvTable t;
  t.metadata = metadata;
  t.header = {"detuning_GHz", "re", "im", "modulus", "phase_deg"};
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    const cplx v = s.values[i];
    t.rows.push_back({format_number(linear_from_angular(s.grid[i])), format_number(v.real()), format_number(v.imag()),
                      format_number(std::abs(v)), format_number(std::arg(v) * 180.0 / std::numbers::pi)});
  }
  write_csv(path, t);
}

void write_sector(const fs::path& path, const TwoPhotonSector& s, const Metadata& metadata) {
  CsvTable t;
  t.metadata = metadata;
  t.metadata.emplace_back("detuning_GHz", format_number(linear_from_angular(s.omega)));
  t.header = {"delta_GHz", "re_T", "im_T"};
  for (std::size_t i = 0; i < s.delta.size(); ++i)
    t.rows.push_back({format_number(linear_from_angular(s.delta[i])), format_number(s.values[i].real()),
                      format_number(s.values[i].imag())});
  write_csv(path, t);
}

}  // namespace wgqed::io
