#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cctype>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "scatterkit/errors.hpp"
#include "scatterkit/filterbank.hpp"
#include "scatterkit/scattering.hpp"
#include "scatterkit/signal.hpp"
#include "scatterkit/version.hpp"
#include "scatterkit/wavelet.hpp"

namespace scatterkit::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && (*first == ' ' || *first == '+')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw IoError("not a number: '" + s + "'");
  return v;
}

namespace detail {

static_assert(std::endian::native == std::endian::little, "SIG1 readers assume a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is, const std::string& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw IoError(path + ": truncated SIG1 file");
  return v;
}

inline std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, mode);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

inline std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream is(path, mode);
  if (!is) throw IoError("cannot read " + path.string());
  return is;
}

inline void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

}  // namespace detail

// ---- SIG1 ------------------------------------------------------------------

inline void write_sig(const fs::path& path, const Signal& x) {
  auto os = detail::open_out(path, std::ios::binary);
  os.write("SIG1", 4);
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(x.ndims()));
  for (std::size_t e : x.shape().extents()) detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(e));
  const bool real = x.is_real();
  detail::put<std::uint8_t>(os, real ? 0 : 1);
  for (const auto& v : x.samples()) {
    detail::put<double>(os, v.real());
    if (!real) detail::put<double>(os, v.imag());
  }
  if (!os) throw IoError("write failed: " + path.string());
}

inline Signal read_sig(const fs::path& path, double spacing = 1.0) {
  auto is = detail::open_in(path, std::ios::binary);
  const std::string name = path.string();
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "SIG1", 4) != 0) throw IoError(name + ": missing SIG1 magic");
  const auto nd = detail::get<std::uint32_t>(is, name);
  if (nd < 1 || nd > 2) throw IoError(name + ": unsupported dimension count " + std::to_string(nd));
  std::vector<std::size_t> ext;
  for (std::uint32_t a = 0; a < nd; ++a) ext.push_back(detail::get<std::uint32_t>(is, name));
  const auto flag = detail::get<std::uint8_t>(is, name);
  if (flag > 1) throw IoError(name + ": bad sample flag");
  GridShape shape(ext);
  std::vector<cplx> s(shape.count());
  for (auto& v : s) {
    const double re = detail::get<double>(is, name);
    const double im = flag == 1 ? detail::get<double>(is, name) : 0.0;
    v = cplx(re, im);
  }
  return Signal(shape, std::move(s), spacing);
}

// ---- PGM (P5, maxval 255) ----------------------------------------------------

inline Signal read_pgm(const fs::path& path) {
  auto is = detail::open_in(path, std::ios::binary);
  const std::string name = path.string();
  auto token = [&]() {
    std::string t;
    char c;
    while (is.get(c)) {
      if (c == '#') {
        std::string skip;
        std::getline(is, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!t.empty()) break;
        continue;
      }
      t.push_back(c);
    }
    return t;
  };
  if (token() != "P5") throw IoError(name + ": not a binary PGM (P5)");
  std::size_t w = 0, h = 0, maxval = 0;
  try {
    w = std::stoul(token());
    h = std::stoul(token());
    maxval = std::stoul(token());
  } catch (const std::exception&) {
    throw IoError(name + ": malformed PGM header");
  }
  if (maxval != 255) throw IoError(name + ": only maxval 255 is supported");
  std::vector<unsigned char> raw(w * h);
  if (!is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    throw IoError(name + ": truncated PGM data");
  }
  Signal x(GridShape({h, w}));
  for (std::size_t i = 0; i < raw.size(); ++i) x[i] = raw[i] / 255.0;
  return x;
}

// Real part, clamped to [0, 1], mapped to [0, 255].
inline void write_pgm(const fs::path& path, const Signal& x) {
  if (x.ndims() != 2) throw DimensionError("PGM export needs a 2D signal");
  auto os = detail::open_out(path, std::ios::binary);
  os << "P5\n" << x.shape().extent(1) << ' ' << x.shape().extent(0) << "\n255\n";
  for (const auto& v : x.samples()) {
    const double c = std::clamp(v.real(), 0.0, 1.0);
    os.put(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
  }
  if (!os) throw IoError("write failed: " + path.string());
}

// Affine map of the real part onto [0, 1] for display.
inline Signal normalize_for_display(const Signal& x) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& v : x.samples()) {
    lo = std::min(lo, v.real());
    hi = std::max(hi, v.real());
  }
  Signal out(x.shape(), x.spacing());
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i].real() - lo) / span;
  return out;
}

// .pgm or SIG1 by extension.
inline Signal load_signal(const fs::path& path) {
  if (path.extension() == ".pgm") return read_pgm(path);
  return read_sig(path);
}

// ---- JSON ------------------------------------------------------------------

inline void write_json(const fs::path& path, const json& j) {
  auto os = detail::open_out(path);
  os << j.dump(2) << '\n';
  if (!os) throw IoError("write failed: " + path.string());
}

inline json read_json(const fs::path& path) {
  auto is = detail::open_in(path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

inline json shape_json(const GridShape& s) { return json(s.extents()); }

inline GridShape shape_from_json(const json& j) { return GridShape(j.get<std::vector<std::size_t>>()); }

// ---- CSV -------------------------------------------------------------------

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw IoError("missing CSV column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline Table read_csv(const fs::path& path) {
  auto is = detail::open_in(path);
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw IoError(path.string() + ": empty CSV");
  t.header = split_csv_line(line);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto row = split_csv_line(line);
    if (row.size() != t.header.size()) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                    " fields, got " + std::to_string(row.size()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline void write_csv(const fs::path& path, const Table& t) {
  auto os = detail::open_out(path);
  auto line = [&os](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << fields[i];
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  if (!os) throw IoError("write failed: " + path.string());
}

// ---- filter bank directory -------------------------------------------------

inline std::string kernel_file(const FrequencyKernel& k) {
  if (k.kind == KernelKind::low_pass) return "lowpass_j" + std::to_string(k.scale) + ".sig";
  return "psi_j" + std::to_string(k.scale) + "_k" + std::to_string(k.band) + ".sig";
}

inline json params_json(const BankParams& p) {
  return {{"sigma", p.sigma},         {"xi", p.xi},
          {"phi_sigma", p.phi_sigma}, {"slant", p.slant},
          {"bandwidth", p.bandwidth}, {"frame_floor", p.frame_floor},
          {"cascade_threshold", p.cascade_threshold}};
}

inline BankParams params_from_json(const json& j) {
  BankParams p;
  p.sigma = j.at("sigma").get<double>();
  p.xi = j.at("xi").get<double>();
  p.phi_sigma = j.at("phi_sigma").get<double>();
  p.slant = j.at("slant").get<double>();
  p.bandwidth = j.at("bandwidth").get<double>();
  p.frame_floor = j.at("frame_floor").get<double>();
  p.cascade_threshold = j.at("cascade_threshold").get<double>();
  return p;
}

// Frequency responses (DFT bin order) as complex SIG1 files plus
// manifest.json with shape, J, K, parameters, frame bounds and a file list.
inline void write_bank(const fs::path& dir, const FilterBank& bank) {
  detail::make_dir(dir);
  json files = json::array();
  auto emit = [&](const FrequencyKernel& k) {
    const std::string name = kernel_file(k);
    write_sig(dir / name, Signal(k.shape, k.response));
    files.push_back({{"file", name}, {"kind", to_string(k.kind)}, {"scale", k.scale}, {"band", k.band}});
  };
  for (const auto& k : bank.lowpass) emit(k);
  for (const auto& k : bank.psi) emit(k);
  json m = {{"format", "scatterkit-bank"},
            {"version", kVersion},
            {"shape", shape_json(bank.shape)},
            {"J", bank.J},
            {"K", bank.K},
            {"params", params_json(bank.params)},
            {"normalization", bank.normalization},
            {"frame_lower", bank.frame_lower},
            {"frame_upper", bank.frame_upper},
            {"frame_lower_frequency", bank.frame_lower_frequency},
            {"files", files}};
  write_json(dir / "manifest.json", m);
}

// Loads the stored responses, then re-measures frame bounds and rebuilds the
// cascade filters.
inline FilterBank read_bank(const fs::path& dir) {
  const json m = read_json(dir / "manifest.json");
  if (m.value("format", "") != "scatterkit-bank") throw IoError(dir.string() + ": not a filter bank directory");
  try {
    FilterBank bank;
    bank.shape = shape_from_json(m.at("shape"));
    bank.J = m.at("J").get<int>();
    bank.K = m.at("K").get<int>();
    bank.params = params_from_json(m.at("params"));
    bank.normalization = m.at("normalization").get<double>();
    bank.lowpass.resize(static_cast<std::size_t>(bank.J) + 1);
    bank.psi.resize(static_cast<std::size_t>(bank.J * bank.K));
    for (const auto& f : m.at("files")) {
      const Signal s = read_sig(dir / f.at("file").get<std::string>());
      require_same_shape(s.shape(), bank.shape, "bank file");
      FrequencyKernel k{bank.shape,
                        std::vector<cplx>(s.samples().begin(), s.samples().end()),
                        kernel_kind_from_string(f.at("kind").get<std::string>()),
                        f.at("scale").get<int>(),
                        f.at("band").get<int>()};
      if (k.kind == KernelKind::low_pass) {
        bank.lowpass.at(static_cast<std::size_t>(k.scale)) = std::move(k);
      } else {
        bank.psi.at(static_cast<std::size_t>((k.scale - 1) * bank.K + k.band)) = std::move(k);
      }
    }
    for (const auto& k : bank.lowpass) {
      if (k.response.empty()) throw IoError(dir.string() + ": missing low-pass file");
    }
    for (const auto& k : bank.psi) {
      if (k.response.empty()) throw IoError(dir.string() + ": missing wavelet file");
    }
    bank.phi = bank.lowpass.back();
    scatterkit::detail::seal_bank(bank);
    return bank;
  } catch (const json::exception& e) {
    throw IoError(dir.string() + "/manifest.json: " + e.what());
  } catch (const std::out_of_range& e) {
    throw IoError(dir.string() + ": inconsistent bank files");
  }
}

// ---- wavelet coefficient directory -----------------------------------------

inline void write_wavelet_coefficients(const fs::path& dir, const WaveletCoefficients& c) {
  detail::make_dir(dir);
  json bands = json::array();
  write_sig(dir / "low.sig", c.low);
  for (const auto& b : c.bands) {
    const std::string name = "band_j" + std::to_string(b.j) + "_k" + std::to_string(b.k) + ".sig";
    write_sig(dir / name, b.coeffs);
    bands.push_back({{"file", name}, {"j", b.j}, {"k", b.k}, {"spacing", b.coeffs.spacing()}});
  }
  json m = {{"format", "scatterkit-wavelet"},
            {"version", kVersion},
            {"J", c.J},
            {"oversampling", c.oversampling},
            {"real_input", c.real_input},
            {"low", {{"file", "low.sig"}, {"spacing", c.low.spacing()}}},
            {"bands", bands}};
  write_json(dir / "manifest.json", m);
}

inline WaveletCoefficients read_wavelet_coefficients(const fs::path& dir) {
  const json m = read_json(dir / "manifest.json");
  if (m.value("format", "") != "scatterkit-wavelet") throw IoError(dir.string() + ": not a wavelet directory");
  try {
    WaveletCoefficients c;
    c.J = m.at("J").get<int>();
    c.oversampling = m.at("oversampling").get<int>();
    c.real_input = m.at("real_input").get<bool>();
    c.low = read_sig(dir / "low.sig", m.at("low").at("spacing").get<double>());
    for (const auto& b : m.at("bands")) {
      c.bands.push_back({b.at("j").get<int>(), b.at("k").get<int>(),
                         read_sig(dir / b.at("file").get<std::string>(), b.at("spacing").get<double>())});
    }
    return c;
  } catch (const json::exception& e) {
    throw IoError(dir.string() + "/manifest.json: " + e.what());
  }
}

// ---- scattering output directory -------------------------------------------

inline Table features_table(const std::vector<FeatureVector>& rows, const std::vector<std::string>& labels = {}) {
  Table t;
  if (rows.empty()) return t;
  t.header = rows.front().labels();
  if (!labels.empty()) t.header.insert(t.header.begin(), "__label__");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<std::string> row;
    row.reserve(t.header.size());
    if (!labels.empty()) row.push_back(labels[r]);
    for (double v : rows[r].values) row.push_back(format_double(v));
    t.rows.push_back(std::move(row));
  }
  return t;
}

// One SIG1 file per path (named by its label), manifest.json and a one-row
// features.csv.
inline void write_scattering(const fs::path& dir, const ScatteringOutput& s) {
  detail::make_dir(dir);
  json paths = json::array();
  for (std::size_t i = 0; i < s.paths.size(); ++i) {
    const std::string label = s.paths[i].label();
    write_sig(dir / (label + ".sig"), s.coeffs[i]);
    paths.push_back({{"label", label}, {"file", label + ".sig"}, {"spacing", s.coeffs[i].spacing()}});
  }
  json m = {{"format", "scatterkit-scattering"},
            {"version", kVersion},
            {"J", s.J},
            {"K", s.K},
            {"order", s.config.max_order},
            {"oversampling", s.config.oversampling},
            {"rho", to_string(s.config.rho)},
            {"input_shape", shape_json(s.input_shape)},
            {"order_energy", s.order_energy},
            {"paths", paths}};
  write_json(dir / "manifest.json", m);
  write_csv(dir / "features.csv", features_table({flatten(s)}));
}

inline ScatteringOutput read_scattering(const fs::path& dir) {
  const json m = read_json(dir / "manifest.json");
  if (m.value("format", "") != "scatterkit-scattering") throw IoError(dir.string() + ": not a scattering directory");
  try {
    ScatteringOutput s;
    s.J = m.at("J").get<int>();
    s.K = m.at("K").get<int>();
    s.config.max_order = m.at("order").get<int>();
    s.config.oversampling = m.at("oversampling").get<int>();
    s.config.rho = rho_from_string(m.at("rho").get<std::string>());
    s.input_shape = shape_from_json(m.at("input_shape"));
    for (const auto& p : m.at("paths")) {
      s.paths.push_back(ScatteringPath::parse(p.at("label").get<std::string>()));
      s.coeffs.push_back(read_sig(dir / p.at("file").get<std::string>(), p.at("spacing").get<double>()));
    }
    record_order_energy(s);
    return s;
  } catch (const json::exception& e) {
    throw IoError(dir.string() + "/manifest.json: " + e.what());
  }
}

}  // namespace scatterkit::io
