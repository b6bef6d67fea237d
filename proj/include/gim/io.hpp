#pragma once

// CSV emission and parsing, PGM image ingestion and dumps.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gim/harness.hpp"

namespace gim::io {

/// 12 significant digits.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_field(fields[i]);
  }
  os << '\n';
}

/// Splits one CSV line; quoted fields may contain commas and doubled quotes.
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

inline const std::vector<std::string>& sweep_header() {
  static const std::vector<std::string> h{"structure", "support", "g", "gamma_lower", "gamma_upper",
                                          "gamma_exact", "gamma_method", "argmax_group", "m_min", "m0",
                                          "m_ratio", "trials", "seed"};
  return h;
}

inline constexpr const char* kSaturated = "saturated";

inline std::vector<std::string> sweep_fields(const SweepRecord& r) {
  auto opt_index = [](const std::optional<Index>& v) { return v ? std::to_string(*v) : std::string(kSaturated); };
  std::string ratio;
  if (r.m_min && r.m0 && *r.m0 > 0) ratio = fmt(static_cast<double>(*r.m_min) / static_cast<double>(*r.m0));
  return {r.structure,
          r.support,
          std::to_string(r.g),
          fmt(r.gamma.lower),
          fmt(r.gamma.upper),
          r.gamma.exact ? fmt(*r.gamma.exact) : std::string(),
          to_string(r.gamma.method),
          std::to_string(r.gamma.argmax_group),
          opt_index(r.m_min),
          opt_index(r.m0),
          ratio,
          std::to_string(r.trials),
          std::to_string(r.seed)};
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  write_csv_row(os, sweep_header());
  for (const auto& r : records) write_csv_row(os, sweep_fields(r));
}

inline GammaMethod gamma_method_from_string(const std::string& s) {
  for (auto m : {GammaMethod::ExactSignEnum, GammaMethod::PhaseIterLower, GammaMethod::SdpUpper, GammaMethod::Sandwich})
    if (to_string(m) == s) return m;
  throw Error("unknown gamma method: " + s);
}

inline double parse_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  require(pos == s.size(), "malformed number: " + s);
  return v;
}

inline std::vector<SweepRecord> read_sweep_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), "sweep csv: missing header");
  require(split_csv_line(line) == sweep_header(), "sweep csv: unexpected header");
  auto opt_index = [](const std::string& s) -> std::optional<Index> {
    if (s == kSaturated) return std::nullopt;
    return static_cast<Index>(std::stoll(s));
  };
  std::vector<SweepRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    require(f.size() == sweep_header().size(), "sweep csv: wrong field count");
    SweepRecord r;
    r.structure = f[0];
    r.support = f[1];
    r.g = static_cast<Index>(std::stoll(f[2]));
    r.gamma.lower = parse_double(f[3]);
    r.gamma.upper = parse_double(f[4]);
    if (!f[5].empty()) r.gamma.exact = parse_double(f[5]);
    r.gamma.method = gamma_method_from_string(f[6]);
    r.gamma.argmax_group = static_cast<std::size_t>(std::stoull(f[7]));
    r.m_min = opt_index(f[8]);
    r.m0 = opt_index(f[9]);
    r.trials = std::stoi(f[11]);
    r.seed = std::stoull(f[12]);
    out.push_back(std::move(r));
  }
  return out;
}

namespace detail {

inline std::string next_token(std::istream& is) {
  std::string tok;
  char c;
  while (is.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(is, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok += c;
  }
  return tok;
}

}  // namespace detail

/// Reads a P2 or P5 graymap; intensities scaled to [0, 1].
inline RMatrix read_pgm(std::istream& is) {
  const std::string magic = detail::next_token(is);
  require(magic == "P2" || magic == "P5", "pgm: unsupported format '" + magic + "'");
  const long cols = std::stol(detail::next_token(is));
  const long rows = std::stol(detail::next_token(is));
  const long maxval = std::stol(detail::next_token(is));
  require(cols > 0 && rows > 0 && maxval > 0 && maxval < 65536, "pgm: bad header");
  RMatrix img(rows, cols);
  if (magic == "P2") {
    for (long r = 0; r < rows; ++r)
      for (long c = 0; c < cols; ++c) {
        const std::string tok = detail::next_token(is);
        require(!tok.empty(), "pgm: truncated data");
        img(r, c) = std::stod(tok) / static_cast<double>(maxval);
      }
  } else {
    const int bytes = maxval < 256 ? 1 : 2;
    for (long r = 0; r < rows; ++r)
      for (long c = 0; c < cols; ++c) {
        unsigned v = 0;
        for (int b = 0; b < bytes; ++b) {
          const int ch = is.get();
          require(ch != EOF, "pgm: truncated data");
          v = (v << 8) | static_cast<unsigned>(ch);
        }
        img(r, c) = static_cast<double>(v) / static_cast<double>(maxval);
      }
  }
  return img;
}

inline RMatrix read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "cannot open image: " + path);
  return read_pgm(f);
}

/// Writes an 8-bit P5 graymap; values clamped to [0, 1].
inline void write_pgm(std::ostream& os, const RMatrix& img) {
  os << "P5\n" << img.cols() << ' ' << img.rows() << "\n255\n";
  for (Index r = 0; r < img.rows(); ++r)
    for (Index c = 0; c < img.cols(); ++c) {
      const double v = std::clamp(img(r, c), 0.0, 1.0);
      os.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
}

inline void write_pgm(const std::string& path, const RMatrix& img) {
  std::ofstream f(path, std::ios::binary);
  require(f.good(), "cannot write image: " + path);
  write_pgm(f, img);
}

}  // namespace gim::io
