#pragma once

// Text formats: the "symtri v1" matrix exchange format, the fit-result
// record, and the flat key-value configuration file.
//
// symtri v1 layout: first line is the node count n; then one line per pair
// (i, j), i < j, in lexicographic order, holding that entry as decimal text.

#include <netml/common.hpp>
#include <netml/fit.hpp>
#include <netml/sym_matrix.hpp>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace netml {

namespace detail {

// Shortest decimal form that round-trips a double exactly.
inline std::string round_trip_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double back = 0.0;
  std::sscanf(buf, "%lf", &back);
  if (back == v) {
    for (int prec = 1; prec <= 16; ++prec) {
      char shorter[40];
      std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
      std::sscanf(shorter, "%lf", &back);
      if (back == v) return shorter;
    }
  }
  return buf;
}

inline double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " from '" + text + "'");
  }
}

inline long parse_long(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " from '" + text + "'");
  }
}

}  // namespace detail

inline void write_symtri(const std::string& path,
                         const SymZeroDiagMatrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << m.n() << "\n";
  for (std::int64_t t = 0; t < m.pairs(); ++t)
    out << detail::round_trip_double(m.at_pair(t)) << "\n";
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline SymZeroDiagMatrix read_symtri(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("'" + path + "': missing node count line");
  const long n = detail::parse_long(line, "node count in '" + path + "'");
  if (n < 2) throw std::runtime_error("'" + path + "': node count must be >= 2");
  SymZeroDiagMatrix m(static_cast<int>(n));
  for (std::int64_t t = 0; t < m.pairs(); ++t) {
    if (!std::getline(in, line))
      throw std::runtime_error("'" + path + "': expected " +
                               std::to_string(m.pairs()) +
                               " entries, found " + std::to_string(t));
    m.set_pair(t, detail::parse_double(line, "entry in '" + path + "'"));
  }
  while (std::getline(in, line))
    if (!line.empty())
      throw std::runtime_error("'" + path + "': trailing content after " +
                               std::to_string(m.pairs()) + " entries");
  return m;
}

// Structured text record of a fit: the labeling, the block probabilities
// row by row, the objective value, and convergence diagnostics.
inline void write_fit_record(std::ostream& out, const FitResult& r) {
  out << "labeling";
  for (int i = 0; i < r.model.n(); ++i) out << ' ' << r.model.z[i];
  out << "\n";
  const int k = r.model.q.k();
  for (int a = 1; a <= k; ++a) {
    out << "q";
    for (int b = 1; b <= k; ++b)
      out << ' ' << detail::round_trip_double(r.model.q(a, b));
    out << "\n";
  }
  out << "objective " << detail::round_trip_double(r.objective_value) << "\n";
  out << "converged " << (r.converged ? 1 : 0) << "\n";
  out << "restarts_used " << r.n_restarts_used << "\n";
  out << "sweeps " << r.n_sweeps << "\n";
}

inline void write_fit_record(const std::string& path, const FitResult& r) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_fit_record(out, r);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

// Flat key-value configuration: one `key = value` per line, keys use dotted
// sections, '#' starts a comment, blank lines ignored.  Duplicate keys are
// rejected.  Values may be lists (whitespace- or comma-separated).
class Config {
 public:
  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
  }

  static Config parse_text(const std::string& text,
                           const std::string& origin = "<config>") {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": expected 'key = value'");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": empty key");
      if (!cfg.values_.emplace(key, value).second)
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": duplicate key '" + key + "'");
    }
    return cfg;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    mark_used(key);
    return it->second;
  }

  std::string get_or(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    mark_used(key);
    return it->second;
  }

  double get_double(const std::string& key) const {
    return detail::parse_double(get(key), "config key '" + key + "'");
  }
  double get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }
  long get_long(const std::string& key) const {
    return detail::parse_long(get(key), "config key '" + key + "'");
  }
  long get_long_or(const std::string& key, long fallback) const {
    return has(key) ? get_long(key) : fallback;
  }

  std::vector<double> get_list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& tok : tokens(get(key)))
      out.push_back(detail::parse_double(tok, "config key '" + key + "'"));
    if (out.empty()) throw ConfigError("config key '" + key + "' is empty");
    return out;
  }

  std::vector<long> get_int_list(const std::string& key) const {
    std::vector<long> out;
    for (const std::string& tok : tokens(get(key)))
      out.push_back(detail::parse_long(tok, "config key '" + key + "'"));
    if (out.empty()) throw ConfigError("config key '" + key + "' is empty");
    return out;
  }

  // Keys never read by the consumer, to catch typos in config files.
  std::vector<std::string> unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [key, value] : values_)
      if (used_.count(key) == 0) out.push_back(key);
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
  }

  static std::vector<std::string> tokens(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  }

  void mark_used(const std::string& key) const { used_.insert(key); }

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace netml
