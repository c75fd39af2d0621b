#include "gasket/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gasket/errors.hpp"
#include "gasket/hydro.hpp"

namespace gasket::io {

std::string fmt_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc{}) throw validation_error("cannot parse number '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s) {
  std::int64_t v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc{}) throw validation_error("cannot parse integer '" + s + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
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

std::string fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open input file '" + path + "'");
  std::uint64_t h = 14695981039346656037ULL;
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + hex;
}

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write file '" + path + "'");
  out << content;
  if (!out) throw validation_error("write failed for '" + path + "'");
}

void write_field_csv(const std::string& path, const GasketGraph& g, const Field& f) {
  require_same_level(g, f, "write_field_csv");
  std::string out = "index,i,j,value\n";
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const Address& a = g.address(v);
    out += std::to_string(v);
    out += ',';
    out += std::to_string(a.i);
    out += ',';
    out += std::to_string(a.j);
    out += ',';
    out += fmt_double(f[v]);
    out += '\n';
  }
  write_text_file(path, out);
}

namespace {

struct FieldRows {
  std::vector<std::array<std::int64_t, 3>> key;  // index, i, j
  std::vector<double> value;
};

FieldRows read_field_rows(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open field CSV '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw validation_error("empty field CSV '" + path + "'");
  FieldRows rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto parts = split_csv_line(line);
    if (parts.size() != 4)
      throw validation_error("field CSV '" + path + "': expected 4 columns");
    rows.key.push_back({parse_int(parts[0]), parse_int(parts[1]), parse_int(parts[2])});
    rows.value.push_back(parse_double(parts[3]));
  }
  return rows;
}

} // namespace

Field read_field_csv(const std::string& path, const GasketGraph& g) {
  const FieldRows rows = read_field_rows(path);
  if (rows.key.size() != static_cast<std::size_t>(g.vertex_count()))
    throw validation_error("field CSV '" + path + "': row count does not match level " +
                           std::to_string(g.level()));
  Field f = make_field(g);
  for (std::size_t r = 0; r < rows.key.size(); ++r) {
    const VertexId v = g.index_of(Address{rows.key[r][1], rows.key[r][2], g.level()});
    f[v] = rows.value[r];
  }
  return f;
}

Field read_coarse_field_csv(const std::string& path, int max_level) {
  const FieldRows rows = read_field_rows(path);
  for (int m = 0; m <= max_level; ++m) {
    if (static_cast<std::size_t>(expected_vertex_count(m)) != rows.key.size()) continue;
    const GasketGraph g = GasketGraph::build(m);
    Field f = make_field(g);
    bool ok = true;
    for (std::size_t r = 0; r < rows.key.size() && ok; ++r) {
      const VertexId v = g.find(Address{rows.key[r][1], rows.key[r][2], m});
      if (v < 0)
        ok = false;
      else
        f[v] = rows.value[r];
    }
    if (ok) return f;
  }
  throw validation_error("field CSV '" + path + "': rows do not form a gasket level");
}

void write_sequence_csv(const std::string& path, const std::vector<std::int64_t>& k,
                        const std::vector<double>& a, const std::vector<double>& b) {
  std::string out = "k,a,b\n";
  for (std::size_t r = 0; r < k.size(); ++r) {
    out += std::to_string(k[r]);
    out += ',';
    out += fmt_double(a[r]);
    out += ',';
    out += fmt_double(b[r]);
    out += '\n';
  }
  write_text_file(path, out);
}

} // namespace gasket::io

namespace gasket {

void write_hydro_csv(const std::string& path, const std::vector<HydroRow>& rows) {
  std::string out =
      "level,replicas,t,h1m_err_mean,h1m_err_se,h1m_init_mean,h1m_init_se,"
      "F_mean,F_se,G_mean,G_se,wall_s\n";
  for (const auto& r : rows) {
    out += std::to_string(r.level);
    out += ',';
    out += std::to_string(r.replicas);
    out += ',';
    out += io::fmt_double(r.t);
    out += ',';
    out += io::fmt_double(r.h1m_err_mean);
    out += ',';
    out += io::fmt_double(r.h1m_err_se);
    out += ',';
    out += io::fmt_double(r.h1m_init_mean);
    out += ',';
    out += io::fmt_double(r.h1m_init_se);
    out += ',';
    out += io::fmt_double(r.f_mean);
    out += ',';
    out += io::fmt_double(r.f_se);
    out += ',';
    out += io::fmt_double(r.g_mean);
    out += ',';
    out += io::fmt_double(r.g_se);
    out += ',';
    out += io::fmt_double(r.wall_s);
    out += '\n';
  }
  io::write_text_file(path, out);
}

std::vector<HydroRow> read_hydro_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open hydro CSV '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw validation_error("empty hydro CSV");
  std::vector<HydroRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto p = io::split_csv_line(line);
    if (p.size() != 12) throw validation_error("hydro CSV: expected 12 columns");
    HydroRow r;
    r.level = static_cast<int>(io::parse_int(p[0]));
    r.replicas = static_cast<int>(io::parse_int(p[1]));
    r.t = io::parse_double(p[2]);
    r.h1m_err_mean = io::parse_double(p[3]);
    r.h1m_err_se = io::parse_double(p[4]);
    r.h1m_init_mean = io::parse_double(p[5]);
    r.h1m_init_se = io::parse_double(p[6]);
    r.f_mean = io::parse_double(p[7]);
    r.f_se = io::parse_double(p[8]);
    r.g_mean = io::parse_double(p[9]);
    r.g_se = io::parse_double(p[10]);
    r.wall_s = io::parse_double(p[11]);
    rows.push_back(r);
  }
  return rows;
}

} // namespace gasket
