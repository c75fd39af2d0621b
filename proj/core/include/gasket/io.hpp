#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gasket/field.hpp"
#include "gasket/graph.hpp"

namespace gasket::io {

// Shortest round-trip decimal form, '.' decimal point, no locale involvement.
std::string fmt_double(double v);
double parse_double(const std::string& s);
std::int64_t parse_int(const std::string& s);

// Split one CSV record (no quoting in any of our formats).
std::vector<std::string> split_csv_line(const std::string& line);

std::string fnv1a64_file(const std::string& path);  // "fnv1a64:<16 hex>"
std::string iso8601_utc_now();

// field CSV: "index,i,j,value" rows in vertex order, LF endings
void write_field_csv(const std::string& path, const GasketGraph& g, const Field& f);
Field read_field_csv(const std::string& path, const GasketGraph& g);

// coarse field with the level inferred from the row count / addresses
Field read_coarse_field_csv(const std::string& path, int max_level = 12);

// iterate CSV: "k,a,b"
void write_sequence_csv(const std::string& path, const std::vector<std::int64_t>& k,
                        const std::vector<double>& a, const std::vector<double>& b);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace gasket::io
