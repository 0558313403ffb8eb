/* Copyright 2026 The kramers-lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#include "kramers/io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kramers/errors.hpp"

namespace kramers {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  double v = 0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && *b == ' ') ++b;
  if (b < e && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) {
    if (s == "nan") return NAN;
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    throw IoError(fmt::format("{}: cannot parse '{}' as a number", where, s));
  }
  return v;
}

}  // namespace

std::string format_number(double v) { return fmt::format("{}", v); }

void Table::add(const std::vector<Cell>& row) {
  if (row.size() != columns.size())
    throw IoError(fmt::format("table {}: row has {} cells, expected {}", name, row.size(), columns.size()));
  std::vector<std::string> r;
  r.reserve(row.size());
  for (const auto& c : row) r.push_back(c.text);
  rows.push_back(std::move(r));
}

int Table::column(const std::string& col) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == col) return static_cast<int>(i);
  throw IoError(fmt::format("table {}: no column '{}'", name, col));
}

double Table::number(size_t row, const std::string& col) const {
  return parse_number(rows.at(row).at(column(col)), name + "." + col);
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create directory {}: {}", dir, ec.message()));
}

void write_csv(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& r : table.rows) {
    for (size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  Table t;
  t.name = path;
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file, expected a header row");
  t.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto r = split(line);
    if (r.size() != t.columns.size())
      throw IoError(fmt::format("{}: row {} has {} fields, header has {}", path, t.rows.size() + 2, r.size(),
                                t.columns.size()));
    t.rows.push_back(std::move(r));
  }
  return t;
}

void write_path_csv(const std::string& path, const DensityFluxPath& p, const std::string& density_name) {
  p.check_shape();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "t,cell_center," << density_name << ",flux\n";
  const int n = p.grid.cells();
  for (int k = 0; k <= p.steps(); ++k)
    for (int i = 0; i < n; ++i)
      out << format_number(p.t[k]) << ',' << format_number(p.grid.center(i)) << ',' << format_number(p.rho[k][i])
          << ',' << format_number(p.flux[k][i]) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

DensityFluxPath read_path_csv(const std::string& path) {
  Table tab = read_csv(path);
  if (tab.columns.size() != 4 || tab.columns[0] != "t" || tab.columns[1] != "cell_center" || tab.columns[3] != "flux")
    throw IoError(path + ": expected columns t,cell_center,<density>,flux");
  DensityFluxPath p;
  std::vector<double> centers;
  for (size_t r = 0; r < tab.rows.size(); ++r) {
    double t = parse_number(tab.rows[r][0], path);
    double c = parse_number(tab.rows[r][1], path);
    if (p.t.empty() || t != p.t.back()) {
      if (!p.t.empty() && p.rho.back().size() != centers.size())
        throw IoError(fmt::format("{}: slice at t = {} has a different cell count", path, p.t.back()));
      p.t.push_back(t);
      p.rho.emplace_back();
      p.flux.emplace_back();
    }
    if (p.t.size() == 1) centers.push_back(c);
    p.rho.back().push_back(parse_number(tab.rows[r][2], path));
    p.flux.back().push_back(parse_number(tab.rows[r][3], path));
  }
  if (p.t.empty()) throw IoError(path + ": no rows");
  for (auto& f : p.flux) f.push_back(0.0);
  p.grid = Grid1D::from_centers(centers);
  p.check_shape();
  return p;
}

void read_z_profile_csv(const std::string& path, std::vector<double>& t, std::vector<double>& z) {
  Table tab = read_csv(path);
  t.clear();
  z.clear();
  for (size_t r = 0; r < tab.rows.size(); ++r) {
    t.push_back(tab.number(r, "t"));
    z.push_back(tab.number(r, "z"));
  }
  if (t.size() < 2) throw IoError(path + ": need at least two rows");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace kramers
