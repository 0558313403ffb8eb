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

#pragma once

#include <string>
#include <vector>

#include "kramers/grid.hpp"

namespace kramers {

// Shortest round-trip decimal form, so CSV bytes are a function of the values.
std::string format_number(double v);

struct Cell {
  std::string text;
  Cell(double v) : text(format_number(v)) {}
  Cell(int v) : text(std::to_string(v)) {}
  Cell(std::string s) : text(std::move(s)) {}
  Cell(const char* s) : text(s) {}
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(const std::vector<Cell>& row);
  int column(const std::string& name) const;  // throws IoError when absent
  double number(size_t row, const std::string& col) const;
};

void ensure_directory(const std::string& dir);
void write_csv(const std::string& path, const Table& table);
Table read_csv(const std::string& path);

// Long format, one row per (t_k, cell): t, cell_center, <density>, flux. The
// flux column holds the left-face flux of interval (t_{k-1}, t_k] (the initial
// boundary flux at k = 0); the right boundary face is no-flux.
void write_path_csv(const std::string& path, const DensityFluxPath& p, const std::string& density_name = "rho");
DensityFluxPath read_path_csv(const std::string& path);

// CSV with columns t, z.
void read_z_profile_csv(const std::string& path, std::vector<double>& t, std::vector<double>& z);

void write_text(const std::string& path, const std::string& text);

}  // namespace kramers
