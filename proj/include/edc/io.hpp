// SPDX-License-Identifier: Apache-2.0
//
// Deterministic tabular output. CSV and JSON are rendered from the same
// in-memory table; doubles are always printed with 17 significant digits so
// repeated runs produce byte-identical files.

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace edc::io {

inline constexpr int kSchemaVersion = 1;

/// One table cell; monostate renders as an empty CSV field / JSON null.
using Cell = std::variant<std::monostate, double, long long, bool, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

enum class Format { Csv, Json };

/// Shortest-of-17-significant-digits rendering, locale independent.
std::string format_double(double v);

void write_csv(const Table& table, std::ostream& out);
void write_json(const Table& table, std::ostream& out);
std::string render(const Table& table, Format format);

/// Writes to the path in binary mode, or to stdout when path is empty.
void write_output(const Table& table, Format format, const std::string& path);

}  // namespace edc::io
