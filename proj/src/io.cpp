// SPDX-License-Identifier: Apache-2.0

#include "edc/io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace edc::io {

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw std::invalid_argument("Table: row width " + std::to_string(row.size()) +
                                    " does not match " + std::to_string(columns.size()) +
                                    " columns");
    rows.push_back(std::move(row));
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string csv_cell(const Cell& cell) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, cell);
}

nlohmann::ordered_json json_cell(const Cell& cell) {
    struct Visitor {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(double v) const { return v; }
        nlohmann::ordered_json operator()(long long v) const { return v; }
        nlohmann::ordered_json operator()(bool v) const { return v; }
        nlohmann::ordered_json operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, cell);
}

}  // namespace

void write_csv(const Table& table, std::ostream& out) {
    out << "# schema=" << kSchemaVersion << "\n";
    for (size_t i = 0; i < table.columns.size(); ++i)
        out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "");
    out << "\n";
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i)
            out << csv_cell(row[i]) << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
}

void write_json(const Table& table, std::ostream& out) {
    nlohmann::ordered_json doc;
    doc["schema"] = kSchemaVersion;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj;
        for (size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = json_cell(row[i]);
        doc["rows"].push_back(std::move(obj));
    }
    out << doc.dump(2) << "\n";
}

std::string render(const Table& table, Format format) {
    std::ostringstream out;
    if (format == Format::Csv)
        write_csv(table, out);
    else
        write_json(table, out);
    return out.str();
}

void write_output(const Table& table, Format format, const std::string& path) {
    const std::string body = render(table, format);
    if (path.empty()) {
        std::cout << body;
        std::cout.flush();
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    file << body;
    if (!file) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace edc::io
