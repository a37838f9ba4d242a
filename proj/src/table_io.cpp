#include "psdist/table_io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace psdist::io {

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string cell_to_csv(const Cell& cell) {
    if (std::holds_alternative<std::monostate>(cell)) return "";
    if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
    return csv_escape(std::get<std::string>(cell));
}

nlohmann::ordered_json cell_to_json(const Cell& cell) {
    if (std::holds_alternative<std::monostate>(cell)) return nullptr;
    if (const auto* d = std::get_if<double>(&cell)) {
        if (std::isnan(*d)) return nullptr;
        return *d;
    }
    if (const auto* i = std::get_if<long long>(&cell)) return *i;
    return std::get<std::string>(cell);
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general, 12);
    if (res.ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += csv_escape(table.columns[c]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw std::invalid_argument("to_csv: row width does not match header");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += cell_to_csv(row[c]);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const Table& table,
                    const std::vector<std::pair<std::string, Cell>>& meta) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json jmeta = nlohmann::ordered_json::object();
    for (const auto& [key, value] : meta) jmeta[key] = cell_to_json(value);
    j["meta"] = std::move(jmeta);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw std::invalid_argument("to_json: row width does not match header");
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < row.size(); ++c)
            obj[table.columns[c]] = cell_to_json(row[c]);
        rows.push_back(std::move(obj));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

}  // namespace psdist::io
