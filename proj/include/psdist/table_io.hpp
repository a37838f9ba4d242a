// table_io.hpp - deterministic tabular output: CSV with a fixed column order
// and 12-significant-digit floats, and JSON with a meta header plus rows.

#pragma once

#include <string>
#include <variant>
#include <vector>

namespace psdist::io {

// empty cell, float, integer, or label
using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

// shortest round-trip-safe decimal with at most 12 significant digits,
// '.' separator; NaN renders as an empty string
std::string format_double(double v);

// header row + one line per row, '\n' endings, RFC-style quoting for labels
std::string to_csv(const Table& table);

// {"meta": {...}, "rows": [{column: value, ...}, ...]}; meta keys keep the
// given order, numbers render exactly like the CSV
std::string to_json(const Table& table,
                    const std::vector<std::pair<std::string, Cell>>& meta);

}  // namespace psdist::io
