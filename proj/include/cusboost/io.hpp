#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cusboost/dataset.hpp"

namespace cusboost {

// KEEL .dat reader. Header keywords are case-insensitive; whitespace around
// commas is ignored. The @outputs attribute (or the last declared attribute
// when @outputs is absent) becomes the label. Missing-value tokens ("?") are
// rejected. Values outside a numeric attribute's declared range are accepted;
// a note is appended to `warnings` when given.
Dataset parse_keel(std::istream& in, const std::string& name = "",
                   std::vector<std::string>* warnings = nullptr);

// Inverse of parse_keel for round-tripping: re-parsing the output yields an
// identical Dataset. Numeric values are printed with max_digits10 precision.
void write_keel(const Dataset& ds, std::ostream& out);

// Delimited text. The first row is treated as a header when all of its tokens
// are non-numeric while at least one column is numeric over the remaining
// rows. Columns containing any non-numeric token become categorical. A
// label_column of nullopt means the last column.
Dataset parse_delimited(std::istream& in, char delimiter,
                        std::optional<std::size_t> label_column = {},
                        const std::string& name = "");

// Loads a dataset by extension: ".dat" -> KEEL, otherwise delimited with the
// separator sniffed from the first line (comma, semicolon or tab) and the
// label in the last column.
Dataset load_dataset(const std::string& path, std::vector<std::string>* warnings = nullptr);

} // namespace cusboost
