#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hdnn/core_types.hpp"

namespace hdnn {

/// Label column given by zero-based index or by header name.
using LabelColumn = std::variant<std::size_t, std::string>;

/// A parsed delimited file. Labels are dense ids in first-appearance order; label_names[id] is
/// the original text.
struct RawTable {
    std::vector<std::string> header;  // empty when the file has none
    std::size_t label_column = 0;
    Matrix rows;                      // feature columns only, label column removed
    std::vector<std::size_t> labels;
    std::vector<std::string> label_names;

    std::size_t num_classes() const noexcept { return label_names.size(); }
};

struct DelimitedOptions {
    char delimiter = ',';
    LabelColumn label_column = std::size_t{0};
    bool has_header = false;
};

RawTable parse_delimited(std::istream& in, const DelimitedOptions& opts);
RawTable load_delimited(const std::filesystem::path& path, const DelimitedOptions& opts);

/// Inverse of parse_delimited (labels written by name at the table's label column).
void write_delimited(std::ostream& out, const RawTable& table, char delimiter = ',');

/// Largest-remainder apportionment of `total` over groups of the given sizes; ties in the
/// fractional parts go to the lower group index.
std::vector<std::size_t> apportion(const std::vector<std::size_t>& group_sizes, std::size_t total);

struct Split {
    LabeledDataset train;
    LabeledDataset test;
    std::vector<std::size_t> train_rows;  // indices into the pooled table, ascending
    std::vector<std::size_t> test_rows;
    std::uint64_t seed = 0;
    std::vector<std::string> label_names;
};

/// Pools `a` and `b` (rows of b follow rows of a, labels matched by name) and draws a stratified
/// train/test split with per-class train counts given by apportion(). Every class needs at
/// least 2 training rows and 1 test row.
Split merge_and_split(const RawTable& a, const std::optional<RawTable>& b, std::size_t train_size, std::uint64_t seed);

/// Pools two tables with label ids unified by name.
RawTable merge_tables(const RawTable& a, const std::optional<RawTable>& b);

/// Text record of a split: "seed <s>" then one "class <name> train <i...> test <i...>" line per class.
void write_split_manifest(std::ostream& out, const Split& split);

}  // namespace hdnn
