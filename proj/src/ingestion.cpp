#include "hdnn/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "hdnn/datagen.hpp"

namespace hdnn {

namespace {

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
    std::vector<std::string_view> fields;
    if (delimiter == ' ' || delimiter == '\t') {
        // whitespace-separated: runs of blanks count as one separator
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
            if (i >= line.size()) break;
            std::size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
            fields.push_back(line.substr(i, j - i));
            i = j;
        }
        return fields;
    }
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty() || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

RawTable parse_delimited(std::istream& in, const DelimitedOptions& opts) {
    RawTable table;
    std::map<std::string, std::size_t, std::less<>> label_ids;
    std::vector<double> values;
    std::size_t n_fields = 0;
    std::size_t n_rows = 0;
    bool label_resolved = false;
    std::size_t line_no = 0;
    std::string line;

    auto resolve_label = [&](std::size_t fields_in_row, std::size_t line_number) {
        if (const auto* idx = std::get_if<std::size_t>(&opts.label_column)) {
            if (*idx >= fields_in_row) {
                throw ParseError("label column " + std::to_string(*idx) + " is out of range for " +
                                     std::to_string(fields_in_row) + " columns",
                                 line_number, *idx + 1);
            }
            table.label_column = *idx;
        } else {
            const auto& name = std::get<std::string>(opts.label_column);
            const auto it = std::find(table.header.begin(), table.header.end(), name);
            if (it == table.header.end()) {
                throw ParseError("label column '" + name + "' not found in header", 1, 0);
            }
            table.label_column = static_cast<std::size_t>(it - table.header.begin());
        }
        label_resolved = true;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_fields(line, opts.delimiter);
        if (opts.has_header && table.header.empty() && n_rows == 0 && n_fields == 0) {
            for (auto f : fields) table.header.emplace_back(f);
            n_fields = fields.size();
            if (std::holds_alternative<std::string>(opts.label_column)) resolve_label(n_fields, line_no);
            continue;
        }
        if (n_fields == 0) n_fields = fields.size();
        if (fields.size() != n_fields) {
            throw ParseError("expected " + std::to_string(n_fields) + " fields, found " + std::to_string(fields.size()),
                             line_no, std::min(fields.size(), n_fields) + 1);
        }
        if (!label_resolved) resolve_label(n_fields, line_no);
        if (n_fields < 2) throw ParseError("a row needs a label and at least one feature", line_no, 1);

        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (c == table.label_column) continue;
            auto v = parse_number(fields[c]);
            if (!v) {
                throw ParseError("non-numeric feature value '" + std::string(fields[c]) + "'", line_no, c + 1);
            }
            values.push_back(*v);
        }
        const std::string label(fields[table.label_column]);
        auto [it, inserted] = label_ids.try_emplace(label, table.label_names.size());
        if (inserted) table.label_names.push_back(label);
        table.labels.push_back(it->second);
        ++n_rows;
    }
    if (n_rows == 0) throw ParseError("no data rows", line_no, 0);
    table.rows = Matrix(n_rows, n_fields - 1, std::move(values));
    return table;
}

RawTable load_delimited(const std::filesystem::path& path, const DelimitedOptions& opts) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    return parse_delimited(in, opts);
}

void write_delimited(std::ostream& out, const RawTable& table, char delimiter) {
    const char sep = delimiter;
    if (!table.header.empty()) {
        for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? std::string(1, sep) : "") << table.header[c];
        out << '\n';
    }
    const std::size_t width = table.rows.cols() + 1;
    char buf[64];
    for (std::size_t i = 0; i < table.rows.rows(); ++i) {
        std::size_t feature = 0;
        for (std::size_t c = 0; c < width; ++c) {
            if (c) out << sep;
            if (c == table.label_column) {
                out << table.label_names[table.labels[i]];
            } else {
                auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, table.rows(i, feature++));
                out.write(buf, ptr - buf);
            }
        }
        out << '\n';
    }
}

std::vector<std::size_t> apportion(const std::vector<std::size_t>& group_sizes, std::size_t total) {
    const std::size_t n = std::accumulate(group_sizes.begin(), group_sizes.end(), std::size_t{0});
    if (n == 0) throw ParameterError("cannot apportion over empty groups");
    if (total > n) throw ParameterError("cannot take " + std::to_string(total) + " of " + std::to_string(n) + " rows");
    std::vector<std::size_t> out(group_sizes.size());
    // exact integer arithmetic: quota_j = total * n_j / n = floor + remainder / n
    std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder numerator, group)
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < group_sizes.size(); ++j) {
        const std::size_t num = total * group_sizes[j];
        out[j] = num / n;
        assigned += out[j];
        remainders.emplace_back(num % n, j);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out[remainders[k].second];
    return out;
}

RawTable merge_tables(const RawTable& a, const std::optional<RawTable>& b) {
    if (!b) return a;
    if (a.rows.cols() != b->rows.cols()) {
        throw DimensionError("tables have " + std::to_string(a.rows.cols()) + " and " + std::to_string(b->rows.cols()) +
                             " feature columns");
    }
    RawTable pooled = a;
    pooled.rows = Matrix::vstack(a.rows, b->rows);
    std::map<std::string, std::size_t, std::less<>> ids;
    for (std::size_t j = 0; j < a.label_names.size(); ++j) ids[a.label_names[j]] = j;
    for (auto l : b->labels) {
        const auto& name = b->label_names[l];
        auto [it, inserted] = ids.try_emplace(name, pooled.label_names.size());
        if (inserted) pooled.label_names.push_back(name);
        pooled.labels.push_back(it->second);
    }
    return pooled;
}

Split merge_and_split(const RawTable& a, const std::optional<RawTable>& b, std::size_t train_size, std::uint64_t seed) {
    const RawTable pooled = merge_tables(a, b);
    const std::size_t n = pooled.labels.size();
    if (train_size >= n) {
        throw ParameterError("train size " + std::to_string(train_size) + " must be below the " + std::to_string(n) +
                             " pooled rows");
    }
    const std::size_t J = pooled.num_classes();
    if (J < 2) throw StratificationError("need at least two classes to split");
    auto members = partition_by_class(pooled.labels, J);
    std::vector<std::size_t> sizes(J);
    for (std::size_t j = 0; j < J; ++j) sizes[j] = members[j].size();
    const auto train_counts = apportion(sizes, train_size);

    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t j = 0; j < J; ++j) {
        if (train_counts[j] < 2) {
            throw StratificationError("class '" + pooled.label_names[j] + "' would get " +
                                      std::to_string(train_counts[j]) + " training rows; at least 2 are needed");
        }
        if (train_counts[j] >= sizes[j]) {
            throw StratificationError("class '" + pooled.label_names[j] + "' would have no test rows");
        }
        Rng rng(mix_seed({seed, 0x5EEDULL, j}));
        std::shuffle(members[j].begin(), members[j].end(), rng);
        train_rows.insert(train_rows.end(), members[j].begin(), members[j].begin() + static_cast<std::ptrdiff_t>(train_counts[j]));
        test_rows.insert(test_rows.end(), members[j].begin() + static_cast<std::ptrdiff_t>(train_counts[j]), members[j].end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());

    auto make = [&](const std::vector<std::size_t>& rows) {
        std::vector<std::size_t> labels;
        labels.reserve(rows.size());
        for (auto r : rows) labels.push_back(pooled.labels[r]);
        return LabeledDataset(pooled.rows.select_rows(rows), std::move(labels), J);
    };
    return Split{make(train_rows), make(test_rows), std::move(train_rows), std::move(test_rows), seed,
                 pooled.label_names};
}

void write_split_manifest(std::ostream& out, const Split& split) {
    out << "seed " << split.seed << '\n';
    const std::size_t J = split.label_names.size();
    std::vector<std::vector<std::size_t>> train(J), test(J);
    for (std::size_t k = 0; k < split.train_rows.size(); ++k) train[split.train.labels()[k]].push_back(split.train_rows[k]);
    for (std::size_t k = 0; k < split.test_rows.size(); ++k) test[split.test.labels()[k]].push_back(split.test_rows[k]);
    for (std::size_t j = 0; j < J; ++j) {
        out << "class " << split.label_names[j] << " train";
        for (auto r : train[j]) out << ' ' << r;
        out << " test";
        for (auto r : test[j]) out << ' ' << r;
        out << '\n';
    }
}

}  // namespace hdnn
