#include "hdnn/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hdnn {

std::string_view to_string(Metric m) {
    switch (m) {
        case Metric::L1: return "L1";
        case Metric::L2: return "L2";
        case Metric::SquaredL2: return "SquaredL2";
    }
    return "?";
}

Metric parse_metric(std::string_view name) {
    if (name == "L1" || name == "l1") return Metric::L1;
    if (name == "L2" || name == "l2") return Metric::L2;
    if (name == "SquaredL2" || name == "sql2" || name == "squared_l2") return Metric::SquaredL2;
    throw ParameterError("unknown metric '" + std::string(name) + "'");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw DimensionError("matrix data has " + std::to_string(data_.size()) + " entries, expected " +
                             std::to_string(rows * cols));
    }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    const std::size_t cols = rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) {
            throw DimensionError("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                                 " entries, expected " + std::to_string(cols));
        }
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= rows_) throw DimensionError("row index out of range");
        auto src = row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Matrix Matrix::vstack(const Matrix& top, const Matrix& bottom) {
    if (top.empty()) return bottom;
    if (bottom.empty()) return top;
    if (top.cols() != bottom.cols()) throw DimensionError("vstack: column counts differ");
    std::vector<double> data;
    data.reserve(top.data_.size() + bottom.data_.size());
    data.insert(data.end(), top.data_.begin(), top.data_.end());
    data.insert(data.end(), bottom.data_.begin(), bottom.data_.end());
    return Matrix(top.rows() + bottom.rows(), top.cols(), std::move(data));
}

LabeledDataset::LabeledDataset(Matrix points, std::vector<std::size_t> labels, std::size_t num_classes)
    : points_(std::move(points)), labels_(std::move(labels)), counts_(num_classes, 0) {
    if (num_classes < 2) throw InvalidDataError("a labeled dataset needs at least two classes");
    if (points_.rows() != labels_.size()) {
        throw DimensionError("dataset has " + std::to_string(points_.rows()) + " rows but " +
                             std::to_string(labels_.size()) + " labels");
    }
    if (points_.cols() < 1) throw DimensionError("dataset dimension must be at least 1");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] >= num_classes) {
            throw InvalidDataError("label " + std::to_string(labels_[i]) + " at row " + std::to_string(i) +
                                   " is outside 0.." + std::to_string(num_classes - 1));
        }
        ++counts_[labels_[i]];
    }
    for (std::size_t j = 0; j < num_classes; ++j) {
        if (counts_[j] == 0) throw InvalidDataError("class " + std::to_string(j) + " has no rows");
    }
    for (std::size_t k = 0; k < points_.data().size(); ++k) {
        if (!std::isfinite(points_.data()[k])) {
            throw InvalidDataError("non-finite coordinate at row " + std::to_string(k / points_.cols()) +
                                   ", column " + std::to_string(k % points_.cols()));
        }
    }
}

namespace {
std::size_t infer_classes(const std::vector<std::size_t>& labels) {
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}
}  // namespace

LabeledDataset::LabeledDataset(Matrix points, std::vector<std::size_t> labels)
    : LabeledDataset(std::move(points), labels, infer_classes(labels)) {}

std::size_t LabeledDataset::min_class_size() const {
    return *std::min_element(counts_.begin(), counts_.end());
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
    std::vector<std::size_t> labels;
    labels.reserve(rows.size());
    for (auto r : rows) {
        if (r >= size()) throw DimensionError("subset row index out of range");
        labels.push_back(labels_[r]);
    }
    return LabeledDataset(points_.select_rows(rows), std::move(labels), num_classes());
}

LabeledDataset LabeledDataset::without_row(std::size_t row) const {
    std::vector<std::size_t> keep;
    keep.reserve(size() - 1);
    for (std::size_t i = 0; i < size(); ++i) {
        if (i != row) keep.push_back(i);
    }
    return subset(keep);
}

ClassMembers partition_by_class(std::span<const std::size_t> labels, std::size_t num_classes) {
    ClassMembers members(num_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
    return members;
}

ClassMembers partition_by_class(const LabeledDataset& ds) {
    return partition_by_class(ds.labels(), ds.num_classes());
}

std::vector<std::size_t> labels_from_partition(const ClassMembers& members) {
    std::size_t n = 0;
    for (const auto& m : members) n += m.size();
    std::vector<std::size_t> labels(n);
    for (std::size_t j = 0; j < members.size(); ++j) {
        for (auto i : members[j]) labels.at(i) = j;
    }
    return labels;
}

ActiveSet ActiveSet::all(std::span<const std::size_t> labels, std::size_t num_classes) {
    ActiveSet a;
    a.by_class = partition_by_class(labels, num_classes);
    a.columns.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) a.columns[i] = i;
    return a;
}

ActiveSet ActiveSet::without(std::size_t column) const {
    ActiveSet a;
    a.by_class.reserve(by_class.size());
    for (const auto& cls : by_class) {
        auto& out = a.by_class.emplace_back();
        out.reserve(cls.size());
        for (auto c : cls) {
            if (c != column) out.push_back(c);
        }
    }
    a.columns.reserve(columns.size());
    for (auto c : columns) {
        if (c != column) a.columns.push_back(c);
    }
    return a;
}

std::size_t ActiveSet::min_class_size() const {
    std::size_t m = by_class.empty() ? 0 : by_class.front().size();
    for (const auto& cls : by_class) m = std::min(m, cls.size());
    return m;
}

}  // namespace hdnn
