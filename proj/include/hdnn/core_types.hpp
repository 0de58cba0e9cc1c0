#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "hdnn/errors.hpp"

namespace hdnn {

enum class Metric { L1, L2, SquaredL2 };

std::string_view to_string(Metric m);
Metric parse_metric(std::string_view name);

/// Dense row-major matrix of doubles. Rows are points, columns are coordinates.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

    const std::vector<double>& data() const noexcept { return data_; }

    /// Rows selected by index, in the order given.
    Matrix select_rows(std::span<const std::size_t> indices) const;

    /// Rows of `top` followed by rows of `bottom`.
    static Matrix vstack(const Matrix& top, const Matrix& bottom);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct ClassLabel {
    std::size_t id = 0;

    friend auto operator<=>(const ClassLabel&, const ClassLabel&) = default;
};

/// Per-class lists of row indices, each in ascending row order.
using ClassMembers = std::vector<std::vector<std::size_t>>;

/// n x d points with dense labels 0..J-1. Every class is non-empty and J >= 2.
class LabeledDataset {
public:
    LabeledDataset(Matrix points, std::vector<std::size_t> labels, std::size_t num_classes);
    /// Infers J as max(label) + 1.
    LabeledDataset(Matrix points, std::vector<std::size_t> labels);

    const Matrix& points() const noexcept { return points_; }
    const std::vector<std::size_t>& labels() const noexcept { return labels_; }
    const std::vector<std::size_t>& class_counts() const noexcept { return counts_; }
    std::size_t num_classes() const noexcept { return counts_.size(); }
    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t dim() const noexcept { return points_.cols(); }
    std::size_t min_class_size() const;

    /// Rows by index, keeping J. Throws InvalidDataError if a class would become empty.
    LabeledDataset subset(std::span<const std::size_t> rows) const;
    /// All rows except `row`.
    LabeledDataset without_row(std::size_t row) const;

    friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

private:
    Matrix points_;
    std::vector<std::size_t> labels_;
    std::vector<std::size_t> counts_;
};

ClassMembers partition_by_class(const LabeledDataset& ds);
ClassMembers partition_by_class(std::span<const std::size_t> labels, std::size_t num_classes);

/// Inverse of partition_by_class.
std::vector<std::size_t> labels_from_partition(const ClassMembers& members);

/// The training columns visible to a classifier: all of them, or all but some held-out rows.
struct ActiveSet {
    ClassMembers by_class;
    std::vector<std::size_t> columns;  // ascending

    static ActiveSet all(std::span<const std::size_t> labels, std::size_t num_classes);
    ActiveSet without(std::size_t column) const;
    std::size_t min_class_size() const;
};

}  // namespace hdnn
