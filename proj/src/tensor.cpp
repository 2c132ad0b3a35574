#include "gevex/tensor.hpp"

#include "gevex/errors.hpp"

#include <cmath>
#include <cstdlib>

namespace gevex {

Tensor::Tensor(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0)
        throw ShapeError("tensor shape must be non-negative, got " + shape_str());
    data_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

Tensor::Tensor(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows < 0 || cols < 0)
        throw ShapeError("tensor shape must be non-negative, got " + shape_str());
    if (data_.size() != static_cast<std::size_t>(rows) * cols)
        throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_str());
    if (!all_finite())
        throw NumericError("tensor constructed with non-finite entry");
}

Tensor Tensor::ones(int rows, int cols) { return filled(rows, cols, 1.0); }

Tensor Tensor::filled(int rows, int cols, double v) {
    Tensor t(rows, cols);
    for (auto& x : t.data_) x = v;
    if (!t.all_finite()) throw NumericError("tensor filled with non-finite value");
    return t;
}

Tensor Tensor::identity(int n) {
    Tensor t(n, n);
    for (int i = 0; i < n; ++i) t.at(i, i) = 1.0;
    return t;
}

Tensor Tensor::from_rows(const std::vector<std::vector<double>>& rows) {
    int r = static_cast<int>(rows.size());
    int c = r > 0 ? static_cast<int>(rows[0].size()) : 0;
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(r) * c);
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != c)
            throw ShapeError("ragged row list passed to Tensor::from_rows");
        data.insert(data.end(), row.begin(), row.end());
    }
    return Tensor(r, c, std::move(data));
}

Tensor Tensor::raw(int rows, int cols, std::vector<double> data) {
    Tensor t;
    t.rows_ = rows;
    t.cols_ = cols;
    t.data_ = std::move(data);
    return t;
}

bool Tensor::all_finite() const {
    for (double x : data_)
        if (!std::isfinite(x)) return false;
    return true;
}

std::string Tensor::shape_str() const {
    return "(" + std::to_string(rows_) + "," + std::to_string(cols_) + ")";
}

bool bitwise_equal(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.vec()[i] != b.vec()[i]) return false;
    return true;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b))
        throw ShapeError("max_abs_diff on mismatched shapes " + a.shape_str() + " vs " + b.shape_str());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::fabs(a.vec()[i] - b.vec()[i]));
    return m;
}

} // namespace gevex
