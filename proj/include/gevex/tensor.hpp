#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gevex {

// Dense 2-D tensor of doubles, row-major. Every public constructor rejects
// non-finite entries; evaluation code uses the raw() factory and runs its own
// finiteness check so it can name the operation that produced the bad value.
class Tensor {
public:
    Tensor() : rows_(0), cols_(0) {}

    Tensor(int rows, int cols);                              // zeros
    Tensor(int rows, int cols, std::vector<double> data);    // validates

    static Tensor zeros(int rows, int cols) { return Tensor(rows, cols); }
    static Tensor ones(int rows, int cols);
    static Tensor identity(int n);
    static Tensor filled(int rows, int cols, double v);
    static Tensor from_rows(const std::vector<std::vector<double>>& rows);

    // No finiteness check; callers are expected to validate afterwards.
    static Tensor raw(int rows, int cols, std::vector<double> data);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& at(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double at(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    const std::vector<double>& vec() const { return data_; }

    bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool all_finite() const;

    std::string shape_str() const;

private:
    int rows_, cols_;
    std::vector<double> data_;
};

bool bitwise_equal(const Tensor& a, const Tensor& b);
double max_abs_diff(const Tensor& a, const Tensor& b);

} // namespace gevex
