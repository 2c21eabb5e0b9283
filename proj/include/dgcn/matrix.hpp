#ifndef DGCN_MATRIX_HPP_
#define DGCN_MATRIX_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dgcn {

/// Dense row-major matrix of 64-bit reals.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// a * b. Throws ShapeError on mismatch; `what` names the operands in messages.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, const char* what = "matmul");
/// transpose(a) * b
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b, const char* what = "matmul_tn");
/// a * transpose(b)
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b, const char* what = "matmul_nt");

DenseMatrix transpose(const DenseMatrix& a);

/// max_ij |a_ij - b_ij|; shapes must match.
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

/// Text export: one row per line, space-separated, 17 significant digits.
void write_matrix_text(const DenseMatrix& m, const std::string& path);
void write_vector_text(const std::vector<double>& v, const std::string& path);

/// Locale-independent shortest round-trip formatting of a double.
std::string format_double(double v);
/// Locale-independent formatting with 17 significant digits.
std::string format_double17(double v);

} // namespace dgcn

#endif // DGCN_MATRIX_HPP_
