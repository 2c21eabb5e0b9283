#include "dgcn/matrix.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dgcn/error.hpp"

namespace dgcn {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool DenseMatrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

namespace {

[[noreturn]] void shape_fail(const char* what, std::size_t ar, std::size_t ac,
                             std::size_t br, std::size_t bc) {
    std::ostringstream os;
    os << what << ": incompatible shapes " << ar << "x" << ac << " and " << br << "x" << bc;
    throw ShapeError(os.str());
}

} // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
    if (a.cols() != b.rows()) shape_fail(what, a.rows(), a.cols(), b.rows(), b.cols());
    DenseMatrix c(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.data() + i * a.cols();
        double* crow = c.data() + i * n;
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue; // sparse-ish operands are common here
            const double* brow = b.data() + k * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
    if (a.rows() != b.rows()) shape_fail(what, a.cols(), a.rows(), b.rows(), b.cols());
    DenseMatrix c(a.cols(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* arow = a.data() + k * a.cols();
        const double* brow = b.data() + k * n;
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            double* crow = c.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += aki * brow[j];
        }
    }
    return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
    if (a.cols() != b.cols()) shape_fail(what, a.rows(), a.cols(), b.cols(), b.rows());
    DenseMatrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.data() + i * a.cols();
        double* crow = c.data() + i * b.rows();
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.data() + j * b.cols();
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += arow[k] * brow[k];
            crow[j] = acc;
        }
    }
    return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        shape_fail("max_abs_diff", a.rows(), a.cols(), b.rows(), b.cols());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_double17(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_matrix_text(const DenseMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << format_double17(m(i, j));
        }
        out << '\n';
    }
}

void write_vector_text(const std::vector<double>& v, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    for (double x : v) out << format_double17(x) << '\n';
}

} // namespace dgcn
