#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dgcn/error.hpp"
#include "dgcn/matrix.hpp"
#include "dgcn/rng.hpp"

using namespace dgcn;

namespace {

DenseMatrix random_matrix(Rng& rng, std::size_t r, std::size_t c, double zero_frac) {
    DenseMatrix m(r, c);
    for (std::size_t i = 0; i < m.size(); ++i)
        m.data()[i] = rng.bernoulli(zero_frac) ? 0.0 : rng.uniform(-2.0, 2.0);
    return m;
}

// reference product without the zero-skipping fast path
DenseMatrix naive_matmul(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    return c;
}

} // namespace

TEST_CASE("matmul variants agree with the naive reference") {
    Rng rng(321);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t m = 1 + rng.uniform_int(12);
        const std::size_t k = 1 + rng.uniform_int(12);
        const std::size_t n = 1 + rng.uniform_int(12);
        const double zf = rng.uniform(0.0, 0.8); // exercise the zero-skip path
        const DenseMatrix a = random_matrix(rng, m, k, zf);
        const DenseMatrix b = random_matrix(rng, k, n, zf);

        CHECK(max_abs_diff(matmul(a, b), naive_matmul(a, b)) <= 1e-12);
        CHECK(max_abs_diff(matmul_tn(transpose(a), b), naive_matmul(a, b)) <= 1e-12);
        CHECK(max_abs_diff(matmul_nt(a, transpose(b)), naive_matmul(a, b)) <= 1e-12);
    }
}

TEST_CASE("matmul rejects mismatched shapes") {
    const DenseMatrix a(2, 3), b(4, 2);
    CHECK_THROWS_AS(matmul(a, b), ShapeError);
    CHECK_THROWS_AS(matmul_tn(a, b), ShapeError);
    CHECK_THROWS_AS(matmul_nt(a, b), ShapeError);
}

TEST_CASE("identity is neutral for matmul") {
    Rng rng(11);
    const DenseMatrix a = random_matrix(rng, 5, 5, 0.3);
    CHECK(max_abs_diff(matmul(DenseMatrix::identity(5), a), a) == 0.0);
    CHECK(max_abs_diff(matmul(a, DenseMatrix::identity(5)), a) == 0.0);
}

TEST_CASE("matrix text export round-trips at 17 significant digits") {
    Rng rng(77);
    const DenseMatrix m = random_matrix(rng, 4, 3, 0.2);
    const auto path = std::filesystem::temp_directory_path() / "dgcn_t_mat.txt";
    write_matrix_text(m, path.string());

    std::ifstream in(path);
    DenseMatrix back(4, 3);
    for (std::size_t i = 0; i < back.size(); ++i) REQUIRE((in >> back.data()[i]));
    CHECK(max_abs_diff(m, back) == 0.0);
}

TEST_CASE("format_double round-trips exactly") {
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        const double v = rng.uniform(-1e6, 1e6) * std::pow(10.0, rng.uniform(-12, 12));
        CHECK(std::stod(format_double(v)) == v);
        CHECK(std::stod(format_double17(v)) == v);
    }
}

TEST_CASE("all_finite flags bad entries") {
    DenseMatrix m(2, 2, 1.0);
    CHECK(m.all_finite());
    m(1, 1) = std::numeric_limits<double>::infinity();
    CHECK_FALSE(m.all_finite());
}
