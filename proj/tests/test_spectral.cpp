#include <doctest.h>

#include <cmath>

#include "dgcn/error.hpp"
#include "dgcn/spectral.hpp"
#include "test_support.hpp"

using namespace dgcn;

namespace {

DirectedGraph looped_cycle3() {
    return add_self_loops(
        DirectedGraph::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}}));
}

double row_sum(const TransitionMatrix& p, int row) {
    double s = 0.0;
    for (std::size_t k = p.row_ptr[static_cast<std::size_t>(row)];
         k < p.row_ptr[static_cast<std::size_t>(row) + 1]; ++k)
        s += p.val[k];
    return s;
}

} // namespace

TEST_CASE("transition_matrix: self-looped 3-cycle rows") {
    const TransitionMatrix p = transition_matrix(looped_cycle3());
    const DenseMatrix d = p.to_dense();
    const double expect[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(d(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) ==
                  expect[i][j]);
}

TEST_CASE("transition_matrix: single self-looped node") {
    const DirectedGraph g = add_self_loops(DirectedGraph::from_edges(1, {}));
    const TransitionMatrix p = transition_matrix(g);
    CHECK(p.to_dense()(0, 0) == 1.0);
}

TEST_CASE("transition_matrix: weights normalize proportionally") {
    // 0 -> 1 with weight 3 plus a unit self-loop: row 0 = [1/4, 3/4]
    const DirectedGraph g =
        add_self_loops(DirectedGraph::from_edges(2, {{0, 1, 3.0}, {1, 0, 1.0}}));
    const DenseMatrix d = transition_matrix(g).to_dense();
    CHECK(d(0, 0) == 0.25);
    CHECK(d(0, 1) == 0.75);
}

TEST_CASE("transition_matrix: zero out-degree is rejected") {
    const DirectedGraph g = DirectedGraph::from_edges(2, {{0, 1, 1.0}});
    CHECK_THROWS_AS(transition_matrix(g), ValidationError);
}

TEST_CASE("transition_matrix: rows sum to 1 within 1e-12 on random graphs") {
    Rng rng(31337);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(40));
        const DirectedGraph g =
            add_self_loops(testing::random_strongly_connected(rng, n, 0.15, true));
        const TransitionMatrix p = transition_matrix(g);
        for (int i = 0; i < n; ++i) CHECK(std::abs(row_sum(p, i) - 1.0) <= 1e-12);
    }
}

TEST_CASE("perron_vector: cyclic symmetry forces the uniform distribution") {
    const PerronVector pv = perron_vector(transition_matrix(looped_cycle3()));
    for (double v : pv.phi) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(pv.residual <= 1e-12);
    CHECK(pv.iterations >= 1);
}

TEST_CASE("perron_vector: symmetric graph gives degree-proportional entries") {
    // path 0 -- 1 -- 2 with both arc directions, then self-loops
    const DirectedGraph g = add_self_loops(DirectedGraph::from_edges(
        3, {{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}, {2, 1, 1.0}}));
    const PerronVector pv = perron_vector(transition_matrix(g));
    // self-looped degrees: 2, 3, 2 -> phi = degree / 7
    CHECK(pv.phi[0] == doctest::Approx(2.0 / 7.0).epsilon(1e-10));
    CHECK(pv.phi[1] == doctest::Approx(3.0 / 7.0).epsilon(1e-10));
    CHECK(pv.phi[2] == doctest::Approx(2.0 / 7.0).epsilon(1e-10));
}

TEST_CASE("perron_vector: matches the dense linear-solve oracle") {
    const DirectedGraph g = add_self_loops(DirectedGraph::from_edges(
        3, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}, {2, 1, 1.0}}));
    const TransitionMatrix p = transition_matrix(g);
    const PerronVector pv = perron_vector(p);
    const std::vector<double> oracle = testing::stationary_by_linear_solve(p);
    for (std::size_t i = 0; i < oracle.size(); ++i)
        CHECK(std::abs(pv.phi[i] - oracle[i]) <= 1e-10);
}

TEST_CASE("perron_vector: oracle agreement across random strongly connected graphs") {
    Rng rng(4242);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(49));
        const DirectedGraph g = add_self_loops(
            testing::random_strongly_connected(rng, n, rng.uniform(0.05, 0.3), trial % 2 == 0));
        const TransitionMatrix p = transition_matrix(g);
        const PerronVector pv = perron_vector(p);
        CHECK(pv.residual <= 1e-12);
        double sum = 0.0, mn = 1.0;
        for (double v : pv.phi) {
            sum += v;
            mn = std::min(mn, v);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        CHECK(mn > 0.0);
        const std::vector<double> oracle = testing::stationary_by_linear_solve(p);
        for (std::size_t i = 0; i < oracle.size(); ++i)
            CHECK(std::abs(pv.phi[i] - oracle[i]) <= 1e-10);
    }
}

TEST_CASE("perron_vector: non-convergence reports the residual") {
    Rng rng(1);
    const TransitionMatrix p = transition_matrix(
        add_self_loops(testing::random_strongly_connected(rng, 30, 0.1, false)));
    try {
        perron_vector(p, 1e-15, 2);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.residual > 0.0);
    }
}

TEST_CASE("propagation_matrix: self-looped 3-cycle") {
    const TransitionMatrix p = transition_matrix(looped_cycle3());
    const PerronVector pv = perron_vector(p);
    const PropagationMatrix a = propagation_matrix(p, pv);
    const double expect[3][3] = {{0.5, 0.25, 0.25}, {0.25, 0.5, 0.25}, {0.25, 0.25, 0.5}};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(a.values(i, j) == doctest::Approx(expect[i][j]).epsilon(1e-12));
}

TEST_CASE("propagation_matrix: 2-node bidirectional graph") {
    const DirectedGraph g =
        add_self_loops(DirectedGraph::from_edges(2, {{0, 1, 1.0}, {1, 0, 1.0}}));
    const TransitionMatrix p = transition_matrix(g);
    const PropagationMatrix a = propagation_matrix(p, perron_vector(p));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(a.values(i, j) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("propagation_matrix: exactly symmetric, nonnegative") {
    Rng rng(777);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(30));
        const DirectedGraph g =
            add_self_loops(testing::random_strongly_connected(rng, n, 0.2, true));
        const TransitionMatrix p = transition_matrix(g);
        const PropagationMatrix a = propagation_matrix(p, perron_vector(p));
        for (std::size_t i = 0; i < a.values.rows(); ++i)
            for (std::size_t j = 0; j < a.values.cols(); ++j) {
                REQUIRE(a.values(i, j) == a.values(j, i)); // bitwise
                REQUIRE(a.values(i, j) >= 0.0);
            }
    }
}

TEST_CASE("propagation_matrix: non-positive phi is a domain error") {
    const TransitionMatrix p = transition_matrix(looped_cycle3());
    PerronVector bad = perron_vector(p);
    bad.phi[1] = 0.0;
    CHECK_THROWS_AS(propagation_matrix(p, bad), ValidationError);
}

TEST_CASE("undirected equivalence: symmetric graphs reduce to degree normalization") {
    Rng rng(1212);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(30));
        // build a symmetric weighted graph: mirror every generated arc
        std::vector<Edge> edges;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (rng.bernoulli(0.3)) {
                    const double w = rng.uniform(0.5, 2.0);
                    edges.push_back({u, v, w});
                    edges.push_back({v, u, w});
                }
        for (int i = 0; i + 1 < n; ++i) { // keep it connected
            edges.push_back({i, i + 1, 1.0});
            edges.push_back({i + 1, i, 1.0});
        }
        const DirectedGraph g = DirectedGraph::from_edges(n, std::move(edges));

        const DirectedGraph looped = add_self_loops(g);
        const TransitionMatrix p = transition_matrix(looped);
        const PropagationMatrix dgcn_prop = propagation_matrix(p, perron_vector(p));
        const PropagationMatrix baseline = baseline_sym_propagation(g);
        CHECK(max_abs_diff(dgcn_prop.values, baseline.values) <= 1e-10);
    }
}

TEST_CASE("baseline_sym_propagation: trivial cases") {
    const DirectedGraph two = DirectedGraph::from_edges(2, {{0, 1, 1.0}, {1, 0, 1.0}});
    const PropagationMatrix a = baseline_sym_propagation(two);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(a.values(i, j) == doctest::Approx(0.5).epsilon(1e-12));

    const PropagationMatrix lone = baseline_sym_propagation(DirectedGraph::from_edges(1, {}));
    CHECK(lone.values(0, 0) == 1.0);
}

TEST_CASE("directed_laplacian: 3-cycle values and zero row sums") {
    const TransitionMatrix p = transition_matrix(looped_cycle3());
    const DenseMatrix l = directed_laplacian(p, perron_vector(p));
    CHECK(l(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(l(0, 1) == doctest::Approx(-0.25).epsilon(1e-12));
    for (std::size_t i = 0; i < 3; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 3; ++j) s += l(i, j);
        CHECK(std::abs(s) <= 1e-12);
    }
}

TEST_CASE("directed_laplacian: spectrum lies in [0, 2]") {
    Rng rng(909);
    for (int trial = 0; trial < 15; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(30));
        const DirectedGraph g =
            add_self_loops(testing::random_strongly_connected(rng, n, 0.2, trial % 2 == 1));
        const TransitionMatrix p = transition_matrix(g);
        const DenseMatrix l = directed_laplacian(p, perron_vector(p));
        const std::vector<double> ev = testing::jacobi_eigenvalues(l);
        CHECK(ev.front() >= -1e-10);
        CHECK(ev.back() <= 2.0 + 1e-10);
    }
}

TEST_CASE("jacobi oracle sanity: known spectra") {
    DenseMatrix m(2, 2);
    m(0, 0) = 2.0; m(0, 1) = 1.0; m(1, 0) = 1.0; m(1, 1) = 2.0;
    const std::vector<double> ev = testing::jacobi_eigenvalues(m);
    CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-12));

    // 3-cycle laplacian spectrum is {0, 3/4, 3/4}
    const TransitionMatrix p = transition_matrix(looped_cycle3());
    const std::vector<double> lv =
        testing::jacobi_eigenvalues(directed_laplacian(p, perron_vector(p)));
    CHECK(lv[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(lv[1] == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(lv[2] == doctest::Approx(0.75).epsilon(1e-10));
}

TEST_CASE("symmetric_extreme_eigenvalues tracks the jacobi oracle") {
    Rng rng(555);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform_int(20));
        const DirectedGraph g =
            add_self_loops(testing::random_strongly_connected(rng, n, 0.25, false));
        const TransitionMatrix p = transition_matrix(g);
        const DenseMatrix l = directed_laplacian(p, perron_vector(p));
        const auto [mn, mx] = symmetric_extreme_eigenvalues(l);
        const std::vector<double> ev = testing::jacobi_eigenvalues(l);
        CHECK(mn == doctest::Approx(ev.front()).epsilon(1e-6));
        CHECK(mx == doctest::Approx(ev.back()).epsilon(1e-6));
    }
}
