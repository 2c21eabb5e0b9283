// Test-only oracles and generators. Everything here is independent of the
// production code paths it is used to check: reachability by boolean matrix
// squaring, the stationary distribution by a dense linear solve, spectra by
// cyclic Jacobi rotations, gradients by central finite differences.
#ifndef DGCN_TESTS_TEST_SUPPORT_HPP_
#define DGCN_TESTS_TEST_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "dgcn/graph.hpp"
#include "dgcn/matrix.hpp"
#include "dgcn/nn.hpp"
#include "dgcn/rng.hpp"
#include "dgcn/spectral.hpp"

namespace dgcn::testing {

// ---------------------------------------------------------------------------
// reachability oracle: transitive closure by repeated boolean squaring

inline std::vector<std::vector<bool>> transitive_closure(const DirectedGraph& g) {
    const int n = g.node_count();
    std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n),
                                         std::vector<bool>(static_cast<std::size_t>(n), false));
    for (int v = 0; v < n; ++v) reach[static_cast<std::size_t>(v)][static_cast<std::size_t>(v)] = true;
    for (const Edge& e : g.edges())
        reach[static_cast<std::size_t>(e.src)][static_cast<std::size_t>(e.dst)] = true;

    int doublings = 1;
    while ((1 << doublings) < std::max(1, n)) ++doublings;
    for (int step = 0; step <= doublings; ++step) {
        auto next = reach;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                if (reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)])
                    for (int j = 0; j < n; ++j)
                        if (reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)])
                            next[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
        reach.swap(next);
    }
    return reach;
}

/// component id per node: mutually reachable nodes share an id; ids are
/// assigned in ascending smallest-member order, matching SccPartition.
inline std::vector<int> scc_by_reachability(const DirectedGraph& g) {
    const auto reach = transitive_closure(g);
    const int n = g.node_count();
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    int next_id = 0;
    for (int v = 0; v < n; ++v) {
        if (comp[static_cast<std::size_t>(v)] >= 0) continue;
        for (int w = v; w < n; ++w)
            if (reach[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] &&
                reach[static_cast<std::size_t>(w)][static_cast<std::size_t>(v)])
                comp[static_cast<std::size_t>(w)] = next_id;
        ++next_id;
    }
    return comp;
}

// ---------------------------------------------------------------------------
// stationary-distribution oracle: least-squares solve of the stacked system
// [P^T - I; 1^T] x = [0; 1] via its normal equations

inline std::vector<double> gaussian_solve(DenseMatrix m, std::vector<double> b) {
    const std::size_t n = m.rows();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(col, j), m(piv, j));
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = m(r, col) / m(col, col);
            for (std::size_t j = col; j < n; ++j) m(r, j) -= f * m(col, j);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= m(i, j) * x[j];
        x[i] = acc / m(i, i);
    }
    return x;
}

inline std::vector<double> stationary_by_linear_solve(const TransitionMatrix& p) {
    const auto n = static_cast<std::size_t>(p.n);
    const DenseMatrix pd = p.to_dense();
    // B = P^T - I
    DenseMatrix bm(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) bm(i, j) = pd(j, i) - (i == j ? 1.0 : 0.0);
    // normal equations: (B^T B + 1 1^T) x = 1
    DenseMatrix m = matmul_tn(bm, bm);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) += 1.0;
    return gaussian_solve(std::move(m), std::vector<double>(n, 1.0));
}

// ---------------------------------------------------------------------------
// dense symmetric eigenvalue oracle: cyclic Jacobi rotations

inline std::vector<double> jacobi_eigenvalues(DenseMatrix a, int max_sweeps = 60) {
    const std::size_t n = a.rows();
    if (n == 0) return {};
    double fro = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) fro += a.data()[i] * a.data()[i];
    fro = std::sqrt(fro);
    const double stop = 1e-14 * std::max(fro, 1.0);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
        if (std::sqrt(off) <= stop) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = tau >= 0.0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                            : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double app = a(p, p), aqq = a(q, q), apq = a(p, q);
                a(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(p, i) = a(i, p);
                    a(i, q) = c * aiq + s * aip;
                    a(q, i) = a(i, q);
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

// ---------------------------------------------------------------------------
// random graph generators

inline DirectedGraph random_digraph(Rng& rng, int n, double p, bool weighted) {
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v && rng.bernoulli(p))
                edges.push_back({u, v, weighted ? rng.uniform(0.5, 2.0) : 1.0});
    return DirectedGraph::from_edges(n, std::move(edges));
}

/// Random permutation cycle plus extra edges: strongly connected for n >= 1.
inline DirectedGraph random_strongly_connected(Rng& rng, int n, double extra_p,
                                               bool weighted) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    rng.shuffle(perm);
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        const int u = perm[static_cast<std::size_t>(i)];
        const int v = perm[static_cast<std::size_t>((i + 1) % n)];
        if (u != v) edges.push_back({u, v, weighted ? rng.uniform(0.5, 2.0) : 1.0});
    }
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v && rng.bernoulli(extra_p))
                edges.push_back({u, v, weighted ? rng.uniform(0.5, 2.0) : 1.0});
    return DirectedGraph::from_edges(n, std::move(edges));
}

// ---------------------------------------------------------------------------
// finite-difference gradient check

struct FdCheck {
    double max_rel_err = 0.0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
};

/// Central differences with step h against the analytic backward pass; the
/// dropout mask is frozen by reusing one rng seed for every evaluation.
inline FdCheck finite_difference_check(const DenseMatrix& a_hat, const DenseMatrix& x,
                                       ModelParams params, const std::vector<int>& labels,
                                       const std::vector<int>& mask, double dropout_rate,
                                       std::uint64_t seed, bool training,
                                       double h = 1e-5) {
    const ForwardResult fwd = forward(a_hat, x, params, dropout_rate, seed, training);
    const GradientSet gs = backward(fwd, params, labels, mask);

    auto loss_at = [&](const ModelParams& p) {
        const ForwardResult f = forward(a_hat, x, p, dropout_rate, seed, training);
        return masked_cross_entropy(f.probs, labels, mask);
    };

    FdCheck res;
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        for (std::size_t i = 0; i < params.weights[k].size(); ++i) {
            const double orig = params.weights[k].data()[i];
            params.weights[k].data()[i] = orig + h;
            const double up = loss_at(params);
            params.weights[k].data()[i] = orig - h;
            const double down = loss_at(params);
            params.weights[k].data()[i] = orig;

            const double fd = (up - down) / (2.0 * h);
            const double an = gs.grads[k].data()[i];
            const double rel = std::abs(an - fd) /
                               std::max({std::abs(an), std::abs(fd), 1e-3});
            if (rel > res.max_rel_err) {
                res.max_rel_err = rel;
                res.worst_analytic = an;
                res.worst_numeric = fd;
            }
        }
    }
    return res;
}

} // namespace dgcn::testing

#endif // DGCN_TESTS_TEST_SUPPORT_HPP_
