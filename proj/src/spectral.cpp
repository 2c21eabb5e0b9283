#include "dgcn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dgcn/error.hpp"
#include "dgcn/log.hpp"
#include "dgcn/rng.hpp"

namespace dgcn {

DenseMatrix TransitionMatrix::to_dense() const {
    DenseMatrix m(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u)
        for (std::size_t k = row_ptr[static_cast<std::size_t>(u)];
             k < row_ptr[static_cast<std::size_t>(u) + 1]; ++k)
            m(static_cast<std::size_t>(u), static_cast<std::size_t>(col[k])) = val[k];
    return m;
}

TransitionMatrix transition_matrix(const DirectedGraph& g_with_loops) {
    const int n = g_with_loops.node_count();
    const std::vector<double> deg = g_with_loops.weighted_out_degrees();
    for (int u = 0; u < n; ++u)
        if (deg[static_cast<std::size_t>(u)] <= 0.0) {
            std::ostringstream os;
            os << "node " << u << " has zero out-degree; transition matrix requires self-loops";
            throw ValidationError(os.str());
        }

    TransitionMatrix p;
    p.n = n;
    p.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    p.col.reserve(g_with_loops.edges().size());
    p.val.reserve(g_with_loops.edges().size());
    for (int u = 0; u < n; ++u) {
        for (const Edge& e : g_with_loops.out_edges(u)) {
            p.col.push_back(e.dst);
            p.val.push_back(e.weight / deg[static_cast<std::size_t>(u)]);
        }
        p.row_ptr[static_cast<std::size_t>(u) + 1] = p.col.size();
    }
    return p;
}

PerronVector perron_vector(const TransitionMatrix& p, double tol, int max_iter) {
    const int n = p.n;
    if (n == 0) throw ValidationError("empty transition matrix");

    std::vector<double> phi(static_cast<std::size_t>(n), 1.0 / n);
    std::vector<double> next(static_cast<std::size_t>(n));

    double residual = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int u = 0; u < n; ++u) {
            const double pu = phi[static_cast<std::size_t>(u)];
            for (std::size_t k = p.row_ptr[static_cast<std::size_t>(u)];
                 k < p.row_ptr[static_cast<std::size_t>(u) + 1]; ++k)
                next[static_cast<std::size_t>(p.col[k])] += pu * p.val[k];
        }
        double sum = 0.0;
        for (double v : next) sum += v;
        for (double& v : next) v /= sum;

        residual = 0.0;
        for (int v = 0; v < n; ++v)
            residual = std::max(residual, std::abs(next[static_cast<std::size_t>(v)] -
                                                   phi[static_cast<std::size_t>(v)]));
        phi.swap(next);
        if (residual <= tol) {
            ++it;
            break;
        }
    }
    if (residual > tol) {
        std::ostringstream os;
        os << "power iteration did not reach tol " << tol << " in " << max_iter
           << " iterations; final residual " << residual;
        throw ConvergenceError(os.str(), residual);
    }
    for (double v : phi)
        if (v <= 0.0)
            throw ValidationError(
                "stationary distribution has a non-positive entry; walk is not irreducible");

    log::debug("perron: converged in %d iterations, residual %.3e", it, residual);
    return PerronVector{std::move(phi), residual, it};
}

PropagationMatrix propagation_matrix(const TransitionMatrix& p, const PerronVector& phi) {
    const int n = p.n;
    if (static_cast<int>(phi.phi.size()) != n)
        throw ShapeError("propagation_matrix: phi length does not match matrix size");
    for (double v : phi.phi)
        if (v <= 0.0)
            throw ValidationError("propagation_matrix: phi must be entrywise positive");

    std::vector<double> sqrt_phi(phi.phi.size());
    for (std::size_t i = 0; i < phi.phi.size(); ++i) sqrt_phi[i] = std::sqrt(phi.phi[i]);

    DenseMatrix a(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        for (std::size_t k = p.row_ptr[static_cast<std::size_t>(u)];
             k < p.row_ptr[static_cast<std::size_t>(u) + 1]; ++k) {
            const int v = p.col[k];
            // 0.5 * sqrt(phi_u / phi_v) * P(u,v), mirrored to (v,u); a
            // diagonal entry accumulates both halves
            const double s = 0.5 * (sqrt_phi[static_cast<std::size_t>(u)] /
                                    sqrt_phi[static_cast<std::size_t>(v)]) *
                             p.val[k];
            a(static_cast<std::size_t>(u), static_cast<std::size_t>(v)) += s;
            a(static_cast<std::size_t>(v), static_cast<std::size_t>(u)) += s;
        }
    }
    return PropagationMatrix{std::move(a)};
}

DenseMatrix directed_laplacian(const TransitionMatrix& p, const PerronVector& phi) {
    PropagationMatrix a = propagation_matrix(p, phi);
    const std::size_t n = a.values.rows();
    DenseMatrix l(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            l(i, j) = (i == j ? 1.0 : 0.0) - a.values(i, j);
    return l;
}

PropagationMatrix baseline_sym_propagation(const DirectedGraph& g) {
    const int n = g.node_count();
    // direction discarded: A <- max(A, A^T), then self-loops
    DenseMatrix sym(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (const Edge& e : g.edges()) {
        const auto u = static_cast<std::size_t>(e.src), v = static_cast<std::size_t>(e.dst);
        sym(u, v) = std::max(sym(u, v), e.weight);
        sym(v, u) = std::max(sym(v, u), e.weight);
    }
    for (int i = 0; i < n; ++i)
        sym(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) += 1.0;

    std::vector<double> inv_sqrt_deg(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double d = 0.0;
        for (int j = 0; j < n; ++j)
            d += sym(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        inv_sqrt_deg[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(d);
    }

    DenseMatrix a(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
        for (std::size_t j = i; j < static_cast<std::size_t>(n); ++j) {
            const double x = inv_sqrt_deg[i] * sym(i, j) * inv_sqrt_deg[j];
            a(i, j) = x;
            a(j, i) = x;
        }
    }
    return PropagationMatrix{std::move(a)};
}

namespace {

// Largest eigenvalue in magnitude of the shifted operator s - shift*I,
// by power iteration; returns the corresponding eigenvalue of s.
double shifted_power_extreme(const DenseMatrix& s, double shift, int max_iter, double tol) {
    const std::size_t n = s.rows();
    // fixed pseudo-random start; a constant vector can be an exact
    // eigenvector of row-normalized operators and would never rotate
    Rng rng(0x9E3779B9ULL);
    std::vector<double> x(n);
    double norm0 = 0.0;
    for (double& v : x) {
        v = rng.uniform(0.5, 1.5);
        norm0 += v * v;
    }
    norm0 = std::sqrt(norm0);
    for (double& v : x) v /= norm0;
    std::vector<double> y(n);
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = -shift * x[i];
            const double* row = s.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
            y[i] = acc;
        }
        double norm = 0.0;
        for (double v : y) norm += v * v;
        norm = std::sqrt(norm);
        if (norm == 0.0) return shift; // x was in the kernel of the shifted operator
        double ray = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] /= norm;
            ray += y[i] * x[i];
        }
        const double next = norm * (ray >= 0 ? 1.0 : -1.0);
        const bool done = std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next));
        lambda = next;
        x.swap(y);
        if (done && it > 2) break;
    }
    return lambda + shift;
}

} // namespace

std::pair<double, double> symmetric_extreme_eigenvalues(const DenseMatrix& s, int max_iter,
                                                        double tol) {
    if (s.rows() != s.cols()) throw ShapeError("extreme eigenvalues need a square matrix");
    if (s.rows() == 0) return {0.0, 0.0};
    if (s.rows() == 1) return {s(0, 0), s(0, 0)};
    // Gershgorin bound centers the shifts so each extreme dominates in turn.
    double lo = s(0, 0), hi = s(0, 0);
    for (std::size_t i = 0; i < s.rows(); ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < s.cols(); ++j)
            if (i != j) r += std::abs(s(i, j));
        lo = std::min(lo, s(i, i) - r);
        hi = std::max(hi, s(i, i) + r);
    }
    const double max_ev = shifted_power_extreme(s, lo, max_iter, tol);
    const double min_ev = shifted_power_extreme(s, hi, max_iter, tol);
    return {min_ev, max_ev};
}

} // namespace dgcn
