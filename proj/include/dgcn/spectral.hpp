#ifndef DGCN_SPECTRAL_HPP_
#define DGCN_SPECTRAL_HPP_

#include <vector>

#include "dgcn/graph.hpp"
#include "dgcn/matrix.hpp"

namespace dgcn {

/// Row-stochastic random-walk matrix in compressed sparse row form.
/// Every row sums to 1 within 1e-12; diagonal entries are positive because
/// the underlying graph carries self-loops.
struct TransitionMatrix {
    int n = 0;
    std::vector<std::size_t> row_ptr; // n+1
    std::vector<int> col;
    std::vector<double> val;

    DenseMatrix to_dense() const;
};

/// Stationary distribution of the random walk: the unique positive left
/// eigenvector of the transition matrix, normalized to sum 1.
struct PerronVector {
    std::vector<double> phi;
    double residual = 0.0; // max_v |(phi P)(v) - phi(v)| at convergence
    int iterations = 0;
};

/// Symmetric nonnegative convolution operand, precomputed once per graph.
struct PropagationMatrix {
    DenseMatrix values; // n x n, exactly symmetric
    int n() const { return static_cast<int>(values.rows()); }
};

/// Out-degree-normalized transition matrix of a self-looped graph.
/// Throws ValidationError on a zero out-degree row (missing self-loops).
TransitionMatrix transition_matrix(const DirectedGraph& g_with_loops);

/// Power iteration from the uniform vector, L1-normalized every step.
/// Requires a strongly connected, self-looped (hence aperiodic) walk.
/// Throws ConvergenceError when max_iter is exhausted and ValidationError
/// when a non-positive entry survives at convergence.
PerronVector perron_vector(const TransitionMatrix& p, double tol = 1e-12,
                           int max_iter = 100000);

/// Symmetrized, stationary-distribution-conjugated transition matrix:
/// 0.5 * (S + S^T) with S = Phi^{1/2} P Phi^{-1/2}, Phi = diag(phi).
/// Symmetry is structural: each sparse entry is scattered to both mirror
/// positions, so values(i,j) == values(j,i) bitwise.
PropagationMatrix propagation_matrix(const TransitionMatrix& p, const PerronVector& phi);

/// I minus the propagation matrix; symmetric positive-semidefinite with
/// spectrum in [0, 2].
DenseMatrix directed_laplacian(const TransitionMatrix& p, const PerronVector& phi);

/// Undirected first-order baseline: discard direction (A <- max(A, A^T)),
/// add self-loops, return Dt^{-1/2} At Dt^{-1/2}.
PropagationMatrix baseline_sym_propagation(const DirectedGraph& g);

/// (min, max) eigenvalue estimates for a symmetric matrix via power
/// iteration on shifted operators. Diagnostic accuracy, not an oracle.
std::pair<double, double> symmetric_extreme_eigenvalues(const DenseMatrix& s,
                                                        int max_iter = 5000,
                                                        double tol = 1e-12);

} // namespace dgcn

#endif // DGCN_SPECTRAL_HPP_
