#ifndef DGCN_NN_HPP_
#define DGCN_NN_HPP_

#include <cstdint>
#include <vector>

#include "dgcn/matrix.hpp"

namespace dgcn {

/// Weight stack of a 2- or 3-layer model. dims chains input width through
/// hidden widths to the class count: weights[k] is dims[k] x dims[k+1].
struct ModelParams {
    std::vector<DenseMatrix> weights;
    std::vector<std::size_t> dims;

    std::size_t depth() const { return weights.size(); }
    void validate() const; // throws ShapeError / ValidationError
};

/// One gradient matrix per weight matrix, shape-congruent.
struct GradientSet {
    std::vector<DenseMatrix> grads;
};

/// Uniform samples in +-sqrt(6 / (rows + cols)), deterministic per seed.
DenseMatrix glorot_init(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Glorot-initialized stack for the given dimension chain; layer k draws
/// from derive_seed(seed, k).
ModelParams init_params(const std::vector<std::size_t>& dims, std::uint64_t seed);

/// Row-wise softmax with per-row max subtraction; rows sum to 1 within 1e-12.
DenseMatrix softmax_rows(const DenseMatrix& logits);

/// Everything backward() needs from the forward pass. a_hat and x are
/// borrowed; they must outlive the cache.
struct ForwardCache {
    const DenseMatrix* a_hat = nullptr;
    const DenseMatrix* x = nullptr;
    std::vector<DenseMatrix> pre_acts;      // Z_k = a_hat (H_k W_k), k = 0..L-1
    std::vector<DenseMatrix> layer_inputs;  // H_1..H_{L-1} (H_0 is x)
    std::vector<std::vector<std::uint8_t>> dropout_masks; // per hidden layer
    double dropout_rate = 0.0;
    bool training = false;
    std::vector<std::size_t> dims;          // snapshot for staleness checks
};

struct ForwardResult {
    DenseMatrix probs; // n x C, rows sum to 1
    ForwardCache cache;
};

/// probs = softmax(a_hat ... ReLU(a_hat x W0) ... W_{L-1}). Hidden
/// activations get inverted dropout when training (mask then scale by
/// 1/(1-rate)); neither a_hat nor x is dropped. Deterministic per rng_seed.
ForwardResult forward(const DenseMatrix& a_hat, const DenseMatrix& x,
                      const ModelParams& params, double dropout_rate,
                      std::uint64_t rng_seed, bool training);

/// Sum over masked nodes of -ln(prob of true class); probabilities are
/// clamped at 1e-12 before the log. A sum, not a mean.
double masked_cross_entropy(const DenseMatrix& probs, const std::vector<int>& labels,
                            const std::vector<int>& mask);

/// Exact reverse-mode gradients of masked_cross_entropy through the cached
/// forward pass (dropout masks reused from the cache).
GradientSet backward(const ForwardResult& fwd, const ModelParams& params,
                     const std::vector<int>& labels, const std::vector<int>& mask);

/// weight_decay[k] adds decay * W_k to the gradient of layer k before the
/// update (L2 term); pass fewer entries than layers to mean zero for the
/// rest. Throws NumericError on a non-finite gradient, leaving params
/// untouched.
void sgd_step(ModelParams& params, const GradientSet& grads, double lr,
              const std::vector<double>& weight_decay);

struct AdamState {
    std::vector<DenseMatrix> m;
    std::vector<DenseMatrix> v;
    std::int64_t t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

void adam_step(ModelParams& params, const GradientSet& grads, double lr,
               const std::vector<double>& weight_decay, AdamState& state);

/// argmax per row, ties to the lowest class index.
std::vector<int> argmax_rows(const DenseMatrix& m);

} // namespace dgcn

#endif // DGCN_NN_HPP_
