#include "dgcn/nn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dgcn/error.hpp"
#include "dgcn/rng.hpp"

namespace dgcn {

void ModelParams::validate() const {
    if (weights.size() < 2 || weights.size() > 3)
        throw ValidationError("model depth must be 2 or 3");
    if (dims.size() != weights.size() + 1)
        throw ShapeError("dims must chain through every layer");
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k].rows() != dims[k] || weights[k].cols() != dims[k + 1]) {
            std::ostringstream os;
            os << "layer " << k << ": weight is " << weights[k].rows() << "x"
               << weights[k].cols() << ", expected " << dims[k] << "x" << dims[k + 1];
            throw ShapeError(os.str());
        }
    }
}

DenseMatrix glorot_init(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    if (rows == 0 || cols == 0) throw ValidationError("glorot_init needs positive dimensions");
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Rng rng(seed);
    DenseMatrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
    return m;
}

ModelParams init_params(const std::vector<std::size_t>& dims, std::uint64_t seed) {
    ModelParams p;
    p.dims = dims;
    for (std::size_t k = 0; k + 1 < dims.size(); ++k)
        p.weights.push_back(glorot_init(dims[k], dims[k + 1], derive_seed(seed, k)));
    p.validate();
    return p;
}

DenseMatrix softmax_rows(const DenseMatrix& logits) {
    DenseMatrix out(logits.rows(), logits.cols());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        const auto row = logits.row(i);
        double mx = row[0];
        for (double v : row) mx = std::max(mx, v);
        double sum = 0.0;
        for (std::size_t j = 0; j < logits.cols(); ++j) {
            const double e = std::exp(row[j] - mx);
            out(i, j) = e;
            sum += e;
        }
        for (std::size_t j = 0; j < logits.cols(); ++j) out(i, j) /= sum;
    }
    return out;
}

namespace {

void check_forward_shapes(const DenseMatrix& a_hat, const DenseMatrix& x,
                          const ModelParams& params) {
    params.validate();
    if (a_hat.rows() != a_hat.cols()) throw ShapeError("propagation operand must be square");
    if (x.rows() != a_hat.rows())
        throw ShapeError("feature rows do not match the propagation matrix size");
    if (x.cols() != params.dims[0]) {
        std::ostringstream os;
        os << "layer 0: input width " << x.cols() << " does not match dims[0] = "
           << params.dims[0];
        throw ShapeError(os.str());
    }
}

} // namespace

ForwardResult forward(const DenseMatrix& a_hat, const DenseMatrix& x,
                      const ModelParams& params, double dropout_rate,
                      std::uint64_t rng_seed, bool training) {
    check_forward_shapes(a_hat, x, params);
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        throw ValidationError("dropout rate must lie in [0, 1)");

    const std::size_t depth = params.depth();
    ForwardResult res;
    ForwardCache& cache = res.cache;
    cache.a_hat = &a_hat;
    cache.x = &x;
    cache.dropout_rate = dropout_rate;
    cache.training = training;
    cache.dims = params.dims;

    Rng drop_rng(rng_seed);
    const bool use_dropout = training && dropout_rate > 0.0;
    const double keep_scale = use_dropout ? 1.0 / (1.0 - dropout_rate) : 1.0;

    const DenseMatrix* h = &x;
    for (std::size_t k = 0; k < depth; ++k) {
        DenseMatrix z = matmul(a_hat, matmul(*h, params.weights[k]));
        if (k + 1 < depth) {
            DenseMatrix act(z.rows(), z.cols());
            for (std::size_t i = 0; i < z.size(); ++i)
                act.data()[i] = z.data()[i] > 0.0 ? z.data()[i] : 0.0;
            std::vector<std::uint8_t> mask;
            if (use_dropout) {
                mask.resize(act.size());
                for (std::size_t i = 0; i < act.size(); ++i) {
                    mask[i] = drop_rng.bernoulli(dropout_rate) ? 0 : 1;
                    act.data()[i] = mask[i] ? act.data()[i] * keep_scale : 0.0;
                }
            }
            cache.pre_acts.push_back(std::move(z));
            cache.dropout_masks.push_back(std::move(mask));
            cache.layer_inputs.push_back(std::move(act));
            h = &cache.layer_inputs.back();
        } else {
            res.probs = softmax_rows(z);
            cache.pre_acts.push_back(std::move(z));
        }
    }
    return res;
}

double masked_cross_entropy(const DenseMatrix& probs, const std::vector<int>& labels,
                            const std::vector<int>& mask) {
    if (mask.empty()) throw ValidationError("cross-entropy mask is empty");
    if (labels.size() != probs.rows())
        throw ShapeError("labels length does not match probability rows");
    double loss = 0.0;
    for (int i : mask) {
        if (i < 0 || static_cast<std::size_t>(i) >= probs.rows())
            throw ValidationError("mask index outside the node range");
        const int y = labels[static_cast<std::size_t>(i)];
        if (y < 0 || static_cast<std::size_t>(y) >= probs.cols())
            throw ValidationError("masked node has no valid label");
        loss -= std::log(std::max(probs(static_cast<std::size_t>(i),
                                        static_cast<std::size_t>(y)),
                                  1e-12));
    }
    return loss;
}

GradientSet backward(const ForwardResult& fwd, const ModelParams& params,
                     const std::vector<int>& labels, const std::vector<int>& mask) {
    const ForwardCache& cache = fwd.cache;
    if (!cache.a_hat || !cache.x || cache.pre_acts.size() != params.depth())
        throw ValidationError("backward: cache does not belong to a completed forward pass");
    if (cache.dims != params.dims)
        throw ValidationError("backward: cache was built for different parameter shapes");
    if (mask.empty()) throw ValidationError("backward: mask is empty");

    const DenseMatrix& a_hat = *cache.a_hat;
    const std::size_t depth = params.depth();
    const std::size_t n = fwd.probs.rows();
    const double keep_scale =
        cache.training && cache.dropout_rate > 0.0 ? 1.0 / (1.0 - cache.dropout_rate) : 1.0;

    // fused softmax + cross-entropy: d logits = probs - onehot on masked rows
    DenseMatrix dz(n, fwd.probs.cols());
    for (int i : mask) {
        const int y = labels[static_cast<std::size_t>(i)];
        if (y < 0 || static_cast<std::size_t>(y) >= fwd.probs.cols())
            throw ValidationError("backward: masked node has no valid label");
        for (std::size_t j = 0; j < fwd.probs.cols(); ++j)
            dz(static_cast<std::size_t>(i), j) = fwd.probs(static_cast<std::size_t>(i), j);
        dz(static_cast<std::size_t>(i), static_cast<std::size_t>(y)) -= 1.0;
    }

    GradientSet gs;
    gs.grads.resize(depth);
    for (std::size_t k = depth; k-- > 0;) {
        // Z_k = a_hat (H_k W_k)
        const DenseMatrix dy = matmul_tn(a_hat, dz); // a_hat^T dZ
        const DenseMatrix& h = k == 0 ? *cache.x : cache.layer_inputs[k - 1];
        gs.grads[k] = matmul_tn(h, dy);
        if (k == 0) break;

        DenseMatrix dh = matmul_nt(dy, params.weights[k]); // dY W^T
        const std::vector<std::uint8_t>& mask_k = cache.dropout_masks[k - 1];
        const DenseMatrix& z_prev = cache.pre_acts[k - 1];
        for (std::size_t i = 0; i < dh.size(); ++i) {
            double g = dh.data()[i];
            if (!mask_k.empty()) g = mask_k[i] ? g * keep_scale : 0.0;
            dh.data()[i] = z_prev.data()[i] > 0.0 ? g : 0.0;
        }
        dz = std::move(dh);
    }
    return gs;
}

namespace {

void check_step_inputs(const ModelParams& params, const GradientSet& grads, double lr) {
    if (grads.grads.size() != params.weights.size())
        throw ShapeError("gradient count does not match layer count");
    for (std::size_t k = 0; k < grads.grads.size(); ++k) {
        if (grads.grads[k].rows() != params.weights[k].rows() ||
            grads.grads[k].cols() != params.weights[k].cols())
            throw ShapeError("gradient shape does not match layer " + std::to_string(k));
        if (!grads.grads[k].all_finite())
            throw NumericError("non-finite gradient in layer " + std::to_string(k));
    }
    if (lr < 0.0) throw ValidationError("learning rate must be non-negative");
}

double decay_for(const std::vector<double>& weight_decay, std::size_t k) {
    return k < weight_decay.size() ? weight_decay[k] : 0.0;
}

} // namespace

void sgd_step(ModelParams& params, const GradientSet& grads, double lr,
              const std::vector<double>& weight_decay) {
    check_step_inputs(params, grads, lr);
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        const double wd = decay_for(weight_decay, k);
        DenseMatrix& w = params.weights[k];
        const DenseMatrix& g = grads.grads[k];
        for (std::size_t i = 0; i < w.size(); ++i)
            w.data()[i] -= lr * (g.data()[i] + wd * w.data()[i]);
    }
}

void adam_step(ModelParams& params, const GradientSet& grads, double lr,
               const std::vector<double>& weight_decay, AdamState& state) {
    check_step_inputs(params, grads, lr);
    if (state.m.empty()) {
        for (const DenseMatrix& w : params.weights) {
            state.m.emplace_back(w.rows(), w.cols());
            state.v.emplace_back(w.rows(), w.cols());
        }
    } else if (state.m.size() != params.weights.size()) {
        throw ShapeError("optimizer state does not match layer count");
    }

    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        const double wd = decay_for(weight_decay, k);
        DenseMatrix& w = params.weights[k];
        DenseMatrix& m = state.m[k];
        DenseMatrix& v = state.v[k];
        const DenseMatrix& gmat = grads.grads[k];
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double g = gmat.data()[i] + wd * w.data()[i];
            m.data()[i] = state.beta1 * m.data()[i] + (1.0 - state.beta1) * g;
            v.data()[i] = state.beta2 * v.data()[i] + (1.0 - state.beta2) * g * g;
            const double mhat = m.data()[i] / bc1;
            const double vhat = v.data()[i] / bc2;
            w.data()[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

std::vector<int> argmax_rows(const DenseMatrix& m) {
    std::vector<int> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < m.cols(); ++j)
            if (m(i, j) > m(i, best)) best = j;
        out[i] = static_cast<int>(best);
    }
    return out;
}

} // namespace dgcn
