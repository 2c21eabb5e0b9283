#ifndef DGCN_PIPELINE_HPP_
#define DGCN_PIPELINE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dgcn/graph.hpp"
#include "dgcn/nn.hpp"
#include "dgcn/spectral.hpp"

namespace dgcn {

enum class Propagation { dgcn, baseline_sym };

std::string to_string(Propagation p);
Propagation propagation_from_string(const std::string& s);

/// Everything that determines a run. One value of this struct plus the
/// dataset files fully reproduces a training result.
struct TrainConfig {
    std::string edgelist;
    std::string labels;
    std::string features;   // empty: no raw features (one-hot only)
    bool weighted = false;  // false binarizes repeated edges
    int model_depth = 0;    // 0: auto (2 layers, 3 when more than 10 classes)
    std::vector<std::size_t> hidden_dims = {16};
    double lr = 0.01;
    double dropout = 0.5;
    double weight_decay = 5e-4; // applied to the first layer only
    int epochs = 200;
    std::uint64_t seed = 1;
    double train_fraction = 0.10;
    Propagation propagation = Propagation::dgcn;
    int runs = 1;
    std::string out_dir;

    /// Assign a field by its config-file key. Throws ValidationError for
    /// unknown keys or unparseable values.
    void set_key(const std::string& key, const std::string& value);

    /// Throws ValidationError listing every offending key.
    void validate(bool require_paths = true) const;

    /// Depth actually used for a dataset with `num_classes` classes.
    int resolved_depth(int num_classes) const;
    /// Hidden widths actually used (a single width is replicated when the
    /// resolved depth needs two).
    std::vector<std::size_t> resolved_hidden(int num_classes) const;
};

/// Flat key=value file, '#' comments. `overrides` ("key=value" strings) win
/// over file values.
TrainConfig load_train_config(const std::string& path,
                              const std::vector<std::string>& overrides = {});

/// Dataset after LSCC extraction with the propagation operand and feature
/// matrix precomputed (they are shared by every run).
struct PreparedDataset {
    DirectedGraph lscc;     // no self-loops; the walk adds them internally
    NodeData data;          // aligned to lscc
    PropagationMatrix prop;
    DenseMatrix features;   // one-hot block then raw features
    PerronVector perron;    // empty for the baseline propagation
    int full_nodes = 0;     // pre-extraction counts, for reporting
    std::size_t full_edges = 0;
};

PreparedDataset prepare_dataset(const DirectedGraph& g, const NodeData& nd, Propagation mode);

/// One-hot encoding of each node concatenated with the raw features:
/// n x (n + F_in).
DenseMatrix build_features(const DirectedGraph& g, const NodeData& nd);

struct SplitSets {
    std::vector<int> train;
    std::vector<int> test;
};

/// Seeded stratified split over the labeled nodes: |train| =
/// round(labeled * fraction), every class with at least 2 nodes is
/// represented in the train set. Falls back to an unstratified draw (with a
/// warning) when the class count exceeds the train budget.
SplitSets split_nodes(const std::vector<int>& labels, double train_fraction,
                      std::uint64_t seed);

struct RunResult {
    std::uint64_t run_seed = 0;
    double accuracy = 0.0;
    std::vector<double> losses; // training loss per epoch
    ModelParams params;
    SplitSets split;
};

/// Seed of run r under this config (what run_experiment assigns).
std::uint64_t run_seed_for(const TrainConfig& config, int run);

/// The train/test split run r of this config uses.
SplitSets split_for_run(const TrainConfig& config, const std::vector<int>& labels, int run);

/// Full-batch training on an already prepared dataset.
RunResult train_run(const TrainConfig& config, const PreparedDataset& ds,
                    std::uint64_t run_seed);

/// LSCC extraction, spectral precomputation and a single seeded run.
RunResult train(const TrainConfig& config, const DirectedGraph& g, const NodeData& nd);

/// Fraction of test nodes whose argmax prediction matches the label;
/// argmax ties go to the lowest class index.
double evaluate(const ModelParams& params, const DenseMatrix& a_hat, const DenseMatrix& x,
                const std::vector<int>& labels, const std::vector<int>& test_nodes);

/// (mean, t-based 95% half-width) over at least two runs.
std::pair<double, double> confidence_interval(const std::vector<double>& accuracies);

/// Two-sided 97.5% Student-t quantile for `df` degrees of freedom.
double student_t_quantile975(int df);

struct ExperimentResult {
    std::vector<RunResult> runs;
    double mean_accuracy = 0.0;
    double ci_half_width = 0.0;
};

/// `config.runs` independent seeded runs (run r uses derive_seed(seed, r)),
/// executed in parallel, aggregated deterministically.
ExperimentResult run_experiment(const TrainConfig& config, const DirectedGraph& g,
                                const NodeData& nd);

/// Text checkpoint, exact round-trip ("dgcn-checkpoint v1").
void save_params(const ModelParams& params, const std::string& path);
ModelParams load_params(const std::string& path);

/// Machine-readable result summary (JSON): effective config, per-run seeds,
/// accuracies and loss traces, mean, half-width.
void write_results_json(const TrainConfig& config, const ExperimentResult& result,
                        const std::string& path);

/// The effective config as a JSON object string (the same echo that
/// write_results_json embeds).
std::string config_json_string(const TrainConfig& config);

/// Table mirroring the usual "accuracy in percent, 95% level" report.
std::string format_results_table(const std::vector<std::pair<std::string, ExperimentResult>>& rows);

} // namespace dgcn

#endif // DGCN_PIPELINE_HPP_
