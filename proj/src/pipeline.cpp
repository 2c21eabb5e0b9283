#include "dgcn/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dgcn/error.hpp"
#include "dgcn/log.hpp"
#include "dgcn/rng.hpp"

namespace dgcn {

namespace {

// seed streams within a run
constexpr std::uint64_t kStreamSplit = 101;
constexpr std::uint64_t kStreamInit = 202;
constexpr std::uint64_t kStreamDropout = 303;

bool parse_bool(const std::string& v, bool& out) {
    if (v == "true" || v == "1" || v == "yes") { out = true; return true; }
    if (v == "false" || v == "0" || v == "no") { out = false; return true; }
    return false;
}

template <typename T>
bool parse_num(const std::string& v, T& out) {
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    return res.ec == std::errc{} && res.ptr == v.data() + v.size();
}

} // namespace

std::string to_string(Propagation p) {
    return p == Propagation::dgcn ? "dgcn" : "baseline-sym";
}

Propagation propagation_from_string(const std::string& s) {
    if (s == "dgcn") return Propagation::dgcn;
    if (s == "baseline-sym") return Propagation::baseline_sym;
    throw ValidationError("propagation must be 'dgcn' or 'baseline-sym', got '" + s + "'");
}

void TrainConfig::set_key(const std::string& key, const std::string& value) {
    auto bad = [&](const char* expected) {
        throw ValidationError("config key '" + key + "': expected " + expected + ", got '" +
                              value + "'");
    };
    if (key == "edgelist") edgelist = value;
    else if (key == "labels") labels = value;
    else if (key == "features") features = value;
    else if (key == "out_dir") out_dir = value;
    else if (key == "weighted") { if (!parse_bool(value, weighted)) bad("true/false"); }
    else if (key == "model_depth") { if (!parse_num(value, model_depth)) bad("an integer"); }
    else if (key == "hidden_dims") {
        std::vector<std::size_t> dims;
        std::stringstream ss(value);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            std::size_t d;
            if (!parse_num(tok, d)) bad("comma-separated widths");
            dims.push_back(d);
        }
        if (dims.empty()) bad("comma-separated widths");
        hidden_dims = std::move(dims);
    }
    else if (key == "lr") { if (!parse_num(value, lr)) bad("a number"); }
    else if (key == "dropout") { if (!parse_num(value, dropout)) bad("a number"); }
    else if (key == "weight_decay") { if (!parse_num(value, weight_decay)) bad("a number"); }
    else if (key == "epochs") { if (!parse_num(value, epochs)) bad("an integer"); }
    else if (key == "seed") { if (!parse_num(value, seed)) bad("an unsigned integer"); }
    else if (key == "train_fraction") { if (!parse_num(value, train_fraction)) bad("a number"); }
    else if (key == "propagation") propagation = propagation_from_string(value);
    else if (key == "runs") { if (!parse_num(value, runs)) bad("an integer"); }
    else throw ValidationError("unknown config key '" + key + "'");
}

void TrainConfig::validate(bool require_paths) const {
    std::vector<std::string> bad;
    if (require_paths && edgelist.empty()) bad.push_back("edgelist (required)");
    if (require_paths && labels.empty()) bad.push_back("labels (required)");
    if (model_depth != 0 && model_depth != 2 && model_depth != 3)
        bad.push_back("model_depth (must be 2, 3, or 0 for auto)");
    if (model_depth != 0 &&
        hidden_dims.size() != static_cast<std::size_t>(model_depth - 1) &&
        hidden_dims.size() != 1)
        bad.push_back("hidden_dims (length must be model_depth - 1)");
    for (std::size_t h : hidden_dims)
        if (h == 0) { bad.push_back("hidden_dims (widths must be positive)"); break; }
    if (!(lr >= 0.0) || !std::isfinite(lr)) bad.push_back("lr (must be >= 0)");
    if (!(dropout >= 0.0 && dropout < 1.0)) bad.push_back("dropout (must lie in [0, 1))");
    if (!(weight_decay >= 0.0)) bad.push_back("weight_decay (must be >= 0)");
    if (epochs < 0) bad.push_back("epochs (must be >= 0)");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        bad.push_back("train_fraction (must lie in (0, 1))");
    if (runs < 1) bad.push_back("runs (must be >= 1)");
    if (!bad.empty()) {
        std::string msg = "invalid config:";
        for (const auto& b : bad) msg += " " + b + ";";
        throw ValidationError(msg);
    }
}

int TrainConfig::resolved_depth(int num_classes) const {
    if (model_depth != 0) return model_depth;
    return num_classes > 10 ? 3 : 2;
}

std::vector<std::size_t> TrainConfig::resolved_hidden(int num_classes) const {
    const std::size_t need = static_cast<std::size_t>(resolved_depth(num_classes)) - 1;
    if (hidden_dims.size() == need) return hidden_dims;
    if (hidden_dims.size() == 1) return std::vector<std::size_t>(need, hidden_dims[0]);
    throw ValidationError("hidden_dims length does not match model depth");
}

TrainConfig load_train_config(const std::string& path,
                              const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config: " + path);
    TrainConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "config line " << line_no << ": expected key=value";
            throw ParseError(os.str());
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        cfg.set_key(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    for (const std::string& ov : overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ValidationError("override must be key=value, got '" + ov + "'");
        cfg.set_key(ov.substr(0, eq), ov.substr(eq + 1));
    }
    return cfg;
}

DenseMatrix build_features(const DirectedGraph& g, const NodeData& nd) {
    const auto n = static_cast<std::size_t>(g.node_count());
    if (nd.labels.size() != n || nd.features.size() != n * nd.feature_width)
        throw ValidationError("node data does not match the graph's node count");
    DenseMatrix x(n, n + nd.feature_width);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, i) = 1.0;
        for (std::size_t j = 0; j < nd.feature_width; ++j)
            x(i, n + j) = nd.features[i * nd.feature_width + j];
    }
    return x;
}

PreparedDataset prepare_dataset(const DirectedGraph& g, const NodeData& nd, Propagation mode) {
    nd.validate(g.node_count());
    PreparedDataset ds;
    ds.full_nodes = g.node_count();
    ds.full_edges = g.edges().size();

    const std::vector<int> keep = largest_scc_nodes(g);
    if (static_cast<int>(keep.size()) < g.node_count())
        log::info("largest SCC keeps %zu of %d nodes", keep.size(), g.node_count());
    ds.lscc = induced_subgraph(g, keep);
    ds.data = subset_node_data(nd, keep);

    if (mode == Propagation::dgcn) {
        const DirectedGraph looped = add_self_loops(ds.lscc);
        const TransitionMatrix p = transition_matrix(looped);
        ds.perron = perron_vector(p);
        ds.prop = propagation_matrix(p, ds.perron);
    } else {
        ds.prop = baseline_sym_propagation(ds.lscc);
    }
    ds.features = build_features(ds.lscc, ds.data);
    return ds;
}

SplitSets split_nodes(const std::vector<int>& labels, double train_fraction,
                      std::uint64_t seed) {
    std::vector<int> labeled;
    int max_label = -1;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= 0) {
            labeled.push_back(static_cast<int>(i));
            max_label = std::max(max_label, labels[i]);
        }
    const std::size_t n_labeled = labeled.size();
    const auto target =
        static_cast<std::size_t>(std::llround(static_cast<double>(n_labeled) * train_fraction));
    if (target < 1 || target >= n_labeled)
        throw ValidationError("train fraction leaves an empty train or test set");

    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(max_label) + 1);
    for (int v : labeled) by_class[static_cast<std::size_t>(labels[static_cast<std::size_t>(v)])].push_back(v);

    std::size_t required_min = 0;
    for (const auto& members : by_class)
        if (members.size() >= 2) ++required_min;

    Rng rng(seed);
    SplitSets out;

    if (required_min > target) {
        log::warn("split: %zu classes need representation but train budget is %zu; "
                  "falling back to an unstratified split",
                  required_min, target);
        rng.shuffle(labeled);
        out.train.assign(labeled.begin(), labeled.begin() + static_cast<std::ptrdiff_t>(target));
    } else {
        // proportional quota per class with a floor of 1 for classes of
        // size >= 2, largest-remainder rounding to hit the exact target
        const std::size_t c_count = by_class.size();
        std::vector<std::size_t> quota(c_count, 0);
        std::vector<double> remainder(c_count, 0.0);
        std::size_t assigned = 0;
        for (std::size_t c = 0; c < c_count; ++c) {
            const std::size_t kc = by_class[c].size();
            if (kc == 0) continue;
            const double exact =
                static_cast<double>(target) * static_cast<double>(kc) / static_cast<double>(n_labeled);
            quota[c] = static_cast<std::size_t>(exact);
            remainder[c] = exact - static_cast<double>(quota[c]);
            if (kc >= 2 && quota[c] == 0) quota[c] = 1;
            quota[c] = std::min(quota[c], kc);
            assigned += quota[c];
        }
        while (assigned < target) {
            std::size_t best = c_count;
            for (std::size_t c = 0; c < c_count; ++c) {
                if (quota[c] >= by_class[c].size()) continue;
                if (best == c_count || remainder[c] > remainder[best]) best = c;
            }
            ++quota[best];
            remainder[best] -= 1.0;
            ++assigned;
        }
        while (assigned > target) {
            std::size_t best = c_count;
            for (std::size_t c = 0; c < c_count; ++c) {
                const std::size_t floor_c = by_class[c].size() >= 2 ? 1 : 0;
                if (quota[c] <= floor_c) continue;
                if (best == c_count || quota[c] > quota[best]) best = c;
            }
            --quota[best];
            --assigned;
        }
        for (std::size_t c = 0; c < c_count; ++c) {
            auto members = by_class[c];
            rng.shuffle(members);
            out.train.insert(out.train.end(), members.begin(),
                             members.begin() + static_cast<std::ptrdiff_t>(quota[c]));
        }
    }

    std::sort(out.train.begin(), out.train.end());
    std::vector<bool> in_train(labels.size(), false);
    for (int v : out.train) in_train[static_cast<std::size_t>(v)] = true;
    for (int v : labeled)
        if (!in_train[static_cast<std::size_t>(v)]) out.test.push_back(v);
    return out;
}

std::uint64_t run_seed_for(const TrainConfig& config, int run) {
    return derive_seed(config.seed, static_cast<std::uint64_t>(run));
}

SplitSets split_for_run(const TrainConfig& config, const std::vector<int>& labels, int run) {
    return split_nodes(labels, config.train_fraction,
                       derive_seed(run_seed_for(config, run), kStreamSplit));
}

RunResult train_run(const TrainConfig& config, const PreparedDataset& ds,
                    std::uint64_t run_seed) {
    config.validate(false);
    const int num_classes = ds.data.num_classes;
    if (num_classes < 2) throw ValidationError("training requires labeled data with >= 2 classes");

    RunResult rr;
    rr.run_seed = run_seed;
    rr.split = split_nodes(ds.data.labels, config.train_fraction,
                           derive_seed(run_seed, kStreamSplit));

    std::vector<std::size_t> dims;
    dims.push_back(ds.features.cols());
    for (std::size_t h : config.resolved_hidden(num_classes)) dims.push_back(h);
    dims.push_back(static_cast<std::size_t>(num_classes));

    rr.params = init_params(dims, derive_seed(run_seed, kStreamInit));
    AdamState opt;
    const std::vector<double> decay = {config.weight_decay}; // first layer only
    const std::uint64_t dropout_base = derive_seed(run_seed, kStreamDropout);

    rr.losses.reserve(static_cast<std::size_t>(config.epochs));
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        ForwardResult fwd =
            forward(ds.prop.values, ds.features, rr.params, config.dropout,
                    derive_seed(dropout_base, static_cast<std::uint64_t>(epoch)), true);
        const double loss = masked_cross_entropy(fwd.probs, ds.data.labels, rr.split.train);
        if (!std::isfinite(loss)) {
            std::ostringstream os;
            os << "non-finite training loss at epoch " << epoch;
            throw NumericError(os.str());
        }
        rr.losses.push_back(loss);
        const GradientSet grads = backward(fwd, rr.params, ds.data.labels, rr.split.train);
        adam_step(rr.params, grads, config.lr, decay, opt);
    }

    rr.accuracy = evaluate(rr.params, ds.prop.values, ds.features, ds.data.labels,
                           rr.split.test);
    return rr;
}

RunResult train(const TrainConfig& config, const DirectedGraph& g, const NodeData& nd) {
    const PreparedDataset ds = prepare_dataset(g, nd, config.propagation);
    return train_run(config, ds, run_seed_for(config, 0));
}

double evaluate(const ModelParams& params, const DenseMatrix& a_hat, const DenseMatrix& x,
                const std::vector<int>& labels, const std::vector<int>& test_nodes) {
    if (test_nodes.empty()) throw ValidationError("evaluate: test set is empty");
    const ForwardResult fwd = forward(a_hat, x, params, 0.0, 0, false);
    const std::vector<int> pred = argmax_rows(fwd.probs);
    std::size_t correct = 0;
    for (int v : test_nodes) {
        if (labels[static_cast<std::size_t>(v)] < 0)
            throw ValidationError("evaluate: test node without a label");
        if (pred[static_cast<std::size_t>(v)] == labels[static_cast<std::size_t>(v)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test_nodes.size());
}

namespace {

// regularized incomplete beta via Lentz continued fraction
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16, kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, int df) {
    const double x = static_cast<double>(df) / (static_cast<double>(df) + t * t);
    const double tail = 0.5 * reg_inc_beta(0.5 * static_cast<double>(df), 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

} // namespace

double student_t_quantile975(int df) {
    if (df < 1) throw ValidationError("degrees of freedom must be >= 1");
    double lo = 0.0, hi = 1e8;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, df) < 0.975) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> confidence_interval(const std::vector<double>& accuracies) {
    const std::size_t k = accuracies.size();
    if (k < 2) throw ValidationError("confidence interval needs at least 2 runs");
    const double mean = std::accumulate(accuracies.begin(), accuracies.end(), 0.0) /
                        static_cast<double>(k);
    double ss = 0.0;
    for (double a : accuracies) ss += (a - mean) * (a - mean);
    const double stddev = std::sqrt(ss / static_cast<double>(k - 1));
    const double half = student_t_quantile975(static_cast<int>(k) - 1) * stddev /
                        std::sqrt(static_cast<double>(k));
    return {mean, half};
}

ExperimentResult run_experiment(const TrainConfig& config, const DirectedGraph& g,
                                const NodeData& nd) {
    config.validate(false);
    const PreparedDataset ds = prepare_dataset(g, nd, config.propagation);

    ExperimentResult result;
    result.runs.resize(static_cast<std::size_t>(config.runs));

    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(config.runs));
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int r = static_cast<int>(w); r < config.runs; r += static_cast<int>(workers))
                    result.runs[static_cast<std::size_t>(r)] =
                        train_run(config, ds, run_seed_for(config, r));
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<double> accs;
    accs.reserve(result.runs.size());
    for (const RunResult& rr : result.runs) accs.push_back(rr.accuracy);
    if (accs.size() >= 2) {
        std::tie(result.mean_accuracy, result.ci_half_width) = confidence_interval(accs);
    } else {
        result.mean_accuracy = accs[0];
        result.ci_half_width = 0.0;
    }
    return result;
}

void save_params(const ModelParams& params, const std::string& path) {
    params.validate();
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "dgcn-checkpoint v1\n";
    out << "depth " << params.depth() << "\n";
    out << "dims";
    for (std::size_t d : params.dims) out << ' ' << d;
    out << "\n";
    for (std::size_t k = 0; k < params.depth(); ++k) {
        const DenseMatrix& w = params.weights[k];
        out << "layer " << k << ' ' << w.rows() << ' ' << w.cols() << "\n";
        for (std::size_t i = 0; i < w.rows(); ++i) {
            for (std::size_t j = 0; j < w.cols(); ++j) {
                if (j) out << ' ';
                out << format_double(w(i, j));
            }
            out << "\n";
        }
    }
}

ModelParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open checkpoint: " + path);
    std::string header;
    std::getline(in, header);
    if (header != "dgcn-checkpoint v1")
        throw ParseError("unrecognized checkpoint header: '" + header + "'");
    std::string word;
    std::size_t depth;
    if (!(in >> word >> depth) || word != "depth")
        throw ParseError("checkpoint: expected 'depth <L>'");
    ModelParams p;
    if (!(in >> word) || word != "dims") throw ParseError("checkpoint: expected 'dims ...'");
    p.dims.resize(depth + 1);
    for (auto& d : p.dims)
        if (!(in >> d)) throw ParseError("checkpoint: truncated dims");
    for (std::size_t k = 0; k < depth; ++k) {
        std::size_t idx, rows, cols;
        if (!(in >> word >> idx >> rows >> cols) || word != "layer" || idx != k)
            throw ParseError("checkpoint: expected 'layer " + std::to_string(k) + " rows cols'");
        DenseMatrix w(rows, cols);
        for (std::size_t i = 0; i < w.size(); ++i)
            if (!(in >> w.data()[i])) throw ParseError("checkpoint: truncated layer values");
        p.weights.push_back(std::move(w));
    }
    p.validate();
    return p;
}

namespace {

nlohmann::json config_to_json(const TrainConfig& c) {
    nlohmann::json j;
    j["edgelist"] = c.edgelist;
    j["labels"] = c.labels;
    j["features"] = c.features;
    j["weighted"] = c.weighted;
    j["model_depth"] = c.model_depth;
    j["hidden_dims"] = c.hidden_dims;
    j["lr"] = c.lr;
    j["dropout"] = c.dropout;
    j["weight_decay"] = c.weight_decay;
    j["epochs"] = c.epochs;
    j["seed"] = c.seed;
    j["train_fraction"] = c.train_fraction;
    j["propagation"] = to_string(c.propagation);
    j["runs"] = c.runs;
    j["out_dir"] = c.out_dir;
    return j;
}

} // namespace

std::string config_json_string(const TrainConfig& config) {
    return config_to_json(config).dump();
}

void write_results_json(const TrainConfig& config, const ExperimentResult& result,
                        const std::string& path) {
    nlohmann::json j;
    j["format"] = "dgcn-results v1";
    j["config"] = config_to_json(config);
    nlohmann::json runs = nlohmann::json::array();
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
        nlohmann::json jr;
        jr["run"] = r;
        jr["seed"] = result.runs[r].run_seed;
        jr["accuracy"] = result.runs[r].accuracy;
        jr["losses"] = result.runs[r].losses;
        runs.push_back(std::move(jr));
    }
    j["runs"] = std::move(runs);
    j["num_runs"] = result.runs.size();
    j["mean_accuracy"] = result.mean_accuracy;
    j["ci_half_width"] = result.ci_half_width;

    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

std::string format_results_table(
    const std::vector<std::pair<std::string, ExperimentResult>>& rows) {
    std::ostringstream os;
    os << "method          accuracy (%)\n";
    for (const auto& [name, res] : rows) {
        os << name;
        for (std::size_t i = name.size(); i < 16; ++i) os << ' ';
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.2f +- %.2f", 100.0 * res.mean_accuracy,
                      100.0 * res.ci_half_width);
        os << buf << '\n';
    }
    return os.str();
}

} // namespace dgcn
