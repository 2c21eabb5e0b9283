#include "dgcn/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "dgcn/error.hpp"
#include "dgcn/log.hpp"
#include "dgcn/matrix.hpp"

namespace dgcn {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

/// Numeric order for all-digit ids, lexicographic otherwise; digits first.
bool natural_less(const std::string& a, const std::string& b) {
    const bool da = all_digits(a), db = all_digits(b);
    if (da != db) return da;
    if (da) {
        if (a.size() != b.size()) return a.size() < b.size();
    }
    return a < b;
}

std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

double parse_weight(const std::string& tok, std::size_t line_no) {
    double w;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), w);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        std::ostringstream os;
        os << "line " << line_no << ": bad weight '" << tok << "'";
        throw ParseError(os.str());
    }
    return w;
}

} // namespace

DirectedGraph DirectedGraph::from_edges(int n, std::vector<Edge> edges,
                                        std::vector<std::string> node_ids) {
    if (n < 0) throw ValidationError("negative node count");
    if (node_ids.empty()) {
        node_ids.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) node_ids.push_back(std::to_string(i));
    } else if (static_cast<int>(node_ids.size()) != n) {
        throw ValidationError("node_ids size does not match node count");
    }

    for (const Edge& e : edges) {
        if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
            throw ValidationError("edge endpoint outside [0, n)");
        if (e.weight < 0.0)
            throw ValidationError("negative edge weight");
    }

    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });

    std::vector<Edge> merged;
    merged.reserve(edges.size());
    for (const Edge& e : edges) {
        if (!merged.empty() && merged.back().src == e.src && merged.back().dst == e.dst)
            merged.back().weight += e.weight;
        else
            merged.push_back(e);
    }
    std::erase_if(merged, [](const Edge& e) { return e.weight == 0.0; });

    DirectedGraph g;
    g.n_ = n;
    g.edges_ = std::move(merged);
    g.node_ids_ = std::move(node_ids);
    g.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const Edge& e : g.edges_) ++g.row_ptr_[static_cast<std::size_t>(e.src) + 1];
    for (std::size_t i = 1; i < g.row_ptr_.size(); ++i) g.row_ptr_[i] += g.row_ptr_[i - 1];
    return g;
}

int DirectedGraph::index_of(const std::string& original_id) const {
    for (int i = 0; i < n_; ++i)
        if (node_ids_[static_cast<std::size_t>(i)] == original_id) return i;
    return -1;
}

double DirectedGraph::total_weight() const {
    double s = 0.0;
    for (const Edge& e : edges_) s += e.weight;
    return s;
}

std::vector<double> DirectedGraph::weighted_out_degrees() const {
    std::vector<double> d(static_cast<std::size_t>(n_), 0.0);
    for (const Edge& e : edges_) d[static_cast<std::size_t>(e.src)] += e.weight;
    return d;
}

DirectedGraph load_edgelist(const std::string& path, bool weighted) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open edgelist: " + path);

    std::unordered_map<std::string, int> index;
    std::vector<std::string> ids;
    auto intern = [&](const std::string& id) {
        auto [it, inserted] = index.try_emplace(id, static_cast<int>(ids.size()));
        if (inserted) ids.push_back(id);
        return it->second;
    };

    std::vector<Edge> edges;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto toks = split_tokens(line);
        if (toks.size() != 2 && toks.size() != 3) {
            std::ostringstream os;
            os << "line " << line_no << ": expected 'src dst' or 'src dst weight', got "
               << toks.size() << " fields";
            throw ParseError(os.str());
        }
        double w = 1.0;
        if (toks.size() == 3) {
            w = parse_weight(toks[2], line_no);
            if (w < 0.0) {
                std::ostringstream os;
                os << "line " << line_no << ": negative weight " << toks[2];
                throw ValidationError(os.str());
            }
            if (!weighted && w > 0.0) w = 1.0;
        }
        edges.push_back({intern(toks[0]), intern(toks[1]), w});
    }

    const int n = static_cast<int>(ids.size());
    DirectedGraph g = DirectedGraph::from_edges(n, std::move(edges), std::move(ids));
    if (!weighted) {
        // binarize: duplicate pairs were merged above, force weight 1
        std::vector<Edge> bin = g.edges();
        for (Edge& e : bin) e.weight = 1.0;
        g = DirectedGraph::from_edges(g.node_count(), std::move(bin), g.node_ids());
    }
    return g;
}

void write_edgelist(const DirectedGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    const auto& ids = g.node_ids();
    for (const Edge& e : g.edges())
        out << ids[static_cast<std::size_t>(e.src)] << ' '
            << ids[static_cast<std::size_t>(e.dst)] << ' '
            << format_double(e.weight) << '\n';
}

bool graphs_equal_by_ids(const DirectedGraph& a, const DirectedGraph& b) {
    if (a.node_count() != b.node_count() || a.edges().size() != b.edges().size())
        return false;
    auto key_set = [](const DirectedGraph& g) {
        std::vector<std::string> ids = g.node_ids();
        std::sort(ids.begin(), ids.end());
        return ids;
    };
    if (key_set(a) != key_set(b)) return false;
    auto edge_map = [](const DirectedGraph& g) {
        std::unordered_map<std::string, double> m;
        const auto& ids = g.node_ids();
        for (const Edge& e : g.edges())
            m[ids[static_cast<std::size_t>(e.src)] + "\t" +
              ids[static_cast<std::size_t>(e.dst)]] = e.weight;
        return m;
    };
    return edge_map(a) == edge_map(b);
}

SccPartition strongly_connected_components(const DirectedGraph& g) {
    const int n = g.node_count();
    constexpr int kUnvisited = -1;
    std::vector<int> index(static_cast<std::size_t>(n), kUnvisited);
    std::vector<int> lowlink(static_cast<std::size_t>(n), 0);
    std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
    std::vector<int> stack;
    std::vector<int> comp_of(static_cast<std::size_t>(n), -1);
    int next_index = 0;
    int comp_count = 0;

    // Tarjan, iterative: frame = (node, position within its out-edge row).
    struct Frame {
        int node;
        std::size_t edge_pos;
    };
    std::vector<Frame> call;

    for (int root = 0; root < n; ++root) {
        if (index[static_cast<std::size_t>(root)] != kUnvisited) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            Frame& f = call.back();
            const int v = f.node;
            if (f.edge_pos == 0) {
                index[static_cast<std::size_t>(v)] = next_index;
                lowlink[static_cast<std::size_t>(v)] = next_index;
                ++next_index;
                stack.push_back(v);
                on_stack[static_cast<std::size_t>(v)] = true;
            }
            auto row = g.out_edges(v);
            bool descended = false;
            while (f.edge_pos < row.size()) {
                const int w = row[f.edge_pos].dst;
                ++f.edge_pos;
                if (index[static_cast<std::size_t>(w)] == kUnvisited) {
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[static_cast<std::size_t>(w)])
                    lowlink[static_cast<std::size_t>(v)] = std::min(
                        lowlink[static_cast<std::size_t>(v)], index[static_cast<std::size_t>(w)]);
            }
            if (descended) continue;
            if (lowlink[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
                while (true) {
                    const int w = stack.back();
                    stack.pop_back();
                    on_stack[static_cast<std::size_t>(w)] = false;
                    comp_of[static_cast<std::size_t>(w)] = comp_count;
                    if (w == v) break;
                }
                ++comp_count;
            }
            call.pop_back();
            if (!call.empty()) {
                const int parent = call.back().node;
                lowlink[static_cast<std::size_t>(parent)] =
                    std::min(lowlink[static_cast<std::size_t>(parent)],
                             lowlink[static_cast<std::size_t>(v)]);
            }
        }
    }

    // Canonicalize: components ordered by smallest member, members ascending.
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(comp_count));
    for (int v = 0; v < n; ++v)
        groups[static_cast<std::size_t>(comp_of[static_cast<std::size_t>(v)])].push_back(v);
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    SccPartition part;
    part.components = std::move(groups);
    part.component_of.assign(static_cast<std::size_t>(n), -1);
    for (std::size_t c = 0; c < part.components.size(); ++c)
        for (int v : part.components[c])
            part.component_of[static_cast<std::size_t>(v)] = static_cast<int>(c);
    return part;
}

bool is_strongly_connected(const DirectedGraph& g) {
    if (g.node_count() == 0) return false;
    return strongly_connected_components(g).components.size() == 1;
}

DirectedGraph induced_subgraph(const DirectedGraph& g, const std::vector<int>& nodes) {
    std::vector<int> remap(static_cast<std::size_t>(g.node_count()), -1);
    std::vector<std::string> ids;
    ids.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        remap[static_cast<std::size_t>(nodes[i])] = static_cast<int>(i);
        ids.push_back(g.node_ids()[static_cast<std::size_t>(nodes[i])]);
    }
    std::vector<Edge> edges;
    for (const Edge& e : g.edges()) {
        const int s = remap[static_cast<std::size_t>(e.src)];
        const int d = remap[static_cast<std::size_t>(e.dst)];
        if (s >= 0 && d >= 0) edges.push_back({s, d, e.weight});
    }
    return DirectedGraph::from_edges(static_cast<int>(nodes.size()), std::move(edges),
                                     std::move(ids));
}

std::vector<int> largest_scc_nodes(const DirectedGraph& g) {
    if (g.node_count() == 0) throw ValidationError("empty graph has no strongly connected component");
    SccPartition part = strongly_connected_components(g);

    std::vector<std::size_t> induced_edges(part.components.size(), 0);
    for (const Edge& e : g.edges()) {
        const int cs = part.component_of[static_cast<std::size_t>(e.src)];
        if (cs == part.component_of[static_cast<std::size_t>(e.dst)])
            ++induced_edges[static_cast<std::size_t>(cs)];
    }

    auto min_id = [&](std::size_t c) {
        const std::string* best = nullptr;
        for (int v : part.components[c]) {
            const std::string& id = g.node_ids()[static_cast<std::size_t>(v)];
            if (!best || natural_less(id, *best)) best = &id;
        }
        return *best;
    };

    std::size_t best = 0;
    for (std::size_t c = 1; c < part.components.size(); ++c) {
        const std::size_t sz_b = part.components[best].size(), sz_c = part.components[c].size();
        if (sz_c != sz_b) {
            if (sz_c > sz_b) best = c;
            continue;
        }
        if (induced_edges[c] != induced_edges[best]) {
            if (induced_edges[c] > induced_edges[best]) best = c;
            continue;
        }
        if (natural_less(min_id(c), min_id(best))) best = c;
    }
    return part.components[best];
}

DirectedGraph largest_scc_subgraph(const DirectedGraph& g) {
    return induced_subgraph(g, largest_scc_nodes(g));
}

DirectedGraph add_self_loops(const DirectedGraph& g) {
    std::vector<Edge> edges = g.edges();
    for (int v = 0; v < g.node_count(); ++v) edges.push_back({v, v, 1.0});
    return DirectedGraph::from_edges(g.node_count(), std::move(edges), g.node_ids());
}

void NodeData::validate(int n) const {
    if (static_cast<int>(labels.size()) != n)
        throw ValidationError("labels size does not match node count");
    if (features.size() != static_cast<std::size_t>(n) * feature_width)
        throw ValidationError("features size does not match node count x width");
    bool any = false;
    for (int l : labels) {
        if (l < -1 || l >= num_classes)
            throw ValidationError("label outside [0, num_classes)");
        any = any || l >= 0;
    }
    if (any && num_classes < 2)
        throw ValidationError("at least 2 classes required when labels are present");
}

NodeData load_node_data(const DirectedGraph& g, const std::string& labels_path,
                        const std::string& features_path) {
    const int n = g.node_count();
    std::unordered_map<std::string, int> index;
    for (int i = 0; i < n; ++i) index[g.node_ids()[static_cast<std::size_t>(i)]] = i;

    NodeData nd;
    nd.labels.assign(static_cast<std::size_t>(n), -1);

    if (!labels_path.empty()) {
        std::ifstream in(labels_path);
        if (!in) throw Error("cannot open labels: " + labels_path);
        std::string line;
        std::size_t line_no = 0;
        std::size_t skipped = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            auto toks = split_tokens(line);
            if (toks.size() != 2) {
                std::ostringstream os;
                os << "line " << line_no << ": expected 'node_id class_index'";
                throw ParseError(os.str());
            }
            int cls;
            auto res = std::from_chars(toks[1].data(), toks[1].data() + toks[1].size(), cls);
            if (res.ec != std::errc{} || res.ptr != toks[1].data() + toks[1].size() || cls < 0) {
                std::ostringstream os;
                os << "line " << line_no << ": bad class index '" << toks[1] << "'";
                throw ParseError(os.str());
            }
            auto it = index.find(toks[0]);
            if (it == index.end()) {
                ++skipped;
                continue;
            }
            nd.labels[static_cast<std::size_t>(it->second)] = cls;
            nd.num_classes = std::max(nd.num_classes, cls + 1);
        }
        if (skipped)
            log::warn("labels: %zu entries refer to nodes not in the graph, skipped", skipped);
    }

    if (!features_path.empty()) {
        std::ifstream in(features_path);
        if (!in) throw Error("cannot open features: " + features_path);
        std::string line;
        std::size_t line_no = 0;
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
        std::size_t width = 0;
        bool width_set = false;
        std::size_t skipped = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            auto toks = split_tokens(line);
            if (toks.size() < 2) {
                std::ostringstream os;
                os << "line " << line_no << ": expected 'node_id v1 ... vF'";
                throw ParseError(os.str());
            }
            auto it = index.find(toks[0]);
            if (it == index.end()) {
                ++skipped;
                continue;
            }
            std::vector<double> vals;
            vals.reserve(toks.size() - 1);
            for (std::size_t k = 1; k < toks.size(); ++k)
                vals.push_back(parse_weight(toks[k], line_no));
            if (!width_set) {
                width = vals.size();
                width_set = true;
            } else if (vals.size() != width) {
                std::ostringstream os;
                os << "line " << line_no << ": feature width " << vals.size()
                   << " differs from " << width;
                throw ValidationError(os.str());
            }
            seen[static_cast<std::size_t>(it->second)] = true;
            rows[static_cast<std::size_t>(it->second)] = std::move(vals);
        }
        if (skipped)
            log::warn("features: %zu entries refer to nodes not in the graph, skipped", skipped);
        for (int i = 0; i < n; ++i)
            if (!seen[static_cast<std::size_t>(i)])
                throw ValidationError("missing feature row for node id " +
                                      g.node_ids()[static_cast<std::size_t>(i)]);
        nd.feature_width = width;
        nd.features.reserve(static_cast<std::size_t>(n) * width);
        for (const auto& r : rows) nd.features.insert(nd.features.end(), r.begin(), r.end());
    }

    nd.validate(n);
    return nd;
}

NodeData subset_node_data(const NodeData& nd, const std::vector<int>& nodes) {
    NodeData out;
    out.feature_width = nd.feature_width;
    out.num_classes = nd.num_classes;
    out.labels.reserve(nodes.size());
    out.features.reserve(nodes.size() * nd.feature_width);
    for (int v : nodes) {
        out.labels.push_back(nd.labels[static_cast<std::size_t>(v)]);
        const auto* row = nd.features.data() + static_cast<std::size_t>(v) * nd.feature_width;
        out.features.insert(out.features.end(), row, row + nd.feature_width);
    }
    return out;
}

void write_labels(const DirectedGraph& g, const NodeData& nd, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    for (int i = 0; i < g.node_count(); ++i)
        if (nd.labels[static_cast<std::size_t>(i)] >= 0)
            out << g.node_ids()[static_cast<std::size_t>(i)] << ' '
                << nd.labels[static_cast<std::size_t>(i)] << '\n';
}

void write_features(const DirectedGraph& g, const NodeData& nd, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    for (int i = 0; i < g.node_count(); ++i) {
        out << g.node_ids()[static_cast<std::size_t>(i)];
        const auto* row = nd.features.data() + static_cast<std::size_t>(i) * nd.feature_width;
        for (std::size_t j = 0; j < nd.feature_width; ++j) out << ' ' << format_double(row[j]);
        out << '\n';
    }
}

} // namespace dgcn
