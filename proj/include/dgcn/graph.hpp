#ifndef DGCN_GRAPH_HPP_
#define DGCN_GRAPH_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dgcn {

struct Edge {
    int src;
    int dst;
    double weight;
};

/// Weighted directed graph over dense node indices 0..n-1.
///
/// Immutable after construction. Edges are stored sorted by (src, dst) with
/// at most one entry per pair; duplicate input edges have summed weights and
/// zero-weight edges are dropped at ingest. Original node identifiers (the
/// ids seen in input files) are retained so labels and features can be
/// joined after re-indexing.
class DirectedGraph {
public:
    DirectedGraph() = default;

    /// Validates, drops zero weights, merges duplicates (weights sum),
    /// sorts. `node_ids` maps dense index -> original id; empty means
    /// "0".."n-1". Throws ValidationError on negative weight or an index
    /// outside [0, n).
    static DirectedGraph from_edges(int n, std::vector<Edge> edges,
                                    std::vector<std::string> node_ids = {});

    int node_count() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::string>& node_ids() const { return node_ids_; }

    /// Dense index of an original id, or -1 if unknown.
    int index_of(const std::string& original_id) const;

    double total_weight() const;
    std::vector<double> weighted_out_degrees() const;

    /// Out-edges of node u as a slice of edges() (CSR row).
    std::span<const Edge> out_edges(int u) const {
        return {edges_.data() + row_ptr_[u],
                edges_.data() + row_ptr_[static_cast<std::size_t>(u) + 1]};
    }

private:
    int n_ = 0;
    std::vector<Edge> edges_;             // sorted by (src, dst), unique pairs
    std::vector<std::size_t> row_ptr_;    // n+1 offsets into edges_
    std::vector<std::string> node_ids_;   // dense index -> original id
};

/// Per-node labels and feature rows aligned with a graph's dense indices.
struct NodeData {
    std::vector<int> labels;       // class index in [0, C), or -1 when absent
    std::size_t feature_width = 0; // F_in; 0 means no raw features
    std::vector<double> features;  // n x feature_width, row-major
    int num_classes = 0;           // 0 when no labels present

    void validate(int n) const;
};

/// Nodes grouped into strongly connected components. Each component's nodes
/// are ascending; components are ordered by their smallest node index.
struct SccPartition {
    std::vector<int> component_of;          // node -> component index
    std::vector<std::vector<int>> components;
};

/// Reads "src dst [weight]" lines; '#'-prefixed lines and blank lines are
/// ignored; node ids may be arbitrary tokens and are densely re-indexed in
/// first-seen order. weighted=false binarizes: every distinct (src, dst)
/// pair ends up with weight 1 regardless of multiplicity or stated weights.
DirectedGraph load_edgelist(const std::string& path, bool weighted);

/// One "src_id dst_id weight" line per edge, original ids, exact weights.
void write_edgelist(const DirectedGraph& g, const std::string& path);

/// Same node-id set and same (src_id, dst_id) -> weight map.
bool graphs_equal_by_ids(const DirectedGraph& a, const DirectedGraph& b);

SccPartition strongly_connected_components(const DirectedGraph& g);

bool is_strongly_connected(const DirectedGraph& g);

/// Subgraph induced on `nodes` (ascending dense indices), re-indexed densely
/// preserving relative order. Original ids carried over.
DirectedGraph induced_subgraph(const DirectedGraph& g, const std::vector<int>& nodes);

/// Nodes of the largest SCC. Ties: most induced edges, then the component
/// containing the smallest original node id.
std::vector<int> largest_scc_nodes(const DirectedGraph& g);

DirectedGraph largest_scc_subgraph(const DirectedGraph& g);

/// Adds 1 to every diagonal entry of the weight matrix.
DirectedGraph add_self_loops(const DirectedGraph& g);

/// Labels file: "node_id class_index" lines. Features file: "node_id v1 ..
/// vF" lines; pass "" for no features (F_in = 0). Ids not present in g are
/// skipped with a warning. Every node of g must have a feature row when a
/// features file is given.
NodeData load_node_data(const DirectedGraph& g, const std::string& labels_path,
                        const std::string& features_path);

/// Rows of `nd` restricted to `nodes`, in order. Class count is preserved.
NodeData subset_node_data(const NodeData& nd, const std::vector<int>& nodes);

void write_labels(const DirectedGraph& g, const NodeData& nd, const std::string& path);
void write_features(const DirectedGraph& g, const NodeData& nd, const std::string& path);

} // namespace dgcn

#endif // DGCN_GRAPH_HPP_
