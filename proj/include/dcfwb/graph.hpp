#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace dcfwb {

using Node = std::uint32_t;
using Edge = std::pair<Node, Node>; // first < second

// Finite symmetric irreflexive graph with edges stored sorted.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t nodes) : n_(nodes) {}
    Graph(std::size_t nodes, std::vector<Edge> edges);

    std::size_t node_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }

    Node add_node() { return static_cast<Node>(n_++); }
    void add_edge(Node a, Node b);
    bool has_edge(Node a, Node b) const;

    std::vector<std::vector<Node>> adjacency() const;
    std::vector<std::size_t> degrees() const;
    // Image under the node map perm (perm[old] = new).
    Graph relabeled(const std::vector<Node>& perm) const;

    bool operator==(const Graph& o) const { return n_ == o.n_ && edges_ == o.edges_; }

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
};

Edge make_edge(Node a, Node b);

// All labeled graphs on n nodes, n <= 6.
std::vector<Graph> all_graphs(std::size_t n);
Graph random_graph(std::size_t n, double p, std::mt19937_64& rng);
std::vector<Node> random_permutation(std::size_t n, std::mt19937_64& rng);

Graph cycle_graph(std::size_t n);
Graph path_graph(std::size_t n);
Graph complete_graph(std::size_t n);

// Isomorphism by backtracking with degree pruning; the witness maps a's nodes to b's.
struct IsoResult {
    bool isomorphic = false;
    std::vector<Node> witness;
};
constexpr std::size_t kIsoNodeCap = 24;
IsoResult iso_check(const Graph& a, const Graph& b);
bool isomorphic(const Graph& a, const Graph& b);

// Brute-force automorphism group (all permutations), n <= 8.
std::vector<std::vector<Node>> automorphisms(const Graph& g);

// Cumulative enumeration: stages[s] is a subset of stages[s+1].
struct EdgeStream {
    std::size_t nodes = 0;
    std::vector<std::vector<Edge>> stages;

    std::size_t stage_count() const { return stages.size(); }
    Graph final_graph() const;
    bool monotone() const;
};

EdgeStream single_stage(const Graph& g);
// Relabels g by a random permutation and reveals its edges in random order
// over `stages` cumulative stages.
EdgeStream random_stream(const Graph& g, std::size_t stages, std::mt19937_64& rng);

} // namespace dcfwb
