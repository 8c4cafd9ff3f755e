#pragma once

#include "dcfwb/graph.hpp"

#include <cstddef>
#include <vector>

namespace dcfwb {

// Gadget sizes.
inline constexpr std::size_t kTagNodes = 5;        // coding node + K4
inline constexpr std::size_t kTagEdges = 7;        // K4 + pendant
inline constexpr std::size_t kEdgePathLength = 6;  // adjacent coding nodes
inline constexpr std::size_t kPlainPathLength = 9; // non-adjacent coding nodes

// Node i of G becomes coding node 5i with K4 {5i+1..5i+4}, 5i+1 pendant to 5i.
// Pairs (m, n), m < n, in lexicographic order then get a path of length 6 (edge)
// or 9 (non-edge) whose interior nodes are appended.
Graph encode_comp_to_enum(const Graph& g);
inline Node coding_node(Node i) { return static_cast<Node>(kTagNodes * i); }

struct DecodeResult {
    Graph graph;                 // decoded nodes in order of discovery
    std::vector<Node> coding;    // stream label of each decoded node
    std::size_t undecided = 0;   // coding pairs without a length-6 or length-9 path yet
    std::size_t stages_used = 0;
    bool incomplete = false;     // no tag appeared within the budget
};

// Streams the stages (at most stage_budget of them) and decodes as they arrive.
DecodeResult decode_enum_to_comp(const EdgeStream& stream, std::size_t stage_budget);
inline DecodeResult decode_enum_to_comp(const EdgeStream& stream) {
    return decode_enum_to_comp(stream, stream.stage_count());
}

// Node n of the enumerated graph becomes y_n = 5n with a K4 tag; each edge, at
// the stage it is first enumerated, gets a fresh witness adjacent to both ends.
Graph encode_enum_to_comp(const EdgeStream& stream);

// Scans nodes in label order; tags are named as their last member is seen,
// edges are emitted as witnesses between named nodes are found.
EdgeStream decode_comp_to_enum(const Graph& g);

// Minimum over ordered triples of distinct coding nodes (a, c, b) of
// dist(a, c) + dist(c, b); a lower bound for any a-b path through c.
std::size_t min_detour_length(const Graph& h, std::size_t coding_nodes);

// All 4-cliques, each sorted, in lexicographic order.
std::vector<std::vector<Node>> four_cliques(const Graph& g);

} // namespace dcfwb
