#pragma once

#include "dcfwb/graph.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dcfwb {

// Two-sorted model: A = {0..a_count-1}; above each ordered pair (a, b) a
// fiber of dims(a, b) Z-chains. Unlisted pairs have dimension 1.
class TModel {
public:
    TModel() = default;
    explicit TModel(std::size_t a_count) : a_count_(a_count) {}

    std::size_t a_count() const { return a_count_; }
    std::size_t dim(Node a, Node b) const;
    void set_dim(Node a, Node b, std::size_t d);
    // Pairs with dimension other than 1.
    const std::map<std::pair<Node, Node>, std::size_t>& nondefault() const { return dims_; }

    bool operator==(const TModel& o) const { return a_count_ == o.a_count_ && dims_ == o.dims_; }

private:
    std::size_t a_count_ = 0;
    std::map<std::pair<Node, Node>, std::size_t> dims_;
};

// dims(a, b) = dims(b, a) = 2 on edges, 1 elsewhere (including a = b).
TModel encode_graph(const Graph& g);
// Throws InvalidInput when a dimension lies outside {1, 2} or is asymmetric.
Graph decode_graph(const TModel& m);

struct FPoint {
    Node a, b;
    std::size_t chain;
    long offset; // in [-w, w]
};

// Elements 0..a_count-1 are the A-sort; the rest are F-points. pi1/pi2/succ
// are indexed by F-point number.
struct TFragment {
    std::size_t a_count = 0;
    long window = 0;
    std::vector<FPoint> points;
    std::vector<Node> pi1, pi2;
    std::vector<std::optional<std::size_t>> succ; // S, undefined at the right end of a window

    std::size_t element_count() const { return a_count + points.size(); }
};

TFragment materialize(const TModel& m, long w);

// Violated axioms on the fragment, empty when all hold.
std::vector<std::string> check_axioms(const TFragment& f, const TModel& m);

// Permutations p of A (p[a] = image) with dims(p a, p b) = dims(a, b) for all a, b.
std::vector<std::vector<Node>> count_extendable_perms(const TModel& m);

} // namespace dcfwb
