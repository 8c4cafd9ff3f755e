#include "dcfwb/graph.hpp"

#include "dcfwb/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace dcfwb {

Edge make_edge(Node a, Node b) {
    if (a == b)
        throw InvalidInput("self-loop on node " + std::to_string(a));
    return a < b ? Edge{a, b} : Edge{b, a};
}

Graph::Graph(std::size_t nodes, std::vector<Edge> edges) : n_(nodes) {
    for (auto [a, b] : edges)
        add_edge(a, b);
}

void Graph::add_edge(Node a, Node b) {
    Edge e = make_edge(a, b);
    if (e.second >= n_)
        throw InvalidInput("edge endpoint out of range: " + std::to_string(e.second));
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    if (it == edges_.end() || *it != e)
        edges_.insert(it, e);
}

bool Graph::has_edge(Node a, Node b) const {
    if (a == b)
        return false;
    return std::binary_search(edges_.begin(), edges_.end(), make_edge(a, b));
}

std::vector<std::vector<Node>> Graph::adjacency() const {
    std::vector<std::vector<Node>> adj(n_);
    for (auto [a, b] : edges_) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& v : adj)
        std::sort(v.begin(), v.end());
    return adj;
}

std::vector<std::size_t> Graph::degrees() const {
    std::vector<std::size_t> d(n_, 0);
    for (auto [a, b] : edges_) {
        ++d[a];
        ++d[b];
    }
    return d;
}

Graph Graph::relabeled(const std::vector<Node>& perm) const {
    Graph g(n_);
    std::vector<Edge> es;
    for (auto [a, b] : edges_)
        es.push_back(make_edge(perm[a], perm[b]));
    std::sort(es.begin(), es.end());
    g.edges_ = std::move(es);
    return g;
}

std::vector<Graph> all_graphs(std::size_t n) {
    if (n > 6)
        throw CapOverflow("exhaustive graph enumeration is limited to 6 nodes");
    std::vector<Edge> pairs;
    for (Node a = 0; a < n; ++a)
        for (Node b = a + 1; b < n; ++b)
            pairs.push_back({a, b});
    std::vector<Graph> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
        std::vector<Edge> es;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (mask >> i & 1)
                es.push_back(pairs[i]);
        out.emplace_back(n, es);
    }
    return out;
}

Graph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    Graph g(n);
    for (Node a = 0; a < n; ++a)
        for (Node b = a + 1; b < n; ++b)
            if (coin(rng))
                g.add_edge(a, b);
    return g;
}

std::vector<Node> random_permutation(std::size_t n, std::mt19937_64& rng) {
    std::vector<Node> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

Graph cycle_graph(std::size_t n) {
    Graph g(n);
    for (Node i = 0; i < n; ++i)
        g.add_edge(i, static_cast<Node>((i + 1) % n));
    return g;
}

Graph path_graph(std::size_t n) {
    Graph g(n);
    for (Node i = 0; i + 1 < n; ++i)
        g.add_edge(i, i + 1);
    return g;
}

Graph complete_graph(std::size_t n) {
    Graph g(n);
    for (Node a = 0; a < n; ++a)
        for (Node b = a + 1; b < n; ++b)
            g.add_edge(a, b);
    return g;
}

namespace {

struct IsoSearch {
    const std::vector<std::vector<char>>& A;
    const std::vector<std::vector<char>>& B;
    const std::vector<std::size_t>& da;
    const std::vector<std::size_t>& db;
    std::vector<Node> order; // a-nodes in assignment order
    std::vector<long> map_a, map_b;

    bool run(std::size_t k) {
        if (k == order.size())
            return true;
        Node u = order[k];
        for (Node v = 0; v < db.size(); ++v) {
            if (map_b[v] >= 0 || da[u] != db[v])
                continue;
            bool ok = true;
            for (std::size_t j = 0; j < k && ok; ++j) {
                Node w = order[j];
                ok = A[u][w] == B[v][map_a[w]];
            }
            if (!ok)
                continue;
            map_a[u] = v;
            map_b[v] = u;
            if (run(k + 1))
                return true;
            map_a[u] = -1;
            map_b[v] = -1;
        }
        return false;
    }
};

std::vector<std::vector<char>> matrix(const Graph& g) {
    std::vector<std::vector<char>> m(g.node_count(), std::vector<char>(g.node_count(), 0));
    for (auto [a, b] : g.edges())
        m[a][b] = m[b][a] = 1;
    return m;
}

} // namespace

IsoResult iso_check(const Graph& a, const Graph& b) {
    if (a.node_count() > kIsoNodeCap || b.node_count() > kIsoNodeCap)
        throw CapOverflow("iso_check is limited to " + std::to_string(kIsoNodeCap) + " nodes");
    IsoResult r;
    if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count())
        return r;
    auto da = a.degrees(), db = b.degrees();
    auto sa = da, sb = db;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb)
        return r;
    auto A = matrix(a), B = matrix(b);
    IsoSearch s{A, B, da, db, {}, std::vector<long>(a.node_count(), -1), std::vector<long>(b.node_count(), -1)};
    // Assign high-degree nodes first, then by label.
    s.order.resize(a.node_count());
    std::iota(s.order.begin(), s.order.end(), 0);
    std::stable_sort(s.order.begin(), s.order.end(), [&](Node x, Node y) { return da[x] > da[y]; });
    if (s.run(0)) {
        r.isomorphic = true;
        for (long v : s.map_a)
            r.witness.push_back(static_cast<Node>(v));
    }
    return r;
}

bool isomorphic(const Graph& a, const Graph& b) { return iso_check(a, b).isomorphic; }

std::vector<std::vector<Node>> automorphisms(const Graph& g) {
    if (g.node_count() > 8)
        throw CapOverflow("automorphism enumeration is limited to 8 nodes");
    std::vector<Node> p(g.node_count());
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<Node>> out;
    do {
        if (g.relabeled(p) == g)
            out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

Graph EdgeStream::final_graph() const {
    Graph g(nodes);
    if (!stages.empty())
        for (auto [a, b] : stages.back())
            g.add_edge(a, b);
    return g;
}

bool EdgeStream::monotone() const {
    for (std::size_t s = 0; s + 1 < stages.size(); ++s) {
        std::set<Edge> next(stages[s + 1].begin(), stages[s + 1].end());
        for (const auto& e : stages[s])
            if (!next.count(e))
                return false;
    }
    return true;
}

EdgeStream single_stage(const Graph& g) { return {g.node_count(), {g.edges()}}; }

EdgeStream random_stream(const Graph& g, std::size_t stages, std::mt19937_64& rng) {
    if (stages == 0)
        throw InvalidInput("a stream needs at least one stage");
    Graph h = g.relabeled(random_permutation(g.node_count(), rng));
    std::vector<Edge> order = h.edges();
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> cuts;
    std::uniform_int_distribution<std::size_t> pick(0, order.size());
    for (std::size_t s = 0; s + 1 < stages; ++s)
        cuts.push_back(pick(rng));
    cuts.push_back(order.size());
    std::sort(cuts.begin(), cuts.end());
    EdgeStream out;
    out.nodes = h.node_count();
    for (std::size_t c : cuts)
        out.stages.emplace_back(order.begin(), order.begin() + static_cast<long>(c));
    return out;
}

} // namespace dcfwb
