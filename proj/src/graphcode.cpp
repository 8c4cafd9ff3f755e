#include "dcfwb/graphcode.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>

namespace dcfwb {

Graph encode_comp_to_enum(const Graph& g) {
    std::size_t n = g.node_count();
    Graph h(kTagNodes * n);
    for (Node i = 0; i < n; ++i) {
        Node x = coding_node(i);
        for (Node a = 1; a <= 4; ++a)
            for (Node b = a + 1; b <= 4; ++b)
                h.add_edge(x + a, x + b);
        h.add_edge(x, x + 1);
    }
    for (Node m = 0; m < n; ++m)
        for (Node k = m + 1; k < n; ++k) {
            std::size_t len = g.has_edge(m, k) ? kEdgePathLength : kPlainPathLength;
            Node prev = coding_node(m);
            for (std::size_t step = 1; step < len; ++step) {
                Node mid = h.add_node();
                h.add_edge(prev, mid);
                prev = mid;
            }
            h.add_edge(prev, coding_node(k));
        }
    return h;
}

namespace {

class StreamDecoder {
public:
    void add_edge(Edge e) {
        grow(e.second + 1);
        if (!adj_[e.first].insert(e.second).second)
            return;
        adj_[e.second].insert(e.first);
        find_tags(e.first, e.second);
    }

    void label_tags() {
        for (auto& t : tags_) {
            if (t.coding)
                continue;
            for (Node m : t.members)
                for (Node v : adj_[m])
                    if (!std::binary_search(t.members.begin(), t.members.end(), v) && !t.coding) {
                        t.coding = v;
                        index_[v] = coding_.size();
                        coding_.push_back(v);
                    }
        }
    }

    void decide_pairs() {
        for (std::size_t i = 0; i < coding_.size(); ++i) {
            bool pending = false;
            for (std::size_t j = 0; j < coding_.size(); ++j)
                pending |= j != i && !decided_.count(key(i, j));
            if (!pending)
                continue;
            auto dist = bfs(coding_[i]);
            for (std::size_t j = 0; j < coding_.size(); ++j) {
                if (j == i || decided_.count(key(i, j)))
                    continue;
                auto it = dist.find(coding_[j]);
                if (it == dist.end())
                    continue;
                if (it->second == kEdgePathLength)
                    decided_[key(i, j)] = true;
                else if (it->second == kPlainPathLength)
                    decided_[key(i, j)] = false;
            }
        }
    }

    DecodeResult result(std::size_t stages) const {
        DecodeResult r;
        r.graph = Graph(coding_.size());
        r.coding = coding_;
        r.stages_used = stages;
        r.incomplete = tags_.empty();
        for (std::size_t i = 0; i < coding_.size(); ++i)
            for (std::size_t j = i + 1; j < coding_.size(); ++j) {
                auto it = decided_.find(key(i, j));
                if (it == decided_.end())
                    ++r.undecided;
                else if (it->second)
                    r.graph.add_edge(static_cast<Node>(i), static_cast<Node>(j));
            }
        return r;
    }

private:
    struct Tag {
        std::vector<Node> members;
        std::optional<Node> coding;
    };
    std::vector<std::set<Node>> adj_;
    std::vector<Tag> tags_;
    std::set<Node> in_tag_;
    std::vector<Node> coding_;
    std::map<Node, std::size_t> index_;
    std::map<std::pair<std::size_t, std::size_t>, bool> decided_;

    static std::pair<std::size_t, std::size_t> key(std::size_t i, std::size_t j) {
        return i < j ? std::pair{i, j} : std::pair{j, i};
    }

    void grow(std::size_t n) {
        if (adj_.size() < n)
            adj_.resize(n);
    }

    void find_tags(Node u, Node v) {
        std::vector<Node> common;
        std::set_intersection(adj_[u].begin(), adj_[u].end(), adj_[v].begin(), adj_[v].end(),
                              std::back_inserter(common));
        for (std::size_t a = 0; a < common.size(); ++a)
            for (std::size_t b = a + 1; b < common.size(); ++b) {
                if (!adj_[common[a]].count(common[b]))
                    continue;
                std::vector<Node> k{u, v, common[a], common[b]};
                std::sort(k.begin(), k.end());
                if (std::any_of(k.begin(), k.end(), [&](Node x) { return in_tag_.count(x) > 0; }))
                    continue;
                in_tag_.insert(k.begin(), k.end());
                tags_.push_back({k, std::nullopt});
            }
    }

    // Distances from src through nodes that are neither tag members nor coding nodes.
    std::map<Node, std::size_t> bfs(Node src) const {
        std::map<Node, std::size_t> dist{{src, 0}};
        std::deque<Node> q{src};
        while (!q.empty()) {
            Node u = q.front();
            q.pop_front();
            if (u != src && index_.count(u))
                continue; // reached another coding node; do not pass through it
            for (Node v : adj_[u]) {
                if (in_tag_.count(v) || dist.count(v))
                    continue;
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
        return dist;
    }
};

} // namespace

DecodeResult decode_enum_to_comp(const EdgeStream& stream, std::size_t stage_budget) {
    StreamDecoder d;
    std::set<Edge> seen;
    std::size_t used = std::min(stage_budget, stream.stage_count());
    for (std::size_t s = 0; s < used; ++s) {
        for (const Edge& e : stream.stages[s])
            if (seen.insert(make_edge(e.first, e.second)).second)
                d.add_edge(make_edge(e.first, e.second));
        d.label_tags();
        d.decide_pairs();
    }
    DecodeResult r = d.result(used);
    if (r.incomplete)
        r.graph = Graph();
    return r;
}

Graph encode_enum_to_comp(const EdgeStream& stream) {
    std::size_t n = stream.nodes;
    for (const auto& st : stream.stages)
        for (auto [a, b] : st)
            n = std::max<std::size_t>(n, std::max(a, b) + 1);
    Graph g(kTagNodes * n);
    for (Node i = 0; i < n; ++i) {
        Node y = coding_node(i);
        for (Node a = 1; a <= 4; ++a)
            for (Node b = a + 1; b <= 4; ++b)
                g.add_edge(y + a, y + b);
        g.add_edge(y, y + 1);
    }
    std::set<Edge> seen;
    for (const auto& st : stream.stages)
        for (auto [a, b] : st) {
            Edge e = make_edge(a, b);
            if (!seen.insert(e).second)
                continue;
            Node w = g.add_node();
            g.add_edge(w, coding_node(e.first));
            g.add_edge(w, coding_node(e.second));
        }
    return g;
}

EdgeStream decode_comp_to_enum(const Graph& g) {
    auto adj = g.adjacency();
    std::size_t n = g.node_count();
    std::vector<char> tagged(n, 0), used(n, 0);
    std::vector<std::vector<Node>> pending; // tags whose fifth node is not yet seen
    std::map<Node, Node> name;              // y node -> enumerated index
    std::vector<Edge> emitted;
    EdgeStream out;
    auto seen_adj = [&](Node a, Node b, Node k) { return a <= k && b <= k && g.has_edge(a, b); };
    for (Node k = 0; k < n; ++k) {
        bool changed = false;
        // 4-cliques among seen nodes that contain k.
        for (std::size_t i = 0; i < adj[k].size(); ++i)
            for (std::size_t j = i + 1; j < adj[k].size(); ++j)
                for (std::size_t l = j + 1; l < adj[k].size(); ++l) {
                    Node a = adj[k][i], b = adj[k][j], c = adj[k][l];
                    if (a > k || b > k || c > k || tagged[a] || tagged[b] || tagged[c] || tagged[k])
                        continue;
                    if (seen_adj(a, b, k) && seen_adj(a, c, k) && seen_adj(b, c, k)) {
                        std::vector<Node> t{a, b, c, k};
                        std::sort(t.begin(), t.end());
                        for (Node x : t)
                            tagged[x] = 1;
                        pending.push_back(t);
                    }
                }
        for (auto it = pending.begin(); it != pending.end();) {
            std::optional<Node> fifth;
            for (Node m : *it)
                for (Node v : adj[m])
                    if (v <= k && !tagged[v] && !fifth)
                        fifth = v;
            if (fifth && !name.count(*fifth)) {
                Node idx = static_cast<Node>(name.size());
                name[*fifth] = idx;
                used[*fifth] = 1;
                it = pending.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
        // Witnesses: seen, untagged, unnamed nodes adjacent to two named nodes.
        for (Node w = 0; w <= k; ++w) {
            if (tagged[w] || used[w])
                continue;
            std::vector<Node> ends;
            for (Node v : adj[w])
                if (v <= k && name.count(v))
                    ends.push_back(name[v]);
            if (ends.size() == 2) {
                used[w] = 1;
                emitted.push_back(make_edge(ends[0], ends[1]));
                changed = true;
            }
        }
        if (changed)
            out.stages.push_back(emitted);
    }
    out.nodes = name.size();
    if (out.stages.empty())
        out.stages.emplace_back();
    return out;
}

std::size_t min_detour_length(const Graph& h, std::size_t coding_nodes) {
    auto adj = h.adjacency();
    constexpr std::size_t inf = std::numeric_limits<std::size_t>::max() / 4;
    std::vector<std::vector<std::size_t>> d(coding_nodes);
    for (std::size_t i = 0; i < coding_nodes; ++i) {
        std::vector<std::size_t> dist(h.node_count(), inf);
        std::deque<Node> q{coding_node(static_cast<Node>(i))};
        dist[q.front()] = 0;
        while (!q.empty()) {
            Node u = q.front();
            q.pop_front();
            for (Node v : adj[u])
                if (dist[v] == inf) {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
        }
        for (std::size_t j = 0; j < coding_nodes; ++j)
            d[i].push_back(dist[coding_node(static_cast<Node>(j))]);
    }
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t a = 0; a < coding_nodes; ++a)
        for (std::size_t b = 0; b < coding_nodes; ++b)
            for (std::size_t c = 0; c < coding_nodes; ++c)
                if (a != b && b != c && a != c)
                    best = std::min(best, d[a][c] + d[c][b]);
    return best;
}

std::vector<std::vector<Node>> four_cliques(const Graph& g) {
    auto adj = g.adjacency();
    std::vector<std::vector<Node>> out;
    for (auto [a, b] : g.edges())
        for (Node c : adj[b]) {
            if (c <= b || !g.has_edge(a, c))
                continue;
            for (Node d : adj[c])
                if (d > c && g.has_edge(a, d) && g.has_edge(b, d))
                    out.push_back({a, b, c, d});
        }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace dcfwb
