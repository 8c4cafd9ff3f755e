#include "dcfwb/enimodel.hpp"

#include "dcfwb/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace dcfwb {

std::size_t TModel::dim(Node a, Node b) const {
    auto it = dims_.find({a, b});
    return it == dims_.end() ? 1 : it->second;
}

void TModel::set_dim(Node a, Node b, std::size_t d) {
    if (a >= a_count_ || b >= a_count_)
        throw InvalidInput("fiber index out of range");
    if (d == 0)
        throw InvalidInput("every fiber carries at least one chain");
    if (d == 1)
        dims_.erase({a, b});
    else
        dims_[{a, b}] = d;
}

TModel encode_graph(const Graph& g) {
    TModel m(g.node_count());
    for (auto [a, b] : g.edges()) {
        m.set_dim(a, b, 2);
        m.set_dim(b, a, 2);
    }
    return m;
}

Graph decode_graph(const TModel& m) {
    Graph g(m.a_count());
    for (const auto& [ab, d] : m.nondefault()) {
        auto [a, b] = ab;
        if (d != 2)
            throw InvalidInput("not a graph coding: dimension " + std::to_string(d));
        if (a == b)
            throw InvalidInput("not a graph coding: diagonal fiber has dimension 2");
        if (m.dim(b, a) != 2)
            throw InvalidInput("not a graph coding: asymmetric fiber dimensions");
        g.add_edge(a, b);
    }
    return g;
}

TFragment materialize(const TModel& m, long w) {
    if (w < 0)
        throw InvalidInput("window radius must be nonnegative");
    TFragment f;
    f.a_count = m.a_count();
    f.window = w;
    for (Node a = 0; a < m.a_count(); ++a)
        for (Node b = 0; b < m.a_count(); ++b)
            for (std::size_t c = 0; c < m.dim(a, b); ++c) {
                for (long o = -w; o <= w; ++o) {
                    f.points.push_back({a, b, c, o});
                    f.pi1.push_back(a);
                    f.pi2.push_back(b);
                    f.succ.push_back(o < w ? std::optional<std::size_t>(f.points.size()) : std::nullopt);
                }
            }
    return f;
}

std::vector<std::string> check_axioms(const TFragment& f, const TModel& m) {
    std::vector<std::string> bad;
    std::size_t n = f.points.size();
    if (f.pi1.size() != n || f.pi2.size() != n || f.succ.size() != n)
        return {"relation tables have the wrong length"};
    std::set<std::pair<Node, Node>> covered;
    std::vector<int> preds(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (f.pi1[i] >= f.a_count || f.pi2[i] >= f.a_count)
            bad.push_back("projection leaves A at point " + std::to_string(i));
        covered.insert({f.pi1[i], f.pi2[i]});
        if (!f.succ[i])
            continue;
        std::size_t j = *f.succ[i];
        if (j >= n) {
            bad.push_back("S leaves the fragment at point " + std::to_string(i));
            continue;
        }
        if (f.pi1[j] != f.pi1[i] || f.pi2[j] != f.pi2[i])
            bad.push_back("pi o S != pi at point " + std::to_string(i));
        if (++preds[j] > 1)
            bad.push_back("S not injective at point " + std::to_string(j));
    }
    // No cycles: following S from any point must leave the fragment.
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t steps = 0, k = i;
        while (f.succ[k] && *f.succ[k] < n && steps <= n) {
            k = *f.succ[k];
            ++steps;
        }
        if (steps > n) {
            bad.push_back("S has a cycle through point " + std::to_string(i));
            break;
        }
    }
    for (Node a = 0; a < f.a_count; ++a)
        for (Node b = 0; b < f.a_count; ++b)
            if (!covered.count({a, b}))
                bad.push_back("empty fiber above (" + std::to_string(a) + "," + std::to_string(b) + ")");
    // Chain count per fiber: points with no predecessor inside the window.
    std::map<std::pair<Node, Node>, std::size_t> starts;
    for (std::size_t i = 0; i < n; ++i)
        if (preds[i] == 0)
            ++starts[{f.pi1[i], f.pi2[i]}];
    for (const auto& [ab, c] : starts)
        if (c != m.dim(ab.first, ab.second))
            bad.push_back("fiber above (" + std::to_string(ab.first) + "," + std::to_string(ab.second) +
                          ") has the wrong number of chains");
    return bad;
}

std::vector<std::vector<Node>> count_extendable_perms(const TModel& m) {
    if (m.a_count() > 7)
        throw CapOverflow("permutation search is limited to 7 elements of A");
    std::vector<Node> p(m.a_count());
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<Node>> out;
    do {
        bool ok = true;
        for (Node a = 0; a < p.size() && ok; ++a)
            for (Node b = 0; b < p.size() && ok; ++b)
                ok = m.dim(p[a], p[b]) == m.dim(a, b);
        if (ok)
            out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

} // namespace dcfwb
