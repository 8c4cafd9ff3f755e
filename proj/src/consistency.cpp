#include "dcfwb/consistency.hpp"

#include "dcfwb/error.hpp"

#include <algorithm>
#include <set>

namespace dcfwb {

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Inconsistent: return "inconsistent";
    case Verdict::Unsupported: return "unsupported";
    }
    return "?";
}

namespace {

// Injectivity bookkeeping: rational values hash, the rest compare pairwise.
struct Distinct {
    std::map<Rational, Var> rationals;
    std::vector<std::pair<Var, Elem>> others;

    // Records v = e; false when e collides with an earlier value.
    bool insert(Var v, const Elem& e, const ClosureEngine& eng, Var* clash = nullptr) {
        if (auto r = eng.rational_value(e)) {
            auto [it, fresh] = rationals.emplace(*r, v);
            if (!fresh && clash)
                *clash = it->second;
            return fresh;
        }
        for (const auto& [w, f] : others)
            if (eng.equal(e, f)) {
                if (clash)
                    *clash = w;
                return false;
            }
        others.emplace_back(v, e);
        return true;
    }
};

struct Node {
    std::map<Var, Elem> assign;
    ClosureEngine eng;
    std::vector<std::size_t> pending;
    Distinct seen;
    bool exhaustive = true;
};

struct Outcome {
    bool ok = false;
    bool exhaustive = false;
    Node node;
};

class Search {
public:
    Search(const ConsistencyQuery& q, const ConsistencyOracle::Limits& lim) : q_(q), lim_(lim) {
        for (const auto& e : q.eqs)
            vars_.push_back(vars_of(e));
        distinct_.insert(q.distinct.begin(), q.distinct.end());
    }

    Outcome run(Node n) {
        if (++nodes_ > lim_.max_nodes)
            return fail(std::move(n), false, "node limit reached");
        for (;;) {
            // Drop satisfied equations; fail on violated ones.
            std::vector<std::size_t> keep;
            for (std::size_t i : n.pending) {
                if (unknowns(n, i) > 0) {
                    keep.push_back(i);
                    continue;
                }
                if (!n.eng.is_zero(n.eng.eval(q_.eqs[i], n.assign)))
                    return fail(std::move(n), n.exhaustive, "");
            }
            n.pending = std::move(keep);
            if (n.pending.empty()) {
                for (Var v : q_.distinct)
                    if (!n.assign.count(v)) {
                        Elem t = n.eng.adjoin_transcendental();
                        n.assign[v] = t;
                        n.seen.insert(v, t, n.eng);
                    }
                Outcome o;
                o.ok = true;
                o.node = std::move(n);
                return o;
            }
            std::optional<std::pair<std::size_t, Var>> alg, diff;
            for (std::size_t i : n.pending) {
                if (unknowns(n, i) != 1)
                    continue;
                Var v = first_unknown(n, i);
                int ord = order_in(q_.eqs[i], v);
                if (ord == 0 && !alg)
                    alg = {i, v};
                else if (ord > 0 && !diff)
                    diff = {i, v};
                if (alg)
                    break;
            }
            if (alg) {
                auto [i, v] = *alg;
                RootSet rs;
                try {
                    rs = n.eng.roots(q_.eqs[i], v, n.assign);
                } catch (const Error& e) {
                    return fail(std::move(n), false, e.what());
                }
                if (rs.all) {
                    n.pending.erase(std::find(n.pending.begin(), n.pending.end(), i));
                    continue;
                }
                bool exhaustive = n.exhaustive && rs.complete;
                if (!rs.complete && reason_.empty())
                    reason_ = "incomplete root set for " + q_.eqs[i].str();
                for (const Elem& r : rs.roots) {
                    Node child = n;
                    if (!assign(child, v, r))
                        continue;
                    child.exhaustive = exhaustive;
                    Outcome o = run(std::move(child));
                    if (o.ok)
                        return o;
                    exhaustive = exhaustive && o.exhaustive;
                }
                return fail(std::move(n), exhaustive, "");
            }
            if (diff) {
                auto [i, v] = *diff;
                if (order_in(q_.eqs[i], v) > lim_.max_order)
                    return fail(std::move(n), false, "order above the oracle limit in " + q_.eqs[i].str());
                Elem z;
                try {
                    z = n.eng.adjoin_generic_zero(q_.eqs[i], v, n.assign);
                } catch (const Error& e) {
                    return fail(std::move(n), false, e.what());
                }
                n.exhaustive = false;
                if (!assign(n, v, z))
                    return fail(std::move(n), false, "");
                continue;
            }
            // Everything left has two or more unknowns: make the least one generic.
            Var v = smallest_unknown(n);
            n.exhaustive = false;
            if (!assign(n, v, n.eng.adjoin_transcendental()))
                return fail(std::move(n), false, "");
        }
    }

    std::size_t nodes() const { return nodes_; }
    const std::string& reason() const { return reason_; }

private:
    const ConsistencyQuery& q_;
    const ConsistencyOracle::Limits& lim_;
    std::vector<std::set<Var>> vars_;
    std::set<Var> distinct_;
    std::size_t nodes_ = 0;
    std::string reason_;

    std::size_t unknowns(const Node& n, std::size_t i) const {
        std::size_t c = 0;
        for (const Var& v : vars_[i])
            c += !n.assign.count(v);
        return c;
    }

    Var first_unknown(const Node& n, std::size_t i) const {
        for (const Var& v : vars_[i])
            if (!n.assign.count(v))
                return v;
        throw Error("no unknown");
    }

    Var smallest_unknown(const Node& n) const {
        std::optional<Var> best;
        for (std::size_t i : n.pending)
            for (const Var& v : vars_[i])
                if (!n.assign.count(v) && (!best || v < *best))
                    best = v;
        return *best;
    }

    bool assign(Node& n, Var v, const Elem& e) {
        n.assign[v] = e;
        return !distinct_.count(v) || n.seen.insert(v, e, n.eng);
    }

    Outcome fail(Node n, bool exhaustive, const std::string& why) {
        if (!why.empty() && reason_.empty())
            reason_ = why;
        Outcome o;
        o.exhaustive = exhaustive;
        o.node = std::move(n);
        return o;
    }
};

} // namespace

bool verify_witness(const ConsistencyQuery& q, const std::map<Var, Elem>& w, const ClosureEngine& eng,
                    std::string* why) {
    for (const auto& e : q.eqs) {
        if (q.trust_pins) {
            auto vs = vars_of(e);
            if (std::all_of(vs.begin(), vs.end(), [&](const Var& v) { return q.pinned.count(v) > 0; }))
                continue;
        }
        Elem val;
        try {
            val = eng.eval(e, w);
        } catch (const Error& ex) {
            if (why)
                *why = ex.what();
            return false;
        }
        if (!eng.is_zero(val)) {
            if (why)
                *why = "witness violates " + e.str();
            return false;
        }
    }
    Distinct seen;
    for (Var v : q.distinct) {
        auto it = w.find(v);
        if (it == w.end()) {
            if (why)
                *why = "witness misses " + render(v);
            return false;
        }
        Var clash;
        if (!seen.insert(v, it->second, eng, &clash)) {
            if (why)
                *why = "witness identifies " + render(v) + " with " + render(clash);
            return false;
        }
    }
    return true;
}

ConsistencyResult ConsistencyOracle::check(const ConsistencyQuery& q, const ClosureEngine& base) const {
    ConsistencyResult res;
    std::set<Var> all(q.distinct.begin(), q.distinct.end());
    for (const auto& e : q.eqs)
        for (const Var& v : vars_of(e))
            all.insert(v);
    if (all.size() > limits_.max_vars) {
        res.reason = "too many variables";
        res.engine = base;
        return res;
    }
    Search s(q, limits_);
    Node root;
    root.eng = base;
    root.assign = q.pinned;
    std::set<Var> dset(q.distinct.begin(), q.distinct.end());
    for (const auto& [v, e] : q.pinned)
        if (dset.count(v) && !root.seen.insert(v, e, base)) {
            res.verdict = Verdict::Inconsistent;
            res.reason = "pinned values collide at " + render(v);
            res.engine = base;
            return res;
        }
    for (std::size_t i = 0; i < q.eqs.size(); ++i) {
        if (q.trust_pins) {
            auto vs = vars_of(q.eqs[i]);
            if (std::all_of(vs.begin(), vs.end(), [&](const Var& v) { return q.pinned.count(v) > 0; }))
                continue;
        }
        root.pending.push_back(i);
    }
    Outcome o = s.run(std::move(root));
    res.nodes = s.nodes();
    if (o.ok) {
        std::string why;
        if (!verify_witness(q, o.node.assign, o.node.eng, &why)) {
            res.reason = "witness failed re-verification: " + why;
            res.engine = base;
            return res;
        }
        res.verdict = Verdict::Consistent;
        res.witness = std::move(o.node.assign);
        res.engine = std::move(o.node.eng);
        return res;
    }
    res.engine = base;
    res.verdict = o.exhaustive ? Verdict::Inconsistent : Verdict::Unsupported;
    res.reason = s.reason();
    return res;
}

} // namespace dcfwb
