#include "dcfwb/error.hpp"
#include "dcfwb/priority.hpp"

#include <algorithm>

namespace dcfwb {

struct MockLowField::Realization {
    ClosureEngine eng;
    std::vector<Elem> values;
    std::map<std::pair<std::size_t, Tuple>, DiffPoly> cache;
    std::set<std::size_t> detached; // no value under these guesses; looks transcendental
};

namespace {

std::set<std::size_t> free_atoms(const ClosureEngine& eng, const Elem& e) {
    std::set<std::size_t> out;
    for (const DiffPoly* p : {&e.num, &e.den})
        for (const Var& v : vars_of(*p))
            if (v.family == Family::E && eng.atoms().at(v.index).kind != AtomKind::Algebraic)
                out.insert(v.index);
    return out;
}

ExprEnumerator::Options auto_options() {
    ExprEnumerator::Options o;
    o.division = true;
    o.single_var = true;
    o.max_size = 14;
    return o;
}

} // namespace

MockLowField::MockLowField(MockScript script)
    : script_(std::move(script)), en_(
                                      [n = script_.elements.size()](unsigned size) {
                                          std::vector<Var> v;
                                          if (size == 1)
                                              for (std::uint32_t j = 0; j < n; ++j)
                                                  v.push_back(X(j));
                                          return v;
                                      },
                                      auto_options()) {
    auto& els = script_.elements;
    if (els.empty())
        throw InvalidInput("mock: no elements");
    for (std::size_t k = 0; k < els.size(); ++k) {
        const auto& e = els[k];
        if (e.n != k)
            throw InvalidInput("mock: elements must be numbered 0, 1, ... in order");
        if (e.guesses.empty() || e.guesses.front().from_stage != 0)
            throw InvalidInput("mock: element " + std::to_string(k) + " needs a guess from stage 0");
        for (std::size_t j = 1; j < e.guesses.size(); ++j)
            if (e.guesses[j].from_stage <= e.guesses[j - 1].from_stage)
                throw InvalidInput("mock: guesses of element " + std::to_string(k) + " are not increasing");
        if (!(e.guesses.back().p == e.truth))
            throw InvalidInput("mock: the last guess of element " + std::to_string(k) + " is not its truth");
        if (e.guesses.back().from_stage >= script_.horizon)
            throw InvalidInput("mock: element " + std::to_string(k) + " changes its mind past the horizon");
        for (const auto& g : e.guesses) {
            bool own = false;
            std::size_t others = 0;
            for (const Var& v : vars_of(g.p)) {
                if (v.family != Family::X)
                    throw InvalidInput("mock: guesses are over the X family: " + g.p.str());
                if (v.index == k)
                    own = true;
                else if (v.index < k)
                    ++others;
                else
                    throw InvalidInput("mock: " + g.p.str() + " refers to a later element");
            }
            if (!g.p.is_zero() && !own)
                throw InvalidInput("mock: " + g.p.str() + " does not involve X" + std::to_string(k));
            if (others > 1)
                throw InvalidInput("mock: " + g.p.str() + " involves more than one earlier element");
        }
    }
    truth_cfg_.resize(els.size());
    for (std::size_t k = 0; k < els.size(); ++k)
        truth_cfg_[k] = els[k].guesses.size() - 1;
    realize(truth_cfg_);
}

MockLowField::~MockLowField() = default;

std::vector<std::size_t> MockLowField::config(std::size_t s) const {
    std::vector<std::size_t> cfg(script_.elements.size());
    for (std::size_t k = 0; k < cfg.size(); ++k) {
        const auto& gs = script_.elements[k].guesses;
        std::size_t j = 0;
        while (j + 1 < gs.size() && gs[j + 1].from_stage <= s)
            ++j;
        cfg[k] = j;
    }
    return cfg;
}

std::size_t MockLowField::last_change_stage() const {
    std::size_t last = 0;
    for (const auto& e : script_.elements)
        last = std::max(last, e.guesses.back().from_stage);
    return last;
}

MockLowField::Realization& MockLowField::realize(const std::vector<std::size_t>& cfg) {
    auto it = real_.find(cfg);
    if (it != real_.end())
        return *it->second;
    auto r = std::make_unique<Realization>();
    for (std::size_t k = 0; k < cfg.size(); ++k) {
        const DiffPoly& p = script_.elements[k].guesses[cfg[k]].p;
        Var x = X(static_cast<std::uint32_t>(k));
        std::map<Var, Elem> at;
        for (const Var& v : vars_of(p))
            if (v != x)
                at[v] = r->values[v.index];
        Elem z;
        if (p.is_zero()) {
            z = r->eng.adjoin_transcendental();
        } else if (order_in(p, x) == 0) {
            RootSet rs = r->eng.roots(p, x, at);
            bool found = false;
            for (const Elem& c : rs.roots) {
                bool fresh = std::none_of(r->values.begin(), r->values.end(),
                                          [&](const Elem& e) { return r->eng.equal(e, c); });
                if (fresh) {
                    z = c;
                    found = true;
                    break;
                }
            }
            if (!found)
                throw Unsupported("mock: no fresh root of " + p.str() + " in the engine");
        } else {
            z = r->eng.adjoin_generic_zero(p, x, at);
        }
        for (const Elem& e : r->values)
            if (r->eng.equal(e, z))
                throw Unsupported("mock: guesses are not jointly realizable at x" + std::to_string(k));
        r->values.push_back(z);
    }
    return *real_.emplace(cfg, std::move(r)).first->second;
}

void MockLowField::extend_autos(std::size_t n) {
    std::size_t N = scripted();
    Realization& t = realize(truth_cfg_);
    while (N + autos_.size() <= n) {
        const Expr* e = en_.at(en_pos_++);
        if (!e)
            throw Horizon("mock: expression enumeration exhausted at element " + std::to_string(n));
        std::map<Var, Elem> at;
        if (e->var)
            at[*e->var] = t.values[e->var->index];
        Elem den = t.eng.eval(e->den, at);
        if (t.eng.is_zero(den))
            continue;
        Elem v = t.eng.div(t.eng.eval(e->num, at), den);
        bool fresh =
            std::none_of(t.values.begin(), t.values.end(), [&](const Elem& w) { return t.eng.equal(w, v); });
        if (!fresh)
            continue;
        autos_.push_back(Auto{e->num, e->den, e->var});
        t.values.push_back(v);
    }
}

const Elem& MockLowField::value(Realization& r, std::size_t n) {
    extend_autos(n);
    while (r.values.size() <= n) {
        const Auto& a = autos_[r.values.size() - scripted()];
        std::map<Var, Elem> at;
        if (a.var)
            at[*a.var] = r.values[a.var->index];
        // A zero denominator or a collision under stale guesses: the element
        // is guessed transcendental until the guesses settle.
        Elem den = r.eng.eval(a.den, at);
        std::optional<Elem> v;
        if (!r.eng.is_zero(den)) {
            v = r.eng.div(r.eng.eval(a.num, at), den);
            for (const Elem& w : r.values)
                if (r.eng.equal(w, *v)) {
                    v.reset();
                    break;
                }
        }
        if (!v) {
            r.detached.insert(r.values.size());
            v = r.eng.adjoin_transcendental();
        }
        r.values.push_back(*v);
    }
    return r.values[n];
}

std::optional<std::size_t> MockLowField::support_in(const std::vector<std::size_t>& cfg, std::size_t n) {
    if (n < scripted()) {
        for (const Var& v : vars_of(script_.elements[n].guesses[cfg[n]].p))
            if (v.index != n)
                return v.index;
        return std::nullopt;
    }
    extend_autos(n);
    const Auto& a = autos_[n - scripted()];
    if (a.var)
        return a.var->index;
    return std::nullopt;
}

std::optional<std::size_t> MockLowField::support(std::size_t n) { return support_in(truth_cfg_, n); }

DiffPoly MockLowField::describe(const std::vector<std::size_t>& cfg, std::size_t n) {
    if (n < scripted())
        return script_.elements[n].guesses[cfg[n]].p;
    extend_autos(n);
    const Auto& a = autos_[n - scripted()];
    return a.den * DiffPoly::var(X(static_cast<std::uint32_t>(n))) - a.num;
}

DiffPoly MockLowField::description(std::size_t n, std::size_t s) { return describe(config(s), n); }

std::size_t MockLowField::mind_changes(std::size_t n) {
    if (n < scripted())
        return script_.elements[n].guesses.size() - 1;
    auto j = support(n);
    return j ? mind_changes(*j) : 0;
}

DiffPoly MockLowField::compute_p(const std::vector<std::size_t>& cfg, std::size_t n, const Tuple& rho) {
    Realization& r = realize(cfg);
    for (std::size_t j : rho)
        if (j == n)
            throw InvalidInput("mock: x" + std::to_string(n) + " is in its own base");
    value(r, n);
    if (r.detached.count(n))
        return DiffPoly(0);
    RelationQuery q;
    for (std::size_t j : rho) {
        q.base.push_back(X(static_cast<std::uint32_t>(j)));
        q.base_values.push_back(value(r, j));
    }
    q.target = X(static_cast<std::uint32_t>(n));
    q.value = value(r, n);
    RelationResult res = least_relation(r.eng, q);
    if (res.found)
        return res.poly;
    if (res.unsupported)
        throw Unsupported("mock: x" + std::to_string(n) + ": " + res.why);
    DiffPoly d = describe(cfg, n);
    auto sup = support_in(cfg, n);
    if (!d.is_zero() && (!sup || std::find(rho.begin(), rho.end(), *sup) != rho.end()))
        return make_monic(d, q.target);
    std::set<std::size_t> own = free_atoms(r.eng, q.value);
    for (const Elem& b : q.base_values)
        for (std::size_t a : free_atoms(r.eng, b))
            if (own.count(a))
                throw Unsupported("mock: x" + std::to_string(n) +
                                  " shares a transcendental with its base but no relation was found");
    if (d.is_zero())
        return d;
    if (compute_p(cfg, *sup, rho).is_zero())
        return DiffPoly(0);
    throw Unsupported("mock: minimal polynomial of x" + std::to_string(n) + " over its base is outside the model");
}

DiffPoly MockLowField::p(std::size_t n, const Tuple& rho, std::size_t s) {
    auto cfg = config(s);
    Realization& r = realize(cfg);
    auto key = std::make_pair(n, rho);
    auto it = r.cache.find(key);
    if (it != r.cache.end())
        return it->second;
    DiffPoly out = compute_p(cfg, n, rho);
    r.cache.emplace(std::move(key), out);
    return out;
}

bool MockLowField::M(std::size_t n, const Tuple& rho, const DiffPoly& q, std::size_t s) {
    Realization& r = realize(config(s));
    std::map<Var, Elem> at;
    for (std::size_t j : rho)
        at[X(static_cast<std::uint32_t>(j))] = value(r, j);
    at[X(static_cast<std::uint32_t>(n))] = value(r, n);
    return r.eng.is_zero(r.eng.eval(q, at));
}

} // namespace dcfwb
