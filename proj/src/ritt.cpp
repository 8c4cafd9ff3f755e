#include "dcfwb/ritt.hpp"

#include "dcfwb/error.hpp"
#include "dcfwb/univariate.hpp"

#include <algorithm>
#include <set>

namespace dcfwb {

const Reducer& rationals() {
    static const RationalReducer r;
    return r;
}

DiffPoly ReductionTrace::defect() const {
    DiffPoly lhs = pow(initial(h, var), initial_power) * pow(separant(h, var), separant_power) * g;
    for (const auto& [k, q] : quotients)
        lhs -= q * delta(h, k);
    return lhs - raw_remainder;
}

namespace {

DiffPoly drop_term(const DiffPoly& p, const DiffPoly& c, Indet x, unsigned e) {
    return p - c * DiffPoly::indet(x, e);
}

void record(ReductionTrace& t, bool derivative, unsigned k, const DiffPoly& mult, const DiffPoly& qterm,
            const DiffPoly& rem) {
    for (auto& [kk, q] : t.quotients)
        q *= mult;
    t.quotients[k] += qterm;
    t.steps.push_back({derivative, k, mult, qterm, rem});
}

} // namespace

PartialReduction partial_reduce(const DiffPoly& g, const DiffPoly& h, Var var, const Reducer& coeffs) {
    Indet u = leader(h, var);
    unsigned d = degree_in(h, u);
    DiffPoly I = initial(h, var);
    DiffPoly S = separant(h, var);
    if (coeffs.is_zero(I))
        throw InvalidInput("initial of the reducing polynomial vanishes: " + h.str());
    PartialReduction out;
    ReductionTrace& t = out.trace;
    t.g = g;
    t.h = h;
    t.var = var;
    std::map<unsigned, DiffPoly> deltas;
    DiffPoly R = g;
    while (!R.is_zero()) {
        int o = order_in(R, var);
        if (o > static_cast<int>(u.deriv)) {
            unsigned k = static_cast<unsigned>(o) - u.deriv;
            Indet x{var, static_cast<std::uint32_t>(o)};
            unsigned e = degree_in(R, x);
            DiffPoly c = coeff_in(R, x, e);
            if (coeffs.is_zero(c)) {
                R = drop_term(R, c, x, e);
                continue;
            }
            auto it = deltas.find(k);
            if (it == deltas.end())
                it = deltas.emplace(k, delta(h, k)).first;
            DiffPoly qterm = c * DiffPoly::indet(x, e - 1);
            R = S * R - qterm * it->second;
            ++t.separant_power;
            record(t, true, k, S, qterm, R);
        } else if (o == static_cast<int>(u.deriv) && degree_in(R, u) >= d) {
            unsigned e = degree_in(R, u);
            DiffPoly c = coeff_in(R, u, e);
            if (coeffs.is_zero(c)) {
                R = drop_term(R, c, u, e);
                continue;
            }
            DiffPoly qterm = c * DiffPoly::indet(u, e - d);
            R = I * R - qterm * h;
            ++t.initial_power;
            record(t, false, 0, I, qterm, R);
        } else {
            break;
        }
    }
    t.raw_remainder = R;
    out.remainder = coeffs.reduce(R);
    return out;
}

DiffPoly make_monic(const DiffPoly& p, Var var) {
    if (p.is_zero())
        return p;
    if (!involves(p, var))
        return scale(p, 1 / p.lead_coeff());
    DiffPoly I = initial(p, var);
    return scale(p, 1 / I.lead_coeff());
}

bool rank_less(const DiffPoly& a, const DiffPoly& b, Var var) {
    Rank ra = rank_in(a, var), rb = rank_in(b, var);
    if (ra != rb)
        return ra < rb;
    return compare(a, b) < 0;
}

DiffPoly reduce_pair(const DiffPoly& g, const DiffPoly& h, Var var, const Reducer& coeffs) {
    DiffPoly a = coeffs.reduce(g), b = coeffs.reduce(h);
    if (a.is_zero() && b.is_zero())
        return {};
    if (a.is_zero())
        return make_monic(b, var);
    if (b.is_zero())
        return make_monic(a, var);
    if (!involves(a, var) || !involves(b, var))
        return DiffPoly(1);
    a = make_monic(a, var);
    b = make_monic(b, var);
    if (rank_less(a, b, var))
        std::swap(a, b);
    while (true) {
        DiffPoly r = partial_reduce(a, b, var, coeffs).remainder;
        if (r.is_zero())
            return b;
        if (!involves(r, var))
            return DiffPoly(1);
        a = std::move(b);
        b = make_monic(r, var);
    }
}

ClosureResult closure(const std::vector<DiffPoly>& V, Var var, const Reducer& coeffs) {
    ClosureResult out;
    std::vector<DiffPoly> S;
    for (const auto& g : V) {
        DiffPoly r = coeffs.reduce(g);
        if (!r.is_zero() && involves(r, var))
            S.push_back(make_monic(r, var));
    }
    if (S.empty())
        return out;
    std::sort(S.begin(), S.end(), [&](const DiffPoly& a, const DiffPoly& b) { return rank_less(a, b, var); });
    S.erase(std::unique(S.begin(), S.end()), S.end());
    DiffPoly best = S.front();
    const std::size_t step_cap = 200000;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < S.size(); ++i) {
            if (S[i] == best)
                continue;
            DiffPoly f = reduce_pair(best, S[i], var, coeffs);
            if (++out.pair_steps > step_cap)
                throw CapOverflow("closure step budget exhausted");
            if (f.is_constant()) {
                out.min = DiffPoly(1);
                out.inconsistent = true;
                return out;
            }
            if (!(f == best) && rank_less(f, best, var)) {
                best = f;
                S.push_back(f);
                ++out.descents;
                changed = true;
            }
        }
    }
    out.min = best;
    return out;
}

DiffPoly closure_min(const std::vector<DiffPoly>& V, Var var, const Reducer& coeffs) {
    return closure(V, var, coeffs).min;
}

void Chain::push(Var v, DiffPoly f) {
    if (index_.count(v))
        throw InvalidInput("variable already in chain: " + render(v));
    index_[v] = levels_.size();
    levels_.push_back({v, make_monic(f, v)});
}

DiffPoly Chain::reduce_by(DiffPoly p, std::size_t j) const {
    const Level& L = levels_[j];
    const DiffPoly& f = L.poly;
    Var v = L.var;
    Indet u = leader(f, v);
    unsigned d = degree_in(f, u);
    DiffPoly I = initial(f, v), S = separant(f, v);
    std::map<unsigned, DiffPoly> deltas;
    while (!p.is_zero()) {
        int o = order_in(p, v);
        if (o > static_cast<int>(u.deriv)) {
            unsigned k = static_cast<unsigned>(o) - u.deriv;
            Indet x{v, static_cast<std::uint32_t>(o)};
            unsigned e = degree_in(p, x);
            DiffPoly c = coeff_in(p, x, e);
            auto it = deltas.find(k);
            if (it == deltas.end())
                it = deltas.emplace(k, delta(f, k)).first;
            p = S * p - c * DiffPoly::indet(x, e - 1) * it->second;
        } else if (o == static_cast<int>(u.deriv) && degree_in(p, u) >= d) {
            unsigned e = degree_in(p, u);
            DiffPoly c = coeff_in(p, u, e);
            p = I * p - c * DiffPoly::indet(u, e - d) * f;
        } else {
            break;
        }
    }
    return p;
}

DiffPoly Chain::reduce(const DiffPoly& p) const {
    if (levels_.empty() || p.is_zero())
        return p;
    std::set<std::size_t> todo;
    auto collect = [&](const DiffPoly& q) {
        for (const Var& v : vars_of(q)) {
            auto it = index_.find(v);
            if (it != index_.end() && !levels_[it->second].poly.is_zero())
                todo.insert(it->second);
        }
    };
    DiffPoly r = p;
    collect(r);
    std::size_t last = levels_.size();
    while (!todo.empty() && !r.is_zero()) {
        std::size_t j = *todo.rbegin();
        todo.erase(j);
        if (j >= last)
            continue;
        last = j;
        r = reduce_by(r, j);
        if (!r.is_zero())
            r = scale(r, 1 / r.lead_coeff());
        collect(r);
        todo.erase(todo.lower_bound(j), todo.end());
    }
    return r;
}

std::string to_string(Irreducibility c) {
    switch (c) {
    case Irreducibility::Transcendental: return "transcendental";
    case Irreducibility::Certified: return "certified";
    case Irreducibility::Assumed: return "assumed";
    case Irreducibility::Reducible: return "reducible";
    }
    return "?";
}

Irreducibility certify_irreducible(const DiffPoly& f, Var var, const Chain& below) {
    if (f.is_zero())
        return Irreducibility::Transcendental;
    Indet u = leader(f, var);
    unsigned d = degree_in(f, u);
    DiffPoly I = initial(f, var);
    if (d == 1 && !involves(I, var))
        return Irreducibility::Certified;
    // Over a purely transcendental tower, Q-irreducibility of a univariate f carries over.
    bool pure = std::all_of(below.levels().begin(), below.levels().end(), [](const Chain::Level& L) {
        return L.poly.is_zero() || degree_in(L.poly, leader(L.poly, L.var)) == 1;
    });
    std::set<Indet> xs = indets_of(f);
    if (xs.size() == 1 && pure) {
        auto irr = is_irreducible(UniPoly::from_diffpoly(f, u));
        if (irr)
            return *irr ? Irreducibility::Certified : Irreducibility::Reducible;
        return Irreducibility::Assumed;
    }
    // Spot check: a repeated factor shows up as a common factor with the separant.
    DiffPoly g = reduce_pair(f, separant(f, var), var, below);
    if (!g.is_constant() && rank_in(g, var) < rank_in(f, var))
        return Irreducibility::Reducible;
    return Irreducibility::Assumed;
}

TowerResult build_tower(const std::vector<DiffPoly>& V, const std::vector<Var>& order, std::size_t upto) {
    if (upto >= order.size())
        throw InvalidInput("tower target out of range");
    std::map<Var, std::size_t> pos;
    for (std::size_t j = 0; j < order.size(); ++j)
        pos[order[j]] = j;
    std::vector<std::vector<const DiffPoly*>> buckets(upto + 1);
    for (const auto& g : V) {
        if (g.is_zero())
            continue;
        long top = -1;
        bool outside = false;
        for (const Var& v : vars_of(g)) {
            auto it = pos.find(v);
            if (it == pos.end()) {
                outside = true;
                break;
            }
            top = std::max<long>(top, static_cast<long>(it->second));
        }
        if (outside)
            continue;
        if (top < 0)
            throw Inconsistent("inconsistent constraint set: nonzero constant " + g.str());
        if (static_cast<std::size_t>(top) <= upto)
            buckets[top].push_back(&g);
    }
    TowerResult out;
    for (std::size_t j = 0; j <= upto; ++j) {
        Var v = order[j];
        std::vector<DiffPoly> Vj;
        for (const DiffPoly* g : buckets[j]) {
            DiffPoly r = out.chain.reduce(*g);
            if (r.is_zero())
                continue;
            if (!involves(r, v))
                throw Inconsistent("inconsistent constraint set: " + g->str() + " forces a nonzero element to vanish");
            Vj.push_back(r);
        }
        ClosureResult c = closure(Vj, v, out.chain);
        if (c.inconsistent)
            throw Inconsistent("inconsistent constraint set at level " + render(v));
        LevelReport rep;
        rep.var = v;
        rep.constraints = Vj.size();
        rep.minimal = c.min.is_zero() ? c.min : make_monic(out.chain.reduce(c.min), v);
        rep.pair_steps = c.pair_steps;
        rep.irreducibility = certify_irreducible(rep.minimal, v, out.chain);
        out.levels.push_back(rep);
        if (j < upto) {
            if (rep.irreducibility == Irreducibility::Reducible)
                throw TowerLimitation("level " + render(v) + " has reducible minimal polynomial " + rep.minimal.str());
            out.chain.push(v, rep.minimal);
        }
    }
    return out;
}

DiffPoly minimal_apparent(const std::vector<DiffPoly>& V, std::size_t m) {
    Family fam = Family::T;
    for (const auto& g : V)
        for (const Var& v : vars_of(g)) {
            fam = v.family;
            break;
        }
    std::vector<Var> order;
    for (std::size_t j = 0; j <= m; ++j)
        order.push_back({fam, static_cast<std::uint32_t>(j)});
    return build_tower(V, order, m).levels.back().minimal;
}

} // namespace dcfwb
