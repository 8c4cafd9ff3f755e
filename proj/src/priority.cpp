#include "dcfwb/priority.hpp"

#include "dcfwb/error.hpp"

#include <algorithm>
#include <numeric>

namespace dcfwb {

// ---------------------------------------------------------------- lists

std::optional<std::size_t> PriorityLists::position_of_n(std::size_t k) const {
    for (std::size_t i = 0; i < n.size(); ++i)
        if (n[i] == k)
            return i;
    return std::nullopt;
}

std::optional<std::size_t> PriorityLists::position_of_m(std::uint32_t k) const {
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i] == k)
            return i;
    return std::nullopt;
}

PriorityLists rebuild_priority_lists(const HMap& h, const std::set<std::uint32_t>& F0) {
    PriorityLists out;
    std::set<std::uint32_t> seen;
    auto take = [&](std::uint32_t v) {
        if (F0.count(v) && seen.insert(v).second)
            out.m.push_back(v);
    };
    std::size_t top = F0.empty() ? 0 : *F0.rbegin();
    if (!h.empty())
        top = std::max(top, h.rbegin()->first);
    for (std::size_t k = 0; seen.size() < F0.size() && k <= top; ++k) {
        if (auto it = h.find(k); it != h.end())
            take(it->second);
        take(static_cast<std::uint32_t>(k));
    }
    std::map<std::uint32_t, std::size_t> inv;
    for (const auto& [n, m] : h)
        inv[m] = n;
    for (std::uint32_t m : out.m) {
        auto it = inv.find(m);
        if (it == inv.end())
            break;
        out.n.push_back(it->second);
    }
    std::size_t least = 0;
    while (h.count(least))
        ++least;
    out.n.push_back(least);
    return out;
}

// ---------------------------------------------------------------- towers

namespace {

Var YV(std::uint32_t m) { return Y(m); }

Rank rank_or_inf(const DiffPoly& p, Var v) { return p.is_zero() ? Rank::infinite() : rank_in(p, v); }

// Quotient of f by (Y_m - Y_b), coefficients reduced by the chain.
DiffPoly divide_linear(const DiffPoly& f, Var m, Var b, const Chain& chain) {
    Indet x{m, 0};
    unsigned d = degree_in(f, x);
    std::vector<DiffPoly> c(d + 1);
    for (unsigned k = 0; k <= d; ++k)
        c[k] = coeff_in(f, x, k);
    DiffPoly yb = DiffPoly::var(b);
    std::vector<DiffPoly> q(d);
    q[d - 1] = c[d];
    for (unsigned k = d - 1; k >= 1; --k)
        q[k - 1] = chain.reduce(c[k] + yb * q[k]);
    DiffPoly out(0);
    for (unsigned k = 0; k < d; ++k)
        out += q[k] * pow(DiffPoly::var(m), k);
    return chain.reduce(out);
}

} // namespace

void TowerCache::invalidate() {
    order_.clear();
    levels_.clear();
    chain_ = Chain{};
    memo_.clear();
}

DiffPoly TowerCache::level(const std::vector<std::uint32_t>& prefix, std::uint32_t m) const {
    Var v = YV(m);
    std::set<std::uint32_t> allowed(prefix.begin(), prefix.end());
    allowed.insert(m);
    std::vector<DiffPoly> V;
    auto it = ix_.by_var->find(m);
    if (it != ix_.by_var->end())
        for (std::size_t k : it->second) {
            const auto& vs = (*ix_.vars)[k];
            if (!std::all_of(vs.begin(), vs.end(), [&](const Var& w) { return allowed.count(w.index) > 0; }))
                continue;
            DiffPoly r = chain_.reduce((*ix_.U)[k]);
            if (r.is_zero())
                continue;
            if (!involves(r, v))
                throw Inconsistent("committed set forces a nonzero element to vanish: " + (*ix_.U)[k].str());
            V.push_back(std::move(r));
        }
    if (V.empty())
        return DiffPoly(0);
    ClosureResult c = closure(V, v, chain_);
    DiffPoly f;
    if (c.inconsistent) {
        // The pair forces a relation among earlier elements that their own
        // levels do not see; fall back to the least committed polynomial.
        f = V.front();
        for (const DiffPoly& p : V)
            if (rank_in(p, v) < rank_in(f, v))
                f = p;
        return make_monic(f, v);
    }
    f = make_monic(chain_.reduce(c.min), v);
    // Roots that are earlier, distinct elements split off as linear factors.
    if (order_in(f, v) == 0)
        for (std::uint32_t b : prefix) {
            if (degree_in(f, Indet{v, 0}) < 2)
                break;
            DiffPoly at = chain_.reduce(substitute(f, Indet{v, 0}, DiffPoly::var(YV(b))));
            if (at.is_zero())
                f = make_monic(divide_linear(f, v, YV(b), chain_), v);
        }
    return f;
}

void TowerCache::extend(const std::vector<std::uint32_t>& prefix) {
    std::size_t common = 0;
    while (common < order_.size() && common < prefix.size() && order_[common] == prefix[common])
        ++common;
    if (common < order_.size()) {
        std::vector<std::uint32_t> keep(order_.begin(), order_.begin() + static_cast<long>(common));
        std::vector<DiffPoly> lv(levels_.begin(), levels_.begin() + static_cast<long>(common));
        chain_ = Chain{};
        for (std::size_t j = 0; j < common; ++j)
            chain_.push(YV(keep[j]), lv[j]);
        order_ = std::move(keep);
        levels_ = std::move(lv);
    }
    for (std::size_t j = common; j < prefix.size(); ++j) {
        std::vector<std::uint32_t> below(prefix.begin(), prefix.begin() + static_cast<long>(j));
        DiffPoly f = level(below, prefix[j]);
        if (!f.is_zero() && certify_irreducible(f, YV(prefix[j]), chain_) == Irreducibility::Reducible)
            throw TowerLimitation("apparent minimal polynomial " + f.str() + " of " + render(YV(prefix[j])) +
                                  " is reducible over the elements before it");
        chain_.push(YV(prefix[j]), f);
        order_.push_back(prefix[j]);
        levels_.push_back(f);
    }
}

const Chain& TowerCache::chain(const std::vector<std::uint32_t>& prefix) {
    extend(prefix);
    return chain_;
}

DiffPoly TowerCache::min(const std::vector<std::uint32_t>& prefix, std::uint32_t m) {
    auto key = std::make_pair(prefix, m);
    if (auto it = memo_.find(key); it != memo_.end())
        return it->second;
    extend(prefix);
    DiffPoly f = level(prefix, m);
    memo_.emplace(std::move(key), f);
    return f;
}

DiffPoly TowerCache::reduce(const std::vector<std::uint32_t>& prefix, const DiffPoly& p) {
    return chain(prefix).reduce(p);
}

bool TowerCache::equivalent(const std::vector<std::uint32_t>& prefix, std::uint32_t m, const DiffPoly& p) {
    DiffPoly f = min(prefix, m);
    const Chain& ch = chain(prefix);
    DiffPoly a = ch.reduce(p);
    if (f.is_zero() || a.is_zero())
        return f.is_zero() && a.is_zero();
    Var v = YV(m);
    if (!(rank_in(a, v) == rank_in(f, v)))
        return false;
    return ch.reduce(partial_reduce(a, f, v, ch).remainder).is_zero();
}

// ---------------------------------------------------------------- construction

Construction::Construction(LowFieldApprox& K, ConstructionOptions opt)
    : K_(K), opt_(opt), towers_(TowerCache::Index{&U_, &Uvars_, &Uby_}), closure_polys_(y_family_leaves()) {
    F0_ = {0, 1};
    g_[0] = eng_.rational(0);
    g_[1] = eng_.rational(1);
    add_to_U(DiffPoly::var(Y(0)));
    add_to_U(DiffPoly::var(Y(1)) - DiffPoly(1));
    stage_added_.clear();
    lists_ = rebuild_priority_lists(h_, F0_);
    history_.push_back(h_);
    list_history_.push_back(lists_);
}

void Construction::add_to_U(const DiffPoly& p) {
    if (std::find(U_.begin(), U_.end(), p) != U_.end())
        return;
    std::size_t k = U_.size();
    U_.push_back(p);
    Uvars_.push_back(vars_of(p));
    for (const Var& v : Uvars_.back())
        Uby_[v.index].push_back(k);
    stage_added_.push_back(p);
    towers_.invalidate();
    search_cache_.clear();
}

void Construction::assign(std::size_t n, std::uint32_t m) {
    hn_[n] = m;
    hninv_[m] = n;
}

void Construction::record(const std::string& substage, const std::string& action, std::vector<DiffPoly> added,
                          std::string note) {
    Event e;
    e.stage = s_ + 1;
    e.substage = substage;
    e.action = action;
    e.h = hn_;
    e.U_added = std::move(added);
    e.note = std::move(note);
    log_.push_back(std::move(e));
}

std::map<Var, Var> Construction::renaming(const Tuple& rho, const std::vector<std::uint32_t>& images) const {
    std::map<Var, Var> ren;
    for (std::size_t k = 0; k < rho.size(); ++k)
        ren[X(static_cast<std::uint32_t>(rho[k]))] = Y(images[k]);
    return ren;
}

// The polynomials of sigma_{i-1} with X_{n_k} renamed to Y of the k-th image.
std::vector<DiffPoly> Construction::sigma_images(std::size_t i, const Tuple& rho_all,
                                                 const std::vector<std::uint32_t>& images) {
    std::vector<DiffPoly> out;
    for (std::size_t k = 0; k < i; ++k) {
        Tuple rho(rho_all.begin(), rho_all.begin() + static_cast<long>(k));
        DiffPoly p = K_.p(rho_all[k], rho, s_);
        Tuple upto(rho_all.begin(), rho_all.begin() + static_cast<long>(k + 1));
        out.push_back(rename(p, renaming(upto, images)));
    }
    return out;
}

bool Construction::sigma_consistent(std::size_t i) {
    std::vector<DiffPoly> eqs;
    std::vector<std::string> key;
    std::vector<Var> xs;
    for (std::size_t j = 0; j <= i; ++j) {
        DiffPoly p = K_.p(lists_.n[j], lists_.rho(j), s_);
        key.push_back(p.str());
        eqs.push_back(std::move(p));
        xs.push_back(X(static_cast<std::uint32_t>(lists_.n[j])));
    }
    if (auto it = sigma_cache_.find(key); it != sigma_cache_.end())
        return it->second.verdict == Verdict::Consistent;
    ConsistencyOracle oracle(opt_.limits);
    ConsistencyQuery q;
    q.eqs = eqs;
    q.distinct = xs;
    ConsistencyResult res;
    bool done = false;
    if (i > 0) {
        std::vector<std::string> prev(key.begin(), key.end() - 1);
        auto it = sigma_cache_.find(prev);
        if (it != sigma_cache_.end() && it->second.verdict == Verdict::Consistent) {
            ConsistencyQuery ext = q;
            for (std::size_t j = 0; j < i; ++j)
                ext.pinned[xs[j]] = it->second.witness.at(xs[j]);
            ext.trust_pins = true;
            res = oracle.check(ext, it->second.eng);
            done = res.verdict == Verdict::Consistent;
        }
    }
    if (!done)
        res = oracle.check(q, ClosureEngine{});
    if (res.verdict == Verdict::Unsupported)
        throw Unsupported("consistency of the approximation to K up to x" + std::to_string(lists_.n[i]) +
                          " is outside the oracle: " + res.reason);
    SigmaEntry e{res.verdict, std::move(res.engine), std::move(res.witness)};
    bool ok = e.verdict == Verdict::Consistent;
    sigma_cache_.emplace(std::move(key), std::move(e));
    return ok;
}

std::map<Var, Elem> Construction::g_at() const {
    std::map<Var, Elem> at;
    for (const auto& [m, e] : g_)
        at[Y(m)] = e;
    return at;
}

std::uint32_t Construction::next_index() const { return F0_.empty() ? 0 : *F0_.rbegin() + 1; }

bool Construction::compatible(const std::vector<std::uint32_t>& prefix, std::uint32_t m, const DiffPoly& p) {
    if (!F0_.count(m))
        return !p.is_zero();
    if (towers_.equivalent(prefix, m, p))
        return true;
    Var v = Y(m);
    DiffPoly a = towers_.reduce(prefix, p);
    return !a.is_zero() && rank_or_inf(a, v) < rank_or_inf(towers_.min(prefix, m), v);
}

bool Construction::commit(const std::vector<DiffPoly>& C, std::uint32_t m, std::string* why) {
    bool existing = F0_.count(m) > 0;
    if (existing) {
        auto at = g_at();
        bool holds = std::all_of(C.begin(), C.end(), [&](const DiffPoly& c) { return eng_.is_zero(eng_.eval(c, at)); });
        if (holds)
            return true;
    }
    // y_m and the later elements tied to it through U are re-solved; the rest stay pinned.
    std::set<std::uint32_t> freev{m};
    std::vector<std::uint32_t> work{m};
    std::set<std::size_t> touching;
    while (!work.empty()) {
        std::uint32_t v = work.back();
        work.pop_back();
        auto it = Uby_.find(v);
        if (it == Uby_.end())
            continue;
        for (std::size_t k : it->second) {
            touching.insert(k);
            for (const Var& w : Uvars_[k])
                if (w.index > m && !freev.count(w.index)) {
                    freev.insert(w.index);
                    work.push_back(w.index);
                }
        }
    }
    ConsistencyQuery q;
    q.eqs = C;
    for (std::size_t k : touching)
        q.eqs.push_back(U_[k]);
    for (std::uint32_t k : F0_) {
        q.distinct.push_back(Y(k));
        if (!freev.count(k))
            q.pinned[Y(k)] = g_.at(k);
    }
    if (!existing)
        q.distinct.push_back(Y(m));
    q.trust_pins = true;
    ConsistencyResult res = ConsistencyOracle(opt_.limits).check(q, eng_);
    if (res.verdict != Verdict::Consistent) {
        if (why)
            *why = to_string(res.verdict) + (res.reason.empty() ? "" : ": " + res.reason);
        return false;
    }
    eng_ = std::move(res.engine);
    for (std::uint32_t k : freev)
        g_[k] = res.witness.at(Y(k));
    return true;
}

void Construction::begin_stage() {
    if (in_stage_)
        throw Error("construction: stage already open");
    in_stage_ = true;
    over_ = false;
    hn_.clear();
    hninv_.clear();
    stage_added_.clear();
}

bool Construction::run_substage_R(std::size_t n) {
    auto pos = lists_.position_of_n(n);
    if (!pos)
        throw Error("construction: R" + std::to_string(n) + " reached but not on the priority list");
    std::size_t i = *pos;
    std::string label = "R:" + std::to_string(n);
    if (!sigma_consistent(i)) {
        record(label, "sigma-inconsistent");
        over_ = true;
        return false;
    }
    if (hn_.count(n))
        return true;
    Tuple rho = lists_.rho(i);
    std::vector<std::uint32_t> prefix = lists_.m_prefix(i);
    DiffPoly p = K_.p(n, rho, s_);
    Var xn = X(static_cast<std::uint32_t>(n));
    auto ren = renaming(rho, prefix);
    auto cur = h_.find(n);
    if (cur != h_.end()) {
        std::uint32_t m1 = cur->second;
        auto r2 = ren;
        r2[xn] = Y(m1);
        if (towers_.equivalent(prefix, m1, rename(p, r2))) {
            assign(n, m1);
            return true;
        }
    }
    std::string note = cur != h_.end() ? "abandons y" + std::to_string(cur->second) : "";
    over_ = true;
    if (p.is_zero()) {
        std::uint32_t m = static_cast<std::uint32_t>(n + 1);
        while (F0_.count(m))
            ++m;
        F0_.insert(m);
        assign(n, m);
        record(label, "transcendental-slot", {}, note);
        return false;
    }
    std::vector<DiffPoly> C = sigma_images(i, rho, prefix);
    std::vector<std::uint32_t> cands(F0_.begin(), F0_.end());
    cands.push_back(next_index());
    std::string why_last;
    for (std::uint32_t m : cands) {
        if (hninv_.count(m) || std::find(prefix.begin(), prefix.end(), m) != prefix.end())
            continue;
        auto r2 = ren;
        r2[xn] = Y(m);
        DiffPoly pm = rename(p, r2);
        if (!compatible(prefix, m, pm))
            continue;
        auto Cm = C;
        Cm.push_back(pm);
        std::string why;
        if (!commit(Cm, m, &why)) {
            why_last = why;
            continue;
        }
        F0_.insert(m);
        assign(n, m);
        stage_added_.clear();
        add_to_U(pm);
        record(label, "assign", {pm}, note);
        return false;
    }
    throw Unsupported("R" + std::to_string(n) + ": no element of F accepts " + p.str() +
                      (why_last.empty() ? "" : " (" + why_last + ")"));
}

std::optional<DiffPoly> Construction::lower_relation(const std::vector<std::uint32_t>& prefix, std::uint32_t m) {
    DiffPoly f = towers_.min(prefix, m);
    std::optional<Rank> below;
    if (!f.is_zero())
        below = rank_in(f, Y(m));
    std::vector<Elem> vals;
    for (std::uint32_t k : prefix)
        vals.push_back(g_.at(k));
    vals.push_back(g_.at(m));
    auto key = std::make_pair(prefix, m);
    auto it = search_cache_.find(key);
    bool reuse = it != search_cache_.end() && it->second.below == below && it->second.values.size() == vals.size();
    if (reuse)
        for (std::size_t k = 0; k < vals.size() && reuse; ++k)
            reuse = it->second.values[k].num == vals[k].num && it->second.values[k].den == vals[k].den;
    if (reuse && it->second.found)
        return it->second.q;
    RelationQuery q;
    for (std::uint32_t k : prefix)
        q.base.push_back(Y(k));
    q.base_values.assign(vals.begin(), vals.end() - 1);
    q.target = Y(m);
    q.value = vals.back();
    q.enum_limit = s_;
    q.below = below;
    const Chain& ch = towers_.chain(prefix);
    q.normalize = [&ch](const DiffPoly& p) { return ch.reduce(p); };
    if (reuse) {
        q.enum_only = true;
        q.enum_from = it->second.upto;
    }
    RelationResult r = least_relation(eng_, q);
    SearchEntry e{vals, below, s_, r.found, r.poly};
    search_cache_[key] = std::move(e);
    if (r.found)
        return r.poly;
    return std::nullopt;
}

bool Construction::run_substage_S(std::uint32_t m) {
    auto pos = lists_.position_of_m(m);
    if (!pos)
        throw Error("construction: S" + std::to_string(m) + " reached but not on the priority list");
    std::size_t i = *pos;
    std::string label = "S:" + std::to_string(m);
    for (const auto& [n, mm] : hn_)
        if (mm == m && n <= m)
            return true;
    std::optional<std::size_t> prev;
    if (auto it = hinv_.find(m); it != hinv_.end() && it->second > m)
        prev = it->second;
    if (prev && s_ >= 1) {
        Tuple rho = lists_.rho(i);
        if (!(K_.p(*prev, rho, s_) == K_.p(*prev, rho, s_ - 1))) {
            record(label, "abandoned", {}, "x" + std::to_string(*prev) + " changed its guess");
            over_ = true;
            return false;
        }
    }
    std::vector<std::uint32_t> prefix = lists_.m_prefix(i);
    if (auto q = lower_relation(prefix, m)) {
        stage_added_.clear();
        add_to_U(*q);
        record(label, "lower-rank", {*q}, prev ? "detaches x" + std::to_string(*prev) : "");
        over_ = true;
        run_unattached();
        return false;
    }
    if (prev) {
        assign(*prev, m);
        return true;
    }
    over_ = true;
    run_unattached();
    return false;
}

void Construction::run_unattached() {
    std::size_t i = 0;
    while (i < lists_.m.size() && hninv_.count(lists_.m[i]))
        ++i;
    if (i == lists_.m.size())
        return;
    std::uint32_t m = lists_.m[i];
    std::vector<std::uint32_t> prefix = lists_.m_prefix(i);
    Tuple rho;
    for (std::uint32_t k : prefix)
        rho.push_back(hninv_.at(k));
    auto ren = renaming(rho, prefix);
    std::vector<DiffPoly> C;
    bool c_ready = false;
    std::vector<std::size_t> matching;
    std::optional<std::size_t> chosen;
    for (std::size_t n = 0; n <= s_; ++n) {
        if (hn_.count(n) || std::find(rho.begin(), rho.end(), n) != rho.end())
            continue;
        DiffPoly p = K_.p(n, rho, s_);
        auto r2 = ren;
        r2[X(static_cast<std::uint32_t>(n))] = Y(m);
        DiffPoly pm = rename(p, r2);
        if (!towers_.equivalent(prefix, m, pm))
            continue;
        matching.push_back(n);
        if (chosen)
            continue;
        if (!c_ready) {
            C = sigma_images(i, rho, prefix);
            c_ready = true;
        }
        auto Cm = C;
        Cm.push_back(pm);
        if (commit(Cm, m, nullptr))
            chosen = n;
    }
    if (!chosen)
        return;
    assign(*chosen, m);
    std::string note = "candidates";
    for (std::size_t n : matching)
        note += " " + std::to_string(n);
    record("unattached:" + std::to_string(m), "attach", {}, note);
}

namespace {

constexpr std::size_t kRationalTries = 400;
constexpr std::size_t kRationalSolves = 12;

// 0, 1, -1, 2, -2, 1/2, -1/2, 3, -3, 3/2, ... by height, then denominator.
const std::vector<Rational>& small_rationals() {
    static const std::vector<Rational> seq = [] {
        std::vector<Rational> out{0, 1, -1};
        for (long h = 2; out.size() < kRationalTries; ++h)
            for (long den = 1; den <= h; ++den)
                for (long num = 1; num <= h; ++num) {
                    if (std::max(num, den) != h || std::gcd(num, den) != 1)
                        continue;
                    out.emplace_back(num, den);
                    out.emplace_back(-num, den);
                }
        return out;
    }();
    return seq;
}

void atoms_of(const Elem& e, std::set<std::size_t>& out) {
    for (const DiffPoly* p : {&e.num, &e.den})
        for (const Var& v : vars_of(*p))
            if (v.family == Family::E)
                out.insert(v.index);
}

} // namespace

void Construction::run_final_step() {
    std::size_t keep = 0;
    while (keep < lists_.m.size()) {
        std::uint32_t m = lists_.m[keep];
        auto a = hninv_.find(m);
        auto b = hinv_.find(m);
        bool same = (a == hninv_.end() && b == hinv_.end()) ||
                    (a != hninv_.end() && b != hinv_.end() && a->second == b->second);
        if (!same)
            break;
        ++keep;
    }
    PriorityLists next = rebuild_priority_lists(hn_, F0_);
    std::vector<std::uint32_t> order(lists_.m.begin(), lists_.m.begin() + static_cast<long>(keep));
    std::set<std::uint32_t> placed(order.begin(), order.end());
    for (std::uint32_t m : next.m)
        if (placed.insert(m).second)
            order.push_back(m);
    for (std::uint32_t m : F0_)
        if (placed.insert(m).second)
            order.push_back(m);

    std::set<std::size_t> used;
    std::vector<Elem> assigned;
    for (std::size_t j = 0; j < keep; ++j) {
        atoms_of(g_.at(order[j]), used);
        assigned.push_back(g_.at(order[j]));
    }
    std::map<Var, Elem> at;
    for (std::size_t j = 0; j < keep; ++j)
        at[Y(order[j])] = g_.at(order[j]);

    for (std::size_t j = keep; j < order.size(); ++j) {
        std::uint32_t m = order[j];
        Var v = Y(m);
        std::vector<std::uint32_t> prefix(order.begin(), order.begin() + static_cast<long>(j));
        DiffPoly f = towers_.min(prefix, m);
        std::set<std::uint32_t> allowed(prefix.begin(), prefix.end());
        allowed.insert(m);
        std::vector<std::size_t> local;
        if (auto it = Uby_.find(m); it != Uby_.end())
            for (std::size_t k : it->second)
                if (std::all_of(Uvars_[k].begin(), Uvars_[k].end(),
                                [&](const Var& w) { return allowed.count(w.index) > 0; }))
                    local.push_back(k);
        auto valid = [&](const Elem& z) {
            for (const Elem& e : assigned)
                if (eng_.equal(e, z))
                    return false;
            auto at2 = at;
            at2[v] = z;
            for (std::size_t k : local)
                if (!eng_.is_zero(eng_.eval(U_[k], at2)))
                    return false;
            return true;
        };
        std::optional<Elem> old;
        if (auto it = g_.find(m); it != g_.end())
            old = it->second;
        // The old value stays when it still looks generic: it depends on an
        // atom of the right kind that no earlier value uses.
        auto old_free_atom = [&](std::initializer_list<AtomKind> kinds) {
            if (!old || !valid(*old))
                return false;
            if (!f.is_zero()) {
                auto at2 = at;
                at2[v] = *old;
                if (!eng_.is_zero(eng_.eval(f, at2)))
                    return false;
            }
            std::set<std::size_t> mine;
            atoms_of(*old, mine);
            for (std::size_t a : mine) {
                AtomKind k = eng_.atoms().at(a).kind;
                if (!used.count(a) && std::find(kinds.begin(), kinds.end(), k) != kinds.end())
                    return true;
            }
            return false;
        };
        auto n = hninv_.find(m);
        bool higher = n != hninv_.end() && n->second <= m;
        std::optional<Elem> z;
        std::string fail;
        int ord = f.is_zero() ? -2 : order_in(f, v);
        if (f.is_zero() && higher) {
            if (old_free_atom({AtomKind::Transcendental}))
                z = old;
            else
                z = eng_.adjoin_transcendental();
        } else if (!f.is_zero() && ord > 0 && higher) {
            // Ties to later elements pin the value; S_m sorts out any lower relation.
            bool tied = false;
            if (auto it = Uby_.find(m); it != Uby_.end())
                tied = it->second.size() > local.size();
            bool holds = false;
            if (old && valid(*old)) {
                auto at2 = at;
                at2[v] = *old;
                holds = eng_.is_zero(eng_.eval(f, at2));
            }
            if (old_free_atom({AtomKind::Order1, AtomKind::Constant}) || (tied && holds))
                z = old;
            else
                z = eng_.adjoin_generic_zero(f, v, at);
        } else if (ord == 0) {
            if (old && valid(*old))
                z = old;
            else {
                RootSet rs = eng_.roots(f, v, at);
                for (const Elem& r : rs.roots)
                    if (valid(r)) {
                        z = r;
                        break;
                    }
                if (!z)
                    fail = rs.complete ? "no root of " + f.str() + " fits U" : "roots of " + f.str() + " are outside the engine";
            }
        } else {
            std::optional<std::size_t> alg;
            for (std::size_t k : local)
                if (order_in(U_[k], v) == 0) {
                    alg = k;
                    break;
                }
            if (alg) {
                if (old && valid(*old))
                    z = old;
                else {
                    RootSet rs = eng_.roots(U_[*alg], v, at);
                    for (const Elem& r : rs.roots)
                        if (valid(r)) {
                            z = r;
                            break;
                        }
                    if (!z)
                        fail = "no root of " + U_[*alg].str() + " fits U";
                }
            } else {
                if (old) {
                    std::set<std::size_t> mine;
                    atoms_of(*old, mine);
                    bool inside = std::all_of(mine.begin(), mine.end(), [&](std::size_t a) {
                        return eng_.atoms().at(a).kind == AtomKind::Algebraic || used.count(a) > 0;
                    });
                    if (inside && valid(*old))
                        z = old;
                }
                // Later elements tied to y_m through U are re-solved with it.
                std::size_t solves = 0;
                for (std::size_t k = 0; !z && k < kRationalTries; ++k) {
                    Rational r = small_rationals()[k];
                    Elem c = eng_.rational(r);
                    if (!valid(c))
                        continue;
                    bool taken = false;
                    for (const auto& [k2, e] : g_)
                        if (k2 != m && eng_.equal(e, c))
                            taken = true;
                    if (taken)
                        continue;
                    auto all = g_at();
                    all[v] = c;
                    bool fits = true;
                    if (auto it = Uby_.find(m); it != Uby_.end())
                        for (std::size_t u : it->second)
                            if (!eng_.is_zero(eng_.eval(U_[u], all))) {
                                fits = false;
                                break;
                            }
                    if (fits)
                        z = c;
                    else if (solves++ < kRationalSolves && commit({DiffPoly::var(v) - DiffPoly(r)}, m, nullptr))
                        z = g_.at(m);
                }
                if (!z && !f.is_zero() && ord == 1) {
                    try {
                        Elem c = eng_.adjoin_generic_zero(f, v, at);
                        if (valid(c))
                            z = c;
                    } catch (const Unsupported&) {
                    }
                }
                if (!z)
                    fail = "no value in the closure fits " + (f.is_zero() ? std::string("U") : f.str());
            }
        }
        if (!z || !valid(*z))
            throw Unsupported("final step at " + render(v) + ": " + (fail.empty() ? "chosen value violates U" : fail));
        g_[m] = *z;
        at[v] = *z;
        assigned.push_back(*z);
        atoms_of(*z, used);
    }
    closure_step();
}

void Construction::closure_step() {
    std::size_t st = s_ + 1;
    auto at = g_at();
    auto locate = [&](const Elem& z) -> std::optional<std::uint32_t> {
        for (const auto& [m, e] : g_)
            if (eng_.equal(e, z))
                return m;
        return std::nullopt;
    };
    std::vector<DiffPoly> added;
    std::string note;
    if (st % 2 == 0) {
        auto ready = [&](const DiffPoly& q) {
            for (const Var& v : vars_of(q))
                if (!F0_.count(v.index))
                    return false;
            return true;
        };
        std::optional<DiffPoly> q;
        for (auto it = closure_pending_.begin(); it != closure_pending_.end(); ++it)
            if (ready(closure_polys_.at(*it)->num)) {
                q = closure_polys_.at(*it)->num;
                closure_pending_.erase(it);
                break;
            }
        while (!q) {
            const Expr* e = closure_polys_.at(closure_cursor_);
            if (!e)
                throw Horizon("closure enumeration exhausted");
            if (ready(e->num))
                q = e->num;
            else
                closure_pending_.push_back(closure_cursor_);
            ++closure_cursor_;
        }
        Elem z = eng_.eval(*q, at);
        std::uint32_t m;
        if (auto hit = locate(z)) {
            m = *hit;
        } else {
            m = next_index();
            F0_.insert(m);
            g_[m] = z;
        }
        DiffPoly u = *q - DiffPoly::var(Y(m));
        if (!u.is_zero() && std::find(U_.begin(), U_.end(), u) == U_.end()) {
            add_to_U(u);
            added.push_back(u);
        }
        processed_.emplace_back(*q, m);
        note = "q = " + q->str();
    } else {
        std::optional<std::uint32_t> k;
        for (std::uint32_t c : F0_)
            if (c >= 1 && !inverted_.count(c)) {
                k = c;
                break;
            }
        if (k) {
            inverted_.insert(*k);
            Elem z = eng_.inv(g_.at(*k));
            std::uint32_t m;
            if (auto hit = locate(z)) {
                m = *hit;
            } else {
                m = next_index();
                F0_.insert(m);
                g_[m] = z;
            }
            DiffPoly u = DiffPoly::var(Y(*k)) * DiffPoly::var(Y(m)) - DiffPoly(1);
            if (std::find(U_.begin(), U_.end(), u) == U_.end()) {
                add_to_U(u);
                added.push_back(u);
            }
            note = "inverse of y" + std::to_string(*k);
        }
    }
    record("final", "close", added, note);
}

void Construction::end_stage() {
    if (!in_stage_)
        throw Error("construction: no open stage");
    in_stage_ = false;
    h_ = hn_;
    hinv_ = hninv_;
    ++s_;
    lists_ = rebuild_priority_lists(h_, F0_);
    history_.push_back(h_);
    list_history_.push_back(lists_);
}

void Construction::run_stage() {
    begin_stage();
    for (std::size_t k = 0; k <= s_ && !over_; ++k) {
        if (!run_substage_R(k))
            break;
        if (F0_.count(static_cast<std::uint32_t>(k)) && !run_substage_S(static_cast<std::uint32_t>(k)))
            break;
    }
    run_final_step();
    end_stage();
}

// ---------------------------------------------------------------- checks

RunReport check_run(Construction& c, MockLowField& K) {
    RunReport rep;
    rep.stages = c.stage();
    const auto& lh = c.list_history();
    std::size_t window = std::max<std::size_t>(20, K.horizon() / 4);
    window = std::min(window, lh.size());
    auto pairs = [](const PriorityLists& L) {
        std::vector<std::pair<std::uint32_t, std::size_t>> out;
        for (std::size_t i = 0; i < L.m.size() && i + 1 < L.n.size() + (L.n.size() > L.m.size() ? 0 : 1); ++i) {
            if (i >= L.n.size())
                break;
            out.emplace_back(L.m[i], L.n[i]);
        }
        return out;
    };
    // The last n entry may be the least index outside dom h; keep only mapped pairs.
    auto mapped = [&](const PriorityLists& L, const HMap& h) {
        auto ps = pairs(L);
        std::vector<std::pair<std::uint32_t, std::size_t>> out;
        for (const auto& [m, n] : ps) {
            auto it = h.find(n);
            if (it == h.end() || it->second != m)
                break;
            out.push_back({m, n});
        }
        return out;
    };
    const auto& hh = c.history();
    auto frag = mapped(lh.back(), hh.back());
    for (std::size_t t = lh.size() - window; t < lh.size(); ++t) {
        auto other = mapped(lh[t], hh[t]);
        std::size_t k = 0;
        while (k < frag.size() && k < other.size() && frag[k] == other[k])
            ++k;
        frag.resize(k);
    }
    rep.fragment = frag;

    std::set<std::size_t> ns;
    std::set<std::uint32_t> ms;
    for (const auto& [m, n] : frag) {
        ns.insert(n);
        ms.insert(m);
    }
    rep.converged = true;
    for (std::size_t n = 0; n < K.scripted(); ++n)
        if (!ns.count(n)) {
            rep.converged = false;
            rep.problems.push_back("x" + std::to_string(n) + " is not in the stable fragment");
        }
    // Onto: no F-element below the scripted images is left without a preimage.
    std::uint32_t top = 0;
    for (const auto& [m, n] : frag)
        if (n < K.scripted())
            top = std::max(top, m);
    for (std::uint32_t m = 0; rep.converged && m <= top; ++m)
        if (c.F0().count(m) && !ms.count(m))
            rep.converged = false;
    if (!rep.converged && frag.size() < lh.back().m.size())
        rep.problems.push_back("S" + std::to_string(lh.back().m[frag.size()]) + " or R" +
                               std::to_string(frag.size() < lh.back().n.size() ? lh.back().n[frag.size()] : 0) +
                               " did not settle: y" + std::to_string(lh.back().m[frag.size()]) +
                               " has no stable preimage");
    rep.bijective = ns.size() == frag.size() && ms.size() == frag.size();
    for (const auto& [m, n] : frag)
        if (c.h().count(n) == 0 || c.h().at(n) != m)
            rep.bijective = false;
    if (!rep.bijective)
        rep.problems.push_back("h is not a bijection on the fragment");

    // Committed minimal polynomials against the declared truth.
    std::size_t last = c.stage();
    rep.isomorphic = last > K.last_change_stage();
    if (!rep.isomorphic)
        rep.problems.push_back("run ended before the last mind change");
    for (std::size_t i = 0; i < frag.size(); ++i) {
        Tuple rho;
        std::vector<std::uint32_t> prefix;
        std::map<Var, Var> ren;
        for (std::size_t k = 0; k < i; ++k) {
            rho.push_back(frag[k].second);
            prefix.push_back(frag[k].first);
            ren[X(static_cast<std::uint32_t>(frag[k].second))] = Y(frag[k].first);
        }
        auto [m, n] = frag[i];
        ren[X(static_cast<std::uint32_t>(n))] = Y(m);
        DiffPoly truth = rename(K.p(n, rho, last), ren);
        if (!c.towers().equivalent(prefix, m, truth)) {
            rep.isomorphic = false;
            rep.problems.push_back("y" + std::to_string(m) + " commits to " + c.towers().min(prefix, m).str() +
                                   " but x" + std::to_string(n) + " has " + truth.str());
        }
    }

    // One m per processed q, by value and by the literal entries of U.
    rep.unique_closure = true;
    auto at = [&] {
        std::map<Var, Elem> a;
        for (const auto& [m, e] : c.g())
            a[Y(m)] = e;
        return a;
    }();
    const ClosureEngine& eng = c.engine();
    for (const auto& [q, m] : c.processed()) {
        Elem z = eng.eval(q, at);
        std::size_t hits = 0;
        for (const auto& [k, e] : c.g())
            if (eng.equal(e, z)) {
                ++hits;
                if (k != m)
                    rep.unique_closure = false;
            }
        std::set<std::uint32_t> literal;
        for (const auto& u : c.U()) {
            DiffPoly d = q - u;
            if (d.size() == 1 && d.is_constant() == false) {
                const Monomial& mo = d.monomials().front();
                if (mo.coeff == 1 && mo.exps.size() == 1 && mo.exps[0].exp == 1 && mo.exps[0].x.deriv == 0 &&
                    mo.exps[0].x.var.family == Family::Y)
                    literal.insert(mo.exps[0].x.var.index);
            }
        }
        bool lit_ok = literal.empty() ? q == DiffPoly::var(Y(m)) : (literal.size() == 1 && *literal.begin() == m);
        if (hits != 1 || !lit_ok) {
            rep.unique_closure = false;
            rep.problems.push_back("closure polynomial " + q.str() + " is not tied to a unique element");
        }
    }

    ConsistencyQuery q;
    q.eqs = c.U();
    for (std::uint32_t k : c.F0())
        q.distinct.push_back(Y(k));
    std::string why;
    rep.witness = verify_witness(q, at, eng, &why);
    if (!rep.witness)
        rep.problems.push_back("final U has no witness at g: " + why);

    // Changes of h(n) and h^{-1}(m) against the mind changes at equal or higher priority.
    rep.injury_bounded = true;
    std::vector<std::size_t> budget(frag.size());
    std::size_t acc = 0;
    for (std::size_t i = 0; i < frag.size(); ++i) {
        acc += K.mind_changes(frag[i].second);
        budget[i] = acc + 1;
    }
    for (std::size_t i = 0; i < frag.size(); ++i) {
        auto [m, n] = frag[i];
        std::size_t forward = 0, backward = 0;
        std::optional<std::uint32_t> lastf;
        std::optional<std::size_t> lastb;
        for (const HMap& h : hh) {
            if (auto it = h.find(n); it != h.end() && it->second != lastf) {
                ++forward;
                lastf = it->second;
            }
            for (const auto& [a, b] : h)
                if (b == m && a != lastb) {
                    ++backward;
                    lastb = a;
                }
        }
        std::string line = "x" + std::to_string(n) + " -> y" + std::to_string(m) + ": h changed " +
                           std::to_string(forward) + ", inverse changed " + std::to_string(backward) +
                           ", bound " + std::to_string(budget[i]);
        if (forward > budget[i] || backward > budget[i]) {
            rep.injury_bounded = false;
            rep.problems.push_back(line);
        }
        rep.injury.push_back(line);
    }
    return rep;
}

RunResult run_to_convergence(MockLowField& K, std::size_t max_stage) {
    if (max_stage == 0)
        max_stage = K.horizon();
    ConstructionOptions opt;
    opt.max_stage = max_stage;
    Construction c(K, opt);
    RunResult out;
    try {
        while (c.stage() < max_stage)
            c.run_stage();
        out.report = check_run(c, K);
    } catch (const Unsupported& e) {
        out.report.aborted = true;
        out.report.abort_reason = e.what();
    } catch (const TowerLimitation& e) {
        out.report.aborted = true;
        out.report.abort_reason = e.what();
    } catch (const Inconsistent& e) {
        out.report.aborted = true;
        out.report.abort_reason = e.what();
    }
    out.report.stages = c.stage();
    out.U = c.U();
    out.h = c.h();
    out.log = c.log();
    return out;
}

} // namespace dcfwb
