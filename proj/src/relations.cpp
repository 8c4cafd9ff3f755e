#include "dcfwb/relations.hpp"

#include "dcfwb/error.hpp"
#include "dcfwb/ritt.hpp"

#include <algorithm>
#include <numeric>

namespace dcfwb {

bool ExprEnumerator::Key::operator<(const Key& o) const {
    int c = compare(num, o.num);
    if (c)
        return c < 0;
    return compare(den, o.den) < 0;
}

ExprEnumerator::ExprEnumerator(Leaves leaves, Options opt) : leaves_(std::move(leaves)), opt_(opt) {
    buckets_.emplace_back(); // size 0 is empty
}

ExprEnumerator::Leaves y_family_leaves() {
    return [](unsigned size) { return std::vector<Var>{Y(size - 1)}; };
}

namespace {

std::optional<Var> join(const std::optional<Var>& a, const std::optional<Var>& b, bool& clash) {
    clash = false;
    if (a && b && *a != *b)
        clash = true;
    return a ? a : b;
}

} // namespace

bool ExprEnumerator::offer(std::vector<Expr>& out, Expr e) {
    if (e.den.is_zero())
        return false;
    if (!e.den.is_constant() && e.num.is_zero())
        return false;
    Rational lc = e.den.lead_coeff();
    if (lc != 1) {
        Rational inv = 1 / lc;
        e.num = scale(e.num, inv);
        e.den = scale(e.den, inv);
    }
    if (!seen_.insert(Key{e.num, e.den}).second)
        return false;
    out.push_back(std::move(e));
    return true;
}

bool ExprEnumerator::grow() {
    unsigned s = static_cast<unsigned>(buckets_.size());
    if (s > opt_.max_size)
        return false;
    std::vector<Expr> out;
    auto full = [&] { return out.size() >= opt_.bucket_cap; };
    // Rationals of size s.
    if (s == 1)
        offer(out, Expr{DiffPoly(0), DiffPoly(1), 1, std::nullopt});
    for (unsigned den = 1; den < s; ++den) {
        unsigned num = s - den;
        if (std::gcd(num, den) != 1)
            continue;
        Rational q(num, den);
        offer(out, Expr{DiffPoly(q), DiffPoly(1), s, std::nullopt});
        offer(out, Expr{DiffPoly(Rational(-q)), DiffPoly(1), s, std::nullopt});
    }
    for (const Var& v : leaves_(s))
        offer(out, Expr{DiffPoly::var(v), DiffPoly(1), s, v});
    if (s >= 2)
        for (std::size_t i = 0; i < buckets_[s - 1].size() && !full(); ++i) {
            const Expr& a = buckets_[s - 1][i];
            if (a.num.is_constant() && a.den.is_constant())
                continue;
            Expr d;
            d.size = s;
            d.var = a.var;
            if (a.den.is_constant()) {
                d.num = delta(a.num);
                d.den = a.den;
            } else {
                d.num = delta(a.num) * a.den - a.num * delta(a.den);
                d.den = a.den * a.den;
            }
            if (!d.num.is_zero())
                offer(out, std::move(d));
        }
    for (unsigned s1 = 1; s1 + 1 < s && !full(); ++s1) {
        unsigned s2 = s - 1 - s1;
        for (std::size_t i = 0; i < buckets_[s1].size() && !full(); ++i)
            for (std::size_t j = 0; j < buckets_[s2].size() && !full(); ++j) {
                const Expr& a = buckets_[s1][i];
                const Expr& b = buckets_[s2][j];
                bool ca = a.num.is_constant() && a.den.is_constant();
                bool cb = b.num.is_constant() && b.den.is_constant();
                if (ca && cb)
                    continue;
                bool clash = false;
                auto v = join(a.var, b.var, clash);
                if (clash && opt_.single_var)
                    continue;
                if (clash)
                    v.reset();
                bool first = s1 < s2 || (s1 == s2 && i <= j);
                if (first) {
                    offer(out, Expr{a.num * b.den + b.num * a.den, a.den * b.den, s, v});
                    offer(out, Expr{a.num * b.num, a.den * b.den, s, v});
                }
                offer(out, Expr{a.num * b.den - b.num * a.den, a.den * b.den, s, v});
                if (opt_.division && !b.num.is_zero())
                    offer(out, Expr{a.num * b.den, a.den * b.num, s, v});
            }
    }
    for (std::size_t k = 0; k < out.size(); ++k)
        flat_.emplace_back(s, k);
    buckets_.push_back(std::move(out));
    return true;
}

const Expr* ExprEnumerator::at(std::size_t i) {
    while (i >= flat_.size())
        if (!grow())
            return nullptr;
    auto [s, k] = flat_[i];
    return &buckets_[s][k];
}

namespace {

std::set<std::size_t> algebraic_atoms(const ClosureEngine& eng, const Elem& e, bool& other) {
    std::set<std::size_t> out;
    for (const DiffPoly* p : {&e.num, &e.den})
        for (const Indet& u : indets_of(*p)) {
            if (u.var.family != Family::E)
                continue;
            if (eng.atoms().at(u.var.index).kind == AtomKind::Algebraic)
                out.insert(u.var.index);
            else
                other = true;
        }
    return out;
}

Elem conjugate(const ClosureEngine& eng, const Elem& e, const std::vector<std::size_t>& flip) {
    DiffPoly n = e.num, d = e.den;
    for (std::size_t a : flip) {
        Indet x{E(static_cast<std::uint32_t>(a)), 0};
        DiffPoly m = -DiffPoly::indet(x);
        n = substitute(n, x, m);
        d = substitute(d, x, m);
    }
    return eng.div(eng.eval(n, {}), eng.eval(d, {}));
}

std::vector<std::size_t> mask_atoms(const std::vector<std::size_t>& atoms, unsigned long mask) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < atoms.size(); ++j)
        if (mask >> j & 1)
            out.push_back(atoms[j]);
    return out;
}

// prod (X - c) over the orbit, as engine coefficients, lowest degree first.
std::vector<Elem> orbit_poly(const ClosureEngine& eng, const std::vector<Elem>& orbit) {
    std::vector<Elem> c{eng.rational(1)};
    for (const Elem& r : orbit) {
        std::vector<Elem> next(c.size() + 1, eng.rational(0));
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k + 1] = eng.add(next[k + 1], c[k]);
            next[k] = eng.sub(next[k], eng.mul(c[k], r));
        }
        c = std::move(next);
    }
    return c;
}

void push_unique(const ClosureEngine& eng, std::vector<Elem>& orbit, const Elem& e) {
    for (const Elem& o : orbit)
        if (eng.equal(o, e))
            return;
    orbit.push_back(e);
}

constexpr std::size_t kMaxFlipAtoms = 6;

} // namespace

std::optional<UniPoly> algebraic_minpoly(const ClosureEngine& eng, const Elem& v) {
    bool other = false;
    auto atoms = algebraic_atoms(eng, v, other);
    if (other || atoms.size() > kMaxFlipAtoms)
        return std::nullopt;
    std::vector<std::size_t> as(atoms.begin(), atoms.end());
    std::vector<Elem> orbit;
    for (unsigned long mask = 0; mask < (1ul << as.size()); ++mask)
        push_unique(eng, orbit, conjugate(eng, v, mask_atoms(as, mask)));
    std::vector<Rational> q;
    for (const Elem& c : orbit_poly(eng, orbit)) {
        auto r = eng.rational_value(c);
        if (!r)
            return std::nullopt;
        q.push_back(*r);
    }
    return UniPoly(q);
}

namespace {

struct Candidate {
    DiffPoly poly;
    std::string source;
};

class Search {
public:
    Search(const ClosureEngine& eng, const RelationQuery& q) : eng_(eng), q_(q) {
        for (std::size_t k = 0; k < q.base.size(); ++k)
            at_[q.base[k]] = q.base_values[k];
        at_[q.target] = q.value;
    }

    void offer(DiffPoly p, const std::string& source) {
        if (p.is_zero() || !involves(p, q_.target))
            return;
        Elem val;
        try {
            val = eng_.eval(p, at_);
        } catch (const Error&) {
            return;
        }
        if (!eng_.is_zero(val))
            return;
        if (q_.normalize) {
            p = q_.normalize(p);
            if (p.is_zero() || !involves(p, q_.target))
                return;
        }
        Indet lead = leader(p, q_.target);
        std::set<Indet> xs = indets_of(p);
        if (degree_in(p, lead) > 1) {
            if (xs.size() == 1 && lead.deriv == 0) {
                // Univariate: keep the irreducible factor that vanishes.
                auto fs = factor(UniPoly::from_diffpoly(p, lead));
                if (!fs)
                    return;
                for (const UniPoly& f : *fs) {
                    DiffPoly fp = f.to_diffpoly(lead);
                    if (eng_.is_zero(eng_.eval(fp, at_))) {
                        p = fp;
                        break;
                    }
                }
            } else if (source != "square" && source != "interpolation") {
                return;
            }
        }
        Rank r = rank_in(p, q_.target);
        if (q_.below && !(r < *q_.below))
            return;
        if (best_ && !(r < best_rank_))
            return;
        best_ = Candidate{make_monic(p, q_.target), source};
        best_rank_ = r;
    }

    RelationResult run() {
        RelationResult res;
        if (!q_.enum_only)
            fixed(res);
        if (res.unsupported && !best_)
            return res;
        res.unsupported = false;
        enumerated();
        if (best_) {
            res.found = true;
            res.poly = best_->poly;
            res.source = best_->source;
        }
        return res;
    }

private:
    const ClosureEngine& eng_;
    const RelationQuery& q_;
    std::map<Var, Elem> at_;
    std::optional<Candidate> best_;
    Rank best_rank_ = Rank::infinite();

    void fixed(RelationResult& res) {
        const Elem& v = q_.value;
        DiffPoly T = DiffPoly::var(q_.target);
        if (auto c = eng_.rational_value(v))
            offer(T - DiffPoly(*c), "rational");
        for (std::size_t k = 0; k < q_.base.size(); ++k) {
            const Elem& b = q_.base_values[k];
            DiffPoly B = DiffPoly::var(q_.base[k]);
            if (auto d = eng_.rational_value(eng_.sub(v, b)))
                offer(T - B - DiffPoly(*d), "shift");
            if (auto d = eng_.rational_value(eng_.sub(v, eng_.deriv(b))))
                offer(T - DiffPoly::var(q_.base[k], 1) - DiffPoly(*d), "derivative");
            if (!eng_.is_zero(b)) {
                if (auto c = eng_.rational_value(eng_.div(v, b)); c && *c != 0)
                    offer(T - scale(B, *c), "ratio");
                if (!eng_.is_zero(v))
                    if (auto c = eng_.rational_value(eng_.mul(v, b)); c && *c != 0)
                        offer(B * T - DiffPoly(*c), "inverse");
            }
        }
        if (algebraic_part(res))
            return;
        {
            Elem v2 = eng_.mul(v, v);
            for (std::size_t k = 0; k < q_.base.size(); ++k)
                if (auto c = eng_.rational_value(eng_.sub(v2, q_.base_values[k])))
                    offer(T * T - DiffPoly::var(q_.base[k]) - DiffPoly(*c), "square");
            Elem dv = eng_.deriv(v);
            DiffPoly dT = DiffPoly::var(q_.target, 1);
            if (eng_.is_zero(dv))
                offer(dT, "constant");
            std::vector<std::pair<Var, Elem>> pool;
            for (std::size_t k = 0; k < q_.base.size(); ++k)
                pool.emplace_back(q_.base[k], q_.base_values[k]);
            pool.emplace_back(q_.target, v);
            for (const auto& [w, b] : pool) {
                DiffPoly B = DiffPoly::var(w);
                if (auto c = eng_.rational_value(eng_.sub(dv, b)))
                    offer(dT - B - DiffPoly(*c), "order1-shift");
                if (!eng_.is_zero(b))
                    if (auto c = eng_.rational_value(eng_.div(dv, b)); c && *c != 0)
                        offer(dT - scale(B, *c), "order1-ratio");
            }
        }
    }

    void enumerated() {
        if (q_.enum_limit > q_.enum_from) {
            // Relative sizes: the target is 1, the latest base element 2, and so on.
            std::vector<Var> base = q_.base;
            Var target = q_.target;
            ExprEnumerator en([base, target](unsigned size) {
                if (size == 1)
                    return std::vector<Var>{target};
                std::size_t back = size - 2;
                if (back < base.size())
                    return std::vector<Var>{base[base.size() - 1 - back]};
                return std::vector<Var>{};
            });
            for (std::size_t i = q_.enum_from; i < q_.enum_limit; ++i) {
                const Expr* e = en.at(i);
                if (!e)
                    break;
                offer(e->num, "enumeration");
            }
        }
    }

    // c as a polynomial with rational coefficients in the k-th base element.
    std::optional<DiffPoly> in_terms_of(const Elem& c, std::size_t k) {
        if (auto r = eng_.rational_value(c))
            return DiffPoly(*r);
        const Elem& b = q_.base_values[k];
        bool other = false;
        auto atoms = algebraic_atoms(eng_, b, other);
        if (other)
            return std::nullopt;
        auto ca = algebraic_atoms(eng_, c, other);
        if (other)
            return std::nullopt;
        atoms.insert(ca.begin(), ca.end());
        if (atoms.size() > kMaxFlipAtoms)
            return std::nullopt;
        std::vector<std::size_t> as(atoms.begin(), atoms.end());
        std::vector<Elem> bs, cs;
        for (unsigned long mask = 0; mask < (1ul << as.size()); ++mask) {
            auto flip = mask_atoms(as, mask);
            Elem bi = conjugate(eng_, b, flip), ci = conjugate(eng_, c, flip);
            bool seen = false;
            for (std::size_t i = 0; i < bs.size(); ++i)
                if (eng_.equal(bs[i], bi)) {
                    if (!eng_.equal(cs[i], ci))
                        return std::nullopt;
                    seen = true;
                }
            if (!seen) {
                bs.push_back(bi);
                cs.push_back(ci);
            }
        }
        // Lagrange form, coefficients low to high.
        std::vector<Elem> out(bs.size(), eng_.rational(0));
        for (std::size_t i = 0; i < bs.size(); ++i) {
            std::vector<Elem> basis{eng_.rational(1)};
            Elem scale_by = cs[i];
            for (std::size_t j = 0; j < bs.size(); ++j) {
                if (j == i)
                    continue;
                std::vector<Elem> next(basis.size() + 1, eng_.rational(0));
                for (std::size_t t = 0; t < basis.size(); ++t) {
                    next[t + 1] = eng_.add(next[t + 1], basis[t]);
                    next[t] = eng_.sub(next[t], eng_.mul(basis[t], bs[j]));
                }
                basis = std::move(next);
                scale_by = eng_.div(scale_by, eng_.sub(bs[i], bs[j]));
            }
            for (std::size_t t = 0; t < basis.size(); ++t)
                out[t] = eng_.add(out[t], eng_.mul(basis[t], scale_by));
        }
        DiffPoly r(0);
        DiffPoly B = DiffPoly::var(q_.base[k]);
        for (std::size_t t = 0; t < out.size(); ++t) {
            auto q = eng_.rational_value(out[t]);
            if (!q)
                return std::nullopt;
            if (*q != 0)
                r += scale(pow(B, static_cast<unsigned>(t)), *q);
        }
        return r;
    }

    // Exact minimal polynomial over Q(base) for algebraic values, via the
    // sign changes that fix every base value. Returns whether v is algebraic.
    bool algebraic_part(RelationResult& res) {
        const Elem& v = q_.value;
        bool other = false;
        auto va = algebraic_atoms(eng_, v, other);
        if (other)
            return false;
        if (va.empty())
            return true; // rational, handled above
        std::set<std::size_t> all = va;
        for (const Elem& b : q_.base_values) {
            bool o = false;
            auto ba = algebraic_atoms(eng_, b, o);
            all.insert(ba.begin(), ba.end());
        }
        for (const Atom& a : eng_.atoms())
            if (a.kind == AtomKind::Order1)
                for (const DiffPoly* p : {&a.dnum, &a.dden})
                    for (const Var& w : vars_of(*p))
                        if (all.count(w.index)) {
                            res.unsupported = true;
                            res.why = "an order-1 atom depends on a square root";
                            return true;
                        }
        if (all.size() > kMaxFlipAtoms) {
            res.unsupported = true;
            res.why = "too many square-root atoms for the conjugate search";
            return true;
        }
        std::vector<std::size_t> as(all.begin(), all.end());
        std::vector<Elem> orbit;
        for (unsigned long mask = 0; mask < (1ul << as.size()); ++mask) {
            auto flip = mask_atoms(as, mask);
            bool fixes = true;
            for (const Elem& b : q_.base_values)
                if (!eng_.equal(conjugate(eng_, b, flip), b)) {
                    fixes = false;
                    break;
                }
            if (fixes)
                push_unique(eng_, orbit, conjugate(eng_, v, flip));
        }
        std::vector<Rational> q;
        for (const Elem& c : orbit_poly(eng_, orbit)) {
            auto r = eng_.rational_value(c);
            if (!r)
                break;
            q.push_back(*r);
        }
        if (orbit.size() > 1 && q.size() == orbit.size() + 1) {
            offer(UniPoly(q).to_diffpoly(Indet{q_.target, 0}), "conjugates");
            return true;
        }
        // Coefficients in Q(b) for a single base element b, by interpolation.
        std::vector<Elem> coeffs = orbit_poly(eng_, orbit);
        for (std::size_t k = 0; k < q_.base.size(); ++k) {
            DiffPoly poly(0);
            bool ok = true;
            for (std::size_t j = 0; j < coeffs.size() && ok; ++j) {
                auto r = in_terms_of(coeffs[j], k);
                if (!r)
                    ok = false;
                else
                    poly += *r * pow(DiffPoly::var(q_.target), static_cast<unsigned>(j));
            }
            if (ok)
                offer(poly, "interpolation");
        }
        if (best_ && best_->source == "interpolation")
            return true;
        if (!best_ || best_rank_.degree() > 1 || best_rank_.order() > 0) {
            res.unsupported = true;
            res.why = orbit.size() == 1 ? "value lies in the base field but no candidate expresses it"
                                        : "minimal polynomial over the base has irrational coefficients";
        }
        return true;
    }
};

} // namespace

RelationResult least_relation(const ClosureEngine& eng, const RelationQuery& q) {
    if (q.base.size() != q.base_values.size())
        throw InvalidInput("relation query: base and values differ in length");
    return Search(eng, q).run();
}

} // namespace dcfwb
