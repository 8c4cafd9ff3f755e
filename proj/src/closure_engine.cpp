#include "dcfwb/closure_engine.hpp"

#include "dcfwb/error.hpp"
#include "dcfwb/univariate.hpp"

#include <algorithm>

namespace dcfwb {

std::string to_string(AtomKind k) {
    switch (k) {
    case AtomKind::Transcendental: return "transcendental";
    case AtomKind::Constant: return "constant";
    case AtomKind::Algebraic: return "algebraic";
    case AtomKind::Order1: return "order1";
    }
    return "?";
}

namespace {

using Primes = std::vector<mpz_class>; // sorted; -1 stands for the sign

// Squarefree part of n != 0 as a prime set, and m with n = sf * m^2.
Primes squarefree(mpz_class n, mpz_class& m) {
    Primes out;
    m = 1;
    if (n < 0) {
        out.push_back(-1);
        n = -n;
    }
    for (mpz_class p = 2; p * p <= n; ++p) {
        if (p > 100000)
            throw Unsupported("radicand too large to factor: " + n.get_str());
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        for (unsigned i = 0; i + 1 < e; i += 2)
            m *= p;
        if (e % 2)
            out.push_back(p);
    }
    if (n > 1)
        out.push_back(n);
    std::sort(out.begin(), out.end());
    return out;
}

Primes sym_diff(const Primes& a, const Primes& b) {
    Primes out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

mpz_class product(const Primes& ps) {
    mpz_class p = 1;
    for (const auto& q : ps)
        p *= q;
    return p;
}

} // namespace

std::size_t ClosureEngine::push(Atom a) {
    if (atoms_.size() >= kMaxAtoms)
        throw CapOverflow("closure engine atom limit reached");
    atoms_.push_back(std::move(a));
    return atoms_.size() - 1;
}

DiffPoly ClosureEngine::normal(const DiffPoly& p) const {
    bool touched = false;
    for (const auto& m : p.monomials())
        for (const auto& f : m.exps)
            if (f.x.var.family == Family::E && atoms_.at(f.x.var.index).kind == AtomKind::Algebraic && f.exp > 1)
                touched = true;
    if (!touched)
        return p;
    std::vector<Monomial> out;
    for (const auto& m : p.monomials()) {
        Monomial r{m.coeff, {}};
        for (const auto& f : m.exps) {
            const bool alg = f.x.var.family == Family::E && atoms_[f.x.var.index].kind == AtomKind::Algebraic;
            if (!alg) {
                r.exps.push_back(f);
                continue;
            }
            mpz_class d = atoms_[f.x.var.index].radicand.get_num();
            mpz_class pw;
            mpz_pow_ui(pw.get_mpz_t(), d.get_mpz_t(), f.exp / 2);
            r.coeff *= pw;
            if (f.exp % 2)
                r.exps.push_back({f.x, 1});
        }
        out.push_back(std::move(r));
    }
    return DiffPoly::from_monomials(std::move(out));
}

Elem ClosureEngine::make(DiffPoly num, DiffPoly den) const {
    num = normal(num);
    den = normal(den);
    if (den.is_zero())
        throw Error("closure engine: division by zero");
    if (num.is_zero())
        return Elem{};
    if (den.size() == 1 && !den.is_constant()) {
        // Cancel the largest monomial dividing both sides.
        Exponents common = den.monomials().front().exps;
        for (const auto& m : num.monomials()) {
            Exponents keep;
            for (const auto& f : common)
                for (const auto& g : m.exps)
                    if (g.x == f.x)
                        keep.push_back({f.x, std::min(f.exp, g.exp)});
            common = std::move(keep);
            if (common.empty())
                break;
        }
        if (!common.empty()) {
            auto strip = [&](const DiffPoly& p) {
                std::vector<Monomial> ms;
                for (const auto& m : p.monomials()) {
                    Monomial r{m.coeff, {}};
                    for (const auto& g : m.exps) {
                        unsigned e = g.exp;
                        for (const auto& f : common)
                            if (f.x == g.x)
                                e -= f.exp;
                        if (e)
                            r.exps.push_back({g.x, e});
                    }
                    ms.push_back(std::move(r));
                }
                return DiffPoly::from_monomials(std::move(ms));
            };
            num = strip(num);
            den = strip(den);
        }
    }
    Rational lc = den.lead_coeff();
    if (lc != 1) {
        num = scale(num, 1 / lc);
        den = scale(den, 1 / lc);
    }
    if (!den.is_constant() && num.size() == den.size()) {
        Rational c = num.lead_coeff();
        if (scale(den, c) == num)
            return Elem{DiffPoly(c), DiffPoly(1)};
    }
    return Elem{std::move(num), std::move(den)};
}

Elem ClosureEngine::rational(const Rational& q) const { return Elem{DiffPoly(q), DiffPoly(1)}; }

Elem ClosureEngine::atom(std::size_t k) const {
    if (k >= atoms_.size())
        throw InvalidInput("no atom E" + std::to_string(k));
    return Elem{DiffPoly::var(E(static_cast<std::uint32_t>(k))), DiffPoly(1)};
}

Elem ClosureEngine::add(const Elem& a, const Elem& b) const {
    if (a.den == b.den)
        return make(a.num + b.num, a.den);
    return make(a.num * b.den + b.num * a.den, a.den * b.den);
}

Elem ClosureEngine::sub(const Elem& a, const Elem& b) const { return add(a, neg(b)); }

Elem ClosureEngine::mul(const Elem& a, const Elem& b) const { return make(a.num * b.num, a.den * b.den); }

Elem ClosureEngine::neg(const Elem& a) const { return Elem{-a.num, a.den}; }

Elem ClosureEngine::inv(const Elem& a) const {
    if (is_zero(a))
        throw Error("closure engine: inverse of zero");
    return make(a.den, a.num);
}

Elem ClosureEngine::div(const Elem& a, const Elem& b) const { return mul(a, inv(b)); }

bool ClosureEngine::equal(const Elem& a, const Elem& b) const {
    auto ra = rational_value(a), rb = rational_value(b);
    if (ra || rb)
        return ra && rb && *ra == *rb;
    if (a.den == b.den)
        return a.num == b.num;
    return normal(a.num * b.den - b.num * a.den).is_zero();
}

std::optional<Rational> ClosureEngine::rational_value(const Elem& a) const {
    if (a.num.is_constant() && a.den.is_constant())
        return a.num.constant_value() / a.den.constant_value();
    return std::nullopt;
}

Elem ClosureEngine::deriv_poly(const DiffPoly& p) const {
    DiffPoly poly;
    Elem frac;
    for (const Indet& u : indets_of(p)) {
        if (u.var.family != Family::E)
            throw InvalidInput("engine element involves " + dcfwb::render(u));
        const Atom& a = atoms_.at(u.var.index);
        switch (a.kind) {
        case AtomKind::Transcendental:
            poly += partial(p, u) * DiffPoly::var(u.var, u.deriv + 1);
            break;
        case AtomKind::Constant:
        case AtomKind::Algebraic:
            break;
        case AtomKind::Order1:
            frac = add(frac, make(partial(p, u) * a.dnum, a.dden));
            break;
        }
    }
    return add(make(poly, DiffPoly(1)), frac);
}

Elem ClosureEngine::deriv(const Elem& a) const {
    Elem dn = deriv_poly(a.num);
    if (a.den.is_constant())
        return make(dn.num, dn.den * a.den);
    Elem dd = deriv_poly(a.den);
    Elem d{a.den, DiffPoly(1)};
    return sub(div(dn, d), mul(a, div(dd, d)));
}

Elem ClosureEngine::adjoin_transcendental() {
    return atom(push({AtomKind::Transcendental, 0, {}, {}}));
}

Elem ClosureEngine::adjoin_constant() { return atom(push({AtomKind::Constant, 0, {}, {}})); }

Elem ClosureEngine::adjoin_generic_zero(const DiffPoly& f, Var v, const std::map<Var, Elem>& at) {
    if (order_in(f, v) != 1 || degree_in(f, {v, 1}) != 1)
        throw Unsupported("generic zeros are available for order-1 polynomials linear in the leader, not " + f.str());
    std::size_t k = push({AtomKind::Transcendental, 0, {}, {}});
    std::map<Var, Elem> at2 = at;
    at2[v] = atom(k);
    Elem val;
    try {
        val = eval(f, at2);
    } catch (...) {
        atoms_.pop_back();
        throw;
    }
    Indet e0{E(static_cast<std::uint32_t>(k)), 0}, e1{E(static_cast<std::uint32_t>(k)), 1};
    DiffPoly A = coeff_in(val.num, e1, 1), B = coeff_in(val.num, e1, 0);
    bool bad = A.is_zero() || degree_in(val.num, e1) > 1;
    for (const DiffPoly* p : {&A, &B})
        for (const Indet& u : indets_of(*p))
            if (u.var == e0.var && u.deriv > 0)
                bad = true;
    if (bad) {
        atoms_.pop_back();
        throw Unsupported("generic zero of " + f.str() + " is outside the engine");
    }
    Atom& a = atoms_[k];
    if (B.is_zero()) {
        a.kind = AtomKind::Constant;
    } else {
        // The atom is still transcendental while make() runs; its derivative does not occur.
        Elem r = make(-B, A);
        a.kind = AtomKind::Order1;
        a.dnum = r.num;
        a.dden = r.den;
    }
    return atom(k);
}

Elem ClosureEngine::sqrt(const Rational& d) {
    if (d == 0)
        return rational(0);
    mpz_class n = d.get_num() * d.get_den(), m;
    Primes target = squarefree(n, m);
    Rational scale_by = Rational(m) / Rational(d.get_den());
    if (target.empty())
        return rational(scale_by);
    std::vector<std::size_t> alg;
    std::vector<Primes> sets;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        if (atoms_[i].kind == AtomKind::Algebraic) {
            mpz_class unused;
            alg.push_back(i);
            sets.push_back(squarefree(atoms_[i].radicand.get_num(), unused));
        }
    if (alg.size() > 16)
        throw Unsupported("too many square-root atoms");
    for (unsigned long mask = 1; mask < (1ul << alg.size()); ++mask) {
        Primes acc;
        for (std::size_t j = 0; j < alg.size(); ++j)
            if (mask >> j & 1)
                acc = sym_diff(acc, sets[j]);
        if (acc != target)
            continue;
        // prod E_j = sqrt(prod d_j) = sqrt(s) * k with prod d_j = s k^2.
        mpz_class prod = 1;
        DiffPoly mono(1);
        for (std::size_t j = 0; j < alg.size(); ++j)
            if (mask >> j & 1) {
                prod *= atoms_[alg[j]].radicand.get_num();
                mono *= DiffPoly::var(E(static_cast<std::uint32_t>(alg[j])));
            }
        mpz_class k2 = prod / product(target), k;
        if (k2 < 0)
            k2 = -k2;
        mpz_sqrt(k.get_mpz_t(), k2.get_mpz_t());
        return make(scale(mono, scale_by / Rational(k)), DiffPoly(1));
    }
    std::size_t k = push({AtomKind::Algebraic, Rational(product(target)), {}, {}});
    return make(scale(DiffPoly::var(E(static_cast<std::uint32_t>(k))), scale_by), DiffPoly(1));
}

RootSet ClosureEngine::solve(std::vector<Elem> c) {
    RootSet rs;
    while (!c.empty() && is_zero(c.back()))
        c.pop_back();
    if (c.empty()) {
        rs.all = true;
        return rs;
    }
    std::vector<Elem> found;
    while (c.size() > 1 && is_zero(c.front())) {
        found.push_back(rational(0));
        c.erase(c.begin());
    }
    if (!found.empty())
        found.resize(1);
    auto push_root = [&](const Elem& r) {
        for (const auto& x : found)
            if (equal(x, r))
                return;
        found.push_back(r);
    };
    if (c.size() == 2) {
        push_root(neg(div(c[0], c[1])));
    } else if (c.size() > 2) {
        bool rational_coeffs = std::all_of(c.begin(), c.end(), [&](const Elem& e) { return rational_value(e).has_value(); });
        auto quadratic = [&](const Elem& a, const Elem& b, const Elem& cc) {
            Elem disc = sub(mul(b, b), mul(rational(4), mul(a, cc)));
            auto dq = rational_value(disc);
            if (!dq) {
                rs.complete = false;
                return;
            }
            Elem s = sqrt(*dq), two_a = mul(rational(2), a);
            push_root(div(sub(s, b), two_a));
            push_root(div(sub(neg(s), b), two_a));
        };
        if (rational_coeffs) {
            std::vector<Rational> q;
            for (const auto& e : c)
                q.push_back(*rational_value(e));
            UniPoly u(q);
            auto fs = factor(u);
            if (!fs) {
                rs.complete = false;
                for (const auto& r : rational_roots(u))
                    push_root(rational(r));
            } else {
                for (const UniPoly& f : *fs) {
                    if (f.degree() == 1)
                        push_root(rational(-f[0] / f[1]));
                    else if (f.degree() == 2)
                        quadratic(rational(f[2]), rational(f[1]), rational(f[0]));
                    else
                        rs.complete = false;
                }
            }
        } else if (c.size() == 3) {
            quadratic(c[2], c[1], c[0]);
        } else {
            rs.complete = false;
        }
    }
    rs.roots = std::move(found);
    return rs;
}

RootSet ClosureEngine::roots(const DiffPoly& f, Var v, const std::map<Var, Elem>& at) {
    int ord = order_in(f, v);
    if (ord == kInfiniteOrder) {
        RootSet rs;
        rs.all = true;
        return rs;
    }
    if (ord > 0)
        throw Unsupported("root search needs an order-0 polynomial in " + dcfwb::render(v));
    std::vector<Elem> c;
    if (ord < 0) {
        c.push_back(eval(f, at));
    } else {
        Indet x{v, 0};
        for (unsigned k = 0; k <= degree_in(f, x); ++k)
            c.push_back(eval(coeff_in(f, x, k), at));
    }
    return solve(std::move(c));
}

Elem ClosureEngine::eval(const DiffPoly& f, const std::map<Var, Elem>& at) const {
    std::map<Indet, Elem> vals;
    for (const Indet& u : indets_of(f)) {
        Elem base;
        auto it = at.find(u.var);
        if (it != at.end())
            base = it->second;
        else if (u.var.family == Family::E)
            base = atom(u.var.index);
        else
            throw MissingAssignment("no engine value for " + dcfwb::render(u.var));
        // Fill delta^k for k up to u.deriv, reusing lower orders.
        Indet prev{u.var, 0};
        if (!vals.count(prev))
            vals[prev] = base;
        for (std::uint32_t k = 1; k <= u.deriv; ++k) {
            Indet cur{u.var, k};
            if (!vals.count(cur))
                vals[cur] = deriv(vals.at(Indet{u.var, k - 1}));
        }
    }
    Elem acc;
    for (const auto& m : f.monomials()) {
        Elem term = rational(m.coeff);
        for (const auto& fa : m.exps)
            for (std::uint32_t e = 0; e < fa.exp; ++e)
                term = mul(term, vals.at(fa.x));
        acc = add(acc, term);
    }
    return acc;
}

std::string ClosureEngine::render(const Elem& a) const {
    if (a.den.is_constant())
        return a.num.str();
    return "(" + a.num.str() + ")/(" + a.den.str() + ")";
}

} // namespace dcfwb
