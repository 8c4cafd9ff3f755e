#include "dcfwb/diffpoly.hpp"

#include "dcfwb/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace dcfwb {

std::string to_string(const Rational& q) { return q.get_str(); }

char family_letter(Family f) {
    switch (f) {
    case Family::E: return 'E';
    case Family::X: return 'X';
    case Family::T: return 'T';
    case Family::Y: return 'Y';
    }
    return '?';
}

namespace {

Caps g_caps = caps_from_env();

Exponents multiply_exps(const Exponents& a, const Exponents& b) {
    Exponents out;
    out.reserve(a.size() + b.size());
    auto ia = a.begin(), ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->x < ib->x) {
            out.push_back(*ia++);
        } else if (ib->x < ia->x) {
            out.push_back(*ib++);
        } else {
            out.push_back({ia->x, ia->exp + ib->exp});
            ++ia;
            ++ib;
        }
    }
    out.insert(out.end(), ia, a.end());
    out.insert(out.end(), ib, b.end());
    return out;
}

void check_caps(const std::vector<Monomial>& ms) {
    const Caps& c = caps();
    if (ms.size() > c.max_monomials)
        throw CapOverflow("monomial count " + std::to_string(ms.size()) + " exceeds cap " +
                          std::to_string(c.max_monomials));
    for (const auto& m : ms)
        for (const auto& f : m.exps) {
            if (f.x.deriv > c.max_deriv)
                throw CapOverflow("derivative order " + std::to_string(f.x.deriv) + " exceeds cap");
            if (f.exp > c.max_degree)
                throw CapOverflow("exponent " + std::to_string(f.exp) + " exceeds cap");
        }
}

} // namespace

const Caps& caps() { return g_caps; }
void set_caps(const Caps& c) { g_caps = c; }

Caps caps_from_env() {
    Caps c;
    const char* env = std::getenv("DCFWB_CAPS");
    if (!env)
        return c;
    std::stringstream ss(env);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            continue;
        std::string key = item.substr(0, eq);
        unsigned long val = std::strtoul(item.c_str() + eq + 1, nullptr, 10);
        if (key == "deriv")
            c.max_deriv = static_cast<std::uint32_t>(val);
        else if (key == "degree")
            c.max_degree = static_cast<std::uint32_t>(val);
        else if (key == "monomials")
            c.max_monomials = val;
    }
    return c;
}

int compare_exponents(const Exponents& a, const Exponents& b) {
    auto ia = a.rbegin(), ib = b.rbegin();
    for (; ia != a.rend() && ib != b.rend(); ++ia, ++ib) {
        if (ia->x != ib->x)
            return ia->x < ib->x ? -1 : 1;
        if (ia->exp != ib->exp)
            return ia->exp < ib->exp ? -1 : 1;
    }
    if (ia == a.rend() && ib == b.rend())
        return 0;
    return ia == a.rend() ? -1 : 1;
}

std::strong_ordering operator<=>(const Rank& a, const Rank& b) {
    if (a.infinite_ || b.infinite_)
        return a.infinite_ <=> b.infinite_;
    if (a.order_ != b.order_)
        return a.order_ <=> b.order_;
    return a.degree_ <=> b.degree_;
}

std::string Rank::str() const {
    if (infinite_)
        return "inf";
    return "(" + std::to_string(order_) + "," + std::to_string(degree_) + ")";
}

DiffPoly::DiffPoly(const Rational& c) {
    if (c != 0)
        terms_.push_back({c, {}});
}

DiffPoly DiffPoly::indet(Indet x, std::uint32_t exp) {
    DiffPoly p;
    if (exp == 0)
        return DiffPoly(1);
    p.terms_.push_back({Rational(1), {{x, exp}}});
    check_caps(p.terms_);
    return p;
}

DiffPoly DiffPoly::from_monomials(std::vector<Monomial> ms) {
    std::sort(ms.begin(), ms.end(), [](const Monomial& a, const Monomial& b) {
        return compare_exponents(a.exps, b.exps) > 0;
    });
    DiffPoly p;
    for (auto& m : ms) {
        if (!p.terms_.empty() && compare_exponents(p.terms_.back().exps, m.exps) == 0) {
            p.terms_.back().coeff += m.coeff;
            if (p.terms_.back().coeff == 0)
                p.terms_.pop_back();
        } else if (m.coeff != 0) {
            p.terms_.push_back(std::move(m));
        }
    }
    check_caps(p.terms_);
    return p;
}

bool DiffPoly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].exps.empty()); }

Rational DiffPoly::constant_value() const {
    if (terms_.empty())
        return 0;
    if (!is_constant())
        throw InvalidInput("polynomial is not constant: " + str());
    return terms_[0].coeff;
}

const Rational& DiffPoly::lead_coeff() const {
    if (terms_.empty())
        throw InvalidInput("zero polynomial has no leading coefficient");
    return terms_[0].coeff;
}

bool DiffPoly::operator==(const DiffPoly& o) const {
    if (terms_.size() != o.terms_.size())
        return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].coeff != o.terms_[i].coeff || !(terms_[i].exps == o.terms_[i].exps))
            return false;
    return true;
}

int compare(const DiffPoly& a, const DiffPoly& b) {
    std::size_t n = std::min(a.terms_.size(), b.terms_.size());
    for (std::size_t i = 0; i < n; ++i) {
        int c = compare_exponents(a.terms_[i].exps, b.terms_[i].exps);
        if (c != 0)
            return c;
        int q = cmp(a.terms_[i].coeff, b.terms_[i].coeff);
        if (q != 0)
            return q < 0 ? -1 : 1;
    }
    if (a.terms_.size() == b.terms_.size())
        return 0;
    return a.terms_.size() < b.terms_.size() ? -1 : 1;
}

DiffPoly add_scaled(const DiffPoly& a, const DiffPoly& b, const Rational& c) {
    if (c == 0 || b.is_zero())
        return a;
    DiffPoly out;
    out.terms_.reserve(a.terms_.size() + b.terms_.size());
    auto ia = a.terms_.begin(), ib = b.terms_.begin();
    while (ia != a.terms_.end() || ib != b.terms_.end()) {
        int cmpv;
        if (ia == a.terms_.end())
            cmpv = -1;
        else if (ib == b.terms_.end())
            cmpv = 1;
        else
            cmpv = compare_exponents(ia->exps, ib->exps);
        if (cmpv > 0) {
            out.terms_.push_back(*ia++);
        } else if (cmpv < 0) {
            out.terms_.push_back({c * ib->coeff, ib->exps});
            ++ib;
        } else {
            Rational s = ia->coeff + c * ib->coeff;
            if (s != 0)
                out.terms_.push_back({s, ia->exps});
            ++ia;
            ++ib;
        }
    }
    check_caps(out.terms_);
    return out;
}

DiffPoly& DiffPoly::operator+=(const DiffPoly& o) { return *this = add_scaled(*this, o, 1); }
DiffPoly& DiffPoly::operator-=(const DiffPoly& o) { return *this = add_scaled(*this, o, -1); }

DiffPoly& DiffPoly::operator*=(const DiffPoly& o) {
    std::vector<Monomial> ms;
    ms.reserve(terms_.size() * o.terms_.size());
    for (const auto& a : terms_)
        for (const auto& b : o.terms_)
            ms.push_back({a.coeff * b.coeff, multiply_exps(a.exps, b.exps)});
    return *this = from_monomials(std::move(ms));
}

DiffPoly operator+(const DiffPoly& a, const DiffPoly& b) { return add_scaled(a, b, 1); }
DiffPoly operator-(const DiffPoly& a, const DiffPoly& b) { return add_scaled(a, b, -1); }
DiffPoly operator-(const DiffPoly& a) { return scale(a, -1); }

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
    DiffPoly r = a;
    r *= b;
    return r;
}

DiffPoly scale(const DiffPoly& a, const Rational& c) {
    if (c == 0)
        return {};
    std::vector<Monomial> ms = a.monomials();
    for (auto& m : ms)
        m.coeff *= c;
    return DiffPoly::from_monomials(std::move(ms));
}

DiffPoly pow(const DiffPoly& a, unsigned n) {
    DiffPoly result(1), base = a;
    while (n) {
        if (n & 1)
            result *= base;
        n >>= 1;
        if (n)
            base *= base;
    }
    return result;
}

DiffPoly delta(const DiffPoly& a) {
    std::vector<Monomial> ms;
    for (const auto& m : a.monomials()) {
        for (std::size_t i = 0; i < m.exps.size(); ++i) {
            const Factor& f = m.exps[i];
            Exponents e = m.exps;
            if (f.exp == 1)
                e.erase(e.begin() + static_cast<std::ptrdiff_t>(i));
            else
                e[i].exp -= 1;
            Indet up{f.x.var, f.x.deriv + 1};
            ms.push_back({m.coeff * f.exp, multiply_exps(e, {{up, 1}})});
        }
    }
    return DiffPoly::from_monomials(std::move(ms));
}

DiffPoly delta(const DiffPoly& a, unsigned k) {
    DiffPoly r = a;
    for (unsigned i = 0; i < k && !r.is_zero(); ++i)
        r = delta(r);
    return r;
}

int order_in(const DiffPoly& a, Var v) {
    if (a.is_zero())
        return kInfiniteOrder;
    int best = -1;
    for (const auto& m : a.monomials())
        for (const auto& f : m.exps)
            if (f.x.var == v)
                best = std::max(best, static_cast<int>(f.x.deriv));
    return best;
}

bool involves(const DiffPoly& a, Var v) {
    for (const auto& m : a.monomials())
        for (const auto& f : m.exps)
            if (f.x.var == v)
                return true;
    return false;
}

unsigned degree_in(const DiffPoly& a, Indet x) {
    unsigned d = 0;
    for (const auto& m : a.monomials())
        for (const auto& f : m.exps)
            if (f.x == x)
                d = std::max(d, f.exp);
    return d;
}

Rank rank_in(const DiffPoly& a, Var v) {
    int o = order_in(a, v);
    if (o == kInfiniteOrder)
        return Rank::infinite();
    if (o < 0)
        return Rank::finite(-1, 0);
    return Rank::finite(o, degree_in(a, {v, static_cast<std::uint32_t>(o)}));
}

Indet leader(const DiffPoly& a, Var v) {
    int o = order_in(a, v);
    if (o < 0 || o == kInfiniteOrder)
        throw NoLeader("polynomial does not involve " + render(v) + ": " + a.str());
    return {v, static_cast<std::uint32_t>(o)};
}

DiffPoly coeff_in(const DiffPoly& a, Indet x, unsigned k) {
    std::vector<Monomial> ms;
    for (const auto& m : a.monomials()) {
        unsigned e = 0;
        Exponents rest;
        rest.reserve(m.exps.size());
        for (const auto& f : m.exps) {
            if (f.x == x)
                e = f.exp;
            else
                rest.push_back(f);
        }
        if (e == k)
            ms.push_back({m.coeff, std::move(rest)});
    }
    return DiffPoly::from_monomials(std::move(ms));
}

DiffPoly initial(const DiffPoly& a, Var v) {
    Indet u = leader(a, v);
    return coeff_in(a, u, degree_in(a, u));
}

DiffPoly partial(const DiffPoly& a, Indet x) {
    std::vector<Monomial> ms;
    for (const auto& m : a.monomials()) {
        for (std::size_t i = 0; i < m.exps.size(); ++i) {
            if (m.exps[i].x != x)
                continue;
            Exponents e = m.exps;
            unsigned ex = e[i].exp;
            if (ex == 1)
                e.erase(e.begin() + static_cast<std::ptrdiff_t>(i));
            else
                e[i].exp -= 1;
            ms.push_back({m.coeff * ex, std::move(e)});
        }
    }
    return DiffPoly::from_monomials(std::move(ms));
}

DiffPoly separant(const DiffPoly& a, Var v) { return partial(a, leader(a, v)); }

std::set<Var> vars_of(const DiffPoly& a) {
    std::set<Var> out;
    for (const auto& m : a.monomials())
        for (const auto& f : m.exps)
            out.insert(f.x.var);
    return out;
}

std::set<Indet> indets_of(const DiffPoly& a) {
    std::set<Indet> out;
    for (const auto& m : a.monomials())
        for (const auto& f : m.exps)
            out.insert(f.x);
    return out;
}

DiffPoly substitute(const DiffPoly& a, Indet x, const DiffPoly& b) {
    unsigned d = degree_in(a, x);
    if (d == 0)
        return a;
    std::vector<DiffPoly> powers{DiffPoly(1)};
    for (unsigned k = 1; k <= d; ++k)
        powers.push_back(powers.back() * b);
    DiffPoly out;
    for (unsigned k = 0; k <= d; ++k) {
        DiffPoly c = coeff_in(a, x, k);
        if (!c.is_zero())
            out += c * powers[k];
    }
    return out;
}

namespace {

DiffPoly subst_impl(const DiffPoly& a, const std::map<Var, DiffPoly>& assignment, bool require_all) {
    std::map<Indet, std::vector<DiffPoly>> cache; // powers of delta^r(value)
    auto power_of = [&](Indet x, unsigned e) -> const DiffPoly& {
        auto& pw = cache[x];
        if (pw.empty()) {
            pw.push_back(DiffPoly(1));
            pw.push_back(delta(assignment.at(x.var), x.deriv));
        }
        while (pw.size() <= e)
            pw.push_back(pw.back() * pw[1]);
        return pw[e];
    };
    DiffPoly out;
    for (const auto& m : a.monomials()) {
        DiffPoly term(m.coeff);
        Exponents kept;
        for (const auto& f : m.exps) {
            if (assignment.count(f.x.var)) {
                term *= power_of(f.x, f.exp);
            } else if (require_all) {
                throw MissingAssignment("no assignment for variable " + render(f.x.var));
            } else {
                kept.push_back(f);
            }
        }
        if (!kept.empty())
            term *= DiffPoly::from_monomials({{Rational(1), kept}});
        out += term;
    }
    return out;
}

} // namespace

DiffPoly eval_subst(const DiffPoly& a, const std::map<Var, DiffPoly>& assignment) {
    return subst_impl(a, assignment, true);
}

DiffPoly subst_vars(const DiffPoly& a, const std::map<Var, DiffPoly>& assignment) {
    return subst_impl(a, assignment, false);
}

DiffPoly rename(const DiffPoly& a, const std::map<Var, Var>& names) {
    std::vector<Monomial> ms;
    ms.reserve(a.size());
    for (const auto& m : a.monomials()) {
        Exponents e;
        for (const auto& f : m.exps) {
            auto it = names.find(f.x.var);
            Indet x = f.x;
            if (it != names.end())
                x.var = it->second;
            e.push_back({x, f.exp});
        }
        std::sort(e.begin(), e.end(), [](const Factor& p, const Factor& q) { return p.x < q.x; });
        Exponents merged;
        for (const auto& f : e) {
            if (!merged.empty() && merged.back().x == f.x)
                merged.back().exp += f.exp;
            else
                merged.push_back(f);
        }
        ms.push_back({m.coeff, std::move(merged)});
    }
    return DiffPoly::from_monomials(std::move(ms));
}

std::string DiffPoly::str() const { return render(*this); }

} // namespace dcfwb
