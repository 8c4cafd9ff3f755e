#include "dcfwb/univariate.hpp"

#include "dcfwb/error.hpp"

#include <algorithm>
#include <numeric>

namespace dcfwb {

UniPoly::UniPoly(std::vector<Rational> c) : c_(std::move(c)) { trim(); }

void UniPoly::trim() {
    while (!c_.empty() && c_.back() == 0)
        c_.pop_back();
}

UniPoly UniPoly::monomial(const Rational& c, unsigned k) {
    std::vector<Rational> v(k + 1, Rational(0));
    v[k] = c;
    return UniPoly(std::move(v));
}

UniPoly UniPoly::from_diffpoly(const DiffPoly& a, Indet x) {
    std::vector<Rational> c(degree_in(a, x) + 1, Rational(0));
    for (const auto& m : a.monomials()) {
        unsigned e = 0;
        for (const auto& f : m.exps) {
            if (!(f.x == x))
                throw InvalidInput("not univariate in " + render(x) + ": " + a.str());
            e = f.exp;
        }
        c[e] += m.coeff;
    }
    return UniPoly(std::move(c));
}

DiffPoly UniPoly::to_diffpoly(Indet x) const {
    std::vector<Monomial> ms;
    for (std::size_t k = 0; k < c_.size(); ++k) {
        if (c_[k] == 0)
            continue;
        Exponents e;
        if (k)
            e.push_back({x, static_cast<std::uint32_t>(k)});
        ms.push_back({c_[k], e});
    }
    return DiffPoly::from_monomials(std::move(ms));
}

Rational UniPoly::eval(const Rational& x) const {
    Rational r = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it)
        r = r * x + *it;
    return r;
}

UniPoly UniPoly::derivative() const {
    std::vector<Rational> d;
    for (std::size_t k = 1; k < c_.size(); ++k)
        d.push_back(c_[k] * static_cast<long>(k));
    return UniPoly(std::move(d));
}

UniPoly UniPoly::monic() const {
    if (c_.empty())
        return *this;
    std::vector<Rational> v = c_;
    Rational l = c_.back();
    for (auto& q : v)
        q /= l;
    return UniPoly(std::move(v));
}

UniPoly operator+(const UniPoly& a, const UniPoly& b) {
    std::vector<Rational> v(std::max(a.c_.size(), b.c_.size()), Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        v[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i)
        v[i] += b.c_[i];
    return UniPoly(std::move(v));
}

UniPoly operator-(const UniPoly& a, const UniPoly& b) {
    std::vector<Rational> v(std::max(a.c_.size(), b.c_.size()), Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        v[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i)
        v[i] -= b.c_[i];
    return UniPoly(std::move(v));
}

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero())
        return {};
    std::vector<Rational> v(a.c_.size() + b.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j)
            v[i + j] += a.c_[i] * b.c_[j];
    return UniPoly(std::move(v));
}

DivMod divmod(const UniPoly& a, const UniPoly& b) {
    if (b.is_zero())
        throw InvalidInput("division by the zero polynomial");
    UniPoly r = a;
    std::vector<Rational> q(std::max(0, a.degree() - b.degree() + 1), Rational(0));
    while (!r.is_zero() && r.degree() >= b.degree()) {
        unsigned k = static_cast<unsigned>(r.degree() - b.degree());
        Rational c = r.lead() / b.lead();
        q[k] += c;
        r = r - UniPoly::monomial(c, k) * b;
    }
    return {UniPoly(std::move(q)), r};
}

UniPoly gcd(const UniPoly& a, const UniPoly& b) {
    UniPoly x = a, y = b;
    while (!y.is_zero()) {
        UniPoly r = divmod(x, y).remainder;
        x = y;
        y = r;
    }
    return x.monic();
}

bool is_squarefree(const UniPoly& a) { return gcd(a, a.derivative()).degree() <= 0; }

namespace {

using IntPoly = std::vector<mpz_class>;

IntPoly primitive(const UniPoly& a) {
    mpz_class l = 1;
    for (const auto& q : a.coeffs())
        l = lcm(l, q.get_den());
    IntPoly v;
    mpz_class g = 0;
    for (const auto& q : a.coeffs()) {
        mpz_class z = q.get_num() * (l / q.get_den());
        v.push_back(z);
        g = gcd(g, z);
    }
    if (g != 0)
        for (auto& z : v)
            z /= g;
    if (!v.empty() && v.back() < 0)
        for (auto& z : v)
            z = -z;
    return v;
}

UniPoly to_uni(const IntPoly& v) {
    std::vector<Rational> c;
    for (const auto& z : v)
        c.emplace_back(z);
    return UniPoly(std::move(c));
}

mpz_class eval_int(const IntPoly& v, long x) {
    mpz_class r = 0;
    for (auto it = v.rbegin(); it != v.rend(); ++it)
        r = r * x + *it;
    return r;
}

bool positive_divisors(mpz_class v, std::vector<mpz_class>& out) {
    v = abs(v);
    if (v == 0 || v > mpz_class("1000000000000"))
        return false;
    unsigned long n = v.get_ui();
    out.clear();
    for (unsigned long d = 1; d * d <= n; ++d)
        if (n % d == 0) {
            out.emplace_back(d);
            if (d != n / d)
                out.emplace_back(n / d);
        }
    return true;
}

// Newton interpolation through (xs[i], ys[i]); returns coefficients in the monomial basis.
UniPoly interpolate(const std::vector<long>& xs, const std::vector<mpz_class>& ys) {
    std::size_t n = xs.size();
    std::vector<Rational> dd(ys.begin(), ys.end());
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = n - 1; i >= j; --i)
            dd[i] = (dd[i] - dd[i - 1]) / Rational(xs[i] - xs[i - j]);
    UniPoly r({dd[n - 1]});
    for (std::size_t i = n - 1; i-- > 0;)
        r = r * UniPoly({Rational(-xs[i]), Rational(1)}) + UniPoly({dd[i]});
    return r;
}

bool integral(const UniPoly& p) {
    return std::all_of(p.coeffs().begin(), p.coeffs().end(), [](const Rational& q) { return q.get_den() == 1; });
}

constexpr std::size_t kWorkBound = 400000;

// A nontrivial factor, std::nullopt if none exists, or throws Horizon when over budget.
std::optional<UniPoly> find_factor(const UniPoly& f) {
    int n = f.degree();
    if (n <= 1)
        return std::nullopt;
    if (f[0] == 0)
        return UniPoly({Rational(0), Rational(1)});
    auto roots = rational_roots(f);
    if (!roots.empty())
        return UniPoly({-roots[0], Rational(1)});
    IntPoly fi = primitive(f);
    struct Point {
        long x;
        std::vector<mpz_class> divs;
    };
    std::vector<Point> pts;
    for (long x = 0; x <= 16; x = x > 0 ? -x : -x + 1) {
        Point p{x, {}};
        if (positive_divisors(eval_int(fi, x), p.divs))
            pts.push_back(std::move(p));
        if (pts.size() >= 33)
            break;
    }
    std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.divs.size() < b.divs.size(); });
    std::size_t work = 0;
    for (int k = 2; k <= n / 2; ++k) {
        if (pts.size() < static_cast<std::size_t>(k + 1))
            throw Horizon("not enough evaluation points for factor search");
        std::vector<long> xs;
        for (int i = 0; i <= k; ++i)
            xs.push_back(pts[i].x);
        std::vector<std::size_t> idx(k + 1, 0);
        std::vector<int> sign(k + 1, 1);
        // Odometer over divisor choices; the first value is kept positive.
        while (true) {
            if (++work > kWorkBound)
                throw Horizon("factor search exceeded work bound");
            std::vector<mpz_class> ys;
            for (int i = 0; i <= k; ++i)
                ys.push_back(pts[i].divs[idx[i]] * sign[i]);
            UniPoly g = interpolate(xs, ys);
            if (g.degree() == k && integral(g)) {
                DivMod dm = divmod(f, g);
                if (dm.remainder.is_zero())
                    return g;
            }
            int i = 0;
            for (; i <= k; ++i) {
                if (i > 0 && sign[i] == 1) {
                    sign[i] = -1;
                    break;
                }
                sign[i] = 1;
                if (++idx[i] < pts[i].divs.size())
                    break;
                idx[i] = 0;
            }
            if (i > k)
                break;
        }
    }
    return std::nullopt;
}

} // namespace

std::vector<Rational> rational_roots(const UniPoly& a) {
    std::vector<Rational> out;
    if (a.is_zero())
        return out;
    UniPoly f = a;
    if (f[0] == 0) {
        out.emplace_back(0);
        while (!f.is_zero() && f[0] == 0)
            f = divmod(f, UniPoly({Rational(0), Rational(1)})).quotient;
    }
    if (f.degree() < 1)
        return out;
    IntPoly fi = primitive(f);
    std::vector<mpz_class> ps, qs;
    if (!positive_divisors(fi.front(), ps) || !positive_divisors(fi.back(), qs))
        throw Horizon("coefficients too large for the rational root search");
    for (const auto& p : ps)
        for (const auto& q : qs)
            for (int s : {1, -1}) {
                Rational r(p * s, q);
                r.canonicalize();
                if (f.eval(r) == 0 && std::find(out.begin(), out.end(), r) == out.end())
                    out.push_back(r);
            }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<std::vector<UniPoly>> factor(const UniPoly& a) {
    if (a.degree() < 1)
        return std::vector<UniPoly>{};
    std::vector<UniPoly> out, work{to_uni(primitive(a))};
    try {
        while (!work.empty()) {
            UniPoly f = work.back();
            work.pop_back();
            auto g = find_factor(f);
            if (!g) {
                out.push_back(f);
                continue;
            }
            work.push_back(to_uni(primitive(*g)));
            work.push_back(to_uni(primitive(divmod(f, *g).quotient)));
        }
    } catch (const Horizon&) {
        return std::nullopt;
    }
    std::sort(out.begin(), out.end(), [](const UniPoly& x, const UniPoly& y) {
        if (x.degree() != y.degree())
            return x.degree() < y.degree();
        for (int k = x.degree(); k >= 0; --k)
            if (x[k] != y[k])
                return x[k] < y[k];
        return false;
    });
    return out;
}

std::optional<bool> is_irreducible(const UniPoly& a) {
    if (a.degree() < 1)
        return false;
    try {
        return !find_factor(to_uni(primitive(a))).has_value();
    } catch (const Horizon&) {
        return std::nullopt;
    }
}

} // namespace dcfwb
