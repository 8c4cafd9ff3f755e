#pragma once

// Independent witness arithmetic for the ritt tests: truncated power series
// in x (derivation d/dx) whose coefficients live in Q[a]/(mu(a)).

#include "dcfwb/diffpoly.hpp"

#include <gmpxx.h>

#include <map>
#include <stdexcept>
#include <vector>

namespace dcfwb::testing_support {

// Q[a]/(mu), mu monic of degree n given by its low coefficients c0..c_{n-1}.
struct NumberField {
    std::vector<mpq_class> mu; // a^n = -(mu[0] + mu[1] a + ... )

    std::size_t degree() const { return mu.size(); }
};

class Num {
public:
    Num() = default;
    Num(const NumberField* f, mpq_class c) : f_(f), v_(f->degree(), mpq_class(0)) { v_[0] = c; }
    Num(const NumberField* f, std::vector<mpq_class> v) : f_(f), v_(std::move(v)) { v_.resize(f->degree()); }

    static Num gen(const NumberField* f) {
        std::vector<mpq_class> v(f->degree(), mpq_class(0));
        if (f->degree() == 1)
            v[0] = -f->mu[0];
        else
            v[1] = 1;
        return Num(f, v);
    }

    bool is_zero() const {
        for (const auto& q : v_)
            if (q != 0)
                return false;
        return true;
    }
    const std::vector<mpq_class>& coords() const { return v_; }
    const NumberField* field() const { return f_; }

    friend Num operator+(const Num& a, const Num& b) {
        Num r = a;
        for (std::size_t i = 0; i < r.v_.size(); ++i)
            r.v_[i] += b.v_[i];
        return r;
    }
    friend Num operator-(const Num& a, const Num& b) {
        Num r = a;
        for (std::size_t i = 0; i < r.v_.size(); ++i)
            r.v_[i] -= b.v_[i];
        return r;
    }
    friend Num operator*(const Num& a, const Num& b) {
        std::size_t n = a.v_.size();
        std::vector<mpq_class> prod(2 * n, mpq_class(0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                prod[i + j] += a.v_[i] * b.v_[j];
        for (std::size_t k = 2 * n - 1; k >= n; --k) {
            mpq_class c = prod[k];
            if (c == 0)
                continue;
            prod[k] = 0;
            for (std::size_t i = 0; i < n; ++i)
                prod[k - n + i] -= c * a.f_->mu[i];
        }
        prod.resize(n);
        return Num(a.f_, prod);
    }
    Num scaled(const mpq_class& c) const {
        Num r = *this;
        for (auto& q : r.v_)
            q *= c;
        return r;
    }

    // Inverse by Gaussian elimination on the multiplication matrix.
    Num inverse() const {
        std::size_t n = v_.size();
        std::vector<std::vector<mpq_class>> m(n, std::vector<mpq_class>(n + 1, mpq_class(0)));
        Num basis = Num(f_, mpq_class(1));
        Num a = gen(f_);
        for (std::size_t j = 0; j < n; ++j) {
            Num col = *this * basis;
            for (std::size_t i = 0; i < n; ++i)
                m[i][j] = col.v_[i];
            basis = basis * a;
        }
        m[0][n] = 1;
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t p = c;
            while (p < n && m[p][c] == 0)
                ++p;
            if (p == n)
                throw std::runtime_error("not invertible");
            std::swap(m[p], m[c]);
            for (std::size_t r = 0; r < n; ++r) {
                if (r == c || m[r][c] == 0)
                    continue;
                mpq_class t = m[r][c] / m[c][c];
                for (std::size_t k = c; k <= n; ++k)
                    m[r][k] -= t * m[c][k];
            }
        }
        std::vector<mpq_class> x(n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = m[i][n] / m[i][i];
        return Num(f_, x);
    }

private:
    const NumberField* f_ = nullptr;
    std::vector<mpq_class> v_;
};

// Coefficients c[0..prec) are known exactly.
class Jet {
public:
    Jet() = default;
    Jet(std::vector<Num> c) : c_(std::move(c)) {}

    static Jet constant(const Num& a, std::size_t prec) {
        std::vector<Num> c(prec, Num(a.field(), mpq_class(0)));
        c[0] = a;
        return Jet(c);
    }
    // c0 + c1 x
    static Jet linear(const Num& c0, const Num& c1, std::size_t prec) {
        Jet j = constant(c0, prec);
        j.c_[1] = c1;
        return j;
    }
    // k * exp(r x)
    static Jet exp(const Num& k, const mpq_class& r, std::size_t prec) {
        std::vector<Num> c;
        mpq_class t = 1;
        for (std::size_t n = 0; n < prec; ++n) {
            c.push_back(k.scaled(t));
            t = t * r / mpq_class(static_cast<long>(n + 1));
        }
        return Jet(c);
    }

    std::size_t prec() const { return c_.size(); }
    const Num& operator[](std::size_t i) const { return c_[i]; }

    bool is_zero() const {
        for (const auto& a : c_)
            if (!a.is_zero())
                return false;
        return true;
    }

    Jet derivative() const {
        std::vector<Num> d;
        for (std::size_t n = 1; n < c_.size(); ++n)
            d.push_back(c_[n].scaled(mpq_class(static_cast<long>(n))));
        return Jet(d);
    }

    friend Jet operator+(const Jet& a, const Jet& b) {
        std::size_t p = std::min(a.prec(), b.prec());
        std::vector<Num> c;
        for (std::size_t i = 0; i < p; ++i)
            c.push_back(a.c_[i] + b.c_[i]);
        return Jet(c);
    }
    friend Jet operator-(const Jet& a, const Jet& b) {
        std::size_t p = std::min(a.prec(), b.prec());
        std::vector<Num> c;
        for (std::size_t i = 0; i < p; ++i)
            c.push_back(a.c_[i] - b.c_[i]);
        return Jet(c);
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        std::size_t p = std::min(a.prec(), b.prec());
        std::vector<Num> c;
        for (std::size_t n = 0; n < p; ++n) {
            Num s(a.c_[0].field(), mpq_class(0));
            for (std::size_t i = 0; i <= n; ++i)
                s = s + a.c_[i] * b.c_[n - i];
            c.push_back(s);
        }
        return Jet(c);
    }
    Jet inverse() const {
        Num inv0 = c_[0].inverse();
        std::vector<Num> r{inv0};
        for (std::size_t n = 1; n < c_.size(); ++n) {
            Num s(inv0.field(), mpq_class(0));
            for (std::size_t i = 1; i <= n; ++i)
                s = s + c_[i] * r[n - i];
            r.push_back(Num(inv0.field(), mpq_class(0)) - s * inv0);
        }
        return Jet(r);
    }
    // Square root with a prescribed square root s0 of the constant term.
    Jet sqrt(const Num& s0) const {
        std::vector<Num> r{s0};
        Num inv2s0 = (s0.scaled(2)).inverse();
        for (std::size_t n = 1; n < c_.size(); ++n) {
            Num s = c_[n];
            for (std::size_t i = 1; i < n; ++i)
                s = s - r[i] * r[n - i];
            r.push_back(s * inv2s0);
        }
        return Jet(r);
    }

private:
    std::vector<Num> c_;
};

using Witness = std::map<Var, Jet>;

inline Jet evaluate(const DiffPoly& p, const Witness& w, const NumberField* f) {
    std::size_t prec = 1000;
    std::map<Indet, Jet> derivs;
    for (const auto& m : p.monomials())
        for (const auto& fac : m.exps)
            if (!derivs.count(fac.x)) {
                Jet j = w.at(fac.x.var);
                for (unsigned k = 0; k < fac.x.deriv; ++k)
                    j = j.derivative();
                derivs[fac.x] = j;
            }
    for (const auto& [x, j] : derivs)
        prec = std::min(prec, j.prec());
    if (derivs.empty()) {
        prec = w.empty() ? 1 : 1000;
        for (const auto& [v, j] : w)
            prec = std::min(prec, j.prec());
    }
    Jet sum = Jet::constant(Num(f, mpq_class(0)), prec);
    for (const auto& m : p.monomials()) {
        Jet t = Jet::constant(Num(f, m.coeff), prec);
        for (const auto& fac : m.exps)
            for (unsigned e = 0; e < fac.exp; ++e)
                t = t * derivs[fac.x];
        sum = sum + t;
    }
    return sum;
}

} // namespace dcfwb::testing_support
