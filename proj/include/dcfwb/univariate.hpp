#pragma once

#include "dcfwb/diffpoly.hpp"

#include <optional>
#include <vector>

namespace dcfwb {

// Dense univariate polynomial over Q; c[k] is the coefficient of x^k.
class UniPoly {
public:
    UniPoly() = default;
    explicit UniPoly(std::vector<Rational> c);

    static UniPoly monomial(const Rational& c, unsigned k);
    // Throws if a involves anything other than x.
    static UniPoly from_diffpoly(const DiffPoly& a, Indet x);
    DiffPoly to_diffpoly(Indet x) const;

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<Rational>& coeffs() const { return c_; }
    const Rational& lead() const { return c_.back(); }
    Rational operator[](std::size_t k) const { return k < c_.size() ? c_[k] : Rational(0); }

    Rational eval(const Rational& x) const;
    UniPoly derivative() const;
    UniPoly monic() const;

    bool operator==(const UniPoly& o) const { return c_ == o.c_; }

    friend UniPoly operator+(const UniPoly& a, const UniPoly& b);
    friend UniPoly operator-(const UniPoly& a, const UniPoly& b);
    friend UniPoly operator*(const UniPoly& a, const UniPoly& b);

private:
    std::vector<Rational> c_;
    void trim();
};

struct DivMod {
    UniPoly quotient;
    UniPoly remainder;
};

DivMod divmod(const UniPoly& a, const UniPoly& b);
UniPoly gcd(const UniPoly& a, const UniPoly& b); // monic, or zero
bool is_squarefree(const UniPoly& a);
std::vector<Rational> rational_roots(const UniPoly& a);

// Factorization over Q into irreducible factors (each primitive with positive
// leading coefficient, constant content dropped). std::nullopt when the search
// exceeds its work bound.
std::optional<std::vector<UniPoly>> factor(const UniPoly& a);
std::optional<bool> is_irreducible(const UniPoly& a);

} // namespace dcfwb
