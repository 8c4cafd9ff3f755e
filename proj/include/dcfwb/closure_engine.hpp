#pragma once

#include "dcfwb/diffpoly.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dcfwb {

// num/den with both sides polynomials in the atoms E0, E1, ... in normal form.
struct Elem {
    DiffPoly num{0};
    DiffPoly den{1};
};

// Transcendental: differential indeterminate. Constant: transcendental with
// delta E = 0. Algebraic: E^2 = radicand, a squarefree integer. Order1:
// algebraically free with delta E = dnum/dden.
enum class AtomKind { Transcendental, Constant, Algebraic, Order1 };
std::string to_string(AtomKind k);

struct Atom {
    AtomKind kind = AtomKind::Transcendental;
    Rational radicand;
    DiffPoly dnum, dden;
};

struct RootSet {
    std::vector<Elem> roots;
    bool complete = true; // no root was left out
    bool all = false;     // the polynomial vanishes identically
};

// A lazily grown model of a fragment of a differentially closed field. The
// algebraic part is a multiquadratic number field; every other atom is
// algebraically independent over the atoms before it, so normal forms are
// canonical polynomials and equality is decided exactly.
class ClosureEngine {
public:
    static constexpr std::size_t kMaxAtoms = 256;

    Elem rational(const Rational& q) const;
    Elem atom(std::size_t k) const;

    Elem add(const Elem& a, const Elem& b) const;
    Elem sub(const Elem& a, const Elem& b) const;
    Elem mul(const Elem& a, const Elem& b) const;
    Elem neg(const Elem& a) const;
    Elem inv(const Elem& a) const; // throws Error on zero
    Elem div(const Elem& a, const Elem& b) const;
    Elem deriv(const Elem& a) const;

    bool is_zero(const Elem& a) const { return a.num.is_zero(); }
    bool equal(const Elem& a, const Elem& b) const;
    std::optional<Rational> rational_value(const Elem& a) const;
    bool is_constant(const Elem& a) const { return is_zero(deriv(a)); }

    Elem adjoin_transcendental();
    Elem adjoin_constant();
    // Generic zero of f, which has order 1 in v and is linear in v'. Other
    // variables of f are read from `at`. Throws Unsupported otherwise.
    Elem adjoin_generic_zero(const DiffPoly& f, Var v, const std::map<Var, Elem>& at);
    // A square root of d; adjoins an atom when d is not a square yet.
    Elem sqrt(const Rational& d);

    // Roots of f, of order 0 in v, once the other variables take values from `at`.
    RootSet roots(const DiffPoly& f, Var v, const std::map<Var, Elem>& at);
    // f with every variable w^(k) replaced by delta^k(at[w]).
    Elem eval(const DiffPoly& f, const std::map<Var, Elem>& at) const;

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::string render(const Elem& a) const;

private:
    std::vector<Atom> atoms_;

    DiffPoly normal(const DiffPoly& p) const;
    Elem make(DiffPoly num, DiffPoly den) const;
    Elem deriv_poly(const DiffPoly& p) const;
    std::size_t push(Atom a);
    RootSet solve(std::vector<Elem> coeffs);
};

} // namespace dcfwb
