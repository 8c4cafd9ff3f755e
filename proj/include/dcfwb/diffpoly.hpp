#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dcfwb {

using Rational = mpq_class;

std::string to_string(const Rational& q);

// Variable families are disjoint namespaces. E is internal: atoms of the
// closure engine. Y is the largest family so that over engine coefficients the
// Y-indeterminates lead.
enum class Family : std::uint8_t { E = 0, X = 1, T = 2, Y = 3 };

char family_letter(Family f);

struct Var {
    Family family = Family::Y;
    std::uint32_t index = 0;

    auto operator<=>(const Var&) const = default;
};

inline Var Y(std::uint32_t i) { return {Family::Y, i}; }
inline Var T(std::uint32_t i) { return {Family::T, i}; }
inline Var X(std::uint32_t i) { return {Family::X, i}; }
inline Var E(std::uint32_t i) { return {Family::E, i}; }

// Y_i^{(deriv)}
struct DerivIndeterminate {
    Var var;
    std::uint32_t deriv = 0;

    auto operator<=>(const DerivIndeterminate&) const = default;
};
using Indet = DerivIndeterminate;

struct Factor {
    Indet x;
    std::uint32_t exp = 1;

    bool operator==(const Factor&) const = default;
};

// Sorted ascending by indeterminate, exponents positive.
using Exponents = std::vector<Factor>;

struct Monomial {
    Rational coeff;
    Exponents exps;
};

// Lexicographic order comparing the largest indeterminates first.
int compare_exponents(const Exponents& a, const Exponents& b);

struct Caps {
    std::uint32_t max_deriv = 32;
    std::uint32_t max_degree = 64;
    std::size_t max_monomials = 10000;
};

const Caps& caps();
void set_caps(const Caps& c);
// Reads DCFWB_CAPS ("deriv=32,degree=64,monomials=10000"); unset keys keep defaults.
Caps caps_from_env();

constexpr int kInfiniteOrder = std::numeric_limits<int>::max();

class Rank {
public:
    static Rank infinite() { return Rank(true, 0, 0); }
    static Rank finite(int order, unsigned degree) { return Rank(false, order, degree); }

    bool is_infinite() const { return infinite_; }
    int order() const { return order_; }
    unsigned degree() const { return degree_; }

    friend bool operator==(const Rank&, const Rank&) = default;
    friend std::strong_ordering operator<=>(const Rank& a, const Rank& b);

    std::string str() const;

private:
    Rank(bool inf, int o, unsigned d) : infinite_(inf), order_(o), degree_(d) {}
    bool infinite_;
    int order_;
    unsigned degree_;
};

class DiffPoly {
public:
    DiffPoly() = default;
    explicit DiffPoly(const Rational& c);
    explicit DiffPoly(long c) : DiffPoly(Rational(c)) {}

    static DiffPoly indet(Indet x, std::uint32_t exp = 1);
    static DiffPoly var(Var v, std::uint32_t deriv = 0) { return indet({v, deriv}); }
    // Merges equal exponent maps, drops zero coefficients and sorts.
    static DiffPoly from_monomials(std::vector<Monomial> ms);

    // Descending canonical order; the first monomial is the largest.
    const std::vector<Monomial>& monomials() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    // Throws if not constant.
    Rational constant_value() const;
    const Rational& lead_coeff() const;

    bool operator==(const DiffPoly& o) const;
    // Total order on polynomials used for tie-breaking.
    friend int compare(const DiffPoly& a, const DiffPoly& b);

    DiffPoly& operator+=(const DiffPoly& o);
    DiffPoly& operator-=(const DiffPoly& o);
    DiffPoly& operator*=(const DiffPoly& o);

    std::string str() const;

private:
    std::vector<Monomial> terms_;
    friend DiffPoly add_scaled(const DiffPoly&, const DiffPoly&, const Rational&);
};

DiffPoly operator+(const DiffPoly& a, const DiffPoly& b);
DiffPoly operator-(const DiffPoly& a, const DiffPoly& b);
DiffPoly operator-(const DiffPoly& a);
DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
// a + c*b
DiffPoly add_scaled(const DiffPoly& a, const DiffPoly& b, const Rational& c);
DiffPoly scale(const DiffPoly& a, const Rational& c);
DiffPoly pow(const DiffPoly& a, unsigned n);

inline DiffPoly add(const DiffPoly& a, const DiffPoly& b) { return a + b; }
inline DiffPoly mul(const DiffPoly& a, const DiffPoly& b) { return a * b; }
inline DiffPoly neg(const DiffPoly& a) { return -a; }

DiffPoly delta(const DiffPoly& a);
DiffPoly delta(const DiffPoly& a, unsigned k);

// r >= 0, -1 when the variable is absent from a nonzero a, kInfiniteOrder for 0.
int order_in(const DiffPoly& a, Var v);
Rank rank_in(const DiffPoly& a, Var v);
bool involves(const DiffPoly& a, Var v);
Indet leader(const DiffPoly& a, Var v);
DiffPoly initial(const DiffPoly& a, Var v);
DiffPoly separant(const DiffPoly& a, Var v);

unsigned degree_in(const DiffPoly& a, Indet x);
// Coefficient of x^k, as a polynomial free of x.
DiffPoly coeff_in(const DiffPoly& a, Indet x, unsigned k);
DiffPoly partial(const DiffPoly& a, Indet x);

std::set<Var> vars_of(const DiffPoly& a);
std::set<Indet> indets_of(const DiffPoly& a);

// Replaces the indeterminate x (not its derivatives) by b.
DiffPoly substitute(const DiffPoly& a, Indet x, const DiffPoly& b);

// Substitutes whole variables: every v^{(r)} becomes delta^r(assignment[v]).
// Variables without an assignment are an error.
DiffPoly eval_subst(const DiffPoly& a, const std::map<Var, DiffPoly>& assignment);
// As eval_subst, but variables without an assignment are left alone.
DiffPoly subst_vars(const DiffPoly& a, const std::map<Var, DiffPoly>& assignment);
DiffPoly rename(const DiffPoly& a, const std::map<Var, Var>& names);

DiffPoly parse(std::string_view text);
std::string render(const DiffPoly& a);
std::string render(Indet x);
std::string render(Var v);

} // namespace dcfwb
