#pragma once

#include "dcfwb/diffpoly.hpp"

#include <map>
#include <string>
#include <vector>

namespace dcfwb {

// Normal forms for coefficients. reduce(p) is zero exactly when p vanishes in
// the ambient coefficient field; a nonzero result may differ from p by a unit.
class Reducer {
public:
    virtual ~Reducer() = default;
    virtual DiffPoly reduce(const DiffPoly& p) const = 0;
    bool is_zero(const DiffPoly& p) const { return reduce(p).is_zero(); }
};

// Coefficients in Q: the identity.
class RationalReducer final : public Reducer {
public:
    DiffPoly reduce(const DiffPoly& p) const override { return p; }
};

const Reducer& rationals();

struct ReductionStep {
    bool derivative = false; // eliminated a proper derivative of the leader
    unsigned k = 0;          // which delta^k(h) was subtracted
    DiffPoly multiplier;     // separant or initial premultiplying the remainder
    DiffPoly quotient_term;  // times delta^k(h)
    DiffPoly remainder;
};

struct ReductionTrace {
    DiffPoly g, h;
    Var var;
    unsigned initial_power = 0;
    unsigned separant_power = 0;
    std::map<unsigned, DiffPoly> quotients; // k -> q_k
    std::vector<ReductionStep> steps;
    DiffPoly raw_remainder; // before the final normal form

    // I^a S^b g - sum q_k delta^k h - raw_remainder, which must reduce to 0.
    DiffPoly defect() const;
};

struct PartialReduction {
    DiffPoly remainder;
    ReductionTrace trace;
};

// Ritt partial remainder of g by h with respect to var.
PartialReduction partial_reduce(const DiffPoly& g, const DiffPoly& h, Var var,
                                const Reducer& coeffs = rationals());

// Normalizes the scalar so the initial's leading coefficient is 1 (a constant
// initial therefore becomes 1).
DiffPoly make_monic(const DiffPoly& p, Var var);

// Pseudo-remainder sequence; returns the last nonzero element made monic, or
// the constant 1 if a nonzero element of the coefficient field appears.
DiffPoly reduce_pair(const DiffPoly& g, const DiffPoly& h, Var var, const Reducer& coeffs = rationals());

struct ClosureResult {
    DiffPoly min;          // zero when nothing involves var; 1 when inconsistent
    bool inconsistent = false;
    std::size_t pair_steps = 0;
    std::size_t descents = 0;
};

ClosureResult closure(const std::vector<DiffPoly>& V, Var var, const Reducer& coeffs = rationals());
DiffPoly closure_min(const std::vector<DiffPoly>& V, Var var, const Reducer& coeffs = rationals());

// Orders two candidates by rank in var, then by canonical polynomial order.
bool rank_less(const DiffPoly& a, const DiffPoly& b, Var var);

// Characteristic chain over Q: level j adjoins a generator with minimal
// polynomial f_j (zero for a differential transcendental).
class Chain final : public Reducer {
public:
    struct Level {
        Var var;
        DiffPoly poly;
    };

    void push(Var v, DiffPoly f);
    DiffPoly reduce(const DiffPoly& p) const override;
    const std::vector<Level>& levels() const { return levels_; }
    bool has(Var v) const { return index_.count(v) > 0; }
    std::size_t level_of(Var v) const { return index_.at(v); }
    std::size_t size() const { return levels_.size(); }

private:
    std::vector<Level> levels_;
    std::map<Var, std::size_t> index_;
    DiffPoly reduce_by(DiffPoly p, std::size_t j) const;
};

enum class Irreducibility { Transcendental, Certified, Assumed, Reducible };
std::string to_string(Irreducibility c);

struct LevelReport {
    Var var;
    std::size_t constraints = 0;
    DiffPoly minimal;
    Irreducibility irreducibility = Irreducibility::Transcendental;
    std::size_t pair_steps = 0;
};

struct TowerResult {
    std::vector<LevelReport> levels;
    Chain chain; // levels strictly below the last one computed
};

// Apparent minimal polynomials of order[0..upto] in turn, each over the
// tower of the previous ones. Throws Inconsistent on a unit and
// TowerLimitation when a level used as a base is reducible.
TowerResult build_tower(const std::vector<DiffPoly>& V, const std::vector<Var>& order, std::size_t upto);

// Entry point over T0..Tm (the family is taken from V, T by default).
DiffPoly minimal_apparent(const std::vector<DiffPoly>& V, std::size_t m);

// Whether f can serve as a tower level over `below`.
Irreducibility certify_irreducible(const DiffPoly& f, Var var, const Chain& below);

} // namespace dcfwb
