#pragma once

#include "dcfwb/closure_engine.hpp"
#include "dcfwb/univariate.hpp"

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dcfwb {

// num/den built from leaves by +, -, *, delta and optionally division.
struct Expr {
    DiffPoly num{0};
    DiffPoly den{1};
    unsigned size = 0;
    std::optional<Var> var; // the single variable involved, when single_var is set
};

// Enumerates expressions by size without repetition. Rationals have size
// |num| + den; a variable's size comes from the leaf callback; delta(e) has
// size 1 + size(e) and a binary node 1 + size(a) + size(b).
class ExprEnumerator {
public:
    struct Options {
        bool division = false;
        bool single_var = false;
        unsigned max_size = 16;
        std::size_t bucket_cap = 20000;
    };
    using Leaves = std::function<std::vector<Var>(unsigned size)>;

    ExprEnumerator(Leaves leaves, Options opt);
    explicit ExprEnumerator(Leaves leaves) : ExprEnumerator(std::move(leaves), Options{}) {}

    // The i-th expression, or nullptr past the end.
    const Expr* at(std::size_t i);

private:
    struct Key {
        DiffPoly num, den;
        bool operator<(const Key& o) const;
    };
    Leaves leaves_;
    Options opt_;
    std::vector<std::vector<Expr>> buckets_; // index = size
    std::vector<std::pair<unsigned, std::size_t>> flat_;
    std::set<Key> seen_;

    bool grow();
    bool offer(std::vector<Expr>& out, Expr e);
};

// Polynomials with the variables Y_{k-1} at size k, in enumeration order.
ExprEnumerator::Leaves y_family_leaves();

// Minimal polynomial over Q of an element of the algebraic part, from its
// conjugates under sign changes of the square-root atoms.
std::optional<UniPoly> algebraic_minpoly(const ClosureEngine& eng, const Elem& v);

struct RelationQuery {
    std::vector<Var> base; // priority order
    std::vector<Elem> base_values;
    Var target;
    Elem value;
    std::size_t enum_limit = 0;  // enumerated candidates over base and target
    std::size_t enum_from = 0;   // skip enumerated candidates before this index
    bool enum_only = false;      // skip the fixed families
    std::optional<Rank> below;   // keep only ranks strictly below this
    // Applied to each candidate before ranking, e.g. reduction by the base's chain.
    std::function<DiffPoly(const DiffPoly&)> normalize;
};

struct RelationResult {
    bool found = false;
    DiffPoly poly{0}; // monic in target
    bool unsupported = false;
    std::string why;
    std::string source; // which candidate family produced poly
};

// Least-rank relation of value over the base values among a fixed candidate
// family: linear and quadratic forms in a single base element, the exact
// minimal polynomial of algebraic values, linear order-1 forms, then the
// first enum_limit enumerated polynomials. Every candidate is verified by exact
// evaluation. unsupported is set when the value is algebraic over the base in
// a way no candidate expresses.
RelationResult least_relation(const ClosureEngine& eng, const RelationQuery& q);

} // namespace dcfwb
