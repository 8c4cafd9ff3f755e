#pragma once

#include "dcfwb/closure_engine.hpp"

#include <map>
#include <string>
#include <vector>

namespace dcfwb {

enum class Verdict { Consistent, Inconsistent, Unsupported };
std::string to_string(Verdict v);

struct ConsistencyQuery {
    std::vector<DiffPoly> eqs;   // each must vanish
    std::vector<Var> distinct;   // pairwise distinct
    std::map<Var, Elem> pinned;  // fixed values, taken from the engine passed to check()
    bool trust_pins = false;     // skip equations whose variables are all pinned
};

struct ConsistencyResult {
    Verdict verdict = Verdict::Unsupported;
    std::map<Var, Elem> witness; // all variables, when consistent
    ClosureEngine engine;        // the engine the witness lives in
    std::string reason;
    std::size_t nodes = 0;
};

// Witness search in the closure engine. Equations with one unknown are solved
// in turn: order 0 by branching over the full root set, order 1 by a generic
// zero. Consistent comes with a witness that has been re-verified exactly;
// Inconsistent only when every branch failed without a generic choice and
// every root set was complete. Anything else is Unsupported.
class ConsistencyOracle {
public:
    struct Limits {
        std::size_t max_nodes = 20000;
        int max_order = 1;
        std::size_t max_vars = 2048;
    };

    ConsistencyOracle() = default;
    explicit ConsistencyOracle(Limits l) : limits_(l) {}

    ConsistencyResult check(const ConsistencyQuery& q, const ClosureEngine& base) const;

private:
    Limits limits_;
};

// Re-checks a witness: every equation vanishes and the distinct set is injective.
bool verify_witness(const ConsistencyQuery& q, const std::map<Var, Elem>& w, const ClosureEngine& eng,
                    std::string* why = nullptr);

} // namespace dcfwb
