#pragma once

#include "dcfwb/diffpoly.hpp"

#include <random>

namespace dcfwb::testing_support {

struct PolyShape {
    unsigned vars = 2;
    unsigned max_order = 2;
    unsigned max_degree = 3;
    unsigned max_terms = 4;
    int coeff_bound = 9;
    Family family = Family::Y;
};

inline Rational random_rational(std::mt19937_64& rng, int bound) {
    std::uniform_int_distribution<int> num(-bound, bound), den(1, bound);
    int n = 0;
    while (n == 0)
        n = num(rng);
    Rational q(n, den(rng));
    q.canonicalize();
    return q;
}

inline DiffPoly random_poly(std::mt19937_64& rng, const PolyShape& sh) {
    std::uniform_int_distribution<unsigned> terms(1, sh.max_terms), var(0, sh.vars - 1),
        order(0, sh.max_order), deg(0, sh.max_degree);
    DiffPoly p;
    unsigned nt = terms(rng);
    for (unsigned t = 0; t < nt; ++t) {
        DiffPoly m(random_rational(rng, sh.coeff_bound));
        unsigned budget = deg(rng);
        for (unsigned k = 0; k < budget; ++k)
            m *= DiffPoly::var({sh.family, var(rng)}, order(rng));
        p += m;
    }
    return p;
}

} // namespace dcfwb::testing_support
