#pragma once

// Curated constraint sets (order <= 1, degree <= 3) with hand-derived minimal
// polynomials and explicit common zeros, plus the lower-rank elimination check.

#include "dcfwb/diffpoly.hpp"
#include "jet.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace dcfwb::testing_support {

struct ConstraintCase {
    std::string name;
    std::vector<std::string> polys;
    unsigned m;
    std::string expected;
    std::vector<mpq_class> mu; // number field for witness coefficients
    unsigned lower_degree;     // max degree of T_{m-1} in elimination candidates
    std::function<std::vector<Witness>(const NumberField*, std::size_t)> witnesses;
};

inline mpq_class Q(long n, long d = 1) {
    mpq_class q(n, d);
    q.canonicalize();
    return q;
}

inline std::vector<ConstraintCase> constraint_suite() {
    using W = std::vector<Witness>;
    const Var t0 = T(0), t1 = T(1);
    auto num = [](const NumberField* f, const mpq_class& c) { return Num(f, c); };
    auto cst = [num](const NumberField* f, const mpq_class& c, std::size_t p) { return Jet::constant(num(f, c), p); };
    auto gen = [](const NumberField* f) { return Num::gen(f); };
    std::vector<ConstraintCase> s;

    s.push_back({"sqrt2", {"T0^2 - 2"}, 0, "T0^2 - 2", {Q(-2), Q(0)}, 0, [=](const NumberField* f, std::size_t p) {
                     Num a = gen(f);
                     return W{{{t0, Jet::constant(a, p)}}, {{t0, Jet::constant(a.scaled(-1), p)}}};
                 }});
    s.push_back({"sqrt2_constant", {"T0'", "T0^2 - 2"}, 0, "T0^2 - 2", {Q(-2), Q(0)}, 0,
                 [=](const NumberField* f, std::size_t p) {
                     Num a = gen(f);
                     return W{{{t0, Jet::constant(a, p)}}, {{t0, Jet::constant(a.scaled(-1), p)}}};
                 }});
    s.push_back({"exponential", {"T0' - T0"}, 0, "T0' - T0", {Q(0)}, 0, [=](const NumberField* f, std::size_t p) {
                     W w;
                     for (auto k : {Q(1), Q(2), Q(-1), Q(1, 2), Q(3)})
                         w.push_back({{t0, Jet::exp(num(f, k), Q(1), p)}});
                     return w;
                 }});
    s.push_back({"linear_chain", {"T0 - 1", "T1 - T0"}, 1, "T1 - 1", {Q(0)}, 0, [=](const NumberField* f, std::size_t p) {
                     return W{{{t0, cst(f, 1, p)}, {t1, cst(f, 1, p)}}};
                 }});
    s.push_back({"constant", {"T0'"}, 0, "T0'", {Q(0)}, 0, [=](const NumberField* f, std::size_t p) {
                     W w;
                     for (auto k : {Q(1), Q(2), Q(-3), Q(1, 2), Q(5)})
                         w.push_back({{t0, cst(f, k, p)}});
                     return w;
                 }});
    s.push_back({"square_of_line", {"T0'^2 - 4*T0"}, 0, "T0'^2 - 4*T0", {Q(0)}, 0, [=](const NumberField* f, std::size_t p) {
                     W w{{{t0, cst(f, 0, p)}}};
                     for (auto c : {Q(0), Q(1), Q(2), Q(-1), Q(3), Q(-5, 2)}) {
                         Jet l = Jet::linear(num(f, c), num(f, 1), p);
                         w.push_back({{t0, l * l}});
                     }
                     return w;
                 }});
    s.push_back({"fourth_root", {"T0^2 - 2", "T1^2 - T0"}, 1, "T1^2 - T0", {Q(-2), Q(0), Q(0), Q(0)}, 1,
                 [=](const NumberField* f, std::size_t p) {
                     Num a = gen(f);
                     return W{{{t0, Jet::constant(a * a, p)}, {t1, Jet::constant(a, p)}},
                              {{t0, Jet::constant(a * a, p)}, {t1, Jet::constant(a.scaled(-1), p)}}};
                 }});
    s.push_back({"split_output", {"T0 - 3", "T1^2 - T0*T1"}, 1, "T1^2 - 3*T1", {Q(0)}, 0,
                 [=](const NumberField* f, std::size_t p) {
                     return W{{{t0, cst(f, 3, p)}, {t1, cst(f, 0, p)}}, {{t0, cst(f, 3, p)}, {t1, cst(f, 3, p)}}};
                 }});
    s.push_back({"integral_of_line", {"T0' - 1", "T1' - T0"}, 1, "T1' - T0", {Q(0)}, 3,
                 [=](const NumberField* f, std::size_t p) {
                     W w;
                     for (auto [c0, k] : std::vector<std::pair<mpq_class, mpq_class>>{
                              {0, 0}, {0, 1}, {1, 2}, {2, -1}, {-1, 3}, {3, 5}}) {
                         Jet a = Jet::linear(num(f, c0), num(f, 1), p);
                         std::vector<Num> c(p, num(f, 0));
                         c[0] = num(f, k);
                         c[1] = num(f, c0);
                         c[2] = num(f, Q(1, 2));
                         w.push_back({{t0, a}, {t1, Jet(c)}});
                     }
                     return w;
                 }});
    s.push_back({"reciprocal_derivative", {"T0*T0' - 1"}, 0, "T0*T0' - 1", {Q(0)}, 0,
                 [=](const NumberField* f, std::size_t p) {
                     W w;
                     for (auto [c, r] : std::vector<std::pair<mpq_class, mpq_class>>{
                              {1, 1}, {4, 2}, {9, 3}, {Q(1, 4), Q(1, 2)}, {16, 4}})
                         for (int sg : {1, -1}) {
                             Jet lin = Jet::linear(num(f, c), num(f, 2), p + 1);
                             w.push_back({{t0, lin.sqrt(num(f, r * sg))}});
                         }
                     return w;
                 }});
    s.push_back({"shifted_sqrt2", {"T0^2 - 2", "T1 - T0 - 1"}, 1, "T1 - T0 - 1", {Q(-2), Q(0)}, 1,
                 [=](const NumberField* f, std::size_t p) {
                     Num a = gen(f), one = num(f, 1);
                     return W{{{t0, Jet::constant(a, p)}, {t1, Jet::constant(a + one, p)}},
                              {{t0, Jet::constant(a.scaled(-1), p)}, {t1, Jet::constant(one - a, p)}}};
                 }});
    s.push_back({"opposite_roots", {"T0^2 - 2", "T1^2 - 2", "T1 + T0"}, 1, "T1 + T0", {Q(-2), Q(0)}, 1,
                 [=](const NumberField* f, std::size_t p) {
                     Num a = gen(f);
                     return W{{{t0, Jet::constant(a, p)}, {t1, Jet::constant(a.scaled(-1), p)}},
                              {{t0, Jet::constant(a.scaled(-1), p)}, {t1, Jet::constant(a, p)}}};
                 }});
    s.push_back({"inverse_constant", {"T0'", "T0*T1 - 1"}, 1, "T0*T1 - 1", {Q(0)}, 3,
                 [=](const NumberField* f, std::size_t p) {
                     W w;
                     for (auto c : {Q(1), Q(2), Q(3), Q(-1, 2), Q(5)})
                         w.push_back({{t0, cst(f, c, p)}, {t1, cst(f, 1 / c, p)}});
                     return w;
                 }});
    s.push_back({"cusp", {"T0'^2 - T0^3"}, 0, "T0'^2 - T0^3", {Q(0)}, 0, [=](const NumberField* f, std::size_t p) {
                     W w{{{t0, cst(f, 0, p)}}};
                     for (auto c : {Q(1), Q(2), Q(-1), Q(3), Q(1, 2)}) {
                         Jet l = Jet::linear(num(f, c), num(f, 1), p);
                         w.push_back({{t0, (l * l).inverse() * cst(f, 4, p)}});
                     }
                     return w;
                 }});
    s.push_back({"scaled_exponential", {"T0 - 2", "T1' - T0*T1"}, 1, "T1' - 2*T1", {Q(0)}, 0,
                 [=](const NumberField* f, std::size_t p) {
                     W w;
                     for (auto k : {Q(1), Q(-1), Q(2), Q(1, 3), Q(5)})
                         w.push_back({{t0, cst(f, 2, p)}, {t1, Jet::exp(num(f, k), Q(2), p)}});
                     return w;
                 }});
    s.push_back({"square_of_exp", {"T0' - T0", "T1 - T0^2"}, 1, "T1 - T0^2", {Q(0)}, 3,
                 [=](const NumberField* f, std::size_t p) {
                     W w;
                     for (auto k : {Q(1), Q(2), Q(-1)})
                         w.push_back({{t0, Jet::exp(num(f, k), Q(1), p)}, {t1, Jet::exp(num(f, k * k), Q(2), p)}});
                     return w;
                 }});
    s.push_back({"independent_exponentials", {"T0' - T0", "T1' - 2*T1"}, 1, "T1' - 2*T1", {Q(0)}, 3,
                 [=](const NumberField* f, std::size_t p) {
                     W w;
                     for (auto [k, j] : std::vector<std::pair<mpq_class, mpq_class>>{
                              {1, 1}, {1, 2}, {2, 1}, {1, -1}, {3, 5}, {-1, Q(1, 2)}})
                         w.push_back({{t0, Jet::exp(num(f, k), Q(1), p)}, {t1, Jet::exp(num(f, j), Q(2), p)}});
                     return w;
                 }});
    s.push_back({"riccati", {"T0' - T0^2", "T1 - T0'"}, 1, "T1 - T0^2", {Q(0)}, 3, [=](const NumberField* f, std::size_t p) {
                     W w{{{t0, cst(f, 0, p)}, {t1, cst(f, 0, p)}}};
                     for (auto c : {Q(1), Q(2), Q(-1), Q(3)}) {
                         Jet y = Jet::linear(num(f, c), num(f, -1), p + 1).inverse();
                         w.push_back({{t0, y}, {t1, y.derivative()}});
                     }
                     return w;
                 }});
    s.push_back({"cubic", {"T0^3 - T0 - 1"}, 0, "T0^3 - T0 - 1", {Q(-1), Q(-1), Q(0)}, 0,
                 [=](const NumberField* f, std::size_t p) {
                     return W{{{t0, Jet::constant(gen(f), p)}}};
                 }});
    s.push_back({"golden", {"T0^2 + T0 - 1", "T1 - T0^2"}, 1, "T1 + T0 - 1", {Q(-1), Q(1)}, 1,
                 [=](const NumberField* f, std::size_t p) {
                     Num a = gen(f), b = num(f, -1) - gen(f);
                     return W{{{t0, Jet::constant(a, p)}, {t1, Jet::constant(a * a, p)}},
                              {{t0, Jet::constant(b, p)}, {t1, Jet::constant(b * b, p)}}};
                 }});
    s.push_back({"sqrt3_drift", {"T0^2 - 3", "T1' - T0"}, 1, "T1' - T0", {Q(-3), Q(0)}, 1,
                 [=](const NumberField* f, std::size_t p) {
                     W w;
                     for (int sg : {1, -1})
                         for (auto k : {Q(0), Q(1), Q(2), Q(-1), Q(3)}) {
                             Num a = gen(f).scaled(sg);
                             w.push_back({{t0, Jet::constant(a, p)}, {t1, Jet::linear(num(f, k), a, p)}});
                         }
                     return w;
                 }});
    s.push_back({"sqrt_of_line", {"T0' - 1", "T1^2 - T0"}, 1, "T1^2 - T0", {Q(0)}, 3,
                 [=](const NumberField* f, std::size_t p) {
                     W w;
                     for (auto [c, r] : std::vector<std::pair<mpq_class, mpq_class>>{
                              {1, 1}, {4, 2}, {9, 3}, {Q(1, 4), Q(1, 2)}})
                         for (int sg : {1, -1}) {
                             Jet lin = Jet::linear(num(f, c), num(f, 1), p);
                             w.push_back({{t0, lin}, {t1, lin.sqrt(num(f, r * sg))}});
                         }
                     return w;
                 }});
    s.push_back({"common_root", {"T0^3 - 1", "T0^2 - 1"}, 0, "T0 - 1", {Q(0)}, 0, [=](const NumberField* f, std::size_t p) {
                     return W{{{t0, cst(f, 1, p)}}};
                 }});
    s.push_back({"redundant_derivative", {"T0' - T0", "T0'' - T0"}, 0, "T0' - T0", {Q(0)}, 0,
                 [=](const NumberField* f, std::size_t p) {
                     W w;
                     for (auto k : {Q(1), Q(-2), Q(3), Q(1, 5)})
                         w.push_back({{t0, Jet::exp(num(f, k), Q(1), p)}});
                     return w;
                 }});
    return s;
}

// Null space test: is there a polynomial of T_m-rank below `bound` (and
// involving T_m) that vanishes on every witness? Candidates range over all
// rational linear combinations of monomials T_m^a T_m'^b T_{m-1}^c with
// a + b <= 3, c <= lower_degree.
struct EliminationResult {
    bool found = false;
    std::size_t columns = 0;
    std::size_t rows = 0;
    std::string example;
};

inline EliminationResult lower_rank_consequence(const ConstraintCase& c, const Rank& bound, const NumberField* f,
                                                const std::vector<Witness>& ws) {
    Var tm = T(c.m);
    std::vector<DiffPoly> basis;
    for (unsigned a = 0; a <= 3; ++a)
        for (unsigned b = 0; a + b <= 3; ++b)
            for (unsigned k = 0; k <= (c.m > 0 ? c.lower_degree : 0); ++k) {
                DiffPoly mono = pow(DiffPoly::var(tm), a) * pow(DiffPoly::var(tm, 1), b);
                if (c.m > 0)
                    mono *= pow(DiffPoly::var(T(c.m - 1)), k);
                if (rank_in(mono, tm) < bound)
                    basis.push_back(mono);
            }
    std::vector<std::vector<mpq_class>> rows;
    for (const auto& w : ws) {
        std::vector<Jet> vals;
        for (const auto& b : basis)
            vals.push_back(evaluate(b, w, f));
        std::size_t prec = 1000;
        for (const auto& j : vals)
            prec = std::min(prec, j.prec());
        for (std::size_t i = 0; i < prec; ++i)
            for (std::size_t d = 0; d < f->degree(); ++d) {
                std::vector<mpq_class> row;
                for (const auto& j : vals)
                    row.push_back(j[i].coords()[d]);
                rows.push_back(row);
            }
    }
    EliminationResult out;
    out.columns = basis.size();
    out.rows = rows.size();
    // Reduced row echelon form.
    std::size_t n = basis.size();
    std::vector<long> pivot_of_col(n, -1);
    std::size_t r = 0;
    for (std::size_t col = 0; col < n && r < rows.size(); ++col) {
        std::size_t p = r;
        while (p < rows.size() && rows[p][col] == 0)
            ++p;
        if (p == rows.size())
            continue;
        std::swap(rows[p], rows[r]);
        mpq_class inv = 1 / rows[r][col];
        for (auto& v : rows[r])
            v *= inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][col] == 0)
                continue;
            mpq_class t = rows[i][col];
            for (std::size_t k = col; k < n; ++k)
                rows[i][k] -= t * rows[r][k];
        }
        pivot_of_col[col] = static_cast<long>(r);
        ++r;
    }
    // Each free column gives a null vector; look for one touching T_m.
    for (std::size_t free = 0; free < n; ++free) {
        if (pivot_of_col[free] >= 0)
            continue;
        DiffPoly q = basis[free];
        for (std::size_t col = 0; col < n; ++col)
            if (pivot_of_col[col] >= 0)
                q -= scale(basis[col], rows[pivot_of_col[col]][free]);
        if (involves(q, tm)) {
            out.found = true;
            out.example = q.str();
            return out;
        }
    }
    return out;
}

} // namespace dcfwb::testing_support
