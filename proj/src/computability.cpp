#include "dcfwb/computability.hpp"

#include "dcfwb/error.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

namespace dcfwb {

bool is_bits(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c == '0' || c == '1'; });
}

bool is_prefix(const BitString& a, const BitString& b) {
    return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

std::optional<int> TTFunctional::eval(const BitString& sigma, unsigned x, unsigned t) const {
    if (sigma.size() < use)
        return std::nullopt;
    auto it = table.find({sigma.substr(0, use), x});
    if (it == table.end() || it->second.time > t)
        return std::nullopt;
    return it->second.out;
}

std::optional<int> TTFunctional::eval(const BitString& sigma, unsigned x) const {
    return eval(sigma, x, std::numeric_limits<unsigned>::max());
}

void TTFunctional::validate() const {
    for (const auto& [key, e] : table) {
        if (key.first.size() != use || !is_bits(key.first))
            throw InvalidInput("functional table prefix '" + key.first + "' does not have length " + std::to_string(use));
        if (e.out != 0 && e.out != 1)
            throw InvalidInput("functional outputs must be bits");
    }
}

namespace {

std::vector<BitString> all_strings(unsigned n) {
    std::vector<BitString> out;
    for (unsigned long m = 0; m < (1ul << n); ++m) {
        BitString s(n, '0');
        for (unsigned i = 0; i < n; ++i)
            if (m >> (n - 1 - i) & 1)
                s[i] = '1';
        out.push_back(s);
    }
    return out;
}

} // namespace

TTFunctional TTFunctional::constant(int v, unsigned max_x, unsigned time) {
    TTFunctional f;
    for (unsigned x = 0; x <= max_x; ++x)
        f.table[{"", x}] = {v, time};
    return f;
}

TTFunctional TTFunctional::bit_at(unsigned pos, unsigned max_x, unsigned time) {
    TTFunctional f;
    f.use = pos + 1;
    for (const auto& s : all_strings(f.use))
        for (unsigned x = 0; x <= max_x; ++x)
            f.table[{s, x}] = {s[pos] - '0', time};
    return f;
}

TTFunctional TTFunctional::parity(unsigned from, unsigned use, unsigned max_x, unsigned time) {
    TTFunctional f;
    f.use = use;
    for (const auto& s : all_strings(use)) {
        int p = 0;
        for (unsigned i = from; i < use; ++i)
            p ^= s[i] - '0';
        for (unsigned x = 0; x <= max_x; ++x)
            f.table[{s, x}] = {p, time};
    }
    return f;
}

std::optional<Split> least_split(const TTFunctional& f, const BitString& gamma, const SearchCaps& caps) {
    // Outputs depend on sigma|use, so a least split uses the shortest legal
    // length L = max(use, |gamma|). With |gamma| >= use there is only one
    // candidate string and no split.
    if (gamma.size() >= f.use)
        return std::nullopt;
    std::size_t L = f.use;
    struct Cand {
        const BitString* s;
        int out;
        unsigned time;
    };
    std::map<unsigned, std::vector<Cand>> by_x;
    for (const auto& [key, e] : f.table)
        if (is_prefix(gamma, key.first))
            by_x[key.second].push_back({&key.first, e.out, e.time});
    using Key = std::tuple<unsigned long, BitString, BitString, unsigned, unsigned>;
    std::optional<Key> best;
    for (const auto& [x, cs] : by_x)
        for (const Cand& a : cs)
            for (const Cand& b : cs) {
                if (a.out == b.out)
                    continue;
                unsigned t = std::max(a.time, b.time);
                Key k{2 * L + x + t, *a.s, *b.s, x, t};
                if (!best || k < *best)
                    best = k;
            }
    if (!best)
        return std::nullopt;
    const auto& [sum, sigma, tau, x, t] = *best;
    if (L > caps.prefix || x > caps.x || t > caps.t)
        throw Horizon("least splitting tuple lies outside the search caps (|sigma|=" + std::to_string(L) +
                      ", x=" + std::to_string(x) + ", t=" + std::to_string(t) + ")");
    return Split{sigma, tau, x, t};
}

GammaTrace build_gamma(const BitString& B, const BitString& cjump, const std::vector<TTFunctional>& functionals,
                       std::size_t E, const SearchCaps& caps) {
    if (B.empty() || !is_bits(B))
        throw InvalidInput("B must be a nonempty bit string");
    if (!is_bits(cjump) || cjump.size() < E)
        throw InvalidInput("Cjump must supply at least E bits");
    if (functionals.size() < E)
        throw InvalidInput("need a functional for every e < E");
    GammaTrace tr;
    tr.segments.push_back("");
    for (std::size_t e = 0; e < E; ++e) {
        functionals[e].validate();
        BitString g = tr.segments.back() + cjump[e];
        tr.segments.push_back(g);
        tr.steps.push_back({2 * e + 1, true, cjump[e] - '0', std::nullopt, false});
        auto sp = least_split(functionals[e], g, caps);
        tr.exists.push_back(sp.has_value());
        GammaStep st{2 * e + 2, false, 0, sp, false};
        if (sp) {
            if (sp->x >= B.size())
                throw InvalidInput("B is too short for the splitting input " + std::to_string(sp->x));
            if (is_prefix(sp->sigma, sp->tau) || is_prefix(sp->tau, sp->sigma))
                throw Error("splitting strings are comparable");
            int tau_out = *functionals[e].eval(sp->tau, sp->x, sp->t);
            st.took_sigma = tau_out == B[sp->x] - '0';
            g = st.took_sigma ? sp->sigma : sp->tau;
        }
        tr.segments.push_back(g);
        tr.steps.push_back(st);
    }
    return tr;
}

int recover_jump_bit(const GammaTrace& trace, const std::vector<TTFunctional>& functionals, const BitString& D,
                     std::size_t e, const SearchCaps& caps) {
    if (e >= trace.exists.size() || e >= functionals.size())
        throw InvalidInput("e out of trace range");
    std::size_t n = 0; // |gamma_2k|
    for (std::size_t k = 0;; ++k) {
        if (n >= D.size())
            throw InvalidInput("D is too short for the trace");
        if (k == e)
            return D[n] - '0';
        BitString g = D.substr(0, n + 1); // gamma_2k+1
        if (!trace.exists[k]) {
            n += 1;
            continue;
        }
        auto sp = least_split(functionals[k], g, caps);
        if (!sp)
            throw InvalidInput("trace claims a split for e=" + std::to_string(k) + " but none exists");
        bool s = is_prefix(sp->sigma, D), t = is_prefix(sp->tau, D);
        if (s == t)
            throw InvalidInput("D is incompatible with the trace at e=" + std::to_string(k));
        n = s ? sp->sigma.size() : sp->tau.size();
    }
}

std::vector<std::string> check_diagonalization(const GammaTrace& trace, const std::vector<TTFunctional>& functionals,
                                               const BitString& B, const BitString& D) {
    std::vector<std::string> bad;
    for (const auto& st : trace.steps) {
        if (st.odd || !st.split)
            continue;
        std::size_t e = st.stage / 2 - 1;
        unsigned x = st.split->x;
        auto v = functionals[e].eval(D, x);
        if (!v)
            bad.push_back("Phi_" + std::to_string(e) + "^D(" + std::to_string(x) + ") diverges");
        else if (*v == B[x] - '0')
            bad.push_back("Phi_" + std::to_string(e) + "^D agrees with B at " + std::to_string(x));
    }
    return bad;
}

bool check_sim1_closure(const DegreeModel& m, const std::vector<bool>& S) {
    for (std::size_t c = 0; c < m.size(); ++c)
        for (std::size_t d = 0; d < m.size(); ++d)
            if (m.jump[c] == m.jump[d] && S[c] != S[d])
                return false;
    return true;
}

std::vector<bool> jump_preimage(const DegreeModel& m, const std::vector<bool>& T) {
    std::vector<bool> S(m.size(), false);
    for (std::size_t d = 0; d < m.size(); ++d)
        S[d] = T[m.jump[d]];
    return S;
}

std::vector<bool> upward_closure(const DegreeModel& m, const std::vector<bool>& T) {
    std::vector<bool> U(m.size(), false);
    for (std::size_t d = 0; d < m.size(); ++d)
        for (std::size_t c = 0; c < m.size(); ++c)
            if (T[c] && m.leq[c][d])
                U[d] = true;
    return U;
}

} // namespace dcfwb
