#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dcfwb {

// Bit strings are std::string over {'0','1'}; position i is character i.
using BitString = std::string;
bool is_bits(const std::string& s);
bool is_prefix(const BitString& a, const BitString& b); // a is an initial segment of b

// Truth-table functional: the output on input x depends on the first `use`
// oracle bits only and converges after `time` steps.
struct TTFunctional {
    struct Entry {
        int out = 0;
        unsigned time = 0;
    };
    unsigned use = 0;
    std::map<std::pair<BitString, unsigned>, Entry> table; // (prefix of length use, x)

    // Phi_{t}^{sigma}(x) if it converges within t steps.
    std::optional<int> eval(const BitString& sigma, unsigned x, unsigned t) const;
    std::optional<int> eval(const BitString& sigma, unsigned x) const;
    void validate() const;

    // Outputs v on every oracle for inputs 0..max_x.
    static TTFunctional constant(int v, unsigned max_x, unsigned time = 1);
    // Outputs oracle bit `pos` on inputs 0..max_x.
    static TTFunctional bit_at(unsigned pos, unsigned max_x, unsigned time = 1);
    // Outputs parity of oracle bits [from, use) on inputs 0..max_x.
    static TTFunctional parity(unsigned from, unsigned use, unsigned max_x, unsigned time = 1);
};

struct SearchCaps {
    unsigned prefix = 64;
    unsigned x = 32;
    unsigned t = 256;
};

struct Split {
    BitString sigma, tau;
    unsigned x = 0, t = 0;
};

// Least (sigma, tau, x, t) extending gamma with Phi_t^sigma(x), Phi_t^tau(x)
// both convergent and different, in the order (|s|+|t|+x+t, sigma, tau, x, t).
// Throws Horizon if the least split lies outside the caps.
std::optional<Split> least_split(const TTFunctional& f, const BitString& gamma, const SearchCaps& caps = {});

struct GammaStep {
    std::size_t stage = 0; // gamma_stage is produced by this step
    bool odd = false;
    int bit = 0;                // odd steps: C' bit appended
    std::optional<Split> split; // even steps: chosen tuple, if any
    bool took_sigma = false;
};

struct GammaTrace {
    std::vector<BitString> segments; // gamma_0 .. gamma_2E
    std::vector<GammaStep> steps;
    std::vector<bool> exists; // per e: did a splitting tuple exist

    const BitString& final() const { return segments.back(); }
};

GammaTrace build_gamma(const BitString& B, const BitString& cjump, const std::vector<TTFunctional>& functionals,
                       std::size_t E, const SearchCaps& caps = {});

// Recomputes |gamma_2e| from D and trace.exists alone (the segments are not
// read) and returns D(|gamma_2e|).
int recover_jump_bit(const GammaTrace& trace, const std::vector<TTFunctional>& functionals, const BitString& D,
                     std::size_t e, const SearchCaps& caps = {});

// For each e with a split: Phi_e^D(x) is defined and differs from B(x).
std::vector<std::string> check_diagonalization(const GammaTrace& trace, const std::vector<TTFunctional>& functionals,
                                               const BitString& B, const BitString& D);

// Finite degree model: labels 0..n-1 with a jump map into labels.
struct DegreeModel {
    std::vector<std::size_t> jump;
    std::vector<std::vector<bool>> leq; // optional partial order on labels

    std::size_t size() const { return jump.size(); }
};

// S respects first-jump equivalence: jump(c) = jump(d) implies c in S iff d in S.
bool check_sim1_closure(const DegreeModel& m, const std::vector<bool>& S);
// {d : jump(d) in T}.
std::vector<bool> jump_preimage(const DegreeModel& m, const std::vector<bool>& T);
// Labels above some member of T under leq.
std::vector<bool> upward_closure(const DegreeModel& m, const std::vector<bool>& T);

} // namespace dcfwb
