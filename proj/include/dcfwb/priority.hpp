#pragma once

#include "dcfwb/closure_engine.hpp"
#include "dcfwb/consistency.hpp"
#include "dcfwb/relations.hpp"
#include "dcfwb/ritt.hpp"

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dcfwb {

using Tuple = std::vector<std::size_t>;
using HMap = std::map<std::size_t, std::uint32_t>; // n -> m

struct Guess {
    std::size_t from_stage = 0;
    DiffPoly p; // over X_n and at most one X_j with j < n
};

struct ScriptedElement {
    std::size_t n = 0;
    std::vector<Guess> guesses; // increasing from_stage, first at 0
    DiffPoly truth;             // equals the last guess
};

struct MockScript {
    std::vector<ScriptedElement> elements;
    std::size_t horizon = 200;
};

// Stage-indexed approximations to a differential field K = {x_0, x_1, ...}.
// The construction reads K only through these three functions.
class LowFieldApprox {
public:
    virtual ~LowFieldApprox() = default;
    // Guess at stage s for the minimal differential polynomial of x_n over
    // Q<x_j : j in rho>, over X_n and those X_j. Zero when x_n looks
    // differentially transcendental.
    virtual DiffPoly p(std::size_t n, const Tuple& rho, std::size_t s) = 0;
    virtual bool M(std::size_t n, const Tuple& rho, const DiffPoly& q, std::size_t s) { return p(n, rho, s) == q; }
    bool trans(std::size_t n, const Tuple& rho, std::size_t s) { return p(n, rho, s).is_zero(); }
};

// K_s realized in a closure engine from the guesses current at stage s.
// Elements past the script are the values of one-variable rational
// expressions in the scripted elements, deduplicated under the final guesses.
class MockLowField final : public LowFieldApprox {
public:
    explicit MockLowField(MockScript script);
    ~MockLowField() override;

    DiffPoly p(std::size_t n, const Tuple& rho, std::size_t s) override;
    bool M(std::size_t n, const Tuple& rho, const DiffPoly& q, std::size_t s) override;

    const MockScript& script() const { return script_; }
    std::size_t scripted() const { return script_.elements.size(); }
    std::size_t horizon() const { return script_.horizon; }
    // Guess changes of x_n; elements past the script inherit those of their variable.
    std::size_t mind_changes(std::size_t n);
    std::size_t last_change_stage() const;
    std::optional<std::size_t> support(std::size_t n);
    // Description of x_n under the guesses of stage s: the current guess, or den*X_n - num.
    DiffPoly description(std::size_t n, std::size_t s);

private:
    struct Auto {
        DiffPoly num, den;
        std::optional<Var> var;
    };
    struct Realization;

    MockScript script_;
    std::vector<Auto> autos_;
    ExprEnumerator en_;
    std::size_t en_pos_ = 0;
    std::vector<std::size_t> truth_cfg_;
    std::map<std::vector<std::size_t>, std::unique_ptr<Realization>> real_;

    std::vector<std::size_t> config(std::size_t s) const;
    Realization& realize(const std::vector<std::size_t>& cfg);
    const Elem& value(Realization& r, std::size_t n);
    void extend_autos(std::size_t n);
    DiffPoly describe(const std::vector<std::size_t>& cfg, std::size_t n);
    std::optional<std::size_t> support_in(const std::vector<std::size_t>& cfg, std::size_t n);
    DiffPoly compute_p(const std::vector<std::size_t>& cfg, std::size_t n, const Tuple& rho);
};

// The orders h(0), 0, h(1), 1, ... without repetitions, and the preimages.
struct PriorityLists {
    std::vector<std::uint32_t> m;
    std::vector<std::size_t> n; // n[i] = h^{-1}(m[i]); the last may be the least index outside dom h

    Tuple rho(std::size_t i) const { return Tuple(n.begin(), n.begin() + static_cast<long>(i)); }
    std::optional<std::size_t> position_of_n(std::size_t k) const;
    std::optional<std::size_t> position_of_m(std::uint32_t k) const;
    std::vector<std::uint32_t> m_prefix(std::size_t i) const {
        return std::vector<std::uint32_t>(m.begin(), m.begin() + static_cast<long>(i));
    }
};

PriorityLists rebuild_priority_lists(const HMap& h, const std::set<std::uint32_t>& F0);

struct Event {
    std::size_t stage = 0;
    std::string substage; // "R:n", "S:m", "unattached:m", "final"
    std::string action;
    HMap h;
    std::vector<DiffPoly> U_added;
    std::string note;
};

// Apparent minimal polynomials over a committed set U, level by level along
// a priority order. Distinctness is used to split off linear factors whose
// root is an earlier element.
class TowerCache {
public:
    struct Index {
        const std::vector<DiffPoly>* U = nullptr;
        const std::vector<std::set<Var>>* vars = nullptr;
        const std::map<std::uint32_t, std::vector<std::size_t>>* by_var = nullptr;
    };

    explicit TowerCache(Index ix) : ix_(ix) {}
    void invalidate();
    // Minimal polynomial of y_m over y_prefix; zero when none.
    DiffPoly min(const std::vector<std::uint32_t>& prefix, std::uint32_t m);
    // p over the same tower, reduced by it.
    DiffPoly reduce(const std::vector<std::uint32_t>& prefix, const DiffPoly& p);
    // Same rank as f and partial remainder zero over the tower.
    bool equivalent(const std::vector<std::uint32_t>& prefix, std::uint32_t m, const DiffPoly& p);
    const Chain& chain(const std::vector<std::uint32_t>& prefix);

private:
    Index ix_;
    std::vector<std::uint32_t> order_;
    std::vector<DiffPoly> levels_;
    Chain chain_;
    std::map<std::pair<std::vector<std::uint32_t>, std::uint32_t>, DiffPoly> memo_;

    void extend(const std::vector<std::uint32_t>& prefix);
    DiffPoly level(const std::vector<std::uint32_t>& prefix, std::uint32_t m) const;
};

struct ConstructionOptions {
    std::size_t max_stage = 200;
    ConsistencyOracle::Limits limits{};
};

// The finite-injury construction of a computable copy F of K.
class Construction {
public:
    Construction(LowFieldApprox& K, ConstructionOptions opt = {});

    // Runs stage s+1 in full.
    void run_stage();

    // The pieces of a stage, for tests. begin_stage must come first; the
    // bool results tell whether the next substage runs.
    void begin_stage();
    bool run_substage_R(std::size_t n);
    bool run_substage_S(std::uint32_t m);
    void run_unattached();
    void run_final_step();
    void end_stage();

    std::size_t stage() const { return s_; }
    const std::vector<DiffPoly>& U() const { return U_; }
    const std::set<std::uint32_t>& F0() const { return F0_; }
    const HMap& h() const { return h_; }
    const ClosureEngine& engine() const { return eng_; }
    const std::map<std::uint32_t, Elem>& g() const { return g_; }
    const std::vector<Event>& log() const { return log_; }
    const PriorityLists& lists() const { return lists_; }
    const std::vector<HMap>& history() const { return history_; }
    const std::vector<PriorityLists>& list_history() const { return list_history_; }
    // Even closure steps: (q, m) with q - Y_m committed.
    const std::vector<std::pair<DiffPoly, std::uint32_t>>& processed() const { return processed_; }
    TowerCache& towers() { return towers_; }

private:
    struct SigmaEntry {
        Verdict verdict = Verdict::Unsupported;
        ClosureEngine eng;
        std::map<Var, Elem> witness;
    };
    struct SearchEntry {
        std::vector<Elem> values;
        std::optional<Rank> below;
        std::size_t upto = 0;
        bool found = false;
        DiffPoly q;
    };

    LowFieldApprox& K_;
    ConstructionOptions opt_;
    std::size_t s_ = 0;
    std::vector<DiffPoly> U_;
    std::vector<std::set<Var>> Uvars_;
    std::map<std::uint32_t, std::vector<std::size_t>> Uby_;
    std::set<std::uint32_t> F0_;
    HMap h_;
    std::map<std::uint32_t, std::size_t> hinv_;
    ClosureEngine eng_;
    std::map<std::uint32_t, Elem> g_;
    PriorityLists lists_;
    std::vector<Event> log_;
    std::vector<HMap> history_;
    std::vector<PriorityLists> list_history_;
    std::vector<std::pair<DiffPoly, std::uint32_t>> processed_;
    TowerCache towers_;

    ExprEnumerator closure_polys_;
    std::size_t closure_cursor_ = 0;
    std::deque<std::size_t> closure_pending_;
    std::set<std::uint32_t> inverted_;

    std::map<std::vector<std::string>, SigmaEntry> sigma_cache_;
    std::map<std::pair<std::vector<std::uint32_t>, std::uint32_t>, SearchEntry> search_cache_;

    // Per-stage state.
    bool in_stage_ = false;
    bool over_ = false;
    HMap hn_;
    std::map<std::uint32_t, std::size_t> hninv_;
    std::vector<DiffPoly> stage_added_;

    void add_to_U(const DiffPoly& p);
    void assign(std::size_t n, std::uint32_t m);
    void record(const std::string& substage, const std::string& action, std::vector<DiffPoly> added = {},
                std::string note = {});
    std::map<Var, Var> renaming(const Tuple& rho, const std::vector<std::uint32_t>& images) const;
    std::vector<DiffPoly> sigma_images(std::size_t i, const Tuple& rho_all, const std::vector<std::uint32_t>& images);
    bool sigma_consistent(std::size_t i);
    bool commit(const std::vector<DiffPoly>& C, std::uint32_t m, std::string* why);
    bool compatible(const std::vector<std::uint32_t>& prefix, std::uint32_t m, const DiffPoly& p);
    std::optional<DiffPoly> lower_relation(const std::vector<std::uint32_t>& prefix, std::uint32_t m);
    std::map<Var, Elem> g_at() const;
    void closure_step();
    std::uint32_t next_index() const;
};

struct RunReport {
    bool aborted = false;
    std::string abort_reason;
    bool converged = false;       // the fragment holds every scripted element
    bool bijective = false;
    bool unique_closure = false;  // one m per processed q
    bool isomorphic = false;      // committed minimal polynomials match the truth
    bool witness = false;         // final U has a simultaneous witness
    bool injury_bounded = false;
    std::vector<std::pair<std::uint32_t, std::size_t>> fragment; // (m_i, n_i)
    std::vector<std::string> problems;
    std::vector<std::string> injury;
    std::size_t stages = 0;
    bool ok() const {
        return !aborted && converged && bijective && unique_closure && isomorphic && witness && injury_bounded;
    }
};

struct RunResult {
    RunReport report;
    std::vector<DiffPoly> U;
    HMap h;
    std::vector<Event> log;
};

// Runs the construction up to max_stage (0: the script's horizon) and checks
// the limit claims on the stable fragment.
RunResult run_to_convergence(MockLowField& K, std::size_t max_stage = 0);

// The report for a finished or aborted construction.
RunReport check_run(Construction& c, MockLowField& K);

} // namespace dcfwb
