#include "dcfwb/batch.hpp"

#include "dcfwb/error.hpp"
#include "dcfwb/graphcode.hpp"

#include <omp.h>

#include <limits>
#include <random>

namespace dcfwb {

namespace {

RunResult run_one(const MockScript& s, std::size_t max_stage) {
    MockLowField K(s);
    return run_to_convergence(K, max_stage);
}

} // namespace

std::vector<RunResult> run_scenarios_serial(const std::vector<MockScript>& scripts, std::size_t max_stage) {
    std::vector<RunResult> out;
    for (const auto& s : scripts)
        out.push_back(run_one(s, max_stage));
    return out;
}

std::vector<RunResult> run_scenarios(const std::vector<MockScript>& scripts, int jobs, std::size_t max_stage) {
    std::vector<RunResult> out(scripts.size());
    std::vector<std::string> errors(scripts.size());
    long n = static_cast<long>(scripts.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs > 0 ? jobs : omp_get_max_threads())
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = run_one(scripts[i], max_stage);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty())
            throw InvalidInput(e);
    return out;
}

RoundTripOutcome round_trip_serial(const Graph& g, std::size_t orders, std::uint64_t seed) {
    RoundTripOutcome r;
    r.min_detour = std::numeric_limits<std::size_t>::max();
    std::mt19937_64 rng(seed);
    std::size_t n = g.node_count();
    Graph h = encode_comp_to_enum(g);
    if (n >= 3)
        r.min_detour = min_detour_length(h, n);
    for (std::size_t k = 0; k < orders; ++k) {
        // Graph to its enumerable coding and back.
        Graph hh = h.relabeled(random_permutation(h.node_count(), rng));
        EdgeStream es = random_stream(hh, 2 + k, rng);
        DecodeResult d = decode_enum_to_comp(es);
        ++r.checks;
        // No tag ever appears for the empty graph.
        if ((d.incomplete && n > 0) || d.undecided || !isomorphic(d.graph, g))
            r.failures.push_back("comp2enum order " + std::to_string(k));
        // An enumeration of the graph to its computable coding and back.
        Graph gg = g.relabeled(random_permutation(n, rng));
        Graph c = encode_enum_to_comp(random_stream(gg, 2 + k, rng));
        c = c.relabeled(random_permutation(c.node_count(), rng));
        EdgeStream back = decode_comp_to_enum(c);
        ++r.checks;
        if (!back.monotone() || !isomorphic(back.final_graph(), g))
            r.failures.push_back("enum2comp order " + std::to_string(k));
    }
    return r;
}

std::vector<RoundTripOutcome> round_trips_serial(const std::vector<Graph>& gs, std::size_t orders,
                                                 std::uint64_t seed) {
    std::vector<RoundTripOutcome> out;
    for (std::size_t i = 0; i < gs.size(); ++i)
        out.push_back(round_trip_serial(gs[i], orders, seed + i));
    return out;
}

std::vector<RoundTripOutcome> round_trips(const std::vector<Graph>& gs, std::size_t orders, std::uint64_t seed,
                                          int jobs) {
    std::vector<RoundTripOutcome> out(gs.size());
    long n = static_cast<long>(gs.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(jobs > 0 ? jobs : omp_get_max_threads())
    for (long i = 0; i < n; ++i)
        out[i] = round_trip_serial(gs[i], orders, seed + static_cast<std::uint64_t>(i));
    return out;
}

} // namespace dcfwb
