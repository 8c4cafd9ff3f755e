#pragma once

#include "dcfwb/graph.hpp"
#include "dcfwb/priority.hpp"

#include <cstdint>
#include <vector>

namespace dcfwb {

// Independent priority runs, one per script. The parallel version splits the
// scripts over OpenMP threads; results are in script order either way.
std::vector<RunResult> run_scenarios_serial(const std::vector<MockScript>& scripts, std::size_t max_stage = 0);
std::vector<RunResult> run_scenarios(const std::vector<MockScript>& scripts, int jobs, std::size_t max_stage = 0);

// Both coding directions for each graph under `orders` random enumerations
// seeded from seed + index. failures[i] lists what went wrong for graph i.
struct RoundTripOutcome {
    std::size_t checks = 0;
    std::size_t min_detour = 0; // over all encodings, SIZE_MAX when no pair
    std::vector<std::string> failures;
};
RoundTripOutcome round_trip_serial(const Graph& g, std::size_t orders, std::uint64_t seed);
std::vector<RoundTripOutcome> round_trips_serial(const std::vector<Graph>& gs, std::size_t orders, std::uint64_t seed);
std::vector<RoundTripOutcome> round_trips(const std::vector<Graph>& gs, std::size_t orders, std::uint64_t seed,
                                          int jobs);

} // namespace dcfwb
