#pragma once

#include "dcfwb/computability.hpp"
#include "dcfwb/enimodel.hpp"
#include "dcfwb/graph.hpp"
#include "dcfwb/priority.hpp"
#include "dcfwb/ritt.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace dcfwb {

using Json = nlohmann::ordered_json;

Json read_json_file(const std::string& path);
std::vector<Json> read_jsonl_file(const std::string& path);
// One compact object per line.
void write_jsonl(std::ostream& os, const Json& j);

Var parse_var(const std::string& text);
std::string var_name(Var v);

Json to_json(const Graph& g);
Graph graph_from_json(const Json& j);
Json to_json(const EdgeStream& s);
// Also accepts a graph, read as a single stage.
EdgeStream stream_from_json(const Json& j);

Json to_json(const TModel& m);
TModel tmodel_from_json(const Json& j);
Json to_json(const TFragment& f);

// {"vars": r+1, "polys": [...], "target": m} over T_0..T_r.
struct ConstraintSet {
    std::size_t vars = 0;
    std::vector<DiffPoly> polys;
    std::size_t target = 0;
};
ConstraintSet constraints_from_json(const Json& j);
// {"minimal": ..., "trace": [per level]}.
Json minimal_apparent_json(const ConstraintSet& c);

Json to_json(const ReductionTrace& t);

// A functional is either {"use", "table": [{"prefix","x","out","time"}]} or a
// generator {"kind": "constant"|"bit_at"|"parity", ...}.
TTFunctional functional_from_json(const Json& j);
Json to_json(const TTFunctional& f);

struct JumpRun {
    BitString B, cjump;
    std::vector<TTFunctional> functionals;
    std::size_t E = 0;
    SearchCaps caps;
};
JumpRun jump_run_from_json(const Json& j);
Json to_json(const GammaStep& s, const BitString& segment);

MockScript mock_from_json(const Json& j);
Json to_json(const MockScript& s);

Json to_json(const HMap& h);
HMap hmap_from_json(const Json& j);
Json to_json(const Event& e);
Json to_json(const RunReport& r);

// The whole trace of a priority run: a header with the script, one line per
// event and a closing result line.
std::vector<Json> priority_trace(const MockScript& s, std::size_t max_stage, const RunResult& r);

} // namespace dcfwb
