#include "dcfwb/batch.hpp"
#include "dcfwb/enimodel.hpp"
#include "dcfwb/error.hpp"
#include "dcfwb/graphcode.hpp"
#include "dcfwb/io.hpp"
#include "dcfwb/trace_check.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace dcfwb;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUnsupported = 2, kUsage = 64 };

struct RunCaps {
    SearchCaps search;
    std::size_t max_stage = 0;
};

// DCFWB_CAPS="prefix=64,x=32,t=256,max_stage=200"; the polynomial keys are read by the library.
RunCaps run_caps_from_env() {
    RunCaps c;
    const char* env = std::getenv("DCFWB_CAPS");
    if (!env)
        return c;
    std::stringstream ss(env);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("DCFWB_CAPS entry without '=': " + item);
        std::string key = item.substr(0, eq);
        unsigned long v = 0;
        try {
            v = std::stoul(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw InvalidInput("DCFWB_CAPS value is not a number: " + item);
        }
        if (key == "prefix")
            c.search.prefix = static_cast<unsigned>(v);
        else if (key == "x")
            c.search.x = static_cast<unsigned>(v);
        else if (key == "t")
            c.search.t = static_cast<unsigned>(v);
        else if (key == "max_stage")
            c.max_stage = v;
        else if (key != "deriv" && key != "degree" && key != "monomials")
            throw InvalidInput("unknown DCFWB_CAPS key " + key);
    }
    return c;
}

struct Opts {
    std::string in, out, trace, direction, mock, action;
    std::vector<std::string> mocks, traces;
    std::uint64_t seed = 1;
    std::size_t max_stage = 0;
    int jobs = 1;
    long window = 2;
    std::size_t stages = 4;
};

void emit(const Opts& o, const std::string& text) {
    if (o.out.empty() || o.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out);
    if (!f)
        throw InvalidInput("cannot write " + o.out);
    f << text;
}

void emit(const Opts& o, const Json& j) { emit(o, j.dump(2) + "\n"); }

void write_lines(const std::string& path, const std::vector<Json>& lines) {
    std::ofstream f(path);
    if (!f)
        throw InvalidInput("cannot write " + path);
    for (const auto& j : lines)
        write_jsonl(f, j);
}

void need(const std::string& v, const char* flag) {
    if (v.empty())
        throw CLI::RequiredError(flag);
}

int cmd_minpoly(const Opts& o) {
    need(o.in, "--in");
    Json r = minimal_apparent_json(constraints_from_json(read_json_file(o.in)));
    if (!o.out.empty())
        emit(o, r);
    else
        std::cout << r["minimal"].get<std::string>() << "\n";
    return kOk;
}

int cmd_ritt_reduce(const Opts& o) {
    need(o.in, "--in");
    Json j = read_json_file(o.in);
    std::string mode = j.value("mode", "partial");
    if (!j.contains("var"))
        throw InvalidInput("missing field 'var'");
    Var v = parse_var(j["var"].get<std::string>());
    Json r;
    if (mode == "closure") {
        std::vector<DiffPoly> V;
        for (const auto& s : j.at("polys"))
            V.push_back(parse(s.get<std::string>()));
        ClosureResult c = closure(V, v);
        r = {{"min", c.min.str()}, {"inconsistent", c.inconsistent}, {"pair_steps", c.pair_steps},
             {"descents", c.descents}};
    } else {
        if (!j.contains("g") || !j.contains("h"))
            throw InvalidInput("fields 'g' and 'h' are required");
        DiffPoly g = parse(j["g"].get<std::string>()), h = parse(j["h"].get<std::string>());
        if (mode == "pair") {
            r = {{"gcd", reduce_pair(g, h, v).str()}};
        } else if (mode == "partial") {
            PartialReduction p = partial_reduce(g, h, v);
            r = {{"remainder", p.remainder.str()}, {"trace", to_json(p.trace)}};
        } else {
            throw InvalidInput("mode is partial, pair or closure");
        }
    }
    emit(o, r);
    return kOk;
}

void check_direction(const Opts& o) {
    if (o.direction != "comp2enum" && o.direction != "enum2comp")
        throw CLI::ValidationError("--direction", "must be comp2enum or enum2comp");
}

int cmd_encode_graph(const Opts& o) {
    need(o.in, "--in");
    check_direction(o);
    Json j = read_json_file(o.in);
    if (o.direction == "comp2enum")
        emit(o, to_json(encode_comp_to_enum(graph_from_json(j))));
    else
        emit(o, to_json(encode_enum_to_comp(stream_from_json(j))));
    return kOk;
}

int cmd_decode_graph(const Opts& o) {
    need(o.in, "--in");
    check_direction(o);
    Json j = read_json_file(o.in);
    if (o.direction == "comp2enum") {
        // A plain graph is enumerated in a seeded random order first.
        EdgeStream s;
        if (j.contains("stages")) {
            s = stream_from_json(j);
        } else {
            std::mt19937_64 rng(o.seed);
            s = random_stream(graph_from_json(j), o.stages, rng);
        }
        DecodeResult d = decode_enum_to_comp(s);
        Json r = to_json(d.graph);
        r["coding"] = d.coding;
        r["undecided"] = d.undecided;
        r["stages_used"] = d.stages_used;
        r["incomplete"] = d.incomplete;
        emit(o, r);
        return d.incomplete || d.undecided ? kFailed : kOk;
    }
    emit(o, to_json(decode_comp_to_enum(graph_from_json(j))));
    return kOk;
}

int cmd_eni(const Opts& o) {
    need(o.in, "--in");
    Json j = read_json_file(o.in);
    if (o.action == "encode") {
        emit(o, to_json(encode_graph(graph_from_json(j))));
        return kOk;
    }
    TModel m = tmodel_from_json(j);
    if (o.action == "decode") {
        emit(o, to_json(decode_graph(m)));
        return kOk;
    }
    if (o.action == "materialize") {
        TFragment f = materialize(m, o.window);
        auto bad = check_axioms(f, m);
        Json r = to_json(f);
        r["axiom_violations"] = bad;
        emit(o, r);
        for (const auto& b : bad)
            std::cerr << "axiom: " << b << "\n";
        return bad.empty() ? kOk : kFailed;
    }
    throw CLI::ValidationError("eni", "action is encode, decode or materialize");
}

int cmd_jump_lab(const Opts& o, const RunCaps& caps) {
    need(o.in, "--in");
    Json j = read_json_file(o.in);
    JumpRun run = jump_run_from_json(j);
    if (!j.contains("caps"))
        run.caps = caps.search;
    GammaTrace tr = build_gamma(run.B, run.cjump, run.functionals, run.E, run.caps);
    std::vector<Json> lines;
    for (std::size_t k = 0; k < tr.steps.size(); ++k)
        lines.push_back(to_json(tr.steps[k], tr.segments[tr.steps[k].stage]));
    const BitString& D = tr.final();
    std::vector<std::string> problems = check_diagonalization(tr, run.functionals, run.B, D);
    Json rec = Json::array();
    for (std::size_t e = 0; e < run.E; ++e) {
        int bit = recover_jump_bit(tr, run.functionals, D, e, run.caps);
        rec.push_back(bit);
        if (bit != run.cjump[e] - '0')
            problems.push_back("jump bit " + std::to_string(e) + " recovered as " + std::to_string(bit));
    }
    Json result = {{"kind", "result"}, {"D", D}, {"exists", tr.exists}, {"recovered", rec}, {"problems", problems}};
    lines.push_back(result);
    if (!o.trace.empty())
        write_lines(o.trace, lines);
    emit(o, result);
    for (const auto& p : problems)
        std::cerr << p << "\n";
    return problems.empty() ? kOk : kFailed;
}

int cmd_simulate(Opts o, const RunCaps& caps) {
    if (!o.mock.empty())
        o.mocks.insert(o.mocks.begin(), o.mock);
    if (o.mocks.empty())
        throw CLI::RequiredError("--mock");
    std::size_t max_stage = o.max_stage ? o.max_stage : caps.max_stage;
    std::vector<MockScript> scripts;
    for (const auto& m : o.mocks)
        scripts.push_back(mock_from_json(read_json_file(m)));
    std::vector<RunResult> rs = run_scenarios(scripts, o.jobs, max_stage);
    int code = kOk;
    Json summary = Json::array();
    for (std::size_t i = 0; i < rs.size(); ++i) {
        auto lines = priority_trace(scripts[i], max_stage, rs[i]);
        if (!o.trace.empty()) {
            std::string path = o.trace;
            if (rs.size() > 1) {
                std::filesystem::create_directories(o.trace);
                path = (std::filesystem::path(o.trace) / std::filesystem::path(o.mocks[i]).stem()).string() + ".jsonl";
            }
            write_lines(path, lines);
        }
        Json rep = lines.back()["report"];
        summary.push_back({{"mock", o.mocks[i]}, {"report", rep}});
        if (rs[i].report.aborted) {
            std::cerr << o.mocks[i] << ": aborted: " << rs[i].report.abort_reason << "\n";
            code = std::max(code, static_cast<int>(kUnsupported));
        } else if (!rs[i].report.ok()) {
            for (const auto& p : rs[i].report.problems)
                std::cerr << o.mocks[i] << ": " << p << "\n";
            code = code == kOk ? kFailed : code;
        }
    }
    emit(o, rs.size() == 1 ? summary[0]["report"] : summary);
    return code;
}

int cmd_verify(Opts o) {
    if (!o.trace.empty())
        o.traces.insert(o.traces.begin(), o.trace);
    if (o.traces.empty())
        throw CLI::RequiredError("--trace");
    std::vector<std::vector<Json>> all;
    for (const auto& t : o.traces)
        all.push_back(read_jsonl_file(t));
    std::vector<std::vector<std::string>> bad(all.size());
    long n = static_cast<long>(all.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(o.jobs > 0 ? o.jobs : 1)
    for (long i = 0; i < n; ++i) {
        try {
            bad[i] = check_priority_trace(all[i]);
        } catch (const std::exception& e) {
            bad[i] = {std::string("replay failed: ") + e.what()};
        }
    }
    int code = kOk;
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (const auto& b : bad[i])
            std::cerr << o.traces[i] << ": " << b << "\n";
        if (!bad[i].empty())
            code = kFailed;
        else
            std::cout << o.traces[i] << ": ok\n";
    }
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dcfwb: differential closure, graph codings, jump inversion and the priority construction"};
    app.require_subcommand(1);
    Opts o;

    auto* minpoly = app.add_subcommand("minpoly", "least-rank consequence of a constraint set");
    auto* ritt = app.add_subcommand("ritt-reduce", "partial reduction, pairwise reduction or closure");
    auto* enc = app.add_subcommand("encode-graph", "graph coding gadgets");
    auto* dec = app.add_subcommand("decode-graph", "recover a graph from its coding");
    auto* eni = app.add_subcommand("eni", "fiber-dimension model: encode, decode, materialize");
    auto* jump = app.add_subcommand("jump-lab", "jump inversion run with recovery check");
    auto* sim = app.add_subcommand("simulate-priority", "run the priority construction against a mock");
    auto* ver = app.add_subcommand("verify", "replay a priority trace and re-check it");

    for (auto* c : {minpoly, ritt, enc, dec, eni, jump})
        c->add_option("--in", o.in, "input JSON");
    for (auto* c : {minpoly, ritt, enc, dec, eni, jump, sim})
        c->add_option("--out", o.out, "output file (default stdout)");
    for (auto* c : {enc, dec})
        c->add_option("--direction", o.direction, "comp2enum or enum2comp")->required();
    dec->add_option("--seed", o.seed, "enumeration order for a plain graph");
    dec->add_option("--stages", o.stages, "stages of that enumeration");
    eni->add_option("action", o.action, "encode, decode or materialize")->required();
    eni->add_option("--window", o.window, "chain window for materialize");
    jump->add_option("--trace", o.trace, "JSON lines, one per stage");
    sim->add_option("--mock", o.mocks, "mock script JSON (repeatable)");
    sim->add_option("--trace", o.trace, "trace file, or a directory for several mocks");
    sim->add_option("--max-stage", o.max_stage, "stages to run (default the horizon)");
    sim->add_option("--seed", o.seed, "unused by scripted mocks; recorded for reproducibility");
    for (auto* c : {sim, ver})
        c->add_option("--jobs", o.jobs, "independent runs in parallel");
    ver->add_option("--trace", o.traces, "trace to verify (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        RunCaps caps = run_caps_from_env();
        if (*minpoly)
            return cmd_minpoly(o);
        if (*ritt)
            return cmd_ritt_reduce(o);
        if (*enc)
            return cmd_encode_graph(o);
        if (*dec)
            return cmd_decode_graph(o);
        if (*eni)
            return cmd_eni(o);
        if (*jump)
            return cmd_jump_lab(o, caps);
        if (*sim)
            return cmd_simulate(o, caps);
        if (*ver)
            return cmd_verify(o);
    } catch (const CLI::Error& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return kUsage;
    } catch (const Unsupported& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kUnsupported;
    } catch (const TowerLimitation& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kUnsupported;
    } catch (const Horizon& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kUnsupported;
    } catch (const CapOverflow& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kUnsupported;
    } catch (const InvalidInput& e) {
        std::cerr << "input: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "input: " << e.what() << "\n";
        return kUsage;
    } catch (const Inconsistent& e) {
        std::cerr << "inconsistent: " << e.what() << "\n";
        return kFailed;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
