#include "dcfwb/io.hpp"

#include "dcfwb/error.hpp"

#include <fstream>
#include <sstream>

namespace dcfwb {

namespace {

template <class T> T field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw InvalidInput(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidInput(std::string("field '") + key + "' has the wrong type");
    }
}

Edge edge_from_json(const Json& e, std::size_t nodes) {
    if (!e.is_array() || e.size() != 2)
        throw InvalidInput("an edge is a pair [a, b]");
    auto a = e[0].get<Node>(), b = e[1].get<Node>();
    if (a >= nodes || b >= nodes || a == b)
        throw InvalidInput("bad edge [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    return make_edge(a, b);
}

Json edges_json(const std::vector<Edge>& es) {
    Json out = Json::array();
    for (auto [a, b] : es)
        out.push_back({a, b});
    return out;
}

std::vector<std::string> strs(const std::vector<DiffPoly>& ps) {
    std::vector<std::string> out;
    for (const auto& p : ps)
        out.push_back(p.str());
    return out;
}

} // namespace

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidInput("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

std::vector<Json> read_jsonl_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidInput("cannot open " + path);
    std::vector<Json> out;
    std::string line;
    std::size_t k = 0;
    while (std::getline(in, line)) {
        ++k;
        if (line.empty())
            continue;
        try {
            out.push_back(Json::parse(line));
        } catch (const nlohmann::json::parse_error& e) {
            throw InvalidInput(path + ":" + std::to_string(k) + ": " + e.what());
        }
    }
    return out;
}

void write_jsonl(std::ostream& os, const Json& j) { os << j.dump() << '\n'; }

Var parse_var(const std::string& text) {
    auto vs = vars_of(parse(text));
    if (vs.size() != 1 || parse(text) != DiffPoly::var(*vs.begin()))
        throw InvalidInput("not a variable: " + text);
    return *vs.begin();
}

std::string var_name(Var v) { return DiffPoly::var(v).str(); }

Json to_json(const Graph& g) { return {{"nodes", g.node_count()}, {"edges", edges_json(g.edges())}}; }

Graph graph_from_json(const Json& j) {
    auto n = field<std::size_t>(j, "nodes");
    std::vector<Edge> es;
    for (const auto& e : field<Json>(j, "edges"))
        es.push_back(edge_from_json(e, n));
    return Graph(n, es);
}

Json to_json(const EdgeStream& s) {
    Json st = Json::array();
    for (const auto& stage : s.stages)
        st.push_back(edges_json(stage));
    return {{"nodes", s.nodes}, {"stages", st}};
}

EdgeStream stream_from_json(const Json& j) {
    if (j.contains("edges") && !j.contains("stages"))
        return single_stage(graph_from_json(j));
    EdgeStream s;
    const Json& st = field<Json>(j, "stages");
    std::size_t max_node = 0;
    for (const auto& stage : st)
        for (const auto& e : stage)
            if (e.is_array() && e.size() == 2)
                max_node = std::max({max_node, e[0].get<std::size_t>() + 1, e[1].get<std::size_t>() + 1});
    s.nodes = j.contains("nodes") ? j.at("nodes").get<std::size_t>() : max_node;
    for (const auto& stage : st) {
        std::vector<Edge> es;
        for (const auto& e : stage)
            es.push_back(edge_from_json(e, s.nodes));
        std::sort(es.begin(), es.end());
        s.stages.push_back(std::move(es));
    }
    if (!s.monotone())
        throw InvalidInput("edge stream stages are not cumulative");
    return s;
}

Json to_json(const TModel& m) {
    Json dims = Json::array();
    for (const auto& [ab, d] : m.nondefault())
        dims.push_back({ab.first, ab.second, d});
    return {{"a_count", m.a_count()}, {"dims", dims}};
}

TModel tmodel_from_json(const Json& j) {
    TModel m(field<std::size_t>(j, "a_count"));
    for (const auto& d : field<Json>(j, "dims")) {
        if (!d.is_array() || d.size() != 3)
            throw InvalidInput("a dims entry is [a, b, d]");
        auto a = d[0].get<Node>(), b = d[1].get<Node>();
        if (a >= m.a_count() || b >= m.a_count())
            throw InvalidInput("dims entry outside the A sort");
        m.set_dim(a, b, d[2].get<std::size_t>());
    }
    return m;
}

Json to_json(const TFragment& f) {
    Json pts = Json::array();
    for (std::size_t k = 0; k < f.points.size(); ++k) {
        const FPoint& p = f.points[k];
        Json succ = f.succ[k] ? Json(*f.succ[k]) : Json(nullptr);
        pts.push_back({{"a", p.a}, {"b", p.b}, {"chain", p.chain}, {"offset", p.offset}, {"succ", succ}});
    }
    return {{"a_count", f.a_count}, {"window", f.window}, {"points", pts}};
}

ConstraintSet constraints_from_json(const Json& j) {
    ConstraintSet c;
    c.vars = field<std::size_t>(j, "vars");
    c.target = field<std::size_t>(j, "target");
    if (c.target >= c.vars)
        throw InvalidInput("target must be below vars");
    for (const auto& s : field<std::vector<std::string>>(j, "polys")) {
        DiffPoly p = parse(s);
        for (const Var& v : vars_of(p))
            if (v.family != Family::T || v.index >= c.vars)
                throw InvalidInput("constraint " + s + " is not over T0..T" + std::to_string(c.vars - 1));
        c.polys.push_back(std::move(p));
    }
    return c;
}

Json minimal_apparent_json(const ConstraintSet& c) {
    std::vector<Var> order;
    for (std::size_t k = 0; k <= c.target; ++k)
        order.push_back(T(static_cast<std::uint32_t>(k)));
    TowerResult t = build_tower(c.polys, order, c.target);
    Json trace = Json::array();
    for (const auto& l : t.levels)
        trace.push_back({{"var", var_name(l.var)},
                         {"constraints", l.constraints},
                         {"minimal", l.minimal.str()},
                         {"irreducibility", to_string(l.irreducibility)},
                         {"pair_steps", l.pair_steps}});
    return {{"minimal", t.levels.back().minimal.str()}, {"trace", trace}};
}

Json to_json(const ReductionTrace& t) {
    Json steps = Json::array();
    for (const auto& s : t.steps)
        steps.push_back({{"derivative", s.derivative},
                         {"k", s.k},
                         {"multiplier", s.multiplier.str()},
                         {"quotient_term", s.quotient_term.str()},
                         {"remainder", s.remainder.str()}});
    Json q = Json::object();
    for (const auto& [k, p] : t.quotients)
        q[std::to_string(k)] = p.str();
    return {{"g", t.g.str()},
            {"h", t.h.str()},
            {"var", var_name(t.var)},
            {"initial_power", t.initial_power},
            {"separant_power", t.separant_power},
            {"quotients", q},
            {"steps", steps},
            {"raw_remainder", t.raw_remainder.str()}};
}

TTFunctional functional_from_json(const Json& j) {
    TTFunctional f;
    if (j.contains("kind")) {
        auto kind = field<std::string>(j, "kind");
        auto max_x = field<unsigned>(j, "max_x");
        unsigned time = j.value("time", 1u);
        if (kind == "constant")
            f = TTFunctional::constant(field<int>(j, "value"), max_x, time);
        else if (kind == "bit_at")
            f = TTFunctional::bit_at(field<unsigned>(j, "pos"), max_x, time);
        else if (kind == "parity")
            f = TTFunctional::parity(field<unsigned>(j, "from"), field<unsigned>(j, "use"), max_x, time);
        else
            throw InvalidInput("unknown functional kind " + kind);
    } else {
        f.use = field<unsigned>(j, "use");
        for (const auto& e : field<Json>(j, "table"))
            f.table[{field<std::string>(e, "prefix"), field<unsigned>(e, "x")}] =
                TTFunctional::Entry{field<int>(e, "out"), e.value("time", 0u)};
    }
    f.validate();
    return f;
}

Json to_json(const TTFunctional& f) {
    Json table = Json::array();
    for (const auto& [k, e] : f.table)
        table.push_back({{"prefix", k.first}, {"x", k.second}, {"out", e.out}, {"time", e.time}});
    return {{"use", f.use}, {"table", table}};
}

JumpRun jump_run_from_json(const Json& j) {
    JumpRun r;
    r.B = field<std::string>(j, "B");
    r.cjump = field<std::string>(j, "Cjump");
    r.E = field<std::size_t>(j, "E");
    if (!is_bits(r.B) || !is_bits(r.cjump))
        throw InvalidInput("B and Cjump are bit strings");
    if (r.cjump.size() < r.E)
        throw InvalidInput("Cjump has fewer than E bits");
    for (const auto& f : field<Json>(j, "functionals"))
        r.functionals.push_back(functional_from_json(f));
    if (r.functionals.size() < r.E)
        throw InvalidInput("fewer than E functionals");
    if (j.contains("caps")) {
        const Json& c = j.at("caps");
        r.caps.prefix = c.value("prefix", r.caps.prefix);
        r.caps.x = c.value("x", r.caps.x);
        r.caps.t = c.value("t", r.caps.t);
    }
    return r;
}

Json to_json(const GammaStep& s, const BitString& segment) {
    Json j = {{"stage", s.stage}, {"kind", s.odd ? "jump" : "split"}};
    if (s.odd)
        j["bit"] = s.bit;
    else if (s.split)
        j["split"] = {{"sigma", s.split->sigma},
                      {"tau", s.split->tau},
                      {"x", s.split->x},
                      {"t", s.split->t},
                      {"took", s.took_sigma ? "sigma" : "tau"}};
    else
        j["split"] = nullptr;
    j["gamma"] = segment;
    return j;
}

MockScript mock_from_json(const Json& j) {
    MockScript s;
    s.horizon = j.value("horizon", s.horizon);
    for (const auto& e : field<Json>(j, "elements")) {
        ScriptedElement el;
        el.n = field<std::size_t>(e, "n");
        for (const auto& g : field<Json>(e, "guesses"))
            el.guesses.push_back(Guess{field<std::size_t>(g, "from_stage"), parse(field<std::string>(g, "p"))});
        if (el.guesses.empty())
            throw InvalidInput("element " + std::to_string(el.n) + " has no guesses");
        el.truth = e.contains("truth") ? parse(e.at("truth").get<std::string>()) : el.guesses.back().p;
        s.elements.push_back(std::move(el));
    }
    return s;
}

Json to_json(const MockScript& s) {
    Json els = Json::array();
    for (const auto& e : s.elements) {
        Json gs = Json::array();
        for (const auto& g : e.guesses)
            gs.push_back({{"from_stage", g.from_stage}, {"p", g.p.str()}});
        els.push_back({{"n", e.n}, {"guesses", gs}, {"truth", e.truth.str()}});
    }
    return {{"elements", els}, {"horizon", s.horizon}};
}

Json to_json(const HMap& h) {
    Json j = Json::object();
    for (auto [n, m] : h)
        j[std::to_string(n)] = m;
    return j;
}

HMap hmap_from_json(const Json& j) {
    if (!j.is_object())
        throw InvalidInput("h is an object");
    HMap h;
    for (const auto& [k, v] : j.items()) {
        std::size_t pos = 0;
        std::size_t n = std::stoul(k, &pos);
        if (pos != k.size())
            throw InvalidInput("h key " + k + " is not an index");
        h[n] = v.get<std::uint32_t>();
    }
    return h;
}

Json to_json(const Event& e) {
    return {{"stage", e.stage}, {"substage", e.substage}, {"action", e.action},
            {"h", to_json(e.h)},  {"U_added", strs(e.U_added)}, {"note", e.note}};
}

Json to_json(const RunReport& r) {
    Json frag = Json::array();
    for (auto [m, n] : r.fragment)
        frag.push_back({m, n});
    return {{"ok", r.ok()},
            {"aborted", r.aborted},
            {"abort_reason", r.abort_reason},
            {"converged", r.converged},
            {"bijective", r.bijective},
            {"unique_closure", r.unique_closure},
            {"isomorphic", r.isomorphic},
            {"witness", r.witness},
            {"injury_bounded", r.injury_bounded},
            {"stages", r.stages},
            {"fragment", frag},
            {"problems", r.problems},
            {"injury", r.injury}};
}

std::vector<Json> priority_trace(const MockScript& s, std::size_t max_stage, const RunResult& r) {
    std::vector<Json> out;
    out.push_back({{"kind", "header"}, {"max_stage", max_stage}, {"mock", to_json(s)}});
    for (const auto& e : r.log) {
        Json j = {{"kind", "event"}};
        j.update(to_json(e));
        out.push_back(std::move(j));
    }
    out.push_back({{"kind", "result"}, {"U", strs(r.U)}, {"h", to_json(r.h)}, {"report", to_json(r.report)}});
    return out;
}

} // namespace dcfwb
