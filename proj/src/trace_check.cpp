#include "dcfwb/trace_check.hpp"

#include "dcfwb/error.hpp"

#include <set>

namespace dcfwb {

namespace {

bool has(const Json& j, const char* key, Json::value_t t) {
    if (!j.is_object() || !j.contains(key))
        return false;
    const Json& v = j.at(key);
    if (t == Json::value_t::number_unsigned)
        return v.is_number_unsigned();
    return v.type() == t;
}

std::string where(std::size_t k) { return "line " + std::to_string(k + 1) + ": "; }

} // namespace

std::vector<std::string> check_priority_trace(const std::vector<Json>& lines, bool replay, ReplayCache* cache) {
    using T = Json::value_t;
    std::vector<std::string> bad;
    if (lines.size() < 2)
        return {"trace needs a header and a result line"};
    const Json& head = lines.front();
    const Json& tail = lines.back();
    if (head.value("kind", "") != "header" || !has(head, "mock", T::object) ||
        !has(head, "max_stage", T::number_unsigned))
        return {where(0) + "malformed header"};
    if (tail.value("kind", "") != "result" || !has(tail, "U", T::array) || !has(tail, "h", T::object) ||
        !has(tail, "report", T::object))
        return {where(lines.size() - 1) + "malformed result line"};

    std::vector<std::string> U{"Y0", "Y1 - 1"};
    std::set<std::string> inU(U.begin(), U.end());
    std::size_t last_stage = 0;
    Json last_h = Json::object();
    for (std::size_t k = 1; k + 1 < lines.size(); ++k) {
        const Json& e = lines[k];
        if (e.value("kind", "") != "event" || !has(e, "stage", T::number_unsigned) ||
            !has(e, "substage", T::string) || !has(e, "action", T::string) || !has(e, "h", T::object) ||
            !has(e, "U_added", T::array) || !has(e, "note", T::string)) {
            bad.push_back(where(k) + "malformed event");
            continue;
        }
        std::size_t st = e["stage"].get<std::size_t>();
        if (st < last_stage)
            bad.push_back(where(k) + "stage goes backwards");
        last_stage = st;
        try {
            HMap h = hmap_from_json(e["h"]);
            std::set<std::uint32_t> img;
            for (auto [n, m] : h)
                if (!img.insert(m).second)
                    bad.push_back(where(k) + "h is not injective at y" + std::to_string(m));
        } catch (const std::exception&) {
            bad.push_back(where(k) + "h is not a map of indices");
        }
        for (const auto& q : e["U_added"]) {
            if (!q.is_string()) {
                bad.push_back(where(k) + "U_added entry is not a string");
                continue;
            }
            try {
                std::string canon = parse(q.get<std::string>()).str();
                if (canon != q.get<std::string>())
                    bad.push_back(where(k) + "U_added entry not in canonical form: " + q.get<std::string>());
                if (inU.insert(canon).second)
                    U.push_back(canon);
            } catch (const Error&) {
                bad.push_back(where(k) + "U_added entry does not parse: " + q.get<std::string>());
            }
        }
        last_h = e["h"];
    }
    std::vector<std::string> finalU;
    for (const auto& q : tail["U"])
        finalU.push_back(q.is_string() ? q.get<std::string>() : q.dump());
    if (finalU != U)
        bad.push_back("final U is not the accumulated additions");
    if (tail["h"] != last_h)
        bad.push_back("final h differs from the last event");

    const Json& rep = tail["report"];
    const char* flags[] = {"aborted", "converged", "bijective", "unique_closure", "isomorphic", "witness",
                           "injury_bounded", "ok"};
    for (const char* f : flags)
        if (!has(rep, f, T::boolean))
            bad.push_back(std::string("report flag ") + f + " missing");
    if (bad.empty()) {
        bool ok = !rep["aborted"].get<bool>();
        for (const char* f : {"converged", "bijective", "unique_closure", "isomorphic", "witness", "injury_bounded"})
            ok = ok && rep[f].get<bool>();
        if (rep["ok"].get<bool>() != ok)
            bad.push_back("report ok flag disagrees with its parts");
        if (!rep["ok"].get<bool>())
            bad.push_back("run did not verify: " + rep.value("abort_reason", std::string()) +
                          (rep.contains("problems") && !rep["problems"].empty() ? rep["problems"][0].dump() : ""));
        try {
            HMap h = hmap_from_json(tail["h"]);
            for (const auto& mn : rep.value("fragment", Json::array())) {
                auto m = mn.at(0).get<std::uint32_t>();
                auto n = mn.at(1).get<std::size_t>();
                if (!h.count(n) || h.at(n) != m)
                    bad.push_back("fragment pair (" + std::to_string(m) + ", " + std::to_string(n) +
                                  ") is not in h");
            }
        } catch (const std::exception&) {
            bad.push_back("result h or fragment is malformed");
        }
    }

    if (replay) {
        std::string key = head.dump();
        std::vector<Json> again;
        if (cache && cache->count(key)) {
            again = cache->at(key);
        } else {
            MockScript s;
            try {
                s = mock_from_json(head["mock"]);
            } catch (const Error& e) {
                bad.push_back(std::string("header mock: ") + e.what());
                return bad;
            }
            std::size_t max_stage = head["max_stage"].get<std::size_t>();
            MockLowField K(s);
            again = priority_trace(s, max_stage, run_to_convergence(K, max_stage));
            if (cache)
                (*cache)[key] = again;
        }
        if (again.size() != lines.size())
            bad.push_back("replay has " + std::to_string(again.size()) + " lines, trace has " +
                          std::to_string(lines.size()));
        for (std::size_t k = 0; k < std::min(again.size(), lines.size()); ++k)
            if (again[k] != lines[k]) {
                bad.push_back(where(k) + "differs from replay");
                if (bad.size() > 20)
                    break;
            }
    }
    return bad;
}

} // namespace dcfwb
