#ifndef DRSDDP_IO_HPP_
#define DRSDDP_IO_HPP_

// Instance files are a single JSON document. The canonical (serialized) form
// stores per-scenario stage data densely under "scenarios"; the parser also
// accepts the flat convenience form where cost/rhs entries are either shared
// scalars/arrays or nested per-scenario arrays. Numeric fields round-trip
// exactly (shortest-representation doubles, "inf" strings for infinities).

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "drsddp/model.hpp"

namespace drsddp {

using nlohmann::json;

namespace detail {

inline json bound_to_json(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    return v;
}

inline double bound_from_json(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
        throw ModelError("unrecognized bound string: " + s);
    }
    return j.get<double>();
}

inline std::string rel_to_string(Relation r) {
    switch (r) {
        case Relation::le: return "<=";
        case Relation::eq: return "=";
        case Relation::ge: return ">=";
    }
    return "?";
}

inline Relation rel_from_string(const std::string& s) {
    if (s == "<=") return Relation::le;
    if (s == "=" || s == "==") return Relation::eq;
    if (s == ">=") return Relation::ge;
    throw ModelError("unrecognized row relation: " + s);
}

inline std::vector<double> vec_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw ModelError(std::string("expected an array for ") + what);
    std::vector<double> v;
    for (const auto& e : j) v.push_back(e.get<double>());
    return v;
}

// Accepts either a flat array (shared across scenarios) or an array of
// per-scenario arrays, normalized to dense per-scenario storage.
inline std::vector<std::vector<double>> per_scenario_vectors(const json& j, int n_scen,
                                                             const char* what) {
    if (!j.is_array()) throw ModelError(std::string("expected an array for ") + what);
    std::vector<std::vector<double>> out;
    if (!j.empty() && j.front().is_array()) {
        for (const auto& e : j) out.push_back(vec_from_json(e, what));
        if (static_cast<int>(out.size()) != n_scen)
            throw ModelError(std::string(what) + ": per-scenario count mismatch");
    } else {
        out.assign(n_scen, vec_from_json(j, what));
    }
    return out;
}

inline json row_to_json(const StageRow& r) {
    json j;
    j["x"] = r.coef_x;
    j["y"] = r.coef_y;
    j["xprev"] = r.coef_xprev;
    j["rel"] = rel_to_string(r.rel);
    j["rhs"] = r.rhs;
    return j;
}

inline StageRow row_from_json(const json& j, int dx, int dy, int dp, int scenario) {
    StageRow r;
    r.coef_x = j.contains("x") ? vec_from_json(j.at("x"), "row x") : std::vector<double>(dx, 0.0);
    r.coef_y = j.contains("y") ? vec_from_json(j.at("y"), "row y") : std::vector<double>(dy, 0.0);
    r.coef_xprev =
        j.contains("xprev") ? vec_from_json(j.at("xprev"), "row xprev") : std::vector<double>(dp, 0.0);
    r.rel = rel_from_string(j.at("rel").get<std::string>());
    const json& rhs = j.at("rhs");
    if (rhs.is_array()) r.rhs = rhs.at(scenario).get<double>();
    else r.rhs = rhs.get<double>();
    return r;
}

}  // namespace detail

inline json ambiguity_to_json(const AmbiguitySpec& a) {
    json j;
    switch (a.kind) {
        case AmbiguitySpec::Kind::singleton: j["kind"] = "singleton"; break;
        case AmbiguitySpec::Kind::wasserstein_finite: j["kind"] = "wasserstein_finite"; break;
        case AmbiguitySpec::Kind::wasserstein_dd_continuous:
            j["kind"] = "wasserstein_dd_continuous";
            break;
    }
    j["epsilon"] = a.epsilon;
    j["norm"] = a.norm;
    if (a.kind == AmbiguitySpec::Kind::wasserstein_dd_continuous) {
        j["base"] = a.dd_base;
        j["slope"] = a.dd_slope;
        j["box_lower"] = a.box_lower;
        j["box_upper"] = a.box_upper;
    }
    return j;
}

inline AmbiguitySpec ambiguity_from_json(const json& j) {
    AmbiguitySpec a;
    const std::string kind = j.value("kind", "singleton");
    if (kind == "singleton") a.kind = AmbiguitySpec::Kind::singleton;
    else if (kind == "wasserstein_finite") a.kind = AmbiguitySpec::Kind::wasserstein_finite;
    else if (kind == "wasserstein_dd_continuous")
        a.kind = AmbiguitySpec::Kind::wasserstein_dd_continuous;
    else throw ModelError("unrecognized ambiguity kind: " + kind);
    a.epsilon = j.value("epsilon", 0.0);
    a.norm = j.value("norm", std::string("l1"));
    if (a.kind == AmbiguitySpec::Kind::wasserstein_dd_continuous) {
        a.dd_base = j.value("base", 0.0);
        if (j.contains("slope")) a.dd_slope = detail::vec_from_json(j.at("slope"), "slope");
        a.box_lower = detail::vec_from_json(j.at("box_lower"), "box_lower");
        a.box_upper = detail::vec_from_json(j.at("box_upper"), "box_upper");
    }
    a.validate();
    return a;
}

inline json model_to_json(const MultistageModel& m) {
    json root;
    root["horizon"] = m.horizon;
    root["x0"] = m.x0;
    if (m.report_sign != 1.0) root["report_sign"] = m.report_sign;
    root["ambiguity"] = ambiguity_to_json(m.ambiguity);
    json stages = json::array();
    for (const auto& st : m.stages) {
        json s;
        s["t"] = st.t;
        s["num_state"] = st.dim_x;
        s["num_local"] = st.dim_y;
        s["y_binary"] = st.y_binary;
        json ylo = json::array(), yhi = json::array();
        for (double v : st.y_lower) ylo.push_back(detail::bound_to_json(v));
        for (double v : st.y_upper) yhi.push_back(detail::bound_to_json(v));
        s["y_lower"] = ylo;
        s["y_upper"] = yhi;
        if (st.rhs_is_omega) s["rhs_is_omega"] = true;
        json scens = json::array();
        for (std::size_t i = 0; i < st.data.size(); ++i) {
            json sc;
            sc["cost_x"] = st.data[i].cost_x;
            sc["cost_y"] = st.data[i].cost_y;
            json rows = json::array();
            for (const auto& r : st.data[i].rows) rows.push_back(detail::row_to_json(r));
            sc["rows"] = rows;
            if (st.disjunctive()) {
                json hs = json::array();
                for (const auto& h : st.disjuncts[i]) {
                    json hj;
                    json hrows = json::array();
                    for (const auto& r : h.rows) hrows.push_back(detail::row_to_json(r));
                    hj["rows"] = hrows;
                    hs.push_back(hj);
                }
                sc["disjuncts"] = hs;
            }
            scens.push_back(sc);
        }
        s["scenarios"] = scens;
        stages.push_back(s);
    }
    root["stages"] = stages;
    json sups = json::array();
    for (int t = 1; t <= m.horizon; ++t) {
        const auto& sp = m.support(t);
        if (t == 1 && (sp.realizations.empty() || sp.realizations.front().empty())) continue;
        json s;
        s["stage"] = t;
        s["realizations"] = sp.realizations;
        s["reference_probs"] = sp.reference_probs;
        sups.push_back(s);
    }
    root["supports"] = sups;
    return root;
}

inline MultistageModel model_from_json(const json& root) {
    MultistageModel m;
    m.horizon = root.at("horizon").get<int>();
    if (m.horizon < 1) throw ModelError("horizon must be at least 1");
    m.x0 = detail::vec_from_json(root.at("x0"), "x0");
    m.report_sign = root.value("report_sign", 1.0);
    if (root.contains("ambiguity")) m.ambiguity = ambiguity_from_json(root.at("ambiguity"));

    // Supports first so stage parsing knows the scenario counts.
    m.supports.assign(m.horizon, ScenarioSupport{{{}}, {1.0}});
    if (root.contains("supports"))
        for (const auto& s : root.at("supports")) {
            int t = s.at("stage").get<int>();
            if (t < 1 || t > m.horizon) throw ModelError("support references an unknown stage");
            ScenarioSupport sp;
            for (const auto& w : s.at("realizations"))
                sp.realizations.push_back(detail::vec_from_json(w, "realization"));
            sp.reference_probs = detail::vec_from_json(s.at("reference_probs"), "reference_probs");
            sp.validate();
            if (t == 1 && sp.size() != 1) throw ModelError("first stage support must be a singleton");
            m.supports[t - 1] = std::move(sp);
        }

    if (!root.contains("stages")) throw ModelError("instance is missing the stages array");
    int prev_dx = static_cast<int>(m.x0.size());
    for (const auto& s : root.at("stages")) {
        StageTemplate st;
        st.t = static_cast<int>(m.stages.size()) + 1;
        if (s.contains("t") && s.at("t").get<int>() != st.t)
            throw ModelError("stage entries must appear in order of t");
        st.dim_x = s.at("num_state").get<int>();
        st.dim_y = s.at("num_local").get<int>();
        st.dim_xprev = prev_dx;
        prev_dx = st.dim_x;
        st.y_binary.assign(st.dim_y, false);
        if (s.contains("y_binary"))
            for (int j = 0; j < st.dim_y; ++j) st.y_binary[j] = s.at("y_binary").at(j).get<bool>();
        st.y_lower.assign(st.dim_y, 0.0);
        st.y_upper.assign(st.dim_y, kInf);
        if (s.contains("y_lower"))
            for (int j = 0; j < st.dim_y; ++j) st.y_lower[j] = detail::bound_from_json(s.at("y_lower").at(j));
        if (s.contains("y_upper"))
            for (int j = 0; j < st.dim_y; ++j) st.y_upper[j] = detail::bound_from_json(s.at("y_upper").at(j));
        for (int j = 0; j < st.dim_y; ++j)
            if (st.y_binary[j]) {
                st.y_lower[j] = std::max(st.y_lower[j], 0.0);
                st.y_upper[j] = std::min(st.y_upper[j], 1.0);
            }
        st.rhs_is_omega = s.value("rhs_is_omega", false);
        const int n_scen = m.supports[st.t - 1].size();

        auto parse_scenario = [&](const json& sc, int i) {
            StageData d;
            d.cost_x = detail::vec_from_json(sc.at("cost_x"), "cost_x");
            d.cost_y = sc.contains("cost_y") ? detail::vec_from_json(sc.at("cost_y"), "cost_y")
                                             : std::vector<double>{};
            if (d.cost_y.empty()) d.cost_y.assign(st.dim_y, 0.0);
            if (sc.contains("rows"))
                for (const auto& rj : sc.at("rows"))
                    d.rows.push_back(detail::row_from_json(rj, st.dim_x, st.dim_y, st.dim_xprev, i));
            if (st.rhs_is_omega)
                for (std::size_t r = 0; r < d.rows.size(); ++r)
                    d.rows[r].rhs = m.supports[st.t - 1].realizations[i][r];
            return d;
        };

        if (s.contains("scenarios")) {
            const auto& scens = s.at("scenarios");
            if (static_cast<int>(scens.size()) != n_scen)
                throw ModelError("stage scenario count does not match its support");
            for (int i = 0; i < n_scen; ++i) {
                st.data.push_back(parse_scenario(scens.at(i), i));
                if (scens.at(i).contains("disjuncts")) {
                    std::vector<Disjunct> hs;
                    for (const auto& hj : scens.at(i).at("disjuncts")) {
                        Disjunct h;
                        for (const auto& rj : hj.at("rows"))
                            h.rows.push_back(
                                detail::row_from_json(rj, st.dim_x, st.dim_y, st.dim_xprev, i));
                        hs.push_back(std::move(h));
                    }
                    st.disjuncts.push_back(std::move(hs));
                }
            }
        } else {
            // Flat convenience form: shared arrays with optional per-scenario
            // nesting for costs and per-scenario rhs arrays inside rows.
            auto cx = detail::per_scenario_vectors(s.at("cost_x"), n_scen, "cost_x");
            auto cy = s.contains("cost_y")
                          ? detail::per_scenario_vectors(s.at("cost_y"), n_scen, "cost_y")
                          : std::vector<std::vector<double>>(n_scen, std::vector<double>(st.dim_y, 0.0));
            for (int i = 0; i < n_scen; ++i) {
                StageData d;
                d.cost_x = cx[i];
                d.cost_y = cy[i];
                if (s.contains("rows"))
                    for (const auto& rj : s.at("rows"))
                        d.rows.push_back(detail::row_from_json(rj, st.dim_x, st.dim_y, st.dim_xprev, i));
                if (st.rhs_is_omega)
                    for (std::size_t r = 0; r < d.rows.size(); ++r)
                        d.rows[r].rhs = m.supports[st.t - 1].realizations[i][r];
                st.data.push_back(std::move(d));
                if (s.contains("disjuncts")) {
                    std::vector<Disjunct> hs;
                    for (const auto& hj : s.at("disjuncts")) {
                        Disjunct h;
                        for (const auto& rj : hj.at("rows"))
                            h.rows.push_back(
                                detail::row_from_json(rj, st.dim_x, st.dim_y, st.dim_xprev, i));
                        hs.push_back(std::move(h));
                    }
                    st.disjuncts.push_back(std::move(hs));
                }
            }
        }
        m.stages.push_back(std::move(st));
    }
    if (static_cast<int>(m.stages.size()) != m.horizon)
        throw ModelError("stage count does not match the horizon");
    m.validate();
    return m;
}

struct InstanceFile {
    MultistageModel model;
    json family;  // optional generator metadata, passed through verbatim
};

inline InstanceFile load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open instance file: " + path);
    json root;
    try {
        in >> root;
    } catch (const json::exception& e) {
        throw ModelError("instance file is not valid JSON (" + std::string(e.what()) + ")");
    }
    InstanceFile f;
    f.model = model_from_json(root);
    if (root.contains("family")) f.family = root.at("family");
    return f;
}

inline void save_instance(const std::string& path, const MultistageModel& m,
                          const json& family = json()) {
    json root = model_to_json(m);
    if (!family.is_null()) root["family"] = family;
    std::ofstream out(path);
    if (!out) throw ModelError("cannot open output file: " + path);
    out << root.dump(2) << "\n";
}

}  // namespace drsddp

#endif  // DRSDDP_IO_HPP_
