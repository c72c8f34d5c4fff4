#include "crawlq/model_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "crawlq/error.hpp"
#include "json.hpp"

namespace crawlq {

using json = nlohmann::ordered_json;
using linalg::Index;
using linalg::Matrix;
using linalg::RowVector;

namespace {

// Accumulates schema problems so one run reports all of them.
struct Reader {
    std::vector<std::string> issues;

    void fail(const std::string& path, const std::string& msg) { issues.push_back(path + ": " + msg); }

    void only_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
        for (const auto& [k, v] : obj.items()) {
            if (!allowed.count(k)) fail(path.empty() ? k : path + "." + k, "unknown key");
        }
    }

    const json* require(const json& obj, const std::string& path, const std::string& key) {
        if (!obj.contains(key)) {
            fail(path.empty() ? key : path + "." + key, "missing");
            return nullptr;
        }
        return &obj.at(key);
    }

    std::optional<double> number(const json& j, const std::string& path) {
        if (!j.is_number()) {
            fail(path, "expected a number");
            return std::nullopt;
        }
        return j.get<double>();
    }

    std::optional<RowVector> vector(const json& j, const std::string& path) {
        if (!j.is_array() || j.empty()) {
            fail(path, "expected a non-empty array of numbers");
            return std::nullopt;
        }
        RowVector v(static_cast<Index>(j.size()));
        bool ok = true;
        for (size_t i = 0; i < j.size(); ++i) {
            auto x = number(j[i], path + "[" + std::to_string(i) + "]");
            if (x) v(static_cast<Index>(i)) = *x;
            ok = ok && x.has_value();
        }
        if (!ok) return std::nullopt;
        return v;
    }

    std::optional<Matrix> matrix(const json& j, const std::string& path) {
        if (!j.is_array() || j.empty()) {
            fail(path, "expected a non-empty array of rows");
            return std::nullopt;
        }
        std::vector<RowVector> rows;
        for (size_t i = 0; i < j.size(); ++i) {
            auto r = vector(j[i], path + "[" + std::to_string(i) + "]");
            if (!r) return std::nullopt;
            if (!rows.empty() && r->size() != rows.front().size()) {
                fail(path, "rows have different lengths");
                return std::nullopt;
            }
            rows.push_back(std::move(*r));
        }
        Matrix m(static_cast<Index>(rows.size()), rows.front().size());
        for (size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Index>(i)) = rows[i];
        return m;
    }

    std::optional<std::vector<Matrix>> sequence(const json& j, const std::string& path) {
        if (!j.is_array() || j.empty()) {
            fail(path, "expected a non-empty array of matrices");
            return std::nullopt;
        }
        std::vector<Matrix> out;
        for (size_t i = 0; i < j.size(); ++i) {
            auto m = matrix(j[i], path + "[" + std::to_string(i) + "]");
            if (!m) return std::nullopt;
            out.push_back(std::move(*m));
        }
        return out;
    }

    std::optional<std::vector<std::vector<Matrix>>> sequences(const json& j, const std::string& path) {
        if (!j.is_array() || j.empty()) {
            fail(path, "expected a non-empty array of matrix sequences");
            return std::nullopt;
        }
        std::vector<std::vector<Matrix>> out;
        for (size_t i = 0; i < j.size(); ++i) {
            auto s = sequence(j[i], path + "[" + std::to_string(i) + "]");
            if (!s) return std::nullopt;
            out.push_back(std::move(*s));
        }
        return out;
    }

    PhSpec ph(const json& j, const std::string& path) {
        PhSpec out;
        if (!j.is_object()) {
            fail(path, "expected an object with init and subgen");
            return out;
        }
        only_keys(j, path, {"init", "subgen"});
        if (const json* i = require(j, path, "init")) {
            if (auto v = vector(*i, path + ".init")) out.init = *v;
        }
        if (const json* s = require(j, path, "subgen")) {
            if (auto m = matrix(*s, path + ".subgen")) out.subgen = *m;
        }
        return out;
    }
};

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_json(const RowVector& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json sequence_json(const std::vector<Matrix>& s) {
    json out = json::array();
    for (const auto& m : s) out.push_back(matrix_json(m));
    return out;
}

void prefix_into(std::vector<std::string>& out, const std::string& prefix, const ValidationError& e) {
    for (const auto& s : e.issues()) out.push_back(prefix + ": " + s);
}

}  // namespace

std::string to_string(ArrivalKind kind) {
    switch (kind) {
        case ArrivalKind::Direct: return "direct";
        case ArrivalKind::Independent: return "independent";
        case ArrivalKind::Thinned: return "thinned";
        case ArrivalKind::Bmmap: return "bmmap";
    }
    return "direct";
}

ModelSpec parse_model(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError({std::string("not valid JSON: ") + e.what()});
    }
    if (!doc.is_object()) throw ValidationError({"model file must be a JSON object"});

    Reader rd;
    ModelSpec spec;
    rd.only_keys(doc, "", {"K", "validation", "repair_cap", "arrival", "service", "obsolescence", "costs", "name",
                           "notes"});
    if (const json* k = rd.require(doc, "", "K")) {
        if (!k->is_number_integer()) {
            rd.fail("K", "expected an integer");
        } else {
            spec.capacity = k->get<int>();
        }
    }
    if (doc.contains("validation")) {
        const json& v = doc["validation"];
        if (v == "strict") {
            spec.validation = ValidationMode::Strict;
        } else if (v == "repair") {
            spec.validation = ValidationMode::Repair;
        } else {
            rd.fail("validation", "expected \"strict\" or \"repair\"");
        }
    }
    if (doc.contains("repair_cap")) {
        if (auto x = rd.number(doc["repair_cap"], "repair_cap")) spec.repair_cap = *x;
    }
    for (const char* key : {"name", "notes"}) {
        if (!doc.contains(key)) continue;
        if (!doc[key].is_string()) {
            rd.fail(key, "expected a string");
        } else {
            (std::string(key) == "name" ? spec.name : spec.notes) = doc[key].get<std::string>();
        }
    }

    if (const json* arr = rd.require(doc, "", "arrival")) {
        if (!arr->is_object()) {
            rd.fail("arrival", "expected an object");
        } else if (const json* kind = rd.require(*arr, "arrival", "kind")) {
            if (*kind == "direct") {
                spec.kind = ArrivalKind::Direct;
                rd.only_keys(*arr, "arrival", {"kind", "modes"});
                if (const json* m = rd.require(*arr, "arrival", "modes")) {
                    if (auto s = rd.sequences(*m, "arrival.modes")) spec.sequences = *s;
                }
            } else if (*kind == "independent") {
                spec.kind = ArrivalKind::Independent;
                rd.only_keys(*arr, "arrival", {"kind", "processes"});
                if (const json* m = rd.require(*arr, "arrival", "processes")) {
                    if (auto s = rd.sequences(*m, "arrival.processes")) spec.sequences = *s;
                }
            } else if (*kind == "thinned") {
                spec.kind = ArrivalKind::Thinned;
                rd.only_keys(*arr, "arrival", {"kind", "process", "q"});
                if (const json* m = rd.require(*arr, "arrival", "process")) {
                    if (auto s = rd.sequence(*m, "arrival.process")) spec.sequences = {*s};
                }
                if (const json* q = rd.require(*arr, "arrival", "q")) {
                    if (auto v = rd.vector(*q, "arrival.q")) spec.q.assign(v->data(), v->data() + v->size());
                }
            } else if (*kind == "bmmap") {
                spec.kind = ArrivalKind::Bmmap;
                rd.only_keys(*arr, "arrival", {"kind", "D0", "robots"});
                if (const json* d0 = rd.require(*arr, "arrival", "D0")) {
                    if (auto m = rd.matrix(*d0, "arrival.D0")) spec.d0 = *m;
                }
                if (const json* r = rd.require(*arr, "arrival", "robots")) {
                    if (auto s = rd.sequences(*r, "arrival.robots")) spec.robots = *s;
                }
            } else {
                rd.fail("arrival.kind", "expected direct, independent, thinned or bmmap");
            }
        }
    }
    if (const json* s = rd.require(doc, "", "service")) spec.service = rd.ph(*s, "service");
    if (const json* s = rd.require(doc, "", "obsolescence")) spec.obsolescence = rd.ph(*s, "obsolescence");
    if (doc.contains("costs")) {
        const json& c = doc["costs"];
        if (!c.is_object()) {
            rd.fail("costs", "expected an object");
        } else {
            rd.only_keys(c, "costs", {"c_loss", "c_obs", "a", "c_rob", "c_star"});
            CostCoefficients cc;
            const std::pair<const char*, double*> fields[] = {
                {"c_loss", &cc.c_loss}, {"c_obs", &cc.c_obs}, {"a", &cc.a}, {"c_rob", &cc.c_rob}, {"c_star", &cc.c_star}};
            for (const auto& [name, dst] : fields) {
                if (const json* v = rd.require(c, "costs", name)) {
                    if (auto x = rd.number(*v, std::string("costs.") + name)) *dst = *x;
                }
            }
            spec.costs = cc;
        }
    }
    if (!rd.issues.empty()) throw ValidationError(std::move(rd.issues));
    return spec;
}

LoadedModel build_model(const ModelSpec& spec, std::optional<ValidationMode> mode_override) {
    const ValidationMode mode = mode_override.value_or(spec.validation);
    std::vector<std::string> issues;
    std::vector<std::string> log;
    ModelSpec canonical = spec;
    canonical.validation = ValidationMode::Strict;

    auto validated = [&](const std::vector<Matrix>& d, const std::string& label,
                         std::vector<Matrix>& canonical_slot) -> std::optional<BatchProcess> {
        try {
            ValidatedProcess vp = validate_bmap(d, mode, spec.repair_cap, label);
            for (const auto& r : vp.repairs) log.push_back(label + " " + r.describe());
            canonical_slot = vp.process.matrices();
            return vp.process;
        } catch (const ValidationError& e) {
            for (const auto& s : e.issues()) issues.push_back(s);
            return std::nullopt;
        }
    };

    std::optional<ModedArrival> arrival;
    try {
        switch (spec.kind) {
            case ArrivalKind::Direct:
            case ArrivalKind::Independent: {
                std::vector<BatchProcess> parts;
                const std::string stem = spec.kind == ArrivalKind::Direct ? "mode " : "robot ";
                for (size_t i = 0; i < spec.sequences.size(); ++i) {
                    if (auto bp = validated(spec.sequences[i], stem + std::to_string(i + 1),
                                            canonical.sequences[i])) {
                        parts.push_back(std::move(*bp));
                    }
                }
                if (issues.empty()) {
                    arrival = spec.kind == ArrivalKind::Direct ? compose_direct(std::move(parts))
                                                               : compose_independent(parts);
                }
                break;
            }
            case ArrivalKind::Thinned: {
                if (spec.sequences.size() != 1) {
                    issues.emplace_back("arrival.process: thinning needs exactly one process");
                    break;
                }
                if (auto bp = validated(spec.sequences[0], "process", canonical.sequences[0])) {
                    arrival = compose_thinned(*bp, spec.q);
                }
                break;
            }
            case ArrivalKind::Bmmap: arrival = compose_bmmap(spec.d0, spec.robots); break;
        }
    } catch (const ValidationError& e) {
        prefix_into(issues, "arrival", e);
    } catch (const DimensionError& e) {
        issues.push_back(std::string("arrival: ") + e.what());
    }

    std::optional<PhaseType> service, obsolescence;
    try {
        service = PhaseType::validate(spec.service.init, spec.service.subgen);
    } catch (const ValidationError& e) {
        prefix_into(issues, "service", e);
    }
    try {
        obsolescence = PhaseType::validate(spec.obsolescence.init, spec.obsolescence.subgen);
    } catch (const ValidationError& e) {
        prefix_into(issues, "obsolescence", e);
    }
    if (spec.costs) {
        try {
            spec.costs->validate();
        } catch (const ValidationError& e) {
            prefix_into(issues, "costs", e);
        }
    }
    if (spec.capacity < 1) issues.push_back("K: must be at least 1");
    if (!issues.empty()) throw ValidationError(std::move(issues));

    return LoadedModel{QueueModel(std::move(*arrival), std::move(*service), std::move(*obsolescence), spec.capacity),
                       spec.costs, std::move(log), std::move(canonical)};
}

LoadedModel load_model_file(const std::string& path, std::optional<ValidationMode> mode) {
    std::ifstream in(path);
    if (!in) throw ValidationError({path + ": cannot open"});
    std::ostringstream buf;
    buf << in.rdbuf();
    return build_model(parse_model(buf.str()), mode);
}

std::string emit_model(const ModelSpec& spec) {
    json doc;
    doc["K"] = spec.capacity;
    if (!spec.name.empty()) doc["name"] = spec.name;
    if (!spec.notes.empty()) doc["notes"] = spec.notes;
    doc["validation"] = spec.validation == ValidationMode::Repair ? "repair" : "strict";
    doc["repair_cap"] = spec.repair_cap;
    json arr;
    arr["kind"] = to_string(spec.kind);
    switch (spec.kind) {
        case ArrivalKind::Direct:
        case ArrivalKind::Independent: {
            json seqs = json::array();
            for (const auto& s : spec.sequences) seqs.push_back(sequence_json(s));
            arr[spec.kind == ArrivalKind::Direct ? "modes" : "processes"] = seqs;
            break;
        }
        case ArrivalKind::Thinned:
            arr["process"] = sequence_json(spec.sequences.at(0));
            arr["q"] = spec.q;
            break;
        case ArrivalKind::Bmmap: {
            arr["D0"] = matrix_json(spec.d0);
            json robots = json::array();
            for (const auto& s : spec.robots) robots.push_back(sequence_json(s));
            arr["robots"] = robots;
            break;
        }
    }
    doc["arrival"] = arr;
    doc["service"] = {{"init", vector_json(spec.service.init)}, {"subgen", matrix_json(spec.service.subgen)}};
    doc["obsolescence"] = {{"init", vector_json(spec.obsolescence.init)},
                           {"subgen", matrix_json(spec.obsolescence.subgen)}};
    if (spec.costs) {
        const auto& c = *spec.costs;
        doc["costs"] = {{"c_loss", c.c_loss}, {"c_obs", c.c_obs}, {"a", c.a}, {"c_rob", c.c_rob}, {"c_star", c.c_star}};
    }
    return doc.dump(2) + "\n";
}

}  // namespace crawlq
