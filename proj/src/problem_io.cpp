// JSON problem files:
//   { "n": int, "p": int, "A0": [[ [re,im], ... ], ...],
//     "operator": { "kind": "hadamard" | "diagonal_map" | "general_vec",
//                   "mask" | "coeff" | "matrix": rows, "alpha": float },
//     "meta": { ... } }
// Matrices are arrays of rows; complex entries are [re, im] pairs, a bare number
// is accepted for a real entry.
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "scfconv/problems.hpp"

namespace scfconv {

using nlohmann::json;

namespace {

cxd parse_entry(const json& e, const char* what) {
    if (e.is_number()) return {e.get<double>(), 0.0};
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        return {e[0].get<double>(), e[1].get<double>()};
    throw ValidationError(std::string(what) + ": entries must be numbers or [re, im] pairs");
}

MatC parse_matrix(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw ValidationError(std::string(what) + ": expected a nonempty array of rows");
    const auto rows = static_cast<Index>(j.size());
    const auto cols = static_cast<Index>(j[0].is_array() ? j[0].size() : 0);
    MatC m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols)
            throw DimensionError(std::string(what) + ": rows have inconsistent lengths");
        for (Index c = 0; c < cols; ++c) m(r, c) = parse_entry(row[static_cast<std::size_t>(c)], what);
    }
    return m;
}

json complex_matrix_json(const MatC& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

json real_matrix_json(const MatR& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <class T>
void get_optional(const json& j, const char* key, std::optional<T>& v) {
    if (j.contains(key) && !j[key].is_null()) v = j[key].get<T>();
}

}  // namespace

Problem problem_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("problem file: JSON parse error: ") + e.what());
    }
    try {
        if (!j.is_object()) throw ValidationError("problem file: top level must be an object");
        for (const char* key : {"n", "p", "A0", "operator"})
            if (!j.contains(key)) throw ValidationError(std::string("problem file: missing key \"") + key + "\"");

        const auto n = j.at("n").get<Index>();
        const auto p = j.at("p").get<Index>();
        MatC a0 = parse_matrix(j.at("A0"), "A0");
        if (a0.rows() != n || a0.cols() != n) throw DimensionError("problem file: A0 is not n x n");

        const json& jop = j.at("operator");
        const auto kind = jop.at("kind").get<std::string>();
        OperatorSpec op;
        if (kind == "hadamard") {
            op = HadamardMask{parse_matrix(jop.at("mask"), "operator.mask")};
        } else if (kind == "diagonal_map") {
            const MatC coeff = parse_matrix(jop.at("coeff"), "operator.coeff");
            if (coeff.imag().cwiseAbs().maxCoeff() != 0.0)
                throw ValidationError("operator.coeff must be real for diagonal_map");
            op = DiagonalMap{coeff.real(), jop.value("alpha", 1.0)};
        } else if (kind == "general_vec") {
            op = GeneralVec{parse_matrix(jop.at("matrix"), "operator.matrix")};
        } else {
            throw ValidationError("problem file: unknown operator kind \"" + kind + "\"");
        }

        Problem pr{HermitianMatrix(std::move(a0)), std::move(op), p, {}};
        pr.meta.family = "file";
        if (j.contains("meta") && j["meta"].is_object()) {
            const json& m = j["meta"];
            pr.meta.family = m.value("family", std::string("file"));
            get_optional(m, "alpha", pr.meta.alpha);
            get_optional(m, "h", pr.meta.h);
            get_optional(m, "epsilon", pr.meta.epsilon);
            get_optional(m, "d", pr.meta.d);
            get_optional(m, "seed", pr.meta.seed);
        }
        pr.validate();
        return pr;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("problem file: schema error: ") + e.what());
    }
}

Problem load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open problem file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return problem_from_json_text(ss.str());
}

std::string problem_to_json_text(const Problem& problem) {
    json j;
    j["n"] = problem.n();
    j["p"] = problem.p;
    j["A0"] = complex_matrix_json(problem.A0.matrix());
    json op;
    op["kind"] = operator_kind(problem.op);
    std::visit(
        [&](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, HadamardMask>) {
                op["mask"] = complex_matrix_json(o.mask);
            } else if constexpr (std::is_same_v<T, DiagonalMap>) {
                op["coeff"] = real_matrix_json(o.coeff);
                op["alpha"] = o.alpha;
            } else {
                op["matrix"] = complex_matrix_json(o.matrix);
            }
        },
        problem.op);
    j["operator"] = std::move(op);
    json meta = json::object();
    meta["family"] = problem.meta.family;
    put_optional(meta, "alpha", problem.meta.alpha);
    put_optional(meta, "h", problem.meta.h);
    put_optional(meta, "epsilon", problem.meta.epsilon);
    put_optional(meta, "d", problem.meta.d);
    put_optional(meta, "seed", problem.meta.seed);
    j["meta"] = std::move(meta);
    // nlohmann prints doubles with max_digits10, so values round-trip exactly.
    return j.dump(1);
}

void save_problem(const Problem& problem, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write problem file " + path.string());
    out << problem_to_json_text(problem) << "\n";
}

}  // namespace scfconv
