#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qot/problem.hpp"
#include "qot/solver.hpp"

namespace qot::io {

using nlohmann::json;

/// Matrices travel as arrays of rows, one [re, im] pair per entry; composite
/// indices follow the BipartiteShape convention (subsystem 1 major).
inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty())
        throw Error(field + ": expected a non-empty array of rows");
    const Eigen::Index rows = Eigen::Index(j.size());
    const Eigen::Index cols = Eigen::Index(j.at(0).size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j.at(std::size_t(i));
        if (!row.is_array() || Eigen::Index(row.size()) != cols)
            throw Error(field + ": row " + std::to_string(i) + " has " +
                        std::to_string(row.size()) + " entries, expected " +
                        std::to_string(cols));
        for (Eigen::Index k = 0; k < cols; ++k) {
            const json& entry = row.at(std::size_t(k));
            if (!entry.is_array() || entry.size() != 2 || !entry.at(0).is_number() ||
                !entry.at(1).is_number())
                throw Error(field + ": entry (" + std::to_string(i) + ", " +
                            std::to_string(k) + ") must be [re, im]");
            m(i, k) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
        }
    }
    return m;
}

inline RawInstance instance_from_json(const json& j) {
    RawInstance raw;
    raw.epsilon = j.at("epsilon").get<double>();
    raw.d1 = j.at("d1").get<Eigen::Index>();
    raw.d2 = j.at("d2").get<Eigen::Index>();
    raw.rho = matrix_from_json(j.at("rho"), "rho");
    raw.sigma = matrix_from_json(j.at("sigma"), "sigma");
    raw.cost = matrix_from_json(j.at("C"), "C");
    return raw;
}

inline json instance_to_json(const ProblemInstance& inst) {
    json j;
    j["epsilon"] = inst.epsilon();
    j["d1"] = inst.shape().d1;
    j["d2"] = inst.shape().d2;
    j["rho"] = matrix_to_json(inst.rho().matrix().mat());
    j["sigma"] = matrix_to_json(inst.sigma().matrix().mat());
    j["C"] = matrix_to_json(inst.cost().mat());
    return j;
}

inline RawInstance read_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open instance file " + path);
    json j;
    in >> j;
    return instance_from_json(j);
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open output file " + path);
    out << j.dump(2) << '\n';
}

inline void write_instance_file(const std::string& path, const ProblemInstance& inst) {
    write_json_file(path, instance_to_json(inst));
}

struct SolutionFile {
    Matrix U;
    Matrix V;
    Matrix Gamma;
    long iterations = 0;
    double dual_value = 0.0;
    std::string status;
};

inline json solution_to_json(const Solution& sol, double dual_value) {
    json j;
    j["U"] = matrix_to_json(sol.dual_point.U.mat());
    j["V"] = matrix_to_json(sol.dual_point.V.mat());
    j["Gamma"] = matrix_to_json(sol.coupling.matrix().mat());
    j["iterations"] = sol.iterations;
    j["dual_value"] = dual_value;
    j["status"] = to_string(sol.status);
    return j;
}

inline SolutionFile solution_from_json(const json& j) {
    SolutionFile s;
    s.U = matrix_from_json(j.at("U"), "U");
    s.V = matrix_from_json(j.at("V"), "V");
    s.Gamma = matrix_from_json(j.at("Gamma"), "Gamma");
    s.iterations = j.at("iterations").get<long>();
    s.dual_value = j.at("dual_value").get<double>();
    s.status = j.at("status").get<std::string>();
    if (s.status != "converged" && s.status != "max_iters")
        throw Error("solution: unknown status \"" + s.status + "\"");
    return s;
}

inline SolutionFile read_solution_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open solution file " + path);
    json j;
    in >> j;
    return solution_from_json(j);
}

/// One row per IterationRecord; reproduces every per-iteration quantity the
/// solver tracks.
inline void write_trace_csv(const std::string& path,
                            const std::vector<IterationRecord>& trace) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open trace file " + path);
    out << "n,stage,dual,err1_f,err2_f,env_lower,env_upper\n";
    char buf[512];
    for (const IterationRecord& r : trace) {
        std::snprintf(buf, sizeof buf, "%ld,%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.n,
                      r.stage == Stage::AfterU ? "U" : "V", r.dual, r.err1_f, r.err2_f,
                      r.env_lower, r.env_upper);
        out << buf;
    }
}

} // namespace qot::io
