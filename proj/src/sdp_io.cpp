#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "qlimit/sdp.hpp"

// JSON schema (dense constraint matrices) and the subprocess adapter used to
// cross-check the built-in solver against an external implementation.

namespace qlimit::sdp {

namespace {

nlohmann::json functional_to_json(const LinearFunctional& f, int psd_dim, int n_lin) {
    nlohmann::json j;
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(psd_dim, psd_dim);
    for (const PsdTerm& t : f.psd_terms) {
        dense(t.row, t.col) += t.value;
        if (t.row != t.col) dense(t.col, t.row) += t.value;
    }
    std::vector<std::vector<double>> rows(psd_dim, std::vector<double>(psd_dim));
    for (int i = 0; i < psd_dim; ++i)
        for (int k = 0; k < psd_dim; ++k) rows[i][k] = dense(i, k);
    j["psd"] = rows;
    std::vector<double> lin(n_lin, 0.0);
    for (int i = 0; i < int(f.lin.size()); ++i) lin[i] = f.lin[i];
    j["lin"] = lin;
    return j;
}

LinearFunctional functional_from_json(const nlohmann::json& j, int psd_dim, int n_lin) {
    LinearFunctional f;
    const auto& psd = j.at("psd");
    if (int(psd.size()) != psd_dim)
        throw std::runtime_error("functional psd matrix has wrong dimension");
    for (int i = 0; i < psd_dim; ++i)
        for (int k = i; k < psd_dim; ++k) {
            const double v = psd.at(i).at(k).get<double>();
            if (v != 0.0) f.psd_terms.push_back({i, k, v});
        }
    f.lin = Eigen::VectorXd::Zero(n_lin);
    const auto& lin = j.at("lin");
    for (int i = 0; i < n_lin; ++i) f.lin[i] = lin.at(i).get<double>();
    return f;
}

std::filesystem::path unique_temp_path(const char* tag) {
    static std::atomic<int> counter{0};
    const int id = counter.fetch_add(1);
    return std::filesystem::temp_directory_path() /
           ("qlimit_" + std::string(tag) + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(id) + ".json");
}

}  // namespace

nlohmann::json problem_to_json(const SdpProblem& problem) {
    problem.validate();
    nlohmann::json j;
    j["psd_dim"] = problem.psd_dim;
    j["n_lin"] = problem.n_lin;
    j["objective"] = functional_to_json(problem.objective, problem.psd_dim, problem.n_lin);
    j["objective_offset"] = problem.objective_offset;
    j["variable_norm_bound"] = problem.variable_norm_bound;
    nlohmann::json eqs = nlohmann::json::array();
    for (const auto& eq : problem.equalities) {
        nlohmann::json e = functional_to_json(eq.f, problem.psd_dim, problem.n_lin);
        e["rhs"] = eq.rhs;
        eqs.push_back(std::move(e));
    }
    j["equalities"] = std::move(eqs);
    nlohmann::json ineqs = nlohmann::json::array();
    for (const auto& iq : problem.inequalities) {
        nlohmann::json e = functional_to_json(iq.f, problem.psd_dim, problem.n_lin);
        e["rhs"] = iq.rhs;
        ineqs.push_back(std::move(e));
    }
    j["inequalities"] = std::move(ineqs);
    return j;
}

SdpProblem problem_from_json(const nlohmann::json& j) {
    SdpProblem p;
    p.psd_dim = j.at("psd_dim").get<int>();
    p.n_lin = j.at("n_lin").get<int>();
    p.objective = functional_from_json(j.at("objective"), p.psd_dim, p.n_lin);
    p.objective_offset = j.value("objective_offset", 0.0);
    p.variable_norm_bound = j.value("variable_norm_bound", 0.0);
    for (const auto& e : j.at("equalities"))
        p.equalities.push_back({functional_from_json(e, p.psd_dim, p.n_lin),
                                e.at("rhs").get<double>()});
    for (const auto& e : j.at("inequalities"))
        p.inequalities.push_back({functional_from_json(e, p.psd_dim, p.n_lin),
                                  e.at("rhs").get<double>()});
    p.validate();
    return p;
}

nlohmann::json solution_to_json(const SdpSolution& s) {
    nlohmann::json j;
    j["status"] = status_name(s.status);
    j["primal_value"] = s.primal_value;
    j["dual_value"] = s.dual_value;
    j["primal_psd_mineig"] = s.primal_psd_mineig;
    j["eq_residual_inf"] = s.eq_residual_inf;
    j["ineq_violation_inf"] = s.ineq_violation_inf;
    j["dual_feasibility_residual"] = s.dual_feasibility_residual;
    j["duality_gap"] = s.duality_gap;
    j["iterations"] = s.iterations;
    return j;
}

SubprocessJsonSolver::SubprocessJsonSolver(std::string command)
    : command_(std::move(command)) {}

std::string SubprocessJsonSolver::name() const { return "subprocess:" + command_; }

SdpSolution SubprocessJsonSolver::solve(const SdpProblem& problem,
                                        const SolveOptions& opts) {
    const auto in_path = unique_temp_path("problem");
    const auto out_path = unique_temp_path("solution");
    {
        std::ofstream out(in_path);
        nlohmann::json j = problem_to_json(problem);
        j["tol"] = opts.tol;
        j["max_iters"] = opts.max_iters;
        out << j;
    }
    const std::string cmd =
        command_ + " " + in_path.string() + " " + out_path.string();
    const int rc = std::system(cmd.c_str());
    SdpSolution sol;
    if (rc != 0) {
        std::filesystem::remove(in_path);
        std::filesystem::remove(out_path);
        throw std::runtime_error("external solver failed (exit " + std::to_string(rc) +
                                 "): " + cmd);
    }
    std::ifstream in(out_path);
    if (!in) throw std::runtime_error("external solver produced no output file");
    nlohmann::json j;
    in >> j;
    std::filesystem::remove(in_path);
    std::filesystem::remove(out_path);

    const std::string st = j.at("status").get<std::string>();
    if (st == "optimal")
        sol.status = SolveStatus::kOptimal;
    else if (st == "infeasible")
        sol.status = SolveStatus::kInfeasible;
    else if (st == "unbounded")
        sol.status = SolveStatus::kUnbounded;
    else
        sol.status = SolveStatus::kMaxIters;
    sol.primal_value = j.value("primal_value", 0.0);
    sol.dual_value = j.value("dual_value", sol.primal_value);
    sol.dual_feasibility_residual = j.value("dual_feasibility_residual", 0.0);
    sol.eq_residual_inf = j.value("eq_residual_inf", 0.0);
    sol.iterations = j.value("iterations", 0);
    sol.psd_block = Eigen::MatrixXd::Zero(problem.psd_dim, problem.psd_dim);
    sol.lin_vars = Eigen::VectorXd::Zero(problem.n_lin);
    return sol;
}

}  // namespace qlimit::sdp
