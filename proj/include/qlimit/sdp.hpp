#ifndef QLIMIT_SDP_HPP
#define QLIMIT_SDP_HPP

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

// Small-scale semidefinite programming with dual certificates.
//
// Problems carry one real symmetric PSD block M (psd_dim x psd_dim) and n_lin
// non-negative scalars p. All functionals are affine in (M, p); the solver
// MAXIMIZES the objective. The algorithm is first-order operator splitting
// over the homogeneous self-dual embedding: each iteration solves one fixed
// (pre-factorized) linear system and projects onto the cone, where the PSD
// part is an eigen-decomposition. Iterations are deterministic, so results
// are bit-reproducible for fixed inputs.

namespace qlimit::sdp {

// Coefficient of a symmetric matrix: entry (row, col) with row <= col.
// An off-diagonal term stands for both mirrored entries, i.e. a functional
// contribution value * (M(row, col) + M(col, row)).
struct PsdTerm {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

struct LinearFunctional {
    std::vector<PsdTerm> psd_terms;
    Eigen::VectorXd lin;  // size n_lin, or 0 when there is no scalar part

    double eval(const Eigen::MatrixXd& psd_block, const Eigen::VectorXd& p) const;
};

struct Constraint {
    LinearFunctional f;
    double rhs = 0.0;
};

enum class SolveStatus { kOptimal, kMaxIters, kInfeasible, kUnbounded };

const char* status_name(SolveStatus s);

struct SdpProblem {
    int psd_dim = 0;  // side of the PSD block; 0 means no matrix block
    int n_lin = 0;    // count of non-negative scalar variables

    LinearFunctional objective;     // maximized
    double objective_offset = 0.0;  // constant added to reported values

    std::vector<Constraint> equalities;    // f(M, p) = rhs
    std::vector<Constraint> inequalities;  // f(M, p) <= rhs

    // Euclidean bound on (svec(M), p) over the feasible set, when known.
    // Used by callers to turn the dual feasibility residual into a rigor
    // margin on the certified bound. 0 = unknown.
    double variable_norm_bound = 0.0;

    void validate() const;
};

// kInteriorPoint: primal-dual Mehrotra predictor-corrector (HKM direction);
// the default. kOperatorSplitting: Douglas-Rachford over the homogeneous
// self-dual embedding with safeguarded Anderson acceleration; kept as an
// independent second route, adequate for small or well-conditioned problems.
enum class Algorithm { kInteriorPoint, kOperatorSplitting };

struct SolveOptions {
    Algorithm algorithm = Algorithm::kInteriorPoint;
    double tol = 1e-7;        // feasibility tolerance (primal and dual residuals)
    double gap_tol = 5e-5;    // relative duality-gap tolerance for "optimal"
    int max_iters = 200000;   // interior-point runs are capped at 200 iterations
    double relax_alpha = 1.5; // operator splitting: over-relaxation in (0, 2)
    int check_interval = 25;  // operator splitting: residual check cadence
    bool verbose = false;
};

struct SdpSolution {
    SolveStatus status = SolveStatus::kMaxIters;
    double primal_value = 0.0;  // objective at the returned primal (offset included)
    double dual_value = 0.0;    // certified side: >= optimum up to the rigor margin

    double primal_psd_mineig = 0.0;
    double eq_residual_inf = 0.0;
    double ineq_violation_inf = 0.0;
    double dual_feasibility_residual = 0.0;  // ||A^T y + c||_2, original scale
    double duality_gap = 0.0;                // dual_value - primal_value
    int iterations = 0;

    Eigen::MatrixXd psd_block;  // returned primal PSD block (cone-feasible)
    Eigen::VectorXd lin_vars;   // returned scalars (non-negative)
    Eigen::VectorXd dual_eq;
    Eigen::VectorXd dual_ineq;
};

SdpSolution solve(const SdpProblem& problem, const SolveOptions& opts = {});

// Standard real embedding of an n x n Hermitian PSD variable G = A + iB into
// the 2n x 2n real symmetric block M = [[A, -B], [B, A]]. The extraction map
// (M11 + M22)/2 + i (M21 - M12)/2 sends any PSD M to a PSD Hermitian matrix
// and inverts embed() exactly; eigenvalues of embed(G) are those of G, each
// with doubled multiplicity. For functionals, <C, G> = <embed_coefficient(C), M>.
struct HermitianEmbedding {
    int dim = 0;       // complex side n
    int real_dim = 0;  // 2n

    Eigen::MatrixXd embed(const Eigen::MatrixXcd& h) const;
    Eigen::MatrixXcd extract(const Eigen::MatrixXd& m) const;
    Eigen::MatrixXd embed_coefficient(const Eigen::MatrixXcd& c) const;

    // Append the real terms realizing weight * Re(conj(coeff) * G(u, v)) as a
    // functional of the embedded block M. coeff = 1 picks Re G(u,v), coeff = i
    // picks Im G(u,v). u == v requires a real coefficient.
    void add_entry_terms(std::vector<PsdTerm>& terms, int u, int v,
                         std::complex<double> coeff, double weight) const;
};

HermitianEmbedding embed_hermitian(int dim);

// JSON schema with dense constraint matrices, for debugging and
// cross-implementation comparison.
nlohmann::json problem_to_json(const SdpProblem& problem);
SdpProblem problem_from_json(const nlohmann::json& j);
nlohmann::json solution_to_json(const SdpSolution& s);

// Adapter seam for substituting a production SDP solver with the same
// contract; the built-in solver remains the reference implementation.
class ExternalSdpSolver {
  public:
    virtual ~ExternalSdpSolver() = default;
    virtual std::string name() const = 0;
    virtual SdpSolution solve(const SdpProblem& problem, const SolveOptions& opts) = 0;
};

// Runs `command problem.json solution.json` and reads the solution back.
class SubprocessJsonSolver final : public ExternalSdpSolver {
  public:
    explicit SubprocessJsonSolver(std::string command);
    std::string name() const override;
    SdpSolution solve(const SdpProblem& problem, const SolveOptions& opts) override;

  private:
    std::string command_;
};

}  // namespace qlimit::sdp

#endif
