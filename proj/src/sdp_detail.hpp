#ifndef QLIMIT_SDP_DETAIL_HPP
#define QLIMIT_SDP_DETAIL_HPP

#include <Eigen/Dense>

// Shared helpers for the solver backends: packed svec storage of symmetric
// matrices with sqrt(2)-scaled off-diagonals (so svec dot products equal
// Frobenius inner products).

namespace qlimit::sdp::detail {

inline constexpr double kSqrt2 = 1.4142135623730951;

inline int svec_index(int i, int j) { return j * (j + 1) / 2 + i; }  // i <= j

inline int svec_size(int n) { return n * (n + 1) / 2; }

inline void svec_from_matrix(const Eigen::MatrixXd& m, Eigen::Ref<Eigen::VectorXd> out) {
    const int n = int(m.rows());
    int k = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < j; ++i) out[k++] = kSqrt2 * m(i, j);
        out[k++] = m(j, j);
    }
}

inline void matrix_from_svec(const Eigen::Ref<const Eigen::VectorXd>& v,
                             Eigen::MatrixXd& m) {
    const int n = int(m.rows());
    int k = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            const double val = v[k++] / kSqrt2;
            m(i, j) = val;
            m(j, i) = val;
        }
        m(j, j) = v[k++];
    }
}

}  // namespace qlimit::sdp::detail

namespace qlimit::sdp {
struct SdpProblem;
struct SolveOptions;
struct SdpSolution;

// Solver backends (internal).
SdpSolution solve_operator_splitting(const SdpProblem& problem,
                                     const SolveOptions& opts);
SdpSolution solve_interior_point(const SdpProblem& problem, const SolveOptions& opts);
}  // namespace qlimit::sdp

#endif

