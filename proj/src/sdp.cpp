#include "qlimit/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "sdp_detail.hpp"

namespace qlimit::sdp {

namespace {

using detail::kSqrt2;
using detail::matrix_from_svec;
using detail::svec_from_matrix;
using detail::svec_index;
using detail::svec_size;

struct ConeLayout {
    int n_eq = 0;      // zero cone rows
    int n_nonneg = 0;  // inequality slacks + scalar-variable bounds
    int psd_dim = 0;   // side of the PSD block (svec rows come last)

    int psd_rows() const { return svec_size(psd_dim); }
    int total() const { return n_eq + n_nonneg + psd_rows(); }
};

// Functional as a sparse row over x = (svec(M), p).
void scatter_functional(const LinearFunctional& f, int psd_dim, int row,
                        std::vector<Eigen::Triplet<double>>& trip) {
    const int sn = svec_size(psd_dim);
    for (const PsdTerm& t : f.psd_terms) {
        if (t.row == t.col)
            trip.emplace_back(row, svec_index(t.row, t.col), t.value);
        else
            trip.emplace_back(row, svec_index(t.row, t.col), kSqrt2 * t.value);
    }
    for (int j = 0; j < int(f.lin.size()); ++j)
        if (f.lin[j] != 0.0) trip.emplace_back(row, sn + j, f.lin[j]);
}

struct Scaling {
    Eigen::VectorXd row;  // D
    Eigen::VectorXd col;  // E
    double rho_b = 1.0;
    double rho_c = 1.0;
};

// Ruiz equilibration; rows of the PSD block share one factor so the scaled
// slack cone is still the PSD cone.
Scaling equilibrate(Eigen::SparseMatrix<double>& a, const ConeLayout& cones) {
    const int m = int(a.rows());
    const int n = int(a.cols());
    Scaling s;
    s.row = Eigen::VectorXd::Ones(m);
    s.col = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd rnorm(m), cnorm(n);
    for (int pass = 0; pass < 10; ++pass) {
        rnorm.setZero();
        cnorm.setZero();
        for (int k = 0; k < a.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
                const double v = std::abs(s.row[it.row()] * it.value() * s.col[it.col()]);
                rnorm[it.row()] = std::max(rnorm[it.row()], v);
                cnorm[it.col()] = std::max(cnorm[it.col()], v);
            }
        }
        const int psd_start = cones.n_eq + cones.n_nonneg;
        if (cones.psd_dim > 0) {
            double mean = 0.0;
            for (int i = psd_start; i < m; ++i) mean += rnorm[i];
            mean /= double(m - psd_start);
            for (int i = psd_start; i < m; ++i) rnorm[i] = mean;
        }
        for (int i = 0; i < m; ++i)
            if (rnorm[i] > 0) s.row[i] /= std::sqrt(rnorm[i]);
        for (int j = 0; j < n; ++j)
            if (cnorm[j] > 0) s.col[j] /= std::sqrt(cnorm[j]);
    }
    for (int k = 0; k < a.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
            it.valueRef() *= s.row[it.row()] * s.col[it.col()];
    return s;
}

struct Candidate {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    Eigen::VectorXd s;
    double pres = std::numeric_limits<double>::infinity();
    double dres = std::numeric_limits<double>::infinity();
    double relgap = std::numeric_limits<double>::infinity();
    double gap_signed = 0.0;  // c'x + b'y = dual - primal for maximization
    double gap_slack = 0.0;   // same, at the cone-feasible point that is reported
    double merit() const { return std::max({pres, dres, relgap}); }
};

}  // namespace

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::kOptimal: return "optimal";
        case SolveStatus::kMaxIters: return "max_iters";
        case SolveStatus::kInfeasible: return "infeasible";
        case SolveStatus::kUnbounded: return "unbounded";
    }
    return "unknown";
}

double LinearFunctional::eval(const Eigen::MatrixXd& psd_block,
                              const Eigen::VectorXd& p) const {
    double v = 0.0;
    for (const PsdTerm& t : psd_terms) {
        if (t.row == t.col)
            v += t.value * psd_block(t.row, t.col);
        else
            v += t.value * (psd_block(t.row, t.col) + psd_block(t.col, t.row));
    }
    if (lin.size() > 0) v += lin.dot(p);
    return v;
}

void SdpProblem::validate() const {
    if (psd_dim < 0 || n_lin < 0) throw std::invalid_argument("negative dimensions");
    if (psd_dim == 0 && n_lin == 0) throw std::invalid_argument("problem has no variables");
    auto check = [&](const LinearFunctional& f, const char* where) {
        for (const PsdTerm& t : f.psd_terms) {
            if (t.row < 0 || t.col < 0 || t.row >= psd_dim || t.col >= psd_dim ||
                t.row > t.col)
                throw std::invalid_argument(std::string(where) +
                                            ": psd term index out of range");
        }
        if (f.lin.size() != 0 && int(f.lin.size()) != n_lin)
            throw std::invalid_argument(std::string(where) + ": lin size mismatch");
    };
    check(objective, "objective");
    for (const auto& c : equalities) check(c.f, "equality");
    for (const auto& c : inequalities) check(c.f, "inequality");
}

SdpSolution solve(const SdpProblem& problem, const SolveOptions& opts) {
    problem.validate();
    if (!(opts.tol > 0)) throw std::invalid_argument("tol must be > 0");
    if (opts.algorithm == Algorithm::kInteriorPoint)
        return solve_interior_point(problem, opts);
    return solve_operator_splitting(problem, opts);
}

SdpSolution solve_operator_splitting(const SdpProblem& problem,
                                     const SolveOptions& opts) {
    if (!(opts.relax_alpha > 0 && opts.relax_alpha < 2))
        throw std::invalid_argument("relax_alpha must be in (0, 2)");

    const int nd = problem.psd_dim;
    const int sn = svec_size(nd);
    const int nvar = sn + problem.n_lin;
    const int m_eq = int(problem.equalities.size());
    const int m_ineq = int(problem.inequalities.size());
    ConeLayout cones;
    cones.n_eq = m_eq;
    cones.n_nonneg = m_ineq + problem.n_lin;
    cones.psd_dim = nd;
    const int m = cones.total();
    const int psd_start = cones.n_eq + cones.n_nonneg;

    // Standard conic form: minimize c'x s.t. Ax + s = b, s in K, with
    // c = -objective. Rows: [equalities; inequalities; -p <= 0; -svec(M) in PSD].
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nvar);
    Eigen::SparseMatrix<double> a_orig(m, nvar);
    {
        std::vector<Eigen::Triplet<double>> otrip;
        scatter_functional(problem.objective, nd, 0, otrip);
        for (const auto& t : otrip) c[t.col()] -= t.value();

        std::vector<Eigen::Triplet<double>> trip;
        int row = 0;
        for (const auto& eq : problem.equalities) {
            scatter_functional(eq.f, nd, row, trip);
            b[row++] = eq.rhs;
        }
        for (const auto& iq : problem.inequalities) {
            scatter_functional(iq.f, nd, row, trip);
            b[row++] = iq.rhs;
        }
        for (int j = 0; j < problem.n_lin; ++j) trip.emplace_back(row++, sn + j, -1.0);
        for (int k = 0; k < sn; ++k) trip.emplace_back(row++, k, -1.0);
        a_orig.setFromTriplets(trip.begin(), trip.end());
    }

    Eigen::SparseMatrix<double> a = a_orig;
    Scaling sc = equilibrate(a, cones);
    sc.rho_b = 1.0 / std::max((sc.row.cwiseProduct(b)).norm(), 1e-10);
    sc.rho_c = 1.0 / std::max((sc.col.cwiseProduct(c)).norm(), 1e-10);
    Eigen::VectorXd b_hat = sc.rho_b * sc.row.cwiseProduct(b);
    Eigen::VectorXd c_hat = sc.rho_c * sc.col.cwiseProduct(c);
    const Eigen::SparseMatrix<double> at = a.transpose();
    const Eigen::SparseMatrix<double> at_orig = a_orig.transpose();

    // Factor I + A'A once; every iteration reuses it.
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol;
    {
        Eigen::SparseMatrix<double> gram = at * a;
        Eigen::SparseMatrix<double> eye(nvar, nvar);
        eye.setIdentity();
        gram = gram + eye;
        chol.compute(gram);
        if (chol.info() != Eigen::Success)
            throw std::runtime_error("sdp::solve: factorization of I + A'A failed");
    }
    auto solve_m = [&](const Eigen::VectorXd& q1, const Eigen::VectorXd& q2,
                       Eigen::VectorXd& p1, Eigen::VectorXd& p2) {
        p1 = chol.solve(q1 - at * q2);
        p2 = q2 + a * p1;
    };

    Eigen::VectorXd g1(nvar), g2(m);
    solve_m(c_hat, b_hat, g1, g2);
    double denom = 1.0 + c_hat.dot(g1) + b_hat.dot(g2);

    // Douglas-Rachford over the homogeneous self-dual embedding on the single
    // iterate z = (z_x, z_y, z_tau):
    //   ut = (I+Q)^{-1} z,  u = Pi_C(2 ut - z),  z+ = z + alpha (u - ut),
    // with C = R^n x K* x R+. The cone-complement part r = u - (2 ut - z)
    // lies in {0} x K x R+ exactly and carries the primal slack.
    const int dim = nvar + m + 1;
    Eigen::VectorXd z(dim);
    z.setZero();
    z[dim - 1] = 1.0;

    Eigen::VectorXd ut(dim), up(dim), rr(dim), fvec(dim), t1(nvar), t2(m), seg(sn);
    Eigen::MatrixXd psd_buf(nd, nd), vpos(nd, nd), scaled(nd, nd);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    const double alpha = opts.relax_alpha;
    const double b_norm = b.norm();
    const double c_norm = c.norm();
    const int y_off = nvar;

    // Projection of the y block onto K* = R^eq x R+^nonneg x PSD.
    auto project_dual_cone = [&](Eigen::Ref<Eigen::VectorXd> y) {
        for (int i = cones.n_eq; i < psd_start; ++i) y[i] = std::max(0.0, y[i]);
        if (nd > 0) {
            matrix_from_svec(y.segment(psd_start, sn), psd_buf);
            eig.compute(psd_buf);
            const Eigen::VectorXd& vals = eig.eigenvalues();
            const Eigen::MatrixXd& vecs = eig.eigenvectors();
            int npos = 0;
            for (int k = 0; k < nd; ++k) {
                if (vals[k] > 0) {
                    vpos.col(npos) = vecs.col(k);
                    scaled.col(npos) = vals[k] * vecs.col(k);
                    ++npos;
                }
            }
            if (npos == 0) {
                y.segment(psd_start, sn).setZero();
            } else {
                psd_buf.noalias() =
                    scaled.leftCols(npos) * vpos.leftCols(npos).transpose();
                svec_from_matrix(psd_buf, seg);
                y.segment(psd_start, sn) = seg;
            }
        }
    };

    // One DR application: ut = (I+Q)^{-1} z, u = Pi_C(2 ut - z), r = u - (2 ut - z).
    auto apply_step = [&](const Eigen::VectorXd& zin) {
        const double ztau_in = zin[dim - 1];
        solve_m(zin.segment(0, nvar) - ztau_in * c_hat,
                zin.segment(y_off, m) - ztau_in * b_hat, t1, t2);
        const double corr = (c_hat.dot(t1) + b_hat.dot(t2)) / denom;
        ut.segment(0, nvar) = t1 - corr * g1;
        ut.segment(y_off, m) = t2 - corr * g2;
        ut[dim - 1] =
            ztau_in + c_hat.dot(ut.segment(0, nvar)) + b_hat.dot(ut.segment(y_off, m));

        up = 2.0 * ut - zin;
        project_dual_cone(up.segment(y_off, m));
        up[dim - 1] = std::max(0.0, up[dim - 1]);
        rr = up - (2.0 * ut - zin);
        fvec = alpha * (up - ut);
    };

    // Candidate solution in the original scale, from the projected point and
    // its cone-complement.
    auto extract = [&](Candidate& cand) -> bool {
        const double tau = up[dim - 1];
        if (!(tau > 1e-11)) return false;
        cand.x = sc.col.cwiseProduct(up.segment(0, nvar)) / (tau * sc.rho_b);
        cand.y = sc.row.cwiseProduct(up.segment(y_off, m)) / (tau * sc.rho_c);
        cand.s = rr.segment(y_off, m).cwiseQuotient(sc.row) / (tau * sc.rho_b);
        const double pobj = c.dot(cand.x);
        const double dobj = b.dot(cand.y);
        cand.pres = (a_orig * cand.x + cand.s - b).norm() / (1.0 + b_norm);
        cand.dres = (at_orig * cand.y + c).norm() / (1.0 + c_norm);
        cand.gap_signed = pobj + dobj;
        cand.relgap =
            std::abs(cand.gap_signed) / (1.0 + std::abs(pobj) + std::abs(dobj));
        // Objective at the reported (slack-side) point: the weak-duality
        // relation dual >= primal - 1e-9 is enforced on what gets returned.
        double pobj_slack = 0.0;
        for (int k = 0; k < sn; ++k) pobj_slack += c[k] * cand.s[psd_start + k];
        for (int j = 0; j < problem.n_lin; ++j)
            pobj_slack += c[sn + j] * cand.s[cones.n_eq + m_ineq + j];
        cand.gap_slack = pobj_slack + dobj;
        return true;
    };

    SolveStatus status = SolveStatus::kMaxIters;
    auto check_certificates = [&]() -> bool {
        // Primal infeasibility: y in K*, b'y = -1, A'y ~ 0.
        Eigen::VectorXd ydir = sc.row.cwiseProduct(up.segment(y_off, m));
        const double bty = b.dot(ydir);
        if (bty < -1e-14) {
            ydir /= -bty;
            if ((at_orig * ydir).norm() <= opts.tol) {
                status = SolveStatus::kInfeasible;
                return true;
            }
        }
        // Unboundedness: direction with c'x = -1, Ax + s ~ 0, s in K.
        Eigen::VectorXd xdir = sc.col.cwiseProduct(up.segment(0, nvar));
        Eigen::VectorXd sdir = rr.segment(y_off, m).cwiseQuotient(sc.row);
        const double ctx = c.dot(xdir);
        if (ctx < -1e-14) {
            xdir /= -ctx;
            sdir /= -ctx;
            if ((a_orig * xdir + sdir).norm() <= opts.tol) {
                status = SolveStatus::kUnbounded;
                return true;
            }
        }
        return false;
    };

    // Safeguarded, restarted Anderson acceleration (type II) on the DR map.
    constexpr int kAaMemory = 10;
    Eigen::MatrixXd dz_hist(dim, kAaMemory), df_hist(dim, kAaMemory);
    Eigen::VectorXd z_basis(dim), f_basis(dim), z_fallback(dim);
    int aa_cols = 0;
    bool have_basis = false, speculative = false;
    double f_ref_norm = std::numeric_limits<double>::infinity();

    Candidate best, final_cand;
    bool have_best = false, converged = false;
    int iters_done = 0;
    long aa_rejects = 0;
    int last_rescale = 0, rescale_count = 0;

    for (int iter = 1; iter <= opts.max_iters; ++iter) {
        iters_done = iter;
        apply_step(z);
        const double fnorm = fvec.norm();

        if (opts.verbose && iter % 2000 == 0) {
            Candidate dbg;
            const bool ok = extract(dbg);
            std::fprintf(stderr,
                         "  iter %7d fnorm %.3e tau %.3e pres %.3e dres %.3e "
                         "gap %.3e rejects %ld\n",
                         iter, fnorm, up[dim - 1], ok ? dbg.pres : -1.0,
                         ok ? dbg.dres : -1.0, ok ? dbg.gap_signed : 0.0, aa_rejects);
        }

        if (speculative && fnorm > f_ref_norm) {
            // The accelerated candidate made the residual worse: fall back to
            // the plain DR step and restart the acceleration history.
            z = z_fallback;
            speculative = false;
            aa_cols = 0;
            have_basis = false;
            ++aa_rejects;
            continue;
        }
        speculative = false;

        if (iter % opts.check_interval == 0 || iter == opts.max_iters) {
            Candidate cand;
            if (extract(cand)) {
                const bool better =
                    !have_best || cand.merit() < best.merit() ||
                    (cand.gap_slack >= -1e-9 && best.gap_slack < -1e-9 &&
                     cand.merit() < 2.0 * best.merit());
                if (better) {
                    best = cand;
                    have_best = true;
                }
                if (cand.pres <= opts.tol && cand.dres <= opts.tol &&
                    cand.relgap <= 10.0 * opts.tol && cand.gap_slack >= -1e-9) {
                    final_cand = cand;
                    converged = true;
                    status = SolveStatus::kOptimal;
                    break;
                }
                // Keep the homogeneous iterate near tau ~ 1: when the scaled
                // solution norm drifts, rescale b and c by a common factor
                // (the map is positively homogeneous, so the warm restart is
                // exact up to the kappa component) and restart acceleration.
                const double tau = up[dim - 1];
                if (iter - last_rescale >= 250 && rescale_count < 100) {
                    const double sx = up.segment(0, nvar).norm() / tau;
                    const double sy = up.segment(y_off, m).norm() / tau;
                    const double s = std::sqrt(std::max(1e-12, sx * sy));
                    if (s > 4.0 || s < 0.25) {
                        sc.rho_b /= s;
                        sc.rho_c /= s;
                        b_hat /= s;
                        c_hat /= s;
                        g1 /= s;
                        g2 /= s;
                        denom = 1.0 + (denom - 1.0) / (s * s);
                        z.segment(0, nvar) /= s;
                        z.segment(y_off, m) /= s;
                        aa_cols = 0;
                        have_basis = false;
                        speculative = false;
                        last_rescale = iter;
                        ++rescale_count;
                        continue;
                    }
                }
            } else if (check_certificates()) {
                break;
            }
        }

        if (have_basis) {
            if (aa_cols == kAaMemory) {
                for (int k = 0; k + 1 < kAaMemory; ++k) {
                    dz_hist.col(k) = dz_hist.col(k + 1);
                    df_hist.col(k) = df_hist.col(k + 1);
                }
                --aa_cols;
            }
            dz_hist.col(aa_cols) = z - z_basis;
            df_hist.col(aa_cols) = fvec - f_basis;
            ++aa_cols;
        }
        z_basis = z;
        f_basis = fvec;
        f_ref_norm = fnorm;
        have_basis = true;
        z_fallback = z + fvec;  // plain DR step

        if (aa_cols > 0) {
            const auto df = df_hist.leftCols(aa_cols);
            const auto dz = dz_hist.leftCols(aa_cols);
            Eigen::MatrixXd gram_aa = df.transpose() * df;
            const double reg = 1e-12 * gram_aa.trace() / aa_cols +
                               std::numeric_limits<double>::min();
            gram_aa.diagonal().array() += reg;
            const Eigen::VectorXd gamma =
                gram_aa.ldlt().solve(df.transpose() * fvec);
            z = z_fallback - (dz + df) * gamma;
            speculative = true;
        } else {
            z = z_fallback;
        }
    }

    SdpSolution sol;
    sol.status = status;
    sol.iterations = iters_done;
    sol.psd_block = Eigen::MatrixXd::Zero(nd, nd);
    sol.lin_vars = Eigen::VectorXd::Zero(problem.n_lin);
    if (status == SolveStatus::kInfeasible || status == SolveStatus::kUnbounded)
        return sol;

    if (!converged) {
        if (!have_best) {
            Candidate cand;
            if (extract(cand)) {
                best = cand;
                have_best = true;
            }
        }
        if (!have_best) throw std::runtime_error("sdp::solve: no usable iterate produced");
        final_cand = best;
    }

    // The returned primal comes from the cone-feasible slack side: the PSD
    // block is positive semidefinite and the scalars are non-negative by
    // construction; equality residuals are measured on exactly this point.
    if (nd > 0) {
        matrix_from_svec(final_cand.s.segment(psd_start, sn), sol.psd_block);
        eig.compute(sol.psd_block);
        sol.primal_psd_mineig = eig.eigenvalues().minCoeff();
    }
    sol.lin_vars = final_cand.s.segment(cones.n_eq + m_ineq, problem.n_lin);

    for (const auto& eq : problem.equalities)
        sol.eq_residual_inf =
            std::max(sol.eq_residual_inf,
                     std::abs(eq.f.eval(sol.psd_block, sol.lin_vars) - eq.rhs));
    for (const auto& iq : problem.inequalities)
        sol.ineq_violation_inf =
            std::max(sol.ineq_violation_inf,
                     iq.f.eval(sol.psd_block, sol.lin_vars) - iq.rhs);

    sol.primal_value =
        problem.objective.eval(sol.psd_block, sol.lin_vars) + problem.objective_offset;
    sol.dual_feasibility_residual = (at_orig * final_cand.y + c).norm();
    // Same certified-bound convention as the interior-point backend: the
    // rigor margin is folded into the reported dual value when a feasible-set
    // norm bound is available.
    sol.dual_value = b.dot(final_cand.y) + problem.objective_offset +
                     sol.dual_feasibility_residual * problem.variable_norm_bound;
    sol.duality_gap = sol.dual_value - sol.primal_value;
    sol.dual_eq = final_cand.y.segment(0, m_eq);
    sol.dual_ineq = final_cand.y.segment(m_eq, m_ineq);
    return sol;
}

Eigen::MatrixXd HermitianEmbedding::embed(const Eigen::MatrixXcd& h) const {
    if (h.rows() != dim || h.cols() != dim)
        throw std::invalid_argument("embed: dimension mismatch");
    Eigen::MatrixXd m(real_dim, real_dim);
    const Eigen::MatrixXd re = h.real();
    const Eigen::MatrixXd im = h.imag();
    m.topLeftCorner(dim, dim) = re;
    m.bottomRightCorner(dim, dim) = re;
    m.topRightCorner(dim, dim) = -im;
    m.bottomLeftCorner(dim, dim) = im;
    return m;
}

Eigen::MatrixXcd HermitianEmbedding::extract(const Eigen::MatrixXd& m) const {
    if (m.rows() != real_dim || m.cols() != real_dim)
        throw std::invalid_argument("extract: dimension mismatch");
    Eigen::MatrixXcd g(dim, dim);
    g.real() = 0.5 * (m.topLeftCorner(dim, dim) + m.bottomRightCorner(dim, dim));
    g.imag() = 0.5 * (m.bottomLeftCorner(dim, dim) - m.topRightCorner(dim, dim));
    return g;
}

Eigen::MatrixXd HermitianEmbedding::embed_coefficient(const Eigen::MatrixXcd& c) const {
    return 0.5 * embed(c);
}

void HermitianEmbedding::add_entry_terms(std::vector<PsdTerm>& terms, int u, int v,
                                         std::complex<double> coeff,
                                         double weight) const {
    if (u < 0 || v < 0 || u >= dim || v >= dim)
        throw std::invalid_argument("add_entry_terms: index out of range");
    const double a_re = weight * coeff.real();
    const double a_im = weight * coeff.imag();
    if (u == v) {
        if (coeff.imag() != 0.0)
            throw std::invalid_argument("add_entry_terms: diagonal coefficient must be real");
        // Re G_uu = (M_uu + M_{u+n,u+n}) / 2
        terms.push_back({u, u, 0.5 * a_re});
        terms.push_back({u + dim, u + dim, 0.5 * a_re});
        return;
    }
    // Re(conj(coeff) G_uv) = Re(coeff) Re G_uv + Im(coeff) Im G_uv; the sign
    // of Im G flips with the orientation of (u, v). An off-diagonal PsdTerm
    // stands for the mirrored entry pair, hence the extra factor 1/2.
    const int i = std::min(u, v);
    const int j = std::max(u, v);
    const double sign = (u < v) ? 1.0 : -1.0;
    // Re G_ij = (M_ij + M_{i+n,j+n}) / 2
    terms.push_back({i, j, 0.25 * a_re});
    terms.push_back({i + dim, j + dim, 0.25 * a_re});
    // Im G_ij = (M_{i+n,j} - M_{i,j+n}) / 2, stored as (j, i+n) and (i, j+n)
    terms.push_back({j, i + dim, 0.25 * sign * a_im});
    terms.push_back({i, j + dim, -0.25 * sign * a_im});
}

HermitianEmbedding embed_hermitian(int dim) {
    if (dim < 1) throw std::invalid_argument("embed_hermitian: dim must be >= 1");
    return HermitianEmbedding{dim, 2 * dim};
}

}  // namespace qlimit::sdp
