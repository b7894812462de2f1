#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qlimit/sdp.hpp"
#include "sdp_detail.hpp"

// Primal-dual Mehrotra predictor-corrector with the HKM direction.
// Internal form: minimize <C,X> + cl'xl  s.t.  <A_i,X> + lp_i'xl = b_i,
// X PSD, xl >= 0, where xl holds the problem's non-negative scalars followed
// by one slack per inequality. The Schur complement is assembled entry-wise
// from the sparse constraint matrices, which keeps the cost at
// O((sum_i nnz_i)^2) per iteration.

namespace qlimit::sdp {

namespace {

struct ConRow {
    std::vector<int> ei, ej;       // matrix entries, both orientations
    std::vector<double> ev;
    std::vector<std::pair<int, double>> lp;
    double b = 0.0;
    double mat_norm = 0.0;  // Frobenius norm of the matrix part
};

double dot_matrix(const ConRow& r, const Eigen::MatrixXd& k) {
    double v = 0.0;
    for (std::size_t a = 0; a < r.ev.size(); ++a) v += r.ev[a] * k(r.ei[a], r.ej[a]);
    return v;
}

double dot_lp(const ConRow& r, const Eigen::VectorXd& v) {
    double s = 0.0;
    for (const auto& [idx, w] : r.lp) s += w * v[idx];
    return s;
}

// Largest step alpha with B + alpha*dB staying PSD, via the generalized
// eigenvalue bound lambda_min(L^-1 dB L^-T).
double psd_step_length(const Eigen::LLT<Eigen::MatrixXd>& llt,
                       const Eigen::MatrixXd& db) {
    Eigen::MatrixXd w = llt.matrixL().solve(db);
    w = llt.matrixL().solve(w.transpose()).transpose();
    // Symmetrize against roundoff before the eigenvalue call.
    w = 0.5 * (w + w.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff();
    if (lmin >= 0) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
}

double lp_step_length(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) {
    double a = std::numeric_limits<double>::infinity();
    for (int i = 0; i < x.size(); ++i)
        if (dx[i] < 0) a = std::min(a, -x[i] / dx[i]);
    return a;
}

}  // namespace

SdpSolution solve_interior_point(const SdpProblem& problem, const SolveOptions& opts) {
    const int nd = problem.psd_dim;
    const int n_lin = problem.n_lin;
    const int m_eq = int(problem.equalities.size());
    const int m_ineq = int(problem.inequalities.size());
    const int m = m_eq + m_ineq;
    const int nl = n_lin + m_ineq;
    if (m == 0) throw std::invalid_argument("interior point: need at least one constraint");

    // Constraint rows and objective in internal (minimization) form.
    std::vector<ConRow> rows(m);
    auto fill_row = [&](ConRow& r, const LinearFunctional& f, double rhs) {
        for (const PsdTerm& t : f.psd_terms) {
            r.ei.push_back(t.row);
            r.ej.push_back(t.col);
            r.ev.push_back(t.value);
            if (t.row != t.col) {
                r.ei.push_back(t.col);
                r.ej.push_back(t.row);
                r.ev.push_back(t.value);
                r.mat_norm += 2.0 * t.value * t.value;
            } else {
                r.mat_norm += t.value * t.value;
            }
        }
        r.mat_norm = std::sqrt(r.mat_norm);
        for (int j = 0; j < int(f.lin.size()); ++j)
            if (f.lin[j] != 0.0) r.lp.emplace_back(j, f.lin[j]);
        r.b = rhs;
    };
    for (int i = 0; i < m_eq; ++i)
        fill_row(rows[i], problem.equalities[i].f, problem.equalities[i].rhs);
    for (int k = 0; k < m_ineq; ++k) {
        ConRow& r = rows[m_eq + k];
        fill_row(r, problem.inequalities[k].f, problem.inequalities[k].rhs);
        r.lp.emplace_back(n_lin + k, 1.0);  // slack
    }

    Eigen::MatrixXd cmat = Eigen::MatrixXd::Zero(nd, nd);
    for (const PsdTerm& t : problem.objective.psd_terms) {
        cmat(t.row, t.col) -= t.value;
        if (t.row != t.col) cmat(t.col, t.row) -= t.value;
    }
    Eigen::VectorXd cl = Eigen::VectorXd::Zero(nl);
    for (int j = 0; j < int(problem.objective.lin.size()); ++j)
        cl[j] = -problem.objective.lin[j];

    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) b[i] = rows[i].b;

    const double norm_b = b.norm();
    const double norm_c = std::sqrt(cmat.squaredNorm() + cl.squaredNorm());

    // Starting point: scaled identity, large enough to cover data magnitudes.
    double xi_p = 10.0, xi_d = 10.0;
    for (const ConRow& r : rows) {
        double an = r.mat_norm;
        for (const auto& [idx, w] : r.lp) an = std::hypot(an, w);
        xi_p = std::max(xi_p, 2.0 * (1.0 + std::abs(r.b)) / (1.0 + an));
    }
    xi_d = std::max(xi_d, 0.3 * norm_c);

    Eigen::MatrixXd x_mat = xi_p * Eigen::MatrixXd::Identity(nd, nd);
    Eigen::MatrixXd s_mat = xi_d * Eigen::MatrixXd::Identity(nd, nd);
    Eigen::VectorXd xl = Eigen::VectorXd::Constant(nl, xi_p);
    Eigen::VectorXd sl = Eigen::VectorXd::Constant(nl, xi_d);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

    const int max_iters = std::min(opts.max_iters, 200);
    const double tol = opts.tol;

    SdpSolution sol;
    sol.status = SolveStatus::kMaxIters;
    int stall_count = 0;
    double best_merit = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd best_x = x_mat, best_s = s_mat;
    Eigen::VectorXd best_xl = xl, best_y = y, best_sl = sl;

    Eigen::MatrixXd inv_s(nd, nd), r_d(nd, nd), kbuf(nd, nd), ds_mat(nd, nd),
        dx_mat(nd, nd), ds_aff(nd, nd), dx_aff(nd, nd);
    Eigen::VectorXd r_p(m), rd_l(nl), t_x(m), t_s(m), t_rd(m), rhs(m), dy(m),
        dsl(nl), dxl(nl), dsl_aff(nl), dxl_aff(nl);
    Eigen::MatrixXd schur(m, m);

    int iter = 0;
    for (iter = 1; iter <= max_iters; ++iter) {
        // Residuals and duality measure.
        for (int i = 0; i < m; ++i)
            r_p[i] = rows[i].b - dot_matrix(rows[i], x_mat) - dot_lp(rows[i], xl);
        r_d = cmat - s_mat;
        rd_l = cl - sl;
        for (int i = 0; i < m; ++i) {
            const ConRow& r = rows[i];
            if (y[i] != 0.0) {
                for (std::size_t a = 0; a < r.ev.size(); ++a)
                    r_d(r.ei[a], r.ej[a]) -= y[i] * r.ev[a];
                for (const auto& [idx, w] : r.lp) rd_l[idx] -= y[i] * w;
            }
        }
        const double pobj = cmat.cwiseProduct(x_mat).sum() + cl.dot(xl);
        const double dobj = b.dot(y);
        const double mu =
            (x_mat.cwiseProduct(s_mat).sum() + xl.dot(sl)) / double(nd + nl);
        const double pres = r_p.norm() / (1.0 + norm_b);
        const double dres =
            std::sqrt(r_d.squaredNorm() + rd_l.squaredNorm()) / (1.0 + norm_c);
        const double relgap =
            std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        // In maximization terms dual - primal = pobj - dobj.
        const double gap_signed = pobj - dobj;

        if (opts.verbose)
            std::fprintf(stderr, "  ipm %3d mu %.3e pres %.3e dres %.3e gap %.3e\n",
                         iter, mu, pres, dres, relgap);

        // The gap converges to a problem-dependent floor on weakly degenerate
        // instances; it gets its own tolerance. The feasibility tolerance
        // applies to the residuals.
        const double gap_scaled = relgap / std::max(opts.gap_tol / tol, 1.0);
        const double merit = std::max({pres, dres, gap_scaled});
        if (merit < 0.98 * best_merit) stall_count = 0;
        if (merit < best_merit) {
            best_merit = merit;
            best_x = x_mat;
            best_s = s_mat;
            best_xl = xl;
            best_y = y;
            best_sl = sl;
        }
        if (pres <= tol && dres <= tol && relgap <= opts.gap_tol &&
            gap_signed >= -1e-9) {
            sol.status = SolveStatus::kOptimal;
            best_x = x_mat;
            best_s = s_mat;
            best_xl = xl;
            best_y = y;
            best_sl = sl;
            break;
        }
        if (++stall_count >= 8) break;  // no measurable progress; report best

        // Divergence heuristics with certificate confirmation.
        const double ynorm = y.lpNorm<Eigen::Infinity>();
        if (ynorm > 1e9 * (1.0 + norm_b)) {
            Eigen::VectorXd yn = y / ynorm;
            Eigen::MatrixXd z = Eigen::MatrixXd::Zero(nd, nd);
            Eigen::VectorXd zl = Eigen::VectorXd::Zero(nl);
            for (int i = 0; i < m; ++i) {
                const ConRow& r = rows[i];
                for (std::size_t a = 0; a < r.ev.size(); ++a)
                    z(r.ei[a], r.ej[a]) += yn[i] * r.ev[a];
                for (const auto& [idx, w] : r.lp) zl[idx] += yn[i] * w;
            }
            double zmax = zl.size() ? zl.maxCoeff() : 0.0;
            if (nd > 0) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ez(
                    z, Eigen::EigenvaluesOnly);
                zmax = std::max(zmax, ez.eigenvalues().maxCoeff());
            }
            if (b.dot(yn) > 1e-8 && zmax <= 1e-8) {
                sol.status = SolveStatus::kInfeasible;
                sol.iterations = iter;
                sol.psd_block = Eigen::MatrixXd::Zero(nd, nd);
                sol.lin_vars = Eigen::VectorXd::Zero(n_lin);
                return sol;
            }
        }
        if (pobj < -1e9 * (1.0 + norm_c + norm_b) && pres <= 1e-6) {
            sol.status = SolveStatus::kUnbounded;
            sol.iterations = iter;
            sol.psd_block = Eigen::MatrixXd::Zero(nd, nd);
            sol.lin_vars = Eigen::VectorXd::Zero(n_lin);
            return sol;
        }

        Eigen::LLT<Eigen::MatrixXd> llt_s, llt_x;
        if (nd > 0) {
            llt_s.compute(s_mat);
            llt_x.compute(x_mat);
            if (llt_s.info() != Eigen::Success || llt_x.info() != Eigen::Success)
                break;  // numerical breakdown; report best iterate
            inv_s = llt_s.solve(Eigen::MatrixXd::Identity(nd, nd));
            kbuf.noalias() = x_mat * r_d * inv_s;
        }

        // Schur complement M_ij = tr(A_i X A_j S^-1) + sum_l lp_i lp_j x_l/s_l.
        schur.setZero();
        for (int i = 0; i < m; ++i) {
            const ConRow& ri = rows[i];
            for (int j = i; j < m; ++j) {
                const ConRow& rj = rows[j];
                double acc = 0.0;
                if (!ri.ev.empty() && !rj.ev.empty()) {
                    for (std::size_t a2 = 0; a2 < ri.ev.size(); ++a2) {
                        const int p = ri.ei[a2], q = ri.ej[a2];
                        const double va = ri.ev[a2];
                        for (std::size_t b2 = 0; b2 < rj.ev.size(); ++b2)
                            acc += va * rj.ev[b2] * x_mat(q, rj.ei[b2]) *
                                   inv_s(rj.ej[b2], p);
                    }
                }
                for (const auto& [ia, wa] : ri.lp)
                    for (const auto& [ib, wb] : rj.lp)
                        if (ia == ib) acc += wa * wb * xl[ia] / sl[ia];
                schur(i, j) = acc;
                schur(j, i) = acc;
            }
        }
        schur.diagonal().array() +=
            1e-13 * (1.0 + schur.diagonal().lpNorm<Eigen::Infinity>());
        Eigen::LDLT<Eigen::MatrixXd> mfac(schur);
        if (mfac.info() != Eigen::Success) break;

        for (int i = 0; i < m; ++i) {
            const ConRow& r = rows[i];
            t_x[i] = rows[i].b - r_p[i];
            double ts = nd > 0 ? dot_matrix(r, inv_s) : 0.0;
            double trd = nd > 0 ? dot_matrix(r, kbuf) : 0.0;
            for (const auto& [idx, w] : r.lp) {
                ts += w / sl[idx];
                trd += w * xl[idx] * rd_l[idx] / sl[idx];
            }
            t_s[i] = ts;
            t_rd[i] = trd;
        }

        auto solve_refined = [&](const Eigen::VectorXd& r) {
            Eigen::VectorXd d = mfac.solve(r);
            d += mfac.solve(r - schur * d);  // one step of iterative refinement
            return d;
        };

        // Predictor (affine scaling, mu target 0).
        rhs = r_p + t_x + t_rd;
        dy = solve_refined(rhs);
        ds_aff = r_d;
        dsl_aff = rd_l;
        for (int i = 0; i < m; ++i) {
            const ConRow& r = rows[i];
            for (std::size_t a2 = 0; a2 < r.ev.size(); ++a2)
                ds_aff(r.ei[a2], r.ej[a2]) -= dy[i] * r.ev[a2];
            for (const auto& [idx, w] : r.lp) dsl_aff[idx] -= dy[i] * w;
        }
        if (nd > 0) {
            kbuf.noalias() = x_mat * ds_aff * inv_s;
            dx_aff = -x_mat - 0.5 * (kbuf + kbuf.transpose());
        }
        for (int l = 0; l < nl; ++l)
            dxl_aff[l] = -xl[l] - xl[l] * dsl_aff[l] / sl[l];

        double ap_aff = 1.0, ad_aff = 1.0;
        if (nd > 0) {
            ap_aff = std::min(ap_aff, psd_step_length(llt_x, dx_aff));
            ad_aff = std::min(ad_aff, psd_step_length(llt_s, ds_aff));
        }
        ap_aff = std::min(ap_aff, lp_step_length(xl, dxl_aff));
        ad_aff = std::min(ad_aff, lp_step_length(sl, dsl_aff));
        ap_aff = std::min(1.0, ap_aff);
        ad_aff = std::min(1.0, ad_aff);

        double mu_aff =
            ((x_mat + ap_aff * dx_aff).cwiseProduct(s_mat + ad_aff * ds_aff).sum() +
             (xl + ap_aff * dxl_aff).dot(sl + ad_aff * dsl_aff)) /
            double(nd + nl);
        mu_aff = std::max(mu_aff, 0.0);
        const double sigma =
            std::clamp(std::pow(mu_aff / std::max(mu, 1e-300), 3.0), 1e-8, 0.99);

        // Corrector.
        rhs = r_p + t_x + t_rd - (sigma * mu) * t_s;
        if (nd > 0) {
            kbuf.noalias() = dx_aff * ds_aff * inv_s;
            for (int i = 0; i < m; ++i) rhs[i] += dot_matrix(rows[i], kbuf);
        }
        for (int i = 0; i < m; ++i) {
            double corr = 0.0;
            for (const auto& [idx, w] : rows[i].lp)
                corr += w * dxl_aff[idx] * dsl_aff[idx] / sl[idx];
            rhs[i] += corr;
        }
        dy = solve_refined(rhs);
        ds_mat = r_d;
        dsl = rd_l;
        for (int i = 0; i < m; ++i) {
            const ConRow& r = rows[i];
            for (std::size_t a2 = 0; a2 < r.ev.size(); ++a2)
                ds_mat(r.ei[a2], r.ej[a2]) -= dy[i] * r.ev[a2];
            for (const auto& [idx, w] : r.lp) dsl[idx] -= dy[i] * w;
        }
        if (nd > 0) {
            kbuf.noalias() = x_mat * ds_mat * inv_s;
            dx_mat = sigma * mu * inv_s - x_mat - 0.5 * (kbuf + kbuf.transpose());
            kbuf.noalias() = dx_aff * ds_aff * inv_s;
            dx_mat -= 0.5 * (kbuf + kbuf.transpose());
        }
        for (int l = 0; l < nl; ++l)
            dxl[l] = (sigma * mu - xl[l] * sl[l] - dxl_aff[l] * dsl_aff[l]) / sl[l] -
                     xl[l] * dsl[l] / sl[l];

        double ap = 1.0, ad = 1.0;
        if (nd > 0) {
            ap = std::min(ap, psd_step_length(llt_x, dx_mat));
            ad = std::min(ad, psd_step_length(llt_s, ds_mat));
        }
        ap = std::min(ap, lp_step_length(xl, dxl));
        ad = std::min(ad, lp_step_length(sl, dsl));
        const double gamma = 0.9 + 0.09 * std::min({1.0, ap, ad});
        ap = std::min(1.0, gamma * ap);
        ad = std::min(1.0, gamma * ad);

        x_mat += ap * dx_mat;
        xl += ap * dxl;
        y += ad * dy;
        s_mat += ad * ds_mat;
        sl += ad * dsl;
    }
    sol.iterations = std::min(iter, max_iters);

    // Report from the best iterate. The PSD block is interior (positive
    // definite) by construction; inequality duals are clamped to the sign
    // valid for the certificate before residuals are measured.
    x_mat = best_x;
    s_mat = best_s;
    xl = best_xl;
    y = best_y;
    sl = best_sl;

    // Primal polish: equality correction that is least-norm in the metric
    // weighted by the current interior point, Delta = X (sum_i lambda_i A_i) X
    // (and xl^2-weighted on the scalar block). It cancels the equality
    // residual exactly and preserves positivity when the correction is small,
    // which removes the residual floor late interior iterations leave behind.
    {
        auto residual_vec = [&](const Eigen::MatrixXd& xm,
                                const Eigen::VectorXd& xv, Eigen::VectorXd& out) {
            for (int i = 0; i < m; ++i)
                out[i] = rows[i].b - dot_matrix(rows[i], xm) - dot_lp(rows[i], xv);
        };
        Eigen::VectorXd rp_cur(m);
        residual_vec(x_mat, xl, rp_cur);
        if (rp_cur.lpNorm<Eigen::Infinity>() > 1e-13) {
            Eigen::MatrixXd gpol(m, m);
            for (int i = 0; i < m; ++i) {
                const ConRow& ri = rows[i];
                for (int j = i; j < m; ++j) {
                    const ConRow& rj = rows[j];
                    double acc = 0.0;
                    for (std::size_t a2 = 0; a2 < ri.ev.size(); ++a2) {
                        const int p = ri.ei[a2], q = ri.ej[a2];
                        const double va = ri.ev[a2];
                        for (std::size_t b2 = 0; b2 < rj.ev.size(); ++b2)
                            acc += va * rj.ev[b2] * x_mat(q, rj.ei[b2]) *
                                   x_mat(rj.ej[b2], p);
                    }
                    for (const auto& [ia, wa] : ri.lp)
                        for (const auto& [ib, wb] : rj.lp)
                            if (ia == ib) acc += wa * wb * xl[ia] * xl[ia];
                    gpol(i, j) = acc;
                    gpol(j, i) = acc;
                }
            }
            gpol.diagonal().array() +=
                1e-14 * (1.0 + gpol.diagonal().lpNorm<Eigen::Infinity>());
            Eigen::LDLT<Eigen::MatrixXd> pfac(gpol);
            Eigen::VectorXd lam = pfac.solve(rp_cur);
            lam += pfac.solve(rp_cur - gpol * lam);
            for (int damp = 0; damp < 6; ++damp) {
                Eigen::MatrixXd wsum = Eigen::MatrixXd::Zero(nd, nd);
                Eigen::VectorXd xl_new = xl;
                for (int i = 0; i < m; ++i) {
                    const ConRow& r = rows[i];
                    for (std::size_t a2 = 0; a2 < r.ev.size(); ++a2)
                        wsum(r.ei[a2], r.ej[a2]) += lam[i] * r.ev[a2];
                    for (const auto& [idx, w] : r.lp)
                        xl_new[idx] += lam[i] * w * xl[idx] * xl[idx];
                }
                Eigen::MatrixXd x_new = x_mat;
                if (nd > 0) x_new += x_mat * wsum * x_mat;
                bool ok = (xl_new.array() >= 0.0).all();
                if (ok && nd > 0)
                    ok = Eigen::LLT<Eigen::MatrixXd>(x_new).info() == Eigen::Success;
                if (ok) {
                    Eigen::VectorXd rp_new(m);
                    residual_vec(x_new, xl_new, rp_new);
                    if (rp_new.lpNorm<Eigen::Infinity>() <
                        rp_cur.lpNorm<Eigen::Infinity>()) {
                        x_mat = x_new;
                        xl = xl_new;
                    }
                    break;
                }
                lam *= 0.5;
            }
        }
    }

    for (int k = 0; k < m_ineq; ++k)
        y[m_eq + k] = std::min(y[m_eq + k], 0.0);

    r_d = cmat - s_mat;
    Eigen::VectorXd rd_vars = cl - sl;  // residual over (p, slacks); slack
    for (int i = 0; i < m; ++i) {       // columns are excluded from the norm
        const ConRow& r = rows[i];
        for (std::size_t a2 = 0; a2 < r.ev.size(); ++a2)
            r_d(r.ei[a2], r.ej[a2]) -= y[i] * r.ev[a2];
        for (const auto& [idx, w] : r.lp) rd_vars[idx] -= y[i] * w;
    }

    sol.psd_block = x_mat;
    sol.lin_vars = xl.head(n_lin);
    if (nd > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x_mat,
                                                           Eigen::EigenvaluesOnly);
        sol.primal_psd_mineig = eig.eigenvalues().minCoeff();
    }
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
    sol.dual_feasibility_residual =
        std::sqrt(r_d.squaredNorm() + rd_vars.head(n_lin).squaredNorm());
    // When the caller supplied a feasible-set norm bound, the reported dual
    // value is the certified bound: raw dual objective plus the rigor margin
    // covering dual infeasibility. Without a bound the raw value is reported.
    sol.dual_value = -b.dot(y) + problem.objective_offset +
                     sol.dual_feasibility_residual * problem.variable_norm_bound;
    sol.duality_gap = sol.dual_value - sol.primal_value;
    sol.dual_eq = -y.head(m_eq);
    sol.dual_ineq = -y.segment(m_eq, m_ineq);

    // The polished point may satisfy the tolerances even when the interior
    // iteration exited on a stall; judge the final status on what is returned.
    if (sol.status == SolveStatus::kMaxIters) {
        const double pres_f = sol.eq_residual_inf / (1.0 + norm_b);
        const double dres_f = sol.dual_feasibility_residual / (1.0 + norm_c);
        const double relgap_f =
            std::abs(sol.duality_gap) /
            (1.0 + std::abs(sol.primal_value) + std::abs(sol.dual_value));
        if (pres_f <= tol && sol.ineq_violation_inf <= tol * (1.0 + norm_b) &&
            dres_f <= tol && relgap_f <= opts.gap_tol && sol.duality_gap >= -1e-9)
            sol.status = SolveStatus::kOptimal;
    }
    return sol;
}

}  // namespace qlimit::sdp
