#include "qlimit/tha.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <thread>

namespace qlimit::tha {

using mdi::Outcome;
using std::complex;

namespace {

constexpr int kSettings = GramIndex::kSettings;

inline int p_index(int n, int m) { return n * 4 + m; }

inline int setting_x(int s) { return s / 4; }
inline int setting_y(int s) { return s % 4; }

constexpr double kGoldenRatio = 0.6180339887498949;

}  // namespace

void TrojanConstraint::validate() const {
    if (!(nu_a >= 0) || !(nu_b >= 0))
        throw std::domain_error("Trojan intensity nu must be >= 0");
}

void PhotonDistribution::validate(const TrojanConstraint& tc) const {
    tc.validate();
    double sum = 0, ea = 0, eb = 0;
    for (int n = 0; n < 4; ++n)
        for (int m = 0; m < 4; ++m) {
            if (!(p(n, m) >= 0))
                throw std::domain_error("PhotonDistribution: negative entry");
            sum += p(n, m);
            ea += n * p(n, m);
            eb += m * p(n, m);
        }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::domain_error("PhotonDistribution: entries must sum to 1");
    if (ea > tc.nu_a + 1e-9 || eb > tc.nu_b + 1e-9)
        throw std::domain_error("PhotonDistribution: energy constraint violated");
}

sdp::SdpProblem build_sdp(const mdi::StatTable& stats,
                          const mdi::SignalOverlaps& overlaps,
                          const TrojanConstraint& tc) {
    stats.validate(1e-9);
    tc.validate();
    const double pp = mdi::p_pass(stats);
    if (!(pp > 0))
        throw std::domain_error("build_sdp: degenerate statistics, p_pass = 0");

    const sdp::HermitianEmbedding emb = sdp::embed_hermitian(GramIndex::kDim);
    sdp::SdpProblem prob;
    prob.psd_dim = emb.real_dim;  // 96
    prob.n_lin = 16;

    // Diagonal equalities G[(z,xy),(z,xy)] = P(z|x,y).
    for (int z = 0; z < 3; ++z) {
        for (int s = 0; s < kSettings; ++s) {
            sdp::Constraint c;
            const int u = GramIndex::flatten(Outcome(z), setting_x(s), setting_y(s));
            emb.add_entry_terms(c.f.psd_terms, u, u, 1.0, 1.0);
            c.rhs = stats(Outcome(z), setting_x(s), setting_y(s));
            prob.equalities.push_back(std::move(c));
        }
    }

    // Isometry conservation per unordered setting pair, split into real and
    // imaginary parts:
    //   sum_z G[(z,s'),(z,s)] - sum_nm P_nm i^{n dx + m dy} Lambda_{s',s} = 0.
    for (int sa = 0; sa < kSettings; ++sa) {
        for (int sb = sa + 1; sb < kSettings; ++sb) {
            const int dx = setting_x(sb) - setting_x(sa);
            const int dy = setting_y(sb) - setting_y(sa);
            const complex<double> lam =
                overlaps.lambda(sa, sb);  // row = primed setting
            for (int part = 0; part < 2; ++part) {
                const complex<double> pick =
                    part == 0 ? complex<double>(1, 0) : complex<double>(0, 1);
                sdp::Constraint c;
                c.f.lin = Eigen::VectorXd::Zero(16);
                for (int z = 0; z < 3; ++z) {
                    const int i = z * kSettings + sa;
                    const int j = z * kSettings + sb;
                    emb.add_entry_terms(c.f.psd_terms, i, j, pick, 1.0);
                }
                for (int n = 0; n < 4; ++n)
                    for (int m = 0; m < 4; ++m) {
                        const complex<double> w =
                            mdi::quarter_phase(n * dx + m * dy) * lam;
                        c.f.lin[p_index(n, m)] =
                            part == 0 ? -w.real() : -w.imag();
                    }
                c.rhs = 0.0;
                prob.equalities.push_back(std::move(c));
            }
        }
    }

    // Photon number distribution: normalization and energy caps.
    {
        sdp::Constraint norm;
        norm.f.lin = Eigen::VectorXd::Ones(16);
        norm.rhs = 1.0;
        prob.equalities.push_back(std::move(norm));

        sdp::Constraint ea, ebc;
        ea.f.lin = Eigen::VectorXd::Zero(16);
        ebc.f.lin = Eigen::VectorXd::Zero(16);
        for (int n = 0; n < 4; ++n)
            for (int m = 0; m < 4; ++m) {
                ea.f.lin[p_index(n, m)] = double(n);
                ebc.f.lin[p_index(n, m)] = double(m);
            }
        ea.rhs = tc.nu_a;
        ebc.rhs = tc.nu_b;
        prob.inequalities.push_back(std::move(ea));
        prob.inequalities.push_back(std::move(ebc));
    }

    // e_ph = 1/2 + (1/(4 P_pass)) Re{ G_L00,L22 - G_R00,R22 - G_L02,L20 + G_R02,R20 }.
    const double w = 1.0 / (4.0 * pp);
    auto idx = [](Outcome z, int x, int y) { return GramIndex::flatten(z, x, y); };
    sdp::LinearFunctional eph;
    emb.add_entry_terms(eph.psd_terms, idx(Outcome::kLeft, 0, 0), idx(Outcome::kLeft, 2, 2), 1.0, w);
    emb.add_entry_terms(eph.psd_terms, idx(Outcome::kRight, 0, 0), idx(Outcome::kRight, 2, 2), 1.0, -w);
    emb.add_entry_terms(eph.psd_terms, idx(Outcome::kLeft, 0, 2), idx(Outcome::kLeft, 2, 0), 1.0, -w);
    emb.add_entry_terms(eph.psd_terms, idx(Outcome::kRight, 0, 2), idx(Outcome::kRight, 2, 0), 1.0, w);

    prob.objective = eph;
    prob.objective_offset = 0.5;

    // Cap e_ph <= 1/2, i.e. the linear part is <= 0.
    sdp::Constraint cap;
    cap.f = eph;
    cap.rhs = 0.0;
    prob.inequalities.push_back(std::move(cap));

    // Feasible-set norm bound: |G_uv| <= sqrt(d_u d_v) gives ||G||_F <= sum(diag),
    // the embedding doubles the squared norm, and ||p||_2 <= 1.
    double diag_sum = 0.0;
    for (int z = 0; z < 3; ++z)
        for (int s = 0; s < kSettings; ++s)
            diag_sum += stats(Outcome(z), setting_x(s), setting_y(s));
    prob.variable_norm_bound = std::sqrt(2.0 * diag_sum * diag_sum + 1.0);
    return prob;
}

PhaseErrorResult phase_error_bound(const mdi::StatTable& stats,
                                   const mdi::SignalOverlaps& overlaps,
                                   const TrojanConstraint& tc,
                                   const sdp::SolveOptions& opts,
                                   sdp::ExternalSdpSolver* external) {
    const sdp::SdpProblem prob = build_sdp(stats, overlaps, tc);
    sdp::SdpSolution sol =
        external ? external->solve(prob, opts) : sdp::solve(prob, opts);
    if (sol.status != sdp::SolveStatus::kOptimal) {
        throw std::runtime_error(
            std::string("phase_error_bound: solver did not converge (status ") +
            sdp::status_name(sol.status) + ", " + std::to_string(sol.iterations) +
            " iterations)");
    }
    PhaseErrorResult out;
    // The solver already folds the rigor margin (dual residual x norm bound)
    // into dual_value; recorded here for reporting.
    out.rigor_margin = sol.dual_feasibility_residual * prob.variable_norm_bound;
    const double raw = sol.dual_value;
    out.e_ph_upper = std::clamp(raw, 0.0, 0.5);
    out.clamped = raw > 0.5 || raw < 0.0;
    out.solution = std::move(sol);
    return out;
}

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("binary_entropy: argument outside [0,1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double key_rate(double p_pass, double e_bit, double e_ph_upper) {
    if (!(p_pass >= 0.0 && p_pass <= 1.0))
        throw std::domain_error("key_rate: p_pass outside [0,1]");
    const double r =
        p_pass * (1.0 - binary_entropy(e_ph_upper) - binary_entropy(e_bit));
    return std::max(0.0, r);
}

KeyRatePoint evaluate_point(const mdi::ChannelParams& params, double nu,
                            const sdp::SolveOptions& opts) {
    KeyRatePoint pt;
    pt.distance_km = params.distance_km;
    pt.nu = nu;
    pt.mu = params.mu_a;
    const mdi::StatTable stats = mdi::honest_statistics(params);
    const mdi::SignalOverlaps overlaps = mdi::signal_overlaps(params.mu_a, params.mu_b);
    pt.p_pass = mdi::p_pass(stats);
    pt.e_bit = mdi::bit_error(stats);
    const PhaseErrorResult per =
        phase_error_bound(stats, overlaps, TrojanConstraint{nu, nu}, opts);
    pt.e_ph_upper = per.e_ph_upper;
    pt.rate = key_rate(pt.p_pass, pt.e_bit, pt.e_ph_upper);
    pt.ok = true;
    pt.solver_status = sdp::status_name(per.solution.status);
    pt.solver_iterations = per.solution.iterations;
    pt.solver_dual_residual = per.solution.dual_feasibility_residual;
    return pt;
}

KeyRatePoint optimize_intensity(double distance_km, const TrojanConstraint& tc,
                                const mdi::ChannelParams& params_template,
                                std::pair<double, double> mu_range,
                                const sdp::SolveOptions& opts) {
    tc.validate();
    if (!(mu_range.first > 0 && mu_range.first <= mu_range.second &&
          mu_range.second <= 1.0))
        throw std::domain_error("optimize_intensity: mu range must lie in (0, 1]");

    auto eval_mu = [&](double mu) {
        mdi::ChannelParams p = params_template;
        p.distance_km = distance_km;
        p.mu_a = p.mu_b = mu;
        return evaluate_point(p, tc.nu_a, opts);
    };

    if (mu_range.first == mu_range.second) return eval_mu(mu_range.first);

    const double llo = std::log(mu_range.first);
    const double lhi = std::log(mu_range.second);

    // Coarse pre-scan; ties resolved toward the smaller mu.
    constexpr int kScan = 16;
    std::vector<KeyRatePoint> scan(kScan);
    int best = 0;
    for (int i = 0; i < kScan; ++i) {
        scan[i] = eval_mu(std::exp(llo + (lhi - llo) * i / double(kScan - 1)));
        if (scan[i].rate > scan[best].rate) best = i;
    }

    if (scan[best].rate <= 0.0) {
        // No key anywhere in range: report the range minimum with rate 0.
        return scan[0];
    }

    int maxima = 0;
    for (int i = 0; i < kScan; ++i) {
        const bool up = i == 0 || scan[i].rate > scan[i - 1].rate;
        const bool down = i == kScan - 1 || scan[i].rate > scan[i + 1].rate;
        if (up && down) ++maxima;
    }
    if (maxima > 1) {
        // Multi-modal pre-scan: dense grid argmax instead of golden section.
        KeyRatePoint winner = scan[best];
        constexpr int kDense = 48;
        for (int i = 0; i < kDense; ++i) {
            const KeyRatePoint cand =
                eval_mu(std::exp(llo + (lhi - llo) * i / double(kDense - 1)));
            if (cand.rate > winner.rate ||
                (cand.rate == winner.rate && cand.mu < winner.mu))
                winner = cand;
        }
        return winner;
    }

    double lo = llo + (lhi - llo) * std::max(0, best - 1) / double(kScan - 1);
    double hi = llo + (lhi - llo) * std::min(kScan - 1, best + 1) / double(kScan - 1);
    KeyRatePoint winner = scan[best];
    double x1 = hi - kGoldenRatio * (hi - lo);
    double x2 = lo + kGoldenRatio * (hi - lo);
    KeyRatePoint f1 = eval_mu(std::exp(x1));
    KeyRatePoint f2 = eval_mu(std::exp(x2));
    auto consider = [&](const KeyRatePoint& cand) {
        if (cand.rate > winner.rate ||
            (cand.rate == winner.rate && cand.mu < winner.mu))
            winner = cand;
    };
    consider(f1);
    consider(f2);
    for (int iter = 0; iter < 10; ++iter) {
        if (f1.rate >= f2.rate) {  // ties move toward smaller mu
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGoldenRatio * (hi - lo);
            f1 = eval_mu(std::exp(x1));
            consider(f1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGoldenRatio * (hi - lo);
            f2 = eval_mu(std::exp(x2));
            consider(f2);
        }
    }
    return winner;
}

std::vector<KeyRatePoint> keyrate_sweep(const std::vector<double>& distances,
                                        const std::vector<double>& nus,
                                        const mdi::ChannelParams& params_template,
                                        const SweepConfig& cfg) {
    struct Task {
        double nu;
        double distance;
    };
    std::vector<Task> tasks;
    for (double nu : nus)
        for (double d : distances) tasks.push_back({nu, d});

    std::vector<KeyRatePoint> out(tasks.size());
    auto run_task = [&](std::size_t i) {
        const Task& t = tasks[i];
        try {
            if (cfg.fixed_mu) {
                mdi::ChannelParams p = params_template;
                p.distance_km = t.distance;
                p.mu_a = p.mu_b = *cfg.fixed_mu;
                out[i] = evaluate_point(p, t.nu, cfg.solver);
            } else {
                out[i] = optimize_intensity(t.distance, TrojanConstraint{t.nu, t.nu},
                                            params_template, cfg.mu_range, cfg.solver);
            }
        } catch (const std::exception& e) {
            KeyRatePoint pt;
            pt.distance_km = t.distance;
            pt.nu = t.nu;
            pt.ok = false;
            pt.solver_status = std::string("error: ") + e.what();
            out[i] = pt;
        }
    };

    const int workers = std::max(1, cfg.workers);
    if (workers == 1 || tasks.size() < 2) {
        for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w]() {
                for (std::size_t i = w; i < tasks.size(); i += workers) run_task(i);
            });
        for (auto& th : pool) th.join();
    }
    return out;
}

double attenuation_budget(double p_limit, double clock_hz, double wavelength,
                          double nu_target) {
    if (!(p_limit > 0) || !(clock_hz > 0) || !(nu_target > 0))
        throw std::domain_error("attenuation_budget: inputs must be positive");
    const double photons_per_pulse = phys::photon_flux(p_limit, wavelength) / clock_hz;
    // The Trojan light passes the attenuator twice, hence half the dB budget.
    return (10.0 / 2.0) * std::log10(photons_per_pulse / nu_target);
}

double source_intensity(double p_laser, double clock_hz, double wavelength,
                        double atten_db) {
    if (!(p_laser > 0) || !(clock_hz > 0) || !(atten_db >= 0))
        throw std::domain_error("source_intensity: inputs must be positive");
    const double photons_per_pulse = phys::photon_flux(p_laser, wavelength) / clock_hz;
    return photons_per_pulse * std::pow(10.0, -atten_db / 10.0);
}

double watt_to_dbm(double power_w) { return 10.0 * std::log10(power_w / 1e-3); }

double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

BlindingReport blinding_check(const phys::LimiterConfig& cfg, double blinding_power) {
    if (!std::isfinite(blinding_power) || !(blinding_power > 0))
        throw std::domain_error("blinding_check: blinding power must be finite and positive");
    const phys::ThresholdResult th = phys::limiting_threshold(cfg);
    BlindingReport r;
    r.threshold_w = th.p_out_max;
    r.threshold_dbm = watt_to_dbm(th.p_out_max);
    r.p_in_at_max = th.p_in_at_max;
    r.insertion_loss_db = phys::insertion_loss_db(cfg);
    r.blinding_power_w = blinding_power;
    r.is_protected = th.p_out_max < blinding_power;
    return r;
}

Eigen::MatrixXcd honest_gram(const mdi::ChannelParams& params) {
    params.validate();
    const double eta = params.arm_transmittance();
    const double costh = 1.0 - 2.0 * params.misalignment;
    const double sinth = std::sqrt(std::max(0.0, 1.0 - costh * costh));
    const double pdc = params.dark_count;
    const double amp_a = std::sqrt(params.mu_a * eta);
    const double amp_b = std::sqrt(params.mu_b * eta);
    const double loss_a = std::sqrt((1.0 - eta) * params.mu_a);
    const double loss_b = std::sqrt((1.0 - eta) * params.mu_b);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    // Per-setting mode amplitudes: matched and mismatched components at each
    // detector, plus the loss (environment) modes.
    std::array<complex<double>, kSettings> ml, pl, mr, pr, ea, eb;
    for (int s = 0; s < kSettings; ++s) {
        const complex<double> g = amp_a * mdi::quarter_phase(setting_x(s));
        const complex<double> d = amp_b * mdi::quarter_phase(setting_y(s));
        ml[s] = (g * costh + d) * inv_sqrt2;
        mr[s] = (g * costh - d) * inv_sqrt2;
        pl[s] = g * sinth * inv_sqrt2;
        pr[s] = g * sinth * inv_sqrt2;
        ea[s] = loss_a * mdi::quarter_phase(setting_x(s));
        eb[s] = loss_b * mdi::quarter_phase(setting_y(s));
    }

    // Square roots of the POVM elements, expressed by their values on the four
    // joint detector sectors (non-vacuum/vacuum at L and R).
    const double s_pdc = std::sqrt(pdc);
    const double s_omp = std::sqrt(1.0 - pdc);
    const std::array<std::array<double, 4>, 3> sector = {{
        {0.0, s_omp, 0.0, s_pdc * s_omp},                              // L
        {0.0, 0.0, s_omp, s_pdc * s_omp},                              // R
        {1.0, s_pdc, s_pdc, std::sqrt(1.0 - 2.0 * pdc * (1.0 - pdc))}  // empty
    }};

    Eigen::MatrixXcd gram(GramIndex::kDim, GramIndex::kDim);
    for (int sa = 0; sa < kSettings; ++sa) {
        for (int sb = sa; sb < kSettings; ++sb) {
            const complex<double> s_left =
                std::conj(ml[sa]) * ml[sb] + std::conj(pl[sa]) * pl[sb];
            const complex<double> s_right =
                std::conj(mr[sa]) * mr[sb] + std::conj(pr[sa]) * pr[sb];
            const double n_sum =
                std::norm(ml[sa]) + std::norm(pl[sa]) + std::norm(mr[sa]) +
                std::norm(pr[sa]) + std::norm(ml[sb]) + std::norm(pl[sb]) +
                std::norm(mr[sb]) + std::norm(pr[sb]);
            const double w = std::exp(-0.5 * n_sum);
            const complex<double> envo =
                std::exp(-(1.0 - eta) * (params.mu_a + params.mu_b) +
                         std::conj(ea[sa]) * ea[sb] + std::conj(eb[sa]) * eb[sb]);
            const std::array<complex<double>, 4> basis = {
                (std::exp(s_left) - 1.0) * (std::exp(s_right) - 1.0),
                std::exp(s_left) - 1.0, std::exp(s_right) - 1.0, 1.0};
            for (int za = 0; za < 3; ++za) {
                for (int zb = 0; zb < 3; ++zb) {
                    if (sa == sb && zb < za) continue;
                    complex<double> val{0.0, 0.0};
                    for (int k = 0; k < 4; ++k)
                        val += sector[za][k] * sector[zb][k] * basis[k];
                    val *= envo * w;
                    const int i = za * kSettings + sa;
                    const int j = zb * kSettings + sb;
                    gram(i, j) = val;
                    gram(j, i) = std::conj(val);
                }
            }
        }
    }
    return gram;
}

}  // namespace qlimit::tha
