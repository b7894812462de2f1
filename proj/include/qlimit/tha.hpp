#ifndef QLIMIT_THA_HPP
#define QLIMIT_THA_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qlimit/limiter.hpp"
#include "qlimit/mdi.hpp"
#include "qlimit/sdp.hpp"

// Security bounds for phase-encoding MDI QKD under energy-constrained
// Trojan-horse attacks: the Gram-matrix SDP bounding the phase error rate,
// the Shor-Preskill rate, intensity optimization, and the engineering
// calculators (attenuation budget, source intensity, blinding margin).

namespace qlimit::tha {

struct TrojanConstraint {
    double nu_a = 0.0;  // mean Trojan photon number at Alice's output
    double nu_b = 0.0;

    void validate() const;
};

struct PhotonDistribution {
    Eigen::Matrix4d p = Eigen::Matrix4d::Zero();  // P_nm, n (rows) to Alice

    void validate(const TrojanConstraint& tc) const;
};

// Fixed flattening of Eve's side-information vectors e^z_{xy} into the
// 48-dim Gram matrix: z-major, then x, then y.
struct GramIndex {
    static constexpr int kOutcomes = 3;
    static constexpr int kSettings = 16;
    static constexpr int kDim = kOutcomes * kSettings;

    static int flatten(mdi::Outcome z, int x, int y) {
        return int(z) * kSettings + x * 4 + y;
    }
    static mdi::Outcome outcome_of(int idx) { return mdi::Outcome(idx / kSettings); }
    static int x_of(int idx) { return (idx % kSettings) / 4; }
    static int y_of(int idx) { return (idx % kSettings) % 4; }
};

struct KeyRatePoint {
    double distance_km = 0.0;
    double nu = 0.0;
    double mu = 0.0;
    double p_pass = 0.0;
    double e_bit = 0.0;
    double e_ph_upper = 0.0;
    double rate = 0.0;
    bool ok = false;
    std::string solver_status;
    int solver_iterations = 0;
    double solver_dual_residual = 0.0;
};

// Assemble the phase-error maximization over (G, P_nm): 48-dim Hermitian PSD
// block (embedded as a 96-dim real symmetric block), 16 non-negative scalars,
// 48 diagonal equalities, 240 pair equalities (real/imag), the distribution
// normalization, two energy inequalities and the e_ph <= 1/2 cap.
sdp::SdpProblem build_sdp(const mdi::StatTable& stats,
                          const mdi::SignalOverlaps& overlaps,
                          const TrojanConstraint& tc);

struct PhaseErrorResult {
    double e_ph_upper = 0.5;
    double rigor_margin = 0.0;  // dual residual x feasible-set norm bound
    bool clamped = false;       // raw certificate fell outside [0, 1/2]
    sdp::SdpSolution solution;
};

// Certified upper bound min(1/2, dual + margin). Solver failure throws; it is
// never silently converted into a usable bound.
PhaseErrorResult phase_error_bound(const mdi::StatTable& stats,
                                   const mdi::SignalOverlaps& overlaps,
                                   const TrojanConstraint& tc,
                                   const sdp::SolveOptions& opts = {},
                                   sdp::ExternalSdpSolver* external = nullptr);

double binary_entropy(double p);

// max{0, p_pass [1 - h2(e_ph) - h2(e_bit)]}.
double key_rate(double p_pass, double e_bit, double e_ph_upper);

// Full pipeline at fixed intensity mu_a = mu_b = mu.
KeyRatePoint evaluate_point(const mdi::ChannelParams& params, double nu,
                            const sdp::SolveOptions& opts = {});

// Golden-section search over mu (assumed unimodal; a 16-point pre-scan falls
// back to a dense grid argmax when several local maxima show up).
KeyRatePoint optimize_intensity(double distance_km, const TrojanConstraint& tc,
                                const mdi::ChannelParams& params_template,
                                std::pair<double, double> mu_range,
                                const sdp::SolveOptions& opts = {});

struct SweepConfig {
    std::optional<double> fixed_mu;           // unset: optimize per point
    std::pair<double, double> mu_range = {1e-3, 0.5};
    sdp::SolveOptions solver;
    int workers = 1;
};

// Cartesian sweep ordered by (nu, distance); per-point failures are recorded
// in the row and the sweep continues.
std::vector<KeyRatePoint> keyrate_sweep(const std::vector<double>& distances,
                                        const std::vector<double>& nus,
                                        const mdi::ChannelParams& params_template,
                                        const SweepConfig& cfg = {});

// Attenuation (dB) such that Trojan light capped at p_limit and attenuated
// twice carries at most nu_target photons per clock period.
double attenuation_budget(double p_limit, double clock_hz, double wavelength,
                          double nu_target);

// Signal intensity mu from laser power through a single pass of the attenuator.
double source_intensity(double p_laser, double clock_hz, double wavelength,
                        double atten_db);

struct BlindingReport {
    bool is_protected = false;
    double threshold_w = 0.0;
    double threshold_dbm = 0.0;
    double insertion_loss_db = 0.0;
    double p_in_at_max = 0.0;
    double blinding_power_w = 0.0;
};

// Protected iff the limiter threshold is strictly below the power required to
// blind the detectors.
BlindingReport blinding_check(const phys::LimiterConfig& cfg, double blinding_power);

// Gram matrix of one explicit honest realization (loss + mode mismatch +
// threshold detectors with dark counts) matching honest_statistics and
// signal_overlaps exactly; primal-feasible for the nu = 0 problem.
Eigen::MatrixXcd honest_gram(const mdi::ChannelParams& params);

double watt_to_dbm(double power_w);
double dbm_to_watt(double dbm);

}  // namespace qlimit::tha

#endif
