#ifndef QLIMIT_MDI_HPP
#define QLIMIT_MDI_HPP

#include <array>
#include <complex>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

// Honest-device model of phase-encoding MDI QKD: conditional statistics
// P(z|x,y) at the untrusted node, derived error rates, and the characterized
// source-state overlaps.

namespace qlimit::mdi {

struct ChannelParams {
    double mu_a = 0.0183;             // mean photon number per pulse at Alice's source
    double mu_b = 0.0183;
    double distance_km = 0.0;         // total Alice-Bob distance; node equidistant
    double fiber_loss_db_per_km = 0.2;
    double det_efficiency = 0.85;
    double dark_count = 1e-7;         // click probability per gate with no light
    double misalignment = 0.02;       // interference visibility reduction e_ali

    void validate() const;
    // Source-to-detector transmittance of one arm (fiber half + detector).
    double arm_transmittance() const;
};

enum class Outcome : int { kLeft = 0, kRight = 1, kEmpty = 2 };

inline const char* outcome_name(Outcome z) {
    switch (z) {
        case Outcome::kLeft: return "L";
        case Outcome::kRight: return "R";
        default: return "empty";
    }
}

// Conditional probabilities p(z | x, y), z in {L, R, empty}, x, y in 0..3.
struct StatTable {
    std::array<std::array<double, 16>, 3> p{};  // [z][x*4+y]

    double operator()(Outcome z, int x, int y) const {
        return p[int(z)][x * 4 + y];
    }
    double& at(Outcome z, int x, int y) { return p[int(z)][x * 4 + y]; }
    void validate(double tol = 1e-12) const;

    nlohmann::json to_json() const;
    static StatTable from_json(const nlohmann::json& j);
};

StatTable honest_statistics(const ChannelParams& params);

// (1/4) sum over x,y in {0,2} of P(L|x,y) + P(R|x,y).
double p_pass(const StatTable& stats);

// Key-basis bit error rate after Bob's flip on z = R.
double bit_error(const StatTable& stats);

// Gram matrix of the characterized source states: 16 x 16 with
// lambda(u', u) = <state(x',y') | state(x,y)> at the source (pre-channel).
struct SignalOverlaps {
    Eigen::MatrixXcd lambda;  // row = (x',y') flattened x'*4+y', col = (x,y)

    std::complex<double> operator()(int xp, int yp, int x, int y) const {
        return lambda(xp * 4 + yp, x * 4 + y);
    }
};

SignalOverlaps signal_overlaps(double mu_a, double mu_b);

// sum_{n,m in 0..3} P_nm i^{n dx + m dy}; dx, dy are taken mod 4.
std::complex<double> trojan_phase_sum(const Eigen::Matrix4d& p_nm, int dx, int dy);

// i^k for integer k (exact, no trig roundoff).
std::complex<double> quarter_phase(int k);

}  // namespace qlimit::mdi

#endif
