#include "qlimit/mdi.hpp"

#include <cmath>
#include <stdexcept>

namespace qlimit::mdi {

using std::complex;

void ChannelParams::validate() const {
    if (!(mu_a >= 0) || !(mu_b >= 0)) throw std::domain_error("mu must be >= 0");
    if (!(distance_km >= 0)) throw std::domain_error("distance must be >= 0");
    if (!(fiber_loss_db_per_km >= 0)) throw std::domain_error("fiber loss must be >= 0");
    auto prob = [](double v) { return v >= 0 && v <= 1; };
    if (!prob(det_efficiency)) throw std::domain_error("det_efficiency must be in [0,1]");
    if (!prob(dark_count)) throw std::domain_error("dark_count must be in [0,1]");
    if (!prob(misalignment)) throw std::domain_error("misalignment must be in [0,1]");
}

double ChannelParams::arm_transmittance() const {
    return det_efficiency *
           std::pow(10.0, -fiber_loss_db_per_km * (distance_km / 2.0) / 10.0);
}

void StatTable::validate(double tol) const {
    for (int s = 0; s < 16; ++s) {
        double sum = 0;
        for (int z = 0; z < 3; ++z) {
            const double v = p[z][s];
            if (!(v >= 0.0 && v <= 1.0))
                throw std::domain_error("StatTable: probability outside [0,1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > tol)
            throw std::domain_error("StatTable: outcome probabilities do not sum to 1");
    }
}

nlohmann::json StatTable::to_json() const {
    nlohmann::json j;
    for (int z = 0; z < 3; ++z) {
        nlohmann::json block;
        for (int x = 0; x < 4; ++x)
            for (int y = 0; y < 4; ++y)
                block[std::to_string(x) + std::to_string(y)] = p[z][x * 4 + y];
        j[outcome_name(Outcome(z))] = block;
    }
    return j;
}

StatTable StatTable::from_json(const nlohmann::json& j) {
    StatTable t;
    for (int z = 0; z < 3; ++z) {
        const auto& block = j.at(outcome_name(Outcome(z)));
        for (int x = 0; x < 4; ++x)
            for (int y = 0; y < 4; ++y)
                t.p[z][x * 4 + y] =
                    block.at(std::to_string(x) + std::to_string(y)).get<double>();
    }
    t.validate(1e-9);
    return t;
}

complex<double> quarter_phase(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

StatTable honest_statistics(const ChannelParams& params) {
    params.validate();
    const double eta = params.arm_transmittance();
    const double na = params.mu_a * eta;  // mean photon numbers at the node
    const double nb = params.mu_b * eta;
    const double visibility = 1.0 - 2.0 * params.misalignment;
    const double pdc = params.dark_count;

    StatTable t;
    for (int x = 0; x < 4; ++x) {
        for (int y = 0; y < 4; ++y) {
            // Re(conj(alpha) beta) with alpha = sqrt(na) i^x, beta = sqrt(nb) i^y.
            const double cross =
                std::sqrt(na * nb) * quarter_phase(y - x).real();
            const double i_left = 0.5 * (na + nb) + visibility * cross;
            const double i_right = 0.5 * (na + nb) - visibility * cross;
            const double q_l = 1.0 - (1.0 - pdc) * std::exp(-i_left);
            const double q_r = 1.0 - (1.0 - pdc) * std::exp(-i_right);
            t.at(Outcome::kLeft, x, y) = q_l * (1.0 - q_r);
            t.at(Outcome::kRight, x, y) = q_r * (1.0 - q_l);
            t.at(Outcome::kEmpty, x, y) =
                1.0 - t(Outcome::kLeft, x, y) - t(Outcome::kRight, x, y);
        }
    }
    t.validate();
    return t;
}

double p_pass(const StatTable& stats) {
    double sum = 0;
    for (int x : {0, 2})
        for (int y : {0, 2})
            sum += stats(Outcome::kLeft, x, y) + stats(Outcome::kRight, x, y);
    return 0.25 * sum;
}

double bit_error(const StatTable& stats) {
    const double pp = p_pass(stats);
    if (!(pp > 0))
        throw std::domain_error("bit_error: undefined statistic, p_pass = 0");
    // Errors are L clicks on anti-correlated key settings and R clicks on
    // correlated ones (Bob flips his bit when z = R).
    const double err = stats(Outcome::kLeft, 0, 2) + stats(Outcome::kLeft, 2, 0) +
                       stats(Outcome::kRight, 0, 0) + stats(Outcome::kRight, 2, 2);
    return err / (4.0 * pp);
}

SignalOverlaps signal_overlaps(double mu_a, double mu_b) {
    if (!(mu_a >= 0) || !(mu_b >= 0))
        throw std::domain_error("signal_overlaps: mu must be >= 0");
    SignalOverlaps ov;
    ov.lambda.resize(16, 16);
    for (int xp = 0; xp < 4; ++xp)
        for (int yp = 0; yp < 4; ++yp)
            for (int x = 0; x < 4; ++x)
                for (int y = 0; y < 4; ++y) {
                    // <e^{ix'pi/2} a | e^{ix pi/2} a> = exp(mu (i^{x-x'} - 1))
                    const complex<double> ea =
                        std::exp(mu_a * (quarter_phase(x - xp) - 1.0));
                    const complex<double> eb =
                        std::exp(mu_b * (quarter_phase(y - yp) - 1.0));
                    ov.lambda(xp * 4 + yp, x * 4 + y) = ea * eb;
                }
    return ov;
}

complex<double> trojan_phase_sum(const Eigen::Matrix4d& p_nm, int dx, int dy) {
    complex<double> sum{0.0, 0.0};
    for (int n = 0; n < 4; ++n)
        for (int m = 0; m < 4; ++m) {
            if (!(p_nm(n, m) >= 0))
                throw std::domain_error("trojan_phase_sum: negative P_nm entry");
            sum += p_nm(n, m) * quarter_phase(n * dx + m * dy);
        }
    return sum;
}

}  // namespace qlimit::mdi
