#include "qlimit/limiter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace qlimit::phys {

namespace {

// Gauss-Kronrod 7-15 pair on [-1, 1] (QUADPACK dqk15 abscissae/weights).
constexpr std::array<double, 8> kKronrodX = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr std::array<double, 4> kGaussW = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Panel {
    double lo, hi;
    double integral;
    double error;
};

template <typename F>
Panel evaluate_panel(const F& f, double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    const double f_mid = f(mid);
    double kronrod = kKronrodW[7] * f_mid;
    double gauss = kGaussW[3] * f_mid;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodX[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        kronrod += kKronrodW[i] * fsum;
        if (i % 2 == 1) gauss += kGaussW[i / 2] * fsum;
    }
    kronrod *= half;
    gauss *= half;
    return Panel{lo, hi, kronrod, std::abs(kronrod - gauss)};
}

// Globally adaptive quadrature: repeatedly bisect the panel with the largest
// error estimate until the summed error meets the relative tolerance.
template <typename F>
double adaptive_integrate(const F& f, double lo, double hi, double rel_tol,
                          const char* what) {
    constexpr int kMaxPanels = 4000;
    std::vector<Panel> panels;
    panels.push_back(evaluate_panel(f, lo, hi));
    while (true) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            total += panels[i].integral;
            err += panels[i].error;
            if (panels[i].error > panels[worst].error) worst = i;
        }
        const double scale = std::max(std::abs(total),
                                      std::numeric_limits<double>::min());
        if (err <= rel_tol * scale || panels[worst].error == 0.0) return total;
        if (panels.size() >= kMaxPanels) {
            throw std::runtime_error(
                std::string(what) + ": quadrature failed to converge (" +
                std::to_string(panels.size()) + " panels, abs error " +
                std::to_string(err) + ", estimate " + std::to_string(total) + ")");
        }
        const Panel p = panels[worst];
        const double mid = 0.5 * (p.lo + p.hi);
        panels[worst] = evaluate_panel(f, p.lo, mid);
        panels.push_back(evaluate_panel(f, mid, p.hi));
    }
}

constexpr double kGoldenRatio = 0.6180339887498949;

}  // namespace

void MaterialProperties::validate() const {
    if (!(absorption_coeff > 0)) throw std::domain_error("absorption_coeff must be > 0");
    if (!(thermal_conductivity > 0)) throw std::domain_error("thermal_conductivity must be > 0");
    if (!(toc < 0)) throw std::domain_error("toc must be negative (defocusing medium)");
    if (!(refractive_index > 1)) throw std::domain_error("refractive_index must exceed 1");
    if (!(damage_power > 0)) throw std::domain_error("damage_power must be > 0");
    if (!(reference_wavelength > 0)) throw std::domain_error("reference_wavelength must be > 0");
}

void BeamProfile::validate() const {
    if (!(radius_1e > 0)) throw std::domain_error("beam radius_1e must be > 0");
}

void LimiterConfig::validate() const {
    material.validate();
    beam.validate();
    if (!(prism_length > 0)) throw std::domain_error("prism_length must be > 0");
    if (!(diaphragm_width > 0)) throw std::domain_error("diaphragm_width must be > 0");
}

double toc_dispersion_factor(double n) {
    // n = 1 is the vacuum limit where the factor vanishes exactly.
    if (!(n >= 1.0)) throw std::domain_error("toc_dispersion_factor: n must be >= 1");
    const double n2 = n * n;
    return (n2 - 1.0) * (n2 + 2.0) / (6.0 * n);
}

double intensity(double r, double z, const LimiterConfig& cfg, double p_in) {
    cfg.validate();
    if (!(r >= 0)) throw std::domain_error("intensity: r must be >= 0");
    if (!(z >= 0) || z > cfg.prism_length)
        throw std::domain_error("intensity: z outside [0, prism_length]");
    if (!(p_in >= 0)) throw std::domain_error("intensity: p_in must be >= 0");

    const MaterialProperties& m = cfg.material;
    const double a2 = cfg.beam.radius_1e * cfg.beam.radius_1e;
    const double gauss = std::exp(-r * r / a2);
    const double i0 = p_in * gauss / (M_PI * a2);
    // z - (1 - e^{-alpha z})/alpha, computed via expm1 for small alpha z.
    const double path = z + std::expm1(-m.absorption_coeff * z) / m.absorption_coeff;
    const double lens = m.toc * p_in * gauss * path /
                        (M_PI * m.thermal_conductivity * m.refractive_index * a2);
    return i0 * std::exp(-m.absorption_coeff * z + lens);
}

double output_power(const LimiterConfig& cfg, double p_in) {
    cfg.validate();
    if (!(p_in >= 0)) throw std::domain_error("output_power: p_in must be >= 0");
    if (p_in == 0.0) return 0.0;

    const double r_max = 0.5 * cfg.diaphragm_width;
    const double L = cfg.prism_length;
    const auto integrand = [&](double r) {
        return intensity(r, L, cfg, p_in) * 2.0 * M_PI * r;
    };
    return adaptive_integrate(integrand, 0.0, r_max, 1e-8, "output_power");
}

double low_power_transmittance(const LimiterConfig& cfg) {
    cfg.validate();
    const double a = cfg.beam.radius_1e;
    const double half_w = 0.5 * cfg.diaphragm_width;
    const double aperture = -std::expm1(-(half_w * half_w) / (a * a));
    return std::exp(-cfg.material.absorption_coeff * cfg.prism_length) * aperture;
}

double insertion_loss_db(const LimiterConfig& cfg) {
    return -10.0 * std::log10(low_power_transmittance(cfg));
}

ThresholdResult limiting_threshold(const LimiterConfig& cfg, double p_in_max) {
    cfg.validate();
    if (!(p_in_max > 0)) throw std::domain_error("limiting_threshold: scan ceiling must be > 0");

    // Log-spaced bracketing over [1 uW, ceiling].
    const double p_lo = std::min(1e-6, p_in_max);
    const int n_grid = 48;
    std::vector<double> p(n_grid), out(n_grid);
    const double log_lo = std::log(p_lo), log_hi = std::log(p_in_max);
    for (int i = 0; i < n_grid; ++i) {
        p[i] = std::exp(log_lo + (log_hi - log_lo) * i / double(n_grid - 1));
        out[i] = output_power(cfg, p[i]);
    }
    int best = 0;
    for (int i = 1; i < n_grid; ++i)
        if (out[i] > out[best]) best = i;  // ties keep the smaller p_in

    if (best == n_grid - 1) {
        // Maximizer at the ceiling: no interior limiting point found.
        return ThresholdResult{out[best], p[best], false};
    }

    // Golden-section refinement in log(p_in) on the bracketing interval.
    double lo = std::log(p[std::max(0, best - 1)]);
    double hi = std::log(p[best + 1]);
    double x1 = hi - kGoldenRatio * (hi - lo);
    double x2 = lo + kGoldenRatio * (hi - lo);
    double f1 = output_power(cfg, std::exp(x1));
    double f2 = output_power(cfg, std::exp(x2));
    for (int iter = 0; iter < 90 && (hi - lo) > 1e-12; ++iter) {
        if (f1 > f2 || (f1 == f2 && x1 < x2)) {  // ties toward smaller p_in
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGoldenRatio * (hi - lo);
            f1 = output_power(cfg, std::exp(x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGoldenRatio * (hi - lo);
            f2 = output_power(cfg, std::exp(x2));
        }
    }
    const double p_star = std::exp(f1 >= f2 ? x1 : x2);
    const double out_star = std::max(f1, f2);
    return ThresholdResult{out_star, p_star, true};
}

ThresholdResult limiting_threshold(const LimiterConfig& cfg) {
    cfg.validate();
    return limiting_threshold(cfg, cfg.material.damage_power);
}

double photon_flux(double power, double wavelength) {
    if (!(power >= 0)) throw std::domain_error("photon_flux: power must be >= 0");
    if (!(wavelength > 0)) throw std::domain_error("photon_flux: wavelength must be > 0");
    return power * wavelength / (kPlanck * kLightSpeed);
}

bool damage_check(double p_in, const LimiterConfig& cfg) {
    cfg.validate();
    if (!(p_in >= 0)) throw std::domain_error("damage_check: p_in must be >= 0");
    return p_in < cfg.material.damage_power;
}

}  // namespace qlimit::phys
