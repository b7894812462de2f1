#ifndef QLIMIT_LIMITER_HPP
#define QLIMIT_LIMITER_HPP

#include <stdexcept>

// Steady-state model of a thermo-optical defocusing power limiter:
// an absorbing prism with negative dn/dT followed by a circular diaphragm.
// All quantities are SI (m, W, K) unless a name says otherwise.

namespace qlimit::phys {

inline constexpr double kPlanck = 6.62607015e-34;    // J s
inline constexpr double kLightSpeed = 299792458.0;   // m/s

struct MaterialProperties {
    double absorption_coeff = 25.95;       // alpha, 1/m
    double toc = -1.3e-4;                  // dn/dT, 1/K; negative for defocusing media
    double refractive_index = 1.47;        // n
    double thermal_conductivity = 0.19;    // k, W/(m K)
    double damage_power = 0.4;             // W; model invalid at or above this input
    double reference_wavelength = 1550e-9; // wavelength at which toc was measured

    void validate() const;
};

struct BeamProfile {
    double radius_1e = 0.14e-3;  // a: radius where intensity falls to 1/e of axial value

    void validate() const;
};

struct LimiterConfig {
    MaterialProperties material;
    BeamProfile beam;
    double prism_length = 101.6e-3;   // z extent of the prism
    double diaphragm_width = 750e-6;  // aperture DIAMETER; integration radius is width/2

    void validate() const;
};

struct ThresholdResult {
    double p_out_max = 0.0;   // power limiting threshold (max collectable output power)
    double p_in_at_max = 0.0; // input power attaining it
    bool saturated = false;   // true when the maximum is interior to the scan range
};

// (n^2 - 1)(n^2 + 2) / (6 n); wavelength dependence of the thermo-optical
// coefficient enters only through this factor.
double toc_dispersion_factor(double n);

// Steady-state intensity at radius r, depth z for input power p_in.
double intensity(double r, double z, const LimiterConfig& cfg, double p_in);

// Power collected through the diaphragm at the prism exit face,
// integrated by adaptive radial quadrature (relative error <= 1e-8).
double output_power(const LimiterConfig& cfg, double p_in);

// Low-power (linear regime) transmittance: e^{-alpha L} (1 - e^{-(w/2)^2/a^2}).
double low_power_transmittance(const LimiterConfig& cfg);

// Insertion loss of the linear regime as a positive dB value.
double insertion_loss_db(const LimiterConfig& cfg);

// Maximize output_power over p_in in (0, p_in_max]. The overload without a
// ceiling scans up to the material damage power.
ThresholdResult limiting_threshold(const LimiterConfig& cfg, double p_in_max);
ThresholdResult limiting_threshold(const LimiterConfig& cfg);

// power * wavelength / (h c), photons per second.
double photon_flux(double power, double wavelength);

// True iff the input power is strictly below the damage threshold.
// A false result means the steady-state model no longer applies.
bool damage_check(double p_in, const LimiterConfig& cfg);

}  // namespace qlimit::phys

#endif
