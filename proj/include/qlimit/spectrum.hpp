#ifndef QLIMIT_SPECTRUM_HPP
#define QLIMIT_SPECTRUM_HPP

#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qlimit/limiter.hpp"

// Wavelength-dependent material data and the worst-case (maximum photon flux)
// wavelength search over a limiter + spectral-filter stack.

namespace qlimit::spectral {

struct SpectrumSample {
    double wavelength;              // m
    double loss_db_per_cm;          // >= 0
    std::optional<double> refractive_index;
};

struct MaterialSpectrum {
    std::string name;
    std::vector<SpectrumSample> samples;  // strictly increasing wavelength

    bool has_refractive_index() const;
    double min_wavelength() const { return samples.front().wavelength; }
    double max_wavelength() const { return samples.back().wavelength; }
    void validate() const;
};

// CSV: header `wavelength_nm,loss_db_per_cm[,refractive_index]`,
// `#` comment lines, `.` decimal point. Parse errors name the line number.
MaterialSpectrum load_spectrum(std::istream& in, const std::string& name = "");
MaterialSpectrum load_spectrum_file(const std::string& path);

// Linear interpolation in (wavelength, dB/cm). No extrapolation: out-of-range
// wavelengths throw std::out_of_range.
double loss_db_per_cm_at(const MaterialSpectrum& spectrum, double wavelength);

// Natural absorption coefficient, 1/m: loss_dB_per_cm * 100 * ln(10) / 10.
double absorption_at(const MaterialSpectrum& spectrum, double wavelength);

// Interpolated refractive index; `fallback` when the column is absent.
double refractive_index_at(const MaterialSpectrum& spectrum, double wavelength,
                           double fallback);

struct FilterElement {
    MaterialSpectrum spectrum;
    double thickness;  // m, > 0
};

struct FilterStack {
    std::vector<FilterElement> elements;
};

// Product over elements of e^{-alpha_i(lambda) * t_i}; empty stack -> 1.
double stack_transmittance(const FilterStack& stack, double wavelength);

struct WavelengthScanPoint {
    double wavelength;
    double absorption;        // acrylic alpha at this wavelength, 1/m
    double threshold_w;       // limiter threshold before the filter stack
    double p_in_at_max;
    double transmitted_w;     // after the filter stack
    double flux;              // photons/s
};

struct WorstCaseResult {
    double wavelength;
    double flux;
    WavelengthScanPoint detail;
};

// Scan the band on a uniform grid: at each wavelength rebuild the material
// (absorption from the table, toc scaled by f(n(lambda))/f(n(ref))), compute
// the limiting threshold, apply the stack, convert to photon flux, and return
// the argmax (ties resolved toward the smaller wavelength).
WorstCaseResult worst_case_wavelength(
    const phys::LimiterConfig& cfg, const MaterialSpectrum& acrylic,
    const FilterStack& stack, std::pair<double, double> band,
    double grid_step = 1e-9, std::vector<WavelengthScanPoint>* table = nullptr,
    int workers = 1);

}  // namespace qlimit::spectral

#endif
