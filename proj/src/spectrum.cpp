#include "qlimit/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qlimit::spectral {

namespace {

constexpr double kDbPerCmToPerMeter = 100.0 * M_LN10 / 10.0;

[[noreturn]] void parse_fail(const std::string& name, int line, const std::string& msg) {
    throw std::runtime_error("spectrum '" + name + "' line " + std::to_string(line) +
                             ": " + msg);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_number(const std::string& s, const std::string& name, int line,
                    const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) parse_fail(name, line, std::string("malformed ") + what);
        return v;
    } catch (const std::invalid_argument&) {
        parse_fail(name, line, std::string("malformed ") + what);
    } catch (const std::out_of_range&) {
        parse_fail(name, line, std::string("out-of-range ") + what);
    }
}

// Locate the interpolation segment for `wavelength`, throwing on range violation.
std::size_t segment_index(const MaterialSpectrum& sp, double wavelength) {
    if (wavelength < sp.min_wavelength() || wavelength > sp.max_wavelength()) {
        throw std::out_of_range(
            "spectrum '" + sp.name + "': wavelength " +
            std::to_string(wavelength * 1e9) + " nm outside tabulated range [" +
            std::to_string(sp.min_wavelength() * 1e9) + ", " +
            std::to_string(sp.max_wavelength() * 1e9) + "] nm");
    }
    auto it = std::upper_bound(
        sp.samples.begin(), sp.samples.end(), wavelength,
        [](double w, const SpectrumSample& s) { return w < s.wavelength; });
    std::size_t hi = std::size_t(it - sp.samples.begin());
    if (hi == 0) return 0;
    if (hi >= sp.samples.size()) hi = sp.samples.size() - 1;
    return hi - 1;
}

double lerp_at(const MaterialSpectrum& sp, double wavelength, bool use_index,
               double fallback = 0.0) {
    const std::size_t i = segment_index(sp, wavelength);
    const SpectrumSample& s0 = sp.samples[i];
    const SpectrumSample& s1 = sp.samples[std::min(i + 1, sp.samples.size() - 1)];
    auto value = [&](const SpectrumSample& s) {
        return use_index ? (s.refractive_index ? *s.refractive_index : fallback)
                         : s.loss_db_per_cm;
    };
    if (wavelength == s0.wavelength) return value(s0);  // exact node round-trips
    if (wavelength == s1.wavelength) return value(s1);
    const double t = (wavelength - s0.wavelength) / (s1.wavelength - s0.wavelength);
    return value(s0) + t * (value(s1) - value(s0));
}

}  // namespace

bool MaterialSpectrum::has_refractive_index() const {
    return !samples.empty() &&
           std::all_of(samples.begin(), samples.end(),
                       [](const SpectrumSample& s) { return s.refractive_index.has_value(); });
}

void MaterialSpectrum::validate() const {
    if (samples.size() < 2)
        throw std::runtime_error("spectrum '" + name + "': need at least 2 samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].loss_db_per_cm >= 0))
            throw std::runtime_error("spectrum '" + name + "': negative loss");
        if (i > 0 && !(samples[i].wavelength > samples[i - 1].wavelength))
            throw std::runtime_error("spectrum '" + name + "': wavelengths not strictly increasing");
    }
}

MaterialSpectrum load_spectrum(std::istream& in, const std::string& name) {
    MaterialSpectrum sp;
    sp.name = name;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    bool has_index_column = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto fields = split_csv(t);
        if (!header_seen) {
            if (fields.size() < 2 || fields[0] != "wavelength_nm" ||
                fields[1] != "loss_db_per_cm")
                parse_fail(name, line_no,
                           "expected header `wavelength_nm,loss_db_per_cm[,refractive_index]`");
            if (fields.size() == 3 && fields[2] == "refractive_index")
                has_index_column = true;
            else if (fields.size() > 2)
                parse_fail(name, line_no, "unexpected extra header column");
            header_seen = true;
            continue;
        }
        const std::size_t expected = has_index_column ? 3 : 2;
        if (fields.size() != expected)
            parse_fail(name, line_no, "expected " + std::to_string(expected) + " fields, got " +
                                          std::to_string(fields.size()));
        SpectrumSample s;
        s.wavelength = parse_number(fields[0], name, line_no, "wavelength") * 1e-9;
        s.loss_db_per_cm = parse_number(fields[1], name, line_no, "loss");
        if (has_index_column)
            s.refractive_index = parse_number(fields[2], name, line_no, "refractive index");
        if (!(s.wavelength > 0)) parse_fail(name, line_no, "wavelength must be positive");
        if (s.loss_db_per_cm < 0) parse_fail(name, line_no, "loss must be non-negative");
        if (s.refractive_index && !(*s.refractive_index > 1))
            parse_fail(name, line_no, "refractive index must exceed 1");
        if (!sp.samples.empty() && !(s.wavelength > sp.samples.back().wavelength))
            parse_fail(name, line_no, "wavelengths must be strictly increasing");
        sp.samples.push_back(s);
    }
    if (!header_seen) parse_fail(name, line_no, "missing header line");
    sp.validate();
    return sp;
}

MaterialSpectrum load_spectrum_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spectrum file: " + path);
    return load_spectrum(in, path);
}

double loss_db_per_cm_at(const MaterialSpectrum& spectrum, double wavelength) {
    spectrum.validate();
    return lerp_at(spectrum, wavelength, false);
}

double absorption_at(const MaterialSpectrum& spectrum, double wavelength) {
    return loss_db_per_cm_at(spectrum, wavelength) * kDbPerCmToPerMeter;
}

double refractive_index_at(const MaterialSpectrum& spectrum, double wavelength,
                           double fallback) {
    spectrum.validate();
    if (!spectrum.has_refractive_index()) return fallback;
    return lerp_at(spectrum, wavelength, true, fallback);
}

double stack_transmittance(const FilterStack& stack, double wavelength) {
    double t = 1.0;
    for (const FilterElement& el : stack.elements) {
        if (!(el.thickness > 0))
            throw std::domain_error("filter stack: element thickness must be > 0");
        t *= std::exp(-absorption_at(el.spectrum, wavelength) * el.thickness);
    }
    return t;
}

WorstCaseResult worst_case_wavelength(const phys::LimiterConfig& cfg,
                                      const MaterialSpectrum& acrylic,
                                      const FilterStack& stack,
                                      std::pair<double, double> band,
                                      double grid_step,
                                      std::vector<WavelengthScanPoint>* table,
                                      int workers) {
    cfg.validate();
    acrylic.validate();
    if (!(grid_step > 0)) throw std::domain_error("worst_case_wavelength: grid step must be > 0");
    if (!(band.second >= band.first))
        throw std::domain_error("worst_case_wavelength: empty band");

    const int n = int(std::floor((band.second - band.first) / grid_step + 1e-9)) + 1;
    std::vector<WavelengthScanPoint> points(n);

    const double n_ref = refractive_index_at(acrylic, cfg.material.reference_wavelength,
                                             cfg.material.refractive_index);
    const double f_ref = phys::toc_dispersion_factor(n_ref);

    auto eval_point = [&](int i) {
        const double lambda = band.first + i * grid_step;
        phys::LimiterConfig local = cfg;
        local.material.absorption_coeff = absorption_at(acrylic, lambda);
        const double n_here =
            refractive_index_at(acrylic, lambda, cfg.material.refractive_index);
        local.material.refractive_index = n_here;
        local.material.toc =
            cfg.material.toc * phys::toc_dispersion_factor(n_here) / f_ref;
        const phys::ThresholdResult th = phys::limiting_threshold(local);
        const double transmitted = th.p_out_max * stack_transmittance(stack, lambda);
        points[i] = WavelengthScanPoint{lambda,
                                        local.material.absorption_coeff,
                                        th.p_out_max,
                                        th.p_in_at_max,
                                        transmitted,
                                        phys::photon_flux(transmitted, lambda)};
    };

    workers = std::max(1, workers);
    if (workers == 1 || n < 2 * workers) {
        for (int i = 0; i < n; ++i) eval_point(i);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                try {
                    for (int i = w; i < n; i += workers) eval_point(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    // Deterministic argmax regardless of worker partitioning; ties -> smaller wavelength.
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (points[i].flux > points[best].flux) best = i;

    if (table) *table = points;
    return WorstCaseResult{points[best].wavelength, points[best].flux, points[best]};
}

}  // namespace qlimit::spectral
