#include "qdev/ler.hpp"

#include <cmath>
#include <set>

namespace qdev {

namespace {

void require_positive(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
        throw Error(ErrorCode::InvalidInput, std::string(name) + " must be positive");
    }
}

constexpr double kFourPiSq =
    constants::kTwoPi * constants::kTwoPi; // (2π)² shows up in every line fit

} // namespace

void LerDesign::validate() const {
    require_positive(inductance_h, "inductance");
    require_positive(stray_capacitance_f, "stray capacitance");
    require_positive(cap_per_length_f_per_m, "capacitance per length");
    require_positive(fin_epsilon_r, "relative permittivity");
}

void FinGeometry::validate() const {
    require_positive(plate_height_m, "plate height");
    require_positive(dielectric_thickness_m, "dielectric thickness");
    require_positive(epsilon_r, "relative permittivity");
}

double resonant_frequency(double inductance_h, double capacitance_f) {
    require_positive(inductance_h, "inductance");
    require_positive(capacitance_f, "capacitance");
    return 1.0 / (constants::kTwoPi * std::sqrt(inductance_h * capacitance_f));
}

C0Fit fit_c0(const std::vector<LengthFrequencyPoint>& points, double inductance_h) {
    require_positive(inductance_h, "inductance");
    std::set<double> distinct;
    for (const auto& p : points) {
        if (!std::isfinite(p.length_m) || p.length_m < 0.0) {
            throw Error(ErrorCode::InvalidInput, "lengths must be finite and non-negative");
        }
        if (!std::isfinite(p.f_r_hz) || p.f_r_hz <= 0.0) {
            throw Error(ErrorCode::InvalidInput, "resonant frequencies must be positive");
        }
        distinct.insert(p.length_m);
    }
    if (distinct.size() < 2) {
        throw Error(ErrorCode::InsufficientData,
                    "need at least 2 distinct lengths for the line fit");
    }

    const double n = static_cast<double>(points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : points) {
        const double y = 1.0 / (p.f_r_hz * p.f_r_hz);
        sx += p.length_m;
        sy += y;
        sxx += p.length_m * p.length_m;
        sxy += p.length_m * y;
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    if (intercept <= 0.0) {
        throw Error(ErrorCode::UnphysicalFit,
                    "fitted intercept is not positive; stray capacitance undefined");
    }

    C0Fit fit;
    fit.c0_f_per_m = slope / (kFourPiSq * inductance_h);
    fit.c_stray_f = intercept / (kFourPiSq * inductance_h);
    fit.f_at_zero_hz = resonant_frequency(inductance_h, fit.c_stray_f);

    double ssr = 0.0;
    for (const auto& p : points) {
        const double y = 1.0 / (p.f_r_hz * p.f_r_hz);
        const double r = y - (slope * p.length_m + intercept);
        ssr += r * r;
    }
    fit.rms_residual = std::sqrt(ssr / n);
    return fit;
}

double parallel_plate_estimate(const FinGeometry& geometry) {
    geometry.validate();
    return constants::kEps0 * geometry.epsilon_r * geometry.plate_height_m /
           geometry.dielectric_thickness_m;
}

double fin_fraction(double c0_f_per_m, double length_m, double c_stray_f) {
    require_positive(c0_f_per_m, "capacitance per length");
    require_positive(c_stray_f, "stray capacitance");
    if (!std::isfinite(length_m) || length_m < 0.0) {
        throw Error(ErrorCode::InvalidInput, "length must be finite and non-negative");
    }
    const double fin = c0_f_per_m * length_m;
    return fin / (fin + c_stray_f);
}

} // namespace qdev
