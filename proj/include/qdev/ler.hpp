#pragma once

#include <vector>

#include "qdev/quantities.hpp"

namespace qdev {

/// Lumped-element resonator circuit model: a fixed inductor shunted by a
/// stray capacitance plus a fin capacitor of c0 per metallized length.
struct LerDesign {
    double inductance_h = 0.0;
    double stray_capacitance_f = 0.0;
    double cap_per_length_f_per_m = 0.0;
    double fin_epsilon_r = 11.7;

    void validate() const;
};

/// Parallel-plate fin cross-section used for the crude per-length estimate.
struct FinGeometry {
    double plate_height_m = 0.0;
    double dielectric_thickness_m = 0.0;
    double epsilon_r = 0.0;

    void validate() const;
};

struct LengthFrequencyPoint {
    double length_m = 0.0;
    double f_r_hz = 0.0;
};

struct C0Fit {
    double c0_f_per_m = 0.0;
    double c_stray_f = 0.0;
    double f_at_zero_hz = 0.0;   // extrapolated resonance at zero fin length
    double rms_residual = 0.0;   // residual of the (1/f)^2-vs-length line, in s^2
};

/// f = 1 / (2π·sqrt(L·C)).
double resonant_frequency(double inductance_h, double capacitance_f);

/// Ordinary least squares of (1/f_r)² against metallized length:
/// slope = (2π)²·L·c0, intercept = (2π)²·L·c_stray.
C0Fit fit_c0(const std::vector<LengthFrequencyPoint>& points, double inductance_h);

/// Crude parallel-plate capacitance per unit length: ε0·εr·h/d.
double parallel_plate_estimate(const FinGeometry& geometry);

/// Fraction of the total capacitance contributed by the fin capacitor.
double fin_fraction(double c0_f_per_m, double length_m, double c_stray_f);

} // namespace qdev
