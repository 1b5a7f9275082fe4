#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdev/quantities.hpp"

namespace qdev {

/// Diameter-correction-method notch model parameters:
///   S21(f) = a·e^{iθ}·e^{-2πifτ} · [1 - (Ql/|Qc|)·e^{iφ} / (1 + 2i·Ql·(f/f0 - 1))]
struct ResonatorParams {
    double f0_hz = 0.0;        // resonance frequency
    double q_loaded = 0.0;     // Ql
    double qc_mag = 0.0;       // |Qc|
    double phi_rad = 0.0;      // coupling asymmetry angle
    double amplitude = 1.0;    // background |a|
    double theta_rad = 0.0;    // background phase
    double tau_s = 0.0;        // cable delay

    void validate() const;
};

/// 1σ uncertainties for a ResonatorFit; NaN when the covariance was singular.
struct ResonatorSigmas {
    double f0_hz = 0.0;
    double q_loaded = 0.0;
    double qc_mag = 0.0;
    double phi_rad = 0.0;
    double amplitude = 0.0;
    double theta_rad = 0.0;
    double tau_s = 0.0;
    double qi = 0.0;
};

struct ResonatorFit {
    ResonatorParams params;
    double qi = 0.0;
    ResonatorSigmas sigma;
    bool sigma_valid = false;
    double rms_residual = 0.0; // sqrt(SSR / n_points), complex points
    double cost = 0.0;         // sum of squared Re/Im residuals
    int iterations = 0;
    bool converged = false;
};

std::complex<double> s21_model(const ResonatorParams& p, double f_hz);

/// Qi from the DCM identity 1/Qi = 1/Ql - cos(φ)/|Qc|. Throws unphysical-fit
/// when the denominator is not positive.
double qi_from_dcm(double q_loaded, double qc_mag, double phi_rad);

ResonatorParams initial_guess(const S21Trace& trace);

ResonatorFit fit_resonator(const S21Trace& trace);

/// Mean intracavity photon number for a hanger resonator driven at
/// applied_power_dbm through line_attenuation_db of attenuation:
///   <n> = 2·Ql²·P / (ħ·ω0²·|Qc|)
double photon_number(const ResonatorFit& fit, double applied_power_dbm,
                     double line_attenuation_db);

struct SweepPoint {
    double photon_number = 0.0;
    double qi = 0.0;
    double qi_sigma = 0.0;
};

struct SweepSkip {
    std::size_t trace_index = 0;
    std::string reason;
};

struct SweepResult {
    std::vector<SweepPoint> points; // ascending photon number
    std::vector<SweepSkip> skipped;
};

/// Fit every trace of a power sweep and calibrate photon numbers from each
/// trace's own power metadata. Fit failures become skip entries; mixed
/// resonators or fewer than two usable fits are fatal.
SweepResult power_sweep(std::span<const S21Trace> traces);

} // namespace qdev
