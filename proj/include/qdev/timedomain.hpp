#pragma once

#include <vector>

#include "qdev/quantities.hpp"

namespace qdev {

struct T1Fit {
    double t1_s = 0.0;
    double amplitude = 0.0;
    double offset = 0.0;
    double t1_sigma_s = 0.0;
    double amplitude_sigma = 0.0;
    double offset_sigma = 0.0;
    bool sigma_valid = false;
    double rms_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct RamseyFit {
    double t2_star_s = 0.0;
    double detuning_hz = 0.0;
    double amplitude = 0.0;
    double phase_rad = 0.0; // wrapped to (-pi, pi]
    double offset = 0.0;
    double t2_star_sigma_s = 0.0;
    double detuning_sigma_hz = 0.0;
    double amplitude_sigma = 0.0;
    double phase_sigma_rad = 0.0;
    double offset_sigma = 0.0;
    bool sigma_valid = false;
    double rms_residual = 0.0;
    bool low_confidence = false; // fewer than 2 oscillation periods in span
    int iterations = 0;
    bool converged = false;
};

struct T1Stats {
    double mean_s = 0.0;
    double median_s = 0.0;
    double std_s = 0.0;
    std::vector<double> bin_edges_s; // bin_count + 1 edges spanning [min, max]
    std::vector<std::size_t> counts;
    double bimodality_coefficient = 0.0; // (skew^2 + 1) / kurtosis
    bool bimodality_defined = false;     // false when the sample variance is zero
    bool bimodal_suspect = false;        // coefficient above 5/9
};

/// Fit A·exp(-t/T1) + B to a relaxation trace.
T1Fit fit_t1(const DecayTrace& trace);

/// Fit A·exp(-t/T2*)·cos(2π·δ·t + φ0) + B to a Ramsey trace. The detuning is
/// seeded from the dominant nonzero peak of a periodogram of the
/// mean-subtracted signal.
RamseyFit fit_ramsey(const DecayTrace& trace);

/// Histogram statistics over repeated T1 measurements, with the
/// (skew² + 1)/kurtosis bimodality screen at the 5/9 uniform threshold.
T1Stats t1_statistics(const std::vector<double>& samples_s, std::size_t bin_count);

} // namespace qdev
