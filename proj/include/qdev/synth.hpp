#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qdev/ler.hpp"
#include "qdev/quantities.hpp"
#include "qdev/resonator.hpp"

namespace qdev {

/// Noise description for the synthetic generators. sigma is per-quadrature
/// for complex traces and per-sample for real traces.
struct NoiseSpec {
    double sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Forward-model S21 trace on a uniform grid. sigma = 0 reproduces the model
/// bit-exactly; identical inputs always produce identical traces.
S21Trace synth_s21(const ResonatorParams& params, double f_start_hz, double f_stop_hz,
                   std::size_t n_points, const NoiseSpec& noise,
                   std::optional<double> applied_power_dbm = std::nullopt,
                   std::optional<double> line_attenuation_db = std::nullopt);

/// a·exp(-t/t1) + b on uniform delays over [0, span].
DecayTrace synth_decay(double t1_s, double amplitude, double offset, double span_s,
                       std::size_t n_points, const NoiseSpec& noise);

/// a·exp(-t/t2)·cos(2π·detuning·t + phase) + b on uniform delays over [0, span].
DecayTrace synth_ramsey(double t2_s, double detuning_hz, double amplitude,
                        double phase_rad, double offset, double span_s,
                        std::size_t n_points, const NoiseSpec& noise);

/// Length/frequency dataset from the LER linear law, with optional Gaussian
/// perturbation applied in (1/f²) space where the model is linear.
std::vector<LengthFrequencyPoint> synth_ler_dataset(const LerDesign& design,
                                                    const std::vector<double>& lengths_m,
                                                    const NoiseSpec& noise);

} // namespace qdev
