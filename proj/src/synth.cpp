#include "qdev/synth.hpp"

#include <cmath>

#include "qdev/rng.hpp"

namespace qdev {

void NoiseSpec::validate() const {
    if (!std::isfinite(sigma) || sigma < 0.0) {
        throw Error(ErrorCode::InvalidInput, "noise sigma must be finite and non-negative");
    }
}

S21Trace synth_s21(const ResonatorParams& params, double f_start_hz, double f_stop_hz,
                   std::size_t n_points, const NoiseSpec& noise,
                   std::optional<double> applied_power_dbm,
                   std::optional<double> line_attenuation_db) {
    params.validate();
    noise.validate();
    if (!(std::isfinite(f_start_hz) && std::isfinite(f_stop_hz) && f_start_hz < f_stop_hz)) {
        throw Error(ErrorCode::InvalidInput, "need f_start < f_stop");
    }
    if (n_points < S21Trace::kMinPoints) {
        throw Error(ErrorCode::InvalidInput, "need at least 16 grid points");
    }

    Xoshiro256pp rng(noise.seed);
    std::vector<S21Point> pts(n_points);
    const double step = (f_stop_hz - f_start_hz) / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double f = f_start_hz + step * static_cast<double>(i);
        std::complex<double> value = s21_model(params, f);
        if (noise.sigma > 0.0) {
            const double re = rng.normal();
            const double im = rng.normal();
            value += noise.sigma * std::complex<double>(re, im);
        }
        pts[i] = S21Point{f, value};
    }
    return S21Trace(std::move(pts), applied_power_dbm, line_attenuation_db);
}

DecayTrace synth_decay(double t1_s, double amplitude, double offset, double span_s,
                       std::size_t n_points, const NoiseSpec& noise) {
    noise.validate();
    if (!(std::isfinite(t1_s) && t1_s > 0.0) || !(std::isfinite(span_s) && span_s > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "t1 and span must be positive");
    }
    if (!std::isfinite(amplitude) || !std::isfinite(offset)) {
        throw Error(ErrorCode::InvalidInput, "amplitude and offset must be finite");
    }
    if (n_points < DecayTrace::kMinPoints) {
        throw Error(ErrorCode::InvalidInput, "need at least 8 delay points");
    }

    Xoshiro256pp rng(noise.seed);
    std::vector<DecayPoint> pts(n_points);
    const double step = span_s / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double t = step * static_cast<double>(i);
        double signal = amplitude * std::exp(-t / t1_s) + offset;
        if (noise.sigma > 0.0) signal += noise.sigma * rng.normal();
        pts[i] = DecayPoint{t, signal};
    }
    return DecayTrace(std::move(pts));
}

DecayTrace synth_ramsey(double t2_s, double detuning_hz, double amplitude,
                        double phase_rad, double offset, double span_s,
                        std::size_t n_points, const NoiseSpec& noise) {
    noise.validate();
    if (!(std::isfinite(t2_s) && t2_s > 0.0) || !(std::isfinite(span_s) && span_s > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "t2 and span must be positive");
    }
    if (!std::isfinite(detuning_hz) || detuning_hz < 0.0) {
        throw Error(ErrorCode::InvalidInput, "detuning must be non-negative");
    }
    if (!std::isfinite(amplitude) || !std::isfinite(phase_rad) || !std::isfinite(offset)) {
        throw Error(ErrorCode::InvalidInput, "amplitude, phase, and offset must be finite");
    }
    if (n_points < DecayTrace::kMinPoints) {
        throw Error(ErrorCode::InvalidInput, "need at least 8 delay points");
    }

    Xoshiro256pp rng(noise.seed);
    std::vector<DecayPoint> pts(n_points);
    const double step = span_s / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double t = step * static_cast<double>(i);
        double signal = amplitude * std::exp(-t / t2_s) *
                            std::cos(constants::kTwoPi * detuning_hz * t + phase_rad) +
                        offset;
        if (noise.sigma > 0.0) signal += noise.sigma * rng.normal();
        pts[i] = DecayPoint{t, signal};
    }
    return DecayTrace(std::move(pts));
}

std::vector<LengthFrequencyPoint> synth_ler_dataset(const LerDesign& design,
                                                    const std::vector<double>& lengths_m,
                                                    const NoiseSpec& noise) {
    design.validate();
    noise.validate();
    for (double len : lengths_m) {
        if (!std::isfinite(len) || len < 0.0) {
            throw Error(ErrorCode::InvalidInput, "lengths must be finite and non-negative");
        }
    }

    Xoshiro256pp rng(noise.seed);
    std::vector<LengthFrequencyPoint> out;
    out.reserve(lengths_m.size());
    for (double len : lengths_m) {
        const double capacitance =
            design.stray_capacitance_f + design.cap_per_length_f_per_m * len;
        double inv_f_sq = constants::kTwoPi * constants::kTwoPi *
                          design.inductance_h * capacitance;
        if (noise.sigma > 0.0) inv_f_sq += noise.sigma * rng.normal();
        if (inv_f_sq <= 0.0) {
            throw Error(ErrorCode::InvalidInput,
                        "noise drove (1/f)^2 non-positive; reduce sigma");
        }
        out.push_back(LengthFrequencyPoint{len, 1.0 / std::sqrt(inv_f_sq)});
    }
    return out;
}

} // namespace qdev
