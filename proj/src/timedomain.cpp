#include "qdev/timedomain.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "qdev/lsq.hpp"

namespace qdev {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_to_pi(double angle) {
    angle = std::fmod(angle + kPi, 2.0 * kPi);
    if (angle < 0.0) angle += 2.0 * kPi;
    return angle - kPi;
}

void require_varying_signal(const DecayTrace& trace) {
    double lo = trace.points().front().signal;
    double hi = lo;
    double max_abs = 0.0;
    for (const auto& p : trace.points()) {
        lo = std::min(lo, p.signal);
        hi = std::max(hi, p.signal);
        max_abs = std::max(max_abs, std::abs(p.signal));
    }
    if (hi - lo <= 1e-12 * std::max(max_abs, 1.0)) {
        throw Error(ErrorCode::ConstantSignal, "signal shows no variation to fit");
    }
}

double tail_mean(const DecayTrace& trace) {
    const auto& pts = trace.points();
    const std::size_t tail = std::max<std::size_t>(1, pts.size() / 10);
    double sum = 0.0;
    for (std::size_t i = pts.size() - tail; i < pts.size(); ++i) sum += pts[i].signal;
    return sum / static_cast<double>(tail);
}

} // namespace

T1Fit fit_t1(const DecayTrace& trace) {
    require_varying_signal(trace);
    const auto& pts = trace.points();
    const std::size_t n = pts.size();

    // Fit in microseconds so the engine's relative step policy is well scaled.
    const double span_us = trace.span_s() * 1e6;
    const double offset0 = tail_mean(trace);
    const double amp0 = pts.front().signal - offset0;
    const double t1_us0 = std::max(span_us / 3.0, 1e-6);

    lsq::FitProblem problem;
    problem.residual = [&pts, n](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t_us = pts[i].delay_s * 1e6;
            r[i] = p[0] * std::exp(-t_us / p[1]) + p[2] - pts[i].signal;
        }
        return r;
    };
    problem.initial = Eigen::VectorXd(3);
    problem.initial << amp0, t1_us0, offset0;

    const lsq::FitResult res = lsq::fit(problem);
    if (res.params[1] <= 0.0) {
        throw Error(ErrorCode::UnphysicalFit, "fitted T1 is not positive");
    }

    T1Fit fit;
    fit.amplitude = res.params[0];
    fit.t1_s = res.params[1] * 1e-6;
    fit.offset = res.params[2];
    fit.sigma_valid = res.covariance_valid;
    if (res.covariance_valid) {
        fit.amplitude_sigma = res.uncertainties[0];
        fit.t1_sigma_s = res.uncertainties[1] * 1e-6;
        fit.offset_sigma = res.uncertainties[2];
    }
    fit.rms_residual = std::sqrt(res.cost / static_cast<double>(n));
    fit.iterations = res.iterations;
    fit.converged = res.converged;
    return fit;
}

namespace {

struct SpectralPeak {
    double detuning_hz = 0.0;
    double phase_rad = 0.0;
    double magnitude = 0.0;
};

// Periodogram of the mean-subtracted signal on the trace's average grid
// spacing; returns the dominant nonzero-frequency bin, refined by parabolic
// interpolation of log-magnitudes.
SpectralPeak dominant_spectral_peak(const DecayTrace& trace) {
    const auto& pts = trace.points();
    const std::size_t n = pts.size();
    const double span = trace.span_s();
    double mean = 0.0;
    for (const auto& p : pts) mean += p.signal;
    mean /= static_cast<double>(n);

    const std::size_t n_bins = n / 2;
    std::vector<std::complex<double>> spectrum(n_bins + 1);
    for (std::size_t k = 0; k <= n_bins; ++k) {
        std::complex<double> acc(0.0, 0.0);
        const double freq = static_cast<double>(k) / span;
        for (const auto& p : pts) {
            const double angle = -constants::kTwoPi * freq * p.delay_s;
            acc += (p.signal - mean) * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        spectrum[k] = acc;
    }

    std::size_t k_peak = 1;
    for (std::size_t k = 2; k <= n_bins; ++k) {
        if (std::abs(spectrum[k]) > std::abs(spectrum[k_peak])) k_peak = k;
    }
    // A maximum on the bin adjacent to DC means the spectrum is dominated by
    // the decay envelope, not an oscillation.
    if (k_peak == 1 && (n_bins < 2 || std::abs(spectrum[1]) >= std::abs(spectrum[2]))) {
        throw Error(ErrorCode::DetuningUnresolved,
                    "spectral estimate peaks at zero detuning");
    }

    double refined = static_cast<double>(k_peak);
    if (k_peak > 1 && k_peak < n_bins) {
        const double lm = std::log(std::max(std::abs(spectrum[k_peak - 1]), 1e-300));
        const double lc = std::log(std::max(std::abs(spectrum[k_peak]), 1e-300));
        const double lp = std::log(std::max(std::abs(spectrum[k_peak + 1]), 1e-300));
        const double denom = lm - 2.0 * lc + lp;
        if (denom < 0.0) refined += 0.5 * (lm - lp) / denom;
    }

    SpectralPeak peak;
    peak.detuning_hz = refined / span;
    peak.phase_rad = std::arg(spectrum[k_peak]);
    peak.magnitude = std::abs(spectrum[k_peak]);
    return peak;
}

} // namespace

RamseyFit fit_ramsey(const DecayTrace& trace) {
    require_varying_signal(trace);
    const auto& pts = trace.points();
    const std::size_t n = pts.size();
    const double span_s = trace.span_s();

    const SpectralPeak peak = dominant_spectral_peak(trace);

    double lo = pts.front().signal, hi = lo;
    for (const auto& p : pts) {
        lo = std::min(lo, p.signal);
        hi = std::max(hi, p.signal);
    }

    // Fit space: [A, T2* us, detuning MHz, phase, B].
    const double amp0 = 0.5 * (hi - lo);
    const double t2_us0 = std::max(span_s * 1e6 / 3.0, 1e-6);
    const double detuning_mhz0 = peak.detuning_hz * 1e-6;
    const double phase0 = wrap_to_pi(peak.phase_rad);
    const double offset0 = tail_mean(trace);

    lsq::FitProblem problem;
    problem.residual = [&pts, n](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t_us = pts[i].delay_s * 1e6;
            const double osc = std::cos(constants::kTwoPi * p[2] * t_us + p[3]);
            r[i] = p[0] * std::exp(-t_us / p[1]) * osc + p[4] - pts[i].signal;
        }
        return r;
    };
    problem.initial = Eigen::VectorXd(5);
    problem.initial << amp0, t2_us0, detuning_mhz0, phase0, offset0;
    const double inf = std::numeric_limits<double>::infinity();
    problem.lower = Eigen::VectorXd(5);
    problem.upper = Eigen::VectorXd(5);
    problem.lower << 0.0, 1e-9, 0.0, -kPi, -inf;
    problem.upper << inf, inf, inf, kPi, inf;
    problem.initial = problem.initial.cwiseMax(problem.lower).cwiseMin(problem.upper);

    const lsq::FitResult res = lsq::fit(problem);
    if (res.params[1] <= 0.0) {
        throw Error(ErrorCode::UnphysicalFit, "fitted T2* is not positive");
    }

    RamseyFit fit;
    fit.amplitude = res.params[0];
    fit.t2_star_s = res.params[1] * 1e-6;
    fit.detuning_hz = res.params[2] * 1e6;
    fit.phase_rad = wrap_to_pi(res.params[3]);
    fit.offset = res.params[4];
    fit.sigma_valid = res.covariance_valid;
    if (res.covariance_valid) {
        fit.amplitude_sigma = res.uncertainties[0];
        fit.t2_star_sigma_s = res.uncertainties[1] * 1e-6;
        fit.detuning_sigma_hz = res.uncertainties[2] * 1e6;
        fit.phase_sigma_rad = res.uncertainties[3];
        fit.offset_sigma = res.uncertainties[4];
    }
    fit.rms_residual = std::sqrt(res.cost / static_cast<double>(n));
    fit.low_confidence = fit.detuning_hz * span_s < 2.0;
    fit.iterations = res.iterations;
    fit.converged = res.converged;
    return fit;
}

T1Stats t1_statistics(const std::vector<double>& samples_s, std::size_t bin_count) {
    if (samples_s.size() < 2) {
        throw Error(ErrorCode::InsufficientData, "need at least 2 T1 samples");
    }
    if (bin_count == 0) {
        throw Error(ErrorCode::InvalidInput, "bin count must be positive");
    }
    for (double s : samples_s) {
        if (!std::isfinite(s) || s <= 0.0) {
            throw Error(ErrorCode::InvalidInput, "T1 samples must be positive");
        }
    }
    const std::size_t n = samples_s.size();
    const double nd = static_cast<double>(n);

    T1Stats stats;
    stats.mean_s = std::accumulate(samples_s.begin(), samples_s.end(), 0.0) / nd;

    std::vector<double> sorted = samples_s;
    std::sort(sorted.begin(), sorted.end());
    stats.median_s = (n % 2 == 1)
                         ? sorted[n / 2]
                         : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double s : samples_s) {
        const double d = s - stats.mean_s;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= nd;
    m3 /= nd;
    m4 /= nd;
    stats.std_s = std::sqrt(m2 * nd / (nd - 1.0));

    if (m2 > 0.0) {
        const double skew = m3 / std::pow(m2, 1.5);
        const double kurtosis = m4 / (m2 * m2); // non-excess
        stats.bimodality_coefficient = (skew * skew + 1.0) / kurtosis;
        stats.bimodality_defined = true;
        stats.bimodal_suspect = stats.bimodality_coefficient > 5.0 / 9.0;
    }

    const double lo = sorted.front();
    const double hi = sorted.back();
    stats.bin_edges_s.resize(bin_count + 1);
    const double width = (hi - lo) / static_cast<double>(bin_count);
    for (std::size_t i = 0; i <= bin_count; ++i) {
        stats.bin_edges_s[i] = lo + width * static_cast<double>(i);
    }
    stats.bin_edges_s.back() = hi;
    stats.counts.assign(bin_count, 0);
    for (double s : samples_s) {
        std::size_t idx = 0;
        if (width > 0.0) {
            idx = std::min(static_cast<std::size_t>((s - lo) / width), bin_count - 1);
        }
        ++stats.counts[idx];
    }
    return stats;
}

} // namespace qdev
