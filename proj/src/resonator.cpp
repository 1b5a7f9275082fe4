#include "qdev/resonator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qdev/lsq.hpp"

namespace qdev {

namespace {

using std::complex;

constexpr double kPi = std::numbers::pi;

double median_of(std::vector<double> values) {
    const std::size_t n = values.size();
    auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    double upper = *mid;
    if (n % 2 == 1) return upper;
    auto lower = std::max_element(values.begin(), mid);
    return 0.5 * (*lower + upper);
}

// Phase unwrap over the ordered trace; grid is fine enough that jumps > π
// only come from branch crossings.
std::vector<double> unwrapped_phase(const std::vector<S21Point>& pts) {
    std::vector<double> phase(pts.size());
    double offset = 0.0;
    double prev = std::arg(pts.front().value);
    phase[0] = prev;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double raw = std::arg(pts[i].value);
        double d = raw - prev;
        if (d > kPi) offset -= 2.0 * kPi;
        else if (d < -kPi) offset += 2.0 * kPi;
        phase[i] = raw + offset;
        prev = raw;
    }
    return phase;
}

double wrap_to_pi(double angle) {
    angle = std::fmod(angle + kPi, 2.0 * kPi);
    if (angle < 0.0) angle += 2.0 * kPi;
    return angle - kPi;
}

struct ScaledParams {
    // Fit-space parameter vector: [f0 GHz, Ql, |Qc|, φ, a, θ, τ ns].
    static Eigen::VectorXd pack(const ResonatorParams& p) {
        Eigen::VectorXd v(7);
        v << p.f0_hz * 1e-9, p.q_loaded, p.qc_mag, p.phi_rad, p.amplitude,
            p.theta_rad, p.tau_s * 1e9;
        return v;
    }
    static ResonatorParams unpack(const Eigen::VectorXd& v) {
        return ResonatorParams{v[0] * 1e9, v[1], v[2], v[3], v[4], v[5], v[6] * 1e-9};
    }
};

} // namespace

void ResonatorParams::validate() const {
    if (!(std::isfinite(f0_hz) && f0_hz > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "f0 must be positive");
    }
    if (!(std::isfinite(q_loaded) && q_loaded > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "Ql must be positive");
    }
    if (!(std::isfinite(qc_mag) && qc_mag > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "|Qc| must be positive");
    }
    if (!(std::isfinite(phi_rad) && std::abs(phi_rad) < kPi / 2.0)) {
        throw Error(ErrorCode::InvalidInput, "|phi| must be below pi/2");
    }
    if (!(std::isfinite(amplitude) && amplitude > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "background amplitude must be positive");
    }
    if (!std::isfinite(theta_rad) || !std::isfinite(tau_s)) {
        throw Error(ErrorCode::InvalidInput, "background phase and delay must be finite");
    }
}

complex<double> s21_model(const ResonatorParams& p, double f_hz) {
    const complex<double> i(0.0, 1.0);
    const complex<double> background =
        p.amplitude * std::exp(i * (p.theta_rad - constants::kTwoPi * f_hz * p.tau_s));
    const complex<double> dip =
        (p.q_loaded / p.qc_mag) * std::exp(i * p.phi_rad) /
        (1.0 + 2.0 * i * p.q_loaded * (f_hz / p.f0_hz - 1.0));
    return background * (1.0 - dip);
}

double qi_from_dcm(double q_loaded, double qc_mag, double phi_rad) {
    if (!(q_loaded > 0.0) || !(qc_mag > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "quality factors must be positive");
    }
    const double inv_qi = 1.0 / q_loaded - std::cos(phi_rad) / qc_mag;
    if (inv_qi <= 0.0) {
        throw Error(ErrorCode::UnphysicalFit,
                    "1/Ql - cos(phi)/|Qc| is not positive; no internal loss channel");
    }
    return 1.0 / inv_qi;
}

ResonatorParams initial_guess(const S21Trace& trace) {
    const auto& pts = trace.points();
    const std::size_t n = pts.size();
    const std::size_t edge = std::max<std::size_t>(3, n / 10);

    std::vector<double> mags(n);
    for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(pts[i].value);

    std::vector<double> edge_mags;
    edge_mags.reserve(2 * edge);
    for (std::size_t i = 0; i < edge; ++i) edge_mags.push_back(mags[i]);
    for (std::size_t i = n - edge; i < n; ++i) edge_mags.push_back(mags[i]);
    const double baseline = median_of(edge_mags);

    const auto min_it = std::min_element(mags.begin(), mags.end());
    const std::size_t i_min = static_cast<std::size_t>(min_it - mags.begin());
    if (!(baseline > 0.0) || mags[i_min] >= 0.99 * baseline) {
        throw Error(ErrorCode::NoDipFound, "no resonance dip visible against trace edges");
    }
    const double f0 = pts[i_min].freq_hz;

    // Cable delay and background phase from a joint linear fit of the
    // unwrapped phase over both edge windows.
    const auto phase = unwrapped_phase(pts);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double count = 0;
    auto accumulate = [&](std::size_t i) {
        const double x = pts[i].freq_hz;
        sx += x;
        sy += phase[i];
        sxx += x * x;
        sxy += x * phase[i];
        count += 1.0;
    };
    for (std::size_t i = 0; i < edge; ++i) accumulate(i);
    for (std::size_t i = n - edge; i < n; ++i) accumulate(i);
    const double denom = count * sxx - sx * sx;
    double slope = 0.0;
    if (std::abs(denom) > 0.0) slope = (count * sxy - sx * sy) / denom;
    const double tau = -slope / constants::kTwoPi;

    // Background phase consistent with the estimated delay: average the
    // delay-corrected phase over the edge windows.
    double theta_re = 0.0, theta_im = 0.0;
    auto accumulate_theta = [&](std::size_t i) {
        const double corrected = phase[i] + constants::kTwoPi * pts[i].freq_hz * tau;
        theta_re += std::cos(corrected);
        theta_im += std::sin(corrected);
    };
    for (std::size_t i = 0; i < edge; ++i) accumulate_theta(i);
    for (std::size_t i = n - edge; i < n; ++i) accumulate_theta(i);
    const double theta = std::atan2(theta_im, theta_re);

    // Ql from the full width at half depth of the |S21|^2 dip.
    const double floor_sq = mags[i_min] * mags[i_min];
    const double base_sq = baseline * baseline;
    const double half_level = floor_sq + 0.5 * (base_sq - floor_sq);
    auto crossing = [&](int direction) -> double {
        std::size_t i = i_min;
        while ((direction < 0 && i > 0) || (direction > 0 && i + 1 < n)) {
            const std::size_t next = (direction < 0) ? i - 1 : i + 1;
            const double sq_a = mags[i] * mags[i];
            const double sq_b = mags[next] * mags[next];
            if (sq_b >= half_level) {
                const double t = (half_level - sq_a) / (sq_b - sq_a);
                return pts[i].freq_hz + t * (pts[next].freq_hz - pts[i].freq_hz);
            }
            i = next;
        }
        return pts[direction < 0 ? 0 : n - 1].freq_hz;
    };
    const double fwhm = crossing(+1) - crossing(-1);
    const double span = pts.back().freq_hz - pts.front().freq_hz;
    double q_loaded = (fwhm > 0.0) ? f0 / fwhm : f0 / (0.1 * span);
    q_loaded = std::max(q_loaded, 1.0);

    const double dip_depth = std::max(1.0 - mags[i_min] / baseline, 1e-6);
    const double qc_mag = q_loaded / dip_depth;

    return ResonatorParams{f0, q_loaded, qc_mag, 0.0, baseline, wrap_to_pi(theta), tau};
}

namespace {

double qi_sigma_from_covariance(const ResonatorParams& p, double qi,
                                const Eigen::MatrixXd& cov) {
    // First-order propagation through Qi = (1/Ql - cosφ/|Qc|)^-1 using the
    // (Ql, |Qc|, φ) block; fit-space scaling leaves that block untouched.
    Eigen::Vector3d grad;
    grad[0] = qi * qi / (p.q_loaded * p.q_loaded);
    grad[1] = -qi * qi * std::cos(p.phi_rad) / (p.qc_mag * p.qc_mag);
    grad[2] = qi * qi * std::sin(p.phi_rad) / p.qc_mag;
    const Eigen::Matrix3d block = cov.block<3, 3>(1, 1);
    const double var = grad.transpose() * block * grad;
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

} // namespace

ResonatorFit fit_resonator(const S21Trace& trace) {
    const auto& pts = trace.points();
    const std::size_t n = pts.size();

    const ResonatorParams guess = initial_guess(trace);

    lsq::FitProblem problem;
    problem.residual = [&pts, n](const Eigen::VectorXd& v) {
        const ResonatorParams p = ScaledParams::unpack(v);
        Eigen::VectorXd r(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            const complex<double> d = s21_model(p, pts[i].freq_hz) - pts[i].value;
            r[2 * i] = d.real();
            r[2 * i + 1] = d.imag();
        }
        return r;
    };
    problem.initial = ScaledParams::pack(guess);

    const double f_lo = pts.front().freq_hz * 1e-9;
    const double f_hi = pts.back().freq_hz * 1e-9;
    const double inf = std::numeric_limits<double>::infinity();
    problem.lower = Eigen::VectorXd(7);
    problem.upper = Eigen::VectorXd(7);
    problem.lower << f_lo, 1.0, 1.0, -kPi / 2 + 1e-9, 1e-12, -inf, -1e4;
    problem.upper << f_hi, 1e9, 1e12, kPi / 2 - 1e-9, 1e6, inf, 1e4;
    problem.initial = problem.initial.cwiseMax(problem.lower).cwiseMin(problem.upper);

    // f0 steps are tied to the estimated linewidth; the default relative
    // policy covers the well-scaled parameters.
    const double linewidth_ghz = guess.f0_hz * 1e-9 / guess.q_loaded;
    problem.fd_steps = Eigen::VectorXd(7);
    problem.fd_steps << std::clamp(0.02 * linewidth_ghz, 1e-9, 1e-5),
        lsq::fd_default_step(guess.q_loaded), lsq::fd_default_step(guess.qc_mag),
        1e-6, lsq::fd_default_step(guess.amplitude), 1e-6, 1e-6;

    const lsq::FitResult res = lsq::fit(problem);

    ResonatorFit fit;
    fit.params = ScaledParams::unpack(res.params);
    fit.params.theta_rad = wrap_to_pi(fit.params.theta_rad);
    fit.qi = qi_from_dcm(fit.params.q_loaded, fit.params.qc_mag, fit.params.phi_rad);
    fit.cost = res.cost;
    fit.rms_residual = std::sqrt(res.cost / static_cast<double>(n));
    fit.iterations = res.iterations;
    fit.converged = res.converged;
    fit.sigma_valid = res.covariance_valid;
    if (res.covariance_valid) {
        fit.sigma.f0_hz = res.uncertainties[0] * 1e9;
        fit.sigma.q_loaded = res.uncertainties[1];
        fit.sigma.qc_mag = res.uncertainties[2];
        fit.sigma.phi_rad = res.uncertainties[3];
        fit.sigma.amplitude = res.uncertainties[4];
        fit.sigma.theta_rad = res.uncertainties[5];
        fit.sigma.tau_s = res.uncertainties[6] * 1e-9;
        fit.sigma.qi = qi_sigma_from_covariance(fit.params, fit.qi, res.covariance);
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        fit.sigma = ResonatorSigmas{nan, nan, nan, nan, nan, nan, nan, nan};
    }
    return fit;
}

double photon_number(const ResonatorFit& fit, double applied_power_dbm,
                     double line_attenuation_db) {
    if (!std::isfinite(applied_power_dbm)) {
        throw Error(ErrorCode::InvalidQuantity, "applied power must be finite");
    }
    if (!std::isfinite(line_attenuation_db) || line_attenuation_db < 0.0) {
        throw Error(ErrorCode::InvalidInput, "attenuation must be finite and non-negative");
    }
    fit.params.validate();
    const Power on_chip = Power::from_dbm(applied_power_dbm - line_attenuation_db);
    const AngularFrequency w0 = to_angular(Frequency(fit.params.f0_hz));
    const double ql = fit.params.q_loaded;
    return 2.0 * ql * ql * on_chip.watts() /
           (constants::kHbar * w0.rad_per_s() * w0.rad_per_s() * fit.params.qc_mag);
}

SweepResult power_sweep(std::span<const S21Trace> traces) {
    if (traces.size() < 2) {
        throw Error(ErrorCode::SweepFailed, "power sweep needs at least 2 traces");
    }
    for (const auto& t : traces) {
        if (!t.applied_power_dbm() || !t.line_attenuation_db()) {
            throw Error(ErrorCode::MissingMetadata,
                        "photon-number calibration needs applied power and attenuation "
                        "on every trace");
        }
    }

    SweepResult result;
    std::vector<std::pair<std::size_t, ResonatorFit>> fits;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        try {
            fits.emplace_back(i, fit_resonator(traces[i]));
        } catch (const Error& e) {
            result.skipped.push_back(SweepSkip{i, e.what()});
        }
    }
    if (fits.size() < 2) {
        throw Error(ErrorCode::SweepFailed,
                    "fewer than 2 traces produced a usable resonator fit");
    }

    std::vector<double> f0s;
    f0s.reserve(fits.size());
    for (const auto& [idx, fit] : fits) f0s.push_back(fit.params.f0_hz);
    const double f0_med = median_of(f0s);
    for (const auto& [idx, fit] : fits) {
        const double linewidth = fit.params.f0_hz / fit.params.q_loaded;
        if (std::abs(fit.params.f0_hz - f0_med) > 5.0 * linewidth) {
            throw Error(ErrorCode::F0Mismatch,
                        "trace " + std::to_string(idx) +
                            " resonates more than 5 linewidths from the sweep median");
        }
    }

    for (const auto& [idx, fit] : fits) {
        const auto& trace = traces[idx];
        const double n_photon = photon_number(fit, *trace.applied_power_dbm(),
                                              *trace.line_attenuation_db());
        const double qi_sigma = fit.sigma_valid ? fit.sigma.qi : 0.0;
        result.points.push_back(SweepPoint{n_photon, fit.qi, qi_sigma});
    }
    std::sort(result.points.begin(), result.points.end(),
              [](const SweepPoint& a, const SweepPoint& b) {
                  return a.photon_number < b.photon_number;
              });
    return result;
}

} // namespace qdev
