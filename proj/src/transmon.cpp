#include "qdev/transmon.hpp"

#include <cmath>
#include <numeric>

namespace qdev {

namespace {

void require_finite_positive(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
        throw Error(ErrorCode::InvalidInput, std::string(name) + " must be positive");
    }
}

} // namespace

void TransmonMeasured::validate() const {
    require_finite_positive(f01_hz, "f01");
    require_finite_positive(f_ro_hz, "f_ro");
    if (f02_over_2_hz) require_finite_positive(*f02_over_2_hz, "f02/2");
    if (f_ro_bare_hz) require_finite_positive(*f_ro_bare_hz, "bare readout frequency");
    if (kappa_hz) require_finite_positive(*kappa_hz, "kappa");
    if (chi_hz && !std::isfinite(*chi_hz)) {
        throw Error(ErrorCode::InvalidInput, "chi must be finite");
    }
    for (double t1 : t1_samples_s) require_finite_positive(t1, "T1 sample");
    if (t2_star_s) require_finite_positive(*t2_star_s, "T2*");
}

double anharmonicity(double f01_hz, double f02_over_2_hz, Warnings* warnings) {
    require_finite_positive(f01_hz, "f01");
    require_finite_positive(f02_over_2_hz, "f02/2");
    const double alpha = 2.0 * (f02_over_2_hz - f01_hz);
    if (alpha >= 0.0 && warnings) {
        warnings->push_back("not-a-transmon: anharmonicity is non-negative");
    }
    return alpha;
}

double ej_from_spectrum(double f01_hz, double e_c_hz) {
    require_finite_positive(e_c_hz, "E_C");
    if (!std::isfinite(f01_hz)) {
        throw Error(ErrorCode::InvalidInput, "f01 must be finite");
    }
    const double sum = f01_hz + e_c_hz;
    return sum * sum / (8.0 * e_c_hz);
}

double g_from_punchout(double f_ro_coupled_hz, double f_ro_bare_hz, double delta_hz) {
    if (!std::isfinite(f_ro_coupled_hz) || !std::isfinite(f_ro_bare_hz) ||
        !std::isfinite(delta_hz)) {
        throw Error(ErrorCode::InvalidInput, "punch-out inputs must be finite");
    }
    const double shift = f_ro_coupled_hz - f_ro_bare_hz;
    if (shift == 0.0) return 0.0;
    if (shift * delta_hz < 0.0) {
        throw Error(ErrorCode::InconsistentPunchout,
                    "punch-out shift sign disagrees with the detuning sign");
    }
    return std::sqrt(delta_hz * shift);
}

double g_from_dispersive(double chi_hz, double delta_hz, double alpha_hz) {
    if (!std::isfinite(chi_hz) || !std::isfinite(delta_hz) || !std::isfinite(alpha_hz)) {
        throw Error(ErrorCode::InvalidInput, "dispersive inputs must be finite");
    }
    if (delta_hz == 0.0 || delta_hz == alpha_hz) {
        throw Error(ErrorCode::InvalidInput, "detuning must differ from zero and alpha");
    }
    if (alpha_hz >= 0.0) {
        throw Error(ErrorCode::InvalidInput, "alpha must be negative for a transmon");
    }
    if (chi_hz == 0.0) return 0.0;
    const double radicand = chi_hz * delta_hz * (delta_hz - alpha_hz) / (-alpha_hz);
    if (radicand < 0.0) {
        throw Error(ErrorCode::InconsistentDispersive,
                    "dispersive shift sign is inconsistent with the detuning");
    }
    return std::sqrt(radicand);
}

double purcell_time(double delta_hz, double g_hz, double kappa_hz) {
    if (!std::isfinite(delta_hz) || delta_hz == 0.0) {
        throw Error(ErrorCode::InvalidInput, "detuning must be finite and nonzero");
    }
    require_finite_positive(g_hz, "g");
    require_finite_positive(kappa_hz, "kappa");
    const double ratio = delta_hz / g_hz; // unit-free, so linear frequencies cancel
    const double kappa_angular = to_angular(Frequency(kappa_hz)).rad_per_s();
    return ratio * ratio / kappa_angular;
}

double qubit_quality(double f01_hz, double t1_s, Warnings* warnings) {
    require_finite_positive(f01_hz, "f01");
    if (!std::isfinite(t1_s) || t1_s < 0.0) {
        throw Error(ErrorCode::InvalidInput, "T1 must be finite and non-negative");
    }
    if (t1_s == 0.0 && warnings) {
        warnings->push_back("zero-T1: qubit quality factor is zero");
    }
    return to_angular(Frequency(f01_hz)).rad_per_s() * t1_s;
}

TransmonDerived derive_all(const TransmonMeasured& m) {
    m.validate();
    TransmonDerived d;
    d.delta_hz = m.f01_hz - m.f_ro_hz;

    if (m.f02_over_2_hz) {
        const double alpha = anharmonicity(m.f01_hz, *m.f02_over_2_hz, &d.warnings);
        d.alpha_hz = alpha;
        if (alpha < 0.0) {
            d.e_c_hz = -alpha;
            d.e_j_hz = ej_from_spectrum(m.f01_hz, *d.e_c_hz);
            d.ej_ec_ratio = *d.e_j_hz / *d.e_c_hz;
        } else {
            d.notes.push_back("E_C/E_J unavailable: anharmonicity is non-negative");
        }
    } else {
        d.notes.push_back("alpha unavailable: f02/2 not measured");
    }

    if (m.f_ro_bare_hz) {
        d.g_punchout_hz = g_from_punchout(m.f_ro_hz, *m.f_ro_bare_hz, d.delta_hz);
    }
    if (m.chi_hz && d.alpha_hz && *d.alpha_hz < 0.0) {
        d.g_dispersive_hz = g_from_dispersive(*m.chi_hz, d.delta_hz, *d.alpha_hz);
    }

    std::optional<double> g = d.g_punchout_hz ? d.g_punchout_hz : d.g_dispersive_hz;
    if (g && *g > 0.0 && m.kappa_hz) {
        d.t_purcell_s = purcell_time(d.delta_hz, *g, *m.kappa_hz);
    } else if (!g) {
        d.notes.push_back("T_Purcell unavailable: no coupling estimate");
    } else if (!m.kappa_hz) {
        d.notes.push_back("T_Purcell unavailable: kappa not measured");
    } else {
        d.notes.push_back("T_Purcell unavailable: coupling estimate is zero");
    }

    if (!m.t1_samples_s.empty()) {
        const double mean_t1 =
            std::accumulate(m.t1_samples_s.begin(), m.t1_samples_s.end(), 0.0) /
            static_cast<double>(m.t1_samples_s.size());
        d.qubit_q = qubit_quality(m.f01_hz, mean_t1, &d.warnings);
    } else {
        d.notes.push_back("qubit Q unavailable: no T1 samples");
    }
    return d;
}

} // namespace qdev
