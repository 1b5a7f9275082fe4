#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdev/quantities.hpp"

namespace qdev {

using Warnings = std::vector<std::string>;

/// Measured transmon parameters. All frequencies are linear Hz; kappa and chi
/// follow the κ/2π and χ/2π convention.
struct TransmonMeasured {
    double f01_hz = 0.0;
    std::optional<double> f02_over_2_hz;
    double f_ro_hz = 0.0;
    std::optional<double> f_ro_bare_hz;
    std::optional<double> kappa_hz;
    std::optional<double> chi_hz;
    std::vector<double> t1_samples_s;
    std::optional<double> t2_star_s;

    void validate() const;
};

struct TransmonDerived {
    std::optional<double> alpha_hz;       // signed anharmonicity, negative for a transmon
    std::optional<double> e_c_hz;         // charging energy (= -alpha)
    std::optional<double> e_j_hz;         // Josephson energy
    std::optional<double> ej_ec_ratio;
    double delta_hz = 0.0;                // f01 - f_ro, signed
    std::optional<double> g_punchout_hz;
    std::optional<double> g_dispersive_hz;
    std::optional<double> t_purcell_s;
    std::optional<double> qubit_q;
    Warnings warnings;
    std::vector<std::string> notes;       // reasons for absent fields
};

/// α = f02 - 2·f01, computed from f01 and f02/2. A non-negative result is
/// flagged through `warnings` rather than rejected.
double anharmonicity(double f01_hz, double f02_over_2_hz, Warnings* warnings = nullptr);

/// Invert f01 = sqrt(8·EJ·EC) - EC for EJ.
double ej_from_spectrum(double f01_hz, double e_c_hz);

/// g from the punch-out shift: (f_coupled - f_bare) = g²/Δ.
double g_from_punchout(double f_ro_coupled_hz, double f_ro_bare_hz, double delta_hz);

/// g from the dispersive shift approximation χ = g²/Δ - g²/(Δ-α).
double g_from_dispersive(double chi_hz, double delta_hz, double alpha_hz);

/// Purcell limit T ≈ Δ²/(g²·κ) with κ supplied as κ/2π in Hz.
double purcell_time(double delta_hz, double g_hz, double kappa_hz);

/// Qubit quality factor Q = ω01·T1 = 2π·f01·T1.
double qubit_quality(double f01_hz, double t1_s, Warnings* warnings = nullptr);

/// Populate every derivable Table-style column from the measured record.
TransmonDerived derive_all(const TransmonMeasured& m);

} // namespace qdev
