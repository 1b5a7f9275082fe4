#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "qdev/errors.hpp"

namespace qdev {

namespace constants {
/// Reduced Planck constant [J·s].
inline constexpr double kHbar = 1.054571817e-34;
/// Vacuum permittivity [F/m].
inline constexpr double kEps0 = 8.8541878128e-12;
/// 2π, spelled out so angular conversions share one literal.
inline constexpr double kTwoPi = 6.283185307179586476925286766559;
} // namespace constants

/// Linear frequency in Hz. Kept distinct from AngularFrequency so a missing
/// (or doubled) 2π cannot compile.
class Frequency {
public:
    explicit Frequency(double hz);
    double hz() const { return hz_; }

private:
    double hz_;
};

/// Angular frequency in rad/s. Constructed from a Frequency only through
/// to_angular(), so ω = 2π·f holds by construction.
class AngularFrequency {
public:
    explicit AngularFrequency(double rad_per_s);
    double rad_per_s() const { return rad_per_s_; }

private:
    double rad_per_s_;
};

AngularFrequency to_angular(Frequency f);

/// RF power, stored in watts, convertible to/from dBm.
class Power {
public:
    static Power from_watts(double watts);
    static Power from_dbm(double dbm);
    double watts() const { return watts_; }
    double dbm() const;

private:
    explicit Power(double watts) : watts_(watts) {}
    double watts_;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

struct S21Point {
    double freq_hz = 0.0;
    std::complex<double> value;
};

/// A frequency-ordered complex scattering trace. Power metadata is optional
/// and only required once photon-number calibration is requested.
class S21Trace {
public:
    static constexpr std::size_t kMinPoints = 16;

    S21Trace(std::vector<S21Point> points,
             std::optional<double> applied_power_dbm = std::nullopt,
             std::optional<double> line_attenuation_db = std::nullopt);

    const std::vector<S21Point>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    std::optional<double> applied_power_dbm() const { return applied_power_dbm_; }
    std::optional<double> line_attenuation_db() const { return line_attenuation_db_; }

private:
    std::vector<S21Point> points_;
    std::optional<double> applied_power_dbm_;
    std::optional<double> line_attenuation_db_;
};

struct DecayPoint {
    double delay_s = 0.0;
    double signal = 0.0;
};

/// Delay-ordered time-domain trace (T1 or Ramsey).
class DecayTrace {
public:
    static constexpr std::size_t kMinPoints = 8;

    explicit DecayTrace(std::vector<DecayPoint> points);

    const std::vector<DecayPoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    double span_s() const;

private:
    std::vector<DecayPoint> points_;
};

} // namespace qdev
