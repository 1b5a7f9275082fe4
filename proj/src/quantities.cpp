#include "qdev/quantities.hpp"

#include <cmath>
#include <string>

namespace qdev {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidQuantity: return "invalid-quantity";
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::NoDipFound: return "no-dip-found";
    case ErrorCode::UnphysicalFit: return "unphysical-fit";
    case ErrorCode::ConstantSignal: return "constant-signal";
    case ErrorCode::DetuningUnresolved: return "detuning-unresolved";
    case ErrorCode::InconsistentPunchout: return "inconsistent-punchout";
    case ErrorCode::InconsistentDispersive: return "inconsistent-dispersive";
    case ErrorCode::BadInitialGuess: return "bad-initial-guess";
    case ErrorCode::FitFailure: return "fit-failure";
    case ErrorCode::SweepFailed: return "sweep-failed";
    case ErrorCode::F0Mismatch: return "f0-mismatch";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::MissingMetadata: return "missing-metadata";
    }
    return "error";
}

Frequency::Frequency(double hz) : hz_(hz) {
    if (!std::isfinite(hz)) {
        throw Error(ErrorCode::InvalidQuantity, "frequency must be finite");
    }
}

AngularFrequency::AngularFrequency(double rad_per_s) : rad_per_s_(rad_per_s) {
    if (!std::isfinite(rad_per_s)) {
        throw Error(ErrorCode::InvalidQuantity, "angular frequency must be finite");
    }
}

AngularFrequency to_angular(Frequency f) {
    return AngularFrequency(constants::kTwoPi * f.hz());
}

Power Power::from_watts(double watts) {
    if (!std::isfinite(watts) || watts <= 0.0) {
        throw Error(ErrorCode::InvalidQuantity, "power must be finite and positive");
    }
    return Power(watts);
}

Power Power::from_dbm(double dbm) {
    return Power(dbm_to_watts(dbm));
}

double Power::dbm() const {
    return watts_to_dbm(watts_);
}

double dbm_to_watts(double dbm) {
    if (!std::isfinite(dbm)) {
        throw Error(ErrorCode::InvalidQuantity, "dBm value must be finite");
    }
    return 1e-3 * std::pow(10.0, dbm / 10.0);
}

double watts_to_dbm(double watts) {
    if (!std::isfinite(watts) || watts <= 0.0) {
        throw Error(ErrorCode::InvalidQuantity, "watts must be finite and positive");
    }
    return 10.0 * std::log10(watts / 1e-3);
}

S21Trace::S21Trace(std::vector<S21Point> points,
                   std::optional<double> applied_power_dbm,
                   std::optional<double> line_attenuation_db)
    : points_(std::move(points)),
      applied_power_dbm_(applied_power_dbm),
      line_attenuation_db_(line_attenuation_db) {
    if (points_.size() < kMinPoints) {
        throw Error(ErrorCode::InsufficientData,
                    "S21 trace needs at least " + std::to_string(kMinPoints) +
                        " points, got " + std::to_string(points_.size()));
    }
    double prev = -1.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        if (!std::isfinite(p.freq_hz) || !std::isfinite(p.value.real()) ||
            !std::isfinite(p.value.imag())) {
            throw Error(ErrorCode::InvalidInput,
                        "non-finite sample at index " + std::to_string(i));
        }
        if (i > 0 && p.freq_hz <= prev) {
            throw Error(ErrorCode::InvalidInput,
                        "frequencies must be strictly increasing (index " +
                            std::to_string(i) + ")");
        }
        prev = p.freq_hz;
    }
    if (applied_power_dbm_ && !std::isfinite(*applied_power_dbm_)) {
        throw Error(ErrorCode::InvalidQuantity, "applied power must be finite");
    }
    if (line_attenuation_db_ &&
        (!std::isfinite(*line_attenuation_db_) || *line_attenuation_db_ < 0.0)) {
        throw Error(ErrorCode::InvalidQuantity,
                    "line attenuation must be finite and non-negative");
    }
}

DecayTrace::DecayTrace(std::vector<DecayPoint> points) : points_(std::move(points)) {
    if (points_.size() < kMinPoints) {
        throw Error(ErrorCode::InsufficientData,
                    "decay trace needs at least " + std::to_string(kMinPoints) +
                        " points, got " + std::to_string(points_.size()));
    }
    double prev = -1.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        if (!std::isfinite(p.delay_s) || !std::isfinite(p.signal)) {
            throw Error(ErrorCode::InvalidInput,
                        "non-finite sample at index " + std::to_string(i));
        }
        if (p.delay_s < 0.0) {
            throw Error(ErrorCode::InvalidInput,
                        "delays must be non-negative (index " + std::to_string(i) + ")");
        }
        if (i > 0 && p.delay_s <= prev) {
            throw Error(ErrorCode::InvalidInput,
                        "delays must be strictly increasing (index " +
                            std::to_string(i) + ")");
        }
        prev = p.delay_s;
    }
}

double DecayTrace::span_s() const {
    return points_.back().delay_s - points_.front().delay_s;
}

} // namespace qdev
