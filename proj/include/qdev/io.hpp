#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qdev/ler.hpp"
#include "qdev/quantities.hpp"
#include "qdev/transmon.hpp"

namespace qdev::io {

/// FNV-1a 64-bit digest, reported as a fixed-width hex string. Used to pin
/// input files inside reports so reruns are verifiable.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string digest_hex(const std::string& bytes);
std::string digest_file(const std::string& path);

enum class S21FormatHint { Auto, Csv, Touchstone };

enum class S21ExportFormat { CsvRi, CsvPolar, TouchstoneRi, TouchstoneMa, TouchstoneDb };

/// Parse an S21 trace. CSV carries `freq_hz,re,im` or `freq_hz,mag_db,phase_deg`
/// columns plus optional `# key = value` metadata comments; Touchstone 1.x
/// 2-port files are read through their option line (RI/MA/DB, any frequency
/// unit). Flag metadata overrides whatever the file carries.
S21Trace ingest_s21(std::istream& in, const std::string& name,
                    S21FormatHint hint = S21FormatHint::Auto,
                    std::optional<double> applied_power_dbm = std::nullopt,
                    std::optional<double> line_attenuation_db = std::nullopt);
S21Trace ingest_s21_file(const std::string& path,
                         S21FormatHint hint = S21FormatHint::Auto,
                         std::optional<double> applied_power_dbm = std::nullopt,
                         std::optional<double> line_attenuation_db = std::nullopt);

void export_s21(std::ostream& out, const S21Trace& trace, S21ExportFormat format);

/// CSV with a `delay_s,signal` header.
DecayTrace ingest_decay(std::istream& in, const std::string& name);
DecayTrace ingest_decay_file(const std::string& path);
void export_decay(std::ostream& out, const DecayTrace& trace);

/// CSV with a `length_m,f_r_hz` header.
std::vector<LengthFrequencyPoint> ingest_ler_points(std::istream& in,
                                                    const std::string& name);
std::vector<LengthFrequencyPoint> ingest_ler_points_file(const std::string& path);
void export_ler_points(std::ostream& out, const std::vector<LengthFrequencyPoint>& points);

/// CSV with a `t1_s` header.
std::vector<double> ingest_t1_samples(std::istream& in, const std::string& name);
std::vector<double> ingest_t1_samples_file(const std::string& path);
void export_t1_samples(std::ostream& out, const std::vector<double>& samples_s);

/// Flat JSON measured-parameter file. Accepts either `alpha_hz` or
/// `f02_over_2_hz`, and either `g_hz` (mapped onto a bare readout frequency
/// through the punch-out relation) or `f_ro_bare_hz` directly; T1 comes as
/// `t1_samples_s` (array) or `t1_mean_s`.
TransmonMeasured ingest_transmon_measured(std::istream& in, const std::string& name);
TransmonMeasured ingest_transmon_measured_file(const std::string& path);

/// Shortest text that round-trips the double exactly.
std::string format_double(double value);

} // namespace qdev::io
