#include "qdev/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "qdev/io.hpp"
#include "qdev/ler.hpp"
#include "qdev/report.hpp"
#include "qdev/resonator.hpp"
#include "qdev/synth.hpp"
#include "qdev/timedomain.hpp"
#include "qdev/transmon.hpp"
#include "qdev/version.hpp"

namespace qdev {

namespace {

struct GlobalOptions {
    std::string out_path = "-";
    bool out_given = false;
    std::string format = "json";
    std::uint64_t seed = 0;
    bool verbose = false;
};

struct NamedInput {
    std::string name;
    std::string bytes;
};

NamedInput load_input(const std::string& path, std::istream& in) {
    if (path == "-") {
        std::ostringstream ss;
        ss << in.rdbuf();
        return NamedInput{"<stdin>", ss.str()};
    }
    std::ifstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorCode::ParseError, path + ": cannot open file");
    std::ostringstream ss;
    ss << file.rdbuf();
    return NamedInput{path, ss.str()};
}

void write_output(const std::string& path, const std::string& bytes, std::ostream& out) {
    if (path == "-") {
        out << bytes;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorCode::ParseError, path + ": cannot open for writing");
    file << bytes;
}

ReportBody base_report(const std::string& command, const std::vector<NamedInput>& inputs) {
    ReportBody report;
    report["tool"] = kToolName;
    report["version"] = kToolVersion;
    report["command"] = command;
    auto list = ReportBody::array();
    for (const auto& input : inputs) {
        ReportBody entry;
        entry["path"] = input.name;
        entry["digest_fnv1a64"] = io::digest_hex(input.bytes);
        list.push_back(entry);
    }
    report["inputs"] = list;
    return report;
}

void emit_report(const ReportBody& report, const GlobalOptions& global,
                 std::ostream& out) {
    const std::string text = (global.format == "text") ? render_report_text(report)
                                                       : render_report_json(report);
    write_output(global.out_path, text, out);
}

io::S21FormatHint parse_hint(const std::string& hint) {
    if (hint == "csv") return io::S21FormatHint::Csv;
    if (hint == "s2p") return io::S21FormatHint::Touchstone;
    return io::S21FormatHint::Auto;
}

io::S21ExportFormat parse_export_format(const std::string& format) {
    if (format == "csv-polar") return io::S21ExportFormat::CsvPolar;
    if (format == "s2p-ri") return io::S21ExportFormat::TouchstoneRi;
    if (format == "s2p-ma") return io::S21ExportFormat::TouchstoneMa;
    if (format == "s2p-db") return io::S21ExportFormat::TouchstoneDb;
    return io::S21ExportFormat::CsvRi;
}

void add_resonator_fit_keys(ReportBody& report, const ResonatorFit& fit) {
    report["f0_hz"] = fit.params.f0_hz;
    report["q_loaded"] = fit.params.q_loaded;
    report["qc_mag"] = fit.params.qc_mag;
    report["phi_rad"] = fit.params.phi_rad;
    report["amplitude"] = fit.params.amplitude;
    report["theta_rad"] = fit.params.theta_rad;
    report["tau_s"] = fit.params.tau_s;
    report["qi"] = fit.qi;
    if (fit.sigma_valid) {
        report["f0_sigma_hz"] = fit.sigma.f0_hz;
        report["q_loaded_sigma"] = fit.sigma.q_loaded;
        report["qc_mag_sigma"] = fit.sigma.qc_mag;
        report["phi_sigma_rad"] = fit.sigma.phi_rad;
        report["amplitude_sigma"] = fit.sigma.amplitude;
        report["theta_sigma_rad"] = fit.sigma.theta_rad;
        report["tau_sigma_s"] = fit.sigma.tau_s;
        report["qi_sigma"] = fit.sigma.qi;
    }
    report["rms_residual"] = fit.rms_residual;
    report["cost"] = fit.cost;
    report["iterations"] = fit.iterations;
    report["converged"] = fit.converged;
}

struct CliState {
    GlobalOptions global;
    std::istream& in;
    std::ostream& out;
    std::ostream& err;

    // fit-resonator / power-sweep
    std::string input_path;
    std::vector<std::string> input_paths;
    std::string hint = "auto";
    double power_dbm = 0.0;
    bool power_set = false;
    double attenuation_db = 0.0;
    bool attenuation_set = false;
    bool want_photons = false;

    // t1-stats
    std::size_t bins = 10;

    // ler
    double inductance_h = 0.0;
    double stray_f = 0.0;
    double c0_f_per_m = 0.0;
    std::vector<double> lengths_m;
    double fin_height_m = 0.0;
    double fin_thickness_m = 0.0;
    double epsilon_r = 11.7;
    bool fin_given = false;

    // synth
    ResonatorParams synth_params;
    double f_start_hz = 0.0;
    double f_stop_hz = 0.0;
    std::size_t n_points = 0;
    double sigma = 0.0;
    std::string data_out;
    std::string data_format = "csv-ri";
    double t1_s = 0.0;
    double t2_s = 0.0;
    double detuning_hz = 0.0;
    double amplitude = 1.0;
    double phase_rad = 0.0;
    double offset = 0.0;
    double span_s = 0.0;
};

std::optional<double> optional_flag(bool set, double value) {
    return set ? std::optional<double>(value) : std::nullopt;
}

void run_fit_resonator(CliState& s) {
    const NamedInput input = load_input(s.input_path, s.in);
    std::istringstream stream(input.bytes);
    const S21Trace trace =
        io::ingest_s21(stream, input.name, parse_hint(s.hint),
                       optional_flag(s.power_set, s.power_dbm),
                       optional_flag(s.attenuation_set, s.attenuation_db));
    const ResonatorFit fit = fit_resonator(trace);
    if (s.global.verbose) {
        s.err << "fit converged=" << fit.converged << " iterations=" << fit.iterations
              << " rms=" << io::format_double(fit.rms_residual) << "\n";
    }

    ReportBody report = base_report("fit-resonator", {input});
    add_resonator_fit_keys(report, fit);
    if (s.want_photons) {
        if (!trace.applied_power_dbm() || !trace.line_attenuation_db()) {
            throw Error(ErrorCode::MissingMetadata,
                        "photon-number calibration requested but applied power or "
                        "attenuation is missing; pass --power/--attenuation or embed "
                        "them in the file");
        }
        report["applied_power_dbm"] = *trace.applied_power_dbm();
        report["line_attenuation_db"] = *trace.line_attenuation_db();
        report["photon_number"] = photon_number(fit, *trace.applied_power_dbm(),
                                                *trace.line_attenuation_db());
    }
    emit_report(report, s.global, s.out);
}

void run_power_sweep(CliState& s) {
    std::vector<NamedInput> inputs;
    std::vector<S21Trace> traces;
    std::vector<SweepSkip> ingest_skips;
    for (std::size_t i = 0; i < s.input_paths.size(); ++i) {
        NamedInput input = load_input(s.input_paths[i], s.in);
        std::istringstream stream(input.bytes);
        try {
            traces.push_back(io::ingest_s21(
                stream, input.name, parse_hint(s.hint),
                optional_flag(s.power_set, s.power_dbm),
                optional_flag(s.attenuation_set, s.attenuation_db)));
        } catch (const Error& e) {
            ingest_skips.push_back(SweepSkip{i, e.what()});
        }
        inputs.push_back(std::move(input));
    }
    if (traces.size() < 2) {
        throw Error(ErrorCode::SweepFailed, "fewer than 2 traces could be ingested");
    }
    SweepResult sweep = power_sweep(traces);

    ReportBody report = base_report("power-sweep", inputs);
    auto points = ReportBody::array();
    for (const auto& p : sweep.points) {
        ReportBody entry;
        entry["photon_number"] = p.photon_number;
        entry["qi"] = p.qi;
        entry["qi_sigma"] = p.qi_sigma;
        points.push_back(entry);
    }
    report["points"] = points;
    auto skips = ReportBody::array();
    for (const auto& skip : ingest_skips) {
        ReportBody entry;
        entry["input"] = inputs[skip.trace_index].name;
        entry["reason"] = skip.reason;
        skips.push_back(entry);
    }
    for (const auto& skip : sweep.skipped) {
        ReportBody entry;
        entry["input"] = inputs[skip.trace_index].name;
        entry["reason"] = skip.reason;
        skips.push_back(entry);
    }
    report["skipped"] = skips;
    emit_report(report, s.global, s.out);
}

void run_transmon_derive(CliState& s) {
    const NamedInput input = load_input(s.input_path, s.in);
    std::istringstream stream(input.bytes);
    const TransmonMeasured measured = io::ingest_transmon_measured(stream, input.name);
    const TransmonDerived derived = derive_all(measured);

    ReportBody report = base_report("transmon-derive", {input});
    report["f01_hz"] = measured.f01_hz;
    report["f_ro_hz"] = measured.f_ro_hz;
    if (measured.f02_over_2_hz) report["f02_over_2_hz"] = *measured.f02_over_2_hz;
    if (measured.f_ro_bare_hz) report["f_ro_bare_hz"] = *measured.f_ro_bare_hz;
    if (measured.kappa_hz) report["kappa_hz"] = *measured.kappa_hz;
    if (measured.chi_hz) report["chi_hz"] = *measured.chi_hz;
    if (!measured.t1_samples_s.empty()) {
        report["t1_mean_s"] = std::accumulate(measured.t1_samples_s.begin(),
                                              measured.t1_samples_s.end(), 0.0) /
                              static_cast<double>(measured.t1_samples_s.size());
    }
    if (measured.t2_star_s) report["t2_star_s"] = *measured.t2_star_s;

    report["delta_hz"] = derived.delta_hz;
    if (derived.alpha_hz) report["alpha_hz"] = *derived.alpha_hz;
    if (derived.e_c_hz) report["e_c_hz"] = *derived.e_c_hz;
    if (derived.e_j_hz) report["e_j_hz"] = *derived.e_j_hz;
    if (derived.ej_ec_ratio) report["ej_ec_ratio"] = *derived.ej_ec_ratio;
    if (derived.g_punchout_hz) report["g_punchout_hz"] = *derived.g_punchout_hz;
    if (derived.g_dispersive_hz) report["g_dispersive_hz"] = *derived.g_dispersive_hz;
    if (derived.t_purcell_s) report["t_purcell_s"] = *derived.t_purcell_s;
    if (derived.qubit_q) report["qubit_q"] = *derived.qubit_q;
    report["warnings"] = derived.warnings;
    report["notes"] = derived.notes;
    emit_report(report, s.global, s.out);
}

void run_fit_t1(CliState& s) {
    const NamedInput input = load_input(s.input_path, s.in);
    std::istringstream stream(input.bytes);
    const DecayTrace trace = io::ingest_decay(stream, input.name);
    const T1Fit fit = fit_t1(trace);

    ReportBody report = base_report("fit-t1", {input});
    report["t1_s"] = fit.t1_s;
    report["amplitude"] = fit.amplitude;
    report["offset"] = fit.offset;
    if (fit.sigma_valid) {
        report["t1_sigma_s"] = fit.t1_sigma_s;
        report["amplitude_sigma"] = fit.amplitude_sigma;
        report["offset_sigma"] = fit.offset_sigma;
    }
    report["rms_residual"] = fit.rms_residual;
    report["iterations"] = fit.iterations;
    report["converged"] = fit.converged;
    emit_report(report, s.global, s.out);
}

void run_fit_ramsey(CliState& s) {
    const NamedInput input = load_input(s.input_path, s.in);
    std::istringstream stream(input.bytes);
    const DecayTrace trace = io::ingest_decay(stream, input.name);
    const RamseyFit fit = fit_ramsey(trace);

    ReportBody report = base_report("fit-ramsey", {input});
    report["t2_star_s"] = fit.t2_star_s;
    report["detuning_hz"] = fit.detuning_hz;
    report["amplitude"] = fit.amplitude;
    report["phase_rad"] = fit.phase_rad;
    report["offset"] = fit.offset;
    if (fit.sigma_valid) {
        report["t2_star_sigma_s"] = fit.t2_star_sigma_s;
        report["detuning_sigma_hz"] = fit.detuning_sigma_hz;
        report["amplitude_sigma"] = fit.amplitude_sigma;
        report["phase_sigma_rad"] = fit.phase_sigma_rad;
        report["offset_sigma"] = fit.offset_sigma;
    }
    report["rms_residual"] = fit.rms_residual;
    report["low_confidence"] = fit.low_confidence;
    report["iterations"] = fit.iterations;
    report["converged"] = fit.converged;
    emit_report(report, s.global, s.out);
}

void run_t1_stats(CliState& s) {
    const NamedInput input = load_input(s.input_path, s.in);
    std::istringstream stream(input.bytes);
    const std::vector<double> samples = io::ingest_t1_samples(stream, input.name);
    const T1Stats stats = t1_statistics(samples, s.bins);

    ReportBody report = base_report("t1-stats", {input});
    report["n_samples"] = samples.size();
    report["mean_s"] = stats.mean_s;
    report["median_s"] = stats.median_s;
    report["std_s"] = stats.std_s;
    report["bin_edges_s"] = stats.bin_edges_s;
    report["counts"] = stats.counts;
    if (stats.bimodality_defined) {
        report["bimodality_coefficient"] = stats.bimodality_coefficient;
    }
    report["bimodal_suspect"] = stats.bimodal_suspect;
    emit_report(report, s.global, s.out);
}

void run_ler_fit_c0(CliState& s) {
    const NamedInput input = load_input(s.input_path, s.in);
    std::istringstream stream(input.bytes);
    const auto points = io::ingest_ler_points(stream, input.name);
    const C0Fit fit = fit_c0(points, s.inductance_h);

    ReportBody report = base_report("ler-fit-c0", {input});
    report["inductance_h"] = s.inductance_h;
    report["n_points"] = points.size();
    report["c0_f_per_m"] = fit.c0_f_per_m;
    report["c_stray_f"] = fit.c_stray_f;
    report["f_at_zero_hz"] = fit.f_at_zero_hz;
    report["rms_residual"] = fit.rms_residual;
    emit_report(report, s.global, s.out);
}

void run_ler_design(CliState& s) {
    ReportBody report = base_report("ler-design", {});
    report["inductance_h"] = s.inductance_h;
    report["stray_capacitance_f"] = s.stray_f;
    report["c0_f_per_m"] = s.c0_f_per_m;
    report["f_at_zero_length_hz"] = resonant_frequency(s.inductance_h, s.stray_f);
    auto lengths = ReportBody::array();
    for (double len : s.lengths_m) {
        const double capacitance = s.stray_f + s.c0_f_per_m * len;
        ReportBody entry;
        entry["length_m"] = len;
        entry["total_capacitance_f"] = capacitance;
        entry["f_r_hz"] = resonant_frequency(s.inductance_h, capacitance);
        entry["fin_fraction"] = fin_fraction(s.c0_f_per_m, len, s.stray_f);
        lengths.push_back(entry);
    }
    report["lengths"] = lengths;
    if (s.fin_given) {
        const FinGeometry geometry{s.fin_height_m, s.fin_thickness_m, s.epsilon_r};
        report["fin_height_m"] = s.fin_height_m;
        report["fin_thickness_m"] = s.fin_thickness_m;
        report["epsilon_r"] = s.epsilon_r;
        report["plate_estimate_f_per_m"] = parallel_plate_estimate(geometry);
    }
    emit_report(report, s.global, s.out);
}

void add_synth_common(ReportBody& report, const CliState& s,
                      const std::string& data_bytes) {
    report["seed"] = s.global.seed;
    report["sigma"] = s.sigma;
    report["data_path"] = s.data_out == "-" ? "<stdout>" : s.data_out;
    report["data_digest_fnv1a64"] = io::digest_hex(data_bytes);
}

void maybe_emit_synth_report(ReportBody& report, CliState& s) {
    if (s.global.out_given) emit_report(report, s.global, s.out);
}

void run_synth_s21(CliState& s) {
    const NoiseSpec noise{s.sigma, s.global.seed};
    const S21Trace trace =
        synth_s21(s.synth_params, s.f_start_hz, s.f_stop_hz, s.n_points, noise,
                  optional_flag(s.power_set, s.power_dbm),
                  optional_flag(s.attenuation_set, s.attenuation_db));
    std::ostringstream data;
    io::export_s21(data, trace, parse_export_format(s.data_format));
    write_output(s.data_out, data.str(), s.out);

    ReportBody report = base_report("synth-s21", {});
    report["f0_hz"] = s.synth_params.f0_hz;
    report["q_loaded"] = s.synth_params.q_loaded;
    report["qc_mag"] = s.synth_params.qc_mag;
    report["phi_rad"] = s.synth_params.phi_rad;
    report["amplitude"] = s.synth_params.amplitude;
    report["theta_rad"] = s.synth_params.theta_rad;
    report["tau_s"] = s.synth_params.tau_s;
    report["f_start_hz"] = s.f_start_hz;
    report["f_stop_hz"] = s.f_stop_hz;
    report["points"] = s.n_points;
    report["data_format"] = s.data_format;
    if (s.power_set) report["applied_power_dbm"] = s.power_dbm;
    if (s.attenuation_set) report["line_attenuation_db"] = s.attenuation_db;
    add_synth_common(report, s, data.str());
    maybe_emit_synth_report(report, s);
}

void run_synth_decay(CliState& s) {
    const NoiseSpec noise{s.sigma, s.global.seed};
    const DecayTrace trace =
        synth_decay(s.t1_s, s.amplitude, s.offset, s.span_s, s.n_points, noise);
    std::ostringstream data;
    io::export_decay(data, trace);
    write_output(s.data_out, data.str(), s.out);

    ReportBody report = base_report("synth-decay", {});
    report["t1_s"] = s.t1_s;
    report["amplitude"] = s.amplitude;
    report["offset"] = s.offset;
    report["span_s"] = s.span_s;
    report["points"] = s.n_points;
    add_synth_common(report, s, data.str());
    maybe_emit_synth_report(report, s);
}

void run_synth_ramsey(CliState& s) {
    const NoiseSpec noise{s.sigma, s.global.seed};
    const DecayTrace trace = synth_ramsey(s.t2_s, s.detuning_hz, s.amplitude,
                                          s.phase_rad, s.offset, s.span_s,
                                          s.n_points, noise);
    std::ostringstream data;
    io::export_decay(data, trace);
    write_output(s.data_out, data.str(), s.out);

    ReportBody report = base_report("synth-ramsey", {});
    report["t2_s"] = s.t2_s;
    report["detuning_hz"] = s.detuning_hz;
    report["amplitude"] = s.amplitude;
    report["phase_rad"] = s.phase_rad;
    report["offset"] = s.offset;
    report["span_s"] = s.span_s;
    report["points"] = s.n_points;
    add_synth_common(report, s, data.str());
    maybe_emit_synth_report(report, s);
}

void run_synth_ler(CliState& s) {
    const NoiseSpec noise{s.sigma, s.global.seed};
    const LerDesign design{s.inductance_h, s.stray_f, s.c0_f_per_m, s.epsilon_r};
    const auto points = synth_ler_dataset(design, s.lengths_m, noise);
    std::ostringstream data;
    io::export_ler_points(data, points);
    write_output(s.data_out, data.str(), s.out);

    ReportBody report = base_report("synth-ler", {});
    report["inductance_h"] = s.inductance_h;
    report["stray_capacitance_f"] = s.stray_f;
    report["c0_f_per_m"] = s.c0_f_per_m;
    report["lengths_m"] = s.lengths_m;
    add_synth_common(report, s, data.str());
    maybe_emit_synth_report(report, s);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
    CliState s{GlobalOptions{}, in, out, err};

    CLI::App app{"Superconducting microwave device characterization toolkit"};
    app.name("qdev");
    app.require_subcommand(1);

    app.add_option("--out", s.global.out_path, "Report path ('-' for stdout)")
        ->each([&](const std::string&) { s.global.out_given = true; });
    app.add_option("--format", s.global.format, "Report format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    app.add_option("--seed", s.global.seed, "Seed for synthetic generators")
        ->envname("QDEV_SEED");
    app.add_flag("--verbose", s.global.verbose, "Chatty progress on stderr");

    auto add_hint = [&](CLI::App* cmd) {
        cmd->add_option("--format-hint", s.hint, "Input format")
            ->check(CLI::IsMember({"auto", "csv", "s2p"}));
    };
    auto add_power_flags = [&](CLI::App* cmd) {
        cmd->add_option("--power", s.power_dbm, "Applied power in dBm (overrides file)")
            ->each([&](const std::string&) { s.power_set = true; });
        cmd->add_option("--attenuation", s.attenuation_db,
                        "Line attenuation in dB (overrides file)")
            ->each([&](const std::string&) { s.attenuation_set = true; });
    };

    auto* fit_res = app.add_subcommand("fit-resonator", "DCM fit of a complex S21 trace");
    fit_res->fallthrough();
    fit_res->add_option("input", s.input_path, "Trace file ('-' for stdin)")->required();
    add_hint(fit_res);
    add_power_flags(fit_res);
    fit_res->add_flag("--photons", s.want_photons, "Also calibrate the photon number");
    fit_res->callback([&] { run_fit_resonator(s); });

    auto* sweep = app.add_subcommand("power-sweep",
                                     "Fit a set of traces and report Qi vs photon number");
    sweep->fallthrough();
    sweep->add_option("inputs", s.input_paths, "Trace files")->required()->expected(-2);
    add_hint(sweep);
    add_power_flags(sweep);
    sweep->callback([&] { run_power_sweep(s); });

    auto* derive = app.add_subcommand("transmon-derive",
                                      "Derive Table-style transmon parameters");
    derive->fallthrough();
    derive->add_option("input", s.input_path, "Measured-parameters JSON ('-' for stdin)")
        ->required();
    derive->callback([&] { run_transmon_derive(s); });

    auto* t1 = app.add_subcommand("fit-t1", "Exponential fit of a relaxation trace");
    t1->fallthrough();
    t1->add_option("input", s.input_path, "Decay CSV ('-' for stdin)")->required();
    t1->callback([&] { run_fit_t1(s); });

    auto* ramsey = app.add_subcommand("fit-ramsey", "Damped-cosine fit of a Ramsey trace");
    ramsey->fallthrough();
    ramsey->add_option("input", s.input_path, "Decay CSV ('-' for stdin)")->required();
    ramsey->callback([&] { run_fit_ramsey(s); });

    auto* stats = app.add_subcommand("t1-stats", "Histogram statistics over T1 samples");
    stats->fallthrough();
    stats->add_option("input", s.input_path, "T1 samples CSV ('-' for stdin)")->required();
    stats->add_option("--bins", s.bins, "Histogram bin count")->capture_default_str();
    stats->callback([&] { run_t1_stats(s); });

    auto* c0 = app.add_subcommand("ler-fit-c0",
                                  "Capacitance per length from f_r vs fin length");
    c0->fallthrough();
    c0->add_option("input", s.input_path, "length/frequency CSV ('-' for stdin)")
        ->required();
    c0->add_option("--inductance-h", s.inductance_h, "Inductance in H")->required();
    c0->callback([&] { run_ler_fit_c0(s); });

    auto* design = app.add_subcommand("ler-design", "Lumped-element resonator design math");
    design->fallthrough();
    design->add_option("--inductance-h", s.inductance_h, "Inductance in H")->required();
    design->add_option("--stray-f", s.stray_f, "Stray capacitance in F")->required();
    design->add_option("--c0-f-per-m", s.c0_f_per_m, "Capacitance per length in F/m")
        ->required();
    design->add_option("--length-m", s.lengths_m, "Metallized fin length(s) in m");
    design->add_option("--fin-height-m", s.fin_height_m, "Fin plate height in m")
        ->each([&](const std::string&) { s.fin_given = true; });
    design->add_option("--fin-thickness-m", s.fin_thickness_m, "Fin thickness in m");
    design->add_option("--epsilon-r", s.epsilon_r, "Dielectric constant")
        ->capture_default_str();
    design->callback([&] { run_ler_design(s); });

    auto* synth = app.add_subcommand("synth", "Seeded synthetic-data generators");
    synth->fallthrough();
    synth->require_subcommand(1);

    auto add_data_out = [&](CLI::App* cmd) {
        cmd->add_option("--data-out", s.data_out, "Data file path ('-' for stdout)")
            ->required();
        cmd->add_option("--sigma", s.sigma, "Noise standard deviation")
            ->capture_default_str();
    };

    auto* s21 = synth->add_subcommand("s21", "Synthetic S21 trace from DCM truth");
    s21->fallthrough();
    s21->add_option("--f0-hz", s.synth_params.f0_hz, "Resonance frequency")->required();
    s21->add_option("--ql", s.synth_params.q_loaded, "Loaded quality factor")->required();
    s21->add_option("--qc", s.synth_params.qc_mag, "|Qc|")->required();
    s21->add_option("--phi", s.synth_params.phi_rad, "DCM asymmetry angle");
    s21->add_option("--amplitude", s.synth_params.amplitude, "Background amplitude");
    s21->add_option("--theta", s.synth_params.theta_rad, "Background phase");
    s21->add_option("--tau-s", s.synth_params.tau_s, "Cable delay in s");
    s21->add_option("--f-start-hz", s.f_start_hz, "Grid start")->required();
    s21->add_option("--f-stop-hz", s.f_stop_hz, "Grid stop")->required();
    s21->add_option("--points", s.n_points, "Grid points")->required();
    s21->add_option("--data-format", s.data_format, "Data file format")
        ->check(CLI::IsMember({"csv-ri", "csv-polar", "s2p-ri", "s2p-ma", "s2p-db"}))
        ->capture_default_str();
    add_power_flags(s21);
    add_data_out(s21);
    s21->callback([&] { run_synth_s21(s); });

    auto* decay = synth->add_subcommand("decay", "Synthetic exponential decay trace");
    decay->fallthrough();
    decay->add_option("--t1-s", s.t1_s, "Relaxation time in s")->required();
    decay->add_option("--amplitude", s.amplitude, "Amplitude")->capture_default_str();
    decay->add_option("--offset", s.offset, "Offset")->capture_default_str();
    decay->add_option("--span-s", s.span_s, "Delay span in s")->required();
    decay->add_option("--points", s.n_points, "Delay points")->required();
    add_data_out(decay);
    decay->callback([&] { run_synth_decay(s); });

    auto* rams = synth->add_subcommand("ramsey", "Synthetic Ramsey fringe trace");
    rams->fallthrough();
    rams->add_option("--t2-s", s.t2_s, "Dephasing time in s")->required();
    rams->add_option("--detuning-hz", s.detuning_hz, "Fringe detuning")->required();
    rams->add_option("--amplitude", s.amplitude, "Amplitude")->capture_default_str();
    rams->add_option("--phase", s.phase_rad, "Initial phase in rad");
    rams->add_option("--offset", s.offset, "Offset")->capture_default_str();
    rams->add_option("--span-s", s.span_s, "Delay span in s")->required();
    rams->add_option("--points", s.n_points, "Delay points")->required();
    add_data_out(rams);
    rams->callback([&] { run_synth_ramsey(s); });

    auto* ler = synth->add_subcommand("ler", "Synthetic f_r-vs-length dataset");
    ler->fallthrough();
    ler->add_option("--inductance-h", s.inductance_h, "Inductance in H")->required();
    ler->add_option("--stray-f", s.stray_f, "Stray capacitance in F")->required();
    ler->add_option("--c0-f-per-m", s.c0_f_per_m, "Capacitance per length in F/m")
        ->required();
    ler->add_option("--length-m", s.lengths_m, "Fin lengths in m")->required();
    add_data_out(ler);
    ler->callback([&] { run_synth_ler(s); });

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("qdev");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace qdev
