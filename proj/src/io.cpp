#include "qdev/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qdev::io {

namespace {

using json = nlohmann::json;

[[noreturn]] void parse_fail(const std::string& name, std::size_t line,
                             const std::string& message) {
    throw Error(ErrorCode::ParseError,
                name + ":" + std::to_string(line) + ": " + message);
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

std::vector<std::string> split_whitespace(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (ss >> item) out.push_back(item);
    return out;
}

double parse_number(const std::string& token, const std::string& name, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) parse_fail(name, line, "trailing junk in '" + token + "'");
        return v;
    } catch (const std::exception&) {
        parse_fail(name, line, "cannot parse number '" + token + "'");
    }
}

// `# key = value` metadata comment; returns false for plain comments.
bool parse_metadata_comment(const std::string& body, std::string& key, double& value) {
    const auto eq = body.find('=');
    if (eq == std::string::npos) return false;
    key = lower(trim(body.substr(0, eq)));
    const std::string raw = trim(body.substr(eq + 1));
    try {
        std::size_t used = 0;
        value = std::stod(raw, &used);
        return used == raw.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::complex<double> from_polar_db(double mag_db, double phase_deg) {
    const double mag = std::pow(10.0, mag_db / 20.0);
    const double phase = phase_deg * std::numbers::pi / 180.0;
    return {mag * std::cos(phase), mag * std::sin(phase)};
}

std::complex<double> from_polar_linear(double mag, double phase_deg) {
    const double phase = phase_deg * std::numbers::pi / 180.0;
    return {mag * std::cos(phase), mag * std::sin(phase)};
}

S21Trace ingest_s21_csv(std::istream& in, const std::string& name,
                        std::optional<double> power_override,
                        std::optional<double> attenuation_override) {
    std::optional<double> power;
    std::optional<double> attenuation;
    std::vector<S21Point> pts;
    bool polar = false;
    bool have_header = false;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string key;
            double value = 0.0;
            if (parse_metadata_comment(line.substr(1), key, value)) {
                if (key == "applied_power_dbm") power = value;
                else if (key == "line_attenuation_db") attenuation = value;
            }
            continue;
        }
        if (!have_header) {
            const auto cols = split(lower(line), ',');
            if (cols.size() == 3 && cols[0] == "freq_hz" && cols[1] == "re" &&
                cols[2] == "im") {
                polar = false;
            } else if (cols.size() == 3 && cols[0] == "freq_hz" && cols[1] == "mag_db" &&
                       cols[2] == "phase_deg") {
                polar = true;
            } else {
                parse_fail(name, line_no,
                           "expected header 'freq_hz,re,im' or 'freq_hz,mag_db,phase_deg'");
            }
            have_header = true;
            continue;
        }
        const auto cols = split(line, ',');
        if (cols.size() != 3) parse_fail(name, line_no, "expected 3 columns");
        const double f = parse_number(cols[0], name, line_no);
        const double a = parse_number(cols[1], name, line_no);
        const double b = parse_number(cols[2], name, line_no);
        pts.push_back(S21Point{f, polar ? from_polar_db(a, b) : std::complex<double>(a, b)});
        if (pts.size() > 1 && pts.back().freq_hz <= pts[pts.size() - 2].freq_hz) {
            parse_fail(name, line_no, "frequencies must be strictly increasing");
        }
    }
    if (!have_header) {
        throw Error(ErrorCode::InsufficientData, name + ": no header found (empty file?)");
    }
    if (power_override) power = power_override;
    if (attenuation_override) attenuation = attenuation_override;
    try {
        return S21Trace(std::move(pts), power, attenuation);
    } catch (const Error& e) {
        throw Error(e.code(), name + ": " + e.what());
    }
}

S21Trace ingest_s21_touchstone(std::istream& in, const std::string& name,
                               std::optional<double> power_override,
                               std::optional<double> attenuation_override) {
    double freq_scale = 1e9; // Touchstone default unit is GHz
    enum class Fmt { Ri, Ma, Db } fmt = Fmt::Ma;
    bool have_option_line = false;
    std::vector<S21Point> pts;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        const auto bang = line.find('!');
        if (bang != std::string::npos) line = trim(line.substr(0, bang));
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto tokens = split_whitespace(lower(line.substr(1)));
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                const std::string& t = tokens[i];
                if (t == "hz") freq_scale = 1.0;
                else if (t == "khz") freq_scale = 1e3;
                else if (t == "mhz") freq_scale = 1e6;
                else if (t == "ghz") freq_scale = 1e9;
                else if (t == "ri") fmt = Fmt::Ri;
                else if (t == "ma") fmt = Fmt::Ma;
                else if (t == "db") fmt = Fmt::Db;
                else if (t == "r") ++i; // reference impedance value follows
                else if (t != "s") parse_fail(name, line_no, "unsupported option '" + t + "'");
            }
            have_option_line = true;
            continue;
        }
        const auto tokens = split_whitespace(line);
        if (tokens.size() != 9) {
            parse_fail(name, line_no,
                       "expected 9 columns of 2-port data, got " +
                           std::to_string(tokens.size()));
        }
        double values[9];
        for (std::size_t i = 0; i < 9; ++i) values[i] = parse_number(tokens[i], name, line_no);
        const double f = values[0] * freq_scale;
        const double a = values[3]; // S21 columns
        const double b = values[4];
        std::complex<double> s21;
        switch (fmt) {
        case Fmt::Ri: s21 = {a, b}; break;
        case Fmt::Ma: s21 = from_polar_linear(a, b); break;
        case Fmt::Db: s21 = from_polar_db(a, b); break;
        }
        pts.push_back(S21Point{f, s21});
        if (pts.size() > 1 && pts.back().freq_hz <= pts[pts.size() - 2].freq_hz) {
            parse_fail(name, line_no, "frequencies must be strictly increasing");
        }
    }
    if (!have_option_line && pts.empty()) {
        throw Error(ErrorCode::InsufficientData, name + ": no Touchstone content found");
    }
    try {
        return S21Trace(std::move(pts), power_override, attenuation_override);
    } catch (const Error& e) {
        throw Error(e.code(), name + ": " + e.what());
    }
}

bool touchstone_name(const std::string& name) {
    const std::string l = lower(name);
    return l.size() >= 4 && (l.rfind(".s2p") == l.size() - 4 || l.rfind(".s1p") == l.size() - 4);
}

} // namespace

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string digest_hex(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
    return std::string(buf);
}

std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return digest_hex(ss.str());
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return std::string(buf);
}

S21Trace ingest_s21(std::istream& in, const std::string& name, S21FormatHint hint,
                    std::optional<double> applied_power_dbm,
                    std::optional<double> line_attenuation_db) {
    const bool touchstone = hint == S21FormatHint::Touchstone ||
                            (hint == S21FormatHint::Auto && touchstone_name(name));
    return touchstone
               ? ingest_s21_touchstone(in, name, applied_power_dbm, line_attenuation_db)
               : ingest_s21_csv(in, name, applied_power_dbm, line_attenuation_db);
}

S21Trace ingest_s21_file(const std::string& path, S21FormatHint hint,
                         std::optional<double> applied_power_dbm,
                         std::optional<double> line_attenuation_db) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open file");
    return ingest_s21(in, path, hint, applied_power_dbm, line_attenuation_db);
}

void export_s21(std::ostream& out, const S21Trace& trace, S21ExportFormat format) {
    const auto& pts = trace.points();
    switch (format) {
    case S21ExportFormat::CsvRi:
    case S21ExportFormat::CsvPolar: {
        if (trace.applied_power_dbm()) {
            out << "# applied_power_dbm = " << format_double(*trace.applied_power_dbm())
                << "\n";
        }
        if (trace.line_attenuation_db()) {
            out << "# line_attenuation_db = " << format_double(*trace.line_attenuation_db())
                << "\n";
        }
        if (format == S21ExportFormat::CsvRi) {
            out << "freq_hz,re,im\n";
            for (const auto& p : pts) {
                out << format_double(p.freq_hz) << ',' << format_double(p.value.real())
                    << ',' << format_double(p.value.imag()) << "\n";
            }
        } else {
            out << "freq_hz,mag_db,phase_deg\n";
            for (const auto& p : pts) {
                const double mag_db = 20.0 * std::log10(std::abs(p.value));
                const double phase_deg = std::arg(p.value) * 180.0 / std::numbers::pi;
                out << format_double(p.freq_hz) << ',' << format_double(mag_db) << ','
                    << format_double(phase_deg) << "\n";
            }
        }
        break;
    }
    case S21ExportFormat::TouchstoneRi:
    case S21ExportFormat::TouchstoneMa:
    case S21ExportFormat::TouchstoneDb: {
        const char* fmt = format == S21ExportFormat::TouchstoneRi   ? "RI"
                          : format == S21ExportFormat::TouchstoneMa ? "MA"
                                                                    : "DB";
        out << "! 2-port S-parameters, S21 only (S11/S12/S22 zeroed)\n";
        out << "# HZ S " << fmt << " R 50\n";
        for (const auto& p : pts) {
            double a = 0.0, b = 0.0;
            if (format == S21ExportFormat::TouchstoneRi) {
                a = p.value.real();
                b = p.value.imag();
            } else {
                const double mag = std::abs(p.value);
                a = (format == S21ExportFormat::TouchstoneDb) ? 20.0 * std::log10(mag) : mag;
                b = std::arg(p.value) * 180.0 / std::numbers::pi;
            }
            const char* zero = (format == S21ExportFormat::TouchstoneDb) ? "-300" : "0";
            out << format_double(p.freq_hz) << ' ' << zero << " 0 " << format_double(a)
                << ' ' << format_double(b) << ' ' << zero << " 0 " << zero << " 0\n";
        }
        break;
    }
    }
}

DecayTrace ingest_decay(std::istream& in, const std::string& name) {
    std::vector<DecayPoint> pts;
    bool have_header = false;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            const auto cols = split(lower(line), ',');
            if (cols.size() != 2 || cols[0] != "delay_s" || cols[1] != "signal") {
                parse_fail(name, line_no, "expected header 'delay_s,signal'");
            }
            have_header = true;
            continue;
        }
        const auto cols = split(line, ',');
        if (cols.size() != 2) parse_fail(name, line_no, "expected 2 columns");
        const double delay = parse_number(cols[0], name, line_no);
        const double signal = parse_number(cols[1], name, line_no);
        if (!pts.empty() && delay <= pts.back().delay_s) {
            parse_fail(name, line_no, "delays must be strictly increasing");
        }
        pts.push_back(DecayPoint{delay, signal});
    }
    if (!have_header) {
        throw Error(ErrorCode::InsufficientData, name + ": no header found (empty file?)");
    }
    try {
        return DecayTrace(std::move(pts));
    } catch (const Error& e) {
        throw Error(e.code(), name + ": " + e.what());
    }
}

DecayTrace ingest_decay_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open file");
    return ingest_decay(in, path);
}

void export_decay(std::ostream& out, const DecayTrace& trace) {
    out << "delay_s,signal\n";
    for (const auto& p : trace.points()) {
        out << format_double(p.delay_s) << ',' << format_double(p.signal) << "\n";
    }
}

std::vector<LengthFrequencyPoint> ingest_ler_points(std::istream& in,
                                                    const std::string& name) {
    std::vector<LengthFrequencyPoint> pts;
    bool have_header = false;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            const auto cols = split(lower(line), ',');
            if (cols.size() != 2 || cols[0] != "length_m" || cols[1] != "f_r_hz") {
                parse_fail(name, line_no, "expected header 'length_m,f_r_hz'");
            }
            have_header = true;
            continue;
        }
        const auto cols = split(line, ',');
        if (cols.size() != 2) parse_fail(name, line_no, "expected 2 columns");
        pts.push_back(LengthFrequencyPoint{parse_number(cols[0], name, line_no),
                                           parse_number(cols[1], name, line_no)});
    }
    if (!have_header) {
        throw Error(ErrorCode::InsufficientData, name + ": no header found (empty file?)");
    }
    return pts;
}

std::vector<LengthFrequencyPoint> ingest_ler_points_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open file");
    return ingest_ler_points(in, path);
}

void export_ler_points(std::ostream& out, const std::vector<LengthFrequencyPoint>& points) {
    out << "length_m,f_r_hz\n";
    for (const auto& p : points) {
        out << format_double(p.length_m) << ',' << format_double(p.f_r_hz) << "\n";
    }
}

std::vector<double> ingest_t1_samples(std::istream& in, const std::string& name) {
    std::vector<double> samples;
    bool have_header = false;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            if (lower(line) != "t1_s") parse_fail(name, line_no, "expected header 't1_s'");
            have_header = true;
            continue;
        }
        samples.push_back(parse_number(line, name, line_no));
    }
    if (!have_header) {
        throw Error(ErrorCode::InsufficientData, name + ": no header found (empty file?)");
    }
    return samples;
}

std::vector<double> ingest_t1_samples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open file");
    return ingest_t1_samples(in, path);
}

void export_t1_samples(std::ostream& out, const std::vector<double>& samples_s) {
    out << "t1_s\n";
    for (double s : samples_s) out << format_double(s) << "\n";
}

TransmonMeasured ingest_transmon_measured(std::istream& in, const std::string& name) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, name + ": " + e.what());
    }
    if (!j.is_object()) {
        throw Error(ErrorCode::ParseError, name + ": expected a JSON object");
    }

    auto get_number = [&](const char* key) -> std::optional<double> {
        if (!j.contains(key)) return std::nullopt;
        if (!j[key].is_number()) {
            throw Error(ErrorCode::ParseError,
                        name + ": key '" + key + "' must be a number");
        }
        return j[key].get<double>();
    };

    TransmonMeasured m;
    const auto f01 = get_number("f01_hz");
    const auto f_ro = get_number("f_ro_hz");
    if (!f01 || !f_ro) {
        throw Error(ErrorCode::ParseError, name + ": f01_hz and f_ro_hz are required");
    }
    m.f01_hz = *f01;
    m.f_ro_hz = *f_ro;
    m.f02_over_2_hz = get_number("f02_over_2_hz");
    if (const auto alpha = get_number("alpha_hz"); alpha && !m.f02_over_2_hz) {
        m.f02_over_2_hz = m.f01_hz + *alpha / 2.0; // α = 2(f02/2 - f01)
    }
    m.f_ro_bare_hz = get_number("f_ro_bare_hz");
    if (const auto g = get_number("g_hz"); g && !m.f_ro_bare_hz) {
        // Punch-out relation in reverse: the coupled readout sits g²/Δ away
        // from the bare resonance.
        const double delta = m.f01_hz - m.f_ro_hz;
        if (delta == 0.0) {
            throw Error(ErrorCode::ParseError,
                        name + ": g_hz given but the detuning is zero");
        }
        m.f_ro_bare_hz = m.f_ro_hz - (*g) * (*g) / delta;
    }
    m.kappa_hz = get_number("kappa_hz");
    m.chi_hz = get_number("chi_hz");
    m.t2_star_s = get_number("t2_star_s");
    if (j.contains("t1_samples_s")) {
        if (!j["t1_samples_s"].is_array()) {
            throw Error(ErrorCode::ParseError, name + ": t1_samples_s must be an array");
        }
        for (const auto& v : j["t1_samples_s"]) {
            if (!v.is_number()) {
                throw Error(ErrorCode::ParseError,
                            name + ": t1_samples_s entries must be numbers");
            }
            m.t1_samples_s.push_back(v.get<double>());
        }
    } else if (const auto t1 = get_number("t1_mean_s")) {
        m.t1_samples_s.push_back(*t1);
    }
    try {
        m.validate();
    } catch (const Error& e) {
        throw Error(e.code(), name + ": " + e.what());
    }
    return m;
}

TransmonMeasured ingest_transmon_measured_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open file");
    return ingest_transmon_measured(in, path);
}

} // namespace qdev::io
