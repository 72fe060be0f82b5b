#include "rsnet/heating.hpp"

#include "rsnet/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

namespace rsnet {

namespace {

constexpr double kMaxGapHours = 3.0;

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '"')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '"')) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(const std::string& line) {
    // Semicolon-separated files are common for weather exports.
    const char sep = line.find(',') == std::string::npos && line.find(';') != std::string::npos ? ';' : ',';
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(trim(std::string_view(line).substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> to_number(const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    if (b != e && *b == '+') ++b;
    const auto res = std::from_chars(b, e, v);
    if (b == e || res.ec != std::errc() || res.ptr != e) return std::nullopt;
    return v;
}

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    const auto res = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return res.ec == std::errc() && res.ptr == s.data() + pos + len;
}

// YYYY-MM-DD[(T| )HH:MM[:SS[.fff]]][Z|(+|-)HH:MM], returned as hours since 1970-01-01 UTC.
std::optional<double> parse_iso8601(std::string_view s) {
    int y = 0;
    int mo = 0;
    int d = 0;
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, mo) || !read_int(s, 8, 2, d)) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    double hours = static_cast<double>(std::chrono::sys_days{ymd}.time_since_epoch().count()) * 24.0;
    std::size_t pos = 10;
    if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
        int hh = 0;
        int mm = 0;
        if (!read_int(s, pos + 1, 2, hh) || pos + 3 >= s.size() || s[pos + 3] != ':' || !read_int(s, pos + 4, 2, mm)) {
            return std::nullopt;
        }
        if (hh > 24 || mm > 59) return std::nullopt;
        hours += hh + mm / 60.0;
        pos += 6;
        if (pos < s.size() && s[pos] == ':') {
            std::size_t end = pos + 1;
            while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.')) ++end;
            double sec = 0.0;
            const auto res = std::from_chars(s.data() + pos + 1, s.data() + end, sec);
            if (res.ec != std::errc() || res.ptr != s.data() + end || sec >= 61.0) return std::nullopt;
            hours += sec / 3600.0;
            pos = end;
        }
    }
    if (pos < s.size()) {
        if (s[pos] == 'Z' && pos + 1 == s.size()) return hours;
        if ((s[pos] == '+' || s[pos] == '-') && s.size() == pos + 6 && s[pos + 3] == ':') {
            int oh = 0;
            int om = 0;
            if (!read_int(s, pos + 1, 2, oh) || !read_int(s, pos + 4, 2, om)) return std::nullopt;
            const double offset = oh + om / 60.0;
            return s[pos] == '+' ? hours - offset : hours + offset;
        }
        return std::nullopt;
    }
    return hours;
}

std::size_t resolve_column(const std::string& spec, const std::vector<std::string>* header, std::size_t line) {
    if (header != nullptr) {
        const auto it = std::find(header->begin(), header->end(), spec);
        if (it != header->end()) return static_cast<std::size_t>(it - header->begin());
    }
    std::size_t idx = 0;
    const auto res = std::from_chars(spec.data(), spec.data() + spec.size(), idx);
    if (res.ec != std::errc() || res.ptr != spec.data() + spec.size()) {
        throw ParseError("temperature csv: unknown column '" + spec + "'", line);
    }
    return idx;
}

double median_step(const std::vector<double>& t) {
    std::vector<double> d;
    d.reserve(t.size());
    for (std::size_t i = 1; i < t.size(); ++i) d.push_back(t[i] - t[i - 1]);
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>((d.size() - 1) / 2);
    std::nth_element(d.begin(), mid, d.end());
    return *mid;
}

Vector replicate_or(const Vector& v, std::size_t n, double fallback) {
    return v.size() == 0 ? Vector::Constant(static_cast<Eigen::Index>(n), fallback) : v;
}

}  // namespace

void HeatingScenario::validate() const {
    const auto n = static_cast<Eigen::Index>(this->n());
    if (n == 0) throw InvalidArgument("heating scenario: no buildings");
    if (c_kwh_per_degc.size() != n || b_heat_kw.rows() != n || b_heat_kw.cols() != n) {
        throw DimensionMismatch("heating scenario: a, C and B_heat disagree on n");
    }
    if (!(a_kw_per_degc.array() > 0.0).all() || !a_kw_per_degc.allFinite()) {
        throw InvalidArgument("heating scenario: a must be positive");
    }
    if (!(c_kwh_per_degc.array() > 0.0).all() || !c_kwh_per_degc.allFinite()) {
        throw InvalidArgument("heating scenario: C must be positive");
    }
    if (!is_m_matrix(b_heat_kw)) throw NotMMatrix("heating scenario: B_heat is not an M-matrix");
    if (!std::isfinite(x_c_degc)) throw InvalidArgument("heating scenario: x_c must be finite");
    if (t_ext.hours.empty() || t_ext.hours.size() != t_ext.deg_c.size()) {
        throw InvalidArgument("heating scenario: T_ext needs matching, non-empty hours and values");
    }
    for (std::size_t k = 0; k < t_ext.hours.size(); ++k) {
        if (!std::isfinite(t_ext.hours[k]) || !std::isfinite(t_ext.deg_c[k])) {
            throw InvalidArgument("heating scenario: T_ext has non-finite samples");
        }
        if (k > 0 && !(t_ext.hours[k] > t_ext.hours[k - 1])) {
            throw InvalidArgument("heating scenario: T_ext timestamps must be strictly increasing");
        }
    }
    for (const Vector* g : {&p_per_degc, &r_per_degc_h, &s_degc}) {
        if (g->size() != 0 && g->size() != n) throw DimensionMismatch("heating scenario: gain vector length");
    }
}

TemperatureSeries synthetic_cold_snap(double hours, double step_h) {
    if (!(hours > 0.0) || !(step_h > 0.0)) throw InvalidArgument("synthetic_cold_snap: hours and step must be positive");
    constexpr double kDaily = 3.0;
    constexpr double kDip = 17.0;
    constexpr double kCentre = 100.0;
    constexpr double kHalfWidth = 36.0;
    TemperatureSeries out;
    const auto count = static_cast<std::size_t>(std::floor(hours / step_h + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) {
        const double t = static_cast<double>(k) * step_h;
        // Coldest at 06:00, warmest at 18:00.
        double temp = -kDaily * std::cos(2.0 * std::numbers::pi * (t - 6.0) / 24.0);
        const double off = std::abs(t - kCentre);
        if (off < kHalfWidth) temp -= kDip * 0.5 * (1.0 + std::cos(std::numbers::pi * off / kHalfWidth));
        out.hours.push_back(t);
        out.deg_c.push_back(temp);
    }
    return out;
}

Matrix benchmark_coupling_matrix(std::size_t n, double diag, double coupling) {
    const auto m = static_cast<Eigen::Index>(n);
    Matrix b(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            b(i, j) = i == j ? diag : coupling * static_cast<double>(std::min(i, j) + 1);
        }
    }
    return b;
}

HeatingScenario paper_benchmark_scenario() {
    constexpr std::size_t n = 10;
    const auto m = static_cast<Eigen::Index>(n);
    HeatingScenario s;
    s.a_kw_per_degc = Vector::Constant(m, 0.167);
    s.c_kwh_per_degc = Vector::Constant(m, 2.0);
    s.b_heat_kw = benchmark_coupling_matrix(n);
    s.x_c_degc = 20.0;
    s.t_ext = synthetic_cold_snap();
    s.p_per_degc = Vector::Constant(m, 2.5);
    s.r_per_degc_h = Vector::Constant(m, 0.2);
    s.s_degc = Vector::Constant(m, 2.0);
    s.beta = 1.0 / static_cast<double>(n);
    return s;
}

StandardForm to_standard_form(const HeatingScenario& s) {
    s.validate();
    const Vector a = s.a_kw_per_degc.cwiseQuotient(s.c_kwh_per_degc);
    Matrix b = s.c_kwh_per_degc.cwiseInverse().asDiagonal() * s.b_heat_kw;
    PlantModel plant(a, std::move(b), SectorPair::saturation(s.n()));

    std::vector<Vector> values;
    values.reserve(s.t_ext.hours.size());
    for (double temp : s.t_ext.deg_c) values.push_back(a * (temp - s.x_c_degc));
    DisturbanceSignal w = s.t_ext.hours.size() == 1 ? DisturbanceSignal::constant(values.front())
                                                    : DisturbanceSignal::series(s.t_ext.hours, std::move(values));
    return StandardForm{std::move(plant), std::move(w), a};
}

ControllerSpec scenario_controller(const HeatingScenario& s, const PlantModel& plant, ControllerVariant variant) {
    const std::size_t n = s.n();
    const Vector p = replicate_or(s.p_per_degc, n, 2.5);
    const Vector r = replicate_or(s.r_per_degc_h, n, 0.2);
    const Vector sg = replicate_or(s.s_degc, n, 2.0);
    switch (variant) {
        case ControllerVariant::Decentralized:
            return ControllerSpec::decentralized(p, r, sg);
        case ControllerVariant::Coordinating:
            return ControllerSpec::coordinating(p, r, sg, s.beta);
        case ControllerVariant::Static:
            return ControllerSpec::static_default(plant);
    }
    throw UnsupportedVariant("scenario_controller: unknown variant");
}

TemperatureSeries parse_temperature_csv(std::istream& in, const ColumnSpec& columns) {
    std::vector<double> times;
    std::vector<double> temps;
    std::vector<std::size_t> lines;
    std::optional<std::vector<std::string>> header;
    std::optional<std::size_t> tcol;
    std::optional<std::size_t> vcol;
    bool iso = false;
    double iso_origin = 0.0;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        auto fields = split_fields(stripped);

        if (times.empty() && !header && !tcol) {
            // First data-looking line: decide whether it is a header.
            const bool any_numeric = std::any_of(fields.begin(), fields.end(), [](const std::string& f) {
                return to_number(f).has_value() || parse_iso8601(f).has_value();
            });
            if (!any_numeric) {
                header = fields;
                tcol = resolve_column(columns.time, &*header, line_no);
                vcol = resolve_column(columns.value, &*header, line_no);
                continue;
            }
        }
        if (!tcol) {
            tcol = resolve_column(columns.time, nullptr, line_no);
            vcol = resolve_column(columns.value, nullptr, line_no);
        }
        if (*tcol >= fields.size() || *vcol >= fields.size()) {
            throw ParseError("temperature csv: missing column", line_no);
        }

        double t = 0.0;
        if (auto num = to_number(fields[*tcol])) {
            if (times.empty()) iso = false;
            else if (iso) throw ParseError("temperature csv: mixed timestamp formats", line_no);
            t = *num;
        } else if (auto hrs = parse_iso8601(fields[*tcol])) {
            if (times.empty()) {
                iso = true;
                iso_origin = *hrs;
            } else if (!iso) {
                throw ParseError("temperature csv: mixed timestamp formats", line_no);
            }
            t = *hrs - iso_origin;
        } else {
            throw ParseError("temperature csv: bad timestamp '" + fields[*tcol] + "'", line_no);
        }
        const auto value = to_number(fields[*vcol]);
        if (!value) throw ParseError("temperature csv: bad temperature '" + fields[*vcol] + "'", line_no);
        if (!std::isfinite(t) || !std::isfinite(*value)) {
            throw ParseError("temperature csv: non-finite value", line_no);
        }
        if (!times.empty() && !(t > times.back())) {
            throw ParseError("temperature csv: timestamps must be strictly increasing", line_no);
        }
        times.push_back(t);
        temps.push_back(*value);
        lines.push_back(line_no);
    }
    if (times.empty()) throw ParseError("temperature csv: no samples", line_no);

    TemperatureSeries out;
    if (times.size() == 1) {
        out.hours = std::move(times);
        out.deg_c = std::move(temps);
        return out;
    }
    const double step = median_step(times);
    out.hours.push_back(times.front());
    out.deg_c.push_back(temps.front());
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double gap = times[k] - times[k - 1];
        if (gap > kMaxGapHours * (1.0 + 1e-12)) {
            throw GapTooLarge("temperature csv: gap of " + std::to_string(gap) + " h before this row", lines[k], gap);
        }
        if (gap > step * (1.0 + 1e-9)) {
            const auto inserts = static_cast<std::size_t>(std::ceil(gap / step - 1e-9)) - 1;
            for (std::size_t j = 1; j <= inserts; ++j) {
                const double tj = times[k - 1] + static_cast<double>(j) * step;
                if (tj >= times[k] - 1e-9 * step) break;
                const double frac = (tj - times[k - 1]) / gap;
                out.hours.push_back(tj);
                out.deg_c.push_back(temps[k - 1] + frac * (temps[k] - temps[k - 1]));
                out.filled_hours.push_back(tj);
            }
        }
        out.hours.push_back(times[k]);
        out.deg_c.push_back(temps[k]);
    }
    return out;
}

TemperatureSeries load_temperature_csv(const std::string& path, const ColumnSpec& columns) {
    std::ifstream in(path);
    if (!in) throw ParseError("temperature csv: cannot open '" + path + "'", 0);
    return parse_temperature_csv(in, columns);
}

}  // namespace rsnet
