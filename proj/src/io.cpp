#include "photon_beat/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <system_error>

#include "photon_beat/errors.hpp"
#include "photon_beat/units.hpp"

namespace photon_beat::io {

namespace {

using nlohmann::json;

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto p = s.find(sep, start);
        out.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
        if (p == std::string_view::npos)
            return out;
        start = p + 1;
    }
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view s, const char* what)
{
    s = trim(s);
    T v{};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
        throw ConfigError(std::string("malformed ") + what + ": '" + std::string(s) + "'");
    return v;
}

// Yields the non-comment data lines after the header line `header`.
std::vector<std::string_view> data_lines(std::string_view text, std::string_view header,
                                         std::vector<std::string_view>* comments = nullptr)
{
    std::vector<std::string_view> rows;
    bool seen_header = false;
    for (auto line : split(text, '\n')) {
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '#') {
            if (comments)
                comments->push_back(line);
            continue;
        }
        if (!seen_header) {
            if (line != header)
                throw ConfigError("expected CSV header '" + std::string(header) + "'");
            seen_header = true;
            continue;
        }
        rows.push_back(line);
    }
    if (!seen_header)
        throw ConfigError("missing CSV header '" + std::string(header) + "'");
    return rows;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json estimate_json(const Estimate& e) { return number_or_null(e.sigma); }

}  // namespace

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_atomic(const std::filesystem::path& path, std::string_view content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw ConfigError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out)
            throw ConfigError("cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw ConfigError("cannot replace " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string events_csv(std::span<const DetectionEvent> events)
{
    std::string s;
    s.reserve(events.size() * 32 + 64);
    s += csv_version_line;
    s += "\ntrigger_index,detector,time_s\n";
    for (const auto& e : events) {
        s += std::to_string(e.trigger_index);
        s += ',';
        s += std::to_string(e.detector);
        s += ',';
        s += format_double(e.time);
        s += '\n';
    }
    return s;
}

std::vector<DetectionEvent> parse_events_csv(std::string_view text)
{
    std::vector<DetectionEvent> events;
    for (auto line : data_lines(text, "trigger_index,detector,time_s")) {
        const auto f = split(line, ',');
        if (f.size() != 3)
            throw ConfigError("event row needs 3 fields: '" + std::string(line) + "'");
        DetectionEvent e;
        e.trigger_index = parse_number<std::uint64_t>(f[0], "trigger index");
        e.detector = parse_number<int>(f[1], "detector");
        e.time = parse_number<double>(f[2], "time");
        if (e.detector != 3 && e.detector != 4)
            throw ConfigError("detector must be 3 or 4");
        if (!std::isfinite(e.time))
            throw ConfigError("event time must be finite");
        events.push_back(e);
    }
    return events;
}

std::string histogram_csv(const CoincidenceHistogram& hist)
{
    std::string s(csv_version_line);
    s += "\n# bin_width_s=" + format_double(hist.bin_width);
    s += "\n# total_detections=" + std::to_string(hist.total_detections);
    s += "\ntau_s,count,background\n";
    for (std::size_t i = 0; i < hist.size(); ++i) {
        s += format_double(hist.bin_centers[i]);
        s += ',';
        s += std::to_string(hist.counts[i]);
        s += ',';
        s += format_double(hist.background_per_bin);
        s += '\n';
    }
    return s;
}

CoincidenceHistogram parse_histogram_csv(std::string_view text)
{
    std::vector<std::string_view> comments;
    const auto rows = data_lines(text, "tau_s,count,background", &comments);
    CoincidenceHistogram h;
    for (auto c : comments) {
        constexpr std::string_view bw = "# bin_width_s=";
        constexpr std::string_view td = "# total_detections=";
        if (c.starts_with(bw))
            h.bin_width = parse_number<double>(c.substr(bw.size()), "bin width");
        else if (c.starts_with(td))
            h.total_detections = parse_number<std::uint64_t>(c.substr(td.size()), "total detections");
    }
    for (auto line : rows) {
        const auto f = split(line, ',');
        if (f.size() != 3)
            throw ConfigError("histogram row needs 3 fields");
        h.bin_centers.push_back(parse_number<double>(f[0], "tau"));
        h.counts.push_back(parse_number<std::uint64_t>(f[1], "count"));
        h.background_per_bin = parse_number<double>(f[2], "background");
    }
    if (h.bin_width == 0.0 && h.size() >= 2)
        h.bin_width = h.bin_centers[1] - h.bin_centers[0];
    h.validate();
    return h;
}

std::string locus_csv(std::span<const LocusPoint> locus)
{
    std::string s(csv_version_line);
    s += "\ndelta_tau_us,delta_omega_rad_per_us,delta_omega_over_2pi_MHz,delta_t_us\n";
    for (const auto& p : locus) {
        s += format_double(units::to_us(p.delta_tau)) + ',';
        s += format_double(p.delta_omega * units::microsecond) + ',';
        s += format_double(units::mhz_from_angular(p.delta_omega)) + ',';
        s += format_double(units::to_us(p.delta_t)) + '\n';
    }
    return s;
}

std::string columns_csv(std::span<const Column> columns)
{
    if (columns.empty())
        throw DomainError("no columns");
    const auto n = columns.front().values.size();
    std::string s(csv_version_line);
    s += '\n';
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].values.size() != n)
            throw DomainError("columns differ in length");
        s += columns[c].name;
        s += c + 1 < columns.size() ? ',' : '\n';
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < columns.size(); ++c) {
            s += format_double(columns[c].values[i]);
            s += c + 1 < columns.size() ? ',' : '\n';
        }
    return s;
}

std::string fit_json(const FitResult& fit)
{
    json j;
    j["n0"] = fit.n0;
    j["t1_s"] = fit.t1;
    j["t2_s"] = fit.t2 ? number_or_null(*fit.t2) : json(nullptr);
    j["delta_rad_per_s"] = fit.delta ? json(*fit.delta) : json(nullptr);
    j["cos2_phi_used"] = fit.cos2_phi_used;
    json u;
    u["n0"] = estimate_json(fit.n0_estimate);
    u["t1_s"] = estimate_json(fit.t1_estimate);
    if (fit.t2_estimate)
        u["t2_s"] = estimate_json(*fit.t2_estimate);
    if (fit.delta_estimate)
        u["delta_rad_per_s"] = estimate_json(*fit.delta_estimate);
    if (fit.widths_covariance)
        u["cov_t1_t2_s2"] = number_or_null(fit.widths_covariance->cov_t1_t2);
    if (fit.widths_covariance)
        u["t2_s_propagated"] = number_or_null(std::sqrt(fit.widths_covariance->var_t2));
    j["uncertainties"] = u;
    j["residual_norm"] = fit.residual_norm;
    j["flags"] = fit.flags;
    return j.dump(2) + "\n";
}

std::string characterization_json(const Characterization& c)
{
    auto point = [](const LocusPoint& p) {
        return json{{"delta_tau_us", units::to_us(p.delta_tau)},
                    {"delta_omega_over_2pi_MHz", units::mhz_from_angular(p.delta_omega)},
                    {"delta_t_us", units::to_us(p.delta_t)}};
    };
    json j;
    j["t1_us"] = units::to_us(c.widths.t1());
    j["t2_us"] = number_or_null(units::to_us(c.widths.t2()));
    j["pure_frequency"] = point(c.pure_frequency);
    j["pure_emission"] = point(c.pure_emission);
    j["min_photon_duration_us"] = units::to_us(c.min_photon_duration);
    j["max_emission_jitter_us"] = units::to_us(c.max_emission_jitter);
    j["max_frequency_jitter_over_2pi_MHz"] = units::mhz_from_angular(c.max_frequency_jitter);
    j["statement"] = c.statement;
    return j.dump(2) + "\n";
}

}  // namespace photon_beat::io
