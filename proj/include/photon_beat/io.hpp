#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "photon_beat/characterize.hpp"
#include "photon_beat/events.hpp"
#include "photon_beat/fitting.hpp"
#include "photon_beat/histogram.hpp"

namespace photon_beat::io {

/// First line of every CSV this library writes.
inline constexpr std::string_view csv_version_line = "# photon-beat v1";

/// Shortest decimal that round-trips to the same double; locale independent.
std::string format_double(double v);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

std::string events_csv(std::span<const DetectionEvent> events);
std::vector<DetectionEvent> parse_events_csv(std::string_view text);

/// Columns tau_s,count,background; run metadata in `# key=value` lines.
std::string histogram_csv(const CoincidenceHistogram& hist);
CoincidenceHistogram parse_histogram_csv(std::string_view text);

std::string locus_csv(std::span<const LocusPoint> locus);

/// Named columns of equal length.
struct Column {
    std::string name;
    std::vector<double> values;
};
std::string columns_csv(std::span<const Column> columns);

std::string fit_json(const FitResult& fit);
std::string characterization_json(const Characterization& c);

}  // namespace photon_beat::io
