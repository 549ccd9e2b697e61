#pragma once

// CSV files exchanged between the commands. Every file has a header row and
// numbers are written in the shortest form that round-trips, with '.' as the
// decimal separator whatever the locale.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "comal/corners.hpp"
#include "comal/eval.hpp"
#include "comal/tracker.hpp"

namespace comal {

/// Shortest round-trip form; NaN becomes the empty string.
std::string format_number(double v);

/// Throws Errc::Io for anything that is not a complete number.
double parse_number(std::string_view s);

std::vector<std::string_view> split_fields(std::string_view line);

inline constexpr std::string_view kTrackLogHeader = "track_id,frame,x,y,status,chamfer_score,ssd_score,combination";
inline constexpr std::string_view kCornerHeader = "corner_id,x,y,level,stability,cornerness";
inline constexpr std::string_view kAnnotationHeader = "frame,object_id,left,top,width,height";
inline constexpr std::string_view kResultsHeader = "stratum,threshold,correct_per_frame,precision";
inline constexpr std::string_view kPlotHeader = "precision,correct_per_frame,stratum,threshold";
inline constexpr std::string_view kCandidateHeader =
    "frame,track_id,rank,contour,x,y,chamfer_score,ssd_score,combination,selected";

const char* status_name(TrackStatus s);

void write_track_log(std::ostream& out, const TrackLog& log);
/// Throws Errc::Io naming the offending line.
TrackLog read_track_log(std::istream& in);
TrackLog read_track_log(const std::filesystem::path& path);

void write_corners(std::ostream& out, std::span<const CornerPoint> corners);

void write_candidates(std::ostream& out, std::span<const CandidateRecord> records);

void write_annotations(std::ostream& out, std::span<const BBoxAnnotation> annotations);
std::vector<BBoxAnnotation> read_annotations(std::istream& in);
std::vector<BBoxAnnotation> read_annotations(const std::filesystem::path& path);

struct ResultRow {
  std::optional<double> threshold;
  PRResult result;
};

void write_results(std::ostream& out, std::span<const ResultRow> rows);
/// Same rows as (x = precision, y = correct matches per frame) for plotting;
/// rows without a precision are skipped.
void write_plot_data(std::ostream& out, std::span<const ResultRow> rows);

}  // namespace comal
