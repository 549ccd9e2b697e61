#include "comal/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace comal {
namespace {

std::string line_error(int line, const std::string& what) { return "line " + std::to_string(line) + ": " + what; }

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

void expect_header(std::istream& in, std::string_view header) {
  std::string line;
  if (!next_line(in, line) || line != header) {
    throw Error(Errc::Io, "expected header '" + std::string(header) + "'");
  }
}

int parse_int(std::string_view s) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Error(Errc::Io, "bad integer '" + std::string(s) + "'");
  return v;
}

double parse_optional(std::string_view s) { return s.empty() ? kNoScore : parse_number(s); }

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return in;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double parse_number(std::string_view s) {
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
    throw Error(Errc::Io, "bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

const char* status_name(TrackStatus s) { return s == TrackStatus::Active ? "active" : "lost"; }

void write_track_log(std::ostream& out, const TrackLog& log) {
  out << kTrackLogHeader << '\n';
  for (const auto& r : log) {
    out << r.track_id << ',' << r.frame << ',' << format_number(r.x) << ',' << format_number(r.y) << ','
        << status_name(r.status) << ',' << format_number(r.chamfer_score) << ',' << format_number(r.ssd_score) << ','
        << (r.combination ? combination_name(*r.combination) : "") << '\n';
  }
}

TrackLog read_track_log(std::istream& in) {
  expect_header(in, kTrackLogHeader);
  TrackLog log;
  std::string line;
  for (int n = 2; next_line(in, line); ++n) {
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 8) throw Error(Errc::Io, line_error(n, "expected 8 fields"));
    try {
      TrackRow r;
      r.track_id = parse_int(f[0]);
      r.frame = parse_int(f[1]);
      r.x = parse_number(f[2]);
      r.y = parse_number(f[3]);
      if (f[4] == "active") {
        r.status = TrackStatus::Active;
      } else if (f[4] == "lost") {
        r.status = TrackStatus::Lost;
      } else {
        throw Error(Errc::Io, "bad status '" + std::string(f[4]) + "'");
      }
      r.chamfer_score = parse_optional(f[5]);
      r.ssd_score = parse_optional(f[6]);
      if (!f[7].empty()) {
        bool known = false;
        for (Combination c : {Combination::AA, Combination::AB, Combination::BA, Combination::BB, Combination::Full})
          if (combination_name(c) == f[7]) {
            r.combination = c;
            known = true;
          }
        if (!known) throw Error(Errc::Io, "bad combination '" + std::string(f[7]) + "'");
      }
      log.push_back(r);
    } catch (const Error& e) {
      throw Error(Errc::Io, line_error(n, e.what()));
    }
  }
  return log;
}

TrackLog read_track_log(const std::filesystem::path& path) {
  auto in = open(path);
  try {
    return read_track_log(in);
  } catch (const Error& e) {
    throw Error(Errc::Io, path.string() + ": " + e.what());
  }
}

void write_corners(std::ostream& out, std::span<const CornerPoint> corners) {
  out << kCornerHeader << '\n';
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const auto& c = corners[i];
    out << i << ',' << c.position.x << ',' << c.position.y << ',' << c.segment->level << ','
        << format_number(c.segment->stability) << ',' << format_number(c.cornerness) << '\n';
  }
}

void write_candidates(std::ostream& out, std::span<const CandidateRecord> records) {
  out << kCandidateHeader << '\n';
  for (const auto& r : records) {
    out << r.frame << ',' << r.track_id << ',' << r.rank << ',' << r.candidate.contour << ','
        << r.candidate.position.x << ',' << r.candidate.position.y << ',' << format_number(r.candidate.chamfer_score)
        << ',' << format_number(r.ssd_score) << ',' << (r.combination ? combination_name(*r.combination) : "") << ','
        << (r.selected ? 1 : 0) << '\n';
  }
}

void write_annotations(std::ostream& out, std::span<const BBoxAnnotation> annotations) {
  out << kAnnotationHeader << '\n';
  for (const auto& a : annotations) {
    out << a.frame << ',' << a.object_id << ',' << format_number(a.box.left) << ',' << format_number(a.box.top) << ','
        << format_number(a.box.width) << ',' << format_number(a.box.height) << '\n';
  }
}

std::vector<BBoxAnnotation> read_annotations(std::istream& in) {
  expect_header(in, kAnnotationHeader);
  std::vector<BBoxAnnotation> out;
  std::string line;
  for (int n = 2; next_line(in, line); ++n) {
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 6) throw Error(Errc::Io, line_error(n, "expected 6 fields"));
    try {
      BBoxAnnotation a;
      a.frame = parse_int(f[0]);
      a.object_id = parse_int(f[1]);
      a.box = {parse_number(f[2]), parse_number(f[3]), parse_number(f[4]), parse_number(f[5])};
      if (!(a.box.width > 0 && a.box.height > 0)) throw Error(Errc::Io, "box needs positive width and height");
      out.push_back(a);
    } catch (const Error& e) {
      throw Error(Errc::Io, line_error(n, e.what()));
    }
  }
  return out;
}

std::vector<BBoxAnnotation> read_annotations(const std::filesystem::path& path) {
  auto in = open(path);
  try {
    return read_annotations(in);
  } catch (const Error& e) {
    throw Error(Errc::Io, path.string() + ": " + e.what());
  }
}

void write_results(std::ostream& out, std::span<const ResultRow> rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << stratum_name(r.result.stratum) << ',' << (r.threshold ? format_number(*r.threshold) : "") << ','
        << format_number(r.result.correct_per_frame) << ','
        << (r.result.precision ? format_number(*r.result.precision) : "") << '\n';
  }
}

void write_plot_data(std::ostream& out, std::span<const ResultRow> rows) {
  out << kPlotHeader << '\n';
  for (const auto& r : rows) {
    if (!r.result.precision) continue;
    out << format_number(*r.result.precision) << ',' << format_number(r.result.correct_per_frame) << ','
        << stratum_name(r.result.stratum) << ',' << (r.threshold ? format_number(*r.threshold) : "") << '\n';
  }
}

}  // namespace comal
