// comal: corner detection, level-line tracking, KLT baseline, synthetic data,
// evaluation and benchmarking from the command line.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "comal/bench.hpp"
#include "comal/config.hpp"
#include "comal/corners.hpp"
#include "comal/csv.hpp"
#include "comal/eval.hpp"
#include "comal/klt.hpp"
#include "comal/pgm.hpp"
#include "comal/synth.hpp"
#include "comal/tracker.hpp"

#ifndef COMAL_VERSION
#define COMAL_VERSION "dev"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace comal;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Globals {
  std::string config;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string manifest;
};

AppConfig load(const Globals& g) {
  AppConfig cfg = g.config.empty() ? parse_config("") : load_config(g.config);
  if (g.seed) cfg.synth.seed = *g.seed;
  return cfg;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// A directory (its .pgm files in byte-wise name order), a list file (one
// path per line, relative to the list), or the image paths themselves.
std::vector<fs::path> resolve_images(const std::vector<std::string>& inputs) {
  if (inputs.size() == 1) {
    const fs::path p = inputs.front();
    if (fs::is_directory(p)) {
      std::vector<fs::path> out;
      for (const auto& e : fs::directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".pgm") out.push_back(e.path());
      std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) { return a.string() < b.string(); });
      return out;
    }
    if (p.extension() != ".pgm") {
      std::ifstream in(p);
      if (!in) throw Error(Errc::Io, "cannot read frame list " + p.string());
      std::vector<fs::path> out;
      std::string line;
      while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const fs::path f(std::string{t});
        out.push_back(f.is_absolute() ? f : p.parent_path() / f);
      }
      return out;
    }
  }
  return {inputs.begin(), inputs.end()};
}

FrameSource frame_source(const std::vector<fs::path>& paths) {
  auto size = std::make_shared<std::optional<std::pair<long, long>>>();
  return {static_cast<int>(paths.size()), [paths, size](int k) {
            GrayImage img;
            try {
              img = read_pgm(paths[k]);
            } catch (const Error& e) {
              throw Error(Errc::Io, "frame " + std::to_string(k) + " (" + paths[k].string() + "): " + e.what());
            }
            const std::pair<long, long> dims{img.cols(), img.rows()};
            if (!*size) *size = dims;
            if (**size != dims) {
              throw Error(Errc::Io, "frame " + std::to_string(k) + " (" + paths[k].string() +
                                        ") differs in size from the first frame");
            }
            return img;
          }};
}

json config_json(const AppConfig& cfg) {
  json j = json::object();
  std::istringstream in(config_text(cfg));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    j[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return j;
}

json path_list(const std::vector<fs::path>& paths) {
  json j = json::array();
  for (const auto& p : paths) j.push_back(p.string());
  return j;
}

struct Manifest {
  std::string command;
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  json timings = json::object();
};

void write_manifest(const fs::path& path, const Manifest& m, const AppConfig& cfg, const Globals& g) {
  json j;
  j["command"] = m.command;
  j["version"] = COMAL_VERSION;
  j["config"] = config_json(cfg);
  j["inputs"] = path_list(m.inputs);
  j["outputs"] = path_list(m.outputs);
  j["seed"] = g.seed ? json(*g.seed) : json(cfg.synth.seed);
  j["jobs"] = g.jobs;
  j["timings_ms"] = m.timings;
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << '\n';
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
}

// Writes through `fn` to --out, or to stdout when --out is not given.
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  fn(out);
  if (!out) throw Error(Errc::Io, "write failed for " + path);
}

void finish_manifest(Manifest& m, const AppConfig& cfg, const Globals& g) {
  fs::path where;
  if (!g.manifest.empty()) {
    where = g.manifest;
  } else if (!g.out.empty() && g.out != "-") {
    where = g.out + ".manifest.json";
  } else {
    return;
  }
  write_manifest(where, m, cfg, g);
}

json stage_json(const StageTimings& t, double total) {
  return {{"detect", t.detect_ms}, {"mser_precompute", t.mser_ms}, {"chamfer", t.chamfer_ms}, {"ssd", t.ssd_ms},
          {"total", total}};
}

int cmd_detect(const Globals& g, const std::string& image, const std::string& mser_dump) {
  const AppConfig cfg = load(g);
  const auto t0 = Clock::now();
  const GrayImage img = read_pgm(image);
  CornerParams params = cfg.tracker.detect;
  params.scale = cfg.tracker.scale;
  params.patch_size = cfg.tracker.patch_size;
  const auto corners = detect_corners(img, params);
  emit(g.out, [&](std::ostream& o) { write_corners(o, corners); });
  Manifest m{"detect", {image}, {}, {}};
  if (!g.out.empty() && g.out != "-") m.outputs.push_back(g.out);
  if (!mser_dump.empty()) {
    const auto regions = detect_msers(img, params.mser);
    emit(mser_dump, [&](std::ostream& o) {
      o << "region_id,polarity,level,area,stability,x0,y0,width,height\n";
      for (std::size_t i = 0; i < regions.size(); ++i) {
        const auto& r = regions[i];
        o << i << ',' << (r.polarity == Polarity::Dark ? "dark" : "bright") << ',' << r.level << ',' << r.area << ','
          << format_number(r.stability) << ',' << r.bbox.x0 << ',' << r.bbox.y0 << ',' << r.bbox.w << ','
          << r.bbox.h << '\n';
      }
    });
    m.outputs.push_back(mser_dump);
  }
  m.timings = {{"total", ms_since(t0)}};
  finish_manifest(m, cfg, g);
  return 0;
}

int cmd_track(const Globals& g, const std::vector<std::string>& inputs, const std::string& dump) {
  const AppConfig cfg = load(g);
  const auto paths = resolve_images(inputs);
  if (paths.empty()) throw Error(Errc::EmptySequence, "no frames given");
  const auto t0 = Clock::now();
  std::vector<CandidateRecord> records;
  const auto result = run_sequence(frame_source(paths), cfg.tracker, g.jobs, dump.empty() ? nullptr : &records);
  const double total = ms_since(t0);
  emit(g.out, [&](std::ostream& o) { write_track_log(o, result.log); });
  Manifest m{"track", paths, {}, {}};
  if (!g.out.empty() && g.out != "-") m.outputs.push_back(g.out);
  if (!dump.empty()) {
    emit(dump, [&](std::ostream& o) { write_candidates(o, records); });
    m.outputs.push_back(dump);
  }
  StageTimings sum;
  for (const auto& f : result.frames) sum += f.timings;
  m.timings = stage_json(sum, total);
  finish_manifest(m, cfg, g);
  return 0;
}

int cmd_klt(const Globals& g, const std::vector<std::string>& inputs) {
  const AppConfig cfg = load(g);
  const auto paths = resolve_images(inputs);
  if (paths.empty()) throw Error(Errc::EmptySequence, "no frames given");
  const auto t0 = Clock::now();
  const FrameSource src = frame_source(paths);
  // Same starting corners as `track`.
  const TrackSet seeds = start_tracks(src.load(0), 0, cfg.tracker);
  std::vector<Point2> starts;
  for (const auto& t : seeds.tracks) starts.push_back({double(t.position.x), double(t.position.y)});
  const auto detect_ms = ms_since(t0);
  const TrackLog log = klt_sequence(src, starts, cfg.klt, g.jobs);
  const double total = ms_since(t0);
  emit(g.out, [&](std::ostream& o) { write_track_log(o, log); });
  Manifest m{"klt", paths, {}, {{"detect", detect_ms}, {"klt", total - detect_ms}, {"total", total}}};
  if (!g.out.empty() && g.out != "-") m.outputs.push_back(g.out);
  finish_manifest(m, cfg, g);
  return 0;
}

int cmd_synth(const Globals& g) {
  const AppConfig cfg = load(g);
  if (g.out.empty()) throw Error(Errc::BadConfig, "synth needs --out DIR");
  const auto t0 = Clock::now();
  const auto seq = synth_sequence(cfg.synth);
  const fs::path dir = g.out;
  fs::create_directories(dir / "frames");
  fs::create_directories(dir / "masks");
  Manifest m{"synth", {}, {}, {}};
  std::ofstream frames_list(dir / "frames.txt", std::ios::binary), masks_list(dir / "masks.txt", std::ios::binary);
  for (std::size_t k = 0; k < seq.frames.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "%04zu.pgm", k);
    const fs::path f = fs::path("frames") / name, mk = fs::path("masks") / name;
    write_pgm(dir / f, seq.frames[k]);
    write_mask_pgm(dir / mk, seq.masks[k]);
    frames_list << f.generic_string() << '\n';
    masks_list << mk.generic_string() << '\n';
    m.outputs.push_back(dir / f);
    m.outputs.push_back(dir / mk);
  }
  if (!frames_list || !masks_list) throw Error(Errc::Io, "cannot write frame lists in " + dir.string());
  std::ofstream ann(dir / "annotations.csv", std::ios::binary);
  write_annotations(ann, seq.annotations);
  if (!ann) throw Error(Errc::Io, "cannot write " + (dir / "annotations.csv").string());
  for (const char* n : {"frames.txt", "masks.txt", "annotations.csv"}) m.outputs.push_back(dir / n);
  m.timings = {{"total", ms_since(t0)}};
  Globals mg = g;
  if (mg.manifest.empty()) mg.manifest = (dir / "manifest.json").string();
  finish_manifest(m, cfg, mg);
  return 0;
}

int cmd_eval(const Globals& g, const std::vector<std::string>& logs, const std::string& gt_path,
             const std::string& masks_input, const std::vector<double>& thresholds, const std::string& plot) {
  const AppConfig cfg = load(g);
  if (thresholds.size() > 1 && thresholds.size() != logs.size()) {
    throw Error(Errc::BadConfig, "--thresholds needs one value per track log");
  }
  if (logs.size() > 1 && thresholds.size() != logs.size()) {
    throw Error(Errc::BadConfig, "a sweep over several logs needs --thresholds");
  }
  const auto t0 = Clock::now();
  const auto annotations = read_annotations(gt_path);
  std::vector<BinaryMask> masks;
  std::vector<fs::path> inputs(logs.begin(), logs.end());
  inputs.push_back(gt_path);
  if (!masks_input.empty()) {
    for (const auto& p : resolve_images({masks_input})) {
      masks.push_back(read_mask_pgm(p));
      inputs.push_back(p);
    }
  }
  ScoreOptions opt;
  opt.tolerance = cfg.eval.tolerance;
  opt.band = cfg.eval.band;
  opt.masks = masks;

  std::vector<ResultRow> rows;
  if (logs.size() == 1) {
    const TrackLog log = read_track_log(logs.front());
    const auto rep = score_matches(log, ground_truth(log, annotations), opt);
    for (const auto& r : rep.strata) {
      ResultRow row;
      if (!thresholds.empty()) row.threshold = thresholds.front();
      row.result = r;
      rows.push_back(row);
    }
    if (rep.missing_gt > 0) {
      std::cerr << "comal: " << rep.missing_gt << " predictions have no ground truth and count as incorrect\n";
    }
  } else {
    std::vector<SweepSetting> settings;
    for (std::size_t i = 0; i < logs.size(); ++i) settings.push_back({thresholds[i], read_track_log(logs[i])});
    for (const auto& r : sweep_operating_points(settings, annotations, opt)) rows.push_back({r.threshold, r.overall});
  }
  emit(g.out, [&](std::ostream& o) { write_results(o, rows); });
  Manifest m{"eval", inputs, {}, {}};
  if (!g.out.empty() && g.out != "-") m.outputs.push_back(g.out);
  if (!plot.empty()) {
    emit(plot, [&](std::ostream& o) { write_plot_data(o, rows); });
    m.outputs.push_back(plot);
  }
  m.timings = {{"total", ms_since(t0)}};
  finish_manifest(m, cfg, g);
  return 0;
}

int cmd_bench(const Globals& g, const std::vector<std::string>& inputs) {
  const AppConfig cfg = load(g);
  const auto paths = resolve_images(inputs);
  if (paths.size() < 2) throw Error(Errc::EmptySequence, "benchmark needs at least two frames");
  const auto t0 = Clock::now();
  const auto rep = run_bench(frame_source(paths), cfg.tracker, g.jobs);
  json j;
  j["median_track_ms"] = rep.median_track_ms;
  j["median_redetect_ms"] = rep.median_redetect_ms;
  j["ratio"] = rep.ratio;
  j["frames"] = json::array();
  for (const auto& f : rep.frames) {
    j["frames"].push_back({{"frame", f.frame},
                           {"track_ms", f.track_ms},
                           {"redetect_ms", f.redetect_ms},
                           {"tracks", f.tracks},
                           {"detections", f.detections},
                           {"pairs", f.pairs}});
  }
  emit(g.out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  Manifest m{"bench", paths, {}, {{"total", ms_since(t0)}}};
  if (!g.out.empty() && g.out != "-") m.outputs.push_back(g.out);
  finish_manifest(m, cfg, g);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level-line corner tracking: detect, track, klt, synth, eval, bench"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "key=value configuration file");
  app.add_option("--jobs", g.jobs, "worker threads (output does not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "synthetic data seed (overrides synth.seed)");
  app.add_option("--out", g.out, "output file (stdout when omitted); output directory for synth");
  app.add_option("--manifest", g.manifest, "run manifest path (default: <out>.manifest.json)");

  std::string image, mser_dump, dump, gt, masks, plot;
  std::vector<std::string> frames, logs;
  std::vector<double> thresholds;

  auto* detect = app.add_subcommand("detect", "corners of one PGM image as CSV")->fallthrough();
  detect->add_option("image", image, "input PGM")->required();
  detect->add_option("--mser-dump", mser_dump, "also write the detection MSERs as CSV");

  auto* track = app.add_subcommand("track", "track corners through a frame sequence")->fallthrough();
  track->add_option("frames", frames, "frame directory, list file, or PGM files")->required();
  track->add_option("--dump-chamfer", dump, "write every shortlisted candidate with its scores as CSV");

  auto* klt = app.add_subcommand("klt", "KLT baseline from the same starting corners")->fallthrough();
  klt->add_option("frames", frames, "frame directory, list file, or PGM files")->required();

  auto* synth = app.add_subcommand("synth", "write a synthetic sequence to --out DIR")->fallthrough();

  auto* eval = app.add_subcommand("eval", "score track logs against box annotations")->fallthrough();
  eval->add_option("logs", logs, "track log CSV (several for a threshold sweep)")->required();
  eval->add_option("--gt", gt, "annotation CSV frame,object_id,left,top,width,height")->required();
  eval->add_option("--masks", masks, "foreground mask directory or list file, one per frame");
  eval->add_option("--thresholds", thresholds, "detector threshold of each log")->delimiter(',');
  eval->add_option("--plot-data", plot, "write precision / correct-per-frame pairs as CSV");

  auto* bench = app.add_subcommand("bench", "time tracking against redetect-and-match")->fallthrough();
  bench->add_option("frames", frames, "frame directory, list file, or PGM files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*detect) return cmd_detect(g, image, mser_dump);
    if (*track) return cmd_track(g, frames, dump);
    if (*klt) return cmd_klt(g, frames);
    if (*synth) return cmd_synth(g);
    if (*eval) return cmd_eval(g, logs, gt, masks, thresholds, plot);
    if (*bench) return cmd_bench(g, frames);
  } catch (const Error& e) {
    std::cerr << "comal: " << e.what() << '\n';
    return e.code() == Errc::BadConfig ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "comal: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
