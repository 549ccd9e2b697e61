#include "comal/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "comal/csv.hpp"

namespace comal {
namespace {

struct Entry {
  std::string key;
  std::function<void(AppConfig&, std::string_view)> set;
  std::function<std::string(const AppConfig&)> get;
};

template <typename T>
T parse_value(std::string_view s) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("bad value");
  return v;
}

template <typename T>
std::string show(T v) {
  if constexpr (std::is_floating_point_v<T>) {
    return format_number(v);
  } else {
    return std::to_string(v);
  }
}

template <typename Access>
Entry field(std::string key, Access access) {
  using T = std::remove_reference_t<decltype(access(std::declval<AppConfig&>()))>;
  return {std::move(key), [access](AppConfig& c, std::string_view s) { access(c) = parse_value<T>(s); },
          [access](const AppConfig& c) { return show(access(const_cast<AppConfig&>(c))); }};
}

void mser_fields(std::vector<Entry>& out, const std::string& prefix, MserParams& (*m)(AppConfig&)) {
  out.push_back(field(prefix + "mser_delta", [m](AppConfig& c) -> int& { return m(c).delta; }));
  out.push_back(field(prefix + "mser_max_variation", [m](AppConfig& c) -> double& { return m(c).max_variation; }));
  out.push_back(field(prefix + "mser_min_area", [m](AppConfig& c) -> int& { return m(c).min_area; }));
  out.push_back(field(prefix + "mser_max_area", [m](AppConfig& c) -> int& { return m(c).max_area; }));
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> e;
    auto T = [&](const char* k, auto a) { e.push_back(field(std::string("tracker.") + k, a)); };
    T("search_radius", [](AppConfig& c) -> int& { return c.tracker.search_radius; });
    T("patch_size", [](AppConfig& c) -> int& { return c.tracker.patch_size; });
    T("scale", [](AppConfig& c) -> double& { return c.tracker.scale; });
    T("template_arc_factor", [](AppConfig& c) -> double& { return c.tracker.template_arc_factor; });
    T("chamfer_threshold", [](AppConfig& c) -> double& { return c.tracker.chamfer_threshold; });
    T("ssd_threshold", [](AppConfig& c) -> double& { return c.tracker.ssd_threshold; });
    T("min_overlap", [](AppConfig& c) -> int& { return c.tracker.min_overlap; });
    T("top_k", [](AppConfig& c) -> int& { return c.tracker.top_k; });
    T("max_misses", [](AppConfig& c) -> int& { return c.tracker.max_misses; });
    T("redetect_interval", [](AppConfig& c) -> int& { return c.tracker.redetect_interval; });
    T("min_spawn_dist", [](AppConfig& c) -> int& { return c.tracker.min_spawn_dist; });
    T("max_tracks", [](AppConfig& c) -> int& { return c.tracker.max_tracks; });
    T("tile_size", [](AppConfig& c) -> int& { return c.tracker.tile_size; });
    T("tile_stride", [](AppConfig& c) -> int& { return c.tracker.tile_stride; });
    mser_fields(e, "tracker.", [](AppConfig& c) -> MserParams& { return c.tracker.track_mser; });

    auto C = [&](const char* k, auto a) { e.push_back(field(std::string("comal.") + k, a)); };
    C("cornerness_threshold", [](AppConfig& c) -> double& { return c.tracker.detect.cornerness_threshold; });
    C("min_contour_points", [](AppConfig& c) -> int& { return c.tracker.detect.min_contour_points; });
    C("min_side_pixels", [](AppConfig& c) -> int& { return c.tracker.detect.min_side_pixels; });
    mser_fields(e, "comal.", [](AppConfig& c) -> MserParams& { return c.tracker.detect.mser; });

    auto K = [&](const char* k, auto a) { e.push_back(field(std::string("klt.") + k, a)); };
    K("window", [](AppConfig& c) -> int& { return c.klt.window; });
    K("max_iters", [](AppConfig& c) -> int& { return c.klt.max_iters; });
    K("eps", [](AppConfig& c) -> double& { return c.klt.eps; });
    K("min_eigen", [](AppConfig& c) -> double& { return c.klt.min_eigen; });
    K("pyramid_levels", [](AppConfig& c) -> int& { return c.klt.pyramid_levels; });

    e.push_back(field("eval.tolerance", [](AppConfig& c) -> double& { return c.eval.tolerance; }));
    e.push_back(field("eval.band", [](AppConfig& c) -> double& { return c.eval.band; }));

    auto S = [&](const char* k, auto a) { e.push_back(field(std::string("synth.") + k, a)); };
    S("width", [](AppConfig& c) -> int& { return c.synth.width; });
    S("height", [](AppConfig& c) -> int& { return c.synth.height; });
    S("frames", [](AppConfig& c) -> int& { return c.synth.frames; });
    S("seed", [](AppConfig& c) -> std::uint64_t& { return c.synth.seed; });
    e.push_back({"synth.background",
                 [](AppConfig& c, std::string_view s) {
                   if (s == "static") {
                     c.synth.background = BackgroundMode::Static;
                   } else if (s == "rerandomized") {
                     c.synth.background = BackgroundMode::Rerandomized;
                   } else {
                     throw std::invalid_argument("expected static or rerandomized");
                   }
                 },
                 [](const AppConfig& c) {
                   return std::string(c.synth.background == BackgroundMode::Static ? "static" : "rerandomized");
                 }});
    S("object_size", [](AppConfig& c) -> int& { return c.synth.object_size; });
    S("start_x", [](AppConfig& c) -> int& { return c.synth.start.x; });
    S("start_y", [](AppConfig& c) -> int& { return c.synth.start.y; });
    S("velocity_x", [](AppConfig& c) -> int& { return c.synth.velocity.x; });
    S("velocity_y", [](AppConfig& c) -> int& { return c.synth.velocity.y; });
    e.push_back({"synth.script", [](AppConfig& c, std::string_view s) { c.synth.script = parse_script(s); },
                 [](const AppConfig& c) { return format_script(c.synth.script); }});
    S("object_blobs", [](AppConfig& c) -> int& { return c.synth.object_blobs; });
    S("background_blobs", [](AppConfig& c) -> int& { return c.synth.background_blobs; });
    return e;
  }();
  return table;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& e : entries()) out.push_back(e.key);
  return out;
}

std::vector<PixelCoord> parse_script(std::string_view s) {
  std::vector<PixelCoord> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t semi = std::min(s.find(';', start), s.size());
    const auto step = split_fields(trim(s.substr(start, semi - start)));
    if (step.size() != 2) throw std::invalid_argument("expected steps like 2,0;3,1");
    out.push_back({parse_value<int>(trim(step[0])), parse_value<int>(trim(step[1]))});
    start = semi + 1;
  }
  return out;
}

std::string format_script(const std::vector<PixelCoord>& script) {
  std::string out;
  for (std::size_t i = 0; i < script.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(script[i].x) + ',' + std::to_string(script[i].y);
  }
  return out;
}

void validate(const AppConfig& cfg) {
  validate(cfg.tracker);
  try {
    validate(cfg.klt);
  } catch (const Error& e) {
    throw Error(Errc::BadConfig, e.what());
  }
  if (!(cfg.eval.tolerance >= 0)) throw Error(Errc::BadConfig, "eval.tolerance must be >= 0");
  if (!(cfg.eval.band >= 0)) throw Error(Errc::BadConfig, "eval.band must be >= 0");
}

AppConfig parse_config(std::string_view text, AppConfig base) {
  int n = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t nl = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    ++n;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::BadConfig, "line " + std::to_string(n) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto& table = entries();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Entry& e) { return e.key == key; });
    if (it == table.end()) throw Error(Errc::BadConfig, "line " + std::to_string(n) + ": unknown key '" + key + "'");
    try {
      it->set(base, value);
    } catch (const std::exception&) {
      throw Error(Errc::BadConfig,
                  "line " + std::to_string(n) + ": bad value '" + std::string(value) + "' for key '" + key + "'");
    }
  }
  validate(base);
  return base;
}

AppConfig load_config(const std::filesystem::path& path, AppConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::BadConfig, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), std::move(base));
  } catch (const Error& e) {
    throw Error(Errc::BadConfig, path.string() + ": " + e.what());
  }
}

std::string config_text(const AppConfig& cfg) {
  std::string out;
  for (const auto& e : entries()) out += e.key + "=" + e.get(cfg) + "\n";
  return out;
}

}  // namespace comal
