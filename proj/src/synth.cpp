#include "edar/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fs = std::filesystem;

namespace edar {

void EyeSceneParams::validate() const {
  if (width <= 0 || height <= 0) throw std::invalid_argument("synth: dims must be positive");
  if (!(eyelid_aperture >= 0 && eyelid_aperture <= 1))
    throw std::invalid_argument("synth: aperture must be in [0,1]");
  const double iris_px = iris_radius * width;
  const double pupil_px = pupil_radius_fraction * iris_px;
  const double min_axis_px = std::min(sclera_ax * width, sclera_ay * height);
  if (!(pupil_px > 0 && pupil_px < iris_px && iris_px < min_axis_px))
    throw std::invalid_argument("synth: need pupil radius < iris radius < min sclera axis");
  if (blink_duration < 1) throw std::invalid_argument("synth: blink_duration must be >= 1");
}

std::string eye_scene_params_to_json(const EyeSceneParams& p) {
  nlohmann::json j;
  j["width"] = p.width;
  j["height"] = p.height;
  j["sclera_cx"] = p.sclera_cx;
  j["sclera_cy"] = p.sclera_cy;
  j["sclera_ax"] = p.sclera_ax;
  j["sclera_ay"] = p.sclera_ay;
  j["sclera_angle"] = p.sclera_angle;
  j["iris_radius"] = p.iris_radius;
  j["pupil_radius_fraction"] = p.pupil_radius_fraction;
  j["eyelid_aperture"] = p.eyelid_aperture;
  j["drift_amplitude"] = p.drift_amplitude;
  j["saccade_rate"] = p.saccade_rate;
  j["saccade_magnitude"] = p.saccade_magnitude;
  j["blink_rate"] = p.blink_rate;
  j["blink_duration"] = p.blink_duration;
  j["noise_sigma"] = p.noise_sigma;
  j["rng_seed"] = p.rng_seed;
  return j.dump(2);
}

EyeSceneParams eye_scene_params_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  EyeSceneParams p;
  p.width = j.value("width", p.width);
  p.height = j.value("height", p.height);
  p.sclera_cx = j.value("sclera_cx", p.sclera_cx);
  p.sclera_cy = j.value("sclera_cy", p.sclera_cy);
  p.sclera_ax = j.value("sclera_ax", p.sclera_ax);
  p.sclera_ay = j.value("sclera_ay", p.sclera_ay);
  p.sclera_angle = j.value("sclera_angle", p.sclera_angle);
  p.iris_radius = j.value("iris_radius", p.iris_radius);
  p.pupil_radius_fraction = j.value("pupil_radius_fraction", p.pupil_radius_fraction);
  p.eyelid_aperture = j.value("eyelid_aperture", p.eyelid_aperture);
  p.drift_amplitude = j.value("drift_amplitude", p.drift_amplitude);
  p.saccade_rate = j.value("saccade_rate", p.saccade_rate);
  p.saccade_magnitude = j.value("saccade_magnitude", p.saccade_magnitude);
  p.blink_rate = j.value("blink_rate", p.blink_rate);
  p.blink_duration = j.value("blink_duration", p.blink_duration);
  p.noise_sigma = j.value("noise_sigma", p.noise_sigma);
  p.rng_seed = j.value("rng_seed", p.rng_seed);
  p.validate();
  return p;
}

namespace {

struct FramePose {
  double cx, cy;      // eye center, pixels
  double aperture;    // 0..1
};

// Smooth drift plus Bernoulli-per-frame saccade jumps and triangular blink
// profiles, all drawn from one seeded stream.
std::vector<FramePose> make_trajectory(const EyeSceneParams& p, int n_frames) {
  std::mt19937_64 rng(p.rng_seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double phase_x = uni(rng) * 2 * M_PI;
  const double phase_y = uni(rng) * 2 * M_PI;

  std::vector<FramePose> poses;
  poses.reserve(static_cast<size_t>(n_frames));
  double jump_x = 0, jump_y = 0;
  int blink_left = 0;
  for (int t = 0; t < n_frames; ++t) {
    if (blink_left == 0 && p.blink_rate > 0 && uni(rng) < p.blink_rate) blink_left = p.blink_duration;
    double aperture = p.eyelid_aperture;
    if (blink_left > 0) {
      const int k = p.blink_duration - blink_left;  // 0-based frame within the blink
      const int half = (p.blink_duration + 1) / 2;
      const double ap =
          k < half ? 1.0 - static_cast<double>(k + 1) / half
                   : static_cast<double>(k - half + 1) / std::max(1, p.blink_duration - half);
      aperture = std::min(aperture, ap);
      --blink_left;
    }
    if (p.saccade_rate > 0 && uni(rng) < p.saccade_rate) {
      const double dir = uni(rng) * 2 * M_PI;
      jump_x += p.saccade_magnitude * p.width * std::cos(dir);
      jump_y += p.saccade_magnitude * p.width * std::sin(dir);
    }
    FramePose pose;
    pose.cx = p.sclera_cx * p.width + p.drift_amplitude * p.width * std::sin(2 * M_PI * t / 37.0 + phase_x) + jump_x;
    pose.cy = p.sclera_cy * p.height + p.drift_amplitude * p.width * std::sin(2 * M_PI * t / 53.0 + phase_y) + jump_y;
    pose.aperture = aperture;
    poses.push_back(pose);
  }
  return poses;
}

// Low-frequency gradient with a handful of soft blotches, in [0,255].
std::vector<double> make_background(const EyeSceneParams& p) {
  std::mt19937_64 rng(p.rng_seed ^ 0xb10b5ULL);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  struct Blob {
    double cx, cy, r, amp;
  };
  std::vector<Blob> blobs;
  for (int i = 0; i < 6; ++i)
    blobs.push_back({uni(rng) * p.width, uni(rng) * p.height, (0.1 + 0.2 * uni(rng)) * p.width,
                     (uni(rng) - 0.5) * 50.0});
  const double gphase = uni(rng) * 2 * M_PI;

  std::vector<double> bg(static_cast<size_t>(p.width) * p.height);
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x) {
      double v = 130.0 + 25.0 * std::sin(2 * M_PI * (x + 0.7 * y) / (1.7 * p.width) + gphase);
      for (const Blob& b : blobs) {
        const double d2 = (x - b.cx) * (x - b.cx) + (y - b.cy) * (y - b.cy);
        v += b.amp * std::exp(-d2 / (2 * b.r * b.r));
      }
      bg[static_cast<size_t>(y) * p.width + x] = v;
    }
  return bg;
}

}  // namespace

std::vector<SequenceFrame> render_sequence(const EyeSceneParams& p, int n_frames) {
  p.validate();
  if (n_frames <= 0) throw std::invalid_argument("render_sequence: n_frames must be positive");
  const auto poses = make_trajectory(p, n_frames);
  const auto background = make_background(p);

  const double iris_r = p.iris_radius * p.width;
  const double pupil_r = p.pupil_radius_fraction * iris_r;
  const double ax = p.sclera_ax * p.width;
  const double ay = p.sclera_ay * p.height;
  const double cosa = std::cos(p.sclera_angle), sina = std::sin(p.sclera_angle);

  std::vector<SequenceFrame> out;
  out.reserve(static_cast<size_t>(n_frames));
  for (int t = 0; t < n_frames; ++t) {
    const FramePose& pose = poses[static_cast<size_t>(t)];
    SequenceFrame sf;
    sf.frame = Frame(p.width, p.height, 0, t);
    sf.labels = SegmentationMap(p.width, p.height, 0);

    // per-frame noise stream so frames are renderable independently
    std::mt19937_64 noise_rng(p.rng_seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<uint64_t>(t) + 1)));
    std::normal_distribution<double> noise(0.0, p.noise_sigma);

    bool pupil_visible = false;
    for (int y = 0; y < p.height; ++y) {
      for (int x = 0; x < p.width; ++x) {
        const double px = x + 0.5, py = y + 0.5;
        const double dx = px - pose.cx, dy = py - pose.cy;
        uint8_t cls = 0;
        double intensity = background[static_cast<size_t>(y) * p.width + x];
        const bool open = std::abs(dy) <= pose.aperture * ay;
        if (open) {
          const double r2 = dx * dx + dy * dy;
          const double ex = (dx * cosa + dy * sina) / ax;
          const double ey = (-dx * sina + dy * cosa) / ay;
          if (r2 <= pupil_r * pupil_r) {
            cls = 3;
            intensity = 25.0;
          } else if (r2 <= iris_r * iris_r) {
            cls = 2;
            intensity = 90.0 + 15.0 * (r2 / (iris_r * iris_r));
          } else if (ex * ex + ey * ey <= 1.0) {
            cls = 1;
            intensity = 205.0 - 20.0 * (ex * ex + ey * ey);
          }
        }
        sf.labels.at(x, y) = cls;
        if (cls == 3) pupil_visible = true;
        if (p.noise_sigma > 0) intensity += noise(noise_rng);
        sf.frame.at(x, y) = static_cast<uint8_t>(std::clamp(intensity, 0.0, 255.0));
      }
    }
    sf.roi = foreground_bbox(sf.labels);
    if (pupil_visible) sf.pupil = std::make_pair(pose.cx, pose.cy);
    out.push_back(std::move(sf));
  }
  return out;
}

// --- ground-truth refinement ----------------------------------------------------

namespace {

// DBSCAN over foreground pixel coordinates. Returns per-pixel cluster ids
// (-1 noise/background) and the id of the largest cluster, or -1 when no
// cluster formed.
std::pair<std::vector<int>, int> dbscan_foreground(const SegmentationMap& seg, double eps, int min_pts) {
  const int w = seg.width, h = seg.height;
  const int r = static_cast<int>(std::floor(eps));
  std::vector<std::pair<int, int>> offsets;  // neighbor stencil, excluding self
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if ((dx || dy) && dx * dx + dy * dy <= eps * eps) offsets.emplace_back(dx, dy);

  auto is_fg = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && seg.at(x, y) != 0; };
  auto neighbor_count = [&](int x, int y) {
    int c = 1;  // the point itself counts
    for (auto [dx, dy] : offsets) c += is_fg(x + dx, y + dy) ? 1 : 0;
    return c;
  };

  std::vector<int> cluster(static_cast<size_t>(w) * h, -1);
  std::vector<uint8_t> visited(static_cast<size_t>(w) * h, 0);
  std::vector<long long> sizes;
  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      const size_t si = static_cast<size_t>(sy) * w + sx;
      if (!is_fg(sx, sy) || visited[si]) continue;
      visited[si] = 1;
      if (neighbor_count(sx, sy) < min_pts) continue;  // noise unless claimed later
      const int id = static_cast<int>(sizes.size());
      sizes.push_back(0);
      std::deque<std::pair<int, int>> queue{{sx, sy}};
      cluster[si] = id;
      ++sizes[static_cast<size_t>(id)];
      while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        if (neighbor_count(x, y) < min_pts) continue;  // border point: keep but do not expand
        for (auto [dx, dy] : offsets) {
          const int nx = x + dx, ny = y + dy;
          if (!is_fg(nx, ny)) continue;
          const size_t ni = static_cast<size_t>(ny) * w + nx;
          if (cluster[ni] != -1) continue;
          cluster[ni] = id;
          ++sizes[static_cast<size_t>(id)];
          visited[ni] = 1;
          queue.emplace_back(nx, ny);
        }
      }
    }
  }
  int largest = -1;
  long long best = 0;
  for (size_t i = 0; i < sizes.size(); ++i)
    if (sizes[i] > best) {
      best = sizes[i];
      largest = static_cast<int>(i);
    }
  return {std::move(cluster), largest};
}

}  // namespace

SegmentationMap refine_groundtruth(const SegmentationMap& seg, double eps, int min_pts) {
  const int w = seg.width, h = seg.height;
  auto [cluster, largest] = dbscan_foreground(seg, eps, min_pts);

  SegmentationMap out(w, h, 0);
  if (largest >= 0) {
    for (size_t i = 0; i < out.classes.size(); ++i)
      if (cluster[i] == largest) out.classes[i] = seg.classes[i];
  }

  // Fill background components not touching the border with the majority
  // class of their foreground boundary.
  std::vector<int> comp(static_cast<size_t>(w) * h, -1);
  int next_comp = 0;
  std::vector<uint8_t> touches_border;
  std::vector<std::vector<size_t>> members;
  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      const size_t si = static_cast<size_t>(sy) * w + sx;
      if (out.classes[si] != 0 || comp[si] != -1) continue;
      const int id = next_comp++;
      touches_border.push_back(0);
      members.emplace_back();
      std::deque<size_t> queue{si};
      comp[si] = id;
      while (!queue.empty()) {
        const size_t i = queue.front();
        queue.pop_front();
        members[static_cast<size_t>(id)].push_back(i);
        const int x = static_cast<int>(i % static_cast<size_t>(w));
        const int y = static_cast<int>(i / static_cast<size_t>(w));
        if (x == 0 || y == 0 || x == w - 1 || y == h - 1) touches_border[static_cast<size_t>(id)] = 1;
        static const int d4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (auto& d : d4) {
          const int nx = x + d[0], ny = y + d[1];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const size_t ni = static_cast<size_t>(ny) * w + nx;
          if (out.classes[ni] == 0 && comp[ni] == -1) {
            comp[ni] = id;
            queue.push_back(ni);
          }
        }
      }
    }
  }
  for (int id = 0; id < next_comp; ++id) {
    if (touches_border[static_cast<size_t>(id)]) continue;
    int votes[SegmentationMap::kNumClasses] = {0, 0, 0, 0};
    for (size_t i : members[static_cast<size_t>(id)]) {
      const int x = static_cast<int>(i % static_cast<size_t>(w));
      const int y = static_cast<int>(i / static_cast<size_t>(w));
      static const int d4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (auto& d : d4) {
        const int nx = x + d[0], ny = y + d[1];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const uint8_t c = out.at(nx, ny);
        if (c != 0) ++votes[c];
      }
    }
    int fill = 0, best = 0;
    for (int c = 1; c < SegmentationMap::kNumClasses; ++c)
      if (votes[c] > best) {
        best = votes[c];
        fill = c;
      }
    if (fill != 0)
      for (size_t i : members[static_cast<size_t>(id)]) out.classes[i] = static_cast<uint8_t>(fill);
  }
  return out;
}

// --- directory io ----------------------------------------------------------------

namespace {

std::string frame_name(size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05zu.pgm", i);
  return buf;
}

void write_double(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void write_sequence_dir(const std::vector<SequenceFrame>& seq, const EyeSceneParams& params,
                        const std::string& dir) {
  fs::create_directories(fs::path(dir) / "frames");
  fs::create_directories(fs::path(dir) / "labels");
  std::ofstream gt(fs::path(dir) / "gt.csv");
  if (!gt) throw std::runtime_error("write_sequence_dir: cannot open gt.csv");
  gt << "frame,x_min,y_min,x_max,y_max,pupil_x,pupil_y\n";
  for (size_t i = 0; i < seq.size(); ++i) {
    write_pgm(seq[i].frame, (fs::path(dir) / "frames" / frame_name(i)).string());
    write_seg_pgm(seq[i].labels, (fs::path(dir) / "labels" / frame_name(i)).string());
    gt << i;
    const Roi roi = seq[i].roi.value_or(Roi{-1, -1, -1, -1});
    for (double v : {roi.x_min, roi.y_min, roi.x_max, roi.y_max}) {
      gt << ",";
      write_double(gt, v);
    }
    const auto pupil = seq[i].pupil.value_or(std::make_pair(-1.0, -1.0));
    gt << ",";
    write_double(gt, pupil.first);
    gt << ",";
    write_double(gt, pupil.second);
    gt << "\n";
  }
  std::ofstream pj(fs::path(dir) / "params.json");
  pj << eye_scene_params_to_json(params) << "\n";
}

std::vector<Frame> load_frames_dir(const std::string& dir) {
  std::vector<fs::path> paths;
  if (!fs::is_directory(dir)) throw std::runtime_error("load_frames_dir: not a directory: " + dir);
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".pgm") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw std::runtime_error("load_frames_dir: no .pgm files in " + dir);
  std::vector<Frame> frames;
  frames.reserve(paths.size());
  for (size_t i = 0; i < paths.size(); ++i) {
    Frame f = read_pgm(paths[i].string());
    f.timestamp_index = static_cast<int64_t>(i);
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<SequenceFrame> load_sequence_dir(const std::string& dir) {
  std::vector<Frame> frames = load_frames_dir((fs::path(dir) / "frames").string());
  std::vector<SequenceFrame> seq(frames.size());
  for (size_t i = 0; i < frames.size(); ++i) {
    seq[i].frame = std::move(frames[i]);
    seq[i].labels = read_seg_pgm((fs::path(dir) / "labels" / frame_name(i)).string());
  }
  std::ifstream gt(fs::path(dir) / "gt.csv");
  if (!gt) throw std::runtime_error("load_sequence_dir: missing gt.csv in " + dir);
  std::string line;
  std::getline(gt, line);  // header
  while (std::getline(gt, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    size_t idx;
    double x0, y0, x1, y1, px, py;
    if (!(is >> idx >> x0 >> y0 >> x1 >> y1 >> px >> py))
      throw std::runtime_error("load_sequence_dir: malformed gt.csv row");
    if (idx >= seq.size()) throw std::runtime_error("load_sequence_dir: gt.csv frame index out of range");
    if (x0 >= 0) seq[idx].roi = Roi{x0, y0, x1, y1};
    if (px >= 0) seq[idx].pupil = std::make_pair(px, py);
  }
  return seq;
}

}  // namespace edar
