#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edar/train.hpp"

namespace edar {

// Parameters of the synthetic near-eye scene: concentric pupil/iris disks
// inside a sclera ellipse over a textured background, with eyelids clipping
// the foreground vertically. Stands in for licensed eye datasets.
struct EyeSceneParams {
  int width = 64;
  int height = 64;

  double sclera_cx = 0.5, sclera_cy = 0.5;  // fractions of width/height
  double sclera_ax = 0.38, sclera_ay = 0.26; // semi-axes, fraction of width/height
  double sclera_angle = 0.0;                 // radians
  double iris_radius = 0.14;                 // fraction of width
  double pupil_radius_fraction = 0.45;       // of the iris radius
  double eyelid_aperture = 1.0;              // 1 fully open, 0 closed

  // trajectory
  double drift_amplitude = 0.04;   // fraction of width, smooth sinusoidal drift
  double saccade_rate = 0.05;      // expected saccades per frame
  double saccade_magnitude = 0.10; // fraction of width per jump
  double blink_rate = 0.0;         // expected blink starts per frame
  int blink_duration = 6;          // frames from open to open

  double noise_sigma = 4.0;        // gaussian pixel noise on frames only
  uint64_t rng_seed = 1;

  void validate() const;
};

std::string eye_scene_params_to_json(const EyeSceneParams& params);
EyeSceneParams eye_scene_params_from_json(const std::string& text);

// Renders n_frames with exact per-frame labels, ground-truth ROI (bbox of the
// foreground classes) and pupil center. Blinks close the aperture to zero and
// back; fully-closed frames have empty ROI and pupil entries.
std::vector<SequenceFrame> render_sequence(const EyeSceneParams& params, int n_frames);

// Ground-truth refinement for noisy maps: DBSCAN over foreground pixels keeps
// only the largest cluster, remaining foreground becomes background, then
// enclosed background holes are filled with the majority class of their
// boundary. Idempotent; empty-foreground maps pass through unchanged.
SegmentationMap refine_groundtruth(const SegmentationMap& seg, double eps = 3.0, int min_pts = 5);

// --- sequence directory layout -------------------------------------------------
// frames/NNNNN.pgm, labels/NNNNN.pgm, gt.csv (roi + pupil center per frame,
// -1 sentinels while blinking), params.json.

void write_sequence_dir(const std::vector<SequenceFrame>& seq, const EyeSceneParams& params,
                        const std::string& dir);
std::vector<SequenceFrame> load_sequence_dir(const std::string& dir);
// Frames only (any directory of .pgm files, sorted by name).
std::vector<Frame> load_frames_dir(const std::string& dir);

}  // namespace edar
