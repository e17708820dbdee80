#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "edar/image.hpp"

namespace edar {

struct EllipseFit {
  double cx = 0, cy = 0;
  double a = 0, b = 0;   // semi-axes, a >= b
  double angle = 0;      // major-axis angle in [0, pi)
};

// Direct least-squares conic fit constrained to an ellipse (4ac - b^2 = 1),
// solved via the reduced 3x3 eigenproblem. Points are centered on their
// centroid first for conditioning. Throws on fewer than 6 points or a
// degenerate scatter; never silently degrades to a circle.
EllipseFit fit_ellipse(const std::vector<std::pair<double, double>>& points);

// Center of the pupil (class 3): ellipse fit of the class-boundary pixels,
// centroid when fewer than 20 pupil pixels exist, empty when none do.
std::optional<std::pair<double, double>> pupil_center(const SegmentationMap& seg);

// Mean IoU over the four classes; classes absent from both maps are skipped.
double miou(const SegmentationMap& pred, const SegmentationMap& truth);

// Euclidean distance in pixels. Empty vs empty is 0; empty vs present has no
// defined distance and is excluded from averages (callers count it).
std::optional<double> pupil_error(const std::optional<std::pair<double, double>>& pred,
                                  const std::optional<std::pair<double, double>>& truth);

}  // namespace edar
