#include "edar/pupil.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace edar {

EllipseFit fit_ellipse(const std::vector<std::pair<double, double>>& points) {
  const size_t n = points.size();
  if (n < 6) throw std::invalid_argument("fit_ellipse: need at least 6 points");

  double mx = 0, my = 0;
  for (auto [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  // Halir-Flusser partitioning of the Fitzgibbon system: quadratic part D1,
  // linear part D2, constraint 4ac - b^2 = 1 folded into a 3x3 eigenproblem.
  Eigen::MatrixXd d1(static_cast<Eigen::Index>(n), 3), d2(static_cast<Eigen::Index>(n), 3);
  for (size_t i = 0; i < n; ++i) {
    const double x = points[i].first - mx;
    const double y = points[i].second - my;
    d1(static_cast<Eigen::Index>(i), 0) = x * x;
    d1(static_cast<Eigen::Index>(i), 1) = x * y;
    d1(static_cast<Eigen::Index>(i), 2) = y * y;
    d2(static_cast<Eigen::Index>(i), 0) = x;
    d2(static_cast<Eigen::Index>(i), 1) = y;
    d2(static_cast<Eigen::Index>(i), 2) = 1.0;
  }
  const Eigen::Matrix3d s1 = d1.transpose() * d1;
  const Eigen::Matrix3d s2 = d1.transpose() * d2;
  const Eigen::Matrix3d s3 = d2.transpose() * d2;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(s3);
  if (!lu.isInvertible()) throw std::invalid_argument("fit_ellipse: degenerate point scatter");
  const Eigen::Matrix3d t = -lu.solve(s2.transpose());
  const Eigen::Matrix3d m0 = s1 + s2 * t;
  Eigen::Matrix3d m;
  m.row(0) = m0.row(2) / 2.0;
  m.row(1) = -m0.row(1);
  m.row(2) = m0.row(0) / 2.0;

  Eigen::EigenSolver<Eigen::Matrix3d> eig(m);
  int pick = -1;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(eig.eigenvalues()(i).imag()) > 1e-9) continue;
    const Eigen::Vector3d v = eig.eigenvectors().col(i).real();
    const double cond = 4.0 * v(0) * v(2) - v(1) * v(1);
    if (cond > 0) {
      pick = i;
      break;
    }
  }
  if (pick < 0) throw std::invalid_argument("fit_ellipse: no elliptical solution (degenerate data)");
  const Eigen::Vector3d a1 = eig.eigenvectors().col(pick).real();
  const Eigen::Vector3d a2 = t * a1;

  double A = a1(0), B = a1(1), C = a1(2), D = a2(0), E = a2(1), F = a2(2);
  const double denom = B * B - 4 * A * C;
  if (std::abs(denom) < 1e-300) throw std::invalid_argument("fit_ellipse: degenerate conic");
  const double ucx = (2 * C * D - B * E) / denom;
  const double ucy = (2 * A * E - B * D) / denom;
  double mu = A * ucx * ucx + B * ucx * ucy + C * ucy * ucy + D * ucx + E * ucy + F;
  // canonical sign: positive-definite quadratic part, mu < 0
  if (mu > 0) {
    A = -A;
    B = -B;
    C = -C;
    mu = -mu;
  }

  // eigen decomposition of the 2x2 quadratic form
  const double tr = A + C;
  const double det = A * C - B * B / 4;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  const double l1 = tr / 2 - disc;  // smaller eigenvalue -> major axis
  const double l2 = tr / 2 + disc;
  if (!(l1 * mu < 0 && l2 * mu < 0)) throw std::invalid_argument("fit_ellipse: conic is not an ellipse");

  EllipseFit fit;
  fit.cx = ucx + mx;
  fit.cy = ucy + my;
  fit.a = std::sqrt(-mu / l1);
  fit.b = std::sqrt(-mu / l2);
  // eigenvector of l1: (B/2, l1 - A), or (l1 - C, B/2) when that vanishes
  double vx = B / 2, vy = l1 - A;
  if (std::abs(vx) < 1e-12 && std::abs(vy) < 1e-12) {
    vx = l1 - C;
    vy = B / 2;
  }
  if (std::abs(vx) < 1e-12 && std::abs(vy) < 1e-12) {
    vx = 1;  // circle: any direction, pick 0
    vy = 0;
  }
  fit.angle = std::atan2(vy, vx);
  if (fit.angle < 0) fit.angle += M_PI;
  if (fit.angle >= M_PI) fit.angle -= M_PI;
  return fit;
}

std::optional<std::pair<double, double>> pupil_center(const SegmentationMap& seg) {
  std::vector<std::pair<double, double>> boundary;
  size_t count = 0;
  double sx = 0, sy = 0;
  for (int y = 0; y < seg.height; ++y) {
    for (int x = 0; x < seg.width; ++x) {
      if (seg.at(x, y) != 3) continue;
      ++count;
      sx += x + 0.5;
      sy += y + 0.5;
      const bool edge = x == 0 || y == 0 || x == seg.width - 1 || y == seg.height - 1 ||
                        seg.at(x - 1, y) != 3 || seg.at(x + 1, y) != 3 || seg.at(x, y - 1) != 3 ||
                        seg.at(x, y + 1) != 3;
      if (edge) boundary.emplace_back(x + 0.5, y + 0.5);
    }
  }
  if (count == 0) return std::nullopt;
  if (count >= 20) {
    try {
      const EllipseFit fit = fit_ellipse(boundary);
      return std::make_pair(fit.cx, fit.cy);
    } catch (const std::invalid_argument&) {
      // degenerate boundary (e.g. a clipped sliver): fall back to the centroid
    }
  }
  return std::make_pair(sx / static_cast<double>(count), sy / static_cast<double>(count));
}

double miou(const SegmentationMap& pred, const SegmentationMap& truth) {
  if (pred.width != truth.width || pred.height != truth.height)
    throw std::invalid_argument("miou: dims mismatch");
  long long inter[SegmentationMap::kNumClasses] = {0};
  long long uni[SegmentationMap::kNumClasses] = {0};
  for (size_t i = 0; i < pred.classes.size(); ++i) {
    const uint8_t p = pred.classes[i], t = truth.classes[i];
    if (p == t) {
      ++inter[p];
      ++uni[p];
    } else {
      ++uni[p];
      ++uni[t];
    }
  }
  double sum = 0;
  int present = 0;
  for (int c = 0; c < SegmentationMap::kNumClasses; ++c) {
    if (uni[c] == 0) continue;  // class absent from both maps
    sum += static_cast<double>(inter[c]) / static_cast<double>(uni[c]);
    ++present;
  }
  return present == 0 ? 1.0 : sum / present;
}

std::optional<double> pupil_error(const std::optional<std::pair<double, double>>& pred,
                                  const std::optional<std::pair<double, double>>& truth) {
  if (!pred && !truth) return 0.0;
  if (!pred || !truth) return std::nullopt;
  const double dx = pred->first - truth->first;
  const double dy = pred->second - truth->second;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace edar
