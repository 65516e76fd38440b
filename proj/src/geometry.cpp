#include "rgo/geometry.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace rgo {

namespace {

Eigen::Vector3d hom(const PixelPoint& p) { return {p.u, p.v, 1.0}; }

PixelPoint dehom(const Eigen::Vector3d& x) { return {x.x() / x.z(), x.y() / x.z()}; }

}  // namespace

CameraIntrinsics::CameraIntrinsics(double fx_, double fy_, double cx_, double cy_, int w, int h)
    : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(w), height(h) {
  if (fx <= 0 || fy <= 0) fail(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  if (cx < 0 || cx >= width || cy < 0 || cy >= height)
    fail(ErrorCode::kInvalidArgument, "principal point outside image");
}

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << fx, 0, cx, 0, fy, cy, 0, 0, 1;
  return k;
}

Eigen::Matrix3d CameraIntrinsics::inverse() const {
  Eigen::Matrix3d ki;
  ki << 1.0 / fx, 0, -cx / fx, 0, 1.0 / fy, -cy / fy, 0, 0, 1;
  return ki;
}

Pose::Pose(const Eigen::Matrix3d& r_, const Eigen::Vector3d& c_) : r(r_), c(c_) {
  if ((r.transpose() * r - Eigen::Matrix3d::Identity()).norm() > 1e-9 ||
      std::abs(r.determinant() - 1.0) > 1e-9)
    fail(ErrorCode::kInvalidArgument, "pose rotation is not a proper rotation matrix");
}

PixelPoint project(const Pose& pose, const CameraIntrinsics& k, const Eigen::Vector3d& world) {
  Eigen::Vector3d xc = pose.to_camera(world);
  return {k.cx + k.fx * xc.x() / xc.z(), k.cy + k.fy * xc.y() / xc.z()};
}

GroundPlane::GroundPlane(const Eigen::Vector3d& n_, double d_) : n(n_), d(d_) {
  double len = n.norm();
  if (std::abs(len - 1.0) > 1e-6) fail(ErrorCode::kInvalidArgument, "ground normal must be unit");
  n /= len;  // snap to exact unit length
  if (d <= 0) fail(ErrorCode::kInvalidArgument, "camera height must be positive");
}

Homography::Homography(const Eigen::Matrix3d& h) : h_(h) {
  double norm = h_.norm();
  if (!(norm > 0) || !h_.allFinite())
    fail(ErrorCode::kInvalidArgument, "homography matrix must be finite and nonzero");
  h_ /= norm;
  double pivot = h_(2, 2);
  if (pivot == 0.0) {
    for (int i = 0; i < 9 && pivot == 0.0; ++i) pivot = h_(i / 3, i % 3);
  }
  if (pivot < 0.0) h_ = -h_;
  if (std::abs(h_.determinant()) < 1e-12)
    fail(ErrorCode::kDegenerateConfiguration, "homography is rank deficient");
}

PixelPoint Homography::apply(const PixelPoint& p) const { return dehom(h_ * hom(p)); }

Homography estimate_homography_dlt(const std::vector<PointPair>& pairs) {
  size_t n = pairs.size();
  if (n < 4) fail(ErrorCode::kInvalidArgument, "need at least 4 point pairs");

  // Isotropic normalization: centroid at origin, mean distance sqrt(2).
  auto normalizer = [&](bool second) {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& pr : pairs) {
      const PixelPoint& p = second ? pr.second : pr.first;
      mean += Eigen::Vector2d(p.u, p.v);
    }
    mean /= static_cast<double>(n);
    double dist = 0.0;
    for (const auto& pr : pairs) {
      const PixelPoint& p = second ? pr.second : pr.first;
      dist += (Eigen::Vector2d(p.u, p.v) - mean).norm();
    }
    dist /= static_cast<double>(n);
    double scale = dist > 0 ? std::sqrt(2.0) / dist : 1.0;
    Eigen::Matrix3d t;
    t << scale, 0, -scale * mean.x(), 0, scale, -scale * mean.y(), 0, 0, 1;
    return t;
  };
  Eigen::Matrix3d t_src = normalizer(false);
  Eigen::Matrix3d t_dst = normalizer(true);

  Eigen::MatrixXd a(2 * n, 9);
  for (size_t i = 0; i < n; ++i) {
    Eigen::Vector3d x = t_src * hom(pairs[i].first);
    Eigen::Vector3d y = t_dst * hom(pairs[i].second);
    a.row(2 * i) << 0, 0, 0, -y.z() * x.transpose(), y.y() * x.transpose();
    a.row(2 * i + 1) << y.z() * x.transpose(), 0, 0, 0, -y.x() * x.transpose();
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // A homography needs rank 8; collinear source points drop it below that.
  if (sv(7) <= 1e-10 * sv(0))
    fail(ErrorCode::kDegenerateConfiguration, "degenerate correspondences (design matrix rank < 8)");

  Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return Homography(t_dst.inverse() * hn * t_src);
}

std::vector<PlaneDecomposition> decompose_homography(const Homography& h,
                                                     const CameraIntrinsics& k) {
  Eigen::Matrix3d a = k.inverse() * h.matrix() * k.matrix();
  // Resolve the projective sign so visible points map with positive scale.
  // For the motions in scope A is close to a rotation, whose trace is positive.
  if (a.trace() < 0) a = -a;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  double d1 = svd.singularValues()(0);
  double d2 = svd.singularValues()(1);
  double d3 = svd.singularValues()(2);
  Eigen::Matrix3d u = svd.matrixU();
  Eigen::Matrix3d v = svd.matrixV();
  double s = u.determinant() * v.determinant();

  if (d1 - d3 <= 1e-7 * d2)
    fail(ErrorCode::kNoPhysicalSolution,
         "degenerate motion: homography is a pure rotation/identity, plane normal undetermined");

  double x1 = std::sqrt(std::max(0.0, (d1 * d1 - d2 * d2) / (d1 * d1 - d3 * d3)));
  double x3 = std::sqrt(std::max(0.0, (d2 * d2 - d3 * d3) / (d1 * d1 - d3 * d3)));

  std::vector<PlaneDecomposition> out;
  const double e1[4] = {1, 1, -1, -1};
  const double e3[4] = {1, -1, 1, -1};
  for (int i = 0; i < 4; ++i) {
    Eigen::Matrix3d rp = Eigen::Matrix3d::Identity();
    Eigen::Vector3d np(e1[i] * x1, 0.0, e3[i] * x3);
    if (s > 0) {
      // d' = +d2 family (physical when det(U) det(V) = +1)
      double sin_t = e1[i] * e3[i] *
                     std::sqrt(std::max(0.0, (d1 * d1 - d2 * d2) * (d2 * d2 - d3 * d3))) /
                     ((d1 + d3) * d2);
      double cos_t = (d2 * d2 + d1 * d3) / ((d1 + d3) * d2);
      rp << cos_t, 0, -sin_t, 0, 1, 0, sin_t, 0, cos_t;
    } else {
      // d' = -d2 family
      double sin_p = e1[i] * e3[i] *
                     std::sqrt(std::max(0.0, (d1 * d1 - d2 * d2) * (d2 * d2 - d3 * d3))) /
                     ((d1 - d3) * d2);
      double cos_p = (d1 * d3 - d2 * d2) / ((d1 - d3) * d2);
      rp << cos_p, 0, sin_p, 0, -1, 0, sin_p, 0, -cos_p;
    }
    PlaneDecomposition cand;
    cand.rotation = s * u * rp * v.transpose();
    cand.normal = v * np;
    // A/d2 = R + (t/d) n^T, so the scaled translation follows directly.
    cand.translation = (a / d2 - cand.rotation) * cand.normal;
    // Drop duplicates produced when x1 or x3 vanishes.
    bool dup = false;
    for (const auto& c : out)
      if ((c.rotation - cand.rotation).norm() < 1e-9 && (c.normal - cand.normal).norm() < 1e-9)
        dup = true;
    if (!dup) out.push_back(cand);
  }
  return out;
}

CalibrationReport calibrate_ground(const std::vector<PointPair>& pairs,
                                   const CameraIntrinsics& k, double measured_height) {
  if (measured_height <= 0) fail(ErrorCode::kInvalidArgument, "measured height must be positive");
  Homography h = estimate_homography_dlt(pairs);
  std::vector<PlaneDecomposition> cands = decompose_homography(h, k);

  Eigen::Matrix3d ki = k.inverse();
  std::vector<PlaneDecomposition> survivors;
  for (const auto& cand : cands) {
    bool ok = true;
    for (const auto& pr : pairs) {
      Eigen::Vector3d m1 = ki * hom(pr.first);
      double side = cand.normal.dot(m1);
      if (side <= 0) {  // point would be behind the plane pencil in view 1
        ok = false;
        break;
      }
      // Depth in view 2 (scaled by the plane distance) must also be positive.
      Eigen::Vector3d x2_over_d = cand.rotation * (m1 / side) + cand.translation;
      if (x2_over_d.z() <= 0) {
        ok = false;
        break;
      }
    }
    if (ok) survivors.push_back(cand);
  }
  if (survivors.empty())
    fail(ErrorCode::kNoPhysicalSolution, "all decomposition candidates fail the cheirality filter");

  // The floor lies below an upright camera: its camera->plane normal points
  // along the +y (down) image axis. Pick the most downward-facing survivor.
  const PlaneDecomposition* best = nullptr;
  for (const auto& cand : survivors)
    if (!best || cand.normal.y() > best->normal.y()) best = &cand;
  if (best->normal.y() <= 0)
    fail(ErrorCode::kNoPhysicalSolution, "no candidate normal faces the camera's down axis");

  CalibrationReport report;
  // Stored normal points from the ground toward the camera, in the frame of
  // the first pose.
  report.ground = GroundPlane(-best->normal, measured_height);
  report.per_pair_residual_px.reserve(pairs.size());
  for (const auto& pr : pairs)
    report.per_pair_residual_px.push_back(distance(h.apply(pr.first), pr.second));
  return report;
}

Homography compose_plane_homography(const Eigen::Matrix3d& r_rel, const Eigen::Vector3d& t_rel,
                                    const Eigen::Vector3d& n_c, double d,
                                    const CameraIntrinsics& k) {
  Eigen::Matrix3d core = r_rel - t_rel * n_c.transpose() / d;
  return Homography(k.matrix() * core * k.inverse());
}

Homography ground_homography(const Pose& pose_t, const Pose& pose_prev,
                             const GroundPlane& ground, const CameraIntrinsics& k) {
  Eigen::Matrix3d r_rel = pose_prev.r * pose_t.r.transpose();
  Eigen::Vector3d t_rel = pose_prev.r * (pose_t.c - pose_prev.c);
  Eigen::Vector3d n_c = pose_t.r * ground.n;
  return compose_plane_homography(r_rel, t_rel, n_c, ground.d, k);
}

PixelPoint epipole_prev(const Pose& pose_t, const Pose& pose_prev,
                        const CameraIntrinsics& k, bool* at_infinity) {
  Eigen::Vector3d baseline = pose_t.c - pose_prev.c;
  if (baseline.norm() <= 1e-12)
    fail(ErrorCode::kDegenerateMotion, "camera centers coincide, epipole undefined");
  Eigen::Vector3d e = k.matrix() * (pose_prev.r * baseline);
  bool infinite = std::abs(e.z()) < 1e-12 * e.norm();
  if (at_infinity) *at_infinity = infinite;
  if (infinite) return {e.x(), e.y()};  // direction of the infinite epipole
  return dehom(e);
}

Parallax ground_pixel_parallax(const PixelPoint& a_prev, const PixelPoint& g_prev,
                               const PixelPoint& e_prev) {
  Eigen::Vector2d ge(g_prev.u - e_prev.u, g_prev.v - e_prev.v);
  double len2 = ge.squaredNorm();
  if (len2 <= 1e-18)
    fail(ErrorCode::kEpipoleCoincidesWithPoint,
         "ground transfer coincides with the epipole, parallax scalar undefined");
  Parallax out;
  out.vector = Eigen::Vector2d(a_prev.u - g_prev.u, a_prev.v - g_prev.v);
  out.rho = out.vector.dot(ge) / len2;
  out.collinearity_residual =
      std::abs(out.vector.x() * ge.y() - out.vector.y() * ge.x()) / std::sqrt(len2);
  return out;
}

}  // namespace rgo
