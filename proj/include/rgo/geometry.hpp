#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "rgo/common.hpp"

namespace rgo {

struct CameraIntrinsics {
  double fx = 0, fy = 0;
  double cx = 0, cy = 0;
  int width = 0, height = 0;

  CameraIntrinsics() = default;
  CameraIntrinsics(double fx_, double fy_, double cx_, double cy_, int w, int h);

  Eigen::Matrix3d matrix() const;
  Eigen::Matrix3d inverse() const;
};

// World-to-camera pose: x ~ K * r * (X - c).
struct Pose {
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  Eigen::Vector3d c = Eigen::Vector3d::Zero();

  Pose() = default;
  Pose(const Eigen::Matrix3d& r_, const Eigen::Vector3d& c_);

  Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const { return r * (world - c); }
  Eigen::Vector3d optical_axis_world() const { return r.row(2).transpose(); }
};

PixelPoint project(const Pose& pose, const CameraIntrinsics& k, const Eigen::Vector3d& world);

// Floor plane: unit normal in world frame pointing from the ground toward the
// camera side, and the perpendicular camera height d > 0.
struct GroundPlane {
  Eigen::Vector3d n = Eigen::Vector3d::UnitZ();
  double d = 0.0;

  GroundPlane() = default;
  GroundPlane(const Eigen::Vector3d& n_, double d_);
};

// 3x3 projective map, stored with Frobenius norm 1 and h(2,2) >= 0 (tie broken
// by the first nonzero entry being positive).
class Homography {
 public:
  Homography() : h_(Eigen::Matrix3d::Identity() / std::sqrt(3.0)) {}
  explicit Homography(const Eigen::Matrix3d& h);

  const Eigen::Matrix3d& matrix() const { return h_; }
  PixelPoint apply(const PixelPoint& p) const;

 private:
  Eigen::Matrix3d h_;
};

// Ground-pixel parallax of one tracked point: the displacement between its
// appearance correspondence a and its ground transfer g, the signed scalar
// rho along the g->e direction, and the distance of a from the g-e line.
struct Parallax {
  Eigen::Vector2d vector = Eigen::Vector2d::Zero();  // a - g
  double rho = 0.0;
  double collinearity_residual = 0.0;
};

struct PlaneDecomposition {
  Eigen::Matrix3d rotation;      // relative rotation, source -> target camera
  Eigen::Vector3d translation;   // relative translation scaled by 1/plane-distance
  Eigen::Vector3d normal;        // unit plane normal, source camera frame,
                                 // pointing from the camera toward the plane
};

struct CalibrationReport {
  GroundPlane ground;
  std::vector<double> per_pair_residual_px;  // symmetric transfer residual per pair
};

using PointPair = std::pair<PixelPoint, PixelPoint>;

// Least-squares homography from >= 4 correspondences (x -> x') using the
// normalized DLT. Throws DegenerateConfiguration when the design matrix is
// rank-deficient (e.g. collinear source points).
Homography estimate_homography_dlt(const std::vector<PointPair>& pairs);

// Analytic plane decomposition of K^-1 H K into up to 4 (R, t/d, n) candidates.
// Candidates come in (t,n) / (-t,-n) pairs; the caller prunes by cheirality.
// Throws NoPhysicalSolution with a degenerate-motion message when the motion
// leaves the normal undetermined (H close to a pure rotation / identity).
std::vector<PlaneDecomposition> decompose_homography(const Homography& h,
                                                     const CameraIntrinsics& k);

// Offline ground calibration from manually marked floor-point pairs taken at
// two robot poses. The recovered normal is expressed in the frame of the first
// camera ("world frame of the first pose"), oriented toward the camera side.
CalibrationReport calibrate_ground(const std::vector<PointPair>& pairs,
                                   const CameraIntrinsics& k, double measured_height);

// Plane-induced homography mapping frame-t pixels to frame-(t-1) pixels:
// H = K (R_rel - t_rel n_c^T / d) K^-1 with R_rel = R_prev R_t^T,
// t_rel = R_prev (C_t - C_prev) and n_c = R_t n.
Homography ground_homography(const Pose& pose_t, const Pose& pose_prev,
                             const GroundPlane& ground, const CameraIntrinsics& k);

// Projection of camera-t's center into frame t-1. Throws DegenerateMotion on a
// zero baseline; a finite epipole may legitimately lie outside image bounds.
// `at_infinity` (optional) is set when the epipole direction is parallel to
// the target image plane (|w| below 1e-12 of the direction norm).
PixelPoint epipole_prev(const Pose& pose_t, const Pose& pose_prev,
                        const CameraIntrinsics& k, bool* at_infinity = nullptr);

// rho = ((a-g).(g-e)) / |g-e|^2, the least-squares scalar of the collinearity
// relation a - g = rho (g - e). Throws EpipoleCoincidesWithPoint when
// |g-e| <= 1e-9 px. Sign convention: rho < 0 above ground, rho > 0 below.
Parallax ground_pixel_parallax(const PixelPoint& a_prev, const PixelPoint& g_prev,
                               const PixelPoint& e_prev);

// Helper shared by calibration and synth: homography from explicit motion,
// H = K (R_rel - t_rel n_c^T / d) K^-1.
Homography compose_plane_homography(const Eigen::Matrix3d& r_rel, const Eigen::Vector3d& t_rel,
                                    const Eigen::Vector3d& n_c, double d,
                                    const CameraIntrinsics& k);

}  // namespace rgo
