#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rgo/geometry.hpp"
#include "rgo/image.hpp"

namespace rgo {

// Wheel-odometry sample: planar pose in the world frame.
struct OdoPose {
  int frame_id = 0;
  double timestamp_s = 0.0;
  double x_m = 0.0;
  double y_m = 0.0;
  double theta_rad = 0.0;
};

// Rigid odometer->camera transform: X_cam = r * X_odo + t.
struct Extrinsics {
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
};

// Forward-looking camera mounted `height` above the robot origin.
Extrinsics default_extrinsics(double height);

// Lift a planar odometry pose to a full camera pose through the extrinsics.
Pose lift_pose(const OdoPose& odo, const Extrinsics& ext);

struct SequenceRecord {
  std::string dir;
  std::vector<std::string> frame_paths;  // ordered by frame id
  std::vector<OdoPose> odometry;
  std::vector<Pose> camera_poses;
  CameraIntrinsics intrinsics;
  Extrinsics extrinsics;
  GroundPlane ground;                       // world-frame floor
  std::vector<std::optional<std::string>> label_paths;  // per frame, if annotated

  bool annotated(int t) const { return label_paths[t].has_value(); }
};

enum class GatingMode {
  kAppearanceOnLowConfidence,  // AR when confidence < tau_gc (resolved reading)
  kGeometryOnLowConfidence,    // AGR when confidence < tau_gc
};

enum class ScoringVariant { kAgfm, kAppearanceOnly, kGeometryOnly };
enum class MapScheme { kWeightDecayed, kNmsLegacy };

struct FlowParams {
  int levels = 3;
  int window = 21;  // odd
  int max_iters = 30;
  double eps = 0.01;  // px
  double min_eig = 1e-6;
};

struct ProposalGrid {
  std::vector<int> scales = {32, 64, 128, 256, 512};
  std::vector<double> aspect_ratios = {0.5, 1.0, 2.0};
  int stride = 16;
  int top_j = 1000;
  double area_exponent = 1.5;
};

struct MotionNoiseBand {
  double translation_lo = 0.0, translation_hi = 0.0;  // fractional, per axis
  double rotation_lo = 0.0, rotation_hi = 0.0;        // radians of yaw
  bool enabled() const {
    return translation_hi > 0.0 || rotation_hi > 0.0;
  }
};

struct PipelineConfig {
  double tau_e = 0.8;
  double tau_gc = 0.1;
  int tau_b = 50;
  int n_trees = 50;
  double distance_threshold_m = 0.20;
  FlowParams flow;
  ProposalGrid grid;
  uint64_t seed = 7;
  GatingMode gating = GatingMode::kAppearanceOnLowConfidence;
  ScoringVariant scoring = ScoringVariant::kAgfm;
  MapScheme map_scheme = MapScheme::kWeightDecayed;
  int forest_max_depth = 20;
  int forest_min_leaf = 5;
  bool forest_bootstrap = true;
  MotionNoiseBand motion_noise;
  int blur_kernel = 0;              // 0 disables the blur harness
  double blur_angle_deg = 1e9;      // sentinel: draw a random angle per frame
  std::string inject_edges_dir;     // per-frame PNG response maps
  std::string inject_proposals_dir; // per-frame JSON box lists
  std::string inject_flow_dir;      // per-frame JSON correspondences

  std::string to_json() const;
  static PipelineConfig from_json(const std::string& text);
  std::string hash() const;  // FNV-1a of the canonical JSON
};

// --------------------------------------------------------------- sequence IO
// Layout: frames/frame_%06d.png, poses.csv, intrinsics.json, extrinsics.json,
// ground.json (optional, defaults to z-up at the extrinsic camera height),
// labels/label_%06d.png (optional per frame).
SequenceRecord load_sequence(const std::string& dir);

std::string frame_image_path(const std::string& dir, int frame_id);
std::string frame_label_path(const std::string& dir, int frame_id);

void write_poses_csv(const std::string& path, const std::vector<OdoPose>& poses);
void write_intrinsics_json(const std::string& path, const CameraIntrinsics& k);
void write_extrinsics_json(const std::string& path, const Extrinsics& ext);
void write_ground_json(const std::string& path, const GroundPlane& g);

// Smallest q >= 1 with ||C_t - C_{t-q}|| > threshold. Throws
// InsufficientMotion when the sequence start is reached first.
int select_frame_interval(const SequenceRecord& record, int t, double distance_threshold_m);

LabelImage load_labels(const SequenceRecord& record, int t);

}  // namespace rgo
