#pragma once

#include <array>
#include <optional>
#include <random>

#include "rgo/io.hpp"

namespace rgo {

// Deterministic uniform helpers over std::mt19937_64 (the distributions in
// <random> are not guaranteed bit-stable across standard libraries).
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(uint64_t seed) : eng(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * ((eng() >> 11) * 0x1.0p-53);
  }
  uint64_t uniform_int(uint64_t n) { return eng() % n; }
  double signed_band(double lo, double hi) {
    double mag = uniform(lo, hi);
    return (eng() & 1) ? mag : -mag;
  }
};

// Axis-aligned box obstacle resting on the floor.
struct ObstacleSpec {
  Eigen::Vector2d center;        // floor position (m)
  Eigen::Vector2d size;          // footprint (m)
  double height = 0.1;           // > 0, above ground
  std::array<uint8_t, 3> color = {200, 40, 40};
};

// Vertical panel (gate/door/plant stand-in) whose mirror image paints the
// floor as an unreal object.
struct ReflectorSpec {
  Eigen::Vector2d base_a;
  Eigen::Vector2d base_b;
  double height = 1.5;
  std::array<uint8_t, 3> color = {40, 80, 200};
  bool draw_real = true;  // also draw the physical panel above the horizon
};

struct SceneSpec {
  double camera_height = 0.6;
  CameraIntrinsics intrinsics{450.0, 450.0, 319.5, 179.5, 640, 360};
  std::vector<ObstacleSpec> obstacles;
  std::vector<ReflectorSpec> reflectors;
  std::vector<OdoPose> trajectory;
  std::vector<int> annotated_frames;
  uint64_t rng_seed = 1;
  double floor_base = 0.55;
  double floor_contrast = 0.05;
  double reflect_attenuation = 0.6;

  GroundPlane ground() const { return GroundPlane(Eigen::Vector3d::UnitZ(), camera_height); }
  Extrinsics extrinsics() const { return default_extrinsics(camera_height); }
  Pose camera_pose(int frame) const { return lift_pose(trajectory[frame], extrinsics()); }

  std::string to_json() const;
  static SceneSpec from_json(const std::string& text);
};

enum class PointKind { kFloor, kObstacle, kReflection };

struct OraclePoint {
  PixelPoint x_t;       // observation in frame t
  PixelPoint a_prev;    // exact correspondence in frame t-1
  double true_height;   // signed height above the floor (m)
  PointKind kind = PointKind::kFloor;
};

struct OracleFrame {
  int frame_index = 0;
  Pose pose_t, pose_prev;
  std::vector<OraclePoint> points;
  int behind_camera_count = 0;
};

struct RenderedFrame {
  RgbImage rgb;
  LabelImage labels;  // 0 background, 1 floor (incl. reflections), >=2 obstacle id
};

// Mirror across the floor plane {X : n.X + offset = 0}; offset defaults to the
// canonical floor through the origin. Involutive; plane points are fixed.
Eigen::Vector3d mirror_point(const Eigen::Vector3d& x, const GroundPlane& ground,
                             double plane_offset = 0.0);

// Exact projection of one world point into the (t, t-1) view pair; empty when
// the point falls behind either camera (depth <= min_depth).
std::optional<OraclePoint> exact_correspondence(const Pose& pose_t, const Pose& pose_prev,
                                                const CameraIntrinsics& k,
                                                const Eigen::Vector3d& world, double true_height,
                                                PointKind kind, double min_depth = 0.05);

// Structured oracle: floor grid points, obstacle rim points, and mirrored
// reflector points, all with exact two-view correspondences.
OracleFrame generate_oracle(const SceneSpec& spec, int frame_index);

// Flat-shaded deterministic rasterization of one frame. Width/height <= 0
// renders at the spec's native resolution.
RenderedFrame render(const SceneSpec& spec, int frame_index, int width = 0, int height = 0);

// Odometry perturbation for the robustness harness: the relative translation
// prev->t is scaled per-axis by (1 + eps) and the heading gets extra yaw.
OdoPose perturb_odometry(const OdoPose& odo_t, const OdoPose& odo_prev,
                         const MotionNoiseBand& noise, Rng& rng);

// Randomized desk-scale scene: >= 1 obstacle, >= 2 reflectors, forward
// trajectory with mild heading wander.
SceneSpec random_scene(uint64_t seed);

// Write the rendered sequence in the dataset layout understood by
// load_sequence (frames/, poses.csv, intrinsics.json, extrinsics.json,
// ground.json, labels/ for annotated frames).
void write_sequence(const SceneSpec& spec, const std::string& dir);

}  // namespace rgo
