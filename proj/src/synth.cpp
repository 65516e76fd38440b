#include "rgo/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "rgo/png_io.hpp"

namespace rgo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic [0,1) hash of integer lattice coordinates.
double hash01(int64_t a, int64_t b, uint64_t seed) {
  uint64_t h = splitmix64(static_cast<uint64_t>(a) * 0x9e3779b97f4a7c15ull ^
                          splitmix64(static_cast<uint64_t>(b) + seed));
  return (h >> 11) * 0x1.0p-53;
}

struct Camera {
  Pose pose;
  CameraIntrinsics k;

  // Returns pixel + camera depth.
  std::pair<PixelPoint, double> project(const Eigen::Vector3d& world) const {
    Eigen::Vector3d xc = pose.to_camera(world);
    return {{k.cx + k.fx * xc.x() / xc.z(), k.cy + k.fy * xc.y() / xc.z()}, xc.z()};
  }
  Eigen::Vector3d ray_world(double u, double v) const {
    Eigen::Vector3d dir_c((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
    return pose.r.transpose() * dir_c;
  }
};

// Convex hull, counter-clockwise (Andrew monotone chain).
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) { return a == b; }),
            pts.end());
  size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Eigen::Vector2d> hull(2 * n);
  size_t k = 0;
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

bool inside_convex(const std::vector<Eigen::Vector2d>& poly, double u, double v) {
  size_t n = poly.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    if ((b.x() - a.x()) * (v - a.y()) - (b.y() - a.y()) * (u - a.x()) < 0) return false;
  }
  return true;
}

// Fill the projection of a set of world points; fn(v, u, depth_hint) paints.
template <typename Fn>
void fill_projected(const Camera& cam, const std::vector<Eigen::Vector3d>& corners,
                    int width, int height, Fn&& fn) {
  std::vector<Eigen::Vector2d> proj;
  proj.reserve(corners.size());
  for (const auto& c : corners) {
    auto [px, depth] = cam.project(c);
    if (depth < 0.05) return;  // behind or grazing the camera, skip this frame
    proj.emplace_back(px.u, px.v);
  }
  auto hull = convex_hull(proj);
  if (hull.size() < 3) return;
  double u0 = width, u1 = 0, v0 = height, v1 = 0;
  for (const auto& p : hull) {
    u0 = std::min(u0, p.x());
    u1 = std::max(u1, p.x());
    v0 = std::min(v0, p.y());
    v1 = std::max(v1, p.y());
  }
  int ua = std::max(0, static_cast<int>(std::floor(u0)));
  int ub = std::min(width - 1, static_cast<int>(std::ceil(u1)));
  int va = std::max(0, static_cast<int>(std::floor(v0)));
  int vb = std::min(height - 1, static_cast<int>(std::ceil(v1)));
  for (int v = va; v <= vb; ++v)
    for (int u = ua; u <= ub; ++u)
      if (inside_convex(hull, u, v)) fn(v, u);
}

double floor_shade(double x, double y, const SceneSpec& spec) {
  // 0.25 m checker cells with per-cell jitter, 0.5 m seam lines, and a fine
  // per-position dither so flow has local texture everywhere.
  int64_t cx = static_cast<int64_t>(std::floor(x / 0.25));
  int64_t cy = static_cast<int64_t>(std::floor(y / 0.25));
  double checker = ((cx + cy) & 1) ? 0.5 : -0.5;
  double jitter = hash01(cx, cy, spec.rng_seed) - 0.5;
  double shade = spec.floor_base + spec.floor_contrast * (checker + jitter);
  double sx = std::abs(x / 0.5 - std::round(x / 0.5));
  double sy = std::abs(y / 0.5 - std::round(y / 0.5));
  if (std::min(sx, sy) * 0.5 < 0.006) shade -= 0.12;
  int64_t fx = static_cast<int64_t>(std::floor(x / 0.01));
  int64_t fy = static_cast<int64_t>(std::floor(y / 0.01));
  shade += 0.02 * (hash01(fx, fy, spec.rng_seed ^ 0xabcdefull) - 0.5);
  return std::clamp(shade, 0.0, 1.0);
}

std::vector<Eigen::Vector3d> panel_corners(const ReflectorSpec& r, bool mirrored) {
  double zt = mirrored ? -r.height : r.height;
  return {{r.base_a.x(), r.base_a.y(), 0.0},
          {r.base_b.x(), r.base_b.y(), 0.0},
          {r.base_a.x(), r.base_a.y(), zt},
          {r.base_b.x(), r.base_b.y(), zt}};
}

std::vector<Eigen::Vector3d> box_corners(const ObstacleSpec& o) {
  std::vector<Eigen::Vector3d> out;
  for (int dx : {-1, 1})
    for (int dy : {-1, 1})
      for (int dz : {0, 1})
        out.emplace_back(o.center.x() + dx * o.size.x() / 2,
                         o.center.y() + dy * o.size.y() / 2, dz * o.height);
  return out;
}

}  // namespace

Eigen::Vector3d mirror_point(const Eigen::Vector3d& x, const GroundPlane& ground,
                             double plane_offset) {
  double signed_dist = ground.n.dot(x) + plane_offset;
  return x - 2.0 * signed_dist * ground.n;
}

std::optional<OraclePoint> exact_correspondence(const Pose& pose_t, const Pose& pose_prev,
                                                const CameraIntrinsics& k,
                                                const Eigen::Vector3d& world, double true_height,
                                                PointKind kind, double min_depth) {
  Eigen::Vector3d ct = pose_t.to_camera(world);
  Eigen::Vector3d cp = pose_prev.to_camera(world);
  if (ct.z() <= min_depth || cp.z() <= min_depth) return std::nullopt;
  OraclePoint pt;
  pt.x_t = {k.cx + k.fx * ct.x() / ct.z(), k.cy + k.fy * ct.y() / ct.z()};
  pt.a_prev = {k.cx + k.fx * cp.x() / cp.z(), k.cy + k.fy * cp.y() / cp.z()};
  pt.true_height = true_height;
  pt.kind = kind;
  return pt;
}

OracleFrame generate_oracle(const SceneSpec& spec, int frame_index) {
  if (frame_index < 1 || frame_index >= static_cast<int>(spec.trajectory.size()))
    fail(ErrorCode::kInvalidArgument, "oracle frame index needs a predecessor");
  OracleFrame out;
  out.frame_index = frame_index;
  out.pose_t = spec.camera_pose(frame_index);
  out.pose_prev = spec.camera_pose(frame_index - 1);
  const CameraIntrinsics& k = spec.intrinsics;

  auto push = [&](const Eigen::Vector3d& w, PointKind kind) {
    auto pt = exact_correspondence(out.pose_t, out.pose_prev, k, w, w.z(), kind);
    if (pt)
      out.points.push_back(*pt);
    else
      ++out.behind_camera_count;
  };

  for (double x = -3.0; x <= 8.0; x += 0.25)
    for (double y = -3.0; y <= 3.0; y += 0.25) push({x, y, 0.0}, PointKind::kFloor);

  for (const auto& o : spec.obstacles) {
    for (const auto& c : box_corners(o))
      if (c.z() > 0) push(c, PointKind::kObstacle);
    for (int i = 1; i < 4; ++i)  // points down the vertical rim
      push({o.center.x() - o.size.x() / 2, o.center.y(), o.height * i / 4.0},
           PointKind::kObstacle);
  }

  for (const auto& r : spec.reflectors) {
    for (int i = 0; i <= 4; ++i) {
      double s = i / 4.0;
      Eigen::Vector2d base = r.base_a + s * (r.base_b - r.base_a);
      for (int j = 1; j <= 3; ++j) {
        double z = r.height * j / 3.0;
        push({base.x(), base.y(), -z}, PointKind::kReflection);  // mirrored panel
        push({base.x(), base.y(), z}, PointKind::kObstacle);     // physical panel
      }
    }
  }
  return out;
}

RenderedFrame render(const SceneSpec& spec, int frame_index, int width, int height) {
  CameraIntrinsics k = spec.intrinsics;
  if (width > 0 && height > 0) {
    if (width < 64 || height < 64) fail(ErrorCode::kInvalidArgument, "resolution below 64x64");
    double su = static_cast<double>(width) / spec.intrinsics.width;
    double sv = static_cast<double>(height) / spec.intrinsics.height;
    k = CameraIntrinsics(spec.intrinsics.fx * su, spec.intrinsics.fy * sv,
                         spec.intrinsics.cx * su, spec.intrinsics.cy * sv, width, height);
  }
  Camera cam{spec.camera_pose(frame_index), k};

  RenderedFrame out;
  out.rgb = RgbImage(k.width, k.height);
  out.labels = LabelImage(k.width, k.height, 0);

  // Floor pass: raycast every pixel against z = 0.
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      Eigen::Vector3d dir = cam.ray_world(u, v);
      uint8_t* px = out.rgb.px(v, u);
      if (dir.z() < -1e-12) {
        double s = -cam.pose.c.z() / dir.z();
        Eigen::Vector3d hit = cam.pose.c + s * dir;
        double shade = floor_shade(hit.x(), hit.y(), spec);
        px[0] = static_cast<uint8_t>(std::lround(shade * 0.95 * 255));
        px[1] = static_cast<uint8_t>(std::lround(shade * 255));
        px[2] = static_cast<uint8_t>(std::lround(std::min(1.0, shade * 1.05) * 255));
        out.labels.at(v, u) = 1;
      } else {
        double g = 0.72 - 0.10 * (static_cast<double>(v) / k.height);
        g += 0.02 * (hash01(u / 6, v / 6, spec.rng_seed ^ 0x77ull) - 0.5);
        px[0] = px[1] = px[2] = static_cast<uint8_t>(std::lround(std::clamp(g, 0.0, 1.0) * 255));
      }
    }
  }

  // Mirror images of the panels, blended into the floor, farthest first.
  std::vector<const ReflectorSpec*> refl;
  for (const auto& r : spec.reflectors) refl.push_back(&r);
  auto depth_of = [&](const Eigen::Vector2d& p) {
    return (Eigen::Vector3d(p.x(), p.y(), 0) - cam.pose.c).norm();
  };
  std::sort(refl.begin(), refl.end(), [&](const ReflectorSpec* a, const ReflectorSpec* b) {
    return depth_of(0.5 * (a->base_a + a->base_b)) > depth_of(0.5 * (b->base_a + b->base_b));
  });
  for (const ReflectorSpec* r : refl) {
    double att = spec.reflect_attenuation;
    fill_projected(cam, panel_corners(*r, true), k.width, k.height, [&](int v, int u) {
      if (out.labels.at(v, u) != 1) return;  // reflections live on the floor only
      uint8_t* px = out.rgb.px(v, u);
      for (int c = 0; c < 3; ++c)
        px[c] = static_cast<uint8_t>(std::lround(att * r->color[c] + (1.0 - att) * px[c]));
    });
  }
  // Physical panels above the ground (label: background).
  for (const ReflectorSpec* r : refl) {
    if (!r->draw_real) continue;
    fill_projected(cam, panel_corners(*r, false), k.width, k.height, [&](int v, int u) {
      uint8_t* px = out.rgb.px(v, u);
      for (int c = 0; c < 3; ++c)
        px[c] = static_cast<uint8_t>(std::lround(0.9 * r->color[c]));
      out.labels.at(v, u) = 0;
    });
  }

  // Obstacles, farthest first, instance ids 2, 3, ...
  std::vector<int> order(spec.obstacles.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return depth_of(spec.obstacles[a].center) > depth_of(spec.obstacles[b].center);
  });
  for (int idx : order) {
    const ObstacleSpec& o = spec.obstacles[idx];
    uint16_t label = static_cast<uint16_t>(2 + idx);
    fill_projected(cam, box_corners(o), k.width, k.height, [&](int v, int u) {
      uint8_t* px = out.rgb.px(v, u);
      for (int c = 0; c < 3; ++c) px[c] = o.color[c];
      out.labels.at(v, u) = label;
    });
    // Lighter top face so the box reads as 3D and gives interior gradients.
    std::vector<Eigen::Vector3d> top;
    for (const auto& c : box_corners(o))
      if (c.z() > 0) top.push_back(c);
    fill_projected(cam, top, k.width, k.height, [&](int v, int u) {
      uint8_t* px = out.rgb.px(v, u);
      for (int c = 0; c < 3; ++c)
        px[c] = static_cast<uint8_t>(std::min(255, o.color[c] * 5 / 4 + 10));
      out.labels.at(v, u) = label;
    });
  }
  return out;
}

OdoPose perturb_odometry(const OdoPose& odo_t, const OdoPose& odo_prev,
                         const MotionNoiseBand& noise, Rng& rng) {
  OdoPose out = odo_t;
  double dx = odo_t.x_m - odo_prev.x_m;
  double dy = odo_t.y_m - odo_prev.y_m;
  if (noise.translation_hi > 0) {
    dx *= 1.0 + rng.signed_band(noise.translation_lo, noise.translation_hi);
    dy *= 1.0 + rng.signed_band(noise.translation_lo, noise.translation_hi);
  }
  out.x_m = odo_prev.x_m + dx;
  out.y_m = odo_prev.y_m + dy;
  if (noise.rotation_hi > 0)
    out.theta_rad += rng.signed_band(noise.rotation_lo, noise.rotation_hi);
  return out;
}

SceneSpec random_scene(uint64_t seed) {
  Rng rng(splitmix64(seed * 2654435761ull + 12345));
  SceneSpec spec;
  spec.rng_seed = splitmix64(seed ^ 0x5eedull);

  int frames = 10;
  double heading = rng.uniform(-0.05, 0.05);
  double x = 0, y = 0;
  for (int f = 0; f < frames; ++f) {
    OdoPose p;
    p.frame_id = f;
    p.timestamp_s = 0.1 * f;
    p.x_m = x;
    p.y_m = y;
    p.theta_rad = heading;
    spec.trajectory.push_back(p);
    double step = rng.uniform(0.048, 0.06);
    heading += rng.uniform(-0.008, 0.008);
    x += step * std::cos(heading);
    y += step * std::sin(heading);
  }
  spec.annotated_frames = {6, 8};

  const std::array<std::array<uint8_t, 3>, 6> palette = {{{200, 50, 40},
                                                          {40, 90, 200},
                                                          {40, 160, 70},
                                                          {210, 140, 30},
                                                          {150, 60, 180},
                                                          {30, 170, 170}}};

  int n_obs = 1 + static_cast<int>(rng.uniform_int(2));
  for (int i = 0; i < n_obs; ++i) {
    ObstacleSpec o;
    for (int attempt = 0; attempt < 32; ++attempt) {
      o.center = {rng.uniform(1.7, 3.1), rng.uniform(-0.8, 0.8)};
      bool clear = true;
      for (const auto& other : spec.obstacles)
        if ((other.center - o.center).norm() < 0.7) clear = false;
      if (clear) break;
    }
    o.size = {rng.uniform(0.1, 0.24), rng.uniform(0.1, 0.24)};
    o.height = rng.uniform(0.06, 0.2);
    o.color = palette[rng.uniform_int(palette.size())];
    spec.obstacles.push_back(o);
  }

  int n_ref = 2 + static_cast<int>(rng.uniform_int(3));
  for (int i = 0; i < n_ref; ++i) {
    ReflectorSpec r;
    double cx = rng.uniform(3.2, 6.0);
    double cy = rng.uniform(-1.8, 1.8);
    double w = rng.uniform(0.35, 1.0);
    double tilt = rng.uniform(-0.3, 0.3);
    r.base_a = {cx + tilt, cy - w / 2};
    r.base_b = {cx - tilt, cy + w / 2};
    r.height = rng.uniform(0.8, 2.0);
    r.color = palette[rng.uniform_int(palette.size())];
    spec.reflectors.push_back(r);
  }
  return spec;
}

void write_sequence(const SceneSpec& spec, const std::string& dir) {
  fs::create_directories(dir + "/frames");
  bool any_labels = !spec.annotated_frames.empty();
  if (any_labels) fs::create_directories(dir + "/labels");

  write_poses_csv(dir + "/poses.csv", spec.trajectory);
  write_intrinsics_json(dir + "/intrinsics.json", spec.intrinsics);
  write_extrinsics_json(dir + "/extrinsics.json", spec.extrinsics());
  write_ground_json(dir + "/ground.json", spec.ground());
  {
    std::ofstream out(dir + "/scene.json");
    out << spec.to_json();
  }

  for (size_t f = 0; f < spec.trajectory.size(); ++f) {
    RenderedFrame frame = render(spec, static_cast<int>(f));
    write_png_rgb8(frame_image_path(dir, spec.trajectory[f].frame_id), frame.rgb);
    bool annotated = std::find(spec.annotated_frames.begin(), spec.annotated_frames.end(),
                               static_cast<int>(f)) != spec.annotated_frames.end();
    if (annotated)
      write_png_label(frame_label_path(dir, spec.trajectory[f].frame_id), frame.labels);
  }
}

std::string SceneSpec::to_json() const {
  json j;
  j["camera_height"] = camera_height;
  j["intrinsics"] = {{"fx", intrinsics.fx}, {"fy", intrinsics.fy}, {"cx", intrinsics.cx},
                     {"cy", intrinsics.cy}, {"width", intrinsics.width},
                     {"height", intrinsics.height}};
  j["rng_seed"] = rng_seed;
  j["floor_base"] = floor_base;
  j["floor_contrast"] = floor_contrast;
  j["reflect_attenuation"] = reflect_attenuation;
  j["annotated_frames"] = annotated_frames;
  j["obstacles"] = json::array();
  for (const auto& o : obstacles)
    j["obstacles"].push_back({{"center", {o.center.x(), o.center.y()}},
                              {"size", {o.size.x(), o.size.y()}},
                              {"height", o.height},
                              {"color", {o.color[0], o.color[1], o.color[2]}}});
  j["reflectors"] = json::array();
  for (const auto& r : reflectors)
    j["reflectors"].push_back({{"base_a", {r.base_a.x(), r.base_a.y()}},
                               {"base_b", {r.base_b.x(), r.base_b.y()}},
                               {"height", r.height},
                               {"color", {r.color[0], r.color[1], r.color[2]}},
                               {"draw_real", r.draw_real}});
  j["trajectory"] = json::array();
  for (const auto& p : trajectory)
    j["trajectory"].push_back({{"frame_id", p.frame_id}, {"timestamp_s", p.timestamp_s},
                               {"x_m", p.x_m}, {"y_m", p.y_m}, {"theta_rad", p.theta_rad}});
  return j.dump(2);
}

SceneSpec SceneSpec::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedRow, std::string("scene spec: ") + e.what());
  }
  SceneSpec s;
  s.camera_height = j.value("camera_height", 0.6);
  if (j.contains("intrinsics")) {
    const json& k = j["intrinsics"];
    s.intrinsics = CameraIntrinsics(k.at("fx"), k.at("fy"), k.at("cx"), k.at("cy"),
                                    k.at("width"), k.at("height"));
  }
  s.rng_seed = j.value("rng_seed", 1ull);
  s.floor_base = j.value("floor_base", s.floor_base);
  s.floor_contrast = j.value("floor_contrast", s.floor_contrast);
  s.reflect_attenuation = j.value("reflect_attenuation", s.reflect_attenuation);
  if (j.contains("annotated_frames"))
    s.annotated_frames = j["annotated_frames"].get<std::vector<int>>();
  for (const auto& jo : j.value("obstacles", json::array())) {
    ObstacleSpec o;
    o.center = Eigen::Vector2d(jo.at("center").at(0).get<double>(),
                               jo.at("center").at(1).get<double>());
    o.size = Eigen::Vector2d(jo.at("size").at(0).get<double>(),
                             jo.at("size").at(1).get<double>());
    o.height = jo.at("height");
    if (o.height <= 0) fail(ErrorCode::kInvalidArgument, "obstacle height must be positive");
    for (int c = 0; c < 3; ++c) o.color[c] = jo.at("color").at(c).get<uint8_t>();
    s.obstacles.push_back(o);
  }
  for (const auto& jr : j.value("reflectors", json::array())) {
    ReflectorSpec r;
    r.base_a = Eigen::Vector2d(jr.at("base_a").at(0).get<double>(),
                               jr.at("base_a").at(1).get<double>());
    r.base_b = Eigen::Vector2d(jr.at("base_b").at(0).get<double>(),
                               jr.at("base_b").at(1).get<double>());
    r.height = jr.at("height");
    for (int c = 0; c < 3; ++c) r.color[c] = jr.at("color").at(c).get<uint8_t>();
    r.draw_real = jr.value("draw_real", true);
    s.reflectors.push_back(r);
  }
  for (const auto& jp : j.value("trajectory", json::array())) {
    OdoPose p;
    p.frame_id = jp.at("frame_id");
    p.timestamp_s = jp.at("timestamp_s");
    p.x_m = jp.at("x_m");
    p.y_m = jp.at("y_m");
    p.theta_rad = jp.at("theta_rad");
    s.trajectory.push_back(p);
  }
  return s;
}

}  // namespace rgo
