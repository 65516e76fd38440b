#include "rgo/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rgo/png_io.hpp"

namespace rgo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kMissingFile, "missing file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoFailure, "cannot write " + path);
  out << text;
}

json parse_json_file(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedRow, path + ": " + e.what());
  }
}

double parse_double(const std::string& s, const std::string& path, int line) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::kMalformedRow,
         path + ":" + std::to_string(line) + ": non-numeric field '" + s + "'");
  }
}

Eigen::Matrix3d json_to_mat3(const json& j) {
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = j.at(r).at(c).get<double>();
  return m;
}

json mat3_to_json(const Eigen::Matrix3d& m) {
  json j = json::array();
  for (int r = 0; r < 3; ++r) j.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return j;
}

}  // namespace

Extrinsics default_extrinsics(double height) {
  Extrinsics ext;
  // Camera looks along the robot's +x axis: camera x = -y_r (right),
  // camera y = -z_r (down), camera z = +x_r (forward).
  ext.r << 0, -1, 0, 0, 0, -1, 1, 0, 0;
  ext.t = Eigen::Vector3d(0, height, 0);  // = -r * (0, 0, height)
  return ext;
}

Pose lift_pose(const OdoPose& odo, const Extrinsics& ext) {
  double c = std::cos(odo.theta_rad), s = std::sin(odo.theta_rad);
  Eigen::Matrix3d r_wr;  // robot frame axes expressed in world coordinates
  r_wr << c, -s, 0, s, c, 0, 0, 0, 1;
  Eigen::Vector3d c_robot(odo.x_m, odo.y_m, 0.0);
  Eigen::Matrix3d r = ext.r * r_wr.transpose();
  Eigen::Vector3d center = c_robot - r_wr * (ext.r.transpose() * ext.t);
  return Pose(r, center);
}

std::string frame_image_path(const std::string& dir, int frame_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d.png", frame_id);
  return dir + "/frames/" + buf;
}

std::string frame_label_path(const std::string& dir, int frame_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "label_%06d.png", frame_id);
  return dir + "/labels/" + buf;
}

void write_poses_csv(const std::string& path, const std::vector<OdoPose>& poses) {
  std::ostringstream ss;
  ss << "frame_id,timestamp_s,x_m,y_m,theta_rad\n";
  ss.precision(17);
  for (const auto& p : poses)
    ss << p.frame_id << "," << p.timestamp_s << "," << p.x_m << "," << p.y_m << ","
       << p.theta_rad << "\n";
  write_text(path, ss.str());
}

void write_intrinsics_json(const std::string& path, const CameraIntrinsics& k) {
  json j{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy},
         {"width", k.width}, {"height", k.height}};
  write_text(path, j.dump(2) + "\n");
}

void write_extrinsics_json(const std::string& path, const Extrinsics& ext) {
  json j{{"r", mat3_to_json(ext.r)}, {"t", {ext.t.x(), ext.t.y(), ext.t.z()}}};
  write_text(path, j.dump(2) + "\n");
}

void write_ground_json(const std::string& path, const GroundPlane& g) {
  json j{{"normal", {g.n.x(), g.n.y(), g.n.z()}}, {"height_m", g.d}};
  write_text(path, j.dump(2) + "\n");
}

SequenceRecord load_sequence(const std::string& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::kMissingFile, "not a sequence directory: " + dir);
  SequenceRecord rec;
  rec.dir = dir;

  std::string poses_path = dir + "/poses.csv";
  std::ifstream in(poses_path);
  if (!in) fail(ErrorCode::kMissingFile, "missing file: " + poses_path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "frame_id,timestamp_s,x_m,y_m,theta_rad")
        fail(ErrorCode::kMalformedRow, poses_path + ":1: unexpected header '" + line + "'");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5)
      fail(ErrorCode::kMalformedRow,
           poses_path + ":" + std::to_string(line_no) + ": expected 5 fields");
    OdoPose p;
    p.frame_id = static_cast<int>(parse_double(cells[0], poses_path, line_no));
    p.timestamp_s = parse_double(cells[1], poses_path, line_no);
    p.x_m = parse_double(cells[2], poses_path, line_no);
    p.y_m = parse_double(cells[3], poses_path, line_no);
    p.theta_rad = parse_double(cells[4], poses_path, line_no);
    if (!rec.odometry.empty() && p.timestamp_s < rec.odometry.back().timestamp_s)
      fail(ErrorCode::kMalformedRow,
           poses_path + ":" + std::to_string(line_no) + ": timestamps not monotone");
    rec.odometry.push_back(p);
  }
  if (rec.odometry.empty()) fail(ErrorCode::kMalformedRow, poses_path + ": no pose rows");

  json jk = parse_json_file(dir + "/intrinsics.json");
  rec.intrinsics = CameraIntrinsics(jk.at("fx"), jk.at("fy"), jk.at("cx"), jk.at("cy"),
                                    jk.at("width"), jk.at("height"));

  json je = parse_json_file(dir + "/extrinsics.json");
  rec.extrinsics.r = json_to_mat3(je.at("r"));
  rec.extrinsics.t = Eigen::Vector3d(je.at("t").at(0), je.at("t").at(1), je.at("t").at(2));

  if (fs::exists(dir + "/ground.json")) {
    json jg = parse_json_file(dir + "/ground.json");
    rec.ground = GroundPlane(Eigen::Vector3d(jg.at("normal").at(0), jg.at("normal").at(1),
                                             jg.at("normal").at(2)),
                             jg.at("height_m"));
  } else {
    // Default: z-up floor at the camera height implied by the extrinsics.
    double h = (-rec.extrinsics.r.transpose() * rec.extrinsics.t).z();
    rec.ground = GroundPlane(Eigen::Vector3d::UnitZ(), h > 0 ? h : 1.0);
  }

  for (const auto& p : rec.odometry) {
    std::string img = frame_image_path(dir, p.frame_id);
    if (!fs::exists(img)) fail(ErrorCode::kCountMismatch, "pose row without frame image: " + img);
    rec.frame_paths.push_back(img);
    rec.camera_poses.push_back(lift_pose(p, rec.extrinsics));
    std::string lbl = frame_label_path(dir, p.frame_id);
    if (fs::exists(lbl))
      rec.label_paths.push_back(lbl);
    else
      rec.label_paths.push_back(std::nullopt);
  }
  return rec;
}

LabelImage load_labels(const SequenceRecord& record, int t) {
  if (!record.annotated(t)) fail(ErrorCode::kMissingFile, "frame has no labels");
  return read_png_label(*record.label_paths[t]);
}

int select_frame_interval(const SequenceRecord& record, int t, double distance_threshold_m) {
  if (t < 1 || t >= static_cast<int>(record.camera_poses.size()))
    fail(ErrorCode::kInvalidArgument, "frame index out of range");
  for (int q = 1; q <= t; ++q) {
    double d = (record.camera_poses[t].c - record.camera_poses[t - q].c).norm();
    if (d > distance_threshold_m) return q;
  }
  fail(ErrorCode::kInsufficientMotion,
       "no earlier frame farther than " + std::to_string(distance_threshold_m) + " m");
}

// ------------------------------------------------------------------- config

std::string PipelineConfig::to_json() const {
  json j;
  j["tau_e"] = tau_e;
  j["tau_gc"] = tau_gc;
  j["tau_b"] = tau_b;
  j["n_trees"] = n_trees;
  j["distance_threshold_m"] = distance_threshold_m;
  j["flow"] = {{"levels", flow.levels}, {"window", flow.window},
               {"max_iters", flow.max_iters}, {"eps", flow.eps}, {"min_eig", flow.min_eig}};
  j["grid"] = {{"scales", grid.scales}, {"aspect_ratios", grid.aspect_ratios},
               {"stride", grid.stride}, {"top_j", grid.top_j},
               {"area_exponent", grid.area_exponent}};
  j["seed"] = seed;
  j["gating"] = gating == GatingMode::kAppearanceOnLowConfidence ? "ar_on_low" : "agr_on_low";
  j["scoring"] = scoring == ScoringVariant::kAgfm
                     ? "agfm"
                     : (scoring == ScoringVariant::kAppearanceOnly ? "ar_only" : "agr_only");
  j["map_scheme"] = map_scheme == MapScheme::kWeightDecayed ? "weight_decayed" : "nms_legacy";
  j["forest"] = {{"max_depth", forest_max_depth}, {"min_leaf", forest_min_leaf},
                 {"bootstrap", forest_bootstrap}};
  j["motion_noise"] = {{"translation_lo", motion_noise.translation_lo},
                       {"translation_hi", motion_noise.translation_hi},
                       {"rotation_lo", motion_noise.rotation_lo},
                       {"rotation_hi", motion_noise.rotation_hi}};
  j["blur_kernel"] = blur_kernel;
  j["blur_angle_deg"] = blur_angle_deg;
  j["inject_edges_dir"] = inject_edges_dir;
  j["inject_proposals_dir"] = inject_proposals_dir;
  j["inject_flow_dir"] = inject_flow_dir;
  return j.dump(2);
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedRow, std::string("config: ") + e.what());
  }
  PipelineConfig c;
  c.tau_e = j.value("tau_e", c.tau_e);
  c.tau_gc = j.value("tau_gc", c.tau_gc);
  c.tau_b = j.value("tau_b", c.tau_b);
  c.n_trees = j.value("n_trees", c.n_trees);
  c.distance_threshold_m = j.value("distance_threshold_m", c.distance_threshold_m);
  if (j.contains("flow")) {
    const json& f = j["flow"];
    c.flow.levels = f.value("levels", c.flow.levels);
    c.flow.window = f.value("window", c.flow.window);
    c.flow.max_iters = f.value("max_iters", c.flow.max_iters);
    c.flow.eps = f.value("eps", c.flow.eps);
    c.flow.min_eig = f.value("min_eig", c.flow.min_eig);
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (g.contains("scales")) c.grid.scales = g["scales"].get<std::vector<int>>();
    if (g.contains("aspect_ratios"))
      c.grid.aspect_ratios = g["aspect_ratios"].get<std::vector<double>>();
    c.grid.stride = g.value("stride", c.grid.stride);
    c.grid.top_j = g.value("top_j", c.grid.top_j);
    c.grid.area_exponent = g.value("area_exponent", c.grid.area_exponent);
  }
  c.seed = j.value("seed", c.seed);
  std::string gating = j.value("gating", "ar_on_low");
  c.gating = gating == "agr_on_low" ? GatingMode::kGeometryOnLowConfidence
                                    : GatingMode::kAppearanceOnLowConfidence;
  std::string scoring = j.value("scoring", "agfm");
  c.scoring = scoring == "ar_only" ? ScoringVariant::kAppearanceOnly
              : scoring == "agr_only" ? ScoringVariant::kGeometryOnly
                                      : ScoringVariant::kAgfm;
  std::string scheme = j.value("map_scheme", "weight_decayed");
  c.map_scheme = scheme == "nms_legacy" ? MapScheme::kNmsLegacy : MapScheme::kWeightDecayed;
  if (j.contains("forest")) {
    const json& f = j["forest"];
    c.forest_max_depth = f.value("max_depth", c.forest_max_depth);
    c.forest_min_leaf = f.value("min_leaf", c.forest_min_leaf);
    c.forest_bootstrap = f.value("bootstrap", c.forest_bootstrap);
  }
  if (j.contains("motion_noise")) {
    const json& m = j["motion_noise"];
    c.motion_noise.translation_lo = m.value("translation_lo", 0.0);
    c.motion_noise.translation_hi = m.value("translation_hi", 0.0);
    c.motion_noise.rotation_lo = m.value("rotation_lo", 0.0);
    c.motion_noise.rotation_hi = m.value("rotation_hi", 0.0);
  }
  c.blur_kernel = j.value("blur_kernel", 0);
  c.blur_angle_deg = j.value("blur_angle_deg", 1e9);
  c.inject_edges_dir = j.value("inject_edges_dir", "");
  c.inject_proposals_dir = j.value("inject_proposals_dir", "");
  c.inject_flow_dir = j.value("inject_flow_dir", "");
  return c;
}

std::string PipelineConfig::hash() const { return hex64(fnv1a64(to_json())); }

}  // namespace rgo
