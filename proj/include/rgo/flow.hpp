#pragma once

#include <vector>

#include "rgo/image.hpp"

namespace rgo {

struct FlowParams {
  int levels = 3;
  int window = 21;  // odd
  int max_iters = 30;
  double eps = 0.01;     // px, iteration stop
  double min_eig = 1e-6;  // on the mean structure tensor
};

struct TrackResult {
  PixelPoint point;
  bool converged = false;
};

// One occlusion-edge point tracked across the frame pair, with its
// forward-backward round trip.
struct TrackedPoint {
  PixelPoint x_t;      // observation in frame t
  PixelPoint a_prev;   // appearance correspondence in frame t-1
  PixelPoint x_back;   // backward re-track into frame t
  double fb_error = kInf;  // ||x_t - x_back||, +inf when either track fails
  bool track_ok = false;
};

// Iterative pyramidal Lucas-Kanade: for each point in `from`, the sub-pixel
// location in `to` minimizing the local SSD. `init` optionally supplies a
// per-point starting guess in `to` (e.g. a homography transfer); tracking
// still converges to the appearance optimum. Failure modes: the mean 2x2
// structure tensor is near-singular, the point leaves the image, or the
// finest level exhausts its iterations.
std::vector<TrackResult> track(const GrayImage& from, const GrayImage& to,
                               const std::vector<PixelPoint>& points, const FlowParams& params,
                               const std::vector<PixelPoint>* init = nullptr);

// Forward track t -> t-1 then backward t-1 -> t; fb_error is the round-trip
// gap at frame t.
std::vector<TrackedPoint> forward_backward(const std::vector<PixelPoint>& points,
                                           const GrayImage& img_t, const GrayImage& img_prev,
                                           const FlowParams& params,
                                           const std::vector<PixelPoint>* init = nullptr);

// Worst-case displacement reachable by one track() call under `params`
// (per-iteration steps are clamped to the window radius).
double max_displacement_bound(const FlowParams& params);

}  // namespace rgo
