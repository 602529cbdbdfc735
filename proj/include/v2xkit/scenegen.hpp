#pragma once

#include <cstdint>

#include "v2xkit/geometry.hpp"

namespace v2xkit {

// Knobs for the synthetic scene generator. Agent and object positions are
// sampled uniformly over [-extent, extent]^2 on the ground plane.
struct SceneConfig {
  std::uint64_t seed = 0;
  int num_agents = 2;
  int cameras_per_agent = 4;
  int num_objects = 0;
  double shared_ratio = 0.0;   // fraction of objects observed by >1 agent
  double extent = 50.0;        // metres, half-width of the sampled square
  double fov_degrees = 100.0;  // horizontal field of view of every camera
  double camera_height = 1.6;  // metres above the ground
};

struct SceneEdit {
  enum class Kind { kRemoveShared, kMoveShared, kInsertShared };
  Kind kind = Kind::kRemoveShared;
  int object_id = 0;                                  // remove / move
  Eigen::Vector3d new_center = Eigen::Vector3d::Zero();  // move / insert
  ObjectClass class_label = ObjectClass::kCar;        // insert
};

// Nominal full extents (length, width, height) per class; generated objects
// jitter each dimension by up to +-10%.
Eigen::Vector3d nominal_size(ObjectClass c);

// Deterministic scene synthesis: same config, byte-identical scene.
//
// All randomness flows through one SplitMix64 stream seeded with cfg.seed, in
// a fixed draw order: per agent x, y, yaw; then per object class, three size
// jitters, yaw, then position draws (x, y pairs until placement succeeds).
// Agents carry ring rigs: cameras_per_agent evenly spaced headings starting
// at the agent yaw, shared intrinsics derived from fov_degrees at the native
// 480x272 raster, mounted at camera_height with zero pitch and roll.
//
// ceil(shared_ratio * num_objects) objects (the lowest ids, starting at 1)
// are placed by rejection sampling until the position lands inside the
// ground footprints of at least two agents (a footprint of an agent is the
// union over its cameras, truncated at extent); their observers are every
// agent whose footprint contains the point. Remaining objects take a single
// observer: the smallest agent id whose footprint contains them, or the
// nearest agent when none does. Throws InfeasibleSharedRatio when a shared
// placement fails 1000 attempts, InvalidConfig on out-of-range settings.
Scene generate_scene(const SceneConfig& cfg);

// Pure edit application; the input scene is untouched.
// - remove: drops the object (UnknownObject when absent).
// - move: re-centers the object (OutOfExtent when |x| or |y| > extent) and
//   recomputes observers as every agent with a camera that sees a corner of
//   the box (depth > 1e-6, inside the native raster); when no agent sees it,
//   the nearest agent keeps the annotation non-empty.
// - insert: appends a fresh object with id max+1, the nominal class size,
//   yaw 0, observers recomputed the same way.
Scene apply_edit(const Scene& scene, const SceneEdit& edit,
                 double extent = 50.0);

// Fraction of objects with more than one observer.
// Throws EmptyScene when the scene has no objects.
double shared_ratio(const Scene& scene);

}  // namespace v2xkit
