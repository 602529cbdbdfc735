#include "v2xkit/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "v2xkit/rng.hpp"
#include "v2xkit/viewgraph.hpp"

namespace v2xkit {

Eigen::Vector3d nominal_size(ObjectClass c) {
  switch (c) {
    case ObjectClass::kCar: return {4.5, 1.9, 1.6};
    case ObjectClass::kVan: return {5.0, 2.0, 2.2};
    case ObjectClass::kBus: return {12.0, 2.9, 3.2};
    case ObjectClass::kTruck: return {8.5, 2.6, 3.0};
    case ObjectClass::kPedestrian: return {0.6, 0.6, 1.7};
  }
  throw UnknownClass("unknown class id " + std::to_string(static_cast<int>(c)));
}

namespace {

constexpr int kNativeWidth = 480;
constexpr int kNativeHeight = 272;
constexpr ObjectClass kPalette[5] = {
    ObjectClass::kCar, ObjectClass::kVan, ObjectClass::kBus,
    ObjectClass::kTruck, ObjectClass::kPedestrian};

// World-to-camera pose for a horizontal camera at `position` looking along
// `heading` (camera x right, y down, z forward).
CameraPose make_ring_camera(const Eigen::Vector3d& position, double heading,
                            double fov_degrees) {
  CameraPose cam;
  cam.image_width = kNativeWidth;
  cam.image_height = kNativeHeight;
  const double half_fov = 0.5 * fov_degrees * std::numbers::pi / 180.0;
  const double fx = (kNativeWidth / 2.0) / std::tan(half_fov);
  cam.K << fx, 0.0, kNativeWidth / 2.0,
           0.0, fx, kNativeHeight / 2.0,
           0.0, 0.0, 1.0;
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  cam.R << s, -c, 0.0,    // camera x: right of the heading
           0.0, 0.0, -1.0, // camera y: down
           c, s, 0.0;      // camera z: the heading itself
  cam.t = -(cam.R * position);
  return cam;
}

// Footprint union of one agent's cameras, evaluated lazily as a containment
// predicate.
struct AgentFootprints {
  int agent_id;
  double ground_x;
  double ground_y;
  std::vector<FootprintPolygon> polys;

  bool contains(const Eigen::Vector2d& p) const {
    for (const FootprintPolygon& poly : polys)
      if (point_in_convex_polygon(poly, p)) return true;
    return false;
  }
};

std::vector<int> observers_by_visibility(const Scene& scene,
                                         const SceneObject& obj) {
  std::vector<int> out;
  for (const Agent& agent : scene.agents) {
    bool seen = false;
    for (const CameraPose& cam : agent.cameras) {
      for (const Eigen::Vector3d& corner : box_corners(obj)) {
        const Eigen::Vector3d x = cam.K * (cam.R * corner + cam.t);
        if (x.z() <= kDepthEpsilon) continue;
        const double u = x.x() / x.z();
        const double v = x.y() / x.z();
        if (u >= 0.0 && u < cam.image_width && v >= 0.0 &&
            v < cam.image_height) {
          seen = true;
          break;
        }
      }
      if (seen) break;
    }
    if (seen) out.push_back(agent.id);
  }
  return out;
}

int nearest_agent(const Scene& scene, const Eigen::Vector3d& center) {
  int best = scene.agents.front().id;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (const Agent& agent : scene.agents) {
    const double dx = agent.pose.x - center.x();
    const double dy = agent.pose.y - center.y();
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = agent.id;
    }
  }
  return best;
}

}  // namespace

Scene generate_scene(const SceneConfig& cfg) {
  if (cfg.num_agents < 1) throw InvalidConfig("num_agents must be >= 1");
  if (cfg.cameras_per_agent < 1)
    throw InvalidConfig("cameras_per_agent must be >= 1");
  if (cfg.num_objects < 0) throw InvalidConfig("num_objects must be >= 0");
  if (!(cfg.shared_ratio >= 0.0 && cfg.shared_ratio <= 1.0))
    throw InvalidConfig("shared_ratio must lie in [0, 1]");
  if (!(cfg.extent > 0.0)) throw InvalidConfig("extent must be positive");
  if (!(cfg.fov_degrees > 0.0 && cfg.fov_degrees < 180.0))
    throw InvalidConfig("fov_degrees must lie in (0, 180)");
  if (!(cfg.camera_height > 0.0))
    throw InvalidConfig("camera_height must be positive");

  SplitMix64 rng(cfg.seed);
  Scene scene;
  scene.globals = {{"time", "day"}, {"weather", "clear"}};

  const double tau = 2.0 * std::numbers::pi;
  for (int i = 0; i < cfg.num_agents; ++i) {
    Agent agent;
    agent.id = i;
    agent.pose.x = rng.uniform(-cfg.extent, cfg.extent);
    agent.pose.y = rng.uniform(-cfg.extent, cfg.extent);
    agent.pose.z = 0.0;
    agent.pose.yaw = rng.uniform(0.0, tau);
    const Eigen::Vector3d mount(agent.pose.x, agent.pose.y, cfg.camera_height);
    for (int m = 0; m < cfg.cameras_per_agent; ++m) {
      const double heading = agent.pose.yaw + tau * m / cfg.cameras_per_agent;
      agent.cameras.push_back(make_ring_camera(mount, heading, cfg.fov_degrees));
    }
    scene.agents.push_back(std::move(agent));
  }

  std::vector<AgentFootprints> footprints;
  for (const Agent& agent : scene.agents) {
    AgentFootprints fp;
    fp.agent_id = agent.id;
    fp.ground_x = agent.pose.x;
    fp.ground_y = agent.pose.y;
    for (const CameraPose& cam : agent.cameras)
      fp.polys.push_back(frustum_footprint(cam, cfg.extent));
    footprints.push_back(std::move(fp));
  }

  const int num_shared = static_cast<int>(
      std::ceil(cfg.shared_ratio * static_cast<double>(cfg.num_objects)));

  for (int n = 0; n < cfg.num_objects; ++n) {
    SceneObject obj;
    obj.id = n + 1;
    obj.class_label = kPalette[rng.next_below(5)];
    const Eigen::Vector3d nominal = nominal_size(obj.class_label);
    // Sequenced separately: argument evaluation order would leave the draw
    // order up to the compiler.
    const double jx = rng.uniform(0.9, 1.1);
    const double jy = rng.uniform(0.9, 1.1);
    const double jz = rng.uniform(0.9, 1.1);
    obj.size =
        Eigen::Vector3d(nominal.x() * jx, nominal.y() * jy, nominal.z() * jz);
    obj.yaw = rng.uniform(0.0, tau);

    const bool shared = n < num_shared;
    Eigen::Vector2d pos;
    if (shared) {
      bool placed = false;
      for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
        pos.x() = rng.uniform(-cfg.extent, cfg.extent);
        pos.y() = rng.uniform(-cfg.extent, cfg.extent);
        int covering = 0;
        for (const AgentFootprints& fp : footprints)
          if (fp.contains(pos)) ++covering;
        placed = covering >= 2;
      }
      if (!placed)
        throw InfeasibleSharedRatio(
            "no multi-agent footprint position found in 1000 attempts for "
            "object " + std::to_string(obj.id));
      for (const AgentFootprints& fp : footprints)
        if (fp.contains(pos)) obj.observers.push_back(fp.agent_id);
    } else {
      pos.x() = rng.uniform(-cfg.extent, cfg.extent);
      pos.y() = rng.uniform(-cfg.extent, cfg.extent);
      int owner = -1;
      for (const AgentFootprints& fp : footprints) {
        if (fp.contains(pos)) {
          owner = fp.agent_id;
          break;
        }
      }
      if (owner < 0) {
        double best_d2 = std::numeric_limits<double>::infinity();
        for (const AgentFootprints& fp : footprints) {
          const double dx = fp.ground_x - pos.x();
          const double dy = fp.ground_y - pos.y();
          const double d2 = dx * dx + dy * dy;
          if (d2 < best_d2) {
            best_d2 = d2;
            owner = fp.agent_id;
          }
        }
      }
      obj.observers.push_back(owner);
    }
    obj.center = Eigen::Vector3d(pos.x(), pos.y(), obj.size.z() / 2.0);
    scene.objects.push_back(std::move(obj));
  }

  return scene;
}

Scene apply_edit(const Scene& scene, const SceneEdit& edit, double extent) {
  Scene out = scene;
  switch (edit.kind) {
    case SceneEdit::Kind::kRemoveShared: {
      const auto it = std::find_if(out.objects.begin(), out.objects.end(),
                                   [&](const SceneObject& o) {
                                     return o.id == edit.object_id;
                                   });
      if (it == out.objects.end())
        throw UnknownObject("no object with id " +
                            std::to_string(edit.object_id));
      out.objects.erase(it);
      return out;
    }
    case SceneEdit::Kind::kMoveShared: {
      const auto it = std::find_if(out.objects.begin(), out.objects.end(),
                                   [&](const SceneObject& o) {
                                     return o.id == edit.object_id;
                                   });
      if (it == out.objects.end())
        throw UnknownObject("no object with id " +
                            std::to_string(edit.object_id));
      if (std::abs(edit.new_center.x()) > extent ||
          std::abs(edit.new_center.y()) > extent)
        throw OutOfExtent("moved center leaves the scene extent");
      it->center = edit.new_center;
      std::vector<int> seen = observers_by_visibility(out, *it);
      if (seen.empty() && !out.agents.empty())
        seen.push_back(nearest_agent(out, it->center));
      it->observers = std::move(seen);
      return out;
    }
    case SceneEdit::Kind::kInsertShared: {
      if (std::abs(edit.new_center.x()) > extent ||
          std::abs(edit.new_center.y()) > extent)
        throw OutOfExtent("inserted center leaves the scene extent");
      SceneObject obj;
      obj.id = 1;
      for (const SceneObject& existing : out.objects)
        obj.id = std::max(obj.id, existing.id + 1);
      obj.center = edit.new_center;
      obj.size = nominal_size(edit.class_label);
      obj.yaw = 0.0;
      obj.class_label = edit.class_label;
      std::vector<int> seen = observers_by_visibility(out, obj);
      if (seen.empty() && !out.agents.empty())
        seen.push_back(nearest_agent(out, obj.center));
      obj.observers = std::move(seen);
      out.objects.push_back(std::move(obj));
      return out;
    }
  }
  throw Error("unknown edit kind");
}

double shared_ratio(const Scene& scene) {
  if (scene.objects.empty()) throw EmptyScene("scene has no objects");
  int shared = 0;
  for (const SceneObject& obj : scene.objects)
    if (obj.observers.size() > 1) ++shared;
  return static_cast<double>(shared) / static_cast<double>(scene.objects.size());
}

}  // namespace v2xkit
