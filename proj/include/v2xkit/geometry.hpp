#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "v2xkit/errors.hpp"

namespace v2xkit {

// Depth below which a projection is rejected as numerically meaningless.
inline constexpr double kDepthNearZero = 1e-9;
// Depth a corner must exceed to take part in rasterization or visibility.
inline constexpr double kDepthEpsilon = 1e-6;

// Pinhole camera. K is the intrinsic matrix, (R, t) map world points into the
// camera frame (x right, y down, z forward): p_cam = R * p_world + t.
// R must be orthonormal within 1e-9 with det +1, K(0,0) and K(1,1) positive,
// K(2,2) == 1. image_width/image_height describe the native sensor raster the
// intrinsics are expressed in.
struct CameraPose {
  Eigen::Matrix3d K = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  int image_width = 480;
  int image_height = 272;
};

enum class ObjectClass : std::uint16_t {
  kCar = 1,
  kVan = 2,
  kBus = 3,
  kTruck = 4,
  kPedestrian = 5,
};

const char* to_string(ObjectClass c);
ObjectClass object_class_from_string(const std::string& name);  // UnknownClass

// Oriented box on the ground plane. size holds full extents (sx, sy, sz),
// yaw rotates about the vertical axis. observers lists the agent ids that
// carry the object in their annotations; it is never empty and an object with
// more than one observer counts as jointly observed.
struct SceneObject {
  int id = 0;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Ones();
  double yaw = 0.0;
  ObjectClass class_label = ObjectClass::kCar;
  std::vector<int> observers;
};

struct AgentPose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;
};

struct Agent {
  int id = 0;
  AgentPose pose;
  std::vector<CameraPose> cameras;
};

struct Scene {
  std::vector<Agent> agents;
  std::vector<SceneObject> objects;
  std::map<std::string, std::string> globals;
};

// Class-id raster, row-major, cells[y * width + x]. 0 means background.
struct FpvMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> cells;
};

// Object-id raster with the same layout. 0 means background, so object ids
// must be positive wherever one of these is produced.
struct IdMask {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> cells;
};

// Top-down class-id raster. Cell (u, v) covers the ground square
// [x_min + u*resolution, x_min + (u+1)*resolution) x [y_min + v*resolution, ...)
// and is stored at cells[v * width + u].
struct BevGrid {
  int width = 200;
  int height = 200;
  double x_min = -50.0;
  double y_min = -50.0;
  double resolution = 0.5;
  std::vector<std::uint16_t> cells;
};

// Convex ground-plane polygon, vertices in counter-clockwise order.
using FootprintPolygon = std::vector<Eigen::Vector2d>;

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

// Throws Error subtypes when the stated invariants are violated.
void validate_camera(const CameraPose& cam);
void validate_object(const SceneObject& obj);
void validate_scene(const Scene& scene);

// Camera center in world coordinates, -R^T t.
Eigen::Vector3d camera_position(const CameraPose& cam);

// The 8 world-space corners of an oriented box. Order is fixed: bottom face
// counter-clockwise (viewed from above) starting at the (-sx/2, -sy/2)
// corner, then the top face in the same order. The mean of the 8 corners
// equals the box center exactly up to rounding.
std::array<Eigen::Vector3d, 8> box_corners(const SceneObject& obj);

// Pinhole projection [x1 x2 x3]^T = K (R p + t), u = x1/x3, v = x2/x3,
// depth = x3. Throws DepthNearZero when |x3| < 1e-9.
Projection project_point(const CameraPose& cam, const Eigen::Vector3d& point);

// Andrew monotone-chain hull, counter-clockwise, collinear points dropped.
// Fewer than 3 distinct non-collinear inputs give a hull of size < 3.
std::vector<Eigen::Vector2d> convex_hull_2d(std::vector<Eigen::Vector2d> points);

// True when p lies inside the convex CCW polygon or on its boundary.
bool point_in_convex_polygon(const std::vector<Eigen::Vector2d>& poly,
                             const Eigen::Vector2d& p);

// Approximate silhouette raster of each object's corner hull.
//
// Per object: corners with depth > 1e-6 are projected, scaled from the native
// sensor raster to out_w x out_h, and their 2D convex hull is filled with the
// object's class id. A pixel is covered when its center (x+0.5, y+0.5) lies
// inside the hull, boundary inclusive. Objects with fewer than 3 front
// corners, or whose hull is degenerate, draw nothing. Objects are painted in
// order of decreasing center depth so nearer objects overwrite farther ones;
// equal depths keep the input order.
FpvMask rasterize_fpv_mask(const std::vector<SceneObject>& objects,
                           const CameraPose& cam, int out_w, int out_h);

// Same painter's algorithm writing object ids instead of class ids.
// Every object id must be positive.
IdMask rasterize_id_mask(const std::vector<SceneObject>& objects,
                         const CameraPose& cam, int out_w, int out_h);

// Ground-plane wedge the camera can see, truncated at forward distance
// max_range: the triangle {apex, far-right, far-left} where apex is the
// camera position and the far edge spans the horizontal field of view taken
// from K and image_width. Counter-clockwise. Throws DegenerateFov when the
// optical axis has no horizontal component (|ground forward| < 1e-9) or the
// horizontal field of view is not positive.
FootprintPolygon frustum_footprint(const CameraPose& cam, double max_range);

// Positive-area intersection test via separating axes. Polygons that only
// touch along an edge or at a vertex do not overlap.
bool footprints_overlap(const FootprintPolygon& a, const FootprintPolygon& b);

// Cell indices u = floor((x - x_min) / resolution), v likewise for y.
// Throws OutOfRange when the point falls outside the grid extent.
std::pair<int, int> bev_discretize(const BevGrid& grid, double x, double y);

// Rasterizes each object's ground footprint (the 4 bottom corners) into the
// grid with its class id. A cell is covered when its center lies inside the
// footprint polygon, boundary inclusive. Objects are painted in increasing
// id order, so the higher id wins where footprints overlap. Footprints
// outside the extent are clipped.
BevGrid bev_render(BevGrid grid, const std::vector<SceneObject>& objects);

}  // namespace v2xkit
