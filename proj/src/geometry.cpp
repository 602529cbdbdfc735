#include "v2xkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace v2xkit {

const char* to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::kCar: return "car";
    case ObjectClass::kVan: return "van";
    case ObjectClass::kBus: return "bus";
    case ObjectClass::kTruck: return "truck";
    case ObjectClass::kPedestrian: return "pedestrian";
  }
  throw UnknownClass("unknown class id " +
                     std::to_string(static_cast<int>(c)));
}

ObjectClass object_class_from_string(const std::string& name) {
  if (name == "car") return ObjectClass::kCar;
  if (name == "van") return ObjectClass::kVan;
  if (name == "bus") return ObjectClass::kBus;
  if (name == "truck") return ObjectClass::kTruck;
  if (name == "pedestrian") return ObjectClass::kPedestrian;
  throw UnknownClass("unknown class \"" + name + "\"");
}

void validate_camera(const CameraPose& cam) {
  if (cam.image_width <= 0 || cam.image_height <= 0)
    throw Error("camera image size must be positive");
  if (!(cam.K(0, 0) > 0.0) || !(cam.K(1, 1) > 0.0))
    throw Error("camera focal lengths must be positive");
  if (cam.K(2, 0) != 0.0 || cam.K(2, 1) != 0.0 || cam.K(2, 2) != 1.0)
    throw Error("camera K bottom row must be (0, 0, 1)");
  const Eigen::Matrix3d gram = cam.R * cam.R.transpose();
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9)
    throw Error("camera R is not orthonormal");
  if (std::abs(cam.R.determinant() - 1.0) > 1e-9)
    throw Error("camera R must have determinant +1");
}

void validate_object(const SceneObject& obj) {
  if (!(obj.size.minCoeff() > 0.0))
    throw Error("object sizes must be positive");
  if (obj.observers.empty()) throw Error("object observers must be non-empty");
  for (std::size_t i = 1; i < obj.observers.size(); ++i)
    if (obj.observers[i - 1] >= obj.observers[i])
      throw Error("object observers must be sorted and unique");
}

void validate_scene(const Scene& scene) {
  std::set<int> agent_ids;
  for (std::size_t i = 0; i < scene.agents.size(); ++i) {
    const Agent& a = scene.agents[i];
    if (i > 0 && scene.agents[i - 1].id >= a.id)
      throw Error("agents must be listed in increasing id order");
    agent_ids.insert(a.id);
    for (const CameraPose& cam : a.cameras) validate_camera(cam);
  }
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const SceneObject& o = scene.objects[i];
    if (i > 0 && scene.objects[i - 1].id >= o.id)
      throw Error("objects must be listed in increasing id order");
    validate_object(o);
    for (int agent : o.observers)
      if (!agent_ids.count(agent))
        throw Error("object observer references unknown agent id " +
                    std::to_string(agent));
  }
}

Eigen::Vector3d camera_position(const CameraPose& cam) {
  return -(cam.R.transpose() * cam.t);
}

std::array<Eigen::Vector3d, 8> box_corners(const SceneObject& obj) {
  // Bottom face CCW from (-x, -y), then the top face in the same order.
  static constexpr double kSigns[8][3] = {
      {-1, -1, -1}, {+1, -1, -1}, {+1, +1, -1}, {-1, +1, -1},
      {-1, -1, +1}, {+1, -1, +1}, {+1, +1, +1}, {-1, +1, +1},
  };
  const double c = std::cos(obj.yaw);
  const double s = std::sin(obj.yaw);
  Eigen::Matrix3d rz;
  rz << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  const Eigen::Vector3d half = 0.5 * obj.size;
  std::array<Eigen::Vector3d, 8> out;
  for (int i = 0; i < 8; ++i) {
    const Eigen::Vector3d local(kSigns[i][0] * half.x(), kSigns[i][1] * half.y(),
                                kSigns[i][2] * half.z());
    out[i] = rz * local + obj.center;
  }
  return out;
}

Projection project_point(const CameraPose& cam, const Eigen::Vector3d& point) {
  const Eigen::Vector3d x = cam.K * (cam.R * point + cam.t);
  if (std::abs(x.z()) < kDepthNearZero)
    throw DepthNearZero("projected depth " + std::to_string(x.z()) +
                        " is below 1e-9");
  return Projection{x.x() / x.z(), x.y() / x.z(), x.z()};
}

namespace {

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a,
              const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

std::vector<Eigen::Vector2d> convex_hull_2d(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
              return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
            });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
                          return a.x() == b.x() && a.y() == b.y();
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Eigen::Vector2d> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

bool point_in_convex_polygon(const std::vector<Eigen::Vector2d>& poly,
                             const Eigen::Vector2d& p) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (cross2(poly[i], poly[(i + 1) % n], p) < 0.0) return false;
  }
  return true;
}

namespace {

// Painter's pass shared by the class-id and object-id rasters. value_of maps
// an object to the cell value it paints.
template <typename Cell, typename ValueFn>
void paint_hulls(std::vector<Cell>& cells, int out_w, int out_h,
                 const std::vector<SceneObject>& objects, const CameraPose& cam,
                 ValueFn value_of) {
  struct Entry {
    double center_depth;
    const SceneObject* obj;
  };
  std::vector<Entry> order;
  order.reserve(objects.size());
  for (const SceneObject& obj : objects) {
    const double depth = (cam.R * obj.center + cam.t).z();
    order.push_back(Entry{depth, &obj});
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const Entry& a, const Entry& b) {
                     return a.center_depth > b.center_depth;
                   });

  const double scale_x = static_cast<double>(out_w) / cam.image_width;
  const double scale_y = static_cast<double>(out_h) / cam.image_height;

  for (const Entry& entry : order) {
    std::vector<Eigen::Vector2d> front;
    for (const Eigen::Vector3d& corner : box_corners(*entry.obj)) {
      const Eigen::Vector3d x = cam.K * (cam.R * corner + cam.t);
      if (x.z() > kDepthEpsilon)
        front.emplace_back(x.x() / x.z() * scale_x, x.y() / x.z() * scale_y);
    }
    if (front.size() < 3) continue;
    const std::vector<Eigen::Vector2d> hull = convex_hull_2d(std::move(front));
    if (hull.size() < 3) continue;

    double min_x = hull[0].x(), max_x = hull[0].x();
    double min_y = hull[0].y(), max_y = hull[0].y();
    for (const Eigen::Vector2d& v : hull) {
      min_x = std::min(min_x, v.x());
      max_x = std::max(max_x, v.x());
      min_y = std::min(min_y, v.y());
      max_y = std::max(max_y, v.y());
    }
    const int px_lo = std::max(0, static_cast<int>(std::floor(min_x)) - 1);
    const int px_hi = std::min(out_w - 1, static_cast<int>(std::ceil(max_x)) + 1);
    const int py_lo = std::max(0, static_cast<int>(std::floor(min_y)) - 1);
    const int py_hi = std::min(out_h - 1, static_cast<int>(std::ceil(max_y)) + 1);

    const Cell value = value_of(*entry.obj);
    for (int py = py_lo; py <= py_hi; ++py) {
      for (int px = px_lo; px <= px_hi; ++px) {
        const Eigen::Vector2d center(px + 0.5, py + 0.5);
        if (point_in_convex_polygon(hull, center))
          cells[static_cast<std::size_t>(py) * out_w + px] = value;
      }
    }
  }
}

}  // namespace

FpvMask rasterize_fpv_mask(const std::vector<SceneObject>& objects,
                           const CameraPose& cam, int out_w, int out_h) {
  if (out_w <= 0 || out_h <= 0) throw Error("raster size must be positive");
  FpvMask mask;
  mask.width = out_w;
  mask.height = out_h;
  mask.cells.assign(static_cast<std::size_t>(out_w) * out_h, 0);
  paint_hulls(mask.cells, out_w, out_h, objects, cam,
              [](const SceneObject& o) {
                return static_cast<std::uint16_t>(o.class_label);
              });
  return mask;
}

IdMask rasterize_id_mask(const std::vector<SceneObject>& objects,
                         const CameraPose& cam, int out_w, int out_h) {
  if (out_w <= 0 || out_h <= 0) throw Error("raster size must be positive");
  for (const SceneObject& obj : objects)
    if (obj.id <= 0)
      throw Error("object ids must be positive in id rasters, got " +
                  std::to_string(obj.id));
  IdMask mask;
  mask.width = out_w;
  mask.height = out_h;
  mask.cells.assign(static_cast<std::size_t>(out_w) * out_h, 0);
  paint_hulls(mask.cells, out_w, out_h, objects, cam,
              [](const SceneObject& o) {
                return static_cast<std::int32_t>(o.id);
              });
  return mask;
}

FootprintPolygon frustum_footprint(const CameraPose& cam, double max_range) {
  if (!(max_range > 0.0)) throw Error("max_range must be positive");
  const Eigen::Vector3d pos = camera_position(cam);
  const Eigen::Vector3d fwd = cam.R.row(2);
  Eigen::Vector2d g(fwd.x(), fwd.y());
  const double gn = g.norm();
  if (gn < 1e-9)
    throw DegenerateFov("optical axis has no horizontal component");
  g /= gn;
  const Eigen::Vector2d right(g.y(), -g.x());

  const double fx = cam.K(0, 0);
  const double cx = cam.K(0, 2);
  const double tan_left = (0.0 - cx) / fx;
  const double tan_right = (cam.image_width - cx) / fx;
  if (!(tan_right > tan_left))
    throw DegenerateFov("horizontal field of view is not positive");

  const Eigen::Vector2d apex(pos.x(), pos.y());
  const Eigen::Vector2d far_center = apex + max_range * g;
  return FootprintPolygon{
      apex,
      far_center + max_range * tan_right * right,
      far_center + max_range * tan_left * right,
  };
}

namespace {

bool separated_on_axis(const FootprintPolygon& a, const FootprintPolygon& b,
                       const Eigen::Vector2d& axis) {
  double a_min = axis.dot(a[0]), a_max = a_min;
  for (const Eigen::Vector2d& v : a) {
    const double d = axis.dot(v);
    a_min = std::min(a_min, d);
    a_max = std::max(a_max, d);
  }
  double b_min = axis.dot(b[0]), b_max = b_min;
  for (const Eigen::Vector2d& v : b) {
    const double d = axis.dot(v);
    b_min = std::min(b_min, d);
    b_max = std::max(b_max, d);
  }
  // Touching intervals count as separated: overlap must have positive area.
  return a_max <= b_min || b_max <= a_min;
}

}  // namespace

bool footprints_overlap(const FootprintPolygon& a, const FootprintPolygon& b) {
  if (a.size() < 3 || b.size() < 3) return false;
  for (const FootprintPolygon* poly : {&a, &b}) {
    const std::size_t n = poly->size();
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector2d edge = (*poly)[(i + 1) % n] - (*poly)[i];
      const Eigen::Vector2d axis(-edge.y(), edge.x());
      if (separated_on_axis(a, b, axis)) return false;
    }
  }
  return true;
}

std::pair<int, int> bev_discretize(const BevGrid& grid, double x, double y) {
  const int u = static_cast<int>(std::floor((x - grid.x_min) / grid.resolution));
  const int v = static_cast<int>(std::floor((y - grid.y_min) / grid.resolution));
  if (u < 0 || v < 0 || u >= grid.width || v >= grid.height)
    throw OutOfRange("point (" + std::to_string(x) + ", " + std::to_string(y) +
                     ") is outside the grid extent");
  return {u, v};
}

BevGrid bev_render(BevGrid grid, const std::vector<SceneObject>& objects) {
  if (grid.width <= 0 || grid.height <= 0 || !(grid.resolution > 0.0))
    throw Error("grid shape and resolution must be positive");
  grid.cells.assign(static_cast<std::size_t>(grid.width) * grid.height, 0);

  std::vector<const SceneObject*> order;
  order.reserve(objects.size());
  for (const SceneObject& obj : objects) order.push_back(&obj);
  std::sort(order.begin(), order.end(),
            [](const SceneObject* a, const SceneObject* b) {
              return a->id < b->id;
            });

  for (const SceneObject* obj : order) {
    const auto corners = box_corners(*obj);
    // The bottom face is CCW viewed from above by the corner-order contract.
    std::vector<Eigen::Vector2d> poly;
    poly.reserve(4);
    for (int i = 0; i < 4; ++i)
      poly.emplace_back(corners[i].x(), corners[i].y());

    double min_x = poly[0].x(), max_x = poly[0].x();
    double min_y = poly[0].y(), max_y = poly[0].y();
    for (const Eigen::Vector2d& v : poly) {
      min_x = std::min(min_x, v.x());
      max_x = std::max(max_x, v.x());
      min_y = std::min(min_y, v.y());
      max_y = std::max(max_y, v.y());
    }
    const int u_lo = std::max(
        0, static_cast<int>(std::floor((min_x - grid.x_min) / grid.resolution)) - 1);
    const int u_hi = std::min(
        grid.width - 1,
        static_cast<int>(std::ceil((max_x - grid.x_min) / grid.resolution)) + 1);
    const int v_lo = std::max(
        0, static_cast<int>(std::floor((min_y - grid.y_min) / grid.resolution)) - 1);
    const int v_hi = std::min(
        grid.height - 1,
        static_cast<int>(std::ceil((max_y - grid.y_min) / grid.resolution)) + 1);

    const std::uint16_t value = static_cast<std::uint16_t>(obj->class_label);
    for (int v = v_lo; v <= v_hi; ++v) {
      for (int u = u_lo; u <= u_hi; ++u) {
        const Eigen::Vector2d center(grid.x_min + (u + 0.5) * grid.resolution,
                                     grid.y_min + (v + 0.5) * grid.resolution);
        if (point_in_convex_polygon(poly, center))
          grid.cells[static_cast<std::size_t>(v) * grid.width + u] = value;
      }
    }
  }
  return grid;
}

}  // namespace v2xkit
