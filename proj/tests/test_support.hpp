#pragma once

// Shared generators for the test binaries. Everything is seeded explicitly so
// failures reproduce; the library's own generator is deliberately not used
// here.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "v2xkit/geometry.hpp"

namespace testsupport {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Eigen::Vector3d random_vec3(std::mt19937_64& rng, double lo, double hi) {
  return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  Eigen::Vector3d axis = random_vec3(rng, -1.0, 1.0);
  while (axis.norm() < 1e-3) axis = random_vec3(rng, -1.0, 1.0);
  axis.normalize();
  const double angle = uniform(rng, 0.0, 2.0 * M_PI);
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

inline v2xkit::CameraPose random_camera(std::mt19937_64& rng) {
  v2xkit::CameraPose cam;
  const double fx = uniform(rng, 100.0, 800.0);
  const double fy = uniform(rng, 100.0, 800.0);
  cam.K << fx, 0.0, uniform(rng, 100.0, 400.0),
           0.0, fy, uniform(rng, 50.0, 200.0),
           0.0, 0.0, 1.0;
  cam.R = random_rotation(rng);
  cam.t = random_vec3(rng, -10.0, 10.0);
  cam.image_width = 480;
  cam.image_height = 272;
  return cam;
}

// Horizontal camera at `position` looking along `heading`, 90 degree fov by
// default. Matches the rig convention: x right, y down, z forward.
inline v2xkit::CameraPose horizontal_camera(const Eigen::Vector3d& position,
                                            double heading,
                                            double fov_degrees = 90.0,
                                            int width = 480, int height = 272) {
  v2xkit::CameraPose cam;
  cam.image_width = width;
  cam.image_height = height;
  const double fx = (width / 2.0) / std::tan(fov_degrees * M_PI / 360.0);
  cam.K << fx, 0.0, width / 2.0, 0.0, fx, height / 2.0, 0.0, 0.0, 1.0;
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  cam.R << s, -c, 0.0, 0.0, 0.0, -1.0, c, s, 0.0;
  cam.t = -(cam.R * position);
  return cam;
}

inline v2xkit::SceneObject make_object(int id, const Eigen::Vector3d& center,
                                       const Eigen::Vector3d& size, double yaw,
                                       v2xkit::ObjectClass cls,
                                       std::vector<int> observers = {0}) {
  v2xkit::SceneObject obj;
  obj.id = id;
  obj.center = center;
  obj.size = size;
  obj.yaw = yaw;
  obj.class_label = cls;
  obj.observers = std::move(observers);
  return obj;
}

// Box placed in front of a camera-friendly region, spread over [-40, 40]^2
// and kept a few metres away from the origin cluster of test cameras.
inline v2xkit::SceneObject random_object(std::mt19937_64& rng, int id) {
  const v2xkit::ObjectClass classes[5] = {
      v2xkit::ObjectClass::kCar, v2xkit::ObjectClass::kVan,
      v2xkit::ObjectClass::kBus, v2xkit::ObjectClass::kTruck,
      v2xkit::ObjectClass::kPedestrian};
  const Eigen::Vector3d size(uniform(rng, 0.5, 6.0), uniform(rng, 0.5, 3.0),
                             uniform(rng, 0.5, 3.5));
  double x = uniform(rng, -40.0, 40.0);
  double y = uniform(rng, -40.0, 40.0);
  while (x * x + y * y < 25.0) {
    x = uniform(rng, -40.0, 40.0);
    y = uniform(rng, -40.0, 40.0);
  }
  return make_object(id, {x, y, size.z() / 2.0}, size,
                     uniform(rng, 0.0, 2.0 * M_PI),
                     classes[uniform_int(rng, 0, 4)]);
}

}  // namespace testsupport
