#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "v2xkit/geometry.hpp"
#include "v2xkit/viewgraph.hpp"

namespace v2xkit {

// Serialization is byte-stable: fixed key order, 2-space indent, a trailing
// newline, and shortest round-trip decimals for floats. Binary rasters are
// little-endian regardless of host. All writers go through a temp file in
// the target directory followed by a rename.

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& bytes);
std::string read_file(const std::filesystem::path& path);  // ParseError

std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);  // ParseError on bad input

void save_scene(const std::filesystem::path& path, const Scene& scene);
Scene load_scene(const std::filesystem::path& path);

std::string graph_to_json(const ViewGraph& graph);
ViewGraph graph_from_json(const std::string& text);

void save_graph(const std::filesystem::path& path, const ViewGraph& graph);
ViewGraph load_graph(const std::filesystem::path& path);

// Class raster: <path> gets u16 little-endian row-major cells and
// <path without extension>.json gets {"width", "height", "dtype": "u16le"}.
void save_mask(const std::filesystem::path& bin_path, const FpvMask& mask);
FpvMask load_mask(const std::filesystem::path& bin_path);

void save_bev(const std::filesystem::path& bin_path, const BevGrid& grid);

// 8-bit PGM (P5) preview; requires every cell value <= 255.
void save_mask_pgm(const std::filesystem::path& path, const FpvMask& mask);

// Float matrix: f32 little-endian row-major plus {"rows", "cols"} sidecar;
// a non-empty name goes first in the sidecar so weight files self-describe.
void save_matrix(const std::filesystem::path& bin_path,
                 const Eigen::MatrixXd& m, const std::string& name = "");
Eigen::MatrixXd load_matrix(const std::filesystem::path& bin_path);

}  // namespace v2xkit
