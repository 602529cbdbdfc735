#include "v2xkit/io.hpp"

#include <cstring>
#include <fstream>

#include "json.hpp"

namespace v2xkit {

namespace {

using ordered_json = nlohmann::ordered_json;

std::filesystem::path sidecar_path(std::filesystem::path bin_path) {
  bin_path.replace_extension(".json");
  return bin_path;
}

void append_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void append_f32le(std::string& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  for (int shift = 0; shift < 32; shift += 8)
    out.push_back(static_cast<char>((bits >> shift) & 0xFF));
}

ordered_json parse_json(const std::string& text, const char* what) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw ParseError(std::string("malformed JSON in ") + what);
  return j;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& bytes) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

std::string scene_to_json(const Scene& scene) {
  ordered_json j;
  j["agents"] = ordered_json::array();
  for (const Agent& agent : scene.agents) {
    ordered_json a;
    a["id"] = agent.id;
    a["pose"] = {agent.pose.x, agent.pose.y, agent.pose.z, agent.pose.yaw};
    a["cameras"] = ordered_json::array();
    for (const CameraPose& cam : agent.cameras) {
      ordered_json c;
      c["K"] = ordered_json::array();
      c["R"] = ordered_json::array();
      for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 3; ++col) {
          c["K"].push_back(cam.K(r, col));
          c["R"].push_back(cam.R(r, col));
        }
      c["t"] = {cam.t.x(), cam.t.y(), cam.t.z()};
      c["width"] = cam.image_width;
      c["height"] = cam.image_height;
      a["cameras"].push_back(std::move(c));
    }
    j["agents"].push_back(std::move(a));
  }
  j["objects"] = ordered_json::array();
  for (const SceneObject& obj : scene.objects) {
    ordered_json o;
    o["id"] = obj.id;
    o["center"] = {obj.center.x(), obj.center.y(), obj.center.z()};
    o["size"] = {obj.size.x(), obj.size.y(), obj.size.z()};
    o["yaw"] = obj.yaw;
    o["class"] = to_string(obj.class_label);
    o["observers"] = obj.observers;
    j["objects"].push_back(std::move(o));
  }
  j["globals"] = ordered_json::object();
  for (const auto& [key, value] : scene.globals) j["globals"][key] = value;
  return j.dump(2) + "\n";
}

Scene scene_from_json(const std::string& text) {
  const ordered_json j = parse_json(text, "scene");
  try {
    Scene scene;
    for (const ordered_json& a : j.at("agents")) {
      Agent agent;
      agent.id = a.at("id").get<int>();
      const auto& pose = a.at("pose");
      agent.pose = AgentPose{pose.at(0), pose.at(1), pose.at(2), pose.at(3)};
      for (const ordered_json& c : a.at("cameras")) {
        CameraPose cam;
        for (int r = 0; r < 3; ++r)
          for (int col = 0; col < 3; ++col) {
            cam.K(r, col) = c.at("K").at(3 * r + col).get<double>();
            cam.R(r, col) = c.at("R").at(3 * r + col).get<double>();
          }
        for (int i = 0; i < 3; ++i) cam.t(i) = c.at("t").at(i).get<double>();
        cam.image_width = c.at("width").get<int>();
        cam.image_height = c.at("height").get<int>();
        agent.cameras.push_back(cam);
      }
      scene.agents.push_back(std::move(agent));
    }
    for (const ordered_json& o : j.at("objects")) {
      SceneObject obj;
      obj.id = o.at("id").get<int>();
      for (int i = 0; i < 3; ++i) {
        obj.center(i) = o.at("center").at(i).get<double>();
        obj.size(i) = o.at("size").at(i).get<double>();
      }
      obj.yaw = o.at("yaw").get<double>();
      obj.class_label = object_class_from_string(o.at("class").get<std::string>());
      obj.observers = o.at("observers").get<std::vector<int>>();
      scene.objects.push_back(std::move(obj));
    }
    if (j.contains("globals"))
      for (const auto& [key, value] : j.at("globals").items())
        scene.globals[key] = value.get<std::string>();
    return scene;
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("bad scene JSON: ") + e.what());
  }
}

void save_scene(const std::filesystem::path& path, const Scene& scene) {
  write_file_atomic(path, scene_to_json(scene));
}

Scene load_scene(const std::filesystem::path& path) {
  return scene_from_json(read_file(path));
}

std::string graph_to_json(const ViewGraph& graph) {
  ordered_json j;
  j["vertices"] = ordered_json::array();
  for (const ViewVertex& v : graph.vertices)
    j["vertices"].push_back(vertex_label(v));
  j["edges"] = ordered_json::array();
  for (const ViewEdge& e : graph.edges) {
    ordered_json edge;
    edge["u"] = vertex_label(e.u);
    edge["v"] = vertex_label(e.v);
    edge["kind"] = to_string(e.kind);
    j["edges"].push_back(std::move(edge));
  }
  return j.dump(2) + "\n";
}

ViewGraph graph_from_json(const std::string& text) {
  const ordered_json j = parse_json(text, "graph");
  try {
    ViewGraph graph;
    for (const ordered_json& v : j.at("vertices"))
      graph.vertices.push_back(vertex_from_label(v.get<std::string>()));
    for (const ordered_json& e : j.at("edges"))
      graph.edges.push_back(
          ViewEdge{vertex_from_label(e.at("u").get<std::string>()),
                   vertex_from_label(e.at("v").get<std::string>()),
                   edge_kind_from_string(e.at("kind").get<std::string>())});
    return graph;
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("bad graph JSON: ") + e.what());
  }
}

void save_graph(const std::filesystem::path& path, const ViewGraph& graph) {
  write_file_atomic(path, graph_to_json(graph));
}

ViewGraph load_graph(const std::filesystem::path& path) {
  return graph_from_json(read_file(path));
}

namespace {

void save_u16_raster(const std::filesystem::path& bin_path,
                     const std::vector<std::uint16_t>& cells, int width,
                     int height) {
  std::string bytes;
  bytes.reserve(cells.size() * 2);
  for (const std::uint16_t v : cells) append_u16le(bytes, v);
  write_file_atomic(bin_path, bytes);

  ordered_json sidecar;
  sidecar["width"] = width;
  sidecar["height"] = height;
  sidecar["dtype"] = "u16le";
  write_file_atomic(sidecar_path(bin_path), sidecar.dump(2) + "\n");
}

}  // namespace

void save_mask(const std::filesystem::path& bin_path, const FpvMask& mask) {
  save_u16_raster(bin_path, mask.cells, mask.width, mask.height);
}

void save_bev(const std::filesystem::path& bin_path, const BevGrid& grid) {
  save_u16_raster(bin_path, grid.cells, grid.width, grid.height);
}

FpvMask load_mask(const std::filesystem::path& bin_path) {
  const ordered_json sidecar =
      parse_json(read_file(sidecar_path(bin_path)), "mask sidecar");
  FpvMask mask;
  try {
    mask.width = sidecar.at("width").get<int>();
    mask.height = sidecar.at("height").get<int>();
    if (sidecar.at("dtype").get<std::string>() != "u16le")
      throw ParseError("mask dtype must be u16le");
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("bad mask sidecar: ") + e.what());
  }
  const std::string bytes = read_file(bin_path);
  const std::size_t count =
      static_cast<std::size_t>(mask.width) * mask.height;
  if (bytes.size() != count * 2)
    throw ParseError("mask byte count does not match the sidecar dims");
  mask.cells.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto lo = static_cast<std::uint8_t>(bytes[2 * i]);
    const auto hi = static_cast<std::uint8_t>(bytes[2 * i + 1]);
    mask.cells[i] = static_cast<std::uint16_t>(lo | (hi << 8));
  }
  return mask;
}

void save_mask_pgm(const std::filesystem::path& path, const FpvMask& mask) {
  std::string bytes = "P5\n" + std::to_string(mask.width) + " " +
                      std::to_string(mask.height) + "\n255\n";
  bytes.reserve(bytes.size() + mask.cells.size());
  for (const std::uint16_t v : mask.cells) {
    if (v > 255)
      throw OutOfRange("cell value " + std::to_string(v) +
                       " does not fit 8-bit PGM");
    bytes.push_back(static_cast<char>(v));
  }
  write_file_atomic(path, bytes);
}

void save_matrix(const std::filesystem::path& bin_path,
                 const Eigen::MatrixXd& m, const std::string& name) {
  std::string bytes;
  bytes.reserve(static_cast<std::size_t>(m.size()) * 4);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      append_f32le(bytes, static_cast<float>(m(r, c)));
  write_file_atomic(bin_path, bytes);

  ordered_json sidecar;
  if (!name.empty()) sidecar["name"] = name;
  sidecar["rows"] = m.rows();
  sidecar["cols"] = m.cols();
  write_file_atomic(sidecar_path(bin_path), sidecar.dump(2) + "\n");
}

Eigen::MatrixXd load_matrix(const std::filesystem::path& bin_path) {
  const ordered_json sidecar =
      parse_json(read_file(sidecar_path(bin_path)), "matrix sidecar");
  Eigen::Index rows = 0, cols = 0;
  try {
    rows = sidecar.at("rows").get<Eigen::Index>();
    cols = sidecar.at("cols").get<Eigen::Index>();
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("bad matrix sidecar: ") + e.what());
  }
  const std::string bytes = read_file(bin_path);
  if (rows < 0 || cols < 0 ||
      bytes.size() != static_cast<std::size_t>(rows) * cols * 4)
    throw ParseError("matrix byte count does not match the sidecar dims");
  Eigen::MatrixXd m(rows, cols);
  std::size_t offset = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      std::uint32_t bits = 0;
      for (int shift = 0; shift < 32; shift += 8)
        bits |= static_cast<std::uint32_t>(
                    static_cast<std::uint8_t>(bytes[offset++]))
                << shift;
      float f;
      std::memcpy(&f, &bits, 4);
      m(r, c) = static_cast<double>(f);
    }
  return m;
}

}  // namespace v2xkit
