#include "v2xkit/viewgraph.hpp"

#include <algorithm>
#include <optional>

namespace v2xkit {

std::string vertex_label(const ViewVertex& v) {
  return "a" + std::to_string(v.agent_id) + ":c" +
         std::to_string(v.camera_index);
}

ViewVertex vertex_from_label(const std::string& label) {
  const std::size_t colon = label.find(":c");
  if (label.size() < 4 || label[0] != 'a' || colon == std::string::npos)
    throw ParseError("bad vertex label \"" + label + "\"");
  try {
    ViewVertex v;
    v.agent_id = std::stoi(label.substr(1, colon - 1));
    v.camera_index = std::stoi(label.substr(colon + 2));
    return v;
  } catch (const std::exception&) {
    throw ParseError("bad vertex label \"" + label + "\"");
  }
}

const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::kIntra: return "intra";
    case EdgeKind::kCrossObj: return "cross_obj";
    case EdgeKind::kCrossGeo: return "cross_geo";
  }
  throw ParseError("unknown edge kind");
}

EdgeKind edge_kind_from_string(const std::string& name) {
  if (name == "intra") return EdgeKind::kIntra;
  if (name == "cross_obj") return EdgeKind::kCrossObj;
  if (name == "cross_geo") return EdgeKind::kCrossGeo;
  throw ParseError("unknown edge kind \"" + name + "\"");
}

bool edge_matches(const ViewEdge& e, EdgeFilter filter) {
  switch (filter) {
    case EdgeFilter::kAll: return true;
    case EdgeFilter::kIntra: return e.kind == EdgeKind::kIntra;
    case EdgeFilter::kCross:
      return e.kind == EdgeKind::kCrossObj || e.kind == EdgeKind::kCrossGeo;
    case EdgeFilter::kCrossObj: return e.kind == EdgeKind::kCrossObj;
    case EdgeFilter::kCrossGeo: return e.kind == EdgeKind::kCrossGeo;
  }
  return false;
}

namespace {

ViewEdge make_edge(ViewVertex a, ViewVertex b, EdgeKind kind) {
  if (b < a) std::swap(a, b);
  return ViewEdge{a, b, kind};
}

struct CameraEntry {
  ViewVertex vertex;
  const CameraPose* cam;
};

std::vector<CameraEntry> enumerate_cameras(const Scene& scene) {
  std::vector<CameraEntry> out;
  for (const Agent& agent : scene.agents)
    for (std::size_t c = 0; c < agent.cameras.size(); ++c)
      out.push_back(CameraEntry{ViewVertex{agent.id, static_cast<int>(c)},
                                &agent.cameras[c]});
  return out;
}

// Footprints indexed like enumerate_cameras; a camera whose footprint is
// degenerate contributes no geometric edges.
std::vector<std::optional<FootprintPolygon>> all_footprints(
    const std::vector<CameraEntry>& cams, double max_range) {
  std::vector<std::optional<FootprintPolygon>> out;
  out.reserve(cams.size());
  for (const CameraEntry& entry : cams) {
    try {
      out.push_back(frustum_footprint(*entry.cam, max_range));
    } catch (const DegenerateFov&) {
      out.push_back(std::nullopt);
    }
  }
  return out;
}

bool sets_intersect(const std::set<int>& a, const std::set<int>& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia == *ib) return true;
    if (*ia < *ib)
      ++ia;
    else
      ++ib;
  }
  return false;
}

}  // namespace

VisibilityTable compute_visibility(const Scene& scene, int out_w, int out_h) {
  if (out_w <= 0 || out_h <= 0) throw Error("raster size must be positive");
  VisibilityTable table;
  for (const CameraEntry& entry : enumerate_cameras(scene)) {
    const CameraPose& cam = *entry.cam;
    const double scale_x = static_cast<double>(out_w) / cam.image_width;
    const double scale_y = static_cast<double>(out_h) / cam.image_height;
    std::set<int>& visible = table[entry.vertex];
    for (const SceneObject& obj : scene.objects) {
      for (const Eigen::Vector3d& corner : box_corners(obj)) {
        const Eigen::Vector3d x = cam.K * (cam.R * corner + cam.t);
        if (x.z() <= kDepthEpsilon) continue;
        const double u = x.x() / x.z() * scale_x;
        const double v = x.y() / x.z() * scale_y;
        if (u >= 0.0 && u < out_w && v >= 0.0 && v < out_h) {
          visible.insert(obj.id);
          break;
        }
      }
    }
  }
  return table;
}

std::vector<ViewEdge> intra_edges(const Scene& scene, double max_range) {
  const auto cams = enumerate_cameras(scene);
  const auto footprints = all_footprints(cams, max_range);
  std::vector<ViewEdge> edges;
  for (std::size_t i = 0; i < cams.size(); ++i) {
    for (std::size_t j = i + 1; j < cams.size(); ++j) {
      if (cams[i].vertex.agent_id != cams[j].vertex.agent_id) continue;
      if (!footprints[i] || !footprints[j]) continue;
      if (footprints_overlap(*footprints[i], *footprints[j]))
        edges.push_back(make_edge(cams[i].vertex, cams[j].vertex,
                                  EdgeKind::kIntra));
    }
  }
  return edges;
}

std::vector<ViewEdge> cross_edges_obj(const Scene& scene,
                                      const VisibilityTable& visibility) {
  const auto cams = enumerate_cameras(scene);
  std::vector<ViewEdge> edges;
  for (std::size_t i = 0; i < cams.size(); ++i) {
    for (std::size_t j = i + 1; j < cams.size(); ++j) {
      if (cams[i].vertex.agent_id == cams[j].vertex.agent_id) continue;
      const auto vi = visibility.find(cams[i].vertex);
      const auto vj = visibility.find(cams[j].vertex);
      if (vi == visibility.end() || vj == visibility.end()) continue;
      if (sets_intersect(vi->second, vj->second))
        edges.push_back(make_edge(cams[i].vertex, cams[j].vertex,
                                  EdgeKind::kCrossObj));
    }
  }
  return edges;
}

std::vector<ViewEdge> cross_edges_geo(const Scene& scene,
                                      const VisibilityTable& visibility,
                                      double max_range) {
  const auto cams = enumerate_cameras(scene);
  const auto footprints = all_footprints(cams, max_range);
  std::vector<ViewEdge> edges;
  for (std::size_t i = 0; i < cams.size(); ++i) {
    for (std::size_t j = i + 1; j < cams.size(); ++j) {
      if (cams[i].vertex.agent_id == cams[j].vertex.agent_id) continue;
      const auto vi = visibility.find(cams[i].vertex);
      const auto vj = visibility.find(cams[j].vertex);
      if (vi != visibility.end() && vj != visibility.end() &&
          sets_intersect(vi->second, vj->second))
        continue;  // already a shared-object edge
      if (!footprints[i] || !footprints[j]) continue;
      if (footprints_overlap(*footprints[i], *footprints[j]))
        edges.push_back(make_edge(cams[i].vertex, cams[j].vertex,
                                  EdgeKind::kCrossGeo));
    }
  }
  return edges;
}

ViewGraph build_collaboration_graph(const Scene& scene, int out_w, int out_h,
                                    double max_range) {
  ViewGraph graph;
  for (const CameraEntry& entry : enumerate_cameras(scene))
    graph.vertices.push_back(entry.vertex);
  std::sort(graph.vertices.begin(), graph.vertices.end());

  const VisibilityTable visibility = compute_visibility(scene, out_w, out_h);
  for (const ViewEdge& e : intra_edges(scene, max_range))
    graph.edges.push_back(e);
  for (const ViewEdge& e : cross_edges_obj(scene, visibility))
    graph.edges.push_back(e);
  for (const ViewEdge& e : cross_edges_geo(scene, visibility, max_range))
    graph.edges.push_back(e);
  return graph;
}

std::vector<ViewVertex> neighbors(const ViewGraph& graph, const ViewVertex& v,
                                  EdgeFilter filter) {
  if (!std::binary_search(graph.vertices.begin(), graph.vertices.end(), v))
    throw UnknownVertex("vertex " + vertex_label(v) + " is not in the graph");
  std::vector<ViewVertex> out;
  for (const ViewEdge& e : graph.edges) {
    if (!edge_matches(e, filter)) continue;
    if (e.u == v) out.push_back(e.v);
    if (e.v == v) out.push_back(e.u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::MatrixXi adjacency_matrix(const ViewGraph& graph, EdgeFilter filter) {
  const int n = static_cast<int>(graph.vertices.size());
  std::map<ViewVertex, int> index;
  for (int i = 0; i < n; ++i) index[graph.vertices[i]] = i;
  Eigen::MatrixXi w = Eigen::MatrixXi::Zero(n, n);
  for (const ViewEdge& e : graph.edges) {
    if (!edge_matches(e, filter)) continue;
    const int i = index.at(e.u);
    const int j = index.at(e.v);
    w(i, j) = 1;
    w(j, i) = 1;
  }
  return w;
}

}  // namespace v2xkit
