#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "v2xkit/geometry.hpp"

namespace v2xkit {

// One camera of one agent. Vertices order by (agent_id, camera_index); that
// order fixes edge canonicalization and every listing the toolkit emits.
struct ViewVertex {
  int agent_id = 0;
  int camera_index = 0;

  friend bool operator==(const ViewVertex&, const ViewVertex&) = default;
  friend auto operator<=>(const ViewVertex&, const ViewVertex&) = default;
};

std::string vertex_label(const ViewVertex& v);            // "a0:c1"
ViewVertex vertex_from_label(const std::string& label);   // ParseError

enum class EdgeKind { kIntra, kCrossObj, kCrossGeo };

const char* to_string(EdgeKind k);
EdgeKind edge_kind_from_string(const std::string& name);  // ParseError

// Undirected edge stored canonically with u < v. Intra edges join cameras of
// one agent, cross edges join cameras of different agents; an unordered pair
// carries at most one edge, and the cross kinds are disjoint by construction.
struct ViewEdge {
  ViewVertex u;
  ViewVertex v;
  EdgeKind kind = EdgeKind::kIntra;

  friend bool operator==(const ViewEdge&, const ViewEdge&) = default;
};

struct ViewGraph {
  std::vector<ViewVertex> vertices;  // sorted
  std::vector<ViewEdge> edges;
};

enum class EdgeFilter { kAll, kIntra, kCross, kCrossObj, kCrossGeo };

bool edge_matches(const ViewEdge& e, EdgeFilter filter);

// Object ids whose boxes land in each camera's view: an object is visible
// when at least one of its 8 corners projects with depth > 1e-6 inside the
// out_w x out_h raster (half-open pixel rectangle).
using VisibilityTable = std::map<ViewVertex, std::set<int>>;

VisibilityTable compute_visibility(const Scene& scene, int out_w, int out_h);

// Same-agent camera pairs whose ground footprints overlap with positive area.
std::vector<ViewEdge> intra_edges(const Scene& scene, double max_range);

// Different-agent camera pairs that see at least one common object id.
std::vector<ViewEdge> cross_edges_obj(const Scene& scene,
                                      const VisibilityTable& visibility);

// Different-agent camera pairs with overlapping footprints that do NOT share
// a visible object (the complement rule keeps the two cross sets disjoint).
std::vector<ViewEdge> cross_edges_geo(const Scene& scene,
                                      const VisibilityTable& visibility,
                                      double max_range);

// Union of the intra and the two cross edge sets over all scene cameras.
ViewGraph build_collaboration_graph(const Scene& scene, int out_w, int out_h,
                                    double max_range);

// Adjacent vertices of v under the filter, sorted canonically.
// Throws UnknownVertex when v is not a graph vertex.
std::vector<ViewVertex> neighbors(const ViewGraph& graph, const ViewVertex& v,
                                  EdgeFilter filter);

// 0/1 adjacency in vertex order; symmetric with zero diagonal.
Eigen::MatrixXi adjacency_matrix(const ViewGraph& graph, EdgeFilter filter);

}  // namespace v2xkit
