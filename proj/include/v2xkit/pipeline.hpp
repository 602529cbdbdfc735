#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "v2xkit/analysis.hpp"
#include "v2xkit/attention.hpp"
#include "v2xkit/conditioning.hpp"
#include "v2xkit/scenegen.hpp"

namespace v2xkit {

// Batch settings shared by the pipeline stages. Latent dims must divide the
// mask dims; the defaults cover 16x16 pixel token blocks on a 480x272 mask.
struct PipelineParams {
  int mask_width = 480;
  int mask_height = 272;
  double max_range = 50.0;
  int latent_width = 30;
  int latent_height = 17;
  double alpha = 1.0;
  double beta = 1.0;
  double tau_o = 30.0;
  double tau_b = 1.0;
  int feature_dim = 16;
  int dk = 8;
  int dff = 32;
  std::uint64_t feature_seed = 1;
};

// Cameras in canonical (agent id, camera index) order.
std::vector<ViewVertex> scene_vertices(const Scene& scene);
const CameraPose& scene_camera(const Scene& scene, const ViewVertex& v);

// Ids of every object annotated with more than one observer.
std::set<int> shared_object_ids(const Scene& scene);

// Per-camera rasters, computed in parallel across cameras.
std::vector<std::pair<ViewVertex, FpvMask>> pipeline_masks(const Scene& scene,
                                                           int out_w, int out_h);
std::vector<std::pair<ViewVertex, IdMask>> pipeline_id_masks(const Scene& scene,
                                                             int out_w, int out_h);

// Latent token labels per camera derived from the id rasters.
std::map<ViewVertex, TokenLabeling> pipeline_labelings(
    const Scene& scene, const PipelineParams& params);

struct DirectedBias {
  ViewVertex query;
  ViewVertex key;
  BiasMatrix bias;
};

// One bias per directed cross pair (query camera, key neighbor), query
// cameras in canonical order and neighbors canonical within each query.
std::vector<DirectedBias> pipeline_biases(
    const ViewGraph& graph, const std::map<ViewVertex, TokenLabeling>& labels,
    const std::set<int>& shared_ids, const PipelineParams& params);

// Deterministic stand-ins for learned state, drawn from the documented
// generator: uniform on [-0.5, 0.5), row-major per matrix. Weight order is
// wq, wk, wv, ffn_w1, ffn_w2; layer norm starts at scale 1, shift 0.
// Feature maps draw L x D values per vertex in the vertex order given.
AttentionWeights reference_weights(int d, int dk, int dff, std::uint64_t seed);
std::vector<FeatureMap> reference_features(const std::vector<ViewVertex>& order,
                                           int l, int d, std::uint64_t seed);

// Full attention pass: reference features (seed feature_seed) and weights
// (seed feature_seed + 1), one ego-view hop over intra edges, then per camera
// the biased cross-agent hop over its cross neighbors followed by the
// refinement block. Returns refined maps in canonical vertex order.
std::vector<FeatureMap> pipeline_attend(
    const Scene& scene, const ViewGraph& graph,
    const std::map<ViewVertex, TokenLabeling>& labels,
    const std::set<int>& shared_ids, const PipelineParams& params);

// Mean refined token vector per object id per agent, pooled over every
// labeled (non-background) token of that agent's cameras.
std::map<int, EmbeddingSet> pipeline_embeddings(
    const std::vector<FeatureMap>& refined,
    const std::map<ViewVertex, TokenLabeling>& labels);

}  // namespace v2xkit
