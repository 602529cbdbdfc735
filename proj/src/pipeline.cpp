#include "v2xkit/pipeline.hpp"

#include <algorithm>

#include "v2xkit/parallel.hpp"
#include "v2xkit/rng.hpp"

namespace v2xkit {

std::vector<ViewVertex> scene_vertices(const Scene& scene) {
  std::vector<ViewVertex> out;
  for (const Agent& agent : scene.agents)
    for (std::size_t c = 0; c < agent.cameras.size(); ++c)
      out.push_back(ViewVertex{agent.id, static_cast<int>(c)});
  std::sort(out.begin(), out.end());
  return out;
}

const CameraPose& scene_camera(const Scene& scene, const ViewVertex& v) {
  for (const Agent& agent : scene.agents) {
    if (agent.id != v.agent_id) continue;
    if (v.camera_index >= 0 &&
        v.camera_index < static_cast<int>(agent.cameras.size()))
      return agent.cameras[static_cast<std::size_t>(v.camera_index)];
    break;
  }
  throw UnknownVertex("no camera " + vertex_label(v) + " in the scene");
}

std::set<int> shared_object_ids(const Scene& scene) {
  std::set<int> out;
  for (const SceneObject& obj : scene.objects)
    if (obj.observers.size() > 1) out.insert(obj.id);
  return out;
}

std::vector<std::pair<ViewVertex, FpvMask>> pipeline_masks(const Scene& scene,
                                                           int out_w,
                                                           int out_h) {
  const std::vector<ViewVertex> vertices = scene_vertices(scene);
  std::vector<std::pair<ViewVertex, FpvMask>> out(vertices.size());
  parallel_for(vertices.size(), [&](std::size_t i) {
    out[i] = {vertices[i],
              rasterize_fpv_mask(scene.objects,
                                 scene_camera(scene, vertices[i]), out_w,
                                 out_h)};
  });
  return out;
}

std::vector<std::pair<ViewVertex, IdMask>> pipeline_id_masks(const Scene& scene,
                                                             int out_w,
                                                             int out_h) {
  const std::vector<ViewVertex> vertices = scene_vertices(scene);
  std::vector<std::pair<ViewVertex, IdMask>> out(vertices.size());
  parallel_for(vertices.size(), [&](std::size_t i) {
    out[i] = {vertices[i],
              rasterize_id_mask(scene.objects,
                                scene_camera(scene, vertices[i]), out_w,
                                out_h)};
  });
  return out;
}

std::map<ViewVertex, TokenLabeling> pipeline_labelings(
    const Scene& scene, const PipelineParams& params) {
  const std::set<int> shared = shared_object_ids(scene);
  const auto masks = pipeline_masks(scene, params.mask_width, params.mask_height);
  const auto ids = pipeline_id_masks(scene, params.mask_width, params.mask_height);
  std::map<ViewVertex, TokenLabeling> out;
  for (std::size_t i = 0; i < masks.size(); ++i)
    out[masks[i].first] =
        label_tokens(masks[i].second, ids[i].second, params.latent_width,
                     params.latent_height, shared);
  return out;
}

std::vector<DirectedBias> pipeline_biases(
    const ViewGraph& graph, const std::map<ViewVertex, TokenLabeling>& labels,
    const std::set<int>& shared_ids, const PipelineParams& params) {
  const InstancePairing pairing = identity_pairing(shared_ids);
  std::vector<DirectedBias> out;
  for (const ViewVertex& query : graph.vertices) {
    for (const ViewVertex& key : neighbors(graph, query, EdgeFilter::kCross)) {
      out.push_back(DirectedBias{
          query, key,
          build_roi_bias(labels.at(query), labels.at(key), params.alpha,
                         params.beta, params.tau_o, params.tau_b, pairing)});
    }
  }
  return out;
}

namespace {

Eigen::MatrixXd draw_matrix(SplitMix64& rng, Eigen::Index rows,
                            Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-0.5, 0.5);
  return m;
}

}  // namespace

AttentionWeights reference_weights(int d, int dk, int dff,
                                   std::uint64_t seed) {
  if (d < 1 || dk < 1 || dff < 1)
    throw InvalidConfig("weight dims must be positive");
  SplitMix64 rng(seed);
  AttentionWeights w;
  w.wq = draw_matrix(rng, d, dk);
  w.wk = draw_matrix(rng, d, dk);
  w.wv = draw_matrix(rng, d, d);
  w.ffn_w1 = draw_matrix(rng, dff, d);
  w.ffn_w2 = draw_matrix(rng, d, dff);
  w.ln_scale = Eigen::VectorXd::Ones(d);
  w.ln_shift = Eigen::VectorXd::Zero(d);
  return w;
}

std::vector<FeatureMap> reference_features(const std::vector<ViewVertex>& order,
                                           int l, int d, std::uint64_t seed) {
  if (l < 1 || d < 1) throw InvalidConfig("feature dims must be positive");
  SplitMix64 rng(seed);
  std::vector<FeatureMap> out;
  out.reserve(order.size());
  for (const ViewVertex& v : order)
    out.push_back(FeatureMap{v, draw_matrix(rng, l, d)});
  return out;
}

std::vector<FeatureMap> pipeline_attend(
    const Scene& scene, const ViewGraph& graph,
    const std::map<ViewVertex, TokenLabeling>& labels,
    const std::set<int>& shared_ids, const PipelineParams& params) {
  (void)scene;
  const int l = params.latent_width * params.latent_height;
  const std::vector<FeatureMap> features = reference_features(
      graph.vertices, l, params.feature_dim, params.feature_seed);
  const AttentionWeights w = reference_weights(
      params.feature_dim, params.dk, params.dff, params.feature_seed + 1);
  const InstancePairing pairing = identity_pairing(shared_ids);

  const std::vector<FeatureMap> ego = ego_view_attention(features, graph, w);
  std::map<ViewVertex, const FeatureMap*> by_vertex;
  for (const FeatureMap& f : ego) by_vertex[f.vertex] = &f;

  std::vector<FeatureMap> out;
  out.reserve(ego.size());
  for (const FeatureMap& f : ego) {
    std::vector<FeatureMap> neighbor_feats;
    std::vector<BiasMatrix> biases;
    for (const ViewVertex& n : neighbors(graph, f.vertex, EdgeFilter::kCross)) {
      neighbor_feats.push_back(*by_vertex.at(n));
      biases.push_back(build_roi_bias(labels.at(f.vertex), labels.at(n),
                                      params.alpha, params.beta, params.tau_o,
                                      params.tau_b, pairing));
    }
    const FeatureMap cross =
        cross_agent_attention(f, neighbor_feats, graph, biases, w);
    out.push_back(refine(f, cross, w));
  }
  return out;
}

std::map<int, EmbeddingSet> pipeline_embeddings(
    const std::vector<FeatureMap>& refined,
    const std::map<ViewVertex, TokenLabeling>& labels) {
  // agent -> object id -> (sum, count)
  std::map<int, std::map<int, std::pair<Eigen::VectorXd, int>>> pools;
  for (const FeatureMap& f : refined) {
    const TokenLabeling& labeling = labels.at(f.vertex);
    if (static_cast<Eigen::Index>(labeling.labels.size()) != f.values.rows())
      throw ShapeMismatch("labeling token count does not match feature rows");
    for (std::size_t t = 0; t < labeling.labels.size(); ++t) {
      const TokenLabel& label = labeling.labels[t];
      if (label.category == TokenCategory::kBackground) continue;
      auto& pool = pools[f.vertex.agent_id];
      auto it = pool.find(label.object_id);
      if (it == pool.end()) {
        pool.emplace(label.object_id,
                     std::make_pair(
                         Eigen::VectorXd(f.values.row(
                             static_cast<Eigen::Index>(t)).transpose()),
                         1));
      } else {
        it->second.first += f.values.row(static_cast<Eigen::Index>(t)).transpose();
        it->second.second += 1;
      }
    }
  }
  std::map<int, EmbeddingSet> out;
  for (const auto& [agent, pool] : pools) {
    EmbeddingSet set;
    for (const auto& [id, sum_count] : pool)
      set.push_back(Embedding{
          id, sum_count.first / static_cast<double>(sum_count.second)});
    out[agent] = std::move(set);
  }
  return out;
}

}  // namespace v2xkit
