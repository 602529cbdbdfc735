// Regenerates the fixtures under golden/ that cli_test compares CLI output
// against, byte for byte. The scene and graph files pin the serialized form
// of the production pipeline; every raster, feature map, and embedding file
// is produced by the reference implementations in oracles.hpp instead of the
// library code under test, so agreement means the end-to-end tool output
// matches an independent computation.
//
// Build and run by hand after an intentional format or fixture change:
//   cmake --build build --target golden_gen && ./build/tests/golden_gen

#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "oracles.hpp"
#include "v2xkit/io.hpp"
#include "v2xkit/pipeline.hpp"
#include "v2xkit/scenegen.hpp"

using namespace v2xkit;
namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string raster_stem(const ViewVertex& v) {
  return "a" + std::to_string(v.agent_id) + "_c" +
         std::to_string(v.camera_index);
}

// Same JSON shape the CLI writes for embeddings.
void save_embeddings_json(const fs::path& path, const EmbeddingSet& set) {
  ordered_json j;
  j["embeddings"] = ordered_json::array();
  for (const Embedding& e : set) {
    ordered_json entry;
    entry["id"] = e.object_id;
    entry["vector"] =
        std::vector<double>(e.values.data(), e.values.data() + e.values.size());
    j["embeddings"].push_back(std::move(entry));
  }
  write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace

int main() {
  const fs::path dir(V2XKIT_GOLDEN_DIR);
  fs::create_directories(dir);

  SceneConfig cfg;
  // Three cameras per agent at 130 degree fov: every same-agent wedge pair
  // overlaps its neighbors by a solid 10 degrees, so the fixture graph never
  // depends on borderline footprint contact at the shared mount point.
  cfg.seed = 77;
  cfg.num_agents = 2;
  cfg.cameras_per_agent = 3;
  cfg.num_objects = 12;
  cfg.shared_ratio = 0.25;
  cfg.fov_degrees = 130.0;

  PipelineParams params;
  params.mask_width = 120;
  params.mask_height = 68;
  params.latent_width = 30;
  params.latent_height = 17;
  params.feature_dim = 8;
  params.dk = 4;
  params.dff = 16;
  params.feature_seed = 1;

  const Scene scene = generate_scene(cfg);
  save_scene(dir / "scene.json", scene);

  const ViewGraph graph = build_collaboration_graph(
      scene, params.mask_width, params.mask_height, params.max_range);
  save_graph(dir / "graph.json", graph);

  const std::set<int> shared = shared_object_ids(scene);

  // Rasters from the reference painter.
  std::map<ViewVertex, IdMask> id_masks;
  for (const ViewVertex& v : graph.vertices) {
    const CameraPose& cam = scene_camera(scene, v);
    const FpvMask mask = oracle::fpv_mask(scene.objects, cam,
                                          params.mask_width,
                                          params.mask_height);
    save_mask(dir / ("mask_" + raster_stem(v) + ".bin"), mask);
    id_masks.emplace(v, oracle::id_mask(scene.objects, cam, params.mask_width,
                                        params.mask_height));
  }

  // Top-down raster from the reference cell test.
  BevGrid grid;
  grid.cells.assign(static_cast<std::size_t>(grid.width) * grid.height, 0);
  for (int v = 0; v < grid.height; ++v)
    for (int u = 0; u < grid.width; ++u)
      grid.cells[static_cast<std::size_t>(v) * grid.width + u] =
          oracle::bev_cell(grid, scene.objects, u, v);
  save_bev(dir / "bev.bin", grid);

  // Reference token labels: majority id per 4x4 pixel block.
  const int block_w = params.mask_width / params.latent_width;
  const int block_h = params.mask_height / params.latent_height;
  std::map<ViewVertex, std::vector<TokenLabel>> labels;
  for (const ViewVertex& v : graph.vertices) {
    std::vector<TokenLabel> labs;
    for (int ty = 0; ty < params.latent_height; ++ty)
      for (int tx = 0; tx < params.latent_width; ++tx)
        labs.push_back(oracle::block_label(id_masks.at(v), tx * block_w,
                                           ty * block_h, block_w, block_h,
                                           shared));
    labels.emplace(v, std::move(labs));
  }

  // Reference attention pass: ego hop over intra neighbors, biased cross hop
  // over the ego outputs, refinement with the ego residual.
  const int l = params.latent_width * params.latent_height;
  const std::vector<oracle::Mat> feats = oracle::reference_features(
      graph.vertices.size(), l, params.feature_dim, params.feature_seed);
  const oracle::ScalarWeights sw = oracle::reference_weights(
      params.feature_dim, params.dk, params.dff, params.feature_seed + 1);
  const InstancePairing pairing = identity_pairing(shared);

  const auto index_of = [&](const ViewVertex& v) {
    for (std::size_t i = 0; i < graph.vertices.size(); ++i)
      if (graph.vertices[i] == v) return i;
    throw Error("vertex not in graph");
  };

  std::vector<oracle::Mat> ego_maps;
  for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
    std::vector<const oracle::Mat*> neighbor_maps;
    for (const ViewVertex& n :
         neighbors(graph, graph.vertices[i], EdgeFilter::kIntra))
      neighbor_maps.push_back(&feats[index_of(n)]);
    ego_maps.push_back(oracle::ego(feats[i], neighbor_maps, sw));
  }

  std::vector<Eigen::MatrixXd> refined;
  for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
    const ViewVertex v = graph.vertices[i];
    std::vector<oracle::Mat> bias_mats;
    std::vector<const oracle::Mat*> feat_ptrs;
    for (const ViewVertex& n : neighbors(graph, v, EdgeFilter::kCross)) {
      feat_ptrs.push_back(&ego_maps[index_of(n)]);
      const std::vector<TokenLabel>& ql = labels.at(v);
      const std::vector<TokenLabel>& kl = labels.at(n);
      oracle::Mat bias(ql.size(), std::vector<double>(kl.size()));
      for (std::size_t r = 0; r < ql.size(); ++r)
        for (std::size_t c = 0; c < kl.size(); ++c)
          bias[r][c] =
              oracle::bias_entry(ql[r], kl[c], params.alpha, params.beta,
                                 params.tau_o, params.tau_b, pairing);
      bias_mats.push_back(std::move(bias));
    }
    std::vector<const oracle::Mat*> bias_ptrs;
    for (const oracle::Mat& m : bias_mats) bias_ptrs.push_back(&m);

    const oracle::Mat crossed =
        oracle::cross(ego_maps[i], feat_ptrs, bias_ptrs, sw);
    refined.push_back(
        oracle::to_eigen(oracle::refine(ego_maps[i], crossed, sw)));
    save_matrix(dir / ("attended_" + raster_stem(v) + ".bin"), refined.back());
  }

  // Pooling replica: per agent, per object id, running sum over tokens in
  // vertex order then token order, divided by the count at the end.
  std::map<int, std::map<int, std::pair<Eigen::VectorXd, int>>> pools;
  for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
    const ViewVertex v = graph.vertices[i];
    const std::vector<TokenLabel>& labs = labels.at(v);
    for (std::size_t t = 0; t < labs.size(); ++t) {
      if (labs[t].category == TokenCategory::kBackground) continue;
      auto& pool = pools[v.agent_id];
      const Eigen::VectorXd row =
          refined[i].row(static_cast<Eigen::Index>(t)).transpose();
      const auto it = pool.find(labs[t].object_id);
      if (it == pool.end()) {
        pool.emplace(labs[t].object_id, std::make_pair(row, 1));
      } else {
        it->second.first += row;
        it->second.second += 1;
      }
    }
  }
  for (const auto& [agent, pool] : pools) {
    EmbeddingSet set;
    for (const auto& [id, sum_count] : pool)
      set.push_back(Embedding{
          id, sum_count.first / static_cast<double>(sum_count.second)});
    save_embeddings_json(
        dir / ("embeddings_a" + std::to_string(agent) + ".json"), set);
  }

  std::printf("wrote fixtures for %zu vertices, %zu edges, %zu shared ids\n",
              graph.vertices.size(), graph.edges.size(), shared.size());
  return 0;
}
