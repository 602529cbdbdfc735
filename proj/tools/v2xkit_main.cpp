#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "v2xkit/analysis.hpp"
#include "v2xkit/io.hpp"
#include "v2xkit/pipeline.hpp"
#include "v2xkit/scenegen.hpp"

namespace {

using v2xkit::EdgeFilter;
using v2xkit::EmbeddingSet;
using v2xkit::Scene;
using v2xkit::ViewGraph;
using ordered_json = nlohmann::ordered_json;

std::string raster_stem(const v2xkit::ViewVertex& v) {
  return "a" + std::to_string(v.agent_id) + "_c" +
         std::to_string(v.camera_index);
}

Scene load_valid_scene(const std::string& path) {
  Scene scene = v2xkit::load_scene(path);
  v2xkit::validate_scene(scene);
  return scene;
}

EmbeddingSet load_embeddings(const std::string& path) {
  const ordered_json j =
      ordered_json::parse(v2xkit::read_file(path), nullptr, false);
  if (j.is_discarded() || !j.contains("embeddings"))
    throw v2xkit::ParseError("bad embeddings file " + path);
  EmbeddingSet set;
  for (const ordered_json& e : j.at("embeddings")) {
    v2xkit::Embedding emb;
    emb.object_id = e.at("id").get<int>();
    const auto values = e.at("vector").get<std::vector<double>>();
    emb.values = Eigen::Map<const Eigen::VectorXd>(
        values.data(), static_cast<Eigen::Index>(values.size()));
    set.push_back(std::move(emb));
  }
  return set;
}

void save_embeddings(const std::filesystem::path& path,
                     const EmbeddingSet& set) {
  ordered_json j;
  j["embeddings"] = ordered_json::array();
  for (const v2xkit::Embedding& e : set) {
    ordered_json entry;
    entry["id"] = e.object_id;
    entry["vector"] = std::vector<double>(
        e.values.data(), e.values.data() + e.values.size());
    j["embeddings"].push_back(std::move(entry));
  }
  v2xkit::write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-agent scene geometry, view graphs, and reference "
               "attention kernels"};
  app.require_subcommand(1);

  // gen-scene
  v2xkit::SceneConfig cfg;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen-scene", "synthesize a scene");
  gen->add_option("--seed", cfg.seed, "generator seed");
  gen->add_option("--agents", cfg.num_agents, "number of agents");
  gen->add_option("--cams", cfg.cameras_per_agent, "cameras per agent");
  gen->add_option("--objects", cfg.num_objects, "number of objects");
  gen->add_option("--shared-ratio", cfg.shared_ratio,
                  "fraction of objects observed by more than one agent");
  gen->add_option("--extent", cfg.extent, "half-width of the scene in metres");
  gen->add_option("--fov", cfg.fov_degrees, "horizontal field of view");
  gen->add_option("--camera-height", cfg.camera_height, "mount height");
  gen->add_option("-o,--out", gen_out, "output scene path")->required();

  // shared raster/graph flags
  std::string scene_path;
  std::string out_dir;
  std::string out_path;
  v2xkit::PipelineParams params;
  bool pgm = false;

  CLI::App* masks = app.add_subcommand("masks", "first-person class masks");
  masks->add_option("scene", scene_path, "scene JSON")->required();
  masks->add_option("--width", params.mask_width, "raster width");
  masks->add_option("--height", params.mask_height, "raster height");
  masks->add_option("--out-dir", out_dir, "output directory")->required();
  masks->add_flag("--pgm", pgm, "also write 8-bit PGM previews");

  int grid_size = 200;
  double resolution = 0.5, x_min = -50.0, y_min = -50.0;
  CLI::App* bev = app.add_subcommand("bev", "top-down class raster");
  bev->add_option("scene", scene_path, "scene JSON")->required();
  bev->add_option("--grid-size", grid_size, "cells per side");
  bev->add_option("--resolution", resolution, "metres per cell");
  bev->add_option("--x-min", x_min, "west edge of the grid");
  bev->add_option("--y-min", y_min, "south edge of the grid");
  bev->add_option("--out-dir", out_dir, "output directory")->required();
  bev->add_flag("--pgm", pgm, "also write an 8-bit PGM preview");

  CLI::App* graph_cmd = app.add_subcommand("graph", "collaboration view graph");
  graph_cmd->add_option("scene", scene_path, "scene JSON")->required();
  graph_cmd->add_option("--width", params.mask_width, "visibility raster width");
  graph_cmd->add_option("--height", params.mask_height,
                        "visibility raster height");
  graph_cmd->add_option("--max-range", params.max_range,
                        "footprint truncation in metres");
  graph_cmd->add_option("-o,--out", out_path, "output graph path")->required();

  CLI::App* bias = app.add_subcommand("bias", "cross-view attention biases");
  bias->add_option("scene", scene_path, "scene JSON")->required();
  bias->add_option("--width", params.mask_width, "raster width");
  bias->add_option("--height", params.mask_height, "raster height");
  bias->add_option("--latent-w", params.latent_width, "latent grid width");
  bias->add_option("--latent-h", params.latent_height, "latent grid height");
  bias->add_option("--alpha", params.alpha, "object-isolation weight");
  bias->add_option("--beta", params.beta, "background-suppression weight");
  bias->add_option("--tau-o", params.tau_o, "object-isolation threshold");
  bias->add_option("--tau-b", params.tau_b, "background threshold");
  bias->add_option("--max-range", params.max_range, "footprint truncation");
  bias->add_option("--out-dir", out_dir, "output directory")->required();

  CLI::App* attend = app.add_subcommand(
      "attend", "run the reference attention pass over a scene");
  attend->add_option("scene", scene_path, "scene JSON")->required();
  attend->add_option("--width", params.mask_width, "raster width");
  attend->add_option("--height", params.mask_height, "raster height");
  attend->add_option("--latent-w", params.latent_width, "latent grid width");
  attend->add_option("--latent-h", params.latent_height, "latent grid height");
  attend->add_option("--alpha", params.alpha, "object-isolation weight");
  attend->add_option("--beta", params.beta, "background-suppression weight");
  attend->add_option("--tau-o", params.tau_o, "object-isolation threshold");
  attend->add_option("--tau-b", params.tau_b, "background threshold");
  attend->add_option("--max-range", params.max_range, "footprint truncation");
  attend->add_option("--dim", params.feature_dim, "feature dim D");
  attend->add_option("--dk", params.dk, "query/key dim");
  attend->add_option("--dff", params.dff, "feed-forward hidden dim");
  attend->add_option("--feature-seed", params.feature_seed,
                     "seed for reference features and weights");
  attend->add_option("--out-dir", out_dir, "output directory")->required();

  std::string queries_path, candidates_path;
  bool common_only = false;
  CLI::App* metrics = app.add_subcommand("metrics", "retrieval consistency");
  metrics->add_option("--queries", queries_path, "query embeddings JSON")
      ->required();
  metrics->add_option("--candidates", candidates_path,
                      "candidate embeddings JSON")
      ->required();
  metrics->add_flag("--common-only", common_only,
                    "restrict both sets to ids present in each");
  metrics->add_option("-o,--out", out_path, "output report path")->required();

  double c_in = -1.0, c_cr = -1.0;
  std::vector<std::string> graph_files;
  CLI::App* analyze = app.add_subcommand("analyze", "trainability report");
  analyze->add_option("--c-in", c_in, "intra-view complexity");
  analyze->add_option("--c-cr", c_cr, "cross-view complexity");
  analyze->add_option("--graphs", graph_files,
                      "graph JSON frames to measure complexities from");
  analyze->add_option("-o,--out", out_path, "output report path")->required();

  std::string edits_path;
  double edit_extent = 50.0;
  CLI::App* edit = app.add_subcommand("edit", "apply scene edits");
  edit->add_option("scene", scene_path, "scene JSON")->required();
  edit->add_option("--edits", edits_path, "edit list JSON")->required();
  edit->add_option("--extent", edit_extent, "scene half-width bound");
  edit->add_option("-o,--out", out_path, "output scene path")->required();

  try {
    app.parse(argc, argv);

    if (gen->parsed()) {
      v2xkit::save_scene(gen_out, v2xkit::generate_scene(cfg));
    } else if (masks->parsed()) {
      const Scene scene = load_valid_scene(scene_path);
      const std::filesystem::path dir(out_dir);
      for (const auto& [vertex, mask] :
           v2xkit::pipeline_masks(scene, params.mask_width,
                                  params.mask_height)) {
        v2xkit::save_mask(dir / ("mask_" + raster_stem(vertex) + ".bin"), mask);
        if (pgm)
          v2xkit::save_mask_pgm(dir / ("mask_" + raster_stem(vertex) + ".pgm"),
                                mask);
      }
    } else if (bev->parsed()) {
      const Scene scene = load_valid_scene(scene_path);
      v2xkit::BevGrid grid;
      grid.width = grid_size;
      grid.height = grid_size;
      grid.resolution = resolution;
      grid.x_min = x_min;
      grid.y_min = y_min;
      grid = v2xkit::bev_render(std::move(grid), scene.objects);
      const std::filesystem::path dir(out_dir);
      v2xkit::save_bev(dir / "bev.bin", grid);
      if (pgm)
        v2xkit::save_mask_pgm(
            dir / "bev.pgm",
            v2xkit::FpvMask{grid.width, grid.height, grid.cells});
    } else if (graph_cmd->parsed()) {
      const Scene scene = load_valid_scene(scene_path);
      v2xkit::save_graph(out_path, v2xkit::build_collaboration_graph(
                                       scene, params.mask_width,
                                       params.mask_height, params.max_range));
    } else if (bias->parsed()) {
      const Scene scene = load_valid_scene(scene_path);
      const ViewGraph graph = v2xkit::build_collaboration_graph(
          scene, params.mask_width, params.mask_height, params.max_range);
      const auto labels = v2xkit::pipeline_labelings(scene, params);
      const std::filesystem::path dir(out_dir);
      for (const v2xkit::DirectedBias& b : v2xkit::pipeline_biases(
               graph, labels, v2xkit::shared_object_ids(scene), params)) {
        v2xkit::save_matrix(dir / ("bias_" + raster_stem(b.query) + "__" +
                                   raster_stem(b.key) + ".bin"),
                            b.bias.values);
      }
    } else if (attend->parsed()) {
      const Scene scene = load_valid_scene(scene_path);
      const ViewGraph graph = v2xkit::build_collaboration_graph(
          scene, params.mask_width, params.mask_height, params.max_range);
      const auto labels = v2xkit::pipeline_labelings(scene, params);
      const auto refined = v2xkit::pipeline_attend(
          scene, graph, labels, v2xkit::shared_object_ids(scene), params);
      const std::filesystem::path dir(out_dir);
      for (const v2xkit::FeatureMap& f : refined)
        v2xkit::save_matrix(
            dir / ("attended_" + raster_stem(f.vertex) + ".bin"), f.values);
      for (const auto& [agent, set] :
           v2xkit::pipeline_embeddings(refined, labels))
        save_embeddings(
            dir / ("embeddings_a" + std::to_string(agent) + ".json"), set);
    } else if (metrics->parsed()) {
      EmbeddingSet queries = load_embeddings(queries_path);
      EmbeddingSet candidates = load_embeddings(candidates_path);
      if (common_only) {
        std::set<int> q_ids, c_ids;
        for (const auto& e : queries) q_ids.insert(e.object_id);
        for (const auto& e : candidates) c_ids.insert(e.object_id);
        std::erase_if(queries, [&](const v2xkit::Embedding& e) {
          return !c_ids.count(e.object_id);
        });
        std::erase_if(candidates, [&](const v2xkit::Embedding& e) {
          return !q_ids.count(e.object_id);
        });
      }
      const v2xkit::RetrievalReport report =
          v2xkit::retrieval_metrics(queries, candidates);
      ordered_json j;
      j["mean_sim"] = report.mean_sim;
      j["mrr"] = report.mrr;
      j["top1"] = report.top1;
      j["n_queries"] = report.n_queries;
      v2xkit::write_file_atomic(out_path, j.dump(2) + "\n");
    } else if (analyze->parsed()) {
      if (!graph_files.empty()) {
        v2xkit::GraphSequence frames;
        for (const std::string& file : graph_files)
          frames.push_back(v2xkit::load_graph(file));
        c_in = v2xkit::graph_complexity(frames, EdgeFilter::kIntra);
        c_cr = v2xkit::graph_complexity(frames, EdgeFilter::kCross);
      } else if (c_in < 0.0 || c_cr < 0.0) {
        throw v2xkit::InvalidConfig(
            "analyze needs --graphs or both --c-in and --c-cr >= 0");
      }
      const v2xkit::ComplexityReport report =
          v2xkit::complexity_report(c_in, c_cr);
      ordered_json j;
      j["c_in"] = report.c_in;
      j["c_cr"] = report.c_cr;
      j["c_couple"] = report.c_couple;
      j["c_joint"] = report.c_joint;
      j["rho_reduce"] = report.rho_reduce;
      v2xkit::write_file_atomic(out_path, j.dump(2) + "\n");
    } else if (edit->parsed()) {
      Scene scene = load_valid_scene(scene_path);
      const ordered_json j =
          ordered_json::parse(v2xkit::read_file(edits_path), nullptr, false);
      if (j.is_discarded() || !j.contains("edits"))
        throw v2xkit::ParseError("bad edits file " + edits_path);
      for (const ordered_json& e : j.at("edits")) {
        v2xkit::SceneEdit scene_edit;
        const std::string kind = e.at("kind").get<std::string>();
        if (kind == "remove_shared") {
          scene_edit.kind = v2xkit::SceneEdit::Kind::kRemoveShared;
          scene_edit.object_id = e.at("object_id").get<int>();
        } else if (kind == "move_shared") {
          scene_edit.kind = v2xkit::SceneEdit::Kind::kMoveShared;
          scene_edit.object_id = e.at("object_id").get<int>();
          for (int i = 0; i < 3; ++i)
            scene_edit.new_center(i) = e.at("new_center").at(i).get<double>();
        } else if (kind == "insert_shared") {
          scene_edit.kind = v2xkit::SceneEdit::Kind::kInsertShared;
          for (int i = 0; i < 3; ++i)
            scene_edit.new_center(i) = e.at("new_center").at(i).get<double>();
          scene_edit.class_label =
              v2xkit::object_class_from_string(e.at("class").get<std::string>());
        } else {
          throw v2xkit::ParseError("unknown edit kind \"" + kind + "\"");
        }
        scene = v2xkit::apply_edit(scene, scene_edit, edit_extent);
      }
      v2xkit::save_scene(out_path, scene);
    }
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const v2xkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool usage = dynamic_cast<const v2xkit::InvalidConfig*>(&e) ||
                       dynamic_cast<const v2xkit::InvalidThresholds*>(&e) ||
                       dynamic_cast<const v2xkit::OutOfExtent*>(&e) ||
                       dynamic_cast<const v2xkit::UnknownClass*>(&e) ||
                       dynamic_cast<const v2xkit::UnknownObject*>(&e);
    return usage ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
