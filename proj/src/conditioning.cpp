#include "v2xkit/conditioning.hpp"

#include <cmath>

namespace v2xkit {

Eigen::VectorXd fourier_encode(std::span<const double> values, int bands) {
  if (bands <= 0) throw Error("bands must be positive");
  Eigen::VectorXd out(2 * bands * values.size());
  std::size_t k = 0;
  for (const double x : values) {
    for (int b = 0; b < bands; ++b) {
      const double angle = std::ldexp(x, b);  // 2^b * x
      out[k++] = std::sin(angle);
      out[k++] = std::cos(angle);
    }
  }
  return out;
}

Eigen::VectorXd fourier_encode_corners(const SceneObject& obj, int bands) {
  const auto corners = box_corners(obj);
  double flat[24];
  for (int i = 0; i < 8; ++i) {
    flat[3 * i + 0] = corners[i].x();
    flat[3 * i + 1] = corners[i].y();
    flat[3 * i + 2] = corners[i].z();
  }
  return fourier_encode(std::span<const double>(flat, 24), bands);
}

Eigen::VectorXd make_object_token(const SceneObject& obj,
                                  const ClassEmbeddingTable& table,
                                  const VStarEmbedding& vstar,
                                  const Eigen::MatrixXd& projection,
                                  int bands) {
  const auto row = table.rows.find(obj.class_label);
  if (row == table.rows.end())
    throw UnknownClass(std::string("no embedding for class ") +
                       to_string(obj.class_label));
  if (vstar.size() != row->second.size())
    throw ShapeMismatch("vstar dim does not match the class embedding dim");

  Eigen::VectorXd label = row->second;
  if (obj.observers.size() > 1) label += vstar;

  const Eigen::VectorXd geometry = fourier_encode_corners(obj, bands);
  if (projection.cols() != geometry.size() + label.size())
    throw ShapeMismatch("projection cols must equal fourier + label dims");

  Eigen::VectorXd token(geometry.size() + label.size());
  token << geometry, label;
  return projection * token;
}

Eigen::MatrixXd fuse_fpv_bev(const Eigen::MatrixXd& f_fpv,
                             const Eigen::MatrixXd& f_bev, double eta) {
  if (f_fpv.rows() != f_bev.rows() || f_fpv.cols() != f_bev.cols())
    throw ShapeMismatch("fused features must have identical shapes");
  return f_fpv + eta * f_bev;
}

Eigen::MatrixXd one_hot_expand(const std::vector<std::uint16_t>& cells,
                               int channels) {
  if (channels <= 0) throw Error("channels must be positive");
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cells.size()), channels);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const std::uint16_t value = cells[static_cast<std::size_t>(i)];
    if (value >= channels)
      throw OutOfRange("cell value " + std::to_string(value) +
                       " exceeds one-hot channels");
    out(i, value) = 1.0;
  }
  return out;
}

Eigen::MatrixXd encode_condition(const FpvMask& mask, const BevGrid& grid,
                                 const Eigen::MatrixXd& enc_fpv,
                                 const Eigen::MatrixXd& enc_bev, double eta) {
  if (mask.cells.size() != grid.cells.size())
    throw ShapeMismatch("mask and grid cell counts differ");
  if (enc_fpv.rows() != enc_bev.rows())
    throw ShapeMismatch("encoder output dims differ");
  const Eigen::MatrixXd hot_fpv =
      one_hot_expand(mask.cells, static_cast<int>(enc_fpv.cols()));
  const Eigen::MatrixXd hot_bev =
      one_hot_expand(grid.cells, static_cast<int>(enc_bev.cols()));
  return fuse_fpv_bev(hot_fpv * enc_fpv.transpose(),
                      hot_bev * enc_bev.transpose(), eta);
}

TokenLabeling label_tokens(const FpvMask& mask, const IdMask& object_ids,
                           int latent_width, int latent_height,
                           const std::set<int>& shared_ids) {
  if (mask.width != object_ids.width || mask.height != object_ids.height)
    throw ShapeMismatch("class mask and id raster dims differ");
  if (latent_width <= 0 || latent_height <= 0)
    throw ShapeMismatch("latent dims must be positive");
  if (mask.width % latent_width != 0 || mask.height % latent_height != 0)
    throw ShapeMismatch("latent dims must divide the raster dims evenly");

  const int block_w = mask.width / latent_width;
  const int block_h = mask.height / latent_height;

  TokenLabeling out;
  out.latent_width = latent_width;
  out.latent_height = latent_height;
  out.labels.resize(static_cast<std::size_t>(latent_width) * latent_height);

  for (int lv = 0; lv < latent_height; ++lv) {
    for (int lu = 0; lu < latent_width; ++lu) {
      std::map<std::int32_t, int> counts;
      for (int py = lv * block_h; py < (lv + 1) * block_h; ++py) {
        for (int px = lu * block_w; px < (lu + 1) * block_w; ++px) {
          const std::int32_t id =
              object_ids.cells[static_cast<std::size_t>(py) * mask.width + px];
          if (id != 0) ++counts[id];
        }
      }
      TokenLabel label;
      if (!counts.empty()) {
        // Map iteration is id-ascending, so keeping strict maxima breaks
        // count ties toward the smaller id.
        std::int32_t best_id = 0;
        int best_count = 0;
        for (const auto& [id, count] : counts) {
          if (count > best_count) {
            best_id = id;
            best_count = count;
          }
        }
        label.object_id = best_id;
        label.category = shared_ids.count(best_id)
                             ? TokenCategory::kVStarObject
                             : TokenCategory::kObject;
      }
      out.labels[static_cast<std::size_t>(lv) * latent_width + lu] = label;
    }
  }
  return out;
}

}  // namespace v2xkit
