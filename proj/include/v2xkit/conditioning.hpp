#pragma once

#include <map>
#include <set>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "v2xkit/geometry.hpp"

namespace v2xkit {

// Learned-parameter stand-ins. The toolkit treats embeddings and projection
// weights as plain matrices supplied by the caller; nothing here is trained.
using VStarEmbedding = Eigen::VectorXd;

struct ClassEmbeddingTable {
  std::map<ObjectClass, Eigen::VectorXd> rows;  // every row has dim d_cls
};

enum class TokenCategory { kBackground, kObject, kVStarObject };

struct TokenLabel {
  TokenCategory category = TokenCategory::kBackground;
  int object_id = 0;  // 0 for background tokens

  friend bool operator==(const TokenLabel&, const TokenLabel&) = default;
};

// One label per latent token, row-major, labels[v * latent_width + u].
struct TokenLabeling {
  int latent_width = 0;
  int latent_height = 0;
  std::vector<TokenLabel> labels;
};

// Sinusoidal features of a flat scalar list: for each input value x, for each
// band b in [0, bands), emits sin(2^b x) then cos(2^b x). Output order is
// input-major, so the vector reads [sin/cos bands of x0, of x1, ...].
Eigen::VectorXd fourier_encode(std::span<const double> values, int bands);

// fourier_encode over the 24 corner coordinates of the box, corner-major then
// x, y, z. Length 48 * bands.
Eigen::VectorXd fourier_encode_corners(const SceneObject& obj, int bands);

// Geometry token for one annotated box: the projection matrix applied to
// [fourier-encoded corners ; label embedding], where the label embedding is
// the class row plus the shared-visibility vector when the object has more
// than one observer. vstar must match the class embedding dim, and
// projection.cols() must equal the concatenated length.
// Throws UnknownClass when the class has no table row.
Eigen::VectorXd make_object_token(const SceneObject& obj,
                                  const ClassEmbeddingTable& table,
                                  const VStarEmbedding& vstar,
                                  const Eigen::MatrixXd& projection,
                                  int bands);

// Elementwise f_fpv + eta * f_bev. Throws ShapeMismatch on different shapes.
Eigen::MatrixXd fuse_fpv_bev(const Eigen::MatrixXd& f_fpv,
                             const Eigen::MatrixXd& f_bev, double eta);

// One row per cell (row-major), channel c set to 1 where the cell value is c.
// Throws OutOfRange when a cell value is >= channels.
Eigen::MatrixXd one_hot_expand(const std::vector<std::uint16_t>& cells,
                               int channels);

// Reference conditioning path: one-hot expand both rasters, push each through
// its per-cell linear encoder (feature row = encoder * one-hot row), then fuse
// with weight eta. Cell counts and encoder output dims must agree across the
// two branches; throws ShapeMismatch otherwise.
Eigen::MatrixXd encode_condition(const FpvMask& mask, const BevGrid& grid,
                                 const Eigen::MatrixXd& enc_fpv,
                                 const Eigen::MatrixXd& enc_bev, double eta);

// Collapses an object-id raster onto a latent token grid. Each token covers
// an equal pixel block; its id is the majority nonzero id in the block with
// ties broken toward the smaller id, or background when the block is all
// zero. Tokens whose id is in shared_ids are labeled as shared-visibility
// objects. Raster dims must match and divide evenly by the latent dims;
// throws ShapeMismatch otherwise.
TokenLabeling label_tokens(const FpvMask& mask, const IdMask& object_ids,
                           int latent_width, int latent_height,
                           const std::set<int>& shared_ids);

}  // namespace v2xkit
