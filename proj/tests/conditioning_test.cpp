#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "test_support.hpp"
#include "v2xkit/conditioning.hpp"

using namespace v2xkit;
using testsupport::make_object;
using testsupport::random_object;
using testsupport::uniform;

TEST_CASE("fourier encoding: fixed values, ordering, and band doubling") {
  const double values[1] = {M_PI};
  const Eigen::VectorXd enc = fourier_encode(std::span<const double>(values, 1), 1);
  REQUIRE(enc.size() == 2);
  CHECK(std::abs(enc[0] - 0.0) <= 1e-15);  // sin(pi)
  CHECK(std::abs(enc[1] + 1.0) <= 1e-15);  // cos(pi)

  // Input-major layout with frequencies doubling per band.
  const double two[2] = {0.3, -1.7};
  const Eigen::VectorXd e2 = fourier_encode(std::span<const double>(two, 2), 3);
  REQUIRE(e2.size() == 12);
  std::size_t k = 0;
  for (double x : two)
    for (int b = 0; b < 3; ++b) {
      const double angle = x * std::pow(2.0, b);
      CHECK(e2[k++] == std::sin(angle));
      CHECK(e2[k++] == std::cos(angle));
    }

  CHECK_THROWS_AS(fourier_encode(std::span<const double>(two, 2), 0), Error);
}

TEST_CASE("fourier encoding stays on the unit circle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    double values[4];
    for (double& v : values) v = uniform(rng, -100.0, 100.0);
    const Eigen::VectorXd enc =
        fourier_encode(std::span<const double>(values, 4), 5);
    REQUIRE(enc.size() == 40);
    for (Eigen::Index i = 0; i < enc.size(); i += 2)
      CHECK(std::abs(enc[i] * enc[i] + enc[i + 1] * enc[i + 1] - 1.0) <= 1e-12);
  }
}

TEST_CASE("corner encoding flattens corner-major x, y, z") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const SceneObject obj = random_object(rng, trial + 1);
    const Eigen::VectorXd got = fourier_encode_corners(obj, 2);
    REQUIRE(got.size() == 96);

    const auto corners = oracle::box_corners(obj);
    double flat[24];
    for (int i = 0; i < 8; ++i) {
      flat[3 * i + 0] = corners[i].x();
      flat[3 * i + 1] = corners[i].y();
      flat[3 * i + 2] = corners[i].z();
    }
    const Eigen::VectorXd want =
        fourier_encode(std::span<const double>(flat, 24), 2);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

namespace {

ClassEmbeddingTable small_table(int d_cls) {
  ClassEmbeddingTable table;
  for (int c = 1; c <= 5; ++c) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(d_cls);
    row[(c - 1) % d_cls] = static_cast<double>(c);
    table.rows[static_cast<ObjectClass>(c)] = row;
  }
  return table;
}

}  // namespace

TEST_CASE("object tokens add the shared-visibility vector iff jointly observed") {
  const int d_cls = 4;
  const int bands = 1;
  const int total = 48 * bands + d_cls;
  const ClassEmbeddingTable table = small_table(d_cls);
  VStarEmbedding vstar(d_cls);
  vstar << 0.5, -1.0, 2.0, 0.25;
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(total, total);

  SceneObject solo = make_object(1, {3, 4, 0.8}, {4, 2, 1.6}, 0.7,
                                 ObjectClass::kVan, {0});
  SceneObject joint = solo;
  joint.observers = {0, 1};

  const Eigen::VectorXd t_solo = make_object_token(solo, table, vstar, identity, bands);
  const Eigen::VectorXd t_joint = make_object_token(joint, table, vstar, identity, bands);
  REQUIRE(t_solo.size() == total);

  // Identical geometry slice, label slice differs by exactly vstar.
  CHECK((t_joint.head(48) - t_solo.head(48)).isZero(0.0));
  CHECK((t_joint.tail(d_cls) - t_solo.tail(d_cls) - vstar).isZero(0.0));
  CHECK((t_solo.tail(d_cls) - table.rows.at(ObjectClass::kVan)).isZero(0.0));
  CHECK((t_solo.head(48) - fourier_encode_corners(solo, bands)).isZero(0.0));

  // Three observers count as jointly observed too.
  SceneObject triple = solo;
  triple.observers = {0, 1, 2};
  const Eigen::VectorXd t_triple =
      make_object_token(triple, table, vstar, identity, bands);
  CHECK((t_triple - t_joint).isZero(0.0));
}

TEST_CASE("object tokens project the concatenated vector") {
  std::mt19937_64 rng(33);
  const int d_cls = 3;
  const int bands = 2;
  const int total = 48 * bands + d_cls;
  const ClassEmbeddingTable table = small_table(d_cls);
  VStarEmbedding vstar(d_cls);
  vstar << 1.0, 2.0, 3.0;

  Eigen::MatrixXd projection(8, total);
  for (Eigen::Index i = 0; i < projection.rows(); ++i)
    for (Eigen::Index j = 0; j < projection.cols(); ++j)
      projection(i, j) = uniform(rng, -1.0, 1.0);

  for (int trial = 0; trial < 20; ++trial) {
    SceneObject obj = random_object(rng, trial + 1);
    if (trial % 2 == 1) obj.observers = {0, 1};
    const Eigen::VectorXd got =
        make_object_token(obj, table, vstar, projection, bands);

    Eigen::VectorXd concat(total);
    concat.head(48 * bands) = fourier_encode_corners(obj, bands);
    concat.tail(d_cls) = table.rows.at(obj.class_label);
    if (obj.observers.size() > 1) concat.tail(d_cls) += vstar;
    CHECK((got - projection * concat).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("object token shape and class errors") {
  const ClassEmbeddingTable table = small_table(4);
  ClassEmbeddingTable missing;
  missing.rows[ObjectClass::kCar] = Eigen::VectorXd::Zero(4);
  const SceneObject van =
      make_object(1, {3, 4, 0.8}, {4, 2, 1.6}, 0.0, ObjectClass::kVan, {0});
  const Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(2, 52);

  CHECK_THROWS_AS(
      make_object_token(van, missing, Eigen::VectorXd::Zero(4), proj, 1),
      UnknownClass);
  CHECK_THROWS_AS(
      make_object_token(van, table, Eigen::VectorXd::Zero(3), proj, 1),
      ShapeMismatch);
  CHECK_THROWS_AS(make_object_token(van, table, Eigen::VectorXd::Zero(4),
                                    Eigen::MatrixXd::Zero(2, 51), 1),
                  ShapeMismatch);
}

TEST_CASE("fpv/bev fusion is exact at eta 0 and linear in eta") {
  std::mt19937_64 rng(34);
  Eigen::MatrixXd f(5, 7), b(5, 7);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    f.data()[i] = uniform(rng, -2.0, 2.0);
    b.data()[i] = uniform(rng, -2.0, 2.0);
  }
  CHECK(fuse_fpv_bev(f, b, 0.0) == f);
  const Eigen::MatrixXd fused = fuse_fpv_bev(f, b, 0.1);
  for (Eigen::Index i = 0; i < f.rows(); ++i)
    for (Eigen::Index j = 0; j < f.cols(); ++j)
      CHECK(std::abs(fused(i, j) - (f(i, j) + 0.1 * b(i, j))) <= 1e-12);
  // Linearity: fusing twice the eta doubles the bev share.
  const Eigen::MatrixXd fused2 = fuse_fpv_bev(f, b, 0.2);
  CHECK(((fused2 - f) - 2.0 * (fused - f)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(fuse_fpv_bev(f, Eigen::MatrixXd::Zero(5, 6), 0.1),
                  ShapeMismatch);
}

TEST_CASE("one-hot expansion puts a single 1 per row") {
  const std::vector<std::uint16_t> cells = {0, 2, 1, 2};
  const Eigen::MatrixXd hot = one_hot_expand(cells, 3);
  REQUIRE(hot.rows() == 4);
  REQUIRE(hot.cols() == 3);
  for (Eigen::Index i = 0; i < hot.rows(); ++i) {
    CHECK(hot.row(i).sum() == 1.0);
    CHECK(hot(i, cells[static_cast<std::size_t>(i)]) == 1.0);
  }
  CHECK_THROWS_AS(one_hot_expand({3}, 3), OutOfRange);
  CHECK_THROWS_AS(one_hot_expand(cells, 0), Error);
}

TEST_CASE("conditioning encodes one-hot cells through the linear encoders") {
  std::mt19937_64 rng(35);
  FpvMask mask;
  mask.width = 4;
  mask.height = 3;
  mask.cells = {0, 1, 2, 5, 0, 0, 3, 4, 1, 0, 2, 5};
  BevGrid grid;
  grid.width = 4;
  grid.height = 3;
  grid.cells = {5, 0, 1, 0, 2, 2, 0, 0, 4, 1, 0, 3};

  const int channels = 6;
  const int dim = 5;
  Eigen::MatrixXd enc_fpv(dim, channels), enc_bev(dim, channels);
  for (Eigen::Index i = 0; i < enc_fpv.size(); ++i) {
    enc_fpv.data()[i] = uniform(rng, -1.0, 1.0);
    enc_bev.data()[i] = uniform(rng, -1.0, 1.0);
  }

  const double eta = 0.1;
  const Eigen::MatrixXd out = encode_condition(mask, grid, enc_fpv, enc_bev, eta);
  REQUIRE(out.rows() == 12);
  REQUIRE(out.cols() == dim);
  // Row i is the fpv encoder column for the class at cell i plus eta times
  // the bev encoder column for the bev class there.
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const Eigen::VectorXd want =
        enc_fpv.col(mask.cells[static_cast<std::size_t>(i)]) +
        eta * enc_bev.col(grid.cells[static_cast<std::size_t>(i)]);
    CHECK((out.row(i).transpose() - want).cwiseAbs().maxCoeff() <= 1e-12);
  }

  BevGrid short_grid = grid;
  short_grid.cells.pop_back();
  CHECK_THROWS_AS(encode_condition(mask, short_grid, enc_fpv, enc_bev, eta),
                  ShapeMismatch);
  CHECK_THROWS_AS(
      encode_condition(mask, grid, enc_fpv, Eigen::MatrixXd::Zero(4, 6), eta),
      ShapeMismatch);
}

namespace {

FpvMask class_mask_like(const IdMask& ids) {
  FpvMask mask;
  mask.width = ids.width;
  mask.height = ids.height;
  mask.cells.assign(ids.cells.size(), 0);
  for (std::size_t i = 0; i < ids.cells.size(); ++i)
    mask.cells[i] = ids.cells[i] == 0 ? 0 : 1;
  return mask;
}

}  // namespace

TEST_CASE("token labels: majority id, small-id ties, shared flags") {
  IdMask ids;
  ids.width = 4;
  ids.height = 4;
  ids.cells = {
      1, 1, 7, 7,   // top-left block: 1x2 vs 2x1 -> majority 1... laid out below
      1, 2, 7, 0,
      0, 0, 3, 3,
      0, 0, 5, 3,
  };
  // Blocks (2x2): [1,1,1,2] majority 1; [7,7,7,0] majority 7;
  // [0,0,0,0] background; [3,3,5,3] majority 3.
  const TokenLabeling labeling =
      label_tokens(class_mask_like(ids), ids, 2, 2, {7});
  REQUIRE(labeling.labels.size() == 4);
  CHECK(labeling.labels[0] == TokenLabel{TokenCategory::kObject, 1});
  CHECK(labeling.labels[1] == TokenLabel{TokenCategory::kVStarObject, 7});
  CHECK(labeling.labels[2] == TokenLabel{TokenCategory::kBackground, 0});
  CHECK(labeling.labels[3] == TokenLabel{TokenCategory::kObject, 3});

  // Even split breaks toward the smaller id.
  IdMask tie;
  tie.width = 2;
  tie.height = 2;
  tie.cells = {9, 9, 4, 4};
  const TokenLabeling tied = label_tokens(class_mask_like(tie), tie, 1, 1, {});
  CHECK(tied.labels[0] == TokenLabel{TokenCategory::kObject, 4});
}

TEST_CASE("token labels match the counting oracle on random rasters") {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 50; ++trial) {
    IdMask ids;
    ids.width = 60;
    ids.height = 34;
    ids.cells.resize(static_cast<std::size_t>(ids.width) * ids.height);
    for (auto& cell : ids.cells)
      cell = static_cast<std::int32_t>(testsupport::uniform_int(rng, 0, 5));
    const std::set<int> shared = {1, 4};

    const TokenLabeling got =
        label_tokens(class_mask_like(ids), ids, 30, 17, shared);
    REQUIRE(got.latent_width == 30);
    REQUIRE(got.latent_height == 17);
    for (int lv = 0; lv < 17; ++lv)
      for (int lu = 0; lu < 30; ++lu)
        CHECK(got.labels[static_cast<std::size_t>(lv) * 30 + lu] ==
              oracle::block_label(ids, lu * 2, lv * 2, 2, 2, shared));
  }
}

TEST_CASE("token labeling rejects mismatched or indivisible shapes") {
  IdMask ids;
  ids.width = 4;
  ids.height = 4;
  ids.cells.assign(16, 0);
  FpvMask mask = class_mask_like(ids);

  FpvMask wrong = mask;
  wrong.width = 8;
  wrong.cells.resize(32, 0);
  CHECK_THROWS_AS(label_tokens(wrong, ids, 2, 2, {}), ShapeMismatch);
  CHECK_THROWS_AS(label_tokens(mask, ids, 3, 2, {}), ShapeMismatch);
  CHECK_THROWS_AS(label_tokens(mask, ids, 0, 2, {}), ShapeMismatch);
  CHECK_THROWS_AS(label_tokens(mask, ids, 2, -1, {}), ShapeMismatch);
}
