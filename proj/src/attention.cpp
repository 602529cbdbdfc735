#include "v2xkit/attention.hpp"

#include <cmath>

namespace v2xkit {

InstancePairing identity_pairing(const std::set<int>& shared_ids) {
  InstancePairing pairing;
  for (int id : shared_ids) pairing.pairs.insert({id, id});
  return pairing;
}

BiasMatrix build_roi_bias(const TokenLabeling& query_labels,
                          const TokenLabeling& key_labels, double alpha,
                          double beta, double tau_o, double tau_b,
                          const InstancePairing& pairing) {
  if (!(tau_o > tau_b && tau_b > 0.0))
    throw InvalidThresholds("need tau_o > tau_b > 0, got tau_o=" +
                            std::to_string(tau_o) +
                            " tau_b=" + std::to_string(tau_b));
  const Eigen::Index lq = static_cast<Eigen::Index>(query_labels.labels.size());
  const Eigen::Index lk = static_cast<Eigen::Index>(key_labels.labels.size());
  if (lq == 0 || lk == 0) throw ShapeMismatch("empty token labeling");

  BiasMatrix out;
  out.alpha = alpha;
  out.beta = beta;
  out.tau_o = tau_o;
  out.tau_b = tau_b;
  out.values.setZero(lq, lk);

  for (Eigen::Index k = 0; k < lq; ++k) {
    const TokenLabel& q = query_labels.labels[static_cast<std::size_t>(k)];
    const bool qv = q.category == TokenCategory::kVStarObject;
    for (Eigen::Index l = 0; l < lk; ++l) {
      const TokenLabel& key = key_labels.labels[static_cast<std::size_t>(l)];
      const bool kv = key.category == TokenCategory::kVStarObject;

      double s = 0.0;
      if (qv != kv) {
        s = -tau_o;
      } else if (qv && kv && !pairing.matches(q.object_id, key.object_id)) {
        s = -tau_o;
      }

      double b = 0.0;
      if (!qv && !kv) {
        const bool q_bg = q.category == TokenCategory::kBackground;
        const bool k_bg = key.category == TokenCategory::kBackground;
        const bool unrelated =
            (q_bg != k_bg) || (!q_bg && !k_bg && q.object_id != key.object_id);
        if (unrelated) b = -tau_b;
      }

      out.values(k, l) = alpha * s + beta * b;
    }
  }
  return out;
}

namespace {

void validate_weights(const AttentionWeights& w, Eigen::Index d) {
  if (w.wq.rows() != d || w.wk.rows() != d || w.wq.cols() != w.wk.cols() ||
      w.wq.cols() < 1)
    throw ShapeMismatch("query/key projections must be D x d_k");
  if (w.wv.rows() != d || w.wv.cols() != d)
    throw ShapeMismatch("value projection must be D x D");
  if (w.ffn_w1.cols() != d || w.ffn_w2.rows() != d ||
      w.ffn_w2.cols() != w.ffn_w1.rows())
    throw ShapeMismatch("ffn weights must be (d_ff x D, D x d_ff)");
  if (w.ln_scale.size() != d || w.ln_shift.size() != d)
    throw ShapeMismatch("layer-norm vectors must have dim D");
}

// Plain triple loop with a fixed accumulation order. The kernels are
// reference implementations, so the arithmetic order is part of the contract:
// reruns and independently coded checks can match them bit for bit.
Eigen::MatrixXd matmul(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd c(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  }
  return c;
}

void add_inplace(Eigen::MatrixXd& into, const Eigen::MatrixXd& term) {
  for (Eigen::Index i = 0; i < into.rows(); ++i)
    for (Eigen::Index j = 0; j < into.cols(); ++j) into(i, j) += term(i, j);
}

Eigen::MatrixXd scaled_scores(const Eigen::MatrixXd& f_query,
                              const Eigen::MatrixXd& f_key,
                              const AttentionWeights& w) {
  const Eigen::MatrixXd q = matmul(f_query, w.wq);
  const Eigen::MatrixXd k = matmul(f_key, w.wk);
  const double scale = std::sqrt(static_cast<double>(w.wq.cols()));
  Eigen::MatrixXd scores(q.rows(), k.rows());
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.rows(); ++j) {
      double acc = 0.0;
      for (Eigen::Index c = 0; c < q.cols(); ++c) acc += q(i, c) * k(j, c);
      scores(i, j) = acc / scale;
    }
  }
  return scores;
}

double gelu(double x) {
  return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0)));
}

}  // namespace

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    double row_max = logits(i, 0);
    for (Eigen::Index j = 1; j < logits.cols(); ++j)
      row_max = std::max(row_max, logits(i, j));
    double sum = 0.0;
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
      out(i, j) = std::exp(logits(i, j) - row_max);
      sum += out(i, j);
    }
    for (Eigen::Index j = 0; j < logits.cols(); ++j) out(i, j) /= sum;
  }
  return out;
}

Eigen::MatrixXd attention_probabilities(const Eigen::MatrixXd& f_query,
                                        const Eigen::MatrixXd& f_key,
                                        const AttentionWeights& w,
                                        const Eigen::MatrixXd& bias) {
  if (f_query.cols() != f_key.cols())
    throw ShapeMismatch("query and key feature dims differ");
  validate_weights(w, f_query.cols());
  Eigen::MatrixXd scores = scaled_scores(f_query, f_key, w);
  if (bias.size() != 0) {
    if (bias.rows() != scores.rows() || bias.cols() != scores.cols())
      throw ShapeMismatch("bias shape does not match the score matrix");
    add_inplace(scores, bias);
  }
  return softmax_rows(scores);
}

std::vector<FeatureMap> ego_view_attention(
    const std::vector<FeatureMap>& features, const ViewGraph& graph,
    const AttentionWeights& w) {
  if (features.empty()) return {};
  const Eigen::Index l = features[0].values.rows();
  const Eigen::Index d = features[0].values.cols();
  validate_weights(w, d);

  std::map<ViewVertex, const FeatureMap*> by_vertex;
  for (const FeatureMap& f : features) {
    if (f.values.rows() != l || f.values.cols() != d)
      throw ShapeMismatch("all feature maps must share L x D");
    by_vertex[f.vertex] = &f;
  }

  std::vector<FeatureMap> out;
  out.reserve(features.size());
  for (const FeatureMap& f : features) {
    FeatureMap result{f.vertex, f.values};
    for (const ViewVertex& n : neighbors(graph, f.vertex, EdgeFilter::kIntra)) {
      const auto it = by_vertex.find(n);
      if (it == by_vertex.end())
        throw Error("no feature map for neighbor " + vertex_label(n));
      const Eigen::MatrixXd& fj = it->second->values;
      const Eigen::MatrixXd probs = softmax_rows(scaled_scores(f.values, fj, w));
      add_inplace(result.values, matmul(probs, matmul(fj, w.wv)));
    }
    out.push_back(std::move(result));
  }
  return out;
}

FeatureMap cross_agent_attention(const FeatureMap& f,
                                 const std::vector<FeatureMap>& neighbor_features,
                                 const ViewGraph& graph,
                                 const std::vector<BiasMatrix>& biases,
                                 const AttentionWeights& w) {
  const Eigen::Index l = f.values.rows();
  const Eigen::Index d = f.values.cols();
  validate_weights(w, d);

  const std::vector<ViewVertex> expected =
      neighbors(graph, f.vertex, EdgeFilter::kCross);
  if (neighbor_features.size() != expected.size() ||
      biases.size() != expected.size())
    throw NeighborBiasMismatch(
        "need one neighbor feature map and one bias per cross neighbor");
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (!(neighbor_features[i].vertex == expected[i]))
      throw NeighborBiasMismatch("neighbor features must follow canonical "
                                 "order, expected " +
                                 vertex_label(expected[i]) + " at slot " +
                                 std::to_string(i));

  FeatureMap out{f.vertex, Eigen::MatrixXd::Zero(l, d)};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const Eigen::MatrixXd& fi = neighbor_features[i].values;
    if (fi.rows() != l || fi.cols() != d)
      throw ShapeMismatch("all feature maps must share L x D");
    const Eigen::MatrixXd probs =
        attention_probabilities(f.values, fi, w, biases[i].values);
    add_inplace(out.values, matmul(probs, matmul(fi, w.wv)));
  }
  return out;
}

FeatureMap refine(const FeatureMap& f, const FeatureMap& f_cross,
                  const AttentionWeights& w) {
  if (f.values.rows() != f_cross.values.rows() ||
      f.values.cols() != f_cross.values.cols())
    throw ShapeMismatch("residual and cross maps must share L x D");
  const Eigen::Index l = f.values.rows();
  const Eigen::Index d = f.values.cols();
  validate_weights(w, d);
  constexpr double kLnEpsilon = 1e-5;

  FeatureMap out{f.vertex, Eigen::MatrixXd(l, d)};
  Eigen::VectorXd row(d), normed(d);
  Eigen::VectorXd hidden(w.ffn_w1.rows());
  for (Eigen::Index i = 0; i < l; ++i) {
    for (Eigen::Index j = 0; j < d; ++j)
      row[j] = f.values(i, j) + f_cross.values(i, j);

    double mean = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) mean += row[j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (Eigen::Index j = 0; j < d; ++j)
      var += (row[j] - mean) * (row[j] - mean);
    var /= static_cast<double>(d);
    const double denom = std::sqrt(var + kLnEpsilon);
    for (Eigen::Index j = 0; j < d; ++j)
      normed[j] = (row[j] - mean) / denom * w.ln_scale[j] + w.ln_shift[j];

    for (Eigen::Index h = 0; h < hidden.size(); ++h) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) acc += w.ffn_w1(h, j) * normed[j];
      hidden[h] = gelu(acc);
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      double acc = 0.0;
      for (Eigen::Index h = 0; h < hidden.size(); ++h)
        acc += w.ffn_w2(j, h) * hidden[h];
      out.values(i, j) = acc;
    }
  }
  return out;
}

}  // namespace v2xkit
