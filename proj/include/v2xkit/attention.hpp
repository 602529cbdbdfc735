#pragma once

#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "v2xkit/conditioning.hpp"
#include "v2xkit/viewgraph.hpp"

namespace v2xkit {

// L x D token features belonging to one camera view.
struct FeatureMap {
  ViewVertex vertex;
  Eigen::MatrixXd values;
};

// Single-head weights shared by every view. Queries/keys project D -> d_k,
// values D -> D. The refinement step uses layer norm over the feature axis
// followed by a two-layer net: w2 * gelu(w1 * x).
struct AttentionWeights {
  Eigen::MatrixXd wq;        // D x d_k
  Eigen::MatrixXd wk;        // D x d_k
  Eigen::MatrixXd wv;        // D x D
  Eigen::MatrixXd ffn_w1;    // d_ff x D
  Eigen::MatrixXd ffn_w2;    // D x d_ff
  Eigen::VectorXd ln_scale;  // D
  Eigen::VectorXd ln_shift;  // D
};

// Pairwise attention bias between one query view's tokens and one key view's
// tokens, plus the scalars it was built with. Off-diagonal semantics: zero
// keeps a pair, -alpha*tau_o suppresses object isolation violations,
// -beta*tau_b softly suppresses unrelated background-side pairs.
struct BiasMatrix {
  Eigen::MatrixXd values;  // L_q x L_k
  double alpha = 1.0;
  double beta = 1.0;
  double tau_o = 30.0;
  double tau_b = 1.0;
};

// Which (query id, key id) pairs count as the same physical instance.
// Shared ids are global in generated scenes, so the usual pairing is the
// identity over the jointly observed id set.
struct InstancePairing {
  std::set<std::pair<int, int>> pairs;

  bool matches(int query_id, int key_id) const {
    return pairs.count({query_id, key_id}) > 0;
  }
};

InstancePairing identity_pairing(const std::set<int>& shared_ids);

// Bias M = alpha * S + beta * B over a query/key labeling pair:
//   S(k,l) = -tau_o * [ exactly one of k,l is a shared-object token
//                       + both are shared-object tokens of different instances ]
//   B(k,l) = -tau_b * [ neither is a shared-object token ] * unrelated(k,l)
// where unrelated means different object ids or exactly one background token;
// background-background pairs stay zero. Requires tau_o > tau_b > 0
// (InvalidThresholds otherwise).
BiasMatrix build_roi_bias(const TokenLabeling& query_labels,
                          const TokenLabeling& key_labels, double alpha,
                          double beta, double tau_o, double tau_b,
                          const InstancePairing& pairing);

// Row-wise softmax with max subtraction. Every row sums to 1; rows that are
// uniformly very negative still normalize (no masking to -inf).
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

// Scaled dot-product attention probabilities softmax(Q K^T / sqrt(d_k) + M);
// pass an empty bias for none. Exposed so callers can inspect where the mass
// lands under a bias.
Eigen::MatrixXd attention_probabilities(const Eigen::MatrixXd& f_query,
                                        const Eigen::MatrixXd& f_key,
                                        const AttentionWeights& w,
                                        const Eigen::MatrixXd& bias);

// For every view c: f'_c = f_c + sum over same-agent neighbors j of
// softmax(Q_c K_j^T / sqrt(d_k)) V_j, all terms computed from the input
// features. Views with no intra neighbors pass through unchanged. All maps
// must share L x D (ShapeMismatch) and every vertex must be in the graph
// (UnknownVertex).
std::vector<FeatureMap> ego_view_attention(
    const std::vector<FeatureMap>& features, const ViewGraph& graph,
    const AttentionWeights& w);

// f''_j = sum over cross-agent neighbors i of
// softmax(Q_j K_i^T / sqrt(d_k) + M_ji) V_i. No residual, and the sum over
// neighbors is left unnormalized. neighbor_features and biases must line up
// with neighbors(graph, f.vertex, kCross) in canonical order
// (NeighborBiasMismatch). No neighbors yields the zero map.
FeatureMap cross_agent_attention(const FeatureMap& f,
                                 const std::vector<FeatureMap>& neighbor_features,
                                 const ViewGraph& graph,
                                 const std::vector<BiasMatrix>& biases,
                                 const AttentionWeights& w);

// f~ = ffn(layer_norm(f + f_cross)). Layer norm runs over the feature axis
// with epsilon 1e-5 (biased variance); a constant row therefore normalizes to
// zero before scale/shift.
FeatureMap refine(const FeatureMap& f, const FeatureMap& f_cross,
                  const AttentionWeights& w);

}  // namespace v2xkit
