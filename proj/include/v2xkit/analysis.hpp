#pragma once

#include <vector>

#include <Eigen/Dense>

#include "v2xkit/viewgraph.hpp"

namespace v2xkit {

struct Embedding {
  int object_id = 0;
  Eigen::VectorXd values;
};

// Object ids are unique within a set.
using EmbeddingSet = std::vector<Embedding>;

struct RetrievalReport {
  double mean_sim = 0.0;  // mean cosine between each query and its true match
  double mrr = 0.0;       // mean reciprocal rank of the true match
  double top1 = 0.0;      // fraction of queries whose true match ranks first
  int n_queries = 0;
};

// Graphs at successive frames; all frames share one vertex set.
using GraphSequence = std::vector<ViewGraph>;

struct ComplexityReport {
  double c_in = 0.0;
  double c_cr = 0.0;
  double c_couple = 0.0;   // 2 sqrt(c_in * c_cr)
  double c_joint = 0.0;    // c_in + c_cr + c_couple
  double rho_reduce = 0.0; // c_couple / c_joint, 0 when c_joint is 0
};

struct GradientConflictReport {
  double cosine = 0.0;
  double combined_sq_norm = 0.0;  // |g1 + g2|^2
  bool conflict = false;          // cosine <= 0
};

// a . b / (|a| |b|). Throws ZeroVector on a zero norm, ShapeMismatch on
// different dims.
double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Ranks every candidate per query by cosine, descending, ties broken toward
// the smaller object id, and scores the candidate carrying the query's id.
// Throws MissingMatch when a query id is absent from the candidates and
// Error on duplicate ids within either set. Zero queries yield a zero report.
RetrievalReport retrieval_metrics(const EmbeddingSet& queries,
                                  const EmbeddingSet& candidates);

// Mean filtered edge count times the mean Bernoulli variance p(1-p) over the
// vertex pairs that are a filtered edge in at least one frame, where p is the
// fraction of frames activating the pair. Static sequences and single frames
// give 0. Throws EmptySequence on no frames, Error when vertex sets differ.
double graph_complexity(const GraphSequence& frames, EdgeFilter filter);

// Couples the two complexities: c_couple = 2 sqrt(c_in c_cr), c_joint is the
// sum of all three terms, rho_reduce their ratio. Throws NegativeComplexity
// on negative inputs.
ComplexityReport complexity_report(double c_in, double c_cr);

// Cosine between two task gradients plus the squared norm of their sum; a
// pair conflicts when the cosine is non-positive. Throws ZeroVector /
// ShapeMismatch like cosine_similarity.
GradientConflictReport gradient_conflict(const Eigen::VectorXd& g1,
                                         const Eigen::VectorXd& g2);

}  // namespace v2xkit
