#include "v2xkit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace v2xkit {

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size())
    throw ShapeMismatch("cosine of vectors with different dims");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0)
    throw ZeroVector("cosine of a zero vector is undefined");
  return a.dot(b) / (na * nb);
}

RetrievalReport retrieval_metrics(const EmbeddingSet& queries,
                                  const EmbeddingSet& candidates) {
  std::set<int> seen;
  for (const Embedding& e : queries)
    if (!seen.insert(e.object_id).second)
      throw Error("duplicate query id " + std::to_string(e.object_id));
  seen.clear();
  for (const Embedding& e : candidates)
    if (!seen.insert(e.object_id).second)
      throw Error("duplicate candidate id " + std::to_string(e.object_id));

  RetrievalReport report;
  report.n_queries = static_cast<int>(queries.size());
  if (queries.empty()) return report;

  for (const Embedding& q : queries) {
    const Embedding* match = nullptr;
    for (const Embedding& c : candidates)
      if (c.object_id == q.object_id) match = &c;
    if (match == nullptr)
      throw MissingMatch("query id " + std::to_string(q.object_id) +
                         " has no candidate");

    const double match_sim = cosine_similarity(q.values, match->values);
    int rank = 1;
    for (const Embedding& c : candidates) {
      if (c.object_id == q.object_id) continue;
      const double sim = cosine_similarity(q.values, c.values);
      if (sim > match_sim || (sim == match_sim && c.object_id < q.object_id))
        ++rank;
    }
    report.mean_sim += match_sim;
    report.mrr += 1.0 / rank;
    if (rank == 1) report.top1 += 1.0;
  }
  report.mean_sim /= queries.size();
  report.mrr /= queries.size();
  report.top1 /= queries.size();
  return report;
}

double graph_complexity(const GraphSequence& frames, EdgeFilter filter) {
  if (frames.empty()) throw EmptySequence("no graph frames");
  for (const ViewGraph& g : frames)
    if (g.vertices != frames[0].vertices)
      throw Error("all frames must share one vertex set");

  const double t = static_cast<double>(frames.size());
  double total_edges = 0.0;
  std::map<std::pair<ViewVertex, ViewVertex>, int> active_frames;
  for (const ViewGraph& g : frames) {
    std::set<std::pair<ViewVertex, ViewVertex>> in_frame;
    for (const ViewEdge& e : g.edges) {
      if (!edge_matches(e, filter)) continue;
      in_frame.insert({e.u, e.v});
    }
    total_edges += static_cast<double>(in_frame.size());
    for (const auto& pair : in_frame) ++active_frames[pair];
  }

  if (active_frames.empty()) return 0.0;
  double mean_var = 0.0;
  for (const auto& [pair, count] : active_frames) {
    const double p = static_cast<double>(count) / t;
    mean_var += p * (1.0 - p);
  }
  mean_var /= static_cast<double>(active_frames.size());
  return (total_edges / t) * mean_var;
}

ComplexityReport complexity_report(double c_in, double c_cr) {
  if (c_in < 0.0 || c_cr < 0.0)
    throw NegativeComplexity("complexities must be non-negative");
  ComplexityReport report;
  report.c_in = c_in;
  report.c_cr = c_cr;
  report.c_couple = 2.0 * std::sqrt(c_in * c_cr);
  report.c_joint = c_in + c_cr + report.c_couple;
  report.rho_reduce =
      report.c_joint == 0.0 ? 0.0 : report.c_couple / report.c_joint;
  return report;
}

GradientConflictReport gradient_conflict(const Eigen::VectorXd& g1,
                                         const Eigen::VectorXd& g2) {
  GradientConflictReport report;
  report.cosine = cosine_similarity(g1, g2);
  report.combined_sq_norm = (g1 + g2).squaredNorm();
  report.conflict = report.cosine <= 0.0;
  return report;
}

}  // namespace v2xkit
