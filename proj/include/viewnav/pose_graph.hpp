#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "viewnav/embedding.hpp"
#include "viewnav/geometry.hpp"
#include "viewnav/parallel.hpp"

namespace viewnav {

using NodeId = std::int64_t;

struct VlpgNode {
  NodeId id = 0;
  Pose2D pose;
  EmbeddingVector embedding;
  double timestamp = 0.0;
};

/// Odometry-style link between consecutively accepted nodes. Stored for
/// pose-graph tooling; nothing optimises over it.
struct VlpgEdge {
  NodeId from = 0;
  NodeId to = 0;
  Pose2D relative;  ///< pose of `to` expressed in the frame of `from`
};

/// Visual-language pose graph: camera poses annotated with the embedding of
/// the view from each pose.
///
/// Insertion is gated on novelty: a view is kept only when its cosine
/// similarity to every stored view is below epsilon, so standstill frames and
/// repeated views collapse to a single node.
class Vlpg {
 public:
  explicit Vlpg(double insertion_epsilon = 0.97);

  /// Appends the node iff cos(embedding, q) < epsilon for every stored q.
  /// An accepted node is linked to the previously accepted one.
  bool record_node(const Pose2D& pose, EmbeddingVector embedding, double timestamp,
                   Execution exec = Execution::serial);

  /// Highest cosine similarity between `embedding` and any stored node
  /// (-1 for an empty graph).
  double max_similarity(const EmbeddingVector& embedding, Execution exec = Execution::serial) const;

  const std::vector<VlpgNode>& nodes() const { return nodes_; }
  const std::vector<VlpgEdge>& edges() const { return edges_; }
  double epsilon() const { return epsilon_; }
  /// Zero until the first node fixes it.
  std::size_t embedding_length() const { return embedding_length_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  /// Throws std::out_of_range for an unknown id.
  const VlpgNode& node(NodeId id) const;

  /// Line-delimited JSON: a header line, then one line per node.
  void save(std::ostream& out) const;
  static Vlpg load(std::istream& in);

 private:
  double epsilon_;
  std::size_t embedding_length_ = 0;
  NodeId next_id_ = 0;
  std::vector<VlpgNode> nodes_;
  std::vector<VlpgEdge> edges_;
};

struct NodeScore {
  NodeId id = 0;
  double positive = 0.0;  ///< cosine with "A photo of {object}"
  double negative = 0.0;  ///< cosine with "A photo of something else"
  bool background = false;

  friend bool operator==(const NodeScore&, const NodeScore&) = default;
};

/// Scores every node against the prompt pair. Throws on an empty graph.
std::vector<NodeScore> score_nodes(const Vlpg& graph, const PromptPair& prompts,
                                   const EmbeddingProvider& provider,
                                   Execution exec = Execution::serial);

/// Up to k non-background scores, best first; equal scores keep the lower id.
std::vector<NodeScore> top_k(std::span<const NodeScore> scores, std::size_t k);

}  // namespace viewnav
