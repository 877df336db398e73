#include "viewnav/pose_graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace viewnav {
namespace {

constexpr const char* kFormat = "vlpg-ndjson-1";

Pose2D relative_pose(const Pose2D& from, const Pose2D& to) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const double c = std::cos(from.theta);
  const double s = std::sin(from.theta);
  return {c * dx + s * dy, -s * dx + c * dy, to.theta - from.theta};
}

}  // namespace

Vlpg::Vlpg(double insertion_epsilon) : epsilon_(insertion_epsilon) {
  if (!(insertion_epsilon > 0.0 && insertion_epsilon <= 1.0))
    throw std::invalid_argument("Vlpg: epsilon must be in (0, 1]");
}

double Vlpg::max_similarity(const EmbeddingVector& embedding, Execution exec) const {
  if (nodes_.empty()) return -1.0;
  std::vector<double> sims(nodes_.size());
  for_each_index(nodes_.size(), exec,
                 [&](std::size_t i) { sims[i] = cosine_similarity(embedding, nodes_[i].embedding); });
  return *std::max_element(sims.begin(), sims.end());
}

bool Vlpg::record_node(const Pose2D& pose, EmbeddingVector embedding, double timestamp,
                       Execution exec) {
  if (embedding_length_ != 0 && embedding.size() != embedding_length_)
    throw std::invalid_argument("Vlpg::record_node: embedding length mismatch");
  if (!nodes_.empty() && max_similarity(embedding, exec) >= epsilon_) return false;

  if (embedding_length_ == 0) embedding_length_ = embedding.size();
  const NodeId id = next_id_++;
  if (!nodes_.empty()) {
    const auto& prev = nodes_.back();
    edges_.push_back({prev.id, id, relative_pose(prev.pose, pose)});
  }
  nodes_.push_back({id, pose, std::move(embedding), timestamp});
  return true;
}

const VlpgNode& Vlpg::node(NodeId id) const {
  // ids are dense and increasing, so the lookup is positional when possible.
  if (id >= 0 && static_cast<std::size_t>(id) < nodes_.size() &&
      nodes_[static_cast<std::size_t>(id)].id == id)
    return nodes_[static_cast<std::size_t>(id)];
  const auto it = std::find_if(nodes_.begin(), nodes_.end(), [id](const auto& n) { return n.id == id; });
  if (it == nodes_.end()) throw std::out_of_range("Vlpg::node: unknown id " + std::to_string(id));
  return *it;
}

void Vlpg::save(std::ostream& out) const {
  out << nlohmann::json{{"format", kFormat},
                        {"epsilon", epsilon_},
                        {"embedding_length", embedding_length_},
                        {"node_count", nodes_.size()}}
             .dump()
      << '\n';
  std::size_t edge = 0;
  for (const auto& n : nodes_) {
    nlohmann::json line{{"id", n.id},
                        {"pose", {n.pose.x, n.pose.y, n.pose.theta}},
                        {"timestamp", n.timestamp},
                        {"embedding", n.embedding.values()}};
    if (edge < edges_.size() && edges_[edge].to == n.id) {
      const auto& e = edges_[edge++];
      line["edge"] = {{"from", e.from}, {"relative", {e.relative.x, e.relative.y, e.relative.theta}}};
    }
    out << line.dump() << '\n';
  }
}

Vlpg Vlpg::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("Vlpg::load: missing header");
  const auto header = nlohmann::json::parse(line);
  if (header.value("format", std::string{}) != kFormat)
    throw std::runtime_error("Vlpg::load: unsupported format");
  Vlpg g(header.at("epsilon").get<double>());
  const auto length = header.at("embedding_length").get<std::size_t>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const auto p = j.at("pose");
    VlpgNode node{j.at("id").get<NodeId>(),
                  Pose2D(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()),
                  EmbeddingVector(j.at("embedding").get<std::vector<double>>()),
                  j.at("timestamp").get<double>()};
    if (node.embedding.size() != length)
      throw std::runtime_error("Vlpg::load: embedding length differs from header");
    if (j.contains("edge")) {
      const auto& e = j.at("edge");
      const auto r = e.at("relative");
      g.edges_.push_back({e.at("from").get<NodeId>(), node.id,
                          Pose2D(r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>())});
    }
    g.next_id_ = std::max(g.next_id_, node.id + 1);
    g.nodes_.push_back(std::move(node));
  }
  g.embedding_length_ = g.nodes_.empty() ? 0 : length;
  return g;
}

std::vector<NodeScore> score_nodes(const Vlpg& graph, const PromptPair& prompts,
                                   const EmbeddingProvider& provider, Execution exec) {
  if (graph.empty()) throw std::invalid_argument("score_nodes: empty graph");
  const EmbeddingVector pos = provider.embed_text(prompts.positive);
  const EmbeddingVector neg = provider.embed_text(prompts.negative);
  const auto& nodes = graph.nodes();
  std::vector<NodeScore> out(nodes.size());
  for_each_index(nodes.size(), exec, [&](std::size_t i) {
    const double p = cosine_similarity(nodes[i].embedding, pos);
    const double n = cosine_similarity(nodes[i].embedding, neg);
    out[i] = {nodes[i].id, p, n, n > p};
  });
  return out;
}

std::vector<NodeScore> top_k(std::span<const NodeScore> scores, std::size_t k) {
  if (k == 0) throw std::invalid_argument("top_k: k must be >= 1");
  std::vector<NodeScore> kept;
  for (const auto& s : scores)
    if (!s.background) kept.push_back(s);
  std::sort(kept.begin(), kept.end(), [](const NodeScore& a, const NodeScore& b) {
    if (a.positive != b.positive) return a.positive > b.positive;
    return a.id < b.id;
  });
  if (kept.size() > k) kept.resize(k);
  return kept;
}

}  // namespace viewnav
