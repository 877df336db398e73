#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "viewnav/embedding.hpp"

namespace viewnav {

// Wire protocol of the embedding sidecar:
//   GET  /info  -> {"dimension": N, "model": "..."}
//   POST /embed <- {"op": "embed_text" | "embed_image", "payload": "..."}
//               -> {"vector": [float, ...]}
// embed_text carries UTF-8 text; embed_image carries base64 bytes. Simulated
// views are sent as the base64 of their JSON label list.
namespace wire {

std::string base64_encode(std::string_view bytes);
/// Throws std::invalid_argument on characters outside the base64 alphabet.
std::string base64_decode(std::string_view text);

std::string observation_bytes(const Observation& observation);
Observation parse_observation_bytes(std::string_view bytes);

std::string make_embed_request(std::string_view op, std::string_view payload);
std::vector<double> parse_embed_response(std::string_view body);

struct ServiceInfo {
  std::size_t dimension = 0;
  std::string model;
};
ServiceInfo parse_info(std::string_view body);

}  // namespace wire

/// EmbeddingProvider backed by the HTTP sidecar. Requests on one instance are
/// serialised over a single connection.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
 public:
  /// `endpoint` is a base URL such as "http://127.0.0.1:8088". Queries /info
  /// immediately; throws std::runtime_error when the service is unreachable.
  explicit RemoteEmbeddingProvider(const std::string& endpoint);
  ~RemoteEmbeddingProvider() override;

  std::size_t dimension() const override { return info_.dimension; }
  const std::string& model() const { return info_.model; }

  EmbeddingVector embed_image(const Observation& observation) const override;
  EmbeddingVector embed_text(std::string_view prompt) const override;

 private:
  EmbeddingVector post(std::string_view op, std::string_view payload) const;

  struct Connection;
  std::unique_ptr<Connection> conn_;
  wire::ServiceInfo info_;
};

}  // namespace viewnav
