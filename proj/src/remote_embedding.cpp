#include "viewnav/remote_embedding.hpp"

#include <array>
#include <mutex>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

namespace viewnav {
namespace wire {
namespace {

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

}  // namespace

std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const auto n = (static_cast<unsigned char>(bytes[i]) << 16) |
                   (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                   static_cast<unsigned char>(bytes[i + 2]);
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += kAlphabet[n & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const auto n = static_cast<unsigned char>(bytes[i]) << 16;
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const auto n = (static_cast<unsigned char>(bytes[i]) << 16) |
                   (static_cast<unsigned char>(bytes[i + 1]) << 8);
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += '=';
  }
  return out;
}

std::string base64_decode(std::string_view text) {
  std::string out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (const char c : text) {
    if (c == '=') break;
    if (c == '\n' || c == '\r') continue;
    const int v = decode_char(c);
    if (v < 0) throw std::invalid_argument("base64_decode: invalid character");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out += static_cast<char>((acc >> bits) & 0xFF);
    }
  }
  return out;
}

std::string observation_bytes(const Observation& observation) {
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& l : observation.labels) labels.push_back({{"label", l.label}, {"fraction", l.fraction}});
  return nlohmann::json{{"labels", labels}}.dump();
}

Observation parse_observation_bytes(std::string_view bytes) {
  const auto j = nlohmann::json::parse(bytes);
  Observation obs;
  for (const auto& l : j.at("labels"))
    obs.labels.push_back({l.at("label").get<std::string>(), l.at("fraction").get<double>()});
  return obs;
}

std::string make_embed_request(std::string_view op, std::string_view payload) {
  if (op != "embed_text" && op != "embed_image")
    throw std::invalid_argument("make_embed_request: unknown op");
  return nlohmann::json{{"op", op}, {"payload", payload}}.dump();
}

std::vector<double> parse_embed_response(std::string_view body) {
  const auto j = nlohmann::json::parse(body);
  return j.at("vector").get<std::vector<double>>();
}

ServiceInfo parse_info(std::string_view body) {
  const auto j = nlohmann::json::parse(body);
  return {j.at("dimension").get<std::size_t>(), j.value("model", std::string{})};
}

}  // namespace wire

struct RemoteEmbeddingProvider::Connection {
  explicit Connection(const std::string& endpoint) : client(endpoint) {
    client.set_connection_timeout(5);
    client.set_read_timeout(30);
  }
  httplib::Client client;
  std::mutex mutex;
};

RemoteEmbeddingProvider::RemoteEmbeddingProvider(const std::string& endpoint)
    : conn_(std::make_unique<Connection>(endpoint)) {
  std::lock_guard lock(conn_->mutex);
  const auto res = conn_->client.Get("/info");
  if (!res) throw std::runtime_error("embedding service unreachable at " + endpoint);
  if (res->status != 200)
    throw std::runtime_error("embedding service /info returned " + std::to_string(res->status));
  info_ = wire::parse_info(res->body);
  if (info_.dimension == 0) throw std::runtime_error("embedding service advertises dimension 0");
}

RemoteEmbeddingProvider::~RemoteEmbeddingProvider() = default;

EmbeddingVector RemoteEmbeddingProvider::post(std::string_view op, std::string_view payload) const {
  const std::string body = wire::make_embed_request(op, payload);
  std::lock_guard lock(conn_->mutex);
  const auto res = conn_->client.Post("/embed", body, "application/json");
  if (!res) throw std::runtime_error("embedding request failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw std::runtime_error("embedding service /embed returned " + std::to_string(res->status));
  auto vec = wire::parse_embed_response(res->body);
  if (vec.size() != info_.dimension)
    throw std::runtime_error("embedding service returned a vector of the wrong length");
  return EmbeddingVector(std::move(vec));
}

EmbeddingVector RemoteEmbeddingProvider::embed_image(const Observation& observation) const {
  return post("embed_image", wire::base64_encode(wire::observation_bytes(observation)));
}

EmbeddingVector RemoteEmbeddingProvider::embed_text(std::string_view prompt) const {
  return post("embed_text", prompt);
}

}  // namespace viewnav
