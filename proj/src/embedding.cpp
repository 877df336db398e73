#include "viewnav/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace viewnav {
namespace {

constexpr std::string_view kBackgroundKey = "\x01" "background";

std::vector<double> unit_direction(std::uint64_t seed, std::size_t dim) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(dim);
  double sq = 0.0;
  for (auto& x : v) {
    // 53 random bits mapped to [-1, 1); std::mt19937_64 output is portable.
    x = static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
    sq += x * x;
  }
  const double n = std::sqrt(sq);
  for (auto& x : v) x /= n;
  return v;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("EmbeddingVector: empty");
  double sq = 0.0;
  for (const double x : values_) {
    if (!std::isfinite(x)) throw std::invalid_argument("EmbeddingVector: non-finite component");
    sq += x * x;
  }
  norm_ = std::sqrt(sq);
  if (!(norm_ > 0.0)) throw std::invalid_argument("EmbeddingVector: zero norm");
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: length mismatch");
  const auto av = a.values();
  const auto bv = b.values();
  const double dot = std::inner_product(av.begin(), av.end(), bv.begin(), 0.0);
  return std::clamp(dot / (a.norm() * b.norm()), -1.0, 1.0);
}

PromptPair PromptPair::for_object(std::string_view object) {
  if (object.empty()) throw std::invalid_argument("PromptPair: empty object name");
  return {std::string(kPositivePrefix) + std::string(object), std::string(kNegative)};
}

SyntheticEmbeddingProvider::SyntheticEmbeddingProvider(std::size_t dimension,
                                                       double background_weight,
                                                       std::uint64_t seed)
    : dimension_(dimension), background_weight_(background_weight), seed_(seed) {
  if (dimension == 0) throw std::invalid_argument("SyntheticEmbeddingProvider: zero dimension");
  if (!(background_weight > 0.0))
    throw std::invalid_argument("SyntheticEmbeddingProvider: background weight must be > 0");
}

std::vector<double> SyntheticEmbeddingProvider::label_direction(std::string_view label) const {
  return unit_direction(fnv1a64(label) ^ seed_, dimension_);
}

std::vector<double> SyntheticEmbeddingProvider::background_direction() const {
  return label_direction(kBackgroundKey);
}

EmbeddingVector SyntheticEmbeddingProvider::embed_image(const Observation& observation) const {
  std::vector<double> sum = background_direction();
  for (auto& x : sum) x *= background_weight_;
  for (const auto& seen : observation.labels) {
    if (!(seen.fraction > 0.0)) continue;
    const auto dir = label_direction(seen.label);
    for (std::size_t i = 0; i < dimension_; ++i) sum[i] += seen.fraction * dir[i];
  }
  double sq = 0.0;
  for (const double x : sum) sq += x * x;
  const double n = std::sqrt(sq);
  for (auto& x : sum) x /= n;
  return EmbeddingVector(std::move(sum));
}

EmbeddingVector SyntheticEmbeddingProvider::embed_text(std::string_view prompt) const {
  if (prompt == PromptPair::kNegative) return EmbeddingVector(background_direction());
  if (prompt.starts_with(PromptPair::kPositivePrefix) &&
      prompt.size() > PromptPair::kPositivePrefix.size()) {
    return EmbeddingVector(label_direction(prompt.substr(PromptPair::kPositivePrefix.size())));
  }
  return EmbeddingVector(label_direction(prompt));
}

}  // namespace viewnav
