#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace viewnav {

/// Fixed-length real vector with its L2 norm cached. Never zero.
class EmbeddingVector {
 public:
  /// Throws std::invalid_argument for an empty, non-finite or zero vector.
  explicit EmbeddingVector(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double norm() const { return norm_; }

  friend bool operator==(const EmbeddingVector& a, const EmbeddingVector& b) {
    return a.values_ == b.values_;
  }

 private:
  std::vector<double> values_;
  double norm_;
};

/// a.b / (|a||b|), clamped to [-1, 1]. Throws on length mismatch.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// The query prompt and the "something else" prompt used to reject
/// background views.
struct PromptPair {
  std::string positive;
  std::string negative;

  static constexpr std::string_view kPositivePrefix = "A photo of ";
  static constexpr std::string_view kNegative = "A photo of something else";

  /// Throws std::invalid_argument for an empty object name.
  static PromptPair for_object(std::string_view object);
};

/// What a camera sees, reduced to labels and the share of the horizontal
/// field each one covers.
struct VisibleLabel {
  std::string label;
  double fraction = 0.0;

  friend bool operator==(const VisibleLabel&, const VisibleLabel&) = default;
};

struct Observation {
  std::vector<VisibleLabel> labels;
};

/// Abstracts the image/text encoder. Implementations must be deterministic
/// and callable from several threads at once.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual EmbeddingVector embed_image(const Observation& observation) const = 0;
  virtual EmbeddingVector embed_text(std::string_view prompt) const = 0;
};

/// Offline stand-in for a vision-language encoder.
///
/// Each label maps to a fixed pseudo-random unit vector. A view embeds as the
/// normalised sum of its labels' vectors weighted by visible fraction, plus
/// the background vector at a constant weight. "A photo of X" embeds as X's
/// vector and the "something else" prompt as the background vector, so the
/// cosine with a query prompt grows with the object's share of the view.
class SyntheticEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit SyntheticEmbeddingProvider(std::size_t dimension = 512, double background_weight = 0.02,
                                      std::uint64_t seed = 0);

  std::size_t dimension() const override { return dimension_; }
  EmbeddingVector embed_image(const Observation& observation) const override;
  EmbeddingVector embed_text(std::string_view prompt) const override;

  /// Unit vector assigned to a label.
  std::vector<double> label_direction(std::string_view label) const;
  std::vector<double> background_direction() const;
  double background_weight() const { return background_weight_; }

 private:
  std::size_t dimension_;
  double background_weight_;
  std::uint64_t seed_;
};

/// 64-bit FNV-1a, used wherever a label needs a stable seed.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace viewnav
