#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string_view>

namespace reaction_lens {

enum class Reaction : std::uint8_t {
  like,
  love,
  wow,
  haha,
  sad,
  angry,
  thankful,
};

inline constexpr std::size_t kReactionCount = 7;

inline constexpr std::array<Reaction, kReactionCount> kAllReactions = {
    Reaction::like, Reaction::love,  Reaction::wow,     Reaction::haha,
    Reaction::sad,  Reaction::angry, Reaction::thankful};

std::string_view reaction_name(Reaction r) noexcept;
std::optional<Reaction> reaction_from_name(std::string_view name) noexcept;

// Raw per-post reaction tallies, indexed by Reaction.
struct ReactionCounts {
  std::array<std::uint64_t, kReactionCount> n{};

  std::uint64_t& operator[](Reaction r) noexcept { return n[static_cast<std::size_t>(r)]; }
  std::uint64_t operator[](Reaction r) const noexcept { return n[static_cast<std::size_t>(r)]; }

  friend bool operator==(const ReactionCounts&, const ReactionCounts&) = default;
};

inline constexpr std::size_t kMaxComponents = 7;

// Fixed-capacity vector of per-component values. Used for reaction
// distributions (5 or 7 components) and star sentiment vectors (4).
class ComponentVector {
 public:
  ComponentVector() = default;
  explicit ComponentVector(std::size_t size);
  ComponentVector(std::initializer_list<double> values);

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double* begin() noexcept { return values_.data(); }
  double* end() noexcept { return values_.data() + size_; }
  const double* begin() const noexcept { return values_.data(); }
  const double* end() const noexcept { return values_.data() + size_; }

  std::span<const double> view() const noexcept { return {values_.data(), size_}; }

  double sum() const noexcept;

  friend bool operator==(const ComponentVector& a, const ComponentVector& b) noexcept;

 private:
  std::array<double, kMaxComponents> values_{};
  std::size_t size_ = 0;
};

using ReactionVector = ComponentVector;

enum class SchemaId : std::uint8_t { core, all, star4 };

// Names and orders the components of a vector. The core and all schemas are
// reaction distributions; star4 is the [positive, negative, star_disc, star]
// sentiment layout.
class Schema {
 public:
  static const Schema& core();
  static const Schema& all();
  static const Schema& star4();
  static const Schema& get(SchemaId id);
  static std::optional<SchemaId> parse(std::string_view name) noexcept;

  SchemaId id() const noexcept { return id_; }
  std::string_view name() const noexcept { return name_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::span<const std::string_view> labels() const noexcept { return labels_; }

  // Reactions backing each component; empty for star4.
  std::span<const Reaction> reactions() const noexcept { return reactions_; }

  // True when vectors over this schema are probability distributions.
  bool is_distribution() const noexcept { return !reactions_.empty(); }

  friend bool operator==(const Schema& a, const Schema& b) noexcept { return a.id_ == b.id_; }

 private:
  Schema(SchemaId id, std::string_view name, std::span<const std::string_view> labels,
         std::span<const Reaction> reactions)
      : id_(id), name_(name), labels_(labels), reactions_(reactions) {}

  SchemaId id_;
  std::string_view name_;
  std::span<const std::string_view> labels_;
  std::span<const Reaction> reactions_;
};

// Sum of the counts that participate in `schema`.
std::uint64_t schema_total(const ReactionCounts& counts, const Schema& schema) noexcept;

// Each schema reaction's share of the schema total. Throws ZeroReactionTotal
// when that total is zero; such entries are excluded from training and
// evaluation.
ReactionVector normalize(const ReactionCounts& counts, const Schema& schema);

// True when every component is in [0,1] and the components sum to 1 within
// `tolerance`.
bool is_valid_distribution(const ComponentVector& v, double tolerance = 1e-9) noexcept;

}  // namespace reaction_lens
