#include "reaction_lens/reactions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "reaction_lens/errors.hpp"

namespace reaction_lens {

namespace {

constexpr std::array<std::string_view, kReactionCount> kReactionNames = {
    "like", "love", "wow", "haha", "sad", "angry", "thankful"};

constexpr std::array<Reaction, 5> kCoreReactions = {
    Reaction::love, Reaction::wow, Reaction::haha, Reaction::sad, Reaction::angry};
constexpr std::array<std::string_view, 5> kCoreLabels = {"love", "wow", "haha", "sad", "angry"};

constexpr std::array<std::string_view, 7> kAllLabels = {
    "like", "love", "wow", "haha", "sad", "angry", "thankful"};

constexpr std::array<std::string_view, 4> kStarLabels = {"positive", "negative", "star_disc",
                                                         "star"};

}  // namespace

std::string_view reaction_name(Reaction r) noexcept {
  return kReactionNames[static_cast<std::size_t>(r)];
}

std::optional<Reaction> reaction_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kReactionNames.size(); ++i) {
    if (kReactionNames[i] == name) return static_cast<Reaction>(i);
  }
  return std::nullopt;
}

ComponentVector::ComponentVector(std::size_t size) : size_(size) {
  if (size > kMaxComponents) throw std::length_error("ComponentVector: too many components");
}

ComponentVector::ComponentVector(std::initializer_list<double> values)
    : ComponentVector(values.size()) {
  std::copy(values.begin(), values.end(), values_.begin());
}

double ComponentVector::sum() const noexcept {
  double s = 0.0;
  for (double v : *this) s += v;
  return s;
}

bool operator==(const ComponentVector& a, const ComponentVector& b) noexcept {
  return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
}

const Schema& Schema::core() {
  static const Schema schema(SchemaId::core, "core", kCoreLabels, kCoreReactions);
  return schema;
}

const Schema& Schema::all() {
  static const Schema schema(SchemaId::all, "all", kAllLabels, kAllReactions);
  return schema;
}

const Schema& Schema::star4() {
  static const Schema schema(SchemaId::star4, "star4", kStarLabels, {});
  return schema;
}

const Schema& Schema::get(SchemaId id) {
  switch (id) {
    case SchemaId::core:
      return core();
    case SchemaId::all:
      return all();
    case SchemaId::star4:
      return star4();
  }
  throw std::invalid_argument("unknown schema id");
}

std::optional<SchemaId> Schema::parse(std::string_view name) noexcept {
  if (name == "core") return SchemaId::core;
  if (name == "all") return SchemaId::all;
  if (name == "star4") return SchemaId::star4;
  return std::nullopt;
}

std::uint64_t schema_total(const ReactionCounts& counts, const Schema& schema) noexcept {
  std::uint64_t total = 0;
  for (Reaction r : schema.reactions()) total += counts[r];
  return total;
}

ReactionVector normalize(const ReactionCounts& counts, const Schema& schema) {
  if (!schema.is_distribution()) {
    throw std::invalid_argument("normalize: schema '" + std::string(schema.name()) +
                                "' is not a reaction schema");
  }
  const std::uint64_t total = schema_total(counts, schema);
  if (total == 0) {
    throw ZeroReactionTotal("no " + std::string(schema.name()) + " reactions on entry");
  }
  ReactionVector out(schema.size());
  const auto denom = static_cast<double>(total);
  for (std::size_t i = 0; i < schema.size(); ++i) {
    out[i] = static_cast<double>(counts[schema.reactions()[i]]) / denom;
  }
  return out;
}

bool is_valid_distribution(const ComponentVector& v, double tolerance) noexcept {
  if (v.empty()) return false;
  for (double x : v) {
    if (!(x >= 0.0 && x <= 1.0)) return false;
  }
  return std::abs(v.sum() - 1.0) <= tolerance;
}

}  // namespace reaction_lens
