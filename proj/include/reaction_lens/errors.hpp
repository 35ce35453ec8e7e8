#pragma once

#include <stdexcept>
#include <string>

namespace reaction_lens {

// Coarse grouping used by the CLI to pick an exit code.
enum class ErrorCategory {
  usage,
  io,
  format,
  degenerate_data,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define REACTION_LENS_DEFINE_ERROR(Name, Category)                     \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(Category, what) {}  \
  }

REACTION_LENS_DEFINE_ERROR(UnreadableSource, ErrorCategory::io);
REACTION_LENS_DEFINE_ERROR(WriteFailure, ErrorCategory::io);
REACTION_LENS_DEFINE_ERROR(SchemaMismatch, ErrorCategory::format);
REACTION_LENS_DEFINE_ERROR(VersionMismatch, ErrorCategory::format);
REACTION_LENS_DEFINE_ERROR(CorruptArtifact, ErrorCategory::format);
REACTION_LENS_DEFINE_ERROR(ZeroReactionTotal, ErrorCategory::degenerate_data);
REACTION_LENS_DEFINE_ERROR(EmptyTrainingSet, ErrorCategory::degenerate_data);
REACTION_LENS_DEFINE_ERROR(DegenerateRange, ErrorCategory::degenerate_data);
REACTION_LENS_DEFINE_ERROR(EmptySide, ErrorCategory::degenerate_data);
REACTION_LENS_DEFINE_ERROR(NonPositiveSigma, ErrorCategory::usage);
REACTION_LENS_DEFINE_ERROR(InvalidSpec, ErrorCategory::usage);
REACTION_LENS_DEFINE_ERROR(InvalidConfig, ErrorCategory::usage);

#undef REACTION_LENS_DEFINE_ERROR

}  // namespace reaction_lens
