#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "reaction_lens/evaluation.hpp"

namespace reaction_lens {

enum class ReportFormat { json, csv };

std::optional<ReportFormat> parse_report_format(std::string_view name) noexcept;

// JSON layout (keys in this order):
//   {"format": "reaction-lens-report/1", "seed", "runs", "sigma", "manifest",
//    "models": [{"model", "entries", "excluded",
//                "splits": [{"train_fraction", "split_percent", "train_size",
//                            "test_size", "mean_coverage",
//                            "components": [{"name",
//                                            "mean": {accuracy, recall, precision, f1},
//                                            "per_run": [{...}, ...]}]}]}]}
//
// CSV: header `model,split_percent,reaction,accuracy,recall,precision,f1,runs,seed`,
// one row per model x split x component, in report order.
void report_emit(const EvalReport& report, ReportFormat format, std::ostream& out);

// Inverse of the JSON form. Throws CorruptArtifact on malformed input.
EvalReport report_from_json(std::string_view text);

}  // namespace reaction_lens
