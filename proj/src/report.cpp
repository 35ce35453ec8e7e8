#include "reaction_lens/report.hpp"

#include <cmath>

#include <json.hpp>

#include "reaction_lens/errors.hpp"
#include "reaction_lens/lexicon_io.hpp"

namespace reaction_lens {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kReportFormatTag = "reaction-lens-report/1";

ordered_json metrics_json(const MetricSet& m) {
  ordered_json j;
  j["accuracy"] = m.accuracy;
  j["recall"] = m.recall;
  j["precision"] = m.precision;
  j["f1"] = m.f1;
  return j;
}

MetricSet metrics_from(const ordered_json& j) {
  return {j.at("accuracy").get<double>(), j.at("recall").get<double>(),
          j.at("precision").get<double>(), j.at("f1").get<double>()};
}

std::string split_percent(double fraction) {
  return format_shortest(std::round(fraction * 100.0 * 1e9) / 1e9);
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view name) noexcept {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  return std::nullopt;
}

void report_emit(const EvalReport& report, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::csv) {
    out << "model,split_percent,reaction,accuracy,recall,precision,f1,runs,seed\n";
    for (const auto& model : report.models) {
      for (const auto& split : model.splits) {
        for (const auto& comp : split.components) {
          out << model_name(model.model) << ',' << split_percent(split.train_fraction) << ','
              << comp.name << ',' << format_shortest(comp.mean.accuracy) << ','
              << format_shortest(comp.mean.recall) << ',' << format_shortest(comp.mean.precision)
              << ',' << format_shortest(comp.mean.f1) << ',' << report.runs << ','
              << report.seed << '\n';
        }
      }
    }
    return;
  }

  ordered_json root;
  root["format"] = kReportFormatTag;
  root["seed"] = report.seed;
  root["runs"] = report.runs;
  root["sigma"] = report.sigma;
  root["manifest"] = report.manifest;
  root["models"] = ordered_json::array();
  for (const auto& model : report.models) {
    ordered_json jm;
    jm["model"] = model_name(model.model);
    jm["entries"] = model.entries;
    jm["excluded"] = model.excluded;
    jm["splits"] = ordered_json::array();
    for (const auto& split : model.splits) {
      ordered_json js;
      js["train_fraction"] = split.train_fraction;
      js["split_percent"] = split_percent(split.train_fraction);
      js["train_size"] = split.train_size;
      js["test_size"] = split.test_size;
      js["mean_coverage"] = split.mean_coverage;
      js["components"] = ordered_json::array();
      for (const auto& comp : split.components) {
        ordered_json jc;
        jc["name"] = comp.name;
        jc["mean"] = metrics_json(comp.mean);
        jc["per_run"] = ordered_json::array();
        for (const auto& m : comp.per_run) jc["per_run"].push_back(metrics_json(m));
        js["components"].push_back(std::move(jc));
      }
      jm["splits"].push_back(std::move(js));
    }
    root["models"].push_back(std::move(jm));
  }
  out << root.dump(2) << '\n';
}

EvalReport report_from_json(std::string_view text) {
  const auto root = ordered_json::parse(text, nullptr, false);
  if (root.is_discarded()) throw CorruptArtifact("report is not valid JSON");
  try {
    if (root.at("format").get<std::string>() != kReportFormatTag) {
      throw CorruptArtifact("unrecognized report format tag");
    }
    EvalReport report;
    report.seed = root.at("seed").get<std::uint64_t>();
    report.runs = root.at("runs").get<unsigned>();
    report.sigma = root.at("sigma").get<double>();
    report.manifest = root.at("manifest").get<std::string>();
    for (const auto& jm : root.at("models")) {
      ModelReport model;
      const auto kind = parse_model(jm.at("model").get<std::string>());
      if (!kind) throw CorruptArtifact("unknown model in report");
      model.model = *kind;
      model.entries = jm.at("entries").get<std::size_t>();
      model.excluded = jm.at("excluded").get<std::size_t>();
      for (const auto& js : jm.at("splits")) {
        SplitResult split;
        split.train_fraction = js.at("train_fraction").get<double>();
        split.train_size = js.at("train_size").get<std::size_t>();
        split.test_size = js.at("test_size").get<std::size_t>();
        split.mean_coverage = js.at("mean_coverage").get<double>();
        for (const auto& jc : js.at("components")) {
          ComponentResult comp;
          comp.name = jc.at("name").get<std::string>();
          comp.mean = metrics_from(jc.at("mean"));
          for (const auto& jr : jc.at("per_run")) comp.per_run.push_back(metrics_from(jr));
          split.components.push_back(std::move(comp));
        }
        model.splits.push_back(std::move(split));
      }
      report.models.push_back(std::move(model));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptArtifact(std::string("malformed report: ") + e.what());
  }
}

}  // namespace reaction_lens
