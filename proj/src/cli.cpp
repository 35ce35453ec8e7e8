#include "reaction_lens/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "reaction_lens/corpus.hpp"
#include "reaction_lens/errors.hpp"
#include "reaction_lens/evaluation.hpp"
#include "reaction_lens/lexicon.hpp"
#include "reaction_lens/lexicon_io.hpp"
#include "reaction_lens/manifest.hpp"
#include "reaction_lens/report.hpp"
#include "reaction_lens/star_model.hpp"
#include "reaction_lens/synth.hpp"
#include "reaction_lens/text_cleaner.hpp"

namespace reaction_lens {

namespace {

namespace fs = std::filesystem;

// Writes go to a sibling temporary file that replaces the target on commit,
// so a failed command never leaves a partial output behind.
class AtomicOutput {
 public:
  explicit AtomicOutput(fs::path target) : target_(std::move(target)) {
    tmp_ = target_;
    tmp_ += ".tmp." + std::to_string(::getpid());
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw WriteFailure("cannot create " + tmp_.string());
  }
  AtomicOutput(const AtomicOutput&) = delete;
  AtomicOutput& operator=(const AtomicOutput&) = delete;
  ~AtomicOutput() {
    if (committed_) return;
    out_.close();
    std::error_code ec;
    fs::remove(tmp_, ec);
  }

  std::ostream& stream() noexcept { return out_; }
  const fs::path& path() const noexcept { return target_; }

  void commit() {
    out_.flush();
    if (!out_) throw WriteFailure("failed writing " + target_.string());
    out_.close();
    std::error_code ec;
    fs::rename(tmp_, target_, ec);
    if (ec) throw WriteFailure("cannot move output into place at " + target_.string());
    committed_ = true;
  }

 private:
  fs::path target_;
  fs::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

struct InputOptions {
  std::string input;
  std::string format;
  std::string columns;

  void attach(CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--input,-i", input, "Input corpus file");
    if (required) opt->required();
    cmd->add_option("--format", format, "Input format (default: from the file extension)")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_option("--columns", columns,
                    "Column overrides, e.g. message=text,like=likes,id=post_id");
  }

  CorpusReader open() const {
    CorpusFormat fmt = CorpusFormat::csv;
    if (!format.empty()) {
      fmt = *parse_corpus_format(format);
    } else {
      const auto ext = fs::path(input).extension();
      if (ext == ".jsonl" || ext == ".ndjson") fmt = CorpusFormat::jsonl;
    }
    return CorpusReader::open(input, fmt, SchemaMap::parse(columns));
  }
};

std::vector<std::pair<std::string, std::string>> config_snapshot(const CLI::App& cmd) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const CLI::Option* opt : cmd.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) {
        if (!value.empty()) value += ',';
        value += r;
      }
    } else {
      value = opt->get_default_str();
    }
    out.emplace_back(name, value);
  }
  return out;
}

RunManifest start_manifest(const CLI::App& cmd) {
  RunManifest m;
  m.command = cmd.get_name();
  m.config = config_snapshot(cmd);
  m.started_at = utc_timestamp();
  return m;
}

void finish_manifest(RunManifest& m, const std::vector<fs::path>& artifacts) {
  m.finished_at = utc_timestamp();
  for (const auto& a : artifacts) m.outputs.push_back(a.string());
  m.write(manifest_path_for(artifacts.front()));
}

void report_row_errors(const CorpusReader& reader, std::ostream& err) {
  if (reader.error_count() == 0) return;
  constexpr std::size_t kShown = 5;
  const auto& errors = reader.errors();
  for (std::size_t i = 0; i < std::min(kShown, errors.size()); ++i) {
    err << "warning: line " << errors[i].line << ": " << errors[i].reason << '\n';
  }
  err << "warning: skipped " << reader.error_count() << " malformed row(s)\n";
}

std::string format_coverage(double c) {
  std::string s = format_shortest(c);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

// ---- clean ----

struct CleanOptions {
  InputOptions in;
  std::string output;
  std::string stopwords;
  bool casefold = false;
};

int cmd_clean(const CleanOptions& o, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
  RunManifest manifest = start_manifest(cmd);
  CleanConfig config;
  config.casefold_ascii = o.casefold;
  // Stopwords first: a bad list must fail before any output exists.
  if (!o.stopwords.empty()) config.stopwords = load_stopwords(o.stopwords);

  CorpusReader reader = o.in.open();
  AtomicOutput output(o.output);
  CorpusWriter writer(output.stream(), reader.has_id_column());

  std::uint64_t written = 0, emptied = 0, zero_core = 0, zero_all = 0;
  std::array<std::uint64_t, kCleanStepCount> removed{};
  while (auto rec = reader.next()) {
    CleanedMessage cleaned = clean_message(rec->message, config);
    for (std::size_t k = 0; k < kCleanStepCount; ++k) removed[k] += cleaned.removed[k];
    if (cleaned.empty()) {
      ++emptied;
      continue;
    }
    if (schema_total(rec->reactions, Schema::core()) == 0) ++zero_core;
    if (schema_total(rec->reactions, Schema::all()) == 0) ++zero_all;
    rec->message = std::move(cleaned.text);
    writer.write(*rec);
    ++written;
  }
  output.commit();
  report_row_errors(reader, err);

  out << "rows_read\t" << reader.records_read() << '\n';
  out << "rows_written\t" << written << '\n';
  out << "dropped_empty\t" << emptied << '\n';
  out << "dropped_malformed\t" << reader.error_count() << '\n';
  out << "kept_zero_core_total\t" << zero_core << '\n';
  out << "kept_zero_all_total\t" << zero_all << '\n';
  for (std::size_t k = 0; k < kCleanStepCount; ++k) {
    out << "tokens_removed." << clean_step_name(static_cast<CleanStep>(k)) << '\t' << removed[k]
        << '\n';
  }

  manifest.add_input(o.in.input);
  if (!o.stopwords.empty()) manifest.add_input(o.stopwords);
  manifest.row_drops = {{"empty_after_cleaning", emptied},
                        {"malformed", reader.error_count()},
                        {"zero_core_total_kept", zero_core},
                        {"zero_all_total_kept", zero_all}};
  for (std::size_t k = 0; k < kCleanStepCount; ++k) {
    manifest.row_drops.emplace_back(
        "tokens_removed." + std::string(clean_step_name(static_cast<CleanStep>(k))), removed[k]);
  }
  finish_manifest(manifest, {o.output});
  return kExitOk;
}

// ---- train ----

struct TrainOptions {
  InputOptions in;
  std::string output;
  std::string model = "core";
};

int cmd_train(const TrainOptions& o, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
  RunManifest manifest = start_manifest(cmd);
  const ModelKind kind = *parse_model(o.model);
  CorpusReader reader = o.in.open();

  LexiconMetadata metadata;
  std::uint64_t excluded = 0;
  std::optional<ReactionLexicon> lexicon;

  if (kind == ModelKind::star) {
    // The star scale needs the aggregate range before any vector exists.
    const Dataset ds = Dataset::from_reader(reader);
    std::vector<std::size_t> usable;
    std::vector<PolarityMass> masses;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const auto& c = ds.counts(i);
      if (c[Reaction::love] + c[Reaction::wow] + c[Reaction::sad] + c[Reaction::angry] == 0) {
        ++excluded;
        continue;
      }
      usable.push_back(i);
      masses.push_back(star_normalize(c));
    }
    if (usable.empty()) throw EmptyTrainingSet("no entry has love, wow, sad or angry reactions");
    const StarTrainingSet set = build_star_vectors(masses);
    LexiconBuilder builder(Schema::star4(), ds.vocabulary());
    for (std::size_t j = 0; j < usable.size(); ++j) {
      builder.add(ds.words(usable[j]), set.entries[j].to_vector());
    }
    lexicon = builder.finalize();
    metadata.extra["star_range"] = format_exact17(set.range.min) + "," +
                                   format_exact17(set.range.max);
  } else {
    const Schema& schema = kind == ModelKind::core ? Schema::core() : Schema::all();
    auto vocab = std::make_shared<Vocabulary>();
    LexiconBuilder builder(schema, vocab);
    std::vector<WordId> ids;
    while (auto rec = reader.next()) {
      if (schema_total(rec->reactions, schema) == 0) {
        ++excluded;
        continue;
      }
      ids.clear();
      for (std::string_view w : split_words(rec->message)) ids.push_back(vocab->intern(w));
      builder.add(ids, normalize(rec->reactions, schema));
    }
    if (builder.entries() == 0) throw EmptyTrainingSet("no entry has a nonzero reaction total");
    lexicon = builder.finalize();
  }
  report_row_errors(reader, err);

  metadata.extra["manifest"] = manifest_path_for(o.output).filename().string();
  AtomicOutput output(o.output);
  save_lexicon(*lexicon, output.stream(), metadata);
  output.commit();

  out << "model\t" << model_name(kind) << '\n';
  out << "training_entries\t" << lexicon->training_entries() << '\n';
  out << "excluded_zero_total\t" << excluded << '\n';
  out << "dropped_malformed\t" << reader.error_count() << '\n';
  out << "words\t" << lexicon->size() << '\n';

  manifest.add_input(o.in.input);
  manifest.row_drops = {{"malformed", reader.error_count()}, {"zero_total_excluded", excluded}};
  finish_manifest(manifest, {o.output});
  return kExitOk;
}

// ---- predict ----

struct PredictOptions {
  std::string lexicon;
  std::string input;
  std::string output;
  std::string stopwords;
  bool casefold = false;
};

int cmd_predict(const PredictOptions& o, const CLI::App& cmd, std::istream& in,
                std::ostream& out) {
  RunManifest manifest = start_manifest(cmd);
  const LoadedLexicon loaded = load_lexicon(fs::path(o.lexicon));
  CleanConfig config;
  config.casefold_ascii = o.casefold;
  if (!o.stopwords.empty()) config.stopwords = load_stopwords(o.stopwords);

  std::istream* src = &in;
  std::ifstream file;
  if (!o.input.empty() && o.input != "-") {
    file.open(o.input, std::ios::binary);
    if (!file) throw UnreadableSource("cannot open " + o.input);
    src = &file;
  }
  std::ostream* dst = &out;
  std::optional<AtomicOutput> output;
  if (!o.output.empty()) {
    output.emplace(o.output);
    dst = &output->stream();
  }

  std::string line;
  std::uint64_t lines = 0;
  while (std::getline(*src, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const CleanedMessage cleaned = clean_message(line, config);
    const Prediction p =
        loaded.lexicon.predict(std::span<const std::string>(cleaned.unique_words));
    for (std::size_t k = 0; k < p.vector.size(); ++k) {
      if (k) *dst << ',';
      *dst << format_shortest(p.vector[k]);
    }
    *dst << " coverage=" << format_coverage(p.coverage) << '\n';
    ++lines;
  }
  if (src->bad()) throw UnreadableSource("failed reading messages");

  if (output) {
    output->commit();
    manifest.add_input(o.lexicon);
    if (file.is_open()) manifest.add_input(o.input);
    manifest.row_drops = {{"messages", lines}};
    finish_manifest(manifest, {o.output});
  } else {
    dst->flush();
  }
  return kExitOk;
}

// ---- eval ----

struct EvalOptions {
  InputOptions in;
  std::string output;
  std::vector<std::string> models = {"core", "all", "star"};
  std::vector<std::string> splits = {"95", "90", "80", "70", "50"};
  unsigned runs = 5;
  std::uint64_t seed = 42;
  double sigma = 1.0;
  unsigned threads = 0;
  std::string report_format = "json";
};

// "95" and "0.95" both mean a 95% training share.
double parse_split(const std::string& text) {
  const auto v = parse_double(text);
  if (!v) throw InvalidConfig("bad split value '" + text + "'");
  return *v > 1.0 ? *v / 100.0 : *v;
}

int cmd_eval(const EvalOptions& o, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
  RunManifest manifest = start_manifest(cmd);
  ExperimentConfig config;
  config.models.clear();
  for (const auto& m : o.models) {
    const auto kind = parse_model(m);
    if (!kind) throw InvalidConfig("unknown model '" + m + "'");
    config.models.push_back(*kind);
  }
  config.train_fractions.clear();
  for (const auto& s : o.splits) config.train_fractions.push_back(parse_split(s));
  config.runs = o.runs;
  config.seed = o.seed;
  config.sigma = o.sigma;
  config.threads = o.threads;
  config.validate();
  const ReportFormat format = *parse_report_format(o.report_format);

  CorpusReader reader = o.in.open();
  const Dataset ds = Dataset::from_reader(reader);
  report_row_errors(reader, err);
  EvalReport report = run_experiment(ds, config);

  if (o.output.empty()) {
    report_emit(report, format, out);
    return kExitOk;
  }
  report.manifest = manifest_path_for(o.output).filename().string();
  AtomicOutput output(o.output);
  report_emit(report, format, output.stream());
  output.commit();

  manifest.add_input(o.in.input);
  manifest.row_drops = {{"malformed", reader.error_count()}};
  for (const auto& m : report.models) {
    manifest.row_drops.emplace_back(std::string(model_name(m.model)) + ".zero_total_excluded",
                                    m.excluded);
  }
  finish_manifest(manifest, {o.output});
  return kExitOk;
}

// ---- stats ----

struct StatsOptions {
  InputOptions in;
  std::string output;
  bool json = false;
};

void write_stats_table(const CorpusStats& s, std::ostream& out) {
  out << "rows " << s.rows << '\n';
  out << std::left << std::setw(10) << "reaction" << std::right << std::setw(16) << "total"
      << std::setw(10) << "all_%" << std::setw(10) << "core_%" << '\n';
  std::size_t core_index = 0;
  for (Reaction r : kAllReactions) {
    const auto i = static_cast<std::size_t>(r);
    out << std::left << std::setw(10) << reaction_name(r) << std::right << std::setw(16)
        << s.totals[i];
    std::ostringstream all, core;
    all << std::fixed << std::setprecision(4);
    core << std::fixed << std::setprecision(4);
    if (s.all_percent) {
      all << (*s.all_percent)[i];
    } else {
      all << '-';
    }
    if (r == Reaction::like || r == Reaction::thankful) {
      core << '-';
    } else {
      if (s.core_percent) {
        core << (*s.core_percent)[core_index];
      } else {
        core << '-';
      }
      ++core_index;
    }
    out << std::setw(10) << all.str() << std::setw(10) << core.str() << '\n';
  }
}

void write_stats_json(const CorpusStats& s, std::uint64_t malformed, std::ostream& out) {
  nlohmann::ordered_json j;
  j["rows"] = s.rows;
  j["malformed_rows"] = malformed;
  j["totals"] = nlohmann::ordered_json::object();
  for (Reaction r : kAllReactions) j["totals"][std::string(reaction_name(r))] = s.total(r);
  if (s.all_percent) {
    j["all_percent"] = nlohmann::ordered_json::object();
    for (Reaction r : kAllReactions) {
      j["all_percent"][std::string(reaction_name(r))] =
          (*s.all_percent)[static_cast<std::size_t>(r)];
    }
  } else {
    j["all_percent"] = nullptr;
  }
  if (s.core_percent) {
    j["core_percent"] = nlohmann::ordered_json::object();
    const auto& labels = Schema::core().labels();
    for (std::size_t k = 0; k < labels.size(); ++k) {
      j["core_percent"][std::string(labels[k])] = (*s.core_percent)[k];
    }
  } else {
    j["core_percent"] = nullptr;
  }
  out << j.dump(2) << '\n';
}

int cmd_stats(const StatsOptions& o, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
  RunManifest manifest = start_manifest(cmd);
  CorpusReader reader = o.in.open();
  CorpusStatsAccumulator acc;
  while (auto rec = reader.next()) acc.add(rec->reactions);
  report_row_errors(reader, err);
  const CorpusStats stats = acc.finish();

  auto emit = [&](std::ostream& dst) {
    if (o.json) {
      write_stats_json(stats, reader.error_count(), dst);
    } else {
      write_stats_table(stats, dst);
    }
  };
  if (o.output.empty()) {
    emit(out);
    return kExitOk;
  }
  AtomicOutput output(o.output);
  emit(output.stream());
  output.commit();
  manifest.add_input(o.in.input);
  manifest.row_drops = {{"malformed", reader.error_count()}};
  finish_manifest(manifest, {o.output});
  return kExitOk;
}

// ---- synth ----

struct SynthOptions {
  std::string output;
  SynthSpec spec;
};

fs::path affinities_path_for(const fs::path& corpus) {
  auto p = corpus;
  p += ".affinities.tsv";
  return p;
}

int cmd_synth(const SynthOptions& o, const CLI::App& cmd, std::ostream& out) {
  RunManifest manifest = start_manifest(cmd);
  SyntheticCorpus corpus(o.spec);

  const fs::path affinity_file = affinities_path_for(o.output);
  AtomicOutput corpus_out(o.output);
  AtomicOutput affinity_out(affinity_file);
  corpus.write_csv(corpus_out.stream());
  corpus.write_affinities(affinity_out.stream());
  corpus_out.commit();
  affinity_out.commit();

  out << "rows\t" << o.spec.rows << '\n';
  out << "vocabulary\t" << o.spec.vocab_size << '\n';
  out << "affinities\t" << affinity_file.string() << '\n';
  finish_manifest(manifest, {o.output, affinity_file});
  return kExitOk;
}

int exit_code(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::usage:
      return kExitUsage;
    case ErrorCategory::io:
      return kExitIo;
    case ErrorCategory::format:
      return kExitFormat;
    case ErrorCategory::degenerate_data:
      return kExitDegenerate;
  }
  return kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Predict reader reaction distributions for short texts.", "reaction-lens"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  app.set_config("--config", "", "Key/value config file; [command] sections mirror the flags")
      ->envname("REACTION_LENS_CONFIG");

  CleanOptions clean_opts;
  auto* clean = app.add_subcommand("clean", "Clean message text; drop rows left empty");
  clean_opts.in.attach(clean);
  clean->add_option("--output,-o", clean_opts.output, "Cleaned corpus (CSV)")->required();
  clean->add_option("--stopwords", clean_opts.stopwords, "Stopword list, one per line");
  clean->add_flag("--casefold", clean_opts.casefold, "Lower-case ASCII before stopword matching");

  TrainOptions train_opts;
  auto* train = app.add_subcommand("train", "Build a lexicon from a cleaned corpus");
  train_opts.in.attach(train);
  train->add_option("--output,-o", train_opts.output, "Lexicon file")->required();
  train->add_option("--model,-m", train_opts.model, "Reaction model")
      ->check(CLI::IsMember({"core", "all", "star"}));

  PredictOptions predict_opts;
  auto* predict = app.add_subcommand("predict", "Predict one vector per input line");
  predict->add_option("--lexicon,-l", predict_opts.lexicon, "Lexicon file")->required();
  predict->add_option("--input,-i", predict_opts.input, "Messages, one per line (default stdin)");
  predict->add_option("--output,-o", predict_opts.output, "Output file (default stdout)");
  predict->add_option("--stopwords", predict_opts.stopwords, "Stopword list, one per line");
  predict->add_flag("--casefold", predict_opts.casefold,
                    "Lower-case ASCII before stopword matching");

  EvalOptions eval_opts;
  auto* eval = app.add_subcommand("eval", "Repeated random-split evaluation");
  eval_opts.in.attach(eval);
  eval->add_option("--output,-o", eval_opts.output, "Report file (default stdout)");
  eval->add_option("--model,--models,-m", eval_opts.models, "Models, comma separated")
      ->delimiter(',')
      ->check(CLI::IsMember({"core", "all", "star"}));
  eval->add_option("--splits", eval_opts.splits, "Training shares as percent or fraction")
      ->delimiter(',');
  eval->add_option("--runs", eval_opts.runs, "Runs per split")->check(CLI::PositiveNumber);
  eval->add_option("--seed", eval_opts.seed, "Base seed; run r uses seed + r");
  eval->add_option("--sigma", eval_opts.sigma, "Width of the star similarity kernel");
  eval->add_option("--threads", eval_opts.threads, "Worker threads (0 = all cores)");
  eval->add_option("--report-format", eval_opts.report_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  StatsOptions stats_opts;
  auto* stats = app.add_subcommand("stats", "Reaction totals and shares");
  stats_opts.in.attach(stats);
  stats->add_option("--output,-o", stats_opts.output, "Output file (default stdout)");
  stats->add_flag("--json", stats_opts.json, "Emit JSON instead of a table");

  SynthOptions synth_opts;
  SynthSpec& spec = synth_opts.spec;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic reaction corpus");
  synth->add_option("--output,-o", synth_opts.output, "Corpus file (CSV)")->required();
  synth->add_option("--rows", spec.rows, "Number of posts");
  synth->add_option("--seed", spec.seed, "Generator seed");
  synth->add_option("--vocab", spec.vocab_size, "Vocabulary size");
  synth->add_option("--affinity-concentration", spec.affinity_concentration,
                    "Dirichlet mass of word affinities (smaller = stronger signal)");
  synth->add_option("--min-words", spec.min_words, "Shortest message");
  synth->add_option("--max-words", spec.max_words, "Longest message");
  synth->add_option("--zipf", spec.zipf_exponent, "Zipf exponent of word frequencies");
  synth->add_option("--reaction-scale", spec.reaction_scale, "Mean reactions per post");
  synth->add_option("--like-dominance", spec.like_dominance, "Expected like share");
  synth->add_option("--like-concentration", spec.like_concentration,
                    "Beta concentration of the per-post like share (0 = fixed)");
  synth->add_option("--thankful-rate", spec.thankful_rate, "Thankful share of non-like reactions");
  synth->add_option("--noise-rate", spec.noise_rate, "Rate of tokens the cleaner removes");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*clean) return cmd_clean(clean_opts, *clean, out, err);
    if (*train) return cmd_train(train_opts, *train, out, err);
    if (*predict) return cmd_predict(predict_opts, *predict, in, out);
    if (*eval) return cmd_eval(eval_opts, *eval, out, err);
    if (*stats) return cmd_stats(stats_opts, *stats, out, err);
    if (*synth) return cmd_synth(synth_opts, *synth, out);
  } catch (const Error& e) {
    err << "reaction-lens: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "reaction-lens: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace reaction_lens
