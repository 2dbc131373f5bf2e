// mcqforge command line: corpus ingestion through dataset export.

#include <chrono>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "mcqforge/annotation.hpp"
#include "mcqforge/api_server.hpp"
#include "mcqforge/candidates.hpp"
#include "mcqforge/corpus.hpp"
#include "mcqforge/dataset.hpp"
#include "mcqforge/error.hpp"
#include "mcqforge/filter.hpp"
#include "mcqforge/forest.hpp"
#include "mcqforge/pos_tagger.hpp"
#include "mcqforge/ranker.hpp"
#include "mcqforge/records.hpp"

namespace fs = std::filesystem;
using namespace mcqforge;

namespace {

ApiServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::shared_ptr<FeatureContext> load_context(const fs::path& resources, const RandomForestModel* model) {
  auto ctx = FeatureContext::load(resources, PosTagger::shared());
  if (model) ctx->resources.top_concepts = model_top_concepts(*model);
  return ctx;
}

std::shared_ptr<const DistractorRanker> load_ranker(const fs::path& model_path, const fs::path& universe_path,
                                                    const fs::path& resources) {
  auto model = std::make_shared<RandomForestModel>(load_model(model_path, kFeatureLayoutVersion));
  auto universe = std::make_shared<CandidateUniverse>(CandidateUniverse::load(universe_path));
  return std::make_shared<DistractorRanker>(model, load_context(resources, model.get()), universe);
}

/// Questions from an mc JSONL file or the first field of each text line.
std::vector<std::string> load_question_texts(const fs::path& path) {
  if (path.extension() == ".jsonl") {
    std::vector<std::string> out;
    for (const MCQRecord& r : import_mc(path)) out.push_back(r.question);
    return out;
  }
  std::vector<std::string> out;
  for (const std::string& line : read_lines(path)) {
    if (trim(line).empty() || line.front() == '#') continue;
    out.push_back(split(line, '\t').front());
  }
  return out;
}

void print_split_counts(const ExportCounts& c) {
  std::cout << "written\t" << c.written << "\n";
  for (Split s : {Split::Train, Split::Validation, Split::Test, Split::Unassigned}) {
    std::cout << to_string(s) << '\t' << c.per_split[static_cast<std::size_t>(s)] << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build multiple-choice science questions from a textbook corpus"};
  app.require_subcommand(1);
  const fs::path data = default_data_dir();
  const std::string resources_default = default_resource_dir().string();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Split manifest books into a paragraph store");
  std::string manifest, ingest_out, abbrev_path;
  ingest->add_option("--manifest", manifest, "book_id, title, path, exportable (TSV)")->required();
  ingest->add_option("--out", ingest_out, "paragraph store (JSONL)")->required();
  ingest->add_option("--abbreviations", abbrev_path, "abbreviation list");

  // filter
  auto* filter = app.add_subcommand("filter", "Keep paragraphs that pass the sentence rules");
  std::string filter_in, filter_out, filter_report, filter_config = (data / "filter_config.json").string();
  filter->add_option("--in", filter_in)->required();
  filter->add_option("--out", filter_out)->required();
  filter->add_option("--report", filter_report, "per-rule counts (TSV)");
  filter->add_option("--config", filter_config)->capture_default_str();

  // build-candidates
  auto* build = app.add_subcommand("build-candidates", "Build the candidate universe");
  std::string build_questions, build_out, resources = resources_default;
  build->add_option("--questions", build_questions)->required();
  build->add_option("--out", build_out)->required();
  build->add_option("--resources", resources)->capture_default_str();

  // features
  auto* features = app.add_subcommand("features", "Print the feature vector of one (q, a*, a') triple");
  std::string fq, fa, fd;
  features->add_option("--question", fq)->required();
  features->add_option("--answer", fa)->required();
  features->add_option("--distractor", fd)->required();
  features->add_option("--resources", resources)->capture_default_str();

  // train
  auto* train = app.add_subcommand("train", "Train the distractor ranking forest");
  std::string train_questions, train_universe, train_out;
  ForestParams params;
  double validation_fraction = 0.2;
  train->add_option("--questions", train_questions)->required();
  train->add_option("--universe", train_universe)->required();
  train->add_option("--out", train_out)->required();
  train->add_option("--resources", resources)->capture_default_str();
  train->add_option("--trees", params.n_trees)->capture_default_str();
  train->add_option("--min-leaf", params.min_leaf)->capture_default_str();
  train->add_option("--seed", params.seed)->capture_default_str();
  train->add_option("--threads", params.n_threads, "0 = hardware concurrency")->capture_default_str();
  train->add_option("--validation", validation_fraction)->capture_default_str();

  // suggest
  auto* suggest = app.add_subcommand("suggest", "Rank distractors for a question");
  std::string model_path, universe_path, sq, sa;
  std::size_t k = 6;
  suggest->add_option("--model", model_path)->required();
  suggest->add_option("--universe", universe_path)->required();
  suggest->add_option("--question", sq)->required();
  suggest->add_option("--answer", sa)->required();
  suggest->add_option("-k", k)->capture_default_str();
  suggest->add_option("--resources", resources)->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the annotation API");
  std::string store_dir, init_paragraphs, host = "127.0.0.1";
  int port = 8080;
  double timeout_minutes = 30;
  std::uint64_t option_seed = 0;
  serve->add_option("--store", store_dir)->required();
  serve->add_option("--paragraphs", init_paragraphs, "accepted paragraphs for a new store");
  serve->add_option("--model", model_path);
  serve->add_option("--universe", universe_path);
  serve->add_option("--resources", resources)->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--timeout-minutes", timeout_minutes)->capture_default_str();
  serve->add_option("--option-seed", option_seed)->capture_default_str();

  // export
  auto* exp = app.add_subcommand("export", "Write assembled records");
  std::string export_format = "mc", export_out;
  exp->add_option("--store", store_dir)->required();
  exp->add_option("--format", export_format)->check(CLI::IsMember({"mc", "da"}))->capture_default_str();
  exp->add_option("--out", export_out)->required();

  // split
  auto* split_cmd = app.add_subcommand("split", "Shuffle and label train/validation/test");
  std::string dataset_in, split_out;
  SplitSpec spec;
  split_cmd->add_option("--in", dataset_in)->required();
  split_cmd->add_option("--out", split_out, "defaults to rewriting --in");
  split_cmd->add_option("--val", spec.n_validation)->capture_default_str();
  split_cmd->add_option("--test", spec.n_test)->capture_default_str();
  split_cmd->add_option("--seed", spec.seed)->capture_default_str();
  std::string split_da;
  split_cmd->add_option("--direct-answer", split_da, "also write the direct-answer version");

  // stats
  auto* stats = app.add_subcommand("stats", "Token length histograms");
  std::string stats_out;
  bool stats_all = false;
  stats->add_option("--in", dataset_in)->required();
  stats->add_option("--out", stats_out, "TSV (stdout when absent)");
  stats->add_flag("--all", stats_all, "count every split, not only train");

  // baseline
  auto* baseline = app.add_subcommand("baseline", "IDF overlap answering baseline");
  std::string passages;
  baseline->add_option("--in", dataset_in)->required();
  baseline->add_option("--passages", passages, "paragraph store")->required();

  // discrim
  auto* discrim = app.add_subcommand("discrim", "Real vs generated question pairs");
  std::string real_path, generated_path, pairs_out = "pairs.tsv", key_out = "key.tsv";
  std::size_t n_pairs = 100;
  std::uint64_t discrim_seed = 0;
  discrim->add_option("--real", real_path)->required();
  discrim->add_option("--generated", generated_path)->required();
  discrim->add_option("--n", n_pairs)->capture_default_str();
  discrim->add_option("--seed", discrim_seed)->capture_default_str();
  discrim->add_option("--pairs", pairs_out)->capture_default_str();
  discrim->add_option("--key", key_out)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      const CorpusManifest m = CorpusManifest::load(manifest);
      const Lexicon abbrevs = abbrev_path.empty() ? default_abbreviations() : Lexicon::load(abbrev_path);
      std::vector<Paragraph> all;
      for (const ManifestEntry& e : m.entries) {
        auto ps = ingest_book(read_file(e.source), e, PosTagger::shared(), abbrevs);
        std::cerr << e.book_id << ": " << ps.size() << " paragraphs\n";
        all.insert(all.end(), std::make_move_iterator(ps.begin()), std::make_move_iterator(ps.end()));
      }
      write_paragraph_store(ingest_out, all);
      std::cout << "paragraphs\t" << all.size() << "\n";
    } else if (*filter) {
      const FilterResult r = filter_corpus(read_paragraph_store(filter_in), FilterConfig::load(filter_config));
      write_paragraph_store(filter_out, r.accepted);
      if (!filter_report.empty()) write_filter_report(filter_report, r.report);
      std::cout << format_filter_report(r.report);
    } else if (*build) {
      const auto qs = load_training_questions(build_questions);
      const CandidateUniverse u = build_universe(standard_sources(resources, qs));
      u.save(build_out);
      std::cout << "entries\t" << u.size() << "\n";
    } else if (*features) {
      const auto ctx = load_context(resources, nullptr);
      const FeatureVector fv = ctx->features(fq, fa, fd);
      const auto names = feature_names(ctx->embeddings.dim());
      std::cout << "# layout " << fv.layout_version << "\n" << std::setprecision(17);
      for (std::size_t i = 0; i < fv.values.size(); ++i) std::cout << names[i] << '\t' << fv.values[i] << "\n";
    } else if (*train) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto qs = load_training_questions(train_questions);
      const CandidateUniverse u = CandidateUniverse::load(train_universe);
      auto ctx = load_context(resources, nullptr);
      const TrainingReport rep = train_distractor_model(qs, u, *ctx, params, validation_fraction);
      save_model(rep.model, train_out);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::cout << "train_questions\t" << rep.n_train_questions << "\n"
                << "validation_questions\t" << rep.n_validation_questions << "\n"
                << "train_accuracy\t" << rep.train.accuracy << "\n"
                << "validation_accuracy\t" << rep.validation.accuracy << "\n"
                << "validation_instances\t" << rep.validation.total() << "\n"
                << "seconds\t" << secs << "\n";
    } else if (*suggest) {
      const auto ranker = load_ranker(model_path, universe_path, resources);
      for (const RankedSuggestion& s : ranker->suggest(sq, sa, k)) std::cout << s.surface << '\t' << s.score << "\n";
    } else if (*serve) {
      ServiceOptions opts;
      opts.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(timeout_minutes * 60000));
      opts.option_seed = option_seed;
      std::unique_ptr<AnnotationStore> store;
      if (fs::exists(fs::path(store_dir) / "paragraphs.jsonl")) {
        store = AnnotationStore::open(store_dir, opts);
      } else {
        if (init_paragraphs.empty()) throw ContractViolation("new store: pass --paragraphs");
        store = AnnotationStore::create(store_dir, read_paragraph_store(init_paragraphs), opts);
      }
      if (!model_path.empty()) {
        if (universe_path.empty()) throw ContractViolation("--model needs --universe");
        store->set_suggester(ranker_suggester(load_ranker(model_path, universe_path, resources)));
      }
      ApiServer server(*store);
      if (!server.bind(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << host << ":" << port << "\n";
      server.listen_after_bind();
      g_server = nullptr;
    } else if (*exp) {
      const auto store = AnnotationStore::open(store_dir);
      const auto records = store->records();
      print_split_counts(export_format == "mc" ? export_mc(records, export_out)
                                               : export_direct_answer(records, export_out));
    } else if (*split_cmd) {
      const auto labeled = shuffle_split(import_mc(dataset_in), spec);
      print_split_counts(export_mc(labeled, split_out.empty() ? dataset_in : split_out));
      if (!split_da.empty()) {
        const ExportCounts c = export_direct_answer(labeled, split_da);
        std::cout << "direct_answer\t" << c.written << "\nanswer_not_in_passage\t" << c.answer_not_in_passage
                  << "\n";
      }
    } else if (*stats) {
      auto records = import_mc(dataset_in);
      if (!stats_all) std::erase_if(records, [](const MCQRecord& r) { return r.split != Split::Train; });
      const LengthStats s = length_stats(records);
      if (stats_out.empty()) {
        write_length_stats(std::cout, s);
      } else {
        std::ofstream out(stats_out);
        write_length_stats(out, s);
      }
    } else if (*baseline) {
      std::vector<std::string> texts;
      for (const Paragraph& p : read_paragraph_store(passages)) texts.push_back(p.text);
      const BaselineResult r = evaluate_baseline(import_mc(dataset_in), OverlapIndex(texts));
      std::cout << "correct\t" << r.correct << "\ntotal\t" << r.total << "\naccuracy\t" << r.accuracy() << "\n";
    } else if (*discrim) {
      const DiscriminationSet set =
          discrimination_pairs(load_question_texts(real_path), load_question_texts(generated_path), n_pairs,
                               discrim_seed);
      std::ofstream pairs(pairs_out);
      std::ofstream key(key_out);
      pairs << "pair_id\tA\tB\n";
      key << "pair_id\treal\n";
      for (const auto& p : set.pairs) pairs << p.pair_id << '\t' << p.a << '\t' << p.b << "\n";
      for (const auto& x : set.key) key << x.pair_id << '\t' << x.real << "\n";
      std::cout << "pairs\t" << set.pairs.size() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "mcqforge: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
