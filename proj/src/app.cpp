/*
 * Copyright 2026 The defpipe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "defpipe/app.hpp"

#include <cstdlib>
#include <exception>
#include <fstream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"

#include "defpipe/backend_client.hpp"
#include "defpipe/cdi.hpp"
#include "defpipe/error.hpp"
#include "defpipe/evaluator.hpp"
#include "defpipe/jsonl.hpp"
#include "defpipe/random.hpp"
#include "defpipe/sdi.hpp"

namespace defpipe::app {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliOptions {
  std::string config;
  std::string term;
  std::string batch;
  std::optional<std::size_t> k;
  std::optional<std::size_t> kprime;
  std::string backend;
  std::string endpoint;
  std::optional<std::int64_t> seed;
  std::string out;
  std::string split;
  std::string ratings;
  std::string hypotheses;
};

struct Context {
  RunConfig rc;
  CliOptions opts;
  std::ostream& out;
  std::ostream& err;
  Provenance provenance;
};

// ---------------------------------------------------------------- config --

RunConfig load_run_config(const CliOptions& o) {
  RunConfig rc;
  json cfg = default_config();
  rc.base_dir = fs::current_path();
  if (!o.config.empty()) {
    const fs::path path(o.config);
    if (!fs::exists(path)) throw Error(ErrorCode::kIo, "missing input: config '" + o.config + "'");
    auto in = open_input(path);
    json user;
    try {
      user = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kParse, "config '" + o.config + "': " + e.what());
    }
    cfg.merge_patch(user);
    rc.base_dir = fs::absolute(path).parent_path();
  }
  if (o.k) cfg["pipeline"]["k"] = *o.k;
  if (o.kprime) cfg["pipeline"]["kprime"] = *o.kprime;
  if (!o.backend.empty()) cfg["pipeline"]["backend"] = o.backend;
  if (o.seed) cfg["seed"] = *o.seed;
  if (!o.endpoint.empty()) cfg["backend"]["endpoint"] = o.endpoint;
  if (cfg["backend"]["endpoint"].is_null()) {
    if (const char* env = std::getenv("DEFPIPE_ENDPOINT"); env && *env) {
      cfg["backend"]["endpoint"] = env;
    }
  }

  rc.seed = cfg.at("seed").get<std::uint64_t>();
  const auto& p = cfg.at("pipeline");
  rc.pipeline.k = p.at("k").get<std::size_t>();
  rc.pipeline.kprime = p.at("kprime").get<std::size_t>();
  rc.pipeline.token_budget = p.at("token_budget").get<std::size_t>();
  rc.pipeline.backend = generator::parse_backend(p.at("backend").get<std::string>());
  if (!p.at("context").is_null()) rc.pipeline.context = p.at("context").get<std::string>();
  rc.pipeline.exclude_self = p.at("exclude_self").get<bool>();
  generator::validate(rc.pipeline);

  rc.out_dir = !o.out.empty() ? fs::path(o.out)
                              : rc.base_dir / cfg.at("paths").at("out").get<std::string>();
  rc.effective = std::move(cfg);
  return rc;
}

// --------------------------------------------------------------- helpers --

std::uint64_t ratio_check_seed(const RunConfig& rc) { return rc.seed; }

ingest::SplitRatios ratios_from(const json& j) {
  const auto r = j.get<std::vector<double>>();
  if (r.size() != 3) throw Error(ErrorCode::kInvalidArgument, "split_ratios must have 3 entries");
  ingest::SplitRatios out{r[0], r[1], r[2]};
  ingest::validate(out);
  return out;
}

backend::RetryPolicy retry_policy(const RunConfig& rc) {
  const auto& b = rc.effective.at("backend");
  backend::RetryPolicy policy;
  policy.max_retries = b.at("max_retries").get<std::size_t>();
  policy.initial_backoff = std::chrono::milliseconds(b.at("backoff_ms").get<long long>());
  policy.read_timeout = std::chrono::milliseconds(b.at("timeout_ms").get<long long>());
  policy.connect_timeout = std::min(policy.read_timeout, std::chrono::milliseconds(5000));
  return policy;
}

ingest::ParseResult load_corpus(Context& ctx, const fs::path& path, Source source) {
  auto in = open_input(path);
  auto parsed = ingest::parse_corpus(in, source);
  for (const auto& w : parsed.warnings) ctx.err << "warning: " << path.string() << ": " << w << '\n';
  return parsed;
}

std::vector<Term> read_terms(const fs::path& path) {
  auto in = open_input(path);
  std::vector<Term> terms;
  for_each_jsonl(in, [&](const json& j, std::size_t line) {
    try {
      terms.push_back(j.get<Term>());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParse, path.string() + " line " + std::to_string(line) + ": " + e.what());
    }
  });
  return terms;
}

template <typename T>
std::vector<T> read_records(const fs::path& path) {
  auto in = open_input(path);
  std::vector<T> out;
  for_each_jsonl(in, [&](const json& j, std::size_t line) {
    try {
      out.push_back(j.get<T>());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParse, path.string() + " line " + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

class JsonlSink {
 public:
  JsonlSink(const fs::path& path, const Provenance& provenance) : file_(path) {
    file_.stream() << json{{"provenance", provenance.to_json()}}.dump() << '\n';
  }
  void write(const json& record) {
    file_.stream() << record.dump() << '\n';
    ++count_;
  }
  void commit() { file_.commit(); }
  std::size_t count() const { return count_; }

 private:
  AtomicFile file_;
  std::size_t count_ = 0;
};

void write_json(const fs::path& path, json body, const Provenance& provenance) {
  body["provenance"] = provenance.to_json();
  write_text_atomic(path, body.dump(2) + "\n");
}

std::string provenance_comment(const Provenance& p) {
  return "# config_hash=" + p.config_hash + "\tseed=" + std::to_string(p.seed) +
         "\ttool_version=" + p.tool_version + "\n";
}

std::unique_ptr<sdi::SentenceScorer> load_scorer(const Context& ctx) {
  const auto& endpoint = ctx.rc.effective.at("scorer").at("endpoint");
  if (!endpoint.is_null()) {
    return std::make_unique<backend::HttpScorer>(
        backend::Endpoint::parse(endpoint.get<std::string>()), retry_policy(ctx.rc));
  }
  auto in = open_input(ctx.rc.require("model", "scorer.json"));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("scorer model: ") + e.what());
  }
  return std::make_unique<sdi::BuiltinScorer>(j.get<sdi::ScorerModel>());
}

cdi::Bm25Index load_index(const Context& ctx) {
  auto in = open_input(ctx.rc.require("index", "cdi-index.jsonl"));
  return cdi::Bm25Index::load(in);
}

/// Streams terms either from --term or from a --batch JSONL file. Batch lines
/// may be a bare string, {"surface": ...}, or a dataset record whose "term"
/// is a Term object; --split keeps only records of that split.
class TermStream {
 public:
  explicit TermStream(const CliOptions& o) : split_(o.split) {
    if (!o.term.empty() && !o.batch.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--term and --batch are mutually exclusive");
    }
    if (!o.term.empty()) {
      single_ = Term::from_surface(o.term);
    } else if (!o.batch.empty()) {
      in_ = open_input(o.batch);
    } else {
      throw Error(ErrorCode::kInvalidArgument, "either --term or --batch is required");
    }
  }

  bool next_chunk(std::vector<Term>& chunk, std::size_t n) {
    chunk.clear();
    if (single_) {
      chunk.push_back(std::move(*single_));
      single_.reset();
      return true;
    }
    std::string line;
    while (chunk.size() < n && std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::kParse, "batch line " + std::to_string(line_no_) + ": " + e.what());
      }
      if (is_provenance_record(j)) continue;
      if (auto t = to_term(j)) chunk.push_back(std::move(*t));
    }
    return !chunk.empty();
  }

 private:
  std::optional<Term> to_term(const json& j) const {
    try {
      if (j.is_string()) return Term::from_surface(j.get<std::string>());
      if (!split_.empty() && split_ != "all" && j.contains("split") &&
          j.at("split").get<std::string>() != split_) {
        return std::nullopt;
      }
      if (j.contains("term")) {
        const auto& t = j.at("term");
        return t.is_string() ? Term::from_surface(t.get<std::string>()) : t.get<Term>();
      }
      return j.get<Term>();
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParse, "batch line " + std::to_string(line_no_) + ": " + e.what());
    }
  }

  std::optional<Term> single_;
  std::ifstream in_;
  std::string split_;
  std::size_t line_no_ = 0;
};

// Runs `fn` over a chunk with OpenMP; results come back in input order and the
// first failure (in input order) is rethrown.
template <typename Fn>
std::vector<json> map_chunk(const std::vector<Term>& chunk, Fn fn) {
  std::vector<json> results(chunk.size());
  std::vector<std::exception_ptr> errors(chunk.size());
  const auto n = static_cast<std::ptrdiff_t>(chunk.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      results[i] = fn(chunk[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::size_t chunk_size(const RunConfig& rc) {
  return std::max<std::size_t>(1, rc.effective.at("batch").at("chunk_size").get<std::size_t>());
}

// -------------------------------------------------------------- commands --

int cmd_build_corpus(Context& ctx) {
  const auto enc = load_corpus(ctx, ctx.rc.require("encyclopedia"), Source::kEncyclopedia);
  const auto web = load_corpus(ctx, ctx.rc.require("web"), Source::kWeb);
  std::optional<ingest::ParseResult> ref;
  if (auto p = ctx.rc.path("reference")) ref = load_corpus(ctx, ctx.rc.require("reference"), Source::kWeb);
  auto terms = read_terms(ctx.rc.require("terms"));

  const ingest::SentenceIndex enc_index(enc.documents);
  const ingest::SentenceIndex web_index(web.documents);
  const ingest::SentenceIndex ref_index = ref ? ingest::SentenceIndex(ref->documents) : web_index;
  terms = ingest::canonical_term_order(terms);
  for (auto& t : terms) t.ref_frequency = ingest::term_frequency(t, ref_index);

  JsonlSink sink(ctx.rc.out_dir / "terms.jsonl", ctx.provenance);
  for (const auto& t : terms) sink.write(t);
  sink.commit();

  auto stats = [](const ingest::ParseResult& r, const ingest::SentenceIndex& idx) {
    return json{{"documents", r.documents.size()}, {"skipped", r.skipped}, {"sentences", idx.size()}};
  };
  json body = {{"encyclopedia", stats(enc, enc_index)},
               {"web", stats(web, web_index)},
               {"reference", ref ? stats(*ref, ref_index) : json(nullptr)},
               {"terms", terms.size()}};
  write_json(ctx.rc.out_dir / "corpus_stats.json", body, ctx.provenance);
  ctx.out << json{{"command", "build-corpus"}, {"terms", terms.size()},
                  {"skipped", enc.skipped + web.skipped + (ref ? ref->skipped : 0)}}.dump()
          << '\n';
  return kOk;
}

int cmd_build_dataset(Context& ctx) {
  const auto enc = load_corpus(ctx, ctx.rc.require("encyclopedia"), Source::kEncyclopedia);
  const auto web = load_corpus(ctx, ctx.rc.require("web"), Source::kWeb);
  const auto terms = read_terms(ctx.rc.require("resolved_terms", "terms.jsonl"));
  const auto& ing = ctx.rc.effective.at("ingest");

  ingest::ExtractionOptions opts;
  opts.min_freq = ing.at("min_freq").get<std::uint64_t>();
  opts.max_negatives = ing.at("max_negatives").get<std::size_t>();
  opts.ratios = ratios_from(ing.at("split_ratios"));
  opts.seed = ratio_check_seed(ctx.rc);

  std::vector<std::string> warnings;
  const auto extraction = ingest::build_extraction_dataset(enc.documents, terms, opts, &warnings);
  const auto generation = ingest::build_generation_dataset(enc.documents, web.documents, terms,
                                                           opts.ratios, opts.seed, &warnings);
  for (const auto& w : warnings) ctx.err << "warning: " << w << '\n';

  JsonlSink ex_sink(ctx.rc.out_dir / "extraction.jsonl", ctx.provenance);
  std::size_t positives = 0;
  for (const auto& e : extraction) {
    positives += e.label == Label::kPositive;
    ex_sink.write(e);
  }
  JsonlSink gen_sink(ctx.rc.out_dir / "generation.jsonl", ctx.provenance);
  std::map<std::string, std::size_t> split_sizes;
  for (const auto& g : generation) {
    ++split_sizes[std::string(to_string(g.split))];
    gen_sink.write(g);
  }
  ex_sink.commit();
  gen_sink.commit();
  ctx.out << json{{"command", "build-dataset"},
                  {"extraction", {{"positive", positives}, {"negative", extraction.size() - positives}}},
                  {"generation", split_sizes}}
                 .dump()
          << '\n';
  return kOk;
}

int cmd_train_scorer(Context& ctx) {
  const auto examples =
      read_records<ExtractionExample>(ctx.rc.require("extraction_dataset", "extraction.jsonl"));
  const auto& s = ctx.rc.effective.at("scorer");
  sdi::TrainOptions opts;
  opts.learning_rate = s.at("learning_rate").get<double>();
  opts.epochs = s.at("epochs").get<std::size_t>();
  opts.seed = ctx.rc.seed;
  const auto model = sdi::train_scorer(examples, opts);
  const auto eval = sdi::evaluate_scorer(model, examples);

  json body = model;
  body["evaluation"] = {{"split", "test"},
                        {"threshold", sdi::kDecisionThreshold},
                        {"precision", eval.precision},
                        {"recall", eval.recall},
                        {"f1", eval.f1}};
  write_json(ctx.rc.out_dir / "scorer.json", body, ctx.provenance);
  ctx.out << json{{"command", "train-scorer"}, {"evaluation", body["evaluation"]}}.dump() << '\n';
  return kOk;
}

int cmd_build_index(Context& ctx) {
  std::vector<cdi::CoreTermEntry> entries;
  if (ctx.rc.path("core_terms")) {
    auto in = open_input(ctx.rc.require("core_terms"));
    entries = cdi::read_core_terms(in);
  } else {
    const auto enc = load_corpus(ctx, ctx.rc.require("encyclopedia"), Source::kEncyclopedia);
    entries = cdi::core_terms_from_encyclopedia(enc.documents);
  }
  const auto& b = ctx.rc.effective.at("bm25");
  const auto index =
      cdi::Bm25Index::build(std::move(entries), b.at("k1").get<double>(), b.at("b").get<double>());
  AtomicFile file(ctx.rc.out_dir / "cdi-index.jsonl");
  index.save(file.stream(), ctx.provenance.to_json());
  file.commit();
  ctx.out << json{{"command", "build-index"},
                  {"n_docs", index.n_docs()},
                  {"vocabulary", index.vocabulary_size()}}
                 .dump()
          << '\n';
  return kOk;
}

int cmd_extract(Context& ctx) {
  TermStream terms(ctx.opts);
  const auto web = load_corpus(ctx, ctx.rc.require("web"), Source::kWeb);
  const ingest::SentenceIndex web_index(web.documents);
  const auto scorer = load_scorer(ctx);
  const auto index = load_index(ctx);
  const auto& cfg = ctx.rc.pipeline;

  JsonlSink sink(ctx.rc.out_dir / "extract.jsonl", ctx.provenance);
  std::vector<Term> chunk;
  while (terms.next_chunk(chunk, chunk_size(ctx.rc))) {
    for (auto& record : map_chunk(chunk, [&](const Term& term) {
           const auto candidates = sdi::collect_candidates(term, web_index);
           const auto ranked = sdi::rank_sdi(term, candidates, cfg.k, *scorer);
           const auto related = cdi::retrieve_related(index, term, cfg.kprime, cfg.exclude_self);
           json sdi_json = json::array();
           for (const auto& s : ranked) {
             sdi_json.push_back({{"text", s.sentence.text},
                                 {"doc_id", s.sentence.doc_id},
                                 {"confidence", s.confidence}});
           }
           json cdi_json = json::array();
           for (const auto& r : related) {
             cdi_json.push_back({{"term", r.term.surface},
                                 {"definition", r.definition},
                                 {"relevance", r.relevance}});
           }
           return json{{"term", term.surface},
                       {"n_candidates", candidates.size()},
                       {"sdi", std::move(sdi_json)},
                       {"cdi", std::move(cdi_json)}};
         })) {
      sink.write(record);
    }
  }
  sink.commit();
  ctx.out << json{{"command", "extract"}, {"records", sink.count()}}.dump() << '\n';
  return kOk;
}

int cmd_generate(Context& ctx) {
  TermStream terms(ctx.opts);
  const auto web = load_corpus(ctx, ctx.rc.require("web"), Source::kWeb);
  const ingest::SentenceIndex web_index(web.documents);
  const auto scorer = load_scorer(ctx);
  std::optional<cdi::Bm25Index> index;
  if (ctx.rc.pipeline.kprime > 0) index = load_index(ctx);

  std::unique_ptr<backend::HttpGenerator> remote;
  if (ctx.rc.pipeline.backend == generator::Backend::kExternal) {
    const auto& endpoint = ctx.rc.effective.at("backend").at("endpoint");
    if (endpoint.is_null()) {
      throw Error(ErrorCode::kBackendUnavailable,
                  "external backend selected but no endpoint (--endpoint or DEFPIPE_ENDPOINT)");
    }
    remote = std::make_unique<backend::HttpGenerator>(
        backend::Endpoint::parse(endpoint.get<std::string>()), retry_policy(ctx.rc));
  }

  generator::Resources res;
  res.web = &web_index;
  res.scorer = scorer.get();
  res.index = index ? &*index : nullptr;
  res.backend = remote.get();
  res.decode.max_len = ctx.rc.effective.at("backend").at("max_len").get<std::size_t>();
  res.decode.beam_size = ctx.rc.effective.at("backend").at("beam_size").get<std::size_t>();

  JsonlSink sink(ctx.rc.out_dir / "generations.jsonl", ctx.provenance);
  std::size_t missing = 0;
  std::vector<Term> chunk;
  while (terms.next_chunk(chunk, chunk_size(ctx.rc))) {
    for (auto& record : map_chunk(chunk, [&](const Term& term) {
           try {
             auto rec = generator::to_batch_record(generator::cdm_generate(term, res, ctx.rc.pipeline));
             rec["status"] = "ok";
             return rec;
           } catch (const Error& e) {
             if (e.code() != ErrorCode::kNoCandidates) throw;
             return json{{"term", term.surface},
                         {"definition", ""},
                         {"backend_id", "extractive"},
                         {"k_used", 0},
                         {"kprime_used", 0},
                         {"truncated", false},
                         {"status", "no_definition_found"}};
           }
         })) {
      missing += record["status"] != "ok";
      sink.write(record);
    }
  }
  sink.commit();
  ctx.out << json{{"command", "generate"},
                  {"model", generator::model_name(ctx.rc.pipeline)},
                  {"records", sink.count()},
                  {"no_definition_found", missing}}
                 .dump()
          << '\n';
  return kOk;
}

std::optional<evaluator::HumanAggregate> maybe_ratings(Context& ctx) {
  std::optional<fs::path> path;
  if (!ctx.opts.ratings.empty()) {
    path = ctx.opts.ratings;
    if (!fs::exists(*path)) throw Error(ErrorCode::kIo, "missing input: ratings '" + path->string() + "'");
  } else if (ctx.rc.path("ratings")) {
    path = ctx.rc.require("ratings");
  }
  if (!path) return std::nullopt;
  auto in = open_input(*path);
  return evaluator::aggregate_human(evaluator::HumanRatings::read_csv(in));
}

int cmd_evaluate(Context& ctx) {
  const auto references =
      read_records<GenerationExample>(ctx.rc.require("generation_dataset", "generation.jsonl"));
  fs::path hyp_path;
  if (!ctx.opts.hypotheses.empty()) {
    hyp_path = ctx.opts.hypotheses;
    if (!fs::exists(hyp_path)) throw Error(ErrorCode::kIo, "missing input: hypotheses '" + hyp_path.string() + "'");
  } else {
    hyp_path = ctx.rc.require("hypotheses", "generations.jsonl");
  }
  std::map<std::string, std::string> hypotheses;
  {
    auto in = open_input(hyp_path);
    for_each_jsonl(in, [&](const json& j, std::size_t) {
      const auto key = text::normalize_term(j.at("term").get<std::string>());
      hypotheses.emplace(key, j.at("definition").get<std::string>());
    });
  }

  const std::string split =
      !ctx.opts.split.empty() ? ctx.opts.split : ctx.rc.effective.at("evaluate").at("split").get<std::string>();
  std::vector<evaluator::EvalItem> items;
  for (const auto& ex : references) {
    if (split != "all" && to_string(ex.split) != split) continue;
    auto it = hypotheses.find(ex.term.normalized);
    items.push_back({ex.term, it == hypotheses.end() ? std::string() : it->second, ex.gold_definition});
  }
  const auto edges = ctx.rc.effective.at("metrics").at("bucket_edges").get<std::vector<std::uint64_t>>();
  auto report = evaluator::evaluate(items, edges);
  report.human = maybe_ratings(ctx);

  auto body = evaluator::to_json(report);
  body["model"] = generator::model_name(ctx.rc.pipeline);
  body["split"] = split;
  write_json(ctx.rc.out_dir / "report.json", body, ctx.provenance);
  write_text_atomic(ctx.rc.out_dir / "report.tsv",
                    provenance_comment(ctx.provenance) + evaluator::to_tsv(report));
  ctx.out << json{{"command", "evaluate"}, {"corpus", body["corpus"]}}.dump() << '\n';
  return kOk;
}

std::string fmt2(const std::optional<double>& v) {
  if (!v) return "null";
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << *v;
  return s.str();
}

int cmd_report(Context& ctx) {
  auto in = open_input(ctx.rc.require("report", "report.json"));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("report: ") + e.what());
  }
  auto report = evaluator::report_from_json(j);
  if (auto human = maybe_ratings(ctx)) report.human = human;

  std::ostringstream s;
  s << "model\tBL\tR-L\tMT\tBS\n"
    << j.value("model", std::string("?")) << '\t' << fmt2(report.bleu) << '\t' << fmt2(report.rouge_l)
    << '\t' << fmt2(report.meteor) << '\t' << fmt2(report.bertscore) << "\n\n";
  s << "bucket\tn\tBL\tR-L\tMT\n";
  for (const auto& b : report.buckets) {
    s << '[' << (b.lower ? std::to_string(*b.lower) : "-inf") << ','
      << (b.upper ? std::to_string(*b.upper) : "inf") << ")\t" << b.n << '\t' << fmt2(b.bleu)
      << '\t' << fmt2(b.rouge_l) << '\t' << fmt2(b.meteor) << '\n';
  }
  if (report.human) {
    s << "\nhuman_mean\tkappa\tn_terms\tn_annotators\n"
      << fmt2(report.human->mean) << '\t' << fmt2(report.human->kappa) << '\t'
      << report.human->n_terms << '\t' << report.human->n_annotators << '\n';
  }
  write_text_atomic(ctx.rc.out_dir / "summary.tsv", provenance_comment(ctx.provenance) + s.str());
  ctx.out << s.str();
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return kMissingInput;
    case ErrorCode::kBackendUnavailable:
    case ErrorCode::kProtocolViolation: return kBackendFailure;
    case ErrorCode::kInvariant: return kInvariantBreach;
    default: return kFailure;
  }
}

void report_error(std::ostream& err, std::string_view kind, std::string_view message) {
  err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

json default_config() {
  return json::parse(R"({
    "seed": 13,
    "paths": {
      "out": "out",
      "encyclopedia": null, "web": null, "reference": null, "terms": null,
      "core_terms": null, "ratings": null,
      "resolved_terms": null, "extraction_dataset": null, "generation_dataset": null,
      "model": null, "index": null, "hypotheses": null, "report": null
    },
    "ingest": {"min_freq": 5, "max_negatives": 5, "split_ratios": [0.8, 0.1, 0.1]},
    "scorer": {"learning_rate": 0.1, "epochs": 20, "endpoint": null},
    "bm25": {"k1": 1.2, "b": 0.75},
    "pipeline": {"k": 5, "kprime": 5, "token_budget": 480, "backend": "extractive",
                 "context": null, "exclude_self": false},
    "backend": {"endpoint": null, "max_len": 96, "beam_size": 4, "max_retries": 2,
                "backoff_ms": 100, "timeout_ms": 60000},
    "metrics": {"bucket_edges": [5, 10, 50, 100, 500]},
    "evaluate": {"split": "test"},
    "batch": {"chunk_size": 64}
  })");
}

std::optional<fs::path> RunConfig::path(const std::string& key, const std::string& fallback) const {
  const auto& paths = effective.at("paths");
  if (auto it = paths.find(key); it != paths.end() && it->is_string()) {
    fs::path p = it->get<std::string>();
    return p.is_absolute() ? p : base_dir / p;
  }
  if (!fallback.empty()) return out_dir / fallback;
  return std::nullopt;
}

fs::path RunConfig::require(const std::string& key, const std::string& fallback) const {
  auto p = path(key, fallback);
  if (!p) throw Error(ErrorCode::kIo, "missing input: paths." + key + " is not configured");
  if (!fs::exists(*p)) {
    throw Error(ErrorCode::kIo, "missing input: paths." + key + " ('" + p->string() + "')");
  }
  return *p;
}

std::string RunConfig::config_hash() const {
  json canonical = effective;
  canonical["paths"].erase("out");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical.dump())));
  return buf;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App cli{"defpipe: jargon definition modeling pipeline"};
  cli.require_subcommand(1);
  CliOptions opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "JSON run configuration");
    sub->add_option("--seed", opts.seed, "Override the configured seed");
    sub->add_option("--out", opts.out, "Output directory");
  };
  auto add_pipeline = [&](CLI::App* sub) {
    sub->add_option("--term", opts.term, "Single term surface form");
    sub->add_option("--batch", opts.batch, "JSONL file of terms or dataset records");
    sub->add_option("--split", opts.split, "Keep only batch records of this split");
    sub->add_option("--k", opts.k, "Number of SDI sentences");
    sub->add_option("--kprime", opts.kprime, "Number of CDI definitions");
    sub->add_option("--backend", opts.backend, "extractive | external")
        ->check(CLI::IsMember({"extractive", "external"}));
    sub->add_option("--endpoint", opts.endpoint, "Backend URL (falls back to DEFPIPE_ENDPOINT)");
  };

  struct Command {
    CLI::App* sub;
    int (*fn)(Context&);
  };
  std::vector<Command> commands;
  auto add = [&](const char* name, const char* help, int (*fn)(Context&)) {
    auto* sub = cli.add_subcommand(name, help);
    add_common(sub);
    commands.push_back({sub, fn});
    return sub;
  };

  add("build-corpus", "Parse corpora and resolve term frequencies", cmd_build_corpus);
  add("build-dataset", "Build the extraction and generation datasets", cmd_build_dataset);
  add("train-scorer", "Train the built-in definitional sentence scorer", cmd_train_scorer);
  add("build-index", "Build the BM25 index over core-term definitions", cmd_build_index);
  add_pipeline(add("extract", "Rank SDI and retrieve CDI for terms", cmd_extract));
  add_pipeline(add("generate", "Produce definitions for terms", cmd_generate));
  auto* evaluate = add("evaluate", "Score generated definitions against gold", cmd_evaluate);
  evaluate->add_option("--hyp", opts.hypotheses, "Generated definitions JSONL");
  evaluate->add_option("--split", opts.split, "Reference split to score (train|valid|test|all)");
  evaluate->add_option("--ratings", opts.ratings, "Human ratings CSV");
  evaluate->add_option("--k", opts.k, "Pipeline k recorded in the report");
  evaluate->add_option("--kprime", opts.kprime, "Pipeline k' recorded in the report");
  auto* report = add("report", "Render a report summary", cmd_report);
  report->add_option("--ratings", opts.ratings, "Human ratings CSV");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e, out, err);
    return code == 0 ? kOk : kFailure;
  }

  try {
    for (const auto& c : commands) {
      if (!c.sub->parsed()) continue;
      Context ctx{load_run_config(opts), opts, out, err, {}};
      ctx.provenance.config_hash = ctx.rc.config_hash();
      ctx.provenance.seed = static_cast<std::int64_t>(ctx.rc.seed);
      fs::create_directories(ctx.rc.out_dir);
      return c.fn(ctx);
    }
  } catch (const Error& e) {
    report_error(err, to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    report_error(err, "parse", e.what());
    return kFailure;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return kInvariantBreach;
  }
  return kFailure;
}

}  // namespace defpipe::app
