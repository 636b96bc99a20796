#include "kgforge/cli.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kgforge/code_switch.hpp"
#include "kgforge/decode_trie.hpp"
#include "kgforge/ds_extract.hpp"
#include "kgforge/kb_store.hpp"
#include "kgforge/lang_sampler.hpp"
#include "kgforge/mask_engine.hpp"
#include "kgforge/parallel.hpp"
#include "kgforge/records.hpp"
#include "kgforge/rng.hpp"
#include "kgforge/scoring.hpp"
#include "kgforge/triple_codec.hpp"
#include "kgforge/utf8.hpp"
#include "kgforge/vocab.hpp"
#include "kgforge/wiki_ingest.hpp"

namespace kgforge::cli {

namespace {

namespace fs = std::filesystem;
using records::Json;
using records::OrderedJson;

// Bad flags or parameter values: exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data tied to a record: exit status 1.
class DataError : public Error {
 public:
  DataError(std::string record_id, const std::string& message)
      : Error(message), record_id_(std::move(record_id)) {}
  const std::string& record_id() const { return record_id_; }

 private:
  std::string record_id_;
};

struct Env {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

// Resolves "-" to the caller's streams, anything else to files.
class Streams {
 public:
  Streams(const std::string& input, const std::string& output, Env env) {
    if (input == "-") {
      in_ = &env.in;
    } else {
      fin_.open(input, std::ios::binary);
      if (!fin_) throw UsageError("cannot open input " + input);
      in_ = &fin_;
    }
    if (output == "-") {
      out_ = &env.out;
    } else {
      fout_.open(output, std::ios::binary | std::ios::trunc);
      if (!fout_) throw UsageError("cannot open output " + output);
      out_ = &fout_;
    }
  }

  std::istream& in() { return *in_; }
  std::ostream& out() { return *out_; }

 private:
  std::ifstream fin_;
  std::ofstream fout_;
  std::istream* in_ = nullptr;
  std::ostream* out_ = nullptr;
};

struct ParsedRecord {
  Json json;
  std::string id;
};

// Materializes a JSONL stream for the aggregate stages.
std::vector<ParsedRecord> read_records(std::istream& in) {
  std::vector<ParsedRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (utf8::split_words(line).empty()) continue;
    const std::string fallback = "line " + std::to_string(line_no);
    Json j = records::parse_line(line, fallback);
    std::string id = records::record_id_of(j, fallback);
    out.push_back({std::move(j), std::move(id)});
  }
  return out;
}

std::string line_of(const OrderedJson& j) { return records::dump(j) + '\n'; }

std::uint64_t require_seed(const CLI::Option* opt, std::uint64_t seed) {
  if (opt->count() == 0) throw UsageError("--seed is required for this subcommand");
  return seed;
}

KbStore load_kb(const std::string& dir) {
  if (dir.empty()) throw UsageError("--kb is required");
  return KbStore::load_dir(dir);
}

std::set<std::string> parse_list(const std::string& csv) {
  std::set<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = utf8::normalize_space(item);
    if (!t.empty()) out.insert(t);
  }
  return out;
}

std::vector<std::string> read_label_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open label file " + path);
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    std::string label = utf8::normalize_space(line);
    if (!label.empty()) labels.push_back(std::move(label));
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

std::string resolve_task_tag(const std::string& tag) {
  if (tag == "el") return std::string(kElTag);
  if (tag == "tri") return std::string(kTriTag);
  return tag;
}

// Sentence (with its triples) as read by linearize, el-target and classify.
struct TripleRecord {
  AnnotatedSentence sentence;
  std::vector<Triple> triples;
};

TripleRecord triple_record_from_json(const Json& j, const std::string& id) {
  return TripleRecord{records::sentence_from_json(j), records::triples_from_json(j, id)};
}

// Copies a record and replaces its triples array.
OrderedJson with_triples(const Json& j, const OrderedJson& triples) {
  OrderedJson out = OrderedJson::parse(j.dump());
  out["triples"] = triples;
  return out;
}

struct StrippedRecord {
  std::string id;
  std::vector<std::string> words;
  std::vector<Span> spans;
};

StrippedRecord stripped_from_json(const Json& j, const std::string& id) {
  StrippedRecord r;
  r.id = id;
  if (j.contains("base_sent_id")) {
    const CsSentence cs = records::cs_sentence_from_json(j);
    StrippedWords stripped = strip_entity_markers(cs.words);
    r.words = std::move(stripped.words);
    r.spans = std::move(stripped.entity_spans);
  } else {
    const AnnotatedSentence s = records::sentence_from_json(j);
    r.words = s.words;
    for (const auto& m : s.mentions) r.spans.emplace_back(m.start_word, m.end_word);
  }
  return r;
}

std::vector<Triple> parse_any_target(const std::string& target) {
  const auto first = utf8::split_words(target);
  if (!first.empty() && first[0] == kEntitySection) return parse_entity_prompt_target(target).triples;
  return parse_triples(target);
}

std::string format_prob(double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

// ---------------------------------------------------------------------------

struct Options {
  std::string input = "-";
  std::string output = "-";
  std::uint64_t seed = 0;
  std::string kb;
  // ingest
  std::string format = "jsonl";
  std::string filter = "entitycs";
  std::string doc_id;
  // codeswitch
  std::string languages;
  std::size_t max_variants = kDefaultMaxVariants;
  // mask
  std::string strategy = "mlm";
  bool with_mlm = false;
  double p_entity = -1.0;
  std::string vocab;
  std::string vocab_out;
  // sample-langs
  std::string counts;
  double alpha = kDefaultAlpha;
  std::size_t draws = 0;
  // codec
  std::string task_tag;
  // ds
  std::string scores;
  double threshold = kDefaultEntailmentThreshold;
  double fraction = kDefaultNegativeFraction;
  std::string ratios = "0.9,0.05,0.05";
  std::string output_dir;
  // trie
  std::string entities;
  std::string relations;
  std::string mode = "full";
  std::size_t max_triples = 2;
  std::size_t samples = 10;
  std::size_t free_tokens = 3;
  bool enumerate = false;
  // eval
  std::string pred;
  std::string gold;
};

void add_io(CLI::App* sub, Options& o) {
  sub->add_option("--input", o.input, "Input path, - for stdin");
  sub->add_option("--output", o.output, "Output path, - for stdout");
}

// ---------------------------------------------------------------------------

int cmd_ingest(const Options& o, Env env) {
  if (o.format != "jsonl" && o.format != "text") throw UsageError("--format must be jsonl or text");
  if (o.filter != "entitycs" && o.filter != "web" && o.filter != "none")
    throw UsageError("--filter must be entitycs, web or none");
  std::optional<KbStore> kb;
  if (!o.kb.empty()) kb = KbStore::load_dir(o.kb);
  Streams io(o.input, o.output, env);

  auto emit = [&](const RawDocument& doc) {
    std::string out;
    for (auto& s : ingest_document(doc)) {
      if (o.filter == "entitycs" && filter_for_entitycs(s) != FilterReason::Kept) continue;
      if (o.filter == "web" && !filter_for_web(s)) continue;
      if (kb) {
        for (auto& m : s.mentions) m.kb_id = kb->id_for_title(m.title);
      }
      out += line_of(records::to_json(s));
    }
    return out;
  };

  if (o.format == "text") {
    std::stringstream buf;
    buf << io.in().rdbuf();
    RawDocument doc;
    doc.doc_id = !o.doc_id.empty() ? o.doc_id
                 : o.input == "-"  ? std::string("stdin")
                                   : fs::path(o.input).stem().string();
    doc.text = buf.str();
    if (!utf8::is_valid(doc.text)) throw DataError(doc.doc_id, "input is not valid UTF-8");
    io.out() << emit(doc);
    return 0;
  }
  return map_records(io.in(), io.out(), env.err,
                     [&](const Json& j, const std::string&) { return emit(records::document_from_json(j)); },
                     worker_count());
}

int cmd_kb_load_check(const Options& o, Env env) {
  const KbStore kb = load_kb(o.kb);
  OrderedJson j;
  j["entities"] = kb.entities().size();
  j["relations"] = kb.relations().size();
  j["triples"] = kb.triples().size();
  j["pairs"] = kb.pair_count();
  j["languages"] = kb.languages();
  env.out << line_of(j);
  return 0;
}

int cmd_codeswitch(const Options& o, const CLI::Option* seed_opt, Env env) {
  const std::uint64_t seed = require_seed(seed_opt, o.seed);
  const KbStore kb = load_kb(o.kb);
  std::set<std::string> allowed = o.languages.empty() ? kb.languages() : parse_list(o.languages);
  allowed.erase(kSourceLanguage);
  Streams io(o.input, o.output, env);
  return map_records(io.in(), io.out(), env.err,
                     [&](const Json& j, const std::string&) {
                       AnnotatedSentence s = records::sentence_from_json(j);
                       for (auto& m : s.mentions) {
                         if (!m.kb_id) m.kb_id = kb.id_for_title(m.title);
                       }
                       Rng rng(record_seed(seed, s.sent_id));
                       std::string out;
                       for (const auto& cs : generate_cs(s, kb, allowed, o.max_variants, rng))
                         out += line_of(records::to_json(cs));
                       return out;
                     },
                     worker_count());
}

int cmd_mask(const Options& o, const CLI::Option* seed_opt, Env env) {
  const std::uint64_t seed = require_seed(seed_opt, o.seed);
  const auto strategy = parse_strategy(o.strategy);
  if (!strategy) throw UsageError("unknown --strategy " + o.strategy);
  MaskingConfig cfg = default_config(*strategy, o.with_mlm);
  if (o.p_entity >= 0.0) cfg.p_entity = o.p_entity;
  try {
    cfg.validate();
  } catch (const MaskError& e) {
    throw UsageError(e.what());
  }

  Streams io(o.input, o.output, env);
  std::stringstream buffered;
  std::istream* source = &io.in();
  Vocabulary vocab;
  if (!o.vocab.empty()) {
    vocab = Vocabulary::load(fs::path(o.vocab));
  } else {
    // Two passes: the vocabulary is built over the input words.
    buffered << io.in().rdbuf();
    std::set<std::string> tokens;
    for (const auto& rec : read_records(buffered)) {
      try {
        for (auto& w : stripped_from_json(rec.json, rec.id).words) tokens.insert(std::move(w));
      } catch (const Error& e) {
        throw DataError(rec.id, e.what());
      }
    }
    vocab = Vocabulary(tokens);
    buffered.clear();
    buffered.seekg(0);
    source = &buffered;
  }
  if (!o.vocab_out.empty()) {
    std::ofstream vout(o.vocab_out, std::ios::binary | std::ios::trunc);
    if (!vout) throw UsageError("cannot open " + o.vocab_out);
    vocab.save(vout);
  }
  return map_records(*source, io.out(), env.err,
                     [&](const Json& j, const std::string& id) {
                       const StrippedRecord r = stripped_from_json(j, id);
                       Rng rng(record_seed(seed, id));
                       const MaskedExample ex =
                           apply_masking(vocab.encode_words(r.words), r.spans, cfg, rng, vocab.info());
                       return line_of(records::to_json(ex, id));
                     },
                     worker_count());
}

int cmd_sample_langs(const Options& o, const CLI::Option* seed_opt, Env env) {
  if (o.counts.empty()) throw UsageError("--counts is required");
  if (!(o.alpha >= 0.0 && o.alpha <= 1.0)) throw UsageError("--alpha must lie in [0, 1]");
  std::ifstream in(o.counts, std::ios::binary);
  if (!in) throw UsageError("cannot open " + o.counts);
  const LanguageWeights w = smoothed_distribution(read_language_counts(in), o.alpha);
  Streams io("-", o.output, env);
  if (o.draws == 0) {
    for (const auto& [lang, p] : w.probs) io.out() << lang << '\t' << format_prob(p) << '\n';
    return 0;
  }
  Rng rng(record_seed(require_seed(seed_opt, o.seed), "sample-langs"));
  for (std::size_t i = 0; i < o.draws; ++i) io.out() << sample_language(w, rng) << '\n';
  return 0;
}

int cmd_linearize(const Options& o, Env env, bool entity_prompt) {
  const std::string tag = resolve_task_tag(o.task_tag);
  Streams io(o.input, o.output, env);
  return map_records(io.in(), io.out(), env.err,
                     [&](const Json& j, const std::string& id) {
                       const TripleRecord r = triple_record_from_json(j, id);
                       const std::set<Triple> unique(r.triples.begin(), r.triples.end());
                       const std::vector<Triple> ordered = order_triples(r.sentence, unique);
                       OrderedJson out;
                       out["sent_id"] = r.sentence.sent_id;
                       if (!tag.empty())
                         out["input"] = utf8::join(prepend_task_token(r.sentence.words, tag), 0,
                                                   r.sentence.words.size() + 1);
                       out["target"] = entity_prompt
                                           ? build_entity_prompt_target(
                                                 links_for_triples(r.sentence, ordered), ordered)
                                           : linearize(ordered);
                       return line_of(out);
                     },
                     worker_count());
}

int cmd_parse(const Options& o, Env env) {
  Streams io(o.input, o.output, env);
  return map_records(io.in(), io.out(), env.err,
                     [&](const Json& j, const std::string& id) {
                       const auto t = j.find("target");
                       if (t == j.end() || !t->is_string()) throw SchemaError(id, "target", "expected a string");
                       const std::string target = t->get<std::string>();
                       OrderedJson out;
                       out["sent_id"] = id;
                       std::vector<Triple> triples;
                       const auto words = utf8::split_words(target);
                       if (!words.empty() && words[0] == kEntitySection) {
                         EntityPromptTarget ep = parse_entity_prompt_target(target);
                         OrderedJson links = OrderedJson::array();
                         for (const auto& [mention, label] : ep.links)
                           links.push_back(OrderedJson{{"mention", mention}, {"label", label}});
                         out["links"] = std::move(links);
                         triples = std::move(ep.triples);
                       } else {
                         triples = parse_triples(target);
                       }
                       out["negative"] = triples.empty();
                       out["triples"] = OrderedJson::array();
                       for (const auto& tr : triples) out["triples"].push_back(records::to_json(tr));
                       return line_of(out);
                     },
                     worker_count());
}

int cmd_ds_extract(const Options& o, Env env) {
  const KbStore kb = load_kb(o.kb);
  Streams io(o.input, o.output, env);
  return map_records(io.in(), io.out(), env.err,
                     [&](const Json& j, const std::string&) {
                       const AnnotatedSentence linked = to_linked_sentence(records::sentence_from_json(j), kb);
                       OrderedJson out = records::to_json(linked);
                       out["triples"] = OrderedJson::array();
                       for (const auto& t : extract_ds_triples(linked, kb))
                         out["triples"].push_back(records::to_json(t));
                       return line_of(out);
                     },
                     worker_count());
}

int cmd_nli_filter(const Options& o, Env env) {
  if (o.scores.empty()) throw UsageError("--scores is required");
  if (!(o.threshold >= 0.0 && o.threshold <= 1.0)) throw UsageError("--threshold must lie in [0, 1]");
  std::ifstream sin(o.scores, std::ios::binary);
  if (!sin) throw UsageError("cannot open " + o.scores);
  std::map<std::string, std::vector<ScoredTriple>> scores;
  for (const auto& rec : read_records(sin)) {
    const auto sc = rec.json.find("score");
    if (sc == rec.json.end() || !sc->is_number()) throw SchemaError(rec.id, "score", "expected a number");
    const auto tj = rec.json.find("triple");
    if (tj == rec.json.end()) throw SchemaError(rec.id, "triple", "missing");
    const double score = sc->get<double>();
    if (!(score >= 0.0 && score <= 1.0))
      throw DataError(rec.id, "entailment score " + std::to_string(score) + " outside [0, 1]");
    scores[rec.id].push_back(ScoredTriple{records::triple_from_json(*tj, rec.id), score});
  }

  Streams io(o.input, o.output, env);
  return map_records(io.in(), io.out(), env.err,
                     [&](const Json& j, const std::string& id) {
                       const auto triples_it = j.find("triples");
                       OrderedJson kept_json = OrderedJson::array();
                       auto sc = scores.find(id);
                       if (sc != scores.end() && triples_it != j.end() && triples_it->is_array()) {
                         const auto kept = entailment_filter(sc->second, o.threshold);
                         const std::set<Triple> keep(kept.begin(), kept.end());
                         for (const auto& tj : *triples_it) {
                           if (keep.count(records::triple_from_json(tj, id)))
                             kept_json.push_back(OrderedJson::parse(tj.dump()));
                         }
                       }
                       return line_of(with_triples(j, kept_json));
                     },
                     worker_count());
}

int cmd_classify(const Options& o, Env env) {
  Streams io(o.input, o.output, env);
  return map_records(io.in(), io.out(), env.err,
                     [&](const Json& j, const std::string& id) {
                       const TripleRecord r = triple_record_from_json(j, id);
                       OrderedJson out = OrderedJson::parse(j.dump());
                       out["label"] = to_string(classify_example(r.sentence, r.triples));
                       return line_of(out);
                     },
                     worker_count());
}

int cmd_sample_negatives(const Options& o, const CLI::Option* seed_opt, Env env) {
  const std::uint64_t seed = require_seed(seed_opt, o.seed);
  if (!(o.fraction >= 0.0 && o.fraction <= 1.0)) throw UsageError("--fraction must lie in [0, 1]");
  Streams io(o.input, o.output, env);
  const auto recs = read_records(io.in());
  std::vector<ExampleLabel> labels;
  labels.reserve(recs.size());
  for (const auto& r : recs) {
    const auto l = r.json.find("label");
    if (l == r.json.end() || !l->is_string()) throw SchemaError(r.id, "label", "missing; run classify first");
    const auto parsed = parse_example_label(l->get<std::string>());
    if (!parsed) throw SchemaError(r.id, "label", "unknown label " + l->get<std::string>());
    labels.push_back(*parsed);
  }
  Rng rng(record_seed(seed, "sample-negatives"));
  const NegativeSample sample = sample_negatives(labels, o.fraction, rng);
  for (std::size_t i : sample.selected) io.out() << records::dump(OrderedJson::parse(recs[i].json.dump())) << '\n';
  if (sample.insufficient) {
    env.err << "warning: not enough negatives for fraction " << o.fraction << "; achieved "
            << sample.achieved_fraction << '\n';
  }
  return 0;
}

int cmd_split(const Options& o, const CLI::Option* seed_opt, Env env) {
  const std::uint64_t seed = require_seed(seed_opt, o.seed);
  if (o.output_dir.empty()) throw UsageError("--output-dir is required");
  std::array<double, 3> ratios{};
  {
    std::vector<double> parsed;
    std::stringstream ss(o.ratios);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        parsed.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw UsageError("--ratios expects three comma-separated numbers");
      }
    }
    if (parsed.size() != 3) throw UsageError("--ratios expects three comma-separated numbers");
    std::copy(parsed.begin(), parsed.end(), ratios.begin());
    try {
      split_sizes(0, ratios);
    } catch (const DsError& e) {
      throw UsageError(e.what());
    }
  }
  Streams io(o.input, "-", env);
  const auto recs = read_records(io.in());
  Rng rng(record_seed(seed, "split"));
  const DatasetSplit split = split_dataset(recs.size(), ratios, rng);
  fs::create_directories(o.output_dir);
  OrderedJson summary;
  for (const auto& [name, idx] : {std::pair{"train", &split.train},
                                  std::pair{"validation", &split.validation},
                                  std::pair{"test", &split.test}}) {
    std::ofstream f(fs::path(o.output_dir) / (std::string(name) + ".jsonl"), std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot write into " + o.output_dir);
    for (std::size_t i : *idx) f << records::dump(OrderedJson::parse(recs[i].json.dump())) << '\n';
    summary[name] = idx->size();
  }
  env.out << line_of(summary);
  return 0;
}

struct LoadedTries {
  Vocabulary vocab;
  ConstraintTries tries;
  std::size_t entity_labels = 0;
  std::size_t relation_labels = 0;
};

LoadedTries load_tries(const Options& o) {
  if (o.entities.empty() || o.relations.empty()) throw UsageError("--entities and --relations are required");
  const auto ents = read_label_file(o.entities);
  const auto rels = read_label_file(o.relations);
  std::vector<std::string> all = ents;
  all.insert(all.end(), rels.begin(), rels.end());
  Vocabulary vocab = Vocabulary::from_labels(all);
  ConstraintTries tries = build_constraint_tries(ents, rels, vocab);
  return LoadedTries{std::move(vocab), std::move(tries), ents.size(), rels.size()};
}

int cmd_trie_build(const Options& o, Env env) {
  const LoadedTries t = load_tries(o);
  if (!o.vocab_out.empty()) {
    std::ofstream vout(o.vocab_out, std::ios::binary | std::ios::trunc);
    if (!vout) throw UsageError("cannot open " + o.vocab_out);
    t.vocab.save(vout);
  }
  OrderedJson j;
  j["entity_labels"] = t.tries.entities.label_count();
  j["entity_nodes"] = t.tries.entities.node_count();
  j["relation_labels"] = t.tries.relations.label_count();
  j["relation_nodes"] = t.tries.relations.node_count();
  j["vocab_size"] = t.vocab.size();
  env.out << line_of(j);
  return 0;
}

int cmd_decode_sim(const Options& o, const CLI::Option* seed_opt, Env env) {
  if (o.mode != "full" && o.mode != "partial") throw UsageError("--mode must be full or partial");
  const LoadedTries t = load_tries(o);
  const VocabInfo& info = t.vocab.info();
  Streams io("-", o.output, env);

  if (o.enumerate) {
    for (const auto& seq : complete_sequences(t.tries, info, o.max_triples))
      io.out() << t.vocab.decode(seq) << '\n';
    return 0;
  }

  const std::uint64_t seed = require_seed(seed_opt, o.seed);
  const DecodeMode mode = o.mode == "full" ? DecodeMode::FullConstraint : DecodeMode::PartialAfterMarker;
  constexpr std::size_t kMaxSteps = 10'000;
  for (std::size_t n = 0; n < o.samples; ++n) {
    const std::string sample_id = "sample-" + std::to_string(n);
    Rng rng(record_seed(seed, sample_id));
    DecodeState state = DecodeState::initial(mode);
    std::vector<TokenId> generated;
    std::size_t free_steps = 0;
    for (std::size_t step = 0; step < kMaxSteps && state.phase != DecodePhase::Finished; ++step) {
      std::vector<TokenId> allowed;
      if (state.phase == DecodePhase::Free) {
        // Simulated free-text prefix, then the marker that switches the constraint on.
        if (free_steps++ >= o.free_tokens) {
          allowed = {info.triple_marker};
        } else {
          for (TokenId id = 0; static_cast<std::size_t>(id) < info.size; ++id)
            if (!info.is_special(id)) allowed.push_back(id);
          if (allowed.empty()) allowed = {info.triple_marker};
        }
      } else {
        allowed = allowed_next(state, t.tries, info);
        if (state.triples_emitted >= o.max_triples)
          allowed.erase(std::remove(allowed.begin(), allowed.end(), info.sub), allowed.end());
      }
      std::vector<double> scores(info.size);
      for (auto& s : scores) s = rng.uniform();
      const auto masked = mask_scores(scores, allowed, info);
      const auto best = static_cast<TokenId>(std::max_element(masked.begin(), masked.end()) - masked.begin());
      state = advance(state, best, t.tries, info);
      if (best != info.eos) generated.push_back(best);
    }
    std::vector<TokenId> triple_part = generated;
    if (mode == DecodeMode::PartialAfterMarker) {
      auto marker = std::find(generated.begin(), generated.end(), info.triple_marker);
      triple_part.assign(marker == generated.end() ? generated.end() : marker + 1, generated.end());
    }
    OrderedJson j;
    j["sample_id"] = sample_id;
    j["sequence"] = t.vocab.decode(generated);
    j["target"] = t.vocab.decode(triple_part);
    j["triples"] = OrderedJson::array();
    for (const auto& tr : parse_triples(t.vocab.decode(triple_part))) j["triples"].push_back(records::to_json(tr));
    io.out() << line_of(j);
  }
  return 0;
}

int cmd_rank(const Options& o, Env env) {
  Streams io(o.input, o.output, env);
  return map_records(io.in(), io.out(), env.err,
                     [&](const Json& j, const std::string& id) {
                       const auto opts = j.find("options");
                       if (opts == j.end() || !opts->is_array())
                         throw SchemaError(id, "options", "expected an array of arrays of numbers");
                       std::vector<std::vector<double>> options;
                       for (const auto& op : *opts) {
                         if (!op.is_array()) throw SchemaError(id, "options", "expected arrays of numbers");
                         std::vector<double> values;
                         for (const auto& v : op) {
                           if (!v.is_number()) throw SchemaError(id, "options", "expected numbers");
                           values.push_back(v.get<double>());
                         }
                         options.push_back(std::move(values));
                       }
                       OrderedJson out;
                       out["id"] = id;
                       out["choice"] = rank_options(options);
                       out["perplexities"] = OrderedJson::array();
                       for (const auto& op : options) out["perplexities"].push_back(perplexity(op));
                       return line_of(out);
                     },
                     worker_count());
}

std::map<std::string, std::string> read_targets(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::map<std::string, std::string> out;
  for (const auto& rec : read_records(in)) {
    const auto t = rec.json.find("target");
    if (t == rec.json.end() || !t->is_string()) throw SchemaError(rec.id, "target", "expected a string");
    if (!out.emplace(rec.id, t->get<std::string>()).second) throw DataError(rec.id, "duplicate sent_id");
  }
  return out;
}

int cmd_eval(const Options& o, Env env) {
  if (o.pred.empty() || o.gold.empty()) throw UsageError("--pred and --gold are required");
  const auto gold = read_targets(o.gold);
  const auto pred = read_targets(o.pred);
  std::vector<EvalPair> pairs;
  pairs.reserve(gold.size());
  for (const auto& [id, gold_target] : gold) {
    EvalPair pair;
    try {
      const auto g = parse_any_target(gold_target);
      pair.gold.insert(g.begin(), g.end());
    } catch (const CodecError& e) {
      throw DataError(id, std::string("gold target: ") + e.what());
    }
    auto p = pred.find(id);
    if (p == pred.end()) {
      pair.predicted_malformed = true;
    } else {
      try {
        const auto t = parse_any_target(p->second);
        pair.predicted.insert(t.begin(), t.end());
      } catch (const CodecError&) {
        pair.predicted_malformed = true;
      }
    }
    pairs.push_back(std::move(pair));
  }
  const Prf prf = triple_prf(pairs);
  OrderedJson j;
  j["precision"] = prf.precision;
  j["recall"] = prf.recall;
  j["f1"] = prf.f1;
  const bool any_negative =
      std::any_of(pairs.begin(), pairs.end(), [](const EvalPair& p) { return p.gold.empty(); });
  j["acc_n"] = any_negative ? OrderedJson(acc_negative(pairs)) : OrderedJson(nullptr);
  env.out << line_of(j);
  return 0;
}

int cmd_stats(const Options& o, Env env) {
  Streams io(o.input, o.output, env);
  std::size_t records = 0;
  std::size_t words = 0;
  std::size_t entities = 0;
  std::size_t switched = 0;
  std::map<std::string, std::size_t> variants_per_base;
  std::map<std::string, std::size_t> languages;
  bool cs = false;
  for (const auto& rec : read_records(io.in())) {
    ++records;
    if (rec.json.contains("base_sent_id")) {
      cs = true;
      const CsSentence s = records::cs_sentence_from_json(rec.json);
      entities += s.mentions.size();
      words += strip_entity_markers(s.words).words.size();
      ++languages[s.language];
      if (s.language != kSourceLanguage) {
        ++switched;
        ++variants_per_base[s.base_sent_id];
      } else {
        variants_per_base.try_emplace(s.base_sent_id, 0);
      }
    } else {
      const AnnotatedSentence s = records::sentence_from_json(rec.json);
      entities += s.mentions.size();
      words += s.words.size();
    }
  }
  const double n = records ? static_cast<double>(records) : 1.0;
  OrderedJson j;
  j["sentences"] = records;
  j["entities"] = entities;
  j["mean_entities_per_sentence"] = records ? static_cast<double>(entities) / n : 0.0;
  j["mean_sentence_length"] = records ? static_cast<double>(words) / n : 0.0;
  if (cs) {
    std::size_t max_variants = 0;
    for (const auto& [base, count] : variants_per_base) max_variants = std::max(max_variants, count);
    j["base_sentences"] = variants_per_base.size();
    j["cs_sentences"] = switched;
    j["max_variants_per_base"] = max_variants;
    j["languages"] = languages;
  }
  io.out() << line_of(j);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"kgforge: knowledge-grounded corpus construction and evaluation toolkit", "kgforge"};
  app.require_subcommand(1);

  std::map<std::string, CLI::Option*> seeds;
  auto sub = [&](const char* name, const char* help, bool io = true) {
    CLI::App* s = app.add_subcommand(name, help);
    if (io) add_io(s, o);
    return s;
  };
  auto with_seed = [&](CLI::App* s) {
    seeds[s->get_name()] = s->add_option("--seed", o.seed, "Global seed (64-bit)");
    return s;
  };

  auto* ingest = sub("ingest", "Wikilinked text to annotated sentences");
  ingest->add_option("--format", o.format, "jsonl or text");
  ingest->add_option("--filter", o.filter, "entitycs, web or none");
  ingest->add_option("--kb", o.kb, "KB directory used to attach kb_id by title");
  ingest->add_option("--doc-id", o.doc_id, "Document id for --format text");

  auto* kbcheck = sub("kb-load-check", "Load and validate a KB directory", false);
  kbcheck->add_option("--kb", o.kb, "KB directory")->required();

  auto* codeswitch = with_seed(sub("codeswitch", "Entity-level code-switched variants"));
  codeswitch->add_option("--kb", o.kb, "KB directory")->required();
  codeswitch->add_option("--languages", o.languages, "Comma-separated target languages");
  codeswitch->add_option("--max-variants", o.max_variants, "Variants per sentence");

  auto* mask = with_seed(sub("mask", "Apply a masking strategy"));
  mask->add_option("--strategy", o.strategy, "mlm, wep, pep_mrs, pep_ms or pep_m");
  mask->add_flag("--with-mlm", o.with_mlm, "Join entity prediction with MLM on other tokens");
  mask->add_option("--p-entity", o.p_entity, "Override the entity candidate probability");
  mask->add_option("--vocab", o.vocab, "Vocabulary file (built from the input when absent)");
  mask->add_option("--vocab-out", o.vocab_out, "Write the vocabulary used");

  auto* langs = with_seed(sub("sample-langs", "Smoothed language sampling distribution", false));
  langs->add_option("--output", o.output, "Output path, - for stdout");
  langs->add_option("--counts", o.counts, "lang<TAB>count file")->required();
  langs->add_option("--alpha", o.alpha, "Smoothing exponent in [0, 1]");
  langs->add_option("--draws", o.draws, "Sample this many languages instead of printing probabilities");

  auto* lin = sub("linearize", "Triples to <sub>/<rel>/<obj>/<et> targets");
  lin->add_option("--task-tag", o.task_tag, "Prepend a task token to the input: el, tri or a literal tag");
  auto* parse = sub("parse", "Targets back to triples");
  auto* el = sub("el-target", "Entity-prompt targets");
  el->add_option("--task-tag", o.task_tag, "Prepend a task token to the input: el, tri or a literal tag");

  auto* ds = sub("ds-extract", "Distant-supervision triples");
  ds->add_option("--kb", o.kb, "KB directory")->required();
  auto* nli = sub("nli-filter", "Keep triples with entailment score above a threshold");
  nli->add_option("--scores", o.scores, "Entailment score JSONL")->required();
  nli->add_option("--threshold", o.threshold, "Score threshold (strict)");
  auto* classify = sub("classify", "Label positive and negative examples");
  auto* negs = with_seed(sub("sample-negatives", "Balance negative examples"));
  negs->add_option("--fraction", o.fraction, "Target fraction of negatives");
  auto* split = with_seed(sub("split", "Train/validation/test split", false));
  split->add_option("--input", o.input, "Input path, - for stdin");
  split->add_option("--ratios", o.ratios, "Three comma-separated ratios");
  split->add_option("--output-dir", o.output_dir, "Directory for train/validation/test.jsonl")->required();

  auto* trie = sub("trie-build", "Build entity and relation tries", false);
  trie->add_option("--entities", o.entities, "Entity labels, one per line")->required();
  trie->add_option("--relations", o.relations, "Relation labels, one per line")->required();
  trie->add_option("--vocab-out", o.vocab_out, "Write the label vocabulary");
  auto* sim = with_seed(sub("decode-sim", "Constrained decoding with a random scorer", false));
  sim->add_option("--output", o.output, "Output path, - for stdout");
  sim->add_option("--entities", o.entities, "Entity labels, one per line")->required();
  sim->add_option("--relations", o.relations, "Relation labels, one per line")->required();
  sim->add_option("--mode", o.mode, "full or partial");
  sim->add_option("--max-triples", o.max_triples, "Upper bound on generated triples");
  sim->add_option("--samples", o.samples, "Number of simulated generations");
  sim->add_option("--free-tokens", o.free_tokens, "Free tokens before [TRIPLE] in partial mode");
  sim->add_flag("--enumerate", o.enumerate, "Print every accepted sequence instead");

  auto* rank = sub("rank", "Pick the option with the lowest perplexity");
  auto* eval = sub("eval", "Triple precision/recall/F1 and negative accuracy", false);
  eval->add_option("--pred", o.pred, "Predicted targets JSONL")->required();
  eval->add_option("--gold", o.gold, "Gold targets JSONL")->required();
  auto* stats = sub("stats", "Corpus statistics");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n';
    return 2;
  }

  const Env env{in, out, err};
  auto seed_of = [&](CLI::App* s) { return seeds.at(s->get_name()); };
  try {
    if (*ingest) return cmd_ingest(o, env);
    if (*kbcheck) return cmd_kb_load_check(o, env);
    if (*codeswitch) return cmd_codeswitch(o, seed_of(codeswitch), env);
    if (*mask) return cmd_mask(o, seed_of(mask), env);
    if (*langs) return cmd_sample_langs(o, seed_of(langs), env);
    if (*lin) return cmd_linearize(o, env, false);
    if (*parse) return cmd_parse(o, env);
    if (*el) return cmd_linearize(o, env, true);
    if (*ds) return cmd_ds_extract(o, env);
    if (*nli) return cmd_nli_filter(o, env);
    if (*classify) return cmd_classify(o, env);
    if (*negs) return cmd_sample_negatives(o, seed_of(negs), env);
    if (*split) return cmd_split(o, seed_of(split), env);
    if (*trie) return cmd_trie_build(o, env);
    if (*sim) return cmd_decode_sim(o, seed_of(sim), env);
    if (*rank) return cmd_rank(o, env);
    if (*eval) return cmd_eval(o, env);
    if (*stats) return cmd_stats(o, env);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    err << "error: record " << e.record_id() << ": " << e.what() << '\n';
    return 1;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace kgforge::cli
