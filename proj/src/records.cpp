#include "kgforge/records.hpp"

#include "kgforge/error.hpp"
#include "kgforge/utf8.hpp"

namespace kgforge::records {

namespace {

const Json& field(const Json& j, const char* name, const std::string& id) {
  auto it = j.find(name);
  if (it == j.end()) throw SchemaError(id, name, "missing");
  return *it;
}

std::string string_field(const Json& j, const char* name, const std::string& id) {
  const Json& v = field(j, name, id);
  if (!v.is_string()) throw SchemaError(id, name, "expected a string");
  return v.get<std::string>();
}

std::size_t index_field(const Json& j, const char* name, const std::string& id) {
  const Json& v = field(j, name, id);
  if (!v.is_number_unsigned()) throw SchemaError(id, name, "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::vector<std::string> words_field(const Json& j, const std::string& id) {
  const Json& v = field(j, "words", id);
  if (!v.is_array()) throw SchemaError(id, "words", "expected an array of strings");
  std::vector<std::string> words;
  words.reserve(v.size());
  for (const auto& w : v) {
    if (!w.is_string()) throw SchemaError(id, "words", "expected an array of strings");
    words.push_back(w.get<std::string>());
  }
  return words;
}

std::vector<Mention> mentions_field(const Json& j, const std::string& id, std::size_t word_count) {
  std::vector<Mention> out;
  auto it = j.find("mentions");
  if (it == j.end()) return out;
  if (!it->is_array()) throw SchemaError(id, "mentions", "expected an array");
  for (const auto& mj : *it) {
    if (!mj.is_object()) throw SchemaError(id, "mentions", "expected objects");
    Mention m;
    m.start_word = index_field(mj, "start", id);
    m.end_word = index_field(mj, "end", id);
    if (m.start_word >= m.end_word || m.end_word > word_count)
      throw SchemaError(id, "mentions", "span out of bounds");
    if (!out.empty() && out.back().end_word > m.start_word)
      throw SchemaError(id, "mentions", "spans overlap or are unsorted");
    if (auto s = mj.find("surface"); s != mj.end() && s->is_string()) m.surface = s->get<std::string>();
    if (auto t = mj.find("title"); t != mj.end() && t->is_string()) m.title = t->get<std::string>();
    if (auto k = mj.find("kb_id"); k != mj.end() && !k->is_null()) {
      if (!k->is_string()) throw SchemaError(id, "mentions.kb_id", "expected a string");
      m.kb_id = k->get<std::string>();
    }
    if (auto y = mj.find("year"); y != mj.end() && !y->is_null()) {
      if (!y->is_number_integer()) throw SchemaError(id, "mentions.year", "expected an integer");
      m.year = y->get<int>();
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

Json parse_line(std::string_view line, const std::string& fallback_id) {
  Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw SchemaError(fallback_id, "<record>", "not a JSON object");
  return j;
}

std::string record_id_of(const Json& j, const std::string& fallback) {
  for (const char* key : {"sent_id", "doc_id", "id", "base_sent_id"}) {
    auto it = j.find(key);
    if (it != j.end() && it->is_string()) {
      if (std::string_view(key) == "base_sent_id") {
        auto lang = j.find("language");
        if (lang != j.end() && lang->is_string())
          return it->get<std::string>() + "/" + lang->get<std::string>();
      }
      return it->get<std::string>();
    }
  }
  return fallback;
}

RawDocument document_from_json(const Json& j) {
  const std::string id = record_id_of(j, "?");
  RawDocument doc;
  doc.doc_id = string_field(j, "doc_id", id);
  if (doc.doc_id.empty()) throw SchemaError(id, "doc_id", "must be non-empty");
  doc.text = string_field(j, "text", id);
  if (auto d = j.find("source_domain"); d != j.end() && d->is_string())
    doc.source_domain = d->get<std::string>();
  return doc;
}

OrderedJson to_json(const Mention& m) {
  OrderedJson j;
  j["start"] = m.start_word;
  j["end"] = m.end_word;
  j["surface"] = m.surface;
  j["title"] = m.title;
  if (m.kb_id) j["kb_id"] = *m.kb_id;
  if (m.year) j["year"] = *m.year;
  return j;
}

OrderedJson to_json(const AnnotatedSentence& s) {
  OrderedJson j;
  j["sent_id"] = s.sent_id;
  j["words"] = s.words;
  j["mentions"] = OrderedJson::array();
  for (const auto& m : s.mentions) j["mentions"].push_back(to_json(m));
  return j;
}

AnnotatedSentence sentence_from_json(const Json& j) {
  const std::string id = record_id_of(j, "?");
  AnnotatedSentence s;
  s.sent_id = string_field(j, "sent_id", id);
  s.words = words_field(j, id);
  if (s.words.empty()) throw SchemaError(id, "words", "must be non-empty");
  s.mentions = mentions_field(j, id, s.words.size());
  for (auto& m : s.mentions) {
    if (m.surface.empty()) m.surface = utf8::join(s.words, m.start_word, m.end_word);
  }
  return s;
}

OrderedJson to_json(const CsSentence& s) {
  OrderedJson j;
  j["base_sent_id"] = s.base_sent_id;
  j["language"] = s.language;
  j["words"] = s.words;
  j["mentions"] = OrderedJson::array();
  for (const auto& m : s.mentions) j["mentions"].push_back(to_json(m));
  return j;
}

CsSentence cs_sentence_from_json(const Json& j) {
  const std::string id = record_id_of(j, "?");
  CsSentence s;
  s.base_sent_id = string_field(j, "base_sent_id", id);
  s.language = string_field(j, "language", id);
  s.words = words_field(j, id);
  s.mentions = mentions_field(j, id, s.words.size());
  return s;
}

OrderedJson to_json(const Triple& t) {
  OrderedJson j;
  j["head"] = t.head;
  j["relation"] = t.relation;
  j["tail"] = t.tail;
  return j;
}

OrderedJson to_json(const LinkedTriple& t) {
  OrderedJson j = to_json(t.labels);
  j["head_id"] = t.ids.head;
  j["rel_id"] = t.ids.rel;
  j["tail_id"] = t.ids.tail;
  return j;
}

Triple triple_from_json(const Json& j, const std::string& record_id) {
  if (!j.is_object()) throw SchemaError(record_id, "triple", "expected an object");
  return Triple{string_field(j, "head", record_id), string_field(j, "relation", record_id),
                string_field(j, "tail", record_id)};
}

std::vector<Triple> triples_from_json(const Json& j, const std::string& record_id,
                                      std::string_view name) {
  std::vector<Triple> out;
  auto it = j.find(std::string(name));
  if (it == j.end()) return out;
  if (!it->is_array()) throw SchemaError(record_id, std::string(name), "expected an array");
  for (const auto& t : *it) out.push_back(triple_from_json(t, record_id));
  return out;
}

OrderedJson to_json(const MaskedExample& ex, const std::string& id) {
  OrderedJson j;
  j["id"] = id;
  j["input_ids"] = ex.input_ids;
  OrderedJson labels = OrderedJson::array();
  for (const auto& l : ex.labels) {
    if (l) {
      labels.push_back(*l);
    } else {
      labels.push_back(nullptr);
    }
  }
  j["labels"] = std::move(labels);
  return j;
}

std::string dump(const OrderedJson& j) {
  return j.dump(-1, ' ', false, OrderedJson::error_handler_t::replace);
}

}  // namespace kgforge::records
