#pragma once

// JSONL schemas shared by the pipeline stages.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kgforge/code_switch.hpp"
#include "kgforge/ds_extract.hpp"
#include "kgforge/mask_engine.hpp"
#include "kgforge/sentence.hpp"
#include "kgforge/triple_codec.hpp"
#include "kgforge/wiki_ingest.hpp"

namespace kgforge::records {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// Parses one JSONL line; throws SchemaError carrying `fallback_id` when the
// line is not a JSON object.
Json parse_line(std::string_view line, const std::string& fallback_id);

// Best-effort record id of a parsed line, for error reports.
std::string record_id_of(const Json& j, const std::string& fallback);

RawDocument document_from_json(const Json& j);

OrderedJson to_json(const Mention& m);
OrderedJson to_json(const AnnotatedSentence& s);
// Mentions must be in bounds, sorted and non-overlapping.
AnnotatedSentence sentence_from_json(const Json& j);

OrderedJson to_json(const CsSentence& s);
CsSentence cs_sentence_from_json(const Json& j);

OrderedJson to_json(const Triple& t);
OrderedJson to_json(const LinkedTriple& t);
Triple triple_from_json(const Json& j, const std::string& record_id);
std::vector<Triple> triples_from_json(const Json& j, const std::string& record_id,
                                      std::string_view field = "triples");

OrderedJson to_json(const MaskedExample& ex, const std::string& id);

// Compact single-line serialization used for every JSONL output.
std::string dump(const OrderedJson& j);

}  // namespace kgforge::records
