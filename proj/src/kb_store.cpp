#include "kgforge/kb_store.hpp"

#include <fstream>
#include <istream>
#include <string_view>

#include "kgforge/utf8.hpp"

namespace kgforge {

namespace {

constexpr std::string_view kTitleTag = "__title__";

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

KbError malformed(std::string_view file, std::size_t line_no, std::string_view why) {
  return KbError(KbError::Kind::MalformedRow, std::string(file) + ":" +
                                                  std::to_string(line_no) +
                                                  ": malformed row (" + std::string(why) + ")");
}

// Reads rows of exactly `columns` non-blank fields. Empty lines are skipped.
template <typename Fn>
void for_each_row(std::istream& in, std::string_view file, std::size_t columns, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != columns)
      throw malformed(file, line_no, "expected " + std::to_string(columns) + " columns");
    for (const auto& f : fields) {
      if (utf8::split_words(f).empty()) throw malformed(file, line_no, "empty field");
      if (!utf8::is_valid(f)) throw malformed(file, line_no, "invalid UTF-8");
    }
    fn(fields, line_no);
  }
}

std::ifstream open(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw KbError(KbError::Kind::Io, "cannot open " + p.string());
  return in;
}

}  // namespace

bool is_year_literal(std::string_view id) {
  if (id.size() != 4) return false;
  for (char c : id)
    if (c < '0' || c > '9') return false;
  return id[0] == '1' || id[0] == '2';
}

KbStore KbStore::load(const std::filesystem::path& entity_file,
                      const std::filesystem::path& relation_file,
                      const std::filesystem::path& triple_file) {
  auto e = open(entity_file);
  auto r = open(relation_file);
  auto t = open(triple_file);
  return from_streams(e, r, t);
}

KbStore KbStore::load_dir(const std::filesystem::path& dir) {
  return load(dir / "entities.tsv", dir / "relations.tsv", dir / "triples.tsv");
}

KbStore KbStore::from_streams(std::istream& entities, std::istream& relations,
                              std::istream& triples) {
  KbStore kb;

  for_each_row(entities, "entities.tsv", 3, [&](std::vector<std::string>& f, std::size_t) {
    EntityRecord& rec = kb.entities_[f[0]];
    rec.kb_id = f[0];
    if (f[1] == kTitleTag) {
      if (!rec.canonical_title.empty())
        throw KbError(KbError::Kind::DuplicateLabel,
                      "duplicate label for (" + f[0] + ", " + f[1] + ")");
      rec.canonical_title = f[2];
      auto [it, inserted] = kb.title_index_.emplace(f[2], f[0]);
      if (!inserted)
        throw KbError(KbError::Kind::DuplicateTitle,
                      "title '" + f[2] + "' maps to both " + it->second + " and " + f[0]);
      return;
    }
    if (!rec.labels.emplace(f[1], f[2]).second)
      throw KbError(KbError::Kind::DuplicateLabel,
                    "duplicate label for (" + f[0] + ", " + f[1] + ")");
  });
  for (const auto& [id, rec] : kb.entities_) {
    if (rec.canonical_title.empty())
      throw KbError(KbError::Kind::MissingTitle, "entity " + id + " has no __title__ row");
  }

  for_each_row(relations, "relations.tsv", 2, [&](std::vector<std::string>& f, std::size_t) {
    if (!kb.relations_.emplace(f[0], RelationRecord{f[0], f[1]}).second)
      throw KbError(KbError::Kind::DuplicateRelation, "duplicate relation " + f[0]);
  });

  for_each_row(triples, "triples.tsv", 3, [&](std::vector<std::string>& f, std::size_t) {
    if (!kb.entities_.count(f[0]))
      throw KbError(KbError::Kind::UnknownIdInTriple, "unknown id in triple: " + f[0]);
    if (!kb.relations_.count(f[1]))
      throw KbError(KbError::Kind::UnknownIdInTriple, "unknown id in triple: " + f[1]);
    if (!kb.entities_.count(f[2]) && !is_year_literal(f[2]))
      throw KbError(KbError::Kind::UnknownIdInTriple, "unknown id in triple: " + f[2]);
    kb.triples_.insert(KbTriple{f[0], f[1], f[2]});
  });
  for (const auto& t : kb.triples_) kb.pair_index_[{t.head, t.tail}].insert(t.rel);
  return kb;
}

std::map<std::string, std::string> KbStore::translations(
    const std::string& kb_id, const std::set<std::string>& languages) const {
  const EntityRecord* rec = entity(kb_id);
  if (!rec) throw KbError(KbError::Kind::UnknownEntity, "unknown entity " + kb_id);
  std::map<std::string, std::string> out;
  for (const auto& lang : languages) {
    auto it = rec->labels.find(lang);
    if (it != rec->labels.end()) out.emplace(lang, it->second);
  }
  return out;
}

const std::set<std::string>& KbStore::relations_between(const std::string& head,
                                                        const std::string& tail) const {
  static const std::set<std::string> kEmpty;
  auto it = pair_index_.find({head, tail});
  return it == pair_index_.end() ? kEmpty : it->second;
}

const EntityRecord* KbStore::entity(const std::string& kb_id) const {
  auto it = entities_.find(kb_id);
  return it == entities_.end() ? nullptr : &it->second;
}

const RelationRecord* KbStore::relation(const std::string& rel_id) const {
  auto it = relations_.find(rel_id);
  return it == relations_.end() ? nullptr : &it->second;
}

std::optional<std::string> KbStore::id_for_title(const std::string& title) const {
  auto it = title_index_.find(title);
  if (it == title_index_.end()) return std::nullopt;
  return it->second;
}

std::set<std::string> KbStore::languages() const {
  std::set<std::string> langs;
  for (const auto& [id, rec] : entities_)
    for (const auto& [lang, label] : rec.labels) langs.insert(lang);
  return langs;
}

}  // namespace kgforge
