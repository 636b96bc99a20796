#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kgforge/error.hpp"

namespace kgforge {

class KbError : public Error {
 public:
  enum class Kind {
    Io,
    MalformedRow,
    DuplicateLabel,
    DuplicateTitle,
    MissingTitle,
    DuplicateRelation,
    UnknownIdInTriple,
    UnknownEntity,
  };

  KbError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct EntityRecord {
  std::string kb_id;
  std::string canonical_title;
  std::map<std::string, std::string> labels;  // language -> label
};

struct RelationRecord {
  std::string rel_id;
  std::string label;
};

struct KbTriple {
  std::string head;
  std::string rel;
  std::string tail;

  friend auto operator<=>(const KbTriple&, const KbTriple&) = default;
};

// Year literals ("2018", 1000-2999) may appear as triple tails in place of
// an entity id.
bool is_year_literal(std::string_view id);

// Read-only after construction; every query is const and thread-safe.
class KbStore {
 public:
  static KbStore load(const std::filesystem::path& entity_file,
                      const std::filesystem::path& relation_file,
                      const std::filesystem::path& triple_file);
  // Loads entities.tsv, relations.tsv and triples.tsv from one directory.
  static KbStore load_dir(const std::filesystem::path& dir);
  static KbStore from_streams(std::istream& entities, std::istream& relations,
                              std::istream& triples);

  // Languages in `languages` that have a label for kb_id. Throws
  // UnknownEntity for an absent id.
  std::map<std::string, std::string> translations(const std::string& kb_id,
                                                  const std::set<std::string>& languages) const;

  // Direction-sensitive; unknown ids yield the empty set.
  const std::set<std::string>& relations_between(const std::string& head,
                                                 const std::string& tail) const;

  const EntityRecord* entity(const std::string& kb_id) const;
  const RelationRecord* relation(const std::string& rel_id) const;
  std::optional<std::string> id_for_title(const std::string& title) const;

  // Every label language present in the store.
  std::set<std::string> languages() const;

  const std::map<std::string, EntityRecord>& entities() const { return entities_; }
  const std::map<std::string, RelationRecord>& relations() const { return relations_; }
  const std::set<KbTriple>& triples() const { return triples_; }
  std::size_t pair_count() const { return pair_index_.size(); }

 private:
  std::map<std::string, EntityRecord> entities_;
  std::map<std::string, RelationRecord> relations_;
  std::map<std::string, std::string> title_index_;
  std::set<KbTriple> triples_;
  std::map<std::pair<std::string, std::string>, std::set<std::string>> pair_index_;
};

}  // namespace kgforge
