#pragma once

#include <stdexcept>
#include <string>

namespace kgforge {

// Base for every error raised by the library. Module errors derive from it
// and carry a kind() so callers can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A JSONL record that does not match the schema a stage expects.
class SchemaError : public Error {
 public:
  SchemaError(std::string record_id, std::string field, const std::string& detail)
      : Error("schema violation in record '" + record_id + "', field '" + field +
              "': " + detail),
        record_id_(std::move(record_id)),
        field_(std::move(field)) {}

  const std::string& record_id() const { return record_id_; }
  const std::string& field() const { return field_; }

 private:
  std::string record_id_;
  std::string field_;
};

}  // namespace kgforge
