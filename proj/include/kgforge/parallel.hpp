#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>

#include "kgforge/records.hpp"

namespace kgforge::cli {

// KGFORGE_THREADS when set to a positive integer, else the hardware count.
std::size_t worker_count();

// Maps every non-blank JSONL line through fn on up to `threads` workers and
// writes the results in input order. fn returns zero or more complete
// output lines. Returns 0, or 1 after reporting the first failing record
// (in input order) on err; output for earlier records is still written.
using RecordFn = std::function<std::string(const records::Json& record, const std::string& record_id)>;

int map_records(std::istream& in, std::ostream& out, std::ostream& err, const RecordFn& fn,
                std::size_t threads);

}  // namespace kgforge::cli
