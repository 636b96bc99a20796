#include "kgforge/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <thread>
#include <vector>

namespace kgforge::cli {

namespace {

constexpr std::size_t kBatchLines = 4096;

struct Slot {
  std::string line;
  std::size_t line_no = 0;
  std::string output;
  std::optional<std::string> error_id;
  std::string error;
};

void process(Slot& slot, const RecordFn& fn) {
  const std::string fallback = "line " + std::to_string(slot.line_no);
  std::string id = fallback;
  try {
    const records::Json j = records::parse_line(slot.line, fallback);
    id = records::record_id_of(j, fallback);
    slot.output = fn(j, id);
  } catch (const std::exception& e) {
    slot.error_id = id;
    slot.error = e.what();
  }
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::size_t worker_count() {
  if (const char* env = std::getenv("KGFORGE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int map_records(std::istream& in, std::ostream& out, std::ostream& err, const RecordFn& fn,
                std::size_t threads) {
  threads = std::max<std::size_t>(1, threads);
  std::vector<Slot> batch;
  std::size_t line_no = 0;
  bool eof = false;
  while (!eof) {
    batch.clear();
    std::string line;
    while (batch.size() < kBatchLines) {
      if (!std::getline(in, line)) {
        eof = true;
        break;
      }
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (blank(line)) continue;
      batch.push_back(Slot{std::move(line), line_no, {}, {}, {}});
    }
    if (batch.empty()) continue;

    const std::size_t workers = std::min(threads, batch.size());
    if (workers == 1) {
      for (auto& slot : batch) process(slot, fn);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (batch.size() + workers - 1) / workers;
      for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(batch.size(), lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
          for (std::size_t i = lo; i < hi; ++i) process(batch[i], fn);
        });
      }
      for (auto& t : pool) t.join();
    }

    for (const auto& slot : batch) {
      if (slot.error_id) {
        out.flush();
        err << "error: record " << *slot.error_id << ": " << slot.error << '\n';
        return 1;
      }
      out << slot.output;
    }
  }
  return 0;
}

}  // namespace kgforge::cli
