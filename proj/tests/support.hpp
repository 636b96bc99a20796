#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgforge/cli.hpp"
#include "kgforge/rng.hpp"

namespace kgforge::testing {

inline std::filesystem::path fixture(const std::string& rel) {
  return std::filesystem::path(KGFORGE_FIXTURE_DIR) / rel;
}

// Replays a fixed sequence of draws; running out is a test bug.
class ScriptedRandom final : public RandomSource {
 public:
  explicit ScriptedRandom(std::vector<double> uniforms, std::vector<std::uint64_t> belows = {})
      : uniforms_(uniforms.begin(), uniforms.end()), belows_(belows.begin(), belows.end()) {}

  double uniform() override {
    if (uniforms_.empty()) throw std::logic_error("scripted uniform draws exhausted");
    const double v = uniforms_.front();
    uniforms_.pop_front();
    return v;
  }

  std::uint64_t below(std::uint64_t n) override {
    if (belows_.empty()) throw std::logic_error("scripted below draws exhausted");
    const std::uint64_t v = belows_.front();
    belows_.pop_front();
    if (v >= n) throw std::logic_error("scripted below draw out of range");
    return v;
  }

  std::size_t remaining() const { return uniforms_.size() + belows_.size(); }

 private:
  std::deque<double> uniforms_;
  std::deque<std::uint64_t> belows_;
};

struct CliResult {
  int status = 0;
  std::string out;
  std::string err;
};

inline CliResult run_cli(const std::vector<std::string>& args, const std::string& input = {}) {
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  const int status = cli::run(args, in, out, err);
  return {status, out.str(), err.str()};
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("kgforge-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace kgforge::testing
