#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "kgforge/lang_sampler.hpp"
#include "kgforge/rng.hpp"
#include "support.hpp"

using namespace kgforge;

namespace {

double total(const std::map<std::string, double>& m) {
  double s = 0;
  for (const auto& [_, p] : m) s += p;
  return s;
}

}  // namespace

TEST_SUITE("lang_sampler") {
  TEST_CASE("closed forms") {
    auto w = smoothed_distribution({{"a", 9}, {"b", 1}}, 0.5);
    CHECK(w.probs.at("a") == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(w.probs.at("b") == doctest::Approx(0.25).epsilon(1e-12));

    w = smoothed_distribution({{"a", 3}, {"b", 1}, {"c", 0}}, 1.0);
    CHECK(w.probs.at("a") == doctest::Approx(0.75));
    CHECK(w.probs.at("c") == 0.0);

    w = smoothed_distribution({{"a", 1000}, {"b", 1}, {"c", 0}}, 0.0);
    CHECK(w.probs.at("a") == doctest::Approx(0.5));
    CHECK(w.probs.at("b") == doctest::Approx(0.5));
    CHECK(w.probs.at("c") == 0.0);
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(smoothed_distribution({{"a", 0}}, 0.5), SamplerError);
    CHECK_THROWS_AS(smoothed_distribution({}, 0.5), SamplerError);
    CHECK_THROWS_AS(smoothed_distribution({{"a", 1}}, 1.5), SamplerError);
    CHECK_THROWS_AS(smoothed_distribution({{"a", 1}}, -0.1), SamplerError);
    CHECK_THROWS_AS(smoothed_distribution({{"a", -1}, {"b", 2}}, 0.5), SamplerError);
  }

  TEST_CASE("sum, support and down-sampling on the fixture counts") {
    std::ifstream in(testing::fixture("lang_counts.tsv"));
    const auto counts = read_language_counts(in);
    for (double alpha : {0.0, 0.3, 0.5, 0.7, 1.0}) {
      const auto w = smoothed_distribution(counts, alpha);
      CHECK(std::abs(total(w.probs) - 1.0) < 1e-12);
      for (const auto& [lang, c] : counts) CHECK((w.probs.at(lang) > 0) == (c > 0));
      if (alpha >= 1.0) continue;
      for (const auto& [a, ca] : counts) {
        for (const auto& [b, cb] : counts) {
          if (ca > cb && cb > 0) CHECK(w.probs.at(a) / w.probs.at(b) < ca / cb);
        }
      }
    }
  }

  TEST_CASE("relabeling languages permutes probabilities") {
    const auto w1 = smoothed_distribution({{"a", 5}, {"b", 2}, {"c", 9}}, 0.4);
    const auto w2 = smoothed_distribution({{"x", 9}, {"y", 5}, {"z", 2}}, 0.4);
    CHECK(w1.probs.at("a") == doctest::Approx(w2.probs.at("y")).epsilon(1e-14));
    CHECK(w1.probs.at("b") == doctest::Approx(w2.probs.at("z")).epsilon(1e-14));
    CHECK(w1.probs.at("c") == doctest::Approx(w2.probs.at("x")).epsilon(1e-14));
  }

  TEST_CASE("inverse CDF") {
    const auto w = smoothed_distribution({{"a", 0}, {"b", 9}, {"c", 1}}, 0.5);
    CHECK(sample_language(w, 0.0) == "b");
    CHECK(sample_language(w, 0.7499) == "b");
    CHECK(sample_language(w, 0.75) == "c");
    CHECK(sample_language(w, 0.999999) == "c");
    const auto one = smoothed_distribution({{"solo", 3}}, 0.5);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) CHECK(sample_language(one, rng) == "solo");
  }

  TEST_CASE("Monte Carlo frequency") {
    const auto w = smoothed_distribution({{"a", 9}, {"b", 1}}, 0.5);
    Rng rng(99);
    int a = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) a += sample_language(w, rng) == "a";
    CHECK(std::abs(static_cast<double>(a) / n - 0.75) < 0.01);
  }

  TEST_CASE("count file parsing") {
    std::istringstream ok("de\t10\nfr\t5\nde\t2\n");
    const auto c = read_language_counts(ok);
    CHECK(c.at("de") == 12);
    CHECK(c.at("fr") == 5);
    std::istringstream bad("de 10\n");
    CHECK_THROWS_AS(read_language_counts(bad), SamplerError);
    std::istringstream neg("de\t-3\n");
    CHECK_THROWS_AS(read_language_counts(neg), SamplerError);
  }
}
