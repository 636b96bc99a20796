#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "kgforge/decode_trie.hpp"
#include "kgforge/rng.hpp"
#include "kgforge/vocab.hpp"

using namespace kgforge;

namespace {

using Seq = std::vector<TokenId>;

struct Toy {
  Vocabulary vocab;
  ConstraintTries tries;
  std::vector<std::string> entities, relations;
};

Toy toy(std::vector<std::string> entities, std::vector<std::string> relations) {
  std::vector<std::string> all = entities;
  all.insert(all.end(), relations.begin(), relations.end());
  Vocabulary v = Vocabulary::from_labels(all);
  ConstraintTries t = build_constraint_tries(entities, relations, v);
  return {std::move(v), std::move(t), std::move(entities), std::move(relations)};
}

// Every word of the grammar (<sub> E <rel> R <obj> E <et>){0..k} </s>,
// spelled out by nested loops over the distinct stored labels.
std::set<Seq> brute_force(const Toy& t, std::size_t max_triples) {
  const VocabInfo& vi = t.vocab.info();
  std::set<Seq> ents, rels;
  for (const auto& e : t.entities) ents.insert(t.vocab.encode(e));
  for (const auto& r : t.relations) rels.insert(t.vocab.encode(r));
  std::vector<Seq> one;
  for (const auto& h : ents)
    for (const auto& r : rels)
      for (const auto& x : ents) {
        Seq s{vi.sub};
        s.insert(s.end(), h.begin(), h.end());
        s.push_back(vi.rel);
        s.insert(s.end(), r.begin(), r.end());
        s.push_back(vi.obj);
        s.insert(s.end(), x.begin(), x.end());
        s.push_back(vi.et);
        one.push_back(s);
      }
  std::set<Seq> out;
  std::vector<Seq> layer{Seq{}};
  for (std::size_t k = 0; k <= max_triples; ++k) {
    std::vector<Seq> next;
    for (const auto& prefix : layer) {
      Seq done = prefix;
      done.push_back(vi.eos);
      out.insert(done);
      if (k == max_triples) continue;
      for (const auto& tri : one) {
        Seq longer = prefix;
        longer.insert(longer.end(), tri.begin(), tri.end());
        next.push_back(longer);
      }
    }
    layer = std::move(next);
  }
  return out;
}

std::set<Seq> as_set(const std::vector<Seq>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_SUITE("decode_trie") {
  TEST_CASE("membership matches a hash set of stored labels") {
    Rng rng(31);
    const std::vector<std::string> words = {"a", "b", "c", "d"};
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::string> labels;
      const auto n = 1 + rng.below(6);
      for (std::uint64_t i = 0; i < n; ++i) {
        std::string l;
        const auto len = 1 + rng.below(3);
        for (std::uint64_t j = 0; j < len; ++j) l += (j ? " " : "") + words[rng.below(words.size())];
        labels.push_back(l);
      }
      const Vocabulary v = Vocabulary::from_labels(words);
      std::vector<Seq> seqs;
      for (const auto& l : labels) seqs.push_back(v.encode(l));
      const PrefixTrie trie = PrefixTrie::build(seqs, v.info());
      const std::set<Seq> stored(seqs.begin(), seqs.end());
      CHECK(trie.label_count() == stored.size());
      // every sequence of length <= 3 over the alphabet
      std::vector<Seq> probes{Seq{}};
      for (int len = 1; len <= 3; ++len) {
        const auto before = probes.size();
        for (std::size_t i = 0; i < before; ++i) {
          if (probes[i].size() != static_cast<std::size_t>(len - 1)) continue;
          for (const auto& w : words) {
            Seq p = probes[i];
            p.push_back(v.id(w));
            probes.push_back(p);
          }
        }
      }
      for (const auto& p : probes) CHECK(trie.contains(p) == (stored.count(p) > 0));
    }
  }

  TEST_CASE("build errors") {
    const Vocabulary v = Vocabulary::from_labels({"a"});
    auto kind = [&](const std::vector<Seq>& labels) {
      try {
        PrefixTrie::build(labels, v.info());
      } catch (const TrieError& e) {
        return e.kind();
      }
      FAIL("expected TrieError");
      return TrieError::Kind::EmptyLabelSet;
    };
    CHECK(kind({}) == TrieError::Kind::EmptyLabelSet);
    CHECK(kind({Seq{}}) == TrieError::Kind::EmptySequence);
    CHECK(kind({Seq{v.id("a"), v.info().sub}}) == TrieError::Kind::SpecialTokenInLabel);
  }

  TEST_CASE("first state admits exactly EOS and SUB") {
    const Toy t = toy({"United Kingdom", "London"}, {"capital"});
    const VocabInfo& vi = t.vocab.info();
    const auto first = allowed_next(DecodeState::initial(DecodeMode::FullConstraint), t.tries, vi);
    CHECK(first == std::vector<TokenId>{vi.eos, vi.sub});
  }

  TEST_CASE("walking one triple") {
    const Toy t = toy({"United Kingdom", "United States", "London"}, {"capital", "capital of"});
    const VocabInfo& vi = t.vocab.info();
    DecodeState s = DecodeState::initial(DecodeMode::FullConstraint);
    s = advance(s, vi.sub, t.tries, vi);
    CHECK(s.phase == DecodePhase::InHead);
    CHECK(allowed_next(s, t.tries, vi) == std::vector<TokenId>{t.vocab.id("London"), t.vocab.id("United")});
    s = advance(s, t.vocab.id("United"), t.tries, vi);
    CHECK(allowed_next(s, t.tries, vi) == std::vector<TokenId>{t.vocab.id("Kingdom"), t.vocab.id("States")});
    CHECK_THROWS_AS(advance(s, vi.rel, t.tries, vi), TrieError);
    s = advance(s, t.vocab.id("Kingdom"), t.tries, vi);
    CHECK(allowed_next(s, t.tries, vi) == std::vector<TokenId>{vi.rel});
    s = advance(s, vi.rel, t.tries, vi);
    CHECK(s.phase == DecodePhase::InRelation);
    s = advance(s, t.vocab.id("capital"), t.tries, vi);
    // "capital" is complete and also a prefix of "capital of"
    auto next = allowed_next(s, t.tries, vi);
    CHECK(next == std::vector<TokenId>{vi.obj, t.vocab.id("of")});
    s = advance(s, vi.obj, t.tries, vi);
    s = advance(s, t.vocab.id("London"), t.tries, vi);
    s = advance(s, vi.et, t.tries, vi);
    CHECK(s.phase == DecodePhase::AfterTriple);
    CHECK(s.triples_emitted == 1);
    CHECK(allowed_next(s, t.tries, vi) == std::vector<TokenId>{vi.eos, vi.sub});
    s = advance(s, vi.eos, t.tries, vi);
    CHECK(s.phase == DecodePhase::Finished);
    CHECK(allowed_next(s, t.tries, vi).empty());
    CHECK_THROWS_AS(advance(s, vi.eos, t.tries, vi), TrieError);
  }

  TEST_CASE("disallowed tokens are rejected in every constrained phase") {
    const Toy t = toy({"a b", "c"}, {"r"});
    const VocabInfo& vi = t.vocab.info();
    const auto sequences = complete_sequences(t.tries, vi, 2);
    for (const auto& seq : sequences) {
      DecodeState s = DecodeState::initial(DecodeMode::FullConstraint);
      for (TokenId tok : seq) {
        const auto allowed = allowed_next(s, t.tries, vi);
        for (std::size_t id = 0; id < vi.size; ++id) {
          const auto tid = static_cast<TokenId>(id);
          if (std::binary_search(allowed.begin(), allowed.end(), tid)) continue;
          try {
            advance(s, tid, t.tries, vi);
            FAIL("token " << id << " accepted in phase " << to_string(s.phase));
          } catch (const TrieError& e) {
            CHECK(e.kind() == TrieError::Kind::DisallowedToken);
          }
        }
        s = advance(s, tok, t.tries, vi);
      }
      CHECK(s.phase == DecodePhase::Finished);
    }
  }

  TEST_CASE("enumeration counts") {
    const Toy one = toy({"a"}, {"r"});
    CHECK(complete_sequences(one.tries, one.vocab.info(), 1).size() == 2);
    CHECK(complete_sequences(one.tries, one.vocab.info(), 2).size() == 3);
    const Toy two = toy({"a", "b"}, {"r"});
    CHECK(complete_sequences(two.tries, two.vocab.info(), 1).size() == 5);
    CHECK(complete_sequences(two.tries, two.vocab.info(), 0) ==
          std::vector<Seq>{Seq{two.vocab.info().eos}});
    CHECK_THROWS_AS(complete_sequences(two.tries, two.vocab.info(), 2, 10), TrieError);
  }

  TEST_CASE("complete_sequences equals the brute-force grammar") {
    Rng rng(404);
    const std::vector<std::string> pool = {"x", "y", "z", "w"};
    for (int trial = 0; trial < 40; ++trial) {
      auto label = [&] {
        std::string l;
        const auto len = 1 + rng.below(2);
        for (std::uint64_t j = 0; j < len; ++j) l += (j ? " " : "") + pool[rng.below(pool.size())];
        return l;
      };
      std::vector<std::string> ents(1 + rng.below(4)), rels(1 + rng.below(2));
      for (auto& e : ents) e = label();
      for (auto& r : rels) r = label();
      const Toy t = toy(ents, rels);
      for (std::size_t k = 0; k <= 2; ++k) CHECK(as_set(complete_sequences(t.tries, t.vocab.info(), k)) == brute_force(t, k));
    }
  }

  TEST_CASE("mask_scores keeps the argmax inside the allowed set") {
    const Toy t = toy({"a", "b c"}, {"r"});
    const VocabInfo& vi = t.vocab.info();
    Rng rng(6);
    DecodeState s = advance(DecodeState::initial(DecodeMode::FullConstraint), vi.sub, t.tries, vi);
    const auto allowed = allowed_next(s, t.tries, vi);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<double> scores(vi.size);
      for (auto& x : scores) x = rng.uniform() * 20 - 10;
      const auto masked = mask_scores(scores, allowed, vi);
      for (std::size_t i = 0; i < scores.size(); ++i) {
        if (std::binary_search(allowed.begin(), allowed.end(), static_cast<TokenId>(i)))
          CHECK(masked[i] == scores[i]);
        else
          CHECK(std::isinf(masked[i]));
      }
      const auto best = static_cast<TokenId>(std::max_element(masked.begin(), masked.end()) - masked.begin());
      CHECK(std::binary_search(allowed.begin(), allowed.end(), best));
    }
    CHECK_THROWS_AS(mask_scores(std::vector<double>(3, 0.0), allowed, vi), TrieError);
  }

  TEST_CASE("partial mode: free text until [TRIPLE]") {
    const Toy t = toy({"a"}, {"r"});
    const VocabInfo& vi = t.vocab.info();
    DecodeState s = DecodeState::initial(DecodeMode::PartialAfterMarker);
    CHECK(s.phase == DecodePhase::Free);
    CHECK(allowed_next(s, t.tries, vi).size() == vi.size);
    s = advance(s, vi.entity_marker, t.tries, vi);
    s = advance(s, t.vocab.id("a"), t.tries, vi);
    CHECK(s.phase == DecodePhase::Free);
    s = advance(s, vi.triple_marker, t.tries, vi);
    CHECK(s.phase == DecodePhase::Start);
    CHECK(allowed_next(s, t.tries, vi) == std::vector<TokenId>{vi.eos, vi.sub});
    CHECK_THROWS_AS(advance(s, t.vocab.id("a"), t.tries, vi), TrieError);

    DecodeState early = advance(DecodeState::initial(DecodeMode::PartialAfterMarker), vi.eos, t.tries, vi);
    CHECK(early.phase == DecodePhase::Finished);
  }

  TEST_CASE("labels sharing a prefix") {
    const Toy t = toy({"New York", "New York City", "New"}, {"r"});
    const VocabInfo& vi = t.vocab.info();
    DecodeState s = advance(DecodeState::initial(DecodeMode::FullConstraint), vi.sub, t.tries, vi);
    s = advance(s, t.vocab.id("New"), t.tries, vi);
    CHECK(allowed_next(s, t.tries, vi) == std::vector<TokenId>{vi.rel, t.vocab.id("York")});
    s = advance(s, t.vocab.id("York"), t.tries, vi);
    CHECK(allowed_next(s, t.tries, vi) == std::vector<TokenId>{vi.rel, t.vocab.id("City")});
    s = advance(s, t.vocab.id("City"), t.tries, vi);
    CHECK(allowed_next(s, t.tries, vi) == std::vector<TokenId>{vi.rel});
  }
}
