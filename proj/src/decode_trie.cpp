#include "kgforge/decode_trie.hpp"

#include <algorithm>
#include <functional>

namespace kgforge {

PrefixTrie PrefixTrie::build(const std::vector<std::vector<TokenId>>& labels,
                             const VocabInfo& vocab) {
  if (labels.empty()) throw TrieError(TrieError::Kind::EmptyLabelSet, "no labels to build a trie from");
  PrefixTrie trie;
  trie.nodes_.emplace_back();
  for (const auto& seq : labels) {
    if (seq.empty()) throw TrieError(TrieError::Kind::EmptySequence, "empty label sequence");
    NodeId node = 0;
    for (TokenId tok : seq) {
      if (vocab.is_special(tok))
        throw TrieError(TrieError::Kind::SpecialTokenInLabel,
                        "label contains special token id " + std::to_string(tok));
      auto it = trie.nodes_[node].children.find(tok);
      if (it == trie.nodes_[node].children.end()) {
        const auto next = static_cast<NodeId>(trie.nodes_.size());
        trie.nodes_[node].children.emplace(tok, next);
        trie.nodes_.emplace_back();
        node = next;
      } else {
        node = it->second;
      }
    }
    if (!trie.nodes_[node].terminal) {
      trie.nodes_[node].terminal = true;
      ++trie.label_count_;
    }
  }
  return trie;
}

std::optional<NodeId> PrefixTrie::child(NodeId node, TokenId token) const {
  const auto& kids = nodes_.at(node).children;
  auto it = kids.find(token);
  if (it == kids.end()) return std::nullopt;
  return it->second;
}

bool PrefixTrie::contains(const std::vector<TokenId>& seq) const {
  NodeId node = root();
  for (TokenId tok : seq) {
    auto next = child(node, tok);
    if (!next) return false;
    node = *next;
  }
  return !seq.empty() && is_terminal(node);
}

const char* to_string(DecodePhase p) {
  switch (p) {
    case DecodePhase::Start: return "Start";
    case DecodePhase::InHead: return "InHead";
    case DecodePhase::InRelation: return "InRelation";
    case DecodePhase::InTail: return "InTail";
    case DecodePhase::AfterTriple: return "AfterTriple";
    case DecodePhase::Free: return "Free";
    case DecodePhase::Finished: return "Finished";
  }
  return "?";
}

DecodeState DecodeState::initial(DecodeMode mode) {
  DecodeState s;
  s.mode = mode;
  s.phase = mode == DecodeMode::PartialAfterMarker ? DecodePhase::Free : DecodePhase::Start;
  return s;
}

namespace {

const PrefixTrie* trie_for(DecodePhase phase, const ConstraintTries& tries) {
  switch (phase) {
    case DecodePhase::InHead:
    case DecodePhase::InTail: return &tries.entities;
    case DecodePhase::InRelation: return &tries.relations;
    default: return nullptr;
  }
}

TokenId exit_symbol(DecodePhase phase, const VocabInfo& vocab) {
  switch (phase) {
    case DecodePhase::InHead: return vocab.rel;
    case DecodePhase::InRelation: return vocab.obj;
    default: return vocab.et;
  }
}

}  // namespace

std::vector<TokenId> allowed_next(const DecodeState& state, const ConstraintTries& tries,
                                  const VocabInfo& vocab) {
  std::vector<TokenId> out;
  switch (state.phase) {
    case DecodePhase::Start:
    case DecodePhase::AfterTriple:
      out = {vocab.eos, vocab.sub};
      break;
    case DecodePhase::Free:
      out.resize(vocab.size);
      for (std::size_t i = 0; i < vocab.size; ++i) out[i] = static_cast<TokenId>(i);
      return out;
    case DecodePhase::Finished:
      return out;
    case DecodePhase::InHead:
    case DecodePhase::InRelation:
    case DecodePhase::InTail: {
      const PrefixTrie& trie = *trie_for(state.phase, tries);
      for (const auto& [tok, node] : trie.children(state.cursor)) out.push_back(tok);
      if (trie.is_terminal(state.cursor)) out.push_back(exit_symbol(state.phase, vocab));
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

DecodeState advance(const DecodeState& state, TokenId token, const ConstraintTries& tries,
                    const VocabInfo& vocab) {
  auto disallowed = [&] {
    return TrieError(TrieError::Kind::DisallowedToken,
                     "token " + std::to_string(token) + " not allowed in phase " +
                         to_string(state.phase));
  };
  DecodeState next = state;
  switch (state.phase) {
    case DecodePhase::Finished:
      throw disallowed();
    case DecodePhase::Free:
      if (token < 0 || static_cast<std::size_t>(token) >= vocab.size) throw disallowed();
      if (token == vocab.triple_marker) next.phase = DecodePhase::Start;
      if (token == vocab.eos) next.phase = DecodePhase::Finished;
      return next;
    case DecodePhase::Start:
    case DecodePhase::AfterTriple:
      if (token == vocab.eos) {
        next.phase = DecodePhase::Finished;
      } else if (token == vocab.sub) {
        next.phase = DecodePhase::InHead;
        next.cursor = tries.entities.root();
      } else {
        throw disallowed();
      }
      return next;
    case DecodePhase::InHead:
    case DecodePhase::InRelation:
    case DecodePhase::InTail: {
      const PrefixTrie& trie = *trie_for(state.phase, tries);
      if (auto child = trie.child(state.cursor, token)) {
        next.cursor = *child;
        return next;
      }
      if (token != exit_symbol(state.phase, vocab) || !trie.is_terminal(state.cursor))
        throw disallowed();
      if (state.phase == DecodePhase::InHead) {
        next.phase = DecodePhase::InRelation;
        next.cursor = tries.relations.root();
      } else if (state.phase == DecodePhase::InRelation) {
        next.phase = DecodePhase::InTail;
        next.cursor = tries.entities.root();
      } else {
        next.phase = DecodePhase::AfterTriple;
        next.cursor = 0;
        ++next.triples_emitted;
      }
      return next;
    }
  }
  throw disallowed();
}

std::vector<double> mask_scores(std::span<const double> scores, const std::vector<TokenId>& allowed,
                                const VocabInfo& vocab) {
  if (scores.size() != vocab.size)
    throw TrieError(TrieError::Kind::LengthMismatch,
                    "score vector has " + std::to_string(scores.size()) + " entries, vocabulary " +
                        std::to_string(vocab.size));
  std::vector<double> out(scores.size(), -std::numeric_limits<double>::infinity());
  for (TokenId id : allowed) {
    if (id >= 0 && static_cast<std::size_t>(id) < out.size())
      out[static_cast<std::size_t>(id)] = scores[static_cast<std::size_t>(id)];
  }
  return out;
}

std::vector<std::vector<TokenId>> complete_sequences(const ConstraintTries& tries,
                                                     const VocabInfo& vocab,
                                                     std::size_t max_triples, std::size_t cap) {
  std::vector<std::vector<TokenId>> out;
  std::vector<TokenId> prefix;
  std::function<void(const DecodeState&)> walk = [&](const DecodeState& state) {
    for (TokenId tok : allowed_next(state, tries, vocab)) {
      if (tok == vocab.sub && state.triples_emitted >= max_triples) continue;
      prefix.push_back(tok);
      const DecodeState next = advance(state, tok, tries, vocab);
      if (next.phase == DecodePhase::Finished) {
        if (out.size() >= cap)
          throw TrieError(TrieError::Kind::EnumerationTooLarge,
                          "more than " + std::to_string(cap) + " complete sequences");
        out.push_back(prefix);
      } else {
        walk(next);
      }
      prefix.pop_back();
    }
  };
  walk(DecodeState::initial(DecodeMode::FullConstraint));
  std::sort(out.begin(), out.end());
  return out;
}

ConstraintTries build_constraint_tries(const std::vector<std::string>& entity_labels,
                                       const std::vector<std::string>& relation_labels,
                                       const Vocabulary& vocab) {
  auto encode_all = [&](const std::vector<std::string>& labels) {
    std::vector<std::vector<TokenId>> seqs;
    seqs.reserve(labels.size());
    for (const auto& l : labels) seqs.push_back(vocab.encode(l));
    return seqs;
  };
  return ConstraintTries{PrefixTrie::build(encode_all(entity_labels), vocab.info()),
                         PrefixTrie::build(encode_all(relation_labels), vocab.info())};
}

}  // namespace kgforge
