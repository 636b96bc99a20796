#include "kgforge/mask_engine.hpp"

#include <algorithm>

namespace kgforge {

namespace {

enum class Branch { Mask, Random, Same, Unpredicted };

Branch pick_branch(double v, const BranchSplit& b) {
  const double mask = b.mask / 100.0;
  const double rnd = (b.mask + b.rnd) / 100.0;
  const double same = (b.mask + b.rnd + b.same) / 100.0;
  if (v < mask) return Branch::Mask;
  if (v < rnd) return Branch::Random;
  if (v < same) return Branch::Same;
  return Branch::Unpredicted;
}

void count(MaskingStats::Side& side, Branch b) {
  switch (b) {
    case Branch::Mask: ++side.masked; break;
    case Branch::Random: ++side.random; break;
    case Branch::Same: ++side.same; break;
    case Branch::Unpredicted: ++side.unpredicted; break;
  }
}

bool split_valid(const BranchSplit& b) {
  return b.mask >= 0 && b.rnd >= 0 && b.same >= 0 && b.mask + b.rnd + b.same <= 100;
}

// Uniform over ids in [0, size) that are not special.
class RandomTokens {
 public:
  explicit RandomTokens(const VocabInfo& vocab) : size_(vocab.size) {
    specials_ = vocab.specials();
    std::sort(specials_.begin(), specials_.end());
    specials_.erase(std::unique(specials_.begin(), specials_.end()), specials_.end());
  }

  std::size_t regular_count() const { return size_ - specials_.size(); }

  TokenId draw(RandomSource& rng) const {
    auto r = static_cast<TokenId>(rng.below(regular_count()));
    for (TokenId s : specials_) {
      if (s <= r) ++r;
    }
    return r;
  }

 private:
  std::size_t size_;
  std::vector<TokenId> specials_;
};

}  // namespace

std::string_view to_string(MaskStrategy s) {
  switch (s) {
    case MaskStrategy::MLM: return "mlm";
    case MaskStrategy::WEP: return "wep";
    case MaskStrategy::PEP_MRS: return "pep_mrs";
    case MaskStrategy::PEP_MS: return "pep_ms";
    case MaskStrategy::PEP_M: return "pep_m";
  }
  return "?";
}

std::optional<MaskStrategy> parse_strategy(std::string_view name) {
  for (auto s : {MaskStrategy::MLM, MaskStrategy::WEP, MaskStrategy::PEP_MRS,
                 MaskStrategy::PEP_MS, MaskStrategy::PEP_M}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

void MaskingConfig::validate() const {
  auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob_ok(p_entity) || !prob_ok(p_token))
    throw MaskError(MaskError::Kind::BadConfig, "candidate probability outside [0, 1]");
  if (!split_valid(entity_branch) || !split_valid(token_branch))
    throw MaskError(MaskError::Kind::BadConfig, "branch percentages must be >= 0 and sum <= 100");
}

MaskingConfig default_config(MaskStrategy strategy, bool with_mlm) {
  constexpr BranchSplit kStandard{80, 10, 10};
  MaskingConfig c;
  c.strategy = strategy;
  if (strategy == MaskStrategy::MLM) {
    // Plain MLM treats every token alike; the token pass covers it.
    c.p_entity = 0.15;
    c.entity_branch = kStandard;
    c.p_token = 0.15;
    c.token_branch = kStandard;
    return c;
  }
  c.with_mlm = with_mlm;
  c.p_entity = with_mlm ? 0.50 : 1.00;
  switch (strategy) {
    case MaskStrategy::WEP: c.entity_branch = {80, 0, 20}; break;
    case MaskStrategy::PEP_MRS: c.entity_branch = {80, 10, 10}; break;
    case MaskStrategy::PEP_MS: c.entity_branch = {80, 0, 10}; break;
    case MaskStrategy::PEP_M: c.entity_branch = {80, 0, 0}; break;
    case MaskStrategy::MLM: break;
  }
  if (with_mlm) {
    c.p_token = 0.15;
    c.token_branch = kStandard;
  }
  return c;
}

void MaskingStats::merge(const MaskingStats& other) {
  for (auto [dst, src] : {std::pair{&entity, &other.entity}, std::pair{&token, &other.token}}) {
    dst->items += src->items;
    dst->candidates += src->candidates;
    dst->masked += src->masked;
    dst->random += src->random;
    dst->same += src->same;
    dst->unpredicted += src->unpredicted;
  }
}

MaskedExample apply_masking(const std::vector<TokenId>& tokens, const std::vector<Span>& spans,
                            const MaskingConfig& cfg, RandomSource& rng, const VocabInfo& vocab,
                            MaskingStats* stats) {
  cfg.validate();
  const bool mlm_only = cfg.strategy == MaskStrategy::MLM;
  const bool token_pass = mlm_only || cfg.with_mlm;

  std::vector<Span> entity_spans;
  if (!mlm_only) {
    entity_spans = spans;
    for (const auto& [s, e] : entity_spans) {
      if (s > e || e > tokens.size())
        throw MaskError(MaskError::Kind::SpanOutOfBounds, "entity span out of bounds");
    }
    std::vector<Span> sorted = entity_spans;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i].first < sorted[i - 1].second)
        throw MaskError(MaskError::Kind::OverlappingSpans, "entity spans overlap");
    }
  }

  const RandomTokens random_tokens(vocab);
  const bool needs_random = (!mlm_only && cfg.entity_branch.rnd > 0 && !entity_spans.empty()) ||
                            (token_pass && cfg.token_branch.rnd > 0);
  if (needs_random && random_tokens.regular_count() == 0)
    throw MaskError(MaskError::Kind::EmptyVocab, "no non-special token to draw replacements from");

  MaskedExample out{tokens, std::vector<std::optional<TokenId>>(tokens.size())};
  MaskingStats local;

  auto apply = [&](std::size_t i, Branch b) {
    switch (b) {
      case Branch::Mask:
        out.input_ids[i] = vocab.mask;
        out.labels[i] = tokens[i];
        break;
      case Branch::Random:
        out.input_ids[i] = random_tokens.draw(rng);
        out.labels[i] = tokens[i];
        break;
      case Branch::Same:
        out.labels[i] = tokens[i];
        break;
      case Branch::Unpredicted:
        break;
    }
  };

  std::vector<bool> in_entity(tokens.size(), false);
  if (cfg.strategy == MaskStrategy::WEP) {
    for (const auto& [s, e] : entity_spans) {
      std::fill(in_entity.begin() + s, in_entity.begin() + e, true);
      ++local.entity.items;
      if (!(rng.uniform() < cfg.p_entity)) continue;
      ++local.entity.candidates;
      const Branch b = pick_branch(rng.uniform(), cfg.entity_branch);
      count(local.entity, b);
      for (std::size_t i = s; i < e; ++i) apply(i, b);
    }
  } else if (!mlm_only) {
    for (const auto& [s, e] : entity_spans) {
      for (std::size_t i = s; i < e; ++i) {
        in_entity[i] = true;
        ++local.entity.items;
        if (!(rng.uniform() < cfg.p_entity)) continue;
        ++local.entity.candidates;
        const Branch b = pick_branch(rng.uniform(), cfg.entity_branch);
        count(local.entity, b);
        apply(i, b);
      }
    }
  }

  if (token_pass) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (in_entity[i]) continue;
      ++local.token.items;
      if (!(rng.uniform() < cfg.p_token)) continue;
      ++local.token.candidates;
      const Branch b = pick_branch(rng.uniform(), cfg.token_branch);
      count(local.token, b);
      apply(i, b);
    }
  }

  if (stats) stats->merge(local);
  return out;
}

}  // namespace kgforge
