#include "kgforge/ds_extract.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <regex>

#include "kgforge/utf8.hpp"

namespace kgforge {

namespace {

constexpr std::array<std::string_view, 12> kMonths{
    "january", "february", "march",     "april",   "may",      "june",
    "july",    "august",   "september", "october", "november", "december"};

bool is_month(std::string word) {
  std::transform(word.begin(), word.end(), word.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return std::find(kMonths.begin(), kMonths.end(), word) != kMonths.end();
}

std::optional<int> year_of(const std::string& digits) {
  const int y = std::stoi(digits);
  if (y < 1000 || y > 2999) return std::nullopt;
  return y;
}

bool day_ok(const std::string& digits) {
  const int d = std::stoi(digits);
  return d >= 1 && d <= 31;
}

// Uniform without replacement: the first k entries of pool after the call.
void partial_shuffle(std::vector<std::size_t>& pool, std::size_t k, RandomSource& rng) {
  for (std::size_t i = 0; i < k && i + 1 < pool.size(); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
}

}  // namespace

std::optional<int> normalize_date(std::string_view text) {
  static const std::regex kBareYear(R"(^([0-9]{4})$)");
  static const std::regex kMonthFirst(R"(^([A-Za-z]+)\s+([0-9]{1,2}),?\s+([0-9]{4})$)");
  static const std::regex kDayFirst(R"(^([0-9]{1,2})\s+([A-Za-z]+),?\s+([0-9]{4})$)");
  const std::string s = utf8::normalize_space(text);
  std::smatch m;
  if (std::regex_match(s, m, kBareYear)) return year_of(m[1]);
  if (std::regex_match(s, m, kMonthFirst) && is_month(m[1]) && day_ok(m[2])) return year_of(m[3]);
  if (std::regex_match(s, m, kDayFirst) && is_month(m[2]) && day_ok(m[1])) return year_of(m[3]);
  return std::nullopt;
}

AnnotatedSentence to_linked_sentence(const AnnotatedSentence& s, const KbStore& kb) {
  AnnotatedSentence out;
  out.sent_id = s.sent_id;
  out.words = s.words;
  for (const auto& m : s.mentions) {
    Mention linked = m;
    if (!linked.kb_id && !linked.year && !linked.title.empty()) linked.kb_id = kb.id_for_title(m.title);
    if (linked.kb_id) {
      linked.year.reset();
      if (const EntityRecord* rec = kb.entity(*linked.kb_id)) linked.title = rec->canonical_title;
      out.mentions.push_back(std::move(linked));
      continue;
    }
    if (!linked.year) linked.year = normalize_date(m.surface);
    if (linked.year) {
      linked.title = std::to_string(*linked.year);
      out.mentions.push_back(std::move(linked));
    }
  }
  return out;
}

std::set<LinkedTriple> extract_ds_triples(const AnnotatedSentence& linked, const KbStore& kb) {
  std::set<LinkedTriple> out;
  const auto& ms = linked.mentions;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (!ms[i].kb_id) continue;
    const EntityRecord* head = kb.entity(*ms[i].kb_id);
    if (!head) continue;
    for (std::size_t j = 0; j < ms.size(); ++j) {
      if (i == j) continue;
      std::string tail_id;
      std::string tail_label;
      if (ms[j].kb_id) {
        const EntityRecord* tail = kb.entity(*ms[j].kb_id);
        if (!tail) continue;
        tail_id = tail->kb_id;
        tail_label = tail->canonical_title;
      } else if (ms[j].year) {
        tail_id = tail_label = std::to_string(*ms[j].year);
      } else {
        continue;
      }
      for (const auto& rel : kb.relations_between(head->kb_id, tail_id)) {
        out.insert(LinkedTriple{KbTriple{head->kb_id, rel, tail_id},
                                Triple{head->canonical_title, kb.relation(rel)->label, tail_label}});
      }
    }
  }
  return out;
}

std::vector<Triple> entailment_filter(const std::vector<ScoredTriple>& scored, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw DsError(DsError::Kind::BadThreshold, "threshold must lie in [0, 1]");
  std::vector<Triple> order;
  std::map<Triple, double> best;
  for (const auto& st : scored) {
    if (!(st.score >= 0.0 && st.score <= 1.0))
      throw DsError(DsError::Kind::ScoreOutOfRange,
                    "entailment score " + std::to_string(st.score) + " outside [0, 1]");
    auto [it, inserted] = best.emplace(st.triple, st.score);
    if (inserted) {
      order.push_back(st.triple);
    } else {
      it->second = std::max(it->second, st.score);
    }
  }
  std::vector<Triple> kept;
  for (const auto& t : order) {
    if (best.at(t) > threshold) kept.push_back(t);
  }
  return kept;
}

std::string_view to_string(ExampleLabel label) {
  switch (label) {
    case ExampleLabel::Positive: return "positive";
    case ExampleLabel::NegativeFewEntities: return "negative_few_entities";
    case ExampleLabel::NegativeNoRelation: return "negative_no_relation";
  }
  return "?";
}

std::optional<ExampleLabel> parse_example_label(std::string_view name) {
  for (auto l : {ExampleLabel::Positive, ExampleLabel::NegativeFewEntities,
                 ExampleLabel::NegativeNoRelation}) {
    if (to_string(l) == name) return l;
  }
  return std::nullopt;
}

ExampleLabel classify_example(const AnnotatedSentence& linked,
                              const std::vector<Triple>& triples_after_filter) {
  if (!triples_after_filter.empty()) return ExampleLabel::Positive;
  const auto entities = std::count_if(linked.mentions.begin(), linked.mentions.end(),
                                      [](const Mention& m) { return m.kb_id.has_value(); });
  return entities <= 1 ? ExampleLabel::NegativeFewEntities : ExampleLabel::NegativeNoRelation;
}

NegativeSample sample_negatives(const std::vector<ExampleLabel>& labels, double fraction,
                                RandomSource& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw DsError(DsError::Kind::BadFraction, "negative fraction must lie in [0, 1]");
  std::vector<std::size_t> positives;
  std::vector<std::size_t> few;
  std::vector<std::size_t> no_rel;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    switch (labels[i]) {
      case ExampleLabel::Positive: positives.push_back(i); break;
      case ExampleLabel::NegativeFewEntities: few.push_back(i); break;
      case ExampleLabel::NegativeNoRelation: no_rel.push_back(i); break;
    }
  }
  const std::size_t available = few.size() + no_rel.size();
  const std::size_t p = positives.size();

  std::size_t wanted = 0;
  if (fraction >= 1.0) {
    wanted = available;
  } else if (fraction > 0.0) {
    wanted = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(p) / (1.0 - fraction)));
  }

  NegativeSample out;
  out.insufficient = wanted > available || (fraction >= 1.0 && p > 0);
  wanted = std::min(wanted, available);

  // Even split; the odd example goes to the few-entities kind.
  std::size_t take_few = (wanted + 1) / 2;
  std::size_t take_rel = wanted - take_few;
  if (take_few > few.size()) {
    take_rel += take_few - few.size();
    take_few = few.size();
  }
  if (take_rel > no_rel.size()) {
    take_few += take_rel - no_rel.size();
    take_rel = no_rel.size();
  }

  partial_shuffle(few, take_few, rng);
  partial_shuffle(no_rel, take_rel, rng);
  out.selected = positives;
  out.selected.insert(out.selected.end(), few.begin(), few.begin() + take_few);
  out.selected.insert(out.selected.end(), no_rel.begin(), no_rel.begin() + take_rel);
  std::sort(out.selected.begin(), out.selected.end());

  out.positives = p;
  out.few_entities = take_few;
  out.no_relation = take_rel;
  const std::size_t total = out.selected.size();
  out.achieved_fraction =
      total == 0 ? 0.0 : static_cast<double>(take_few + take_rel) / static_cast<double>(total);
  return out;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const std::array<double, 3>& ratios) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0 && r <= 1.0)) throw DsError(DsError::Kind::BadRatios, "ratio outside [0, 1]");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DsError(DsError::Kind::BadRatios, "ratios must sum to 1");

  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double exact = ratios[k] * static_cast<double>(n);
    sizes[k] = static_cast<std::size_t>(std::floor(exact));
    remainder[k] = exact - static_cast<double>(sizes[k]);
    assigned += sizes[k];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 3, ++assigned) ++sizes[order[k]];
  while (assigned > n) {
    // Floating error can only overshoot by pushing a floor up; trim the last split.
    for (std::size_t k = 3; k-- > 0 && assigned > n;) {
      if (sizes[order[k]] > 0) {
        --sizes[order[k]];
        --assigned;
      }
    }
  }
  return sizes;
}

DatasetSplit split_dataset(std::size_t n, const std::array<double, 3>& ratios, RandomSource& rng) {
  const auto sizes = split_sizes(n, ratios);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  partial_shuffle(idx, n, rng);
  DatasetSplit out;
  auto take = [&](std::vector<std::size_t>& dst, std::size_t from, std::size_t count) {
    dst.assign(idx.begin() + from, idx.begin() + from + count);
    std::sort(dst.begin(), dst.end());
  };
  take(out.train, 0, sizes[0]);
  take(out.validation, sizes[0], sizes[1]);
  take(out.test, sizes[0] + sizes[1], sizes[2]);
  return out;
}

}  // namespace kgforge
