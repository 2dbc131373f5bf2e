#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mcqforge/corpus.hpp"

namespace mcqforge {

/// The fifteen sentence rejection rules.
enum class RuleId : std::uint8_t {
  R01 = 1,  // question or exclamation
  R02,      // no verb
  R03,      // modal verb
  R04,      // imperative
  R05,      // demonstrative
  R06,      // first/second person pronoun
  R07,      // begins with a pronoun
  R08,      // first name
  R09,      // too short, too long, or too many commas
  R10,      // special character
  R11,      // too many capitalized tokens
  R12,      // graph, table or link cue
  R13,      // begins with a discourse marker
  R14,      // absolute wording
  R15,      // instructional vocabulary
};

inline constexpr std::size_t kRuleCount = 15;

enum class RuleCategory { Lexical, Grammatical, Pragmatic, Complexity };

std::string_view to_string(RuleId id);
std::string_view to_string(RuleCategory c);
std::string_view rule_description(RuleId id);
RuleCategory rule_category(RuleId id);
std::array<RuleId, kRuleCount> all_rules();
std::size_t rule_index(RuleId id);

struct RuleFiring {
  RuleId rule;
  std::string evidence;
  bool operator==(const RuleFiring&) const = default;
};

struct SentenceDecision {
  std::string sentence_id;
  bool accepted = true;
  std::vector<RuleFiring> fired_rules;

  bool fired(RuleId id) const;
};

/// Lexicon matcher that also handles multiword entries as token sequences.
class PhraseLexicon {
public:
  PhraseLexicon() = default;
  explicit PhraseLexicon(const Lexicon& lexicon);

  /// Length in tokens of the longest entry matching at `tokens[pos]`, or 0.
  std::size_t match_at(const std::vector<Token>& tokens, std::size_t pos) const;
  const Lexicon& lexicon() const noexcept { return lexicon_; }

private:
  Lexicon lexicon_;
  std::unordered_map<std::string, std::vector<std::vector<std::string>>> by_first_;
};

struct FilterConfig {
  std::size_t min_accepted_sentences = 3;
  std::size_t min_tokens = 6;
  std::size_t max_tokens = 18;
  std::size_t max_commas = 2;
  std::size_t max_uppercase_tokens = 3;
  /// Non-alphanumeric characters allowed besides whitespace (UTF-8).
  std::string allowed_punctuation;

  PhraseLexicon modals;
  PhraseLexicon demonstratives;
  PhraseLexicon personal_pronouns;
  PhraseLexicon first_names;
  PhraseLexicon discourse_markers;
  PhraseLexicon absolutes;
  PhraseLexicon instructional;
  PhraseLexicon graph_cues;

  /// Reads a JSON config; lexicon paths are relative to the config file.
  /// Throws LoadError on bad bounds, missing keys or empty lexicons.
  static FilterConfig load(const std::filesystem::path& path);

  /// `default_data_dir()/filter_config.json`.
  static FilterConfig defaults();
};

/// Evaluates every rule (no short-circuit). Throws ContractViolation on an
/// empty or untagged sentence.
SentenceDecision classify_sentence(const Sentence& sentence, const FilterConfig& config);

struct ParagraphDecision {
  bool accepted = false;
  std::size_t n_accepted = 0;
  std::size_t n_total = 0;
  std::vector<SentenceDecision> decisions;
};

ParagraphDecision accept_paragraph(const Paragraph& paragraph, const FilterConfig& config);

struct FilterReport {
  std::array<std::size_t, kRuleCount> rule_counts{};
  std::size_t n_paragraphs = 0;
  std::size_t n_paragraphs_accepted = 0;
  std::size_t n_sentences = 0;
  std::size_t n_sentences_accepted = 0;

  bool operator==(const FilterReport&) const = default;
};

struct FilterResult {
  std::vector<Paragraph> accepted;
  FilterReport report;
};

FilterResult filter_corpus(const std::vector<Paragraph>& paragraphs, const FilterConfig& config);

/// `rule<TAB>count` rows preceded by `#` summary lines.
void write_filter_report(const std::filesystem::path& path, const FilterReport& report);
std::string format_filter_report(const FilterReport& report);

}  // namespace mcqforge
