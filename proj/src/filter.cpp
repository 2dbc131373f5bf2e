#include "mcqforge/filter.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "mcqforge/error.hpp"

namespace mcqforge {

namespace {

struct RuleInfo {
  std::string_view name;
  std::string_view description;
  RuleCategory category;
};

constexpr std::array<RuleInfo, kRuleCount> kRules = {{
    {"R01", "is a question or exclamation", RuleCategory::Pragmatic},
    {"R02", "has no verb", RuleCategory::Grammatical},
    {"R03", "contains a modal verb", RuleCategory::Grammatical},
    {"R04", "is an imperative", RuleCategory::Grammatical},
    {"R05", "contains a demonstrative", RuleCategory::Lexical},
    {"R06", "contains a first- or second-person pronoun", RuleCategory::Lexical},
    {"R07", "begins with a pronoun", RuleCategory::Grammatical},
    {"R08", "contains a first name", RuleCategory::Lexical},
    {"R09", "has too few or too many tokens, or too many commas", RuleCategory::Complexity},
    {"R10", "contains a special character", RuleCategory::Complexity},
    {"R11", "has too many capitalized tokens", RuleCategory::Complexity},
    {"R12", "mentions a graph, table, figure or web link", RuleCategory::Pragmatic},
    {"R13", "begins with a discourse marker", RuleCategory::Pragmatic},
    {"R14", "contains absolute wording", RuleCategory::Lexical},
    {"R15", "contains instructional vocabulary", RuleCategory::Pragmatic},
}};

const RuleInfo& info(RuleId id) { return kRules[rule_index(id)]; }

// Inflected auxiliaries never start an imperative.
const std::unordered_set<std::string_view> kFiniteAuxiliaries = {
    "is", "are", "was", "were", "am", "has", "had", "does", "did", "been", "being"};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_word_token(const Token& t) { return t.pos != PosTag::Punct && t.pos != PosTag::Sym; }

bool looks_like_base_form(std::string_view lower) {
  if (kFiniteAuxiliaries.count(lower)) return false;
  if (ends_with(lower, "ing") || ends_with(lower, "ed")) return false;
  if (ends_with(lower, "s") && !ends_with(lower, "ss")) return false;
  return true;
}

bool is_latin_letter(char32_t cp) {
  return cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7;
}

PhraseLexicon load_lexicon(const nlohmann::json& j, const std::filesystem::path& base,
                           std::string_view key) {
  const std::string k(key);
  if (!j.contains(k)) throw LoadError("filter config: missing lexicon '" + k + "'");
  std::filesystem::path p = j.at(k).get<std::string>();
  if (p.is_relative()) p = base / p;
  Lexicon lex = Lexicon::load(p);
  if (lex.empty()) throw LoadError("filter config: lexicon '" + k + "' is empty: " + p.string());
  return PhraseLexicon(lex);
}

}  // namespace

std::string_view to_string(RuleId id) { return info(id).name; }

std::string_view to_string(RuleCategory c) {
  switch (c) {
    case RuleCategory::Lexical: return "lexical";
    case RuleCategory::Grammatical: return "grammatical";
    case RuleCategory::Pragmatic: return "pragmatic";
    case RuleCategory::Complexity: return "complexity";
  }
  return "unknown";
}

std::string_view rule_description(RuleId id) { return info(id).description; }
RuleCategory rule_category(RuleId id) { return info(id).category; }
std::size_t rule_index(RuleId id) { return static_cast<std::size_t>(id) - 1; }

std::array<RuleId, kRuleCount> all_rules() {
  std::array<RuleId, kRuleCount> out{};
  for (std::size_t i = 0; i < kRuleCount; ++i) out[i] = static_cast<RuleId>(i + 1);
  return out;
}

bool SentenceDecision::fired(RuleId id) const {
  for (const auto& f : fired_rules) {
    if (f.rule == id) return true;
  }
  return false;
}

PhraseLexicon::PhraseLexicon(const Lexicon& lexicon) : lexicon_(lexicon) {
  for (const std::string& entry : lexicon_.entries()) {
    std::vector<std::string> words;
    for (const Token& t : tokenize(entry)) words.push_back(t.lower);
    if (words.empty()) continue;
    by_first_[words.front()].push_back(std::move(words));
  }
}

std::size_t PhraseLexicon::match_at(const std::vector<Token>& tokens, std::size_t pos) const {
  auto it = by_first_.find(tokens[pos].lower);
  if (it == by_first_.end()) return 0;
  std::size_t best = 0;
  for (const auto& words : it->second) {
    if (pos + words.size() > tokens.size() || words.size() <= best) continue;
    bool ok = true;
    for (std::size_t k = 1; k < words.size() && ok; ++k) ok = tokens[pos + k].lower == words[k];
    if (ok) best = words.size();
  }
  return best;
}

FilterConfig FilterConfig::load(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  FilterConfig c;
  try {
    c.min_accepted_sentences = j.value("min_accepted_sentences", c.min_accepted_sentences);
    c.min_tokens = j.value("min_tokens", c.min_tokens);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
    c.max_commas = j.value("max_commas", c.max_commas);
    c.max_uppercase_tokens = j.value("max_uppercase_tokens", c.max_uppercase_tokens);
    c.allowed_punctuation = j.value("allowed_punctuation", std::string(".,;:()'\"-%/"));
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  if (c.min_tokens >= c.max_tokens) {
    throw LoadError(path.string() + ": min_tokens must be smaller than max_tokens");
  }
  if (!j.contains("lexicons") || !j.at("lexicons").is_object()) {
    throw LoadError(path.string() + ": missing 'lexicons' object");
  }
  const auto& lj = j.at("lexicons");
  const auto base = path.parent_path();
  c.modals = load_lexicon(lj, base, "modals");
  c.demonstratives = load_lexicon(lj, base, "demonstratives");
  c.personal_pronouns = load_lexicon(lj, base, "personal_pronouns");
  c.first_names = load_lexicon(lj, base, "first_names");
  c.discourse_markers = load_lexicon(lj, base, "discourse_markers");
  c.absolutes = load_lexicon(lj, base, "absolutes");
  c.instructional = load_lexicon(lj, base, "instructional");
  c.graph_cues = load_lexicon(lj, base, "graph_cues");
  return c;
}

FilterConfig FilterConfig::defaults() { return load(default_data_dir() / "filter_config.json"); }

SentenceDecision classify_sentence(const Sentence& sentence, const FilterConfig& config) {
  const auto& toks = sentence.tokens;
  if (toks.empty()) throw ContractViolation("sentence '" + sentence.id + "' has no tokens");
  for (const Token& t : toks) {
    if (t.pos == PosTag::None) {
      throw ContractViolation("sentence '" + sentence.id + "' has untagged token '" +
                              t.surface + "'");
    }
  }

  SentenceDecision d;
  d.sentence_id = sentence.id;
  auto fire = [&](RuleId id, std::string evidence) {
    d.fired_rules.push_back({id, std::move(evidence)});
  };
  auto phrase = [&](std::size_t pos, std::size_t len) {
    std::string s = toks[pos].surface;
    for (std::size_t k = 1; k < len; ++k) s += " " + toks[pos + k].surface;
    return s;
  };
  auto first_hit = [&](const PhraseLexicon& lex, bool capitalized_only) -> std::string {
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (capitalized_only && !toks[i].is_capitalized) continue;
      if (std::size_t len = lex.match_at(toks, i)) return phrase(i, len);
    }
    return {};
  };

  std::size_t first_word = 0;
  while (first_word < toks.size() && toks[first_word].is_punct()) ++first_word;

  // R01
  std::size_t last = toks.size();
  while (last > 0 && (toks[last - 1].surface == "\"" || toks[last - 1].surface == "'" ||
                      toks[last - 1].surface == ")")) {
    --last;
  }
  if (last > 0 && (toks[last - 1].surface == "?" || toks[last - 1].surface == "!")) {
    fire(RuleId::R01, toks[last - 1].surface);
  }

  // R02
  bool has_verb = false;
  for (const Token& t : toks) has_verb = has_verb || t.pos == PosTag::Verb || t.pos == PosTag::Modal;
  if (!has_verb) fire(RuleId::R02, "");

  // R03
  {
    std::string hit;
    for (const Token& t : toks) {
      if (t.pos == PosTag::Modal || config.modals.match_at(toks, &t - toks.data())) {
        hit = t.surface;
        break;
      }
    }
    if (!hit.empty()) fire(RuleId::R03, hit);
  }

  // R04: a base-form verb opens the sentence, optionally after adverbs.
  {
    std::size_t i = first_word;
    while (i < toks.size() && (toks[i].pos == PosTag::Adv || toks[i].is_punct())) ++i;
    if (i < toks.size() && toks[i].pos == PosTag::Verb && looks_like_base_form(toks[i].lower)) {
      fire(RuleId::R04, toks[i].surface);
    }
  }

  if (auto hit = first_hit(config.demonstratives, false); !hit.empty()) fire(RuleId::R05, hit);
  const std::string personal = first_hit(config.personal_pronouns, false);
  if (!personal.empty()) fire(RuleId::R06, personal);

  // R07: pronouns already caught by R06 are not counted twice.
  if (first_word < toks.size() && toks[first_word].pos == PosTag::Pron &&
      !config.personal_pronouns.match_at(toks, first_word)) {
    fire(RuleId::R07, toks[first_word].surface);
  }

  if (auto hit = first_hit(config.first_names, true); !hit.empty()) fire(RuleId::R08, hit);

  // R09
  {
    std::size_t words = 0, commas = 0;
    for (const Token& t : toks) {
      if (is_word_token(t)) ++words;
      if (t.surface == ",") ++commas;
    }
    if (words < config.min_tokens || words > config.max_tokens) {
      fire(RuleId::R09, std::to_string(words) + " tokens");
    } else if (commas > config.max_commas) {
      fire(RuleId::R09, std::to_string(commas) + " commas");
    }
  }

  // R10
  {
    const std::u32string allowed = decode_utf8(config.allowed_punctuation);
    for (char32_t cp : decode_utf8(sentence.text)) {
      const bool ok = (cp < 0x80 && (is_ascii_alpha(static_cast<char>(cp)) ||
                                     is_ascii_digit(static_cast<char>(cp)) ||
                                     is_ascii_space(static_cast<char>(cp)))) ||
                      is_latin_letter(cp) || allowed.find(cp) != std::u32string::npos;
      if (!ok) {
        std::string ev;
        if (cp < 0x80) {
          ev.push_back(static_cast<char>(cp));
        } else {
          std::ostringstream os;
          os << "U+" << std::hex << std::uppercase << static_cast<std::uint32_t>(cp);
          ev = os.str();
        }
        fire(RuleId::R10, ev);
        break;
      }
    }
  }

  // R11
  {
    std::size_t upper = 0;
    for (const Token& t : toks) upper += t.is_capitalized ? 1 : 0;
    if (upper > config.max_uppercase_tokens) {
      fire(RuleId::R11, std::to_string(upper) + " capitalized tokens");
    }
  }

  if (auto hit = first_hit(config.graph_cues, false); !hit.empty()) fire(RuleId::R12, hit);

  if (first_word < toks.size()) {
    if (std::size_t len = config.discourse_markers.match_at(toks, first_word)) {
      fire(RuleId::R13, phrase(first_word, len));
    }
  }

  if (auto hit = first_hit(config.absolutes, false); !hit.empty()) fire(RuleId::R14, hit);
  if (auto hit = first_hit(config.instructional, false); !hit.empty()) fire(RuleId::R15, hit);

  d.accepted = d.fired_rules.empty();
  return d;
}

ParagraphDecision accept_paragraph(const Paragraph& paragraph, const FilterConfig& config) {
  ParagraphDecision pd;
  pd.n_total = paragraph.sentences.size();
  for (const Sentence& s : paragraph.sentences) {
    pd.decisions.push_back(classify_sentence(s, config));
    if (pd.decisions.back().accepted) ++pd.n_accepted;
  }
  pd.accepted = pd.n_accepted >= config.min_accepted_sentences;
  return pd;
}

FilterResult filter_corpus(const std::vector<Paragraph>& paragraphs, const FilterConfig& config) {
  FilterResult result;
  for (const Paragraph& p : paragraphs) {
    const ParagraphDecision pd = accept_paragraph(p, config);
    ++result.report.n_paragraphs;
    result.report.n_sentences += pd.n_total;
    result.report.n_sentences_accepted += pd.n_accepted;
    for (const auto& d : pd.decisions) {
      for (const auto& f : d.fired_rules) ++result.report.rule_counts[rule_index(f.rule)];
    }
    if (pd.accepted) {
      ++result.report.n_paragraphs_accepted;
      result.accepted.push_back(p);
    }
  }
  return result;
}

std::string format_filter_report(const FilterReport& report) {
  std::ostringstream os;
  os << "# paragraphs\t" << report.n_paragraphs << '\n'
     << "# paragraphs_accepted\t" << report.n_paragraphs_accepted << '\n'
     << "# sentences\t" << report.n_sentences << '\n'
     << "# sentences_accepted\t" << report.n_sentences_accepted << '\n'
     << "rule\tcount\n";
  for (RuleId id : all_rules()) {
    os << to_string(id) << '\t' << report.rule_counts[rule_index(id)] << '\n';
  }
  return os.str();
}

void write_filter_report(const std::filesystem::path& path, const FilterReport& report) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << format_filter_report(report);
  if (!out) throw LoadError("cannot write filter report: " + path.string());
}

}  // namespace mcqforge
