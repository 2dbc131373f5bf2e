#include "mcqforge/pos_tagger.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include "mcqforge/error.hpp"

namespace mcqforge {

namespace {

using WordSet = std::unordered_set<std::string_view>;

const WordSet kModals = {"can",    "could",   "may",      "might",   "must",     "shall",
                         "should", "will",    "would",    "ought",   "cannot",   "can't",
                         "won't",  "couldn't", "wouldn't", "shouldn't", "mustn't", "mightn't"};

const WordSet kPronouns = {
    "i",        "me",       "you",       "he",         "him",     "she",      "it",
    "we",       "us",       "they",      "them",       "myself",  "yourself", "himself",
    "herself",  "itself",   "ourselves", "yourselves", "themselves", "mine",  "yours",
    "hers",     "ours",     "theirs",    "someone",    "anyone",  "everyone", "nobody",
    "somebody", "anybody",  "everybody", "something",  "anything", "everything", "nothing"};

const WordSet kDeterminers = {"a",    "an",      "the",     "each",    "every",  "some",
                              "any",  "no",      "all",     "both",    "either", "neither",
                              "another", "my",   "your",    "his",     "her",    "its",
                              "our",  "their",   "several", "many",    "few",    "much",
                              "more", "most",    "less",    "enough",  "such",   "other"};

const WordSet kDemonstratives = {"this", "these", "those", "that"};

const WordSet kAuxiliaries = {"be",   "am",     "is",   "are",  "was",  "were", "been",
                              "being", "have",  "has",  "had",  "having", "do", "does",
                              "did",  "isn't",  "aren't", "wasn't", "weren't", "don't",
                              "doesn't", "didn't", "hasn't", "haven't", "hadn't"};

const WordSet kInflectedAuxiliaries = {"am",  "is",   "are",    "was",   "were",  "been",
                                       "being", "has", "had",   "having", "does", "did",
                                       "isn't", "aren't", "wasn't", "weren't", "doesn't",
                                       "didn't", "hasn't", "hadn't"};

const WordSet kFunctionWords = {
    "of",      "in",     "on",      "at",       "by",      "for",     "with",   "from",
    "to",      "into",   "onto",    "upon",     "over",    "under",   "about",  "above",
    "below",   "between", "among",  "amongst",  "through", "throughout", "during", "before",
    "after",   "since",  "until",   "till",     "against", "without", "within", "along",
    "across",  "around", "behind",  "beyond",   "near",    "toward",  "towards", "beneath",
    "besides", "except", "inside",  "outside",  "via",     "per",     "and",    "or",
    "but",     "nor",    "yet",     "so",       "if",      "because", "although", "though",
    "while",   "whereas", "unless", "than",     "as",      "whether", "what",   "which",
    "who",     "whom",   "whose",   "where",    "when",    "why",     "how",    "whatever",
    "whichever", "whoever", "whenever", "wherever", "that", "off",   "up",     "down",
    "out",     "like"};

const WordSet kClosedAdverbs = {"not",  "n't",    "very",   "also",    "too",    "there",
                                "here", "then",   "now",    "often",   "always", "never",
                                "sometimes", "usually", "just", "only", "even", "still",
                                "already", "again", "almost", "quite", "ever", "rather",
                                "however", "therefore", "thus", "hence", "instead"};

const WordSet kNumberWords = {"zero",     "one",     "two",       "three",    "four",
                              "five",     "six",     "seven",     "eight",    "nine",
                              "ten",      "eleven",  "twelve",    "thirteen", "fourteen",
                              "fifteen",  "sixteen", "seventeen", "eighteen", "nineteen",
                              "twenty",   "thirty",  "forty",     "fifty",    "sixty",
                              "seventy",  "eighty",  "ninety",    "hundred",  "thousand",
                              "million",  "billion", "dozen"};

// Tokens right after a sentence-initial verb that signal an imperative.
const WordSet kImperativeObjects = {"the",  "a",     "an",    "your", "this",  "these",
                                    "those", "some", "all",   "each", "it",    "them",
                                    "its",  "their", "his",   "her",  "our",   "my",
                                    "any",  "up",    "out",   "at",   "down",  "off",
                                    "two",  "three", "one",   "how",  "what",  "whether"};

constexpr std::string_view kPunctChars = ".,;:!?()[]{}'\"`-";

enum class Form { Base, S, Ed, Ing, Derived, Unknown };

struct Analysis {
  std::vector<PosTag> tags;
  Form form = Form::Unknown;
};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool contains_tag(const std::vector<PosTag>& tags, PosTag t) {
  return std::find(tags.begin(), tags.end(), t) != tags.end();
}

std::vector<PosTag> only(const std::vector<PosTag>& tags, std::initializer_list<PosTag> keep) {
  std::vector<PosTag> out;
  for (PosTag t : tags) {
    if (std::find(keep.begin(), keep.end(), t) != keep.end()) out.push_back(t);
  }
  return out;
}

bool is_number(std::string_view s) {
  bool digit = false;
  for (char c : s) {
    if (is_ascii_digit(c)) {
      digit = true;
    } else if (c != '.' && c != ',') {
      return false;
    }
  }
  return digit;
}

PosTag suffix_guess(std::string_view w) {
  static constexpr std::array<std::string_view, 16> noun_suffixes = {
      "tion", "sion", "ness", "ment", "ity", "ism", "ist", "ogy",
      "ance", "ence", "ship", "hood", "ure", "cyte", "ide", "ium"};
  static constexpr std::array<std::string_view, 10> adj_suffixes = {
      "ous", "ful", "less", "ive", "able", "ible", "al", "ic", "ary", "ish"};
  static constexpr std::array<std::string_view, 3> verb_suffixes = {"ize", "ise", "ify"};
  if (ends_with(w, "ly") && w.size() > 4) return PosTag::Adv;
  for (auto s : noun_suffixes) {
    if (ends_with(w, s) && w.size() > s.size() + 2) return PosTag::Noun;
  }
  for (auto s : adj_suffixes) {
    if (ends_with(w, s) && w.size() > s.size() + 2) return PosTag::Adj;
  }
  for (auto s : verb_suffixes) {
    if (ends_with(w, s) && w.size() > s.size() + 2) return PosTag::Verb;
  }
  if ((ends_with(w, "ed") || ends_with(w, "ing")) && w.size() > 5) return PosTag::Verb;
  return PosTag::Noun;
}

}  // namespace

PosTagger::PosTagger() = default;

PosTagger PosTagger::load(const std::filesystem::path& lexicon_path) {
  PosTagger tagger;
  const auto lines = read_lines(lexicon_path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2) {
      throw LoadError(lexicon_path.string() + ":" + std::to_string(i + 1) +
                      ": expected word<TAB>tags");
    }
    std::vector<PosTag> tags;
    for (const auto& name : split(fields[1], ',')) {
      const auto tag = parse_pos_tag(name);
      if (!tag || *tag == PosTag::None) {
        throw LoadError(lexicon_path.string() + ":" + std::to_string(i + 1) +
                        ": unknown tag '" + name + "'");
      }
      tags.push_back(*tag);
    }
    tagger.add_entry(fields[0], std::move(tags));
  }
  return tagger;
}

const PosTagger& PosTagger::shared() {
  static const PosTagger tagger =
      PosTagger::load(default_data_dir() / "lexicons" / "pos_open_class.tsv");
  return tagger;
}

void PosTagger::add_entry(std::string_view word, std::vector<PosTag> tags) {
  lexicon_[casefold(word)] = std::move(tags);
}

std::vector<PosTag> PosTagger::lexicon_tags(std::string_view lower) const {
  if (auto it = lexicon_.find(std::string(lower)); it != lexicon_.end()) return it->second;
  auto lookup = [&](std::string_view stem) -> const std::vector<PosTag>* {
    if (stem.size() < 2) return nullptr;
    auto it = lexicon_.find(std::string(stem));
    return it == lexicon_.end() ? nullptr : &it->second;
  };
  const std::string w(lower);
  if (ends_with(w, "ies")) {
    if (auto* t = lookup(w.substr(0, w.size() - 3) + "y")) {
      return only(*t, {PosTag::Noun, PosTag::Verb});
    }
  }
  if (ends_with(w, "es")) {
    if (auto* t = lookup(w.substr(0, w.size() - 2))) {
      auto r = only(*t, {PosTag::Noun, PosTag::Verb});
      if (!r.empty()) return r;
    }
  }
  if (ends_with(w, "s") && !ends_with(w, "ss")) {
    if (auto* t = lookup(w.substr(0, w.size() - 1))) {
      auto r = only(*t, {PosTag::Noun, PosTag::Verb});
      if (!r.empty()) return r;
    }
  }
  auto verb_stem = [&](std::size_t cut) -> bool {
    const std::string stem = w.substr(0, w.size() - cut);
    for (const std::string& cand :
         {stem, stem + "e",
          stem.size() > 2 && stem[stem.size() - 1] == stem[stem.size() - 2]
              ? stem.substr(0, stem.size() - 1)
              : std::string()}) {
      if (cand.empty()) continue;
      if (auto* t = lookup(cand); t && contains_tag(*t, PosTag::Verb)) return true;
    }
    return false;
  };
  if (ends_with(w, "ied")) {
    if (auto* t = lookup(w.substr(0, w.size() - 3) + "y"); t && contains_tag(*t, PosTag::Verb)) {
      return {PosTag::Verb};
    }
  }
  if (ends_with(w, "ed") && verb_stem(2)) return {PosTag::Verb};
  if (ends_with(w, "ed") && w.size() > 3) {
    if (auto* t = lookup(w.substr(0, w.size() - 1)); t && contains_tag(*t, PosTag::Verb)) {
      return {PosTag::Verb};
    }
  }
  if (ends_with(w, "ing") && verb_stem(3)) return {PosTag::Verb};
  if (ends_with(w, "ly")) {
    if (auto* t = lookup(w.substr(0, w.size() - 2)); t && contains_tag(*t, PosTag::Adj)) {
      return {PosTag::Adv};
    }
  }
  for (std::string_view suf : {"er", "est"}) {
    if (ends_with(w, suf)) {
      const std::string stem = w.substr(0, w.size() - suf.size());
      for (const std::string& cand : {stem, stem + "e"}) {
        if (auto* t = lookup(cand); t && contains_tag(*t, PosTag::Adj)) return {PosTag::Adj};
      }
    }
  }
  return {};
}

bool PosTagger::participle_of_verb(std::string_view lower) const {
  auto is_verb = [&](const std::string& stem) {
    if (stem.size() < 2) return false;
    auto it = lexicon_.find(stem);
    return it != lexicon_.end() && contains_tag(it->second, PosTag::Verb);
  };
  const std::string w(lower);
  const std::size_t cut = ends_with(w, "ed") ? 2 : ends_with(w, "ing") ? 3 : 0;
  if (cut == 0 || w.size() <= cut + 1) return false;
  const std::string stem = w.substr(0, w.size() - cut);
  if (is_verb(stem) || is_verb(stem + "e")) return true;
  if (cut == 2 && ends_with(w, "ied") && is_verb(w.substr(0, w.size() - 3) + "y")) return true;
  return stem.size() > 2 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
         is_verb(stem.substr(0, stem.size() - 1));
}

bool PosTagger::is_base_verb(std::string_view lower) const {
  if (kInflectedAuxiliaries.count(lower)) return false;
  if (kAuxiliaries.count(lower)) return true;
  auto it = lexicon_.find(std::string(lower));
  return it != lexicon_.end() && contains_tag(it->second, PosTag::Verb);
}

void PosTagger::tag(std::span<Token> tokens) const {
  bool verb_seen = false;
  PosTag prev = PosTag::None;
  PosTag prev_content = PosTag::None;
  std::string_view prev_lower;
  bool at_start = true;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    Token& tok = tokens[i];
    const std::string& w = tok.lower;
    const Token* next = i + 1 < tokens.size() ? &tokens[i + 1] : nullptr;
    tok.demonstrative = kDemonstratives.count(w) > 0;

    PosTag chosen = PosTag::Noun;
    const unsigned char first = static_cast<unsigned char>(w.front());
    const bool word_like = is_ascii_alpha(w.front()) || is_ascii_digit(w.front()) || first >= 0x80;

    if (!word_like) {
      chosen = (w.size() == 1 && kPunctChars.find(w.front()) != std::string_view::npos)
                   ? PosTag::Punct
                   : PosTag::Sym;
    } else if (is_number(w) || kNumberWords.count(w)) {
      chosen = PosTag::Num;
    } else if (kModals.count(w)) {
      chosen = PosTag::Modal;
    } else if (kAuxiliaries.count(w)) {
      chosen = PosTag::Verb;
    } else if (w == "this" || w == "these" || w == "those") {
      const bool followed_by_word =
          next && is_ascii_alpha(next->lower.front()) && !kAuxiliaries.count(next->lower) &&
          !kModals.count(next->lower) && !kFunctionWords.count(next->lower);
      chosen = followed_by_word ? PosTag::Det : PosTag::Pron;
    } else if (kPronouns.count(w)) {
      chosen = PosTag::Pron;
    } else if (kDeterminers.count(w)) {
      chosen = PosTag::Det;
    } else if (kFunctionWords.count(w)) {
      chosen = PosTag::Other;
    } else if (kClosedAdverbs.count(w)) {
      chosen = PosTag::Adv;
    } else if (has_digit(w)) {
      chosen = PosTag::Noun;
    } else {
      Analysis a;
      if (auto it = lexicon_.find(w); it != lexicon_.end()) {
        a.tags = it->second;
        a.form = Form::Base;
        // Participles listed only as adjectives ("measured") are still verb forms.
        if ((ends_with(w, "ed") || ends_with(w, "ing")) && participle_of_verb(w)) {
          if (!contains_tag(a.tags, PosTag::Verb)) a.tags.push_back(PosTag::Verb);
          a.form = ends_with(w, "ed") ? Form::Ed : Form::Ing;
        }
      } else {
        a.tags = lexicon_tags(w);
        if (!a.tags.empty()) {
          if (ends_with(w, "ed") || ends_with(w, "ied")) a.form = Form::Ed;
          else if (ends_with(w, "ing")) a.form = Form::Ing;
          else if (ends_with(w, "s")) a.form = Form::S;
          else a.form = Form::Derived;
        }
      }
      if (a.tags.empty()) {
        chosen = (tok.is_capitalized && !at_start) ? PosTag::Noun : suffix_guess(w);
      } else if (a.tags.size() == 1) {
        chosen = a.tags.front();
      } else {
        const bool has_noun = contains_tag(a.tags, PosTag::Noun);
        const bool has_verb = contains_tag(a.tags, PosTag::Verb);
        const bool has_adj = contains_tag(a.tags, PosTag::Adj);
        const PosTag primary = a.tags.front();
        auto next_is_nounish = [&] {
          if (!next || !is_ascii_alpha(next->lower.front())) return false;
          if (kFunctionWords.count(next->lower) || kAuxiliaries.count(next->lower) ||
              kModals.count(next->lower) || kDeterminers.count(next->lower)) {
            return false;
          }
          const auto nt = lexicon_tags(next->lower);
          if (nt.empty()) return false;
          return nt.front() == PosTag::Noun ||
                 (contains_tag(nt, PosTag::Noun) && ends_with(next->lower, "s"));
        };
        auto next_is_adj = [&] {
          if (!next || kClosedAdverbs.count(next->lower)) return false;
          const auto nt = lexicon_tags(next->lower);
          return !nt.empty() && nt.front() == PosTag::Adj;
        };
        chosen = primary;
        // An adverb is transparent: "should never trust" decides on "should".
        const PosTag ctx = prev == PosTag::Adv && prev_content != PosTag::None ? prev_content : prev;
        if (at_start) {
          if (has_verb && a.form == Form::Base && next && kImperativeObjects.count(next->lower)) {
            chosen = PosTag::Verb;
          } else if (has_adj && a.tags.size() > 1 &&
                     (a.tags[0] == PosTag::Adj || a.tags[1] == PosTag::Adj) && next_is_nounish()) {
            chosen = PosTag::Adj;
          } else if (has_noun) {
            chosen = PosTag::Noun;
          } else if (has_adj) {
            chosen = PosTag::Adj;
          }
        } else if (prev == PosTag::Adv && contains_tag(a.tags, PosTag::Adv)) {
          chosen = PosTag::Adv;
        } else if ((prev_lower == "and" || prev_lower == "or") && has_verb && verb_seen && next &&
                   (kDeterminers.count(next->lower) || kPronouns.count(next->lower) ||
                    kDemonstratives.count(next->lower) || next_is_adj())) {
          chosen = PosTag::Verb;
        } else if (ctx == PosTag::Det || ctx == PosTag::Adj || ctx == PosTag::Num ||
                   ctx == PosTag::Other) {
          if (ends_with(w, "ing") && ctx == PosTag::Det && next_is_nounish()) {
            chosen = PosTag::Adj;
          } else if (a.form == Form::Ed && ctx == PosTag::Adj && has_verb && !verb_seen) {
            chosen = PosTag::Verb;
          } else if (has_adj && (primary == PosTag::Adj || !has_noun) && next_is_nounish()) {
            chosen = PosTag::Adj;
          } else if (prev_lower == "to" && has_verb) {
            chosen = PosTag::Verb;
          } else if (has_noun) {
            chosen = PosTag::Noun;
          } else if (has_adj) {
            chosen = PosTag::Adj;
          }
        } else if (ctx == PosTag::Pron || ctx == PosTag::Modal) {
          if (has_verb) chosen = PosTag::Verb;
        } else if (prev == PosTag::Adv && has_verb && !verb_seen) {
          chosen = PosTag::Verb;
        } else if (ctx == PosTag::Noun) {
          // "where magma rises": a subordinator two tokens back opens a new clause.
          const bool clause_opened =
              i >= 2 && tokens[i - 2].pos == PosTag::Other && a.form == Form::S;
          const bool plural_subject = ends_with(prev_lower, "s") && !ends_with(prev_lower, "ss");
          if (has_verb && (!verb_seen || clause_opened) &&
              (a.form == Form::S || a.form == Form::Ed ||
               (a.form == Form::Base && plural_subject))) {
            chosen = PosTag::Verb;
          } else if (has_noun) {
            chosen = PosTag::Noun;
          }
        } else if (ctx == PosTag::Verb) {
          if (a.form == Form::Ed || a.form == Form::Ing) {
            chosen = PosTag::Verb;
          } else if (has_adj && (primary == PosTag::Adj || next_is_nounish())) {
            chosen = PosTag::Adj;
          } else if (has_noun) {
            chosen = PosTag::Noun;
          }
        }
      }
    }

    tok.pos = chosen;
    if (chosen == PosTag::Verb || chosen == PosTag::Modal) verb_seen = true;
    if (chosen == PosTag::Punct) {
      // clause boundary: the next word behaves like a clause start for agreement, but
      // not for the imperative check, which only looks at the sentence start
      if (w == "," || w == ";" || w == ":") verb_seen = false;
      prev = PosTag::Punct;
      prev_lower = w;
      continue;
    }
    prev = chosen;
    if (chosen != PosTag::Adv) prev_content = chosen;
    prev_lower = w;
    at_start = false;
  }
}

}  // namespace mcqforge
