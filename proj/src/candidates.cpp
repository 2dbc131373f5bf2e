#include "mcqforge/candidates.hpp"

#include <array>
#include <fstream>
#include <unordered_set>

#include "mcqforge/corpus.hpp"
#include "mcqforge/error.hpp"
#include "mcqforge/pos_tagger.hpp"
#include "mcqforge/text.hpp"

namespace mcqforge {

namespace {

constexpr std::array<std::string_view, 5> kSourceNames = {
    "embedding_vocab", "observed_distractor", "kb_noun_phrase", "school_vocab", "substitution"};

constexpr std::string_view kUniverseHeader = "#mcqforge-universe v1";

std::vector<std::string> word_tokens(std::string_view surface) {
  std::vector<std::string> out;
  for (const Token& t : tokenize(surface)) out.push_back(t.lower);
  return out;
}

}  // namespace

std::string_view to_string(CandidateSource s) { return kSourceNames[static_cast<std::size_t>(s)]; }

std::optional<CandidateSource> parse_candidate_source(std::string_view name) {
  for (std::size_t i = 0; i < kSourceNames.size(); ++i) {
    if (kSourceNames[i] == name) return static_cast<CandidateSource>(i);
  }
  return std::nullopt;
}

std::vector<CandidateSource> CandidateEntry::source_list() const {
  std::vector<CandidateSource> out;
  for (std::size_t i = 0; i < kSourceNames.size(); ++i) {
    if (has(static_cast<CandidateSource>(i))) out.push_back(static_cast<CandidateSource>(i));
  }
  return out;
}

VocabularySource load_vocabulary(const std::filesystem::path& path, CandidateSource source) {
  VocabularySource v{source, {}};
  for (const std::string& line : read_lines(path)) {
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (source == CandidateSource::EmbeddingVocab) {
      v.expressions.emplace_back(t.substr(0, t.find_first_of(" \t")));
    } else {
      v.expressions.emplace_back(t);
    }
  }
  return v;
}

bool CandidateUniverse::add(std::string_view expression, CandidateSource source) {
  std::string surface = normalize_expression(expression);
  if (surface.empty()) return false;
  const auto bit = static_cast<std::uint8_t>(1U << static_cast<unsigned>(source));
  if (auto it = by_surface_.find(surface); it != by_surface_.end()) {
    entries_[it->second].sources |= bit;
    return true;
  }
  CandidateEntry e;
  e.tokens = word_tokens(surface);
  e.surface = std::move(surface);
  e.sources = bit;
  const std::size_t idx = entries_.size();
  by_surface_.emplace(e.surface, idx);
  std::unordered_set<std::string> seen;
  for (const std::string& tok : e.tokens) {
    if (seen.insert(tok).second) unigram_index_[tok].push_back(idx);
  }
  entries_.push_back(std::move(e));
  return true;
}

const CandidateEntry* CandidateUniverse::find(std::string_view expression) const {
  auto it = by_surface_.find(normalize_expression(expression));
  return it == by_surface_.end() ? nullptr : &entries_[it->second];
}

const std::vector<std::size_t>& CandidateUniverse::containing(std::string_view token) const {
  static const std::vector<std::size_t> kEmpty;
  auto it = unigram_index_.find(casefold(token));
  return it == unigram_index_.end() ? kEmpty : it->second;
}

void CandidateUniverse::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write universe: " + path.string());
  out << kUniverseHeader << '\n';
  for (const CandidateEntry& e : entries_) {
    out << e.surface << '\t';
    bool first = true;
    for (CandidateSource s : e.source_list()) {
      if (!first) out << ',';
      out << to_string(s);
      first = false;
    }
    out << '\n';
  }
  if (!out) throw LoadError("cannot write universe: " + path.string());
}

CandidateUniverse CandidateUniverse::load(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines.front() != kUniverseHeader) {
    throw LoadError(path.string() + ": not a universe file (missing '" +
                    std::string(kUniverseHeader) + "' header)");
  }
  CandidateUniverse u;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto tab = lines[i].find('\t');
    if (tab == std::string::npos) {
      throw LoadError(path.string() + ":" + std::to_string(i + 1) + ": expected surface<TAB>sources");
    }
    const std::string surface = lines[i].substr(0, tab);
    for (const std::string& name : split(std::string_view(lines[i]).substr(tab + 1), ',')) {
      const auto s = parse_candidate_source(name);
      if (!s) {
        throw LoadError(path.string() + ":" + std::to_string(i + 1) + ": unknown source '" +
                        name + "'");
      }
      u.add(surface, *s);
    }
  }
  return u;
}

CandidateUniverse build_universe(const std::vector<VocabularySource>& sources) {
  if (sources.empty()) throw ContractViolation("build_universe needs at least one source");
  CandidateUniverse u;
  for (const VocabularySource& src : sources) {
    for (const std::string& e : src.expressions) u.add(e, src.source);
  }
  return u;
}

std::vector<std::string> substitution_vocabulary(const CandidateUniverse& universe,
                                                 const PosTagger& tagger) {
  std::vector<std::string> out;
  for (const CandidateEntry& e : universe.entries()) {
    if (e.tokens.size() != 1) continue;
    if (!e.has(CandidateSource::SchoolVocab) && !e.has(CandidateSource::ObservedDistractor)) {
      continue;
    }
    if (!is_ascii_alpha(e.surface.front())) continue;
    const auto tags = tagger.lexicon_tags(e.surface);
    if (tags.empty() || tags.front() == PosTag::Noun) out.push_back(e.surface);
  }
  return out;
}

std::vector<std::string> expand_multiword(std::string_view a_star,
                                          const std::vector<std::string>& substitution_vocab,
                                          std::size_t cap) {
  std::vector<std::string> out;
  const std::vector<std::string> words = word_tokens(normalize_expression(a_star));
  if (words.size() < 2) return out;
  const std::string target = join(words, " ");
  std::unordered_set<std::string> seen{target};
  for (std::size_t pos = 0; pos < words.size(); ++pos) {
    for (const std::string& sub : substitution_vocab) {
      if (out.size() >= cap) return out;
      std::vector<std::string> w = words;
      w[pos] = normalize_expression(sub);
      if (w[pos].empty()) continue;
      std::string candidate = join(w, " ");
      if (seen.insert(candidate).second) out.push_back(std::move(candidate));
    }
  }
  return out;
}

}  // namespace mcqforge
