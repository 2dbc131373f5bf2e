#include "mcqforge/corpus.hpp"

#include <array>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "mcqforge/error.hpp"
#include "mcqforge/pos_tagger.hpp"

namespace mcqforge {

namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 12> kTagNames = {
    "NONE", "NOUN", "VERB", "MODAL", "ADJ", "ADV", "PRON", "DET", "NUM", "PUNCT", "SYM", "OTHER"};

bool is_word_byte(char c) {
  return is_ascii_alpha(c) || is_ascii_digit(c) || static_cast<unsigned char>(c) >= 0x80;
}

bool is_closing_mark(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

}  // namespace

std::string_view to_string(PosTag tag) { return kTagNames[static_cast<std::size_t>(tag)]; }

std::optional<PosTag> parse_pos_tag(std::string_view name) {
  for (std::size_t i = 0; i < kTagNames.size(); ++i) {
    if (kTagNames[i] == name) return static_cast<PosTag>(i);
  }
  return std::nullopt;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (is_ascii_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    if (is_word_byte(text[i])) {
      while (j < n) {
        const char c = text[j];
        if (is_word_byte(c)) {
          ++j;
          continue;
        }
        const bool has_next = j + 1 < n;
        if ((c == '\'' || c == '-') && j > i && has_next && is_word_byte(text[j + 1]) &&
            is_word_byte(text[j - 1])) {
          ++j;
          continue;
        }
        if ((c == '.' || c == ',') && j > i && has_next && is_ascii_digit(text[j - 1]) &&
            is_ascii_digit(text[j + 1])) {
          ++j;
          continue;
        }
        break;
      }
    } else {
      j = i + 1;
    }
    Token tok;
    tok.surface = std::string(text.substr(i, j - i));
    tok.lower = casefold(tok.surface);
    tok.is_capitalized = is_ascii_upper(tok.surface.front());
    tok.char_span = {i, j};
    tokens.push_back(std::move(tok));
    i = j;
  }
  return tokens;
}

const Lexicon& default_abbreviations() {
  static const Lexicon lex = [] {
    const auto path = default_data_dir() / "lexicons" / "abbreviations.txt";
    return Lexicon::load(path);
  }();
  return lex;
}

std::vector<std::string> split_sentences(std::string_view text) {
  return split_sentences(text, default_abbreviations());
}

std::vector<std::string> split_sentences(std::string_view text, const Lexicon& abbreviations) {
  std::vector<std::string> out;
  const std::size_t n = text.size();
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    const std::string_view s = trim(text.substr(start, end - start));
    if (!s.empty()) out.emplace_back(s);
    start = end;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t end = i + 1;
    while (end < n && (text[end] == '.' || text[end] == '!' || text[end] == '?')) ++end;
    while (end < n && is_closing_mark(text[end])) ++end;
    if (end >= n || !is_ascii_space(text[end])) {
      i = end - 1;
      continue;
    }
    std::size_t k = end;
    while (k < n && is_ascii_space(text[k])) ++k;
    if (k < n && (text[k] == '"' || text[k] == '\'' || text[k] == '(')) ++k;
    if (k >= n || !(is_ascii_upper(text[k]) || is_ascii_digit(text[k]))) {
      i = end - 1;
      continue;
    }
    if (c == '.' && end == i + 1) {
      std::size_t w = i;
      while (w > start && !is_ascii_space(text[w - 1])) --w;
      const std::string word = casefold(text.substr(w, i + 1 - w));
      if (abbreviations.contains(word)) {
        i = end - 1;
        continue;
      }
    }
    emit(end);
    i = end - 1;
  }
  emit(n);
  return out;
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  for (const Token& t : tokenize(text)) {
    if (is_word_byte(t.surface.front())) ++count;
  }
  return count;
}

Sentence make_sentence(std::string_view text, const PosTagger& tagger) {
  Sentence s;
  s.text = std::string(text);
  s.tokens = tokenize(text);
  if (!s.tokens.empty()) tagger.tag(s.tokens);
  return s;
}

std::vector<Paragraph> ingest_book(std::string_view text, const ManifestEntry& entry,
                                   const PosTagger& tagger, const Lexicon& abbreviations) {
  if (const auto bad = find_invalid_utf8(text)) {
    throw IngestError("book '" + entry.book_id + "': invalid UTF-8 at byte offset " +
                          std::to_string(*bad),
                      *bad);
  }
  std::vector<Paragraph> paragraphs;
  std::string block;
  auto flush = [&] {
    std::string normalized = collapse_whitespace(block);
    block.clear();
    if (normalized.empty()) return;
    Paragraph p;
    p.id = entry.book_id + ":p" + std::to_string(paragraphs.size());
    p.book_id = entry.book_id;
    p.exportable = entry.exportable;
    p.text = std::move(normalized);
    const auto sentence_texts = split_sentences(p.text, abbreviations);
    for (std::size_t i = 0; i < sentence_texts.size(); ++i) {
      Sentence s = make_sentence(sentence_texts[i], tagger);
      s.id = p.id + ":s" + std::to_string(i);
      s.paragraph_id = p.id;
      s.index_in_paragraph = i;
      p.sentences.push_back(std::move(s));
    }
    paragraphs.push_back(std::move(p));
  };
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    if (trim(line).empty()) {
      flush();
    } else {
      block.append(line);
      block.push_back('\n');
    }
    pos = eol + 1;
  }
  flush();
  return paragraphs;
}

CorpusManifest CorpusManifest::load(const std::filesystem::path& path) {
  CorpusManifest manifest;
  std::unordered_set<std::string> seen;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    if (fields.size() != 4) throw LoadError(where + ": expected 4 tab-separated fields");
    if (fields[3] != "0" && fields[3] != "1") {
      throw LoadError(where + ": exportable flag must be 0 or 1");
    }
    ManifestEntry e;
    e.book_id = fields[0];
    e.title = fields[1];
    e.source = fields[2];
    if (e.source.is_relative()) e.source = path.parent_path() / e.source;
    e.exportable = fields[3] == "1";
    if (e.book_id.empty()) throw LoadError(where + ": empty book_id");
    if (!seen.insert(e.book_id).second) {
      throw LoadError(where + ": duplicate book_id '" + e.book_id + "'");
    }
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

void write_paragraph_store(const std::filesystem::path& path,
                           const std::vector<Paragraph>& paragraphs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write paragraph store: " + path.string());
  for (const Paragraph& p : paragraphs) {
    json jp;
    jp["id"] = p.id;
    jp["book_id"] = p.book_id;
    jp["text"] = p.text;
    jp["exportable"] = p.exportable;
    jp["used"] = p.used;
    json sentences = json::array();
    for (const Sentence& s : p.sentences) {
      json tokens = json::array();
      for (const Token& t : s.tokens) {
        tokens.push_back(json::array({t.surface, to_string(t.pos), t.char_span.start,
                                      t.char_span.end, t.demonstrative}));
      }
      sentences.push_back({{"id", s.id},
                           {"text", s.text},
                           {"index", s.index_in_paragraph},
                           {"tokens", std::move(tokens)}});
    }
    jp["sentences"] = std::move(sentences);
    out << jp.dump() << '\n';
  }
  if (!out) throw LoadError("cannot write paragraph store: " + path.string());
}

std::vector<Paragraph> read_paragraph_store(const std::filesystem::path& path) {
  std::vector<Paragraph> paragraphs;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    try {
      const json jp = json::parse(lines[i]);
      Paragraph p;
      p.id = jp.at("id").get<std::string>();
      p.book_id = jp.at("book_id").get<std::string>();
      p.text = jp.at("text").get<std::string>();
      p.exportable = jp.at("exportable").get<bool>();
      p.used = jp.value("used", false);
      for (const json& js : jp.at("sentences")) {
        Sentence s;
        s.id = js.at("id").get<std::string>();
        s.text = js.at("text").get<std::string>();
        s.index_in_paragraph = js.at("index").get<std::size_t>();
        s.paragraph_id = p.id;
        for (const json& jt : js.at("tokens")) {
          Token t;
          t.surface = jt.at(0).get<std::string>();
          t.lower = casefold(t.surface);
          const auto tag = parse_pos_tag(jt.at(1).get<std::string>());
          if (!tag) throw LoadError("unknown POS tag");
          t.pos = *tag;
          t.char_span = {jt.at(2).get<std::size_t>(), jt.at(3).get<std::size_t>()};
          t.demonstrative = jt.size() > 4 && jt.at(4).get<bool>();
          t.is_capitalized = !t.surface.empty() && is_ascii_upper(t.surface.front());
          s.tokens.push_back(std::move(t));
        }
        p.sentences.push_back(std::move(s));
      }
      paragraphs.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw LoadError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    } catch (const LoadError& e) {
      throw LoadError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return paragraphs;
}

}  // namespace mcqforge
