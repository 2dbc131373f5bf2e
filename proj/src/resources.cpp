#include "mcqforge/resources.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "mcqforge/corpus.hpp"
#include "mcqforge/error.hpp"

namespace mcqforge {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

}  // namespace

void EmbeddingTable::set(std::string_view token, std::span<const float> vector) {
  if (vector.size() != dim_) {
    throw ContractViolation("embedding of size " + std::to_string(vector.size()) +
                            " in a table of dimension " + std::to_string(dim_));
  }
  const std::string key = casefold(token);
  auto [it, inserted] = index_.try_emplace(key, data_.size() / std::max<std::size_t>(dim_, 1));
  if (inserted) {
    data_.insert(data_.end(), vector.begin(), vector.end());
  } else {
    std::copy(vector.begin(), vector.end(), data_.begin() + it->second * dim_);
  }
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  EmbeddingTable table;
  std::vector<float> row;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const std::size_t sp = line.find(' ');
    if (sp == std::string_view::npos || sp == 0) {
      throw LoadError(where(path, line_no) + ": expected 'token v1 ... vd'");
    }
    const std::string_view token = line.substr(0, sp);
    row.clear();
    const char* p = line.data() + sp + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      float v = 0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc() || (next != end && *next != ' ')) {
        throw LoadError(where(path, line_no) + ": non-numeric field in vector of '" +
                        std::string(token) + "'");
      }
      row.push_back(v);
      p = next == end ? end : next + 1;
    }
    if (table.dim_ == 0) {
      if (row.empty()) throw LoadError(where(path, line_no) + ": empty vector");
      table.dim_ = row.size();
      table.zero_.assign(table.dim_, 0.0F);
    } else if (row.size() != table.dim_) {
      throw LoadError(where(path, line_no) + ": dimension " + std::to_string(row.size()) +
                      ", expected " + std::to_string(table.dim_));
    }
    if (table.contains(token)) {
      table.warnings_.push_back(where(path, line_no) + ": duplicate token '" +
                                std::string(token) + "', keeping the later vector");
    }
    table.set(token, row);
  }
  return table;
}

bool EmbeddingTable::contains(std::string_view token) const {
  return index_.count(casefold(token)) > 0;
}

std::span<const float> EmbeddingTable::lookup(std::string_view token) const {
  auto it = index_.find(casefold(token));
  if (it == index_.end()) {
    if (zero_.size() != dim_) return {};
    return zero_;
  }
  return {data_.data() + it->second * dim_, dim_};
}

void Taxonomy::add_edge(std::string_view hyponym, std::string_view hypernym) {
  const std::string a = casefold(trim(hyponym));
  const std::string b = casefold(trim(hypernym));
  if (a.empty() || b.empty() || a == b) return;
  auto& ups = up_[a];
  if (std::find(ups.begin(), ups.end(), b) != ups.end()) return;
  ups.push_back(b);
  hypernym_vocab_.insert(b);
  ++edges_;
}

void Taxonomy::drop_two_cycles() {
  std::set<std::pair<std::string, std::string>> doomed;
  for (const auto& [a, ups] : up_) {
    for (const std::string& b : ups) {
      const auto& back = hypernyms(b);
      if (std::find(back.begin(), back.end(), a) != back.end()) doomed.emplace(a, b);
    }
  }
  if (doomed.empty()) return;
  for (const auto& [a, b] : doomed) {
    auto& ups = up_[a];
    ups.erase(std::remove(ups.begin(), ups.end(), b), ups.end());
    --edges_;
  }
  hypernym_vocab_.clear();
  for (const auto& [a, ups] : up_) hypernym_vocab_.insert(ups.begin(), ups.end());
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
  Taxonomy t;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto f = split(line, '\t');
    if (f.size() != 2) throw LoadError(where(path, i + 1) + ": expected hyponym<TAB>hypernym");
    t.add_edge(f[0], f[1]);
  }
  t.drop_two_cycles();
  return t;
}

const std::vector<std::string>& Taxonomy::hypernyms(std::string_view token) const {
  static const std::vector<std::string> kNone;
  auto it = up_.find(std::string(token));
  return it == up_.end() ? kNone : it->second;
}

bool Taxonomy::has_hyponym(std::string_view token) const {
  auto it = up_.find(std::string(token));
  return it != up_.end() && !it->second.empty();
}

bool Taxonomy::is_hypernym(std::string_view token) const {
  return hypernym_vocab_.count(std::string(token)) > 0;
}

void KnowledgeBase::add(std::string_view subject, std::string_view relation,
                        std::string_view object) {
  Triple t{normalize_expression(subject), std::string(trim(relation)), normalize_expression(object)};
  if (t.subject.empty() || t.object.empty()) return;
  if (t.subject != t.object) {
    adj_[t.subject].insert(t.object);
    adj_[t.object].insert(t.subject);
  }
  triples_.push_back(std::move(t));
}

KnowledgeBase KnowledgeBase::load(const std::filesystem::path& path) {
  KnowledgeBase kb;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto f = split(line, '\t');
    if (f.size() != 3) {
      throw LoadError(where(path, i + 1) + ": expected subject<TAB>relation<TAB>object");
    }
    kb.add(f[0], f[1], f[2]);
  }
  return kb;
}

const std::unordered_set<std::string>& KnowledgeBase::neighbours(std::string_view entity) const {
  static const std::unordered_set<std::string> kNone;
  auto it = adj_.find(std::string(entity));
  return it == adj_.end() ? kNone : it->second;
}

double LexicalResources::count(std::string_view token) const {
  auto it = frequency.find(std::string(token));
  return it == frequency.end() ? 0.0 : it->second;
}

LexicalResources load_lexical_resources(const std::filesystem::path& dir) {
  LexicalResources r;
  const auto freq_path = dir / "frequency.tsv";
  const auto lines = read_lines(freq_path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto f = split(line, '\t');
    double c = 0;
    if (f.size() != 2 ||
        std::from_chars(f[1].data(), f[1].data() + f[1].size(), c).ec != std::errc() || c < 0) {
      throw LoadError(where(freq_path, i + 1) + ": expected token<TAB>count");
    }
    r.frequency[casefold(f[0])] = c;
  }
  r.units = Lexicon::load(dir / "units.txt");
  r.suffixes = Lexicon::load(dir / "suffixes.txt").entries();
  const auto irr_path = dir / "irregular_plurals.txt";
  const auto irr = read_lines(irr_path);
  for (std::size_t i = 0; i < irr.size(); ++i) {
    const std::string_view line = trim(irr[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto f = split(line, '\t');
    if (f.size() != 2) throw LoadError(where(irr_path, i + 1) + ": expected plural<TAB>singular");
    r.irregular_plurals[casefold(f[0])] = casefold(f[1]);
  }
  r.plural_exceptions = Lexicon::load(dir / "plural_exceptions.txt");
  r.taxonomy = Taxonomy::load(dir / "taxonomy.tsv");
  r.kb = KnowledgeBase::load(dir / "kb.tsv");
  const auto names = dir / "first_names.txt";
  r.first_names = Lexicon::load(std::filesystem::exists(names)
                                    ? names
                                    : default_data_dir() / "lexicons" / "first_names.txt");
  return r;
}

std::unordered_map<std::string, double> count_tokens(const std::vector<std::string>& texts) {
  std::unordered_map<std::string, double> counts;
  for (const std::string& text : texts) {
    for (const Token& t : tokenize(text)) {
      if (is_ascii_alpha(t.lower.front()) || is_ascii_digit(t.lower.front())) counts[t.lower] += 1;
    }
  }
  return counts;
}

std::string singularize(std::string_view word, const LexicalResources& res) {
  const std::string w(word);
  if (auto it = res.irregular_plurals.find(w); it != res.irregular_plurals.end()) {
    return it->second;
  }
  if (!is_plural(w, res)) return w;
  if (ends_with(w, "ies") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
  for (std::string_view es : {"ches", "shes", "sses", "xes", "zes", "oes"}) {
    if (ends_with(w, es)) return w.substr(0, w.size() - 2);
  }
  return w.substr(0, w.size() - 1);
}

bool is_plural(std::string_view word, const LexicalResources& res) {
  const std::string w(word);
  if (res.irregular_plurals.count(w)) return true;
  if (res.plural_exceptions.contains(w)) return false;
  if (w.size() < 3 || !ends_with(w, "s")) return false;
  return !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is");
}

std::filesystem::path default_resource_dir() { return default_data_dir() / "resources" / "desk"; }

}  // namespace mcqforge
