#include "mcqforge/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mcqforge/error.hpp"
#include "mcqforge/pos_tagger.hpp"

namespace mcqforge {

namespace {

constexpr std::array<std::string_view, kScalarFeatureCount> kScalarNames = {
    "pos_consistency",         "plural_consistency",      "log_avg_freq_astar",
    "log_avg_freq_aprime",     "levenshtein",             "suffix_consistency",
    "overlap_q_astar",         "overlap_q_aprime",        "overlap_astar_aprime",
    "tok_len_astar",           "tok_len_aprime",          "char_len_astar",
    "char_len_aprime",         "tok_len_absdiff",         "char_len_absdiff",
    "numeric_q",               "numeric_astar",           "numeric_aprime",
    "numeric_consistency",     "unit_q",                  "unit_astar",
    "unit_aprime",             "unit_cooccurrence",       "hyper_astar_to_aprime_1",
    "hyper_aprime_to_astar_1", "hyper_astar_to_aprime_2", "hyper_aprime_to_astar_2",
    "hyper_q_to_aprime_2",     "hyper_aprime_to_q_2",     "kb_two_step",
    "shared_top_concept"};

using StringSet = std::unordered_set<std::string>;

bool intersects(const StringSet& a, const StringSet& b) {
  const StringSet& small = a.size() <= b.size() ? a : b;
  const StringSet& large = a.size() <= b.size() ? b : a;
  for (const std::string& s : small) {
    if (large.count(s)) return true;
  }
  return false;
}

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> out;
  for (const Token& t : tokenize(normalize_expression(text))) {
    const unsigned char c = static_cast<unsigned char>(t.lower.front());
    if (is_ascii_alpha(t.lower.front()) || is_ascii_digit(t.lower.front()) || c >= 0x80) {
      out.push_back(t.lower);
    }
  }
  return out;
}

StringSet head_forms(const std::string& head, const LexicalResources& res) {
  StringSet s;
  if (head.empty()) return s;
  s.insert(head);
  s.insert(singularize(head, res));
  return s;
}

StringSet heads_of(std::string_view expr, const LexicalResources& res) {
  const auto w = words_of(expr);
  return w.empty() ? StringSet{} : head_forms(w.back(), res);
}

StringSet hypernyms_within(const StringSet& start, const Taxonomy& tax, int hops) {
  StringSet reached;
  std::vector<std::string> frontier(start.begin(), start.end());
  for (int h = 0; h < hops && !frontier.empty(); ++h) {
    std::vector<std::string> next;
    for (const std::string& node : frontier) {
      for (const std::string& up : tax.hypernyms(node)) {
        if (reached.insert(up).second) next.push_back(up);
      }
    }
    frontier = std::move(next);
  }
  return reached;
}

bool reaches(const StringSet& src_heads, const StringSet& src_up, const StringSet& dst_heads) {
  if (src_heads.empty() || dst_heads.empty() || intersects(src_heads, dst_heads)) return false;
  return intersects(src_up, dst_heads);
}

StringSet kb_keys_of(std::string_view expr, const LexicalResources& res) {
  StringSet keys;
  auto w = words_of(expr);
  if (w.empty()) return keys;
  keys.insert(join(w, " "));
  w.back() = singularize(w.back(), res);
  keys.insert(join(w, " "));
  return keys;
}

bool kb_connected(const StringSet& a, const StringSet& b, const KnowledgeBase& kb) {
  if (a.empty() || b.empty() || intersects(a, b)) return false;
  for (const std::string& ka : a) {
    for (const std::string& z : kb.neighbours(ka)) {
      if (a.count(z) || b.count(z)) continue;
      for (const std::string& kb_key : b) {
        if (kb.neighbours(z).count(kb_key)) return true;
      }
    }
  }
  return false;
}

bool is_word(const Token& t) { return t.pos != PosTag::Punct && t.pos != PosTag::Sym; }

}  // namespace

const std::array<std::string_view, kScalarFeatureCount>& scalar_feature_names() {
  return kScalarNames;
}

std::vector<std::string> feature_names(std::size_t dim) {
  std::vector<std::string> out;
  out.reserve(feature_length(dim));
  for (std::string_view block : {"emb_q", "emb_astar", "emb_aprime"}) {
    for (std::size_t i = 0; i < dim; ++i) out.push_back(std::string(block) + "_" + std::to_string(i));
  }
  for (auto n : kScalarNames) out.emplace_back(n);
  return out;
}

std::size_t levenshtein(std::string_view x, std::string_view y) {
  const std::u32string a = decode_utf8(x);
  const std::u32string b = decode_utf8(y);
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::vector<double> embed_bag(const std::vector<std::string>& tokens, const EmbeddingTable& table) {
  std::vector<double> out(table.dim(), 0.0);
  if (tokens.empty()) return out;
  for (const std::string& t : tokens) {
    const auto v = table.lookup(t);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += v[i];
  }
  for (double& x : out) x /= static_cast<double>(tokens.size());
  return out;
}

bool hypernym_reachable(std::string_view src, std::string_view dst, const LexicalResources& res,
                        int max_hops) {
  if (max_hops != 1 && max_hops != 2) {
    throw ContractViolation("hypernym_reachable: max_hops must be 1 or 2");
  }
  const StringSet s = heads_of(src, res);
  return reaches(s, hypernyms_within(s, res.taxonomy, max_hops), heads_of(dst, res));
}

bool kb_two_step_connected(std::string_view a_star, std::string_view a_prime,
                           const LexicalResources& res) {
  return kb_connected(kb_keys_of(a_star, res), kb_keys_of(a_prime, res), res.kb);
}

std::vector<std::string> compute_top_concepts(
    const std::vector<std::array<std::string, 3>>& distractor_triples, const LexicalResources& res,
    std::size_t k) {
  std::map<std::string, std::size_t> counts;
  for (const auto& triple : distractor_triples) {
    StringSet common;
    bool first = true;
    for (const std::string& d : triple) {
      const StringSet up = hypernyms_within(heads_of(d, res), res.taxonomy, 2);
      if (first) {
        common = up;
        first = false;
      } else {
        std::erase_if(common, [&](const std::string& c) { return !up.count(c); });
      }
      if (common.empty()) break;
    }
    for (const std::string& c : common) ++counts[c];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].first);
  return out;
}

ExpressionAnalysis analyze_expression(const std::vector<Token>& tokens, const LexicalResources& res,
                                      const EmbeddingTable& table, bool as_question) {
  ExpressionAnalysis a;
  const Token* last = nullptr;
  for (const Token& t : tokens) {
    if (!is_word(t)) continue;
    a.words.push_back(t.lower);
    last = &t;
  }
  a.word_set.insert(a.words.begin(), a.words.end());
  a.surface = join(a.words, " ");
  a.char_len = decode_utf8(a.surface).size();
  if (last) {
    a.final_pos = last->pos;
    a.final_word = last->lower;
    a.plural = is_plural(a.final_word, res);
  }
  double sum = 0;
  for (const std::string& w : a.words) {
    sum += res.count(w) + 1.0;
    a.numeric = a.numeric || has_digit(w);
    if (res.units.contains(w)) a.units.insert(w);
  }
  a.log_avg_freq = a.words.empty() ? 0.0 : std::log(sum / static_cast<double>(a.words.size()));
  a.heads = head_forms(a.final_word, res);
  a.up1 = hypernyms_within(a.heads, res.taxonomy, 1);
  a.up2 = hypernyms_within(a.heads, res.taxonomy, 2);
  a.kb_keys = kb_keys_of(a.surface, res);
  a.embedding = embed_bag(a.words, table);
  if (as_question) {
    for (const Token& t : tokens) {
      if (t.pos != PosTag::Noun) continue;
      a.noun_heads.push_back(head_forms(t.lower, res));
      a.noun_up2.push_back(hypernyms_within(a.noun_heads.back(), res.taxonomy, 2));
    }
  }
  return a;
}

FeatureVector combine_features(const ExpressionAnalysis& q, const ExpressionAnalysis& as,
                               const ExpressionAnalysis& ap, const LexicalResources& res) {
  const std::size_t d = as.embedding.size();
  FeatureVector fv;
  fv.values.reserve(feature_length(d));
  for (const auto* e : {&q, &as, &ap}) {
    if (e->embedding.size() != d) throw ContractViolation("embedding dimensions differ");
    fv.values.insert(fv.values.end(), e->embedding.begin(), e->embedding.end());
  }
  auto b = [](bool v) { return v ? 1.0 : 0.0; };
  auto push = [&](double v) { fv.values.push_back(v); };

  push(b(as.final_pos != PosTag::None && as.final_pos == ap.final_pos));
  push(b(as.plural == ap.plural));
  push(as.log_avg_freq);
  push(ap.log_avg_freq);
  push(static_cast<double>(levenshtein(as.surface, ap.surface)));
  bool suffix = false;
  for (const std::string& s : res.suffixes) {
    if (s.size() < 3) continue;
    const auto ends = [&](const std::string& w) {
      return w.size() > s.size() && w.compare(w.size() - s.size(), s.size(), s) == 0;
    };
    if (ends(as.final_word) && ends(ap.final_word)) {
      suffix = true;
      break;
    }
  }
  push(b(suffix));
  push(b(intersects(q.word_set, as.word_set)));
  push(b(intersects(q.word_set, ap.word_set)));
  push(b(intersects(as.word_set, ap.word_set)));
  const double ta = static_cast<double>(as.words.size());
  const double tp = static_cast<double>(ap.words.size());
  const double ca = static_cast<double>(as.char_len);
  const double cp = static_cast<double>(ap.char_len);
  push(ta);
  push(tp);
  push(ca);
  push(cp);
  push(std::abs(ta - tp));
  push(std::abs(ca - cp));
  push(b(q.numeric));
  push(b(as.numeric));
  push(b(ap.numeric));
  push(b(as.numeric == ap.numeric));
  push(b(!q.units.empty()));
  push(b(!as.units.empty()));
  push(b(!ap.units.empty()));
  push(b(intersects(as.units, ap.units)));
  push(b(reaches(as.heads, as.up1, ap.heads)));
  push(b(reaches(ap.heads, ap.up1, as.heads)));
  push(b(reaches(as.heads, as.up2, ap.heads)));
  push(b(reaches(ap.heads, ap.up2, as.heads)));
  bool q_to_ap = false;
  bool ap_to_q = false;
  for (std::size_t i = 0; i < q.noun_heads.size(); ++i) {
    q_to_ap = q_to_ap || reaches(q.noun_heads[i], q.noun_up2[i], ap.heads);
    ap_to_q = ap_to_q || reaches(ap.heads, ap.up2, q.noun_heads[i]);
  }
  push(b(q_to_ap));
  push(b(ap_to_q));
  push(b(kb_connected(as.kb_keys, ap.kb_keys, res.kb)));
  bool shared = false;
  for (const std::string& c : res.top_concepts) {
    if (as.up2.count(c) && ap.up2.count(c)) {
      shared = true;
      break;
    }
  }
  push(b(shared));
  return fv;
}

FeatureVector extract_features(const std::vector<Token>& q, const std::vector<Token>& a_star,
                               const std::vector<Token>& a_prime, const LexicalResources& res,
                               const EmbeddingTable& table) {
  return combine_features(analyze_expression(q, res, table, true),
                          analyze_expression(a_star, res, table),
                          analyze_expression(a_prime, res, table), res);
}

std::vector<Token> tagged_tokens(std::string_view text, const PosTagger& tagger) {
  std::vector<Token> tokens = tokenize(text);
  if (!tokens.empty()) tagger.tag(tokens);
  return tokens;
}

}  // namespace mcqforge
