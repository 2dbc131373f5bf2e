#include "mcqforge/records.hpp"

#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "mcqforge/error.hpp"
#include "mcqforge/forest.hpp"
#include "mcqforge/text.hpp"

namespace mcqforge {

namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 2> kOrigins = {"model", "human"};
constexpr std::array<std::string_view, 4> kSplits = {"unassigned", "train", "validation", "test"};

std::ofstream open_out(const std::filesystem::path& out) {
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw LoadError("cannot write " + out.string());
  return f;
}

}  // namespace

std::string_view to_string(Origin o) { return kOrigins[static_cast<std::size_t>(o)]; }
std::string_view to_string(Split s) { return kSplits[static_cast<std::size_t>(s)]; }

std::optional<Origin> parse_origin(std::string_view s) {
  for (std::size_t i = 0; i < kOrigins.size(); ++i) {
    if (kOrigins[i] == s) return static_cast<Origin>(i);
  }
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view s) {
  for (std::size_t i = 0; i < kSplits.size(); ++i) {
    if (kSplits[i] == s) return static_cast<Split>(i);
  }
  return std::nullopt;
}

std::vector<std::string> check_record(const MCQRecord& r) {
  std::vector<std::string> problems;
  std::set<std::string> seen{normalize_expression(r.correct_answer)};
  if (seen.begin()->empty()) problems.push_back("empty correct answer");
  std::size_t human = 0;
  for (const Distractor& d : r.distractors) {
    const std::string n = normalize_expression(d.text);
    if (n.empty()) problems.push_back("empty distractor");
    if (!seen.insert(n).second) problems.push_back("duplicate option '" + d.text + "'");
    human += d.origin == Origin::Human ? 1 : 0;
  }
  // at least one human option also caps model options at two
  if (human < 1) problems.push_back("no human-written distractor");
  if (r.question.empty()) problems.push_back("empty question");
  return problems;
}

std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

OptionOrder shuffled_options(const MCQRecord& r) {
  OptionOrder o;
  o.options = {r.correct_answer, r.distractors[0].text, r.distractors[1].text, r.distractors[2].text};
  std::array<std::size_t, 4> idx = {0, 1, 2, 3};
  std::mt19937_64 rng(r.option_seed ^ stable_hash(r.id));
  for (std::size_t i = 4; i > 1; --i) std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
  std::array<std::string, 4> shuffled;
  for (std::size_t i = 0; i < 4; ++i) {
    shuffled[i] = o.options[idx[i]];
    if (idx[i] == 0) o.answer_index = i;
  }
  o.options = shuffled;
  return o;
}

std::string mc_line(const MCQRecord& r) {
  const OptionOrder order = shuffled_options(r);
  json j;
  j["id"] = r.id;
  j["question"] = r.question;
  j["correct_answer"] = r.correct_answer;
  for (std::size_t i = 0; i < 3; ++i) j["distractor" + std::to_string(i + 1)] = r.distractors[i].text;
  j["support"] = r.support ? json(*r.support) : json(nullptr);
  j["split"] = to_string(r.split);
  json origins = json::array();
  for (const auto& d : r.distractors) origins.push_back(to_string(d.origin));
  j["origins"] = origins;
  j["options"] = order.options;
  j["answer_index"] = order.answer_index;
  j["option_seed"] = r.option_seed;
  j["paragraph_id"] = r.paragraph_id;
  return j.dump();
}

MCQRecord parse_mc_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    MCQRecord r;
    r.id = j.at("id").get<std::string>();
    r.question = j.at("question").get<std::string>();
    r.correct_answer = j.at("correct_answer").get<std::string>();
    const json& origins = j.at("origins");
    if (!origins.is_array() || origins.size() != 3) throw LoadError("record '" + r.id + "': need 3 origins");
    for (std::size_t i = 0; i < 3; ++i) {
      r.distractors[i].text = j.at("distractor" + std::to_string(i + 1)).get<std::string>();
      const auto o = parse_origin(origins[i].get<std::string>());
      if (!o) throw LoadError("record '" + r.id + "': unknown origin");
      r.distractors[i].origin = *o;
    }
    if (!j.at("support").is_null()) r.support = j.at("support").get<std::string>();
    const auto s = parse_split(j.value("split", std::string("unassigned")));
    if (!s) throw LoadError("record '" + r.id + "': unknown split");
    r.split = *s;
    r.option_seed = j.value("option_seed", std::uint64_t{0});
    r.paragraph_id = j.value("paragraph_id", std::string());
    if (j.contains("options")) {
      const OptionOrder order = shuffled_options(r);
      if (j.at("options").get<std::vector<std::string>>() !=
              std::vector<std::string>(order.options.begin(), order.options.end()) ||
          j.value("answer_index", std::size_t{99}) != order.answer_index) {
        throw LoadError("record '" + r.id + "': option order does not match its seed");
      }
    }
    return r;
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed mc record: ") + e.what());
  }
}

ExportCounts export_mc(const std::vector<MCQRecord>& records, const std::filesystem::path& out) {
  auto f = open_out(out);
  ExportCounts c;
  for (const MCQRecord& r : records) {
    f << mc_line(r) << '\n';
    ++c.written;
    ++c.per_split[static_cast<std::size_t>(r.split)];
  }
  if (!f) throw LoadError("cannot write " + out.string());
  return c;
}

std::vector<MCQRecord> import_mc(const std::filesystem::path& in) {
  std::vector<MCQRecord> out;
  const auto lines = read_lines(in);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    try {
      out.push_back(parse_mc_line(lines[i]));
    } catch (const LoadError& e) {
      throw LoadError(in.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

ExportCounts export_direct_answer(const std::vector<MCQRecord>& records, const std::filesystem::path& out) {
  auto f = open_out(out);
  ExportCounts c;
  for (const MCQRecord& r : records) {
    if (!r.support) {
      ++c.skipped;
      continue;
    }
    const bool in_passage = r.support->find(r.correct_answer) != std::string::npos;
    json j;
    j["id"] = r.id;
    j["passage"] = *r.support;
    j["question"] = r.question;
    j["answer"] = r.correct_answer;
    j["split"] = to_string(r.split);
    j["answer_in_passage"] = in_passage;
    f << j.dump() << '\n';
    ++c.written;
    ++c.per_split[static_cast<std::size_t>(r.split)];
    if (!in_passage) ++c.answer_not_in_passage;
  }
  if (!f) throw LoadError("cannot write " + out.string());
  return c;
}

}  // namespace mcqforge
