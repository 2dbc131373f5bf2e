#include "mcqforge/annotation.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <unordered_set>

#include "mcqforge/error.hpp"
#include "mcqforge/pos_tagger.hpp"
#include "mcqforge/text.hpp"

namespace mcqforge {

namespace {

using json = nlohmann::json;

constexpr std::size_t kMinQuestionWords = 6;
constexpr std::size_t kMaxQuestionWords = 30;
constexpr std::size_t kMaxAnswerWords = 3;
constexpr std::size_t kMaxSelected = 2;

const std::unordered_set<std::string> kYesNoOpeners = {
    "is",  "are",  "was", "were", "am",  "be",  "do",    "does", "did",
    "have", "has", "had", "can",  "could", "will", "would"};

std::string make_id(std::string_view prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*s-%06zu", static_cast<int>(prefix.size()), prefix.data(), n);
  return buf;
}

/// Counter that follows the largest numeric suffix seen so ids never repeat.
void bump_counter(std::size_t& next, const std::string& id) {
  const auto dash = id.rfind('-');
  if (dash == std::string::npos) return;
  next = std::max(next, static_cast<std::size_t>(std::stoull(id.substr(dash + 1))) + 1);
}

json response_json(const Task1Response& r) {
  return {{"choice", r.choice}, {"question", r.question}, {"answer", r.answer}};
}

json response_json(const Task2Response& r) {
  json j = {{"verdict", r.verdict}, {"fail_reason", r.fail_reason}, {"selected", r.selected},
            {"written", r.written}};
  j["final_distractors"] = r.final_distractors ? json(*r.final_distractors) : json(nullptr);
  return j;
}

json suggestions_json(const std::vector<RankedSuggestion>& s) {
  json out = json::array();
  for (const auto& x : s) out.push_back({{"surface", x.surface}, {"score", x.score}});
  return out;
}

json qa_json(const QAPair& qa) {
  return {{"id", qa.id},
          {"question", qa.question},
          {"answer", qa.answer},
          {"paragraph_id", qa.paragraph_id},
          {"exportable", qa.exportable}};
}

}  // namespace

Clock system_clock() {
  return [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

Suggester ranker_suggester(std::shared_ptr<const DistractorRanker> ranker) {
  if (!ranker) throw ContractViolation("ranker_suggester: null ranker");
  return [ranker](std::string_view q, std::string_view a) { return ranker->suggest(q, a, kSuggestionCount); };
}

std::string_view to_string(AssignmentState s) {
  switch (s) {
    case AssignmentState::Open: return "open";
    case AssignmentState::Submitted: return "submitted";
    case AssignmentState::Expired: return "expired";
  }
  return "?";
}

double ServiceStats::rejection_rate() const {
  return task1_responses ? static_cast<double>(task1_rejections) / static_cast<double>(task1_responses) : 0.0;
}

double ServiceStats::pass_rate() const {
  const std::size_t n = task2_pass + task2_fail;
  return n ? static_cast<double>(task2_pass) / static_cast<double>(n) : 0.0;
}

double ServiceStats::model_origin_fraction() const {
  return records ? static_cast<double>(model_distractors) / static_cast<double>(3 * records) : 0.0;
}

json ServiceStats::to_json() const {
  return {{"paragraphs_total", paragraphs_total},
          {"paragraphs_used", paragraphs_used},
          {"paragraphs_available", paragraphs_available},
          {"task1_issued", task1_issued},
          {"task1_responses", task1_responses},
          {"task1_rejections", task1_rejections},
          {"task1_expired", task1_expired},
          {"rejection_rate", rejection_rate()},
          {"yes_no_warnings", yes_no_warnings},
          {"qa_pairs", qa_pairs},
          {"qa_queued", qa_queued},
          {"task2_issued", task2_issued},
          {"task2_pass", task2_pass},
          {"task2_fail", task2_fail},
          {"task2_expired", task2_expired},
          {"pass_rate", pass_rate()},
          {"records", records},
          {"model_distractors", model_distractors},
          {"model_origin_fraction", model_origin_fraction()},
          {"model_origin_max", 2.0 / 3.0},
          {"feedback", feedback},
          {"invalid_by_constraint", invalid_by_constraint},
          {"fail_by_reason", fail_by_reason}};
}

bool looks_like_yes_no(std::string_view question) {
  static const PosTagger closed;
  std::vector<Token> tokens = tokenize(question);
  std::erase_if(tokens, [](const Token& t) { return t.surface.size() == 1 && !is_ascii_alpha(t.surface[0]); });
  if (tokens.size() < 2 || !kYesNoOpeners.count(tokens[0].lower)) return false;
  closed.tag(tokens);
  return tokens[1].pos == PosTag::Pron || tokens[1].pos == PosTag::Det;
}

void validate_task1(const Task1Response& r, const std::array<std::string, 3>& offered) {
  if (r.choice == kRejectAll) {
    if (!trim(r.question).empty() || !trim(r.answer).empty()) {
      throw ValidationError("reject_all_has_question", "REJECT_ALL responses carry no question or answer");
    }
    return;
  }
  if (std::find(offered.begin(), offered.end(), r.choice) == offered.end()) {
    throw ValidationError("invalid_choice", "choice '" + r.choice + "' is not one of the offered paragraphs");
  }
  const std::size_t qw = word_count(r.question);
  if (qw < kMinQuestionWords || qw > kMaxQuestionWords) {
    throw ValidationError("question_length",
                          "question length between 6-30 words (got " + std::to_string(qw) + ")");
  }
  const std::size_t aw = word_count(r.answer);
  if (aw < 1 || aw > kMaxAnswerWords) {
    throw ValidationError("answer_length", "answer length 1-3 words (got " + std::to_string(aw) + ")");
  }
}

void validate_task2(const Task2Response& r, const std::vector<RankedSuggestion>& suggestions,
                    std::string_view correct_answer) {
  if (r.verdict == "fail") {
    if (std::find(kFailReasons.begin(), kFailReasons.end(), r.fail_reason) == kFailReasons.end()) {
      throw ValidationError("invalid_fail_reason", "unknown fail reason '" + r.fail_reason + "'");
    }
    return;
  }
  if (r.verdict != "pass") throw ValidationError("invalid_verdict", "verdict must be pass or fail");
  if (!r.fail_reason.empty()) throw ValidationError("invalid_fail_reason", "a pass verdict has no fail reason");
  if (r.selected.size() > kMaxSelected) {
    throw ValidationError("too_many_selected", "select up to two of the six suggestions");
  }
  for (const std::string& s : r.selected) {
    const bool offered = std::any_of(suggestions.begin(), suggestions.end(),
                                     [&](const RankedSuggestion& x) { return x.surface == s; });
    if (!offered) throw ValidationError("unknown_suggestion", "'" + s + "' was not suggested");
  }
  if (r.written.empty()) throw ValidationError("no_written_distractor", "write at least one distractor");
  for (const std::string& w : r.written) {
    if (trim(w).empty()) throw ValidationError("empty_distractor", "written distractors must not be empty");
  }
  if (r.selected.size() + r.written.size() != 3) {
    throw ValidationError("distractor_count", "selected plus written distractors must total three");
  }
  const std::string answer = normalize_expression(correct_answer);
  std::set<std::string> seen;
  for (const auto* list : {&r.selected, &r.written}) {
    for (const std::string& d : *list) {
      const std::string n = normalize_expression(d);
      if (n == answer) throw ValidationError("distractor_equals_answer", "'" + d + "' is the correct answer");
      if (!seen.insert(n).second) throw ValidationError("duplicate_option", "'" + d + "' appears twice");
    }
  }
  if (r.final_distractors) {
    std::set<std::string> claimed;
    for (const std::string& d : *r.final_distractors) claimed.insert(normalize_expression(d));
    if (claimed != seen || r.final_distractors->size() != 3) {
      throw ValidationError("final_mismatch", "final distractors must be the selected and written ones");
    }
  }
}

AnnotationStore::AnnotationStore(std::filesystem::path dir, std::vector<Paragraph> paragraphs,
                                 ServiceOptions options)
    : dir_(std::move(dir)), options_(std::move(options)) {
  if (!options_.clock) options_.clock = system_clock();
  for (Paragraph& p : paragraphs) {
    if (!paragraph_index_.emplace(p.id, paragraphs_.size()).second) {
      throw LoadError("duplicate paragraph id '" + p.id + "' in store");
    }
    paragraphs_.push_back({std::move(p), {}, 0});
  }
}

std::unique_ptr<AnnotationStore> AnnotationStore::create(const std::filesystem::path& dir,
                                                         const std::vector<Paragraph>& paragraphs,
                                                         ServiceOptions options) {
  std::filesystem::create_directories(dir);
  if (std::filesystem::exists(dir / "journal.jsonl") || std::filesystem::exists(dir / "paragraphs.jsonl")) {
    throw ContractViolation("store already exists at " + dir.string());
  }
  write_paragraph_store(dir / "paragraphs.jsonl", paragraphs);
  std::ofstream(dir / "journal.jsonl", std::ios::binary | std::ios::trunc);
  return open(dir, std::move(options));
}

std::unique_ptr<AnnotationStore> AnnotationStore::open(const std::filesystem::path& dir, ServiceOptions options) {
  std::unique_ptr<AnnotationStore> s(
      new AnnotationStore(dir, read_paragraph_store(dir / "paragraphs.jsonl"), std::move(options)));
  const auto journal = dir / "journal.jsonl";
  if (std::filesystem::exists(journal)) {
    const std::string raw = read_file(journal);
    const auto lines = split(raw, '\n');
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (trim(lines[i]).empty()) continue;
      json e;
      try {
        e = json::parse(lines[i]);
      } catch (const json::exception&) {
        // a torn final write (no newline yet) is dropped; anything else is corruption
        if (i + 1 == lines.size()) {
          std::filesystem::resize_file(journal, raw.size() - lines[i].size());
          break;
        }
        throw LoadError(journal.string() + ":" + std::to_string(i + 1) + ": malformed journal event");
      }
      s->apply(e);
      s->seq_ = e.value("seq", s->seq_ + 1);
    }
  }
  s->journal_.open(journal, std::ios::binary | std::ios::app);
  if (!s->journal_) throw LoadError("cannot open journal " + journal.string());
  return s;
}

void AnnotationStore::set_suggester(Suggester sg) {
  std::unique_lock lock(mutex_);
  suggester_ = std::move(sg);
}

bool AnnotationStore::has_suggester() const {
  std::shared_lock lock(mutex_);
  return static_cast<bool>(suggester_);
}

void AnnotationStore::commit(json event) {
  event["seq"] = ++seq_;
  journal_ << event.dump() << '\n';
  journal_.flush();
  if (!journal_) throw Error("journal write failed in " + dir_.string());
  apply(event);
}

void AnnotationStore::apply(const json& e) {
  const std::string type = e.at("type").get<std::string>();
  const std::string id = e.value("id", std::string());

  if (type == "task1_issued") {
    Task1Assignment a;
    a.assignment_id = id;
    a.worker = e.at("worker").get<std::string>();
    a.issued_at = e.at("at").get<std::int64_t>();
    for (std::size_t i = 0; i < 3; ++i) {
      a.paragraph_ids[i] = e.at("paragraphs").at(i).get<std::string>();
      ParagraphState& p = paragraphs_.at(paragraph_index_.at(a.paragraph_ids[i]));
      p.reserved_by = id;
      ++p.offered;
    }
    bump_counter(next_task1_, id);
    task1_[id] = std::move(a);
    ++counters_.task1_issued;
  } else if (type == "task1_submitted") {
    Task1Assignment& a = task1_.at(id);
    a.state = AssignmentState::Submitted;
    for (const std::string& pid : a.paragraph_ids) paragraphs_[paragraph_index_.at(pid)].reserved_by.clear();
    ++counters_.task1_responses;
    const json& r = e.at("response");
    const std::string choice = r.at("choice").get<std::string>();
    if (choice == kRejectAll) {
      ++counters_.task1_rejections;
    } else {
      Paragraph& p = paragraphs_[paragraph_index_.at(choice)].paragraph;
      p.used = true;
      QAPair qa{e.at("qa_id").get<std::string>(), r.at("question").get<std::string>(),
                r.at("answer").get<std::string>(), p.id, p.exportable};
      bump_counter(next_qa_, qa.id);
      qa_index_[qa.id] = qa_.size();
      qa_.push_back({std::move(qa), {}, false});
    }
    counters_.yes_no_warnings += e.at("warnings").size();
    task1_responses_[id] = e;
  } else if (type == "task1_expired") {
    Task1Assignment& a = task1_.at(id);
    a.state = AssignmentState::Expired;
    for (const std::string& pid : a.paragraph_ids) paragraphs_[paragraph_index_.at(pid)].reserved_by.clear();
    ++counters_.task1_expired;
  } else if (type == "task2_issued") {
    Task2Assignment a;
    a.assignment_id = id;
    a.worker = e.at("worker").get<std::string>();
    a.qa_id = e.at("qa_id").get<std::string>();
    a.issued_at = e.at("at").get<std::int64_t>();
    for (const json& s : e.at("suggestions")) {
      a.suggestions.push_back({s.at("surface").get<std::string>(), s.at("score").get<double>()});
    }
    qa_.at(qa_index_.at(a.qa_id)).reserved_by = id;
    bump_counter(next_task2_, id);
    task2_[id] = std::move(a);
    ++counters_.task2_issued;
  } else if (type == "task2_submitted") {
    Task2Assignment& a = task2_.at(id);
    a.state = AssignmentState::Submitted;
    QAState& q = qa_.at(qa_index_.at(a.qa_id));
    q.reserved_by.clear();
    q.processed = true;
    const json& r = e.at("response");
    if (r.at("verdict") == "fail") {
      const std::string reason = r.at("fail_reason").get<std::string>();
      failures_.emplace_back(q.qa.id, reason);
      ++counters_.task2_fail;
      ++counters_.fail_by_reason[reason];
    } else {
      MCQRecord rec;
      rec.id = e.at("record_id").get<std::string>();
      rec.option_seed = e.at("option_seed").get<std::uint64_t>();
      rec.question = q.qa.question;
      rec.correct_answer = q.qa.answer;
      rec.paragraph_id = q.qa.paragraph_id;
      std::size_t k = 0;
      for (const json& s : r.at("selected")) rec.distractors[k++] = {s.get<std::string>(), Origin::Model};
      for (const json& w : r.at("written")) {
        rec.distractors[k++] = {std::string(trim(w.get<std::string>())), Origin::Human};
      }
      const Paragraph& p = paragraphs_.at(paragraph_index_.at(q.qa.paragraph_id)).paragraph;
      if (p.exportable) rec.support = p.text;
      bump_counter(next_record_, rec.id);
      counters_.model_distractors += r.at("selected").size();
      records_.push_back(std::move(rec));
      ++counters_.task2_pass;
    }
    task2_responses_[id] = e;
  } else if (type == "task2_expired") {
    Task2Assignment& a = task2_.at(id);
    a.state = AssignmentState::Expired;
    qa_.at(qa_index_.at(a.qa_id)).reserved_by.clear();
    ++counters_.task2_expired;
  } else if (type == "invalid") {
    ++counters_.invalid_by_constraint[e.at("constraint").get<std::string>()];
  } else if (type == "feedback") {
    feedback_.emplace_back(e.at("worker").get<std::string>(), e.at("text").get<std::string>());
  } else {
    throw LoadError("unknown journal event type '" + type + "'");
  }
}

void AnnotationStore::expire_due(std::int64_t now) {
  const std::int64_t timeout = options_.timeout.count();
  std::vector<std::string> due1;
  std::vector<std::string> due2;
  for (const auto& [id, a] : task1_) {
    if (a.state == AssignmentState::Open && now - a.issued_at >= timeout) due1.push_back(id);
  }
  for (const auto& [id, a] : task2_) {
    if (a.state == AssignmentState::Open && now - a.issued_at >= timeout) due2.push_back(id);
  }
  for (const auto& id : due1) commit({{"type", "task1_expired"}, {"id", id}, {"at", now}});
  for (const auto& id : due2) commit({{"type", "task2_expired"}, {"id", id}, {"at", now}});
}

void AnnotationStore::reject(const NamedError& err, std::string_view task, const std::string& assignment_id) {
  commit({{"type", "invalid"},
          {"task", task},
          {"id", assignment_id},
          {"constraint", err.constraint()},
          {"at", options_.clock()}});
  throw;
}

Task1Assignment AnnotationStore::next_task1(const std::string& worker) {
  if (trim(worker).empty()) throw ValidationError("missing_worker", "worker id required");
  std::unique_lock lock(mutex_);
  const std::int64_t now = options_.clock();
  expire_due(now);
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < paragraphs_.size(); ++i) {
    if (!paragraphs_[i].paragraph.used && paragraphs_[i].reserved_by.empty()) free.push_back(i);
  }
  if (free.size() < 3) throw NoWork("fewer than three unused paragraphs remain");
  // least-offered first so rejected triples do not come straight back
  std::stable_sort(free.begin(), free.end(),
                   [&](std::size_t a, std::size_t b) { return paragraphs_[a].offered < paragraphs_[b].offered; });
  const std::string id = make_id("t1", next_task1_);
  json ids = json::array();
  for (std::size_t k = 0; k < 3; ++k) ids.push_back(paragraphs_[free[k]].paragraph.id);
  commit({{"type", "task1_issued"}, {"id", id}, {"worker", worker}, {"paragraphs", ids}, {"at", now}});
  return task1_.at(id);
}

Task1Result AnnotationStore::submit_task1(const Task1Response& r) {
  std::unique_lock lock(mutex_);
  expire_due(options_.clock());
  const auto it = task1_.find(r.assignment_id);
  try {
    if (it == task1_.end()) {
      throw ConflictError("unknown_assignment", "no task 1 assignment '" + r.assignment_id + "'");
    }
    if (it->second.state != AssignmentState::Open) {
      const auto prev = task1_responses_.find(r.assignment_id);
      if (prev != task1_responses_.end() && prev->second.at("response") == response_json(r)) {
        Task1Result res;
        res.duplicate = true;
        if (prev->second.contains("qa_id")) res.qa = qa_.at(qa_index_.at(prev->second.at("qa_id"))).qa;
        res.warnings = prev->second.at("warnings").get<std::vector<std::string>>();
        return res;
      }
      throw ConflictError("assignment_not_open", "assignment '" + r.assignment_id + "' is " +
                                                     std::string(to_string(it->second.state)));
    }
    validate_task1(r, it->second.paragraph_ids);
  } catch (const NamedError& e) {
    reject(e, "task1", r.assignment_id);
  }

  Task1Result res;
  json event = {{"type", "task1_submitted"}, {"id", r.assignment_id}, {"response", response_json(r)},
                {"at", options_.clock()}};
  if (r.choice != kRejectAll) {
    if (looks_like_yes_no(r.question)) res.warnings.push_back("yes_no_question");
    event["qa_id"] = make_id("qa", next_qa_);
  }
  event["warnings"] = res.warnings;
  commit(event);
  if (event.contains("qa_id")) res.qa = qa_.back().qa;
  return res;
}

Task2Assignment AnnotationStore::next_task2(const std::string& worker) {
  if (trim(worker).empty()) throw ValidationError("missing_worker", "worker id required");
  Suggester suggester;
  std::size_t pick = 0;
  {
    std::unique_lock lock(mutex_);
    expire_due(options_.clock());
    if (!suggester_) throw ConfigError("no_model", "no distractor model is configured");
    auto free = [&](std::size_t i) { return !qa_[i].processed && qa_[i].reserved_by.empty() && !qa_pending_.count(i); };
    while (pick < qa_.size() && !free(pick)) ++pick;
    if (pick == qa_.size()) throw NoWork("no question awaits distractors");
    qa_pending_.insert(pick);
    suggester = suggester_;
  }
  const QAPair qa = [&] {
    std::shared_lock lock(mutex_);
    return qa_[pick].qa;
  }();

  // ranking is slow; the pair stays pending while the lock is released
  std::vector<RankedSuggestion> suggestions;
  try {
    suggestions = suggester(qa.question, qa.answer);
    const std::string target = normalize_expression(qa.answer);
    std::set<std::string> seen;
    for (const auto& s : suggestions) {
      const std::string n = normalize_expression(s.surface);
      if (n.empty() || n == target || !seen.insert(n).second) {
        throw ConfigError("bad_suggestions", "ranker returned an empty, repeated or correct option");
      }
    }
    if (suggestions.size() != kSuggestionCount) {
      throw ConfigError("bad_suggestions", "ranker returned " + std::to_string(suggestions.size()) +
                                               " suggestions instead of 6");
    }
  } catch (...) {
    std::unique_lock lock(mutex_);
    qa_pending_.erase(pick);
    throw;
  }

  std::unique_lock lock(mutex_);
  qa_pending_.erase(pick);
  const std::int64_t now = options_.clock();
  const std::string id = make_id("t2", next_task2_);
  commit({{"type", "task2_issued"},
          {"id", id},
          {"worker", worker},
          {"qa_id", qa.id},
          {"suggestions", suggestions_json(suggestions)},
          {"at", now}});
  return task2_.at(id);
}

Task2Result AnnotationStore::submit_task2(const Task2Response& r) {
  std::unique_lock lock(mutex_);
  expire_due(options_.clock());
  const auto it = task2_.find(r.assignment_id);
  try {
    if (it == task2_.end()) {
      throw ConflictError("unknown_assignment", "no task 2 assignment '" + r.assignment_id + "'");
    }
    if (it->second.state != AssignmentState::Open) {
      const auto prev = task2_responses_.find(r.assignment_id);
      if (prev != task2_responses_.end() && prev->second.at("response") == response_json(r)) {
        Task2Result res;
        res.duplicate = true;
        if (prev->second.contains("record_id")) {
          const std::string rid = prev->second.at("record_id").get<std::string>();
          for (const auto& rec : records_) {
            if (rec.id == rid) res.record = rec;
          }
        } else {
          res.fail_reason = r.fail_reason;
        }
        return res;
      }
      throw ConflictError("assignment_not_open", "assignment '" + r.assignment_id + "' is " +
                                                     std::string(to_string(it->second.state)));
    }
    const QAPair& qa = qa_.at(qa_index_.at(it->second.qa_id)).qa;
    validate_task2(r, it->second.suggestions, qa.answer);
  } catch (const NamedError& e) {
    reject(e, "task2", r.assignment_id);
  }

  json event = {{"type", "task2_submitted"}, {"id", r.assignment_id}, {"response", response_json(r)},
                {"at", options_.clock()}};
  Task2Result res;
  if (r.verdict == "pass") {
    const std::string rid = make_id("mcq", next_record_);
    event["record_id"] = rid;
    event["option_seed"] = options_.option_seed ^ stable_hash(rid);
  } else {
    res.fail_reason = r.fail_reason;
  }
  commit(event);
  if (r.verdict == "pass") res.record = records_.back();
  return res;
}

void AnnotationStore::add_feedback(const std::string& worker, const std::string& text) {
  std::unique_lock lock(mutex_);
  if (trim(text).empty()) {
    try {
      throw ValidationError("empty_feedback", "feedback text is empty");
    } catch (const NamedError& e) {
      reject(e, "feedback", "");
    }
  }
  commit({{"type", "feedback"}, {"worker", worker}, {"text", text}, {"at", options_.clock()}});
}

ServiceStats AnnotationStore::stats() const {
  std::shared_lock lock(mutex_);
  ServiceStats s = counters_;
  s.paragraphs_total = paragraphs_.size();
  for (const auto& p : paragraphs_) {
    if (p.paragraph.used) {
      ++s.paragraphs_used;
    } else if (p.reserved_by.empty()) {
      ++s.paragraphs_available;
    }
  }
  s.qa_pairs = qa_.size();
  for (const auto& q : qa_) s.qa_queued += q.processed ? 0 : 1;
  s.records = records_.size();
  s.feedback = feedback_.size();
  return s;
}

std::vector<MCQRecord> AnnotationStore::records() const {
  std::shared_lock lock(mutex_);
  return records_;
}

std::vector<QAPair> AnnotationStore::qa_pairs() const {
  std::shared_lock lock(mutex_);
  std::vector<QAPair> out;
  for (const auto& q : qa_) out.push_back(q.qa);
  return out;
}

std::optional<Paragraph> AnnotationStore::paragraph(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto it = paragraph_index_.find(id);
  if (it == paragraph_index_.end()) return std::nullopt;
  return paragraphs_[it->second].paragraph;
}

json AnnotationStore::snapshot() const {
  std::shared_lock lock(mutex_);
  json j;
  json ps = json::array();
  for (const auto& p : paragraphs_) {
    ps.push_back({p.paragraph.id, p.paragraph.used, p.reserved_by, p.offered});
  }
  j["paragraphs"] = ps;
  json t1 = json::object();
  for (const auto& [id, a] : task1_) {
    t1[id] = {{"worker", a.worker}, {"paragraphs", a.paragraph_ids}, {"issued_at", a.issued_at},
              {"state", to_string(a.state)}};
  }
  j["task1"] = t1;
  json t2 = json::object();
  for (const auto& [id, a] : task2_) {
    t2[id] = {{"worker", a.worker}, {"qa_id", a.qa_id}, {"suggestions", suggestions_json(a.suggestions)},
              {"issued_at", a.issued_at}, {"state", to_string(a.state)}};
  }
  j["task2"] = t2;
  json qa = json::array();
  for (const auto& q : qa_) {
    json x = qa_json(q.qa);
    x["reserved_by"] = q.reserved_by;
    x["processed"] = q.processed;
    qa.push_back(x);
  }
  j["qa"] = qa;
  json recs = json::array();
  for (const auto& r : records_) recs.push_back(json::parse(mc_line(r)));
  j["records"] = recs;
  j["failures"] = failures_;
  j["feedback"] = feedback_;
  ServiceStats s = counters_;
  j["counters"] = s.to_json();
  j["next_ids"] = {next_task1_, next_task2_, next_qa_, next_record_};
  return j;
}

}  // namespace mcqforge
