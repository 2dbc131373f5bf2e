#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcqforge/corpus.hpp"
#include "mcqforge/error.hpp"
#include "mcqforge/ranker.hpp"
#include "mcqforge/records.hpp"

namespace mcqforge {

inline constexpr std::string_view kRejectAll = "REJECT_ALL";
inline constexpr std::size_t kSuggestionCount = 6;
inline constexpr std::array<std::string_view, 4> kFailReasons = {"ungrammatical", "false_answer",
                                                                 "unrelated_to_science", "too_specific"};

/// Milliseconds since the epoch.
using Clock = std::function<std::int64_t()>;
Clock system_clock();

/// (q, a*) -> ranked suggestions. Deployed with a DistractorRanker; tests
/// may inject anything.
using Suggester = std::function<std::vector<RankedSuggestion>(std::string_view q, std::string_view a_star)>;
Suggester ranker_suggester(std::shared_ptr<const DistractorRanker> ranker);

struct ServiceOptions {
  std::chrono::milliseconds timeout = std::chrono::minutes(30);
  /// Mixed into every record's option seed.
  std::uint64_t option_seed = 0;
  Clock clock = system_clock();
};

enum class AssignmentState : std::uint8_t { Open, Submitted, Expired };
std::string_view to_string(AssignmentState s);

struct Task1Assignment {
  std::string assignment_id;
  std::string worker;
  std::array<std::string, 3> paragraph_ids;
  std::int64_t issued_at = 0;
  AssignmentState state = AssignmentState::Open;
};

struct Task1Response {
  std::string assignment_id;
  std::string choice;  // paragraph id or kRejectAll
  std::string question;
  std::string answer;
};

struct Task1Result {
  std::optional<QAPair> qa;  // absent on REJECT_ALL
  std::vector<std::string> warnings;
  bool duplicate = false;  // identical resubmission of an applied response
};

struct Task2Assignment {
  std::string assignment_id;
  std::string worker;
  std::string qa_id;
  std::vector<RankedSuggestion> suggestions;
  std::int64_t issued_at = 0;
  AssignmentState state = AssignmentState::Open;
};

struct Task2Response {
  std::string assignment_id;
  std::string verdict;  // "pass" or "fail"
  std::string fail_reason;
  std::vector<std::string> selected;
  std::vector<std::string> written;
  std::optional<std::vector<std::string>> final_distractors;
};

struct Task2Result {
  std::optional<MCQRecord> record;  // absent on a fail verdict
  std::string fail_reason;
  bool duplicate = false;
};

struct ServiceStats {
  std::size_t paragraphs_total = 0;
  std::size_t paragraphs_used = 0;
  std::size_t paragraphs_available = 0;
  std::size_t task1_issued = 0;
  std::size_t task1_responses = 0;
  std::size_t task1_rejections = 0;
  std::size_t task1_expired = 0;
  std::size_t yes_no_warnings = 0;
  std::size_t qa_pairs = 0;
  std::size_t qa_queued = 0;
  std::size_t task2_issued = 0;
  std::size_t task2_pass = 0;
  std::size_t task2_fail = 0;
  std::size_t task2_expired = 0;
  std::size_t records = 0;
  std::size_t model_distractors = 0;
  std::size_t feedback = 0;
  std::map<std::string, std::size_t> invalid_by_constraint;
  std::map<std::string, std::size_t> fail_by_reason;

  double rejection_rate() const;
  double pass_rate() const;
  /// Share of model-origin distractors among all distractors; at most 2/3.
  double model_origin_fraction() const;
  nlohmann::json to_json() const;
};

/// Word-count and distinctness checks shared by the store and any client.
/// Each throws ValidationError naming the constraint.
void validate_task1(const Task1Response& r, const std::array<std::string, 3>& offered);
void validate_task2(const Task2Response& r, const std::vector<RankedSuggestion>& suggestions,
                    std::string_view correct_answer);

/// True when the question opens with a form of be/do/have/can/will followed
/// by a pronoun or determiner.
bool looks_like_yes_no(std::string_view question);

/// Event-sourced state of the two annotation tasks. Every transition is
/// appended to `<dir>/journal.jsonl` before it is applied; opening a store
/// replays the journal. Accepted paragraphs live in `<dir>/paragraphs.jsonl`.
class AnnotationStore {
public:
  /// Creates `dir` with the given accepted paragraphs and an empty journal.
  /// Throws ContractViolation when the directory already holds a store.
  static std::unique_ptr<AnnotationStore> create(const std::filesystem::path& dir,
                                                 const std::vector<Paragraph>& paragraphs,
                                                 ServiceOptions options = {});
  static std::unique_ptr<AnnotationStore> open(const std::filesystem::path& dir, ServiceOptions options = {});

  AnnotationStore(const AnnotationStore&) = delete;
  AnnotationStore& operator=(const AnnotationStore&) = delete;

  void set_suggester(Suggester s);
  bool has_suggester() const;

  /// Throws NoWork when fewer than three paragraphs are free.
  Task1Assignment next_task1(const std::string& worker);
  Task1Result submit_task1(const Task1Response& r);

  /// Throws ConfigError without a suggester and NoWork on an empty queue.
  Task2Assignment next_task2(const std::string& worker);
  Task2Result submit_task2(const Task2Response& r);

  void add_feedback(const std::string& worker, const std::string& text);

  ServiceStats stats() const;
  std::vector<MCQRecord> records() const;
  std::vector<QAPair> qa_pairs() const;
  std::optional<Paragraph> paragraph(const std::string& id) const;

  /// Full logical state (paragraph flags, assignments, pairs, records,
  /// counters) as canonical JSON; equal snapshots mean equal stores.
  nlohmann::json snapshot() const;

  const std::filesystem::path& dir() const { return dir_; }

private:
  struct ParagraphState {
    Paragraph paragraph;
    std::string reserved_by;
    std::size_t offered = 0;
  };
  struct QAState {
    QAPair qa;
    std::string reserved_by;
    bool processed = false;
  };

  AnnotationStore(std::filesystem::path dir, std::vector<Paragraph> paragraphs, ServiceOptions options);

  void commit(nlohmann::json event);
  void apply(const nlohmann::json& event);
  void expire_due(std::int64_t now);
  [[noreturn]] void reject(const NamedError& e, std::string_view task, const std::string& assignment_id);

  std::filesystem::path dir_;
  ServiceOptions options_;
  Suggester suggester_;
  std::ofstream journal_;
  std::uint64_t seq_ = 0;

  mutable std::shared_mutex mutex_;
  std::vector<ParagraphState> paragraphs_;
  std::map<std::string, std::size_t> paragraph_index_;
  std::map<std::string, Task1Assignment> task1_;
  std::map<std::string, nlohmann::json> task1_responses_;
  std::map<std::string, Task2Assignment> task2_;
  std::map<std::string, nlohmann::json> task2_responses_;
  std::vector<QAState> qa_;
  std::map<std::string, std::size_t> qa_index_;
  std::set<std::size_t> qa_pending_;  // picked, suggestions being computed
  std::vector<MCQRecord> records_;
  std::vector<std::pair<std::string, std::string>> failures_;  // qa id, reason
  std::vector<std::pair<std::string, std::string>> feedback_;  // worker, text
  ServiceStats counters_;
  std::size_t next_task1_ = 1;
  std::size_t next_task2_ = 1;
  std::size_t next_qa_ = 1;
  std::size_t next_record_ = 1;
};

}  // namespace mcqforge
