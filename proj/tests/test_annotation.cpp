#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <set>
#include <thread>

#include "mcqforge/annotation.hpp"
#include "mcqforge/error.hpp"
#include "mcqforge/pos_tagger.hpp"
#include "testkit.hpp"

using namespace mcqforge;

namespace {

struct FakeClock {
  std::shared_ptr<std::atomic<std::int64_t>> now = std::make_shared<std::atomic<std::int64_t>>(1'000'000);
  Clock clock() const {
    auto n = now;
    return [n] { return n->load(); };
  }
  void advance(std::chrono::milliseconds d) { *now += d.count(); }
};

std::vector<Paragraph> paragraphs(std::size_t n) {
  std::vector<Paragraph> out;
  for (std::size_t i = 0; i < n; ++i) {
    Paragraph p;
    p.id = "p" + std::to_string(100 + i);
    p.book_id = "b";
    p.text = "Paragraph " + std::to_string(i) + " explains how rocks slowly turn into soil over time.";
    p.exportable = i % 2 == 0;
    out.push_back(p);
  }
  return out;
}

Suggester fake_suggester() {
  return [](std::string_view, std::string_view) {
    std::vector<RankedSuggestion> s;
    for (int i = 0; i < 6; ++i) s.push_back({"option" + std::to_string(i), 0.9 - 0.1 * i});
    return s;
  };
}

const std::string kQuestion = "What do rocks slowly turn into over a long time?";

Task1Response pick_first(const Task1Assignment& a, const std::string& question = kQuestion) {
  return {a.assignment_id, a.paragraph_ids[0], question, "soil"};
}

template <typename F>
std::string constraint_of(F&& f) {
  try {
    f();
  } catch (const NamedError& e) {
    return e.constraint();
  }
  return "";
}

struct Fixture {
  testkit::TempDir tmp;
  FakeClock clock;
  std::unique_ptr<AnnotationStore> store;

  explicit Fixture(std::size_t n_paragraphs = 9) {
    ServiceOptions o;
    o.clock = clock.clock();
    o.option_seed = 42;
    store = AnnotationStore::create(tmp / "store", paragraphs(n_paragraphs), o);
    store->set_suggester(fake_suggester());
  }
  std::unique_ptr<AnnotationStore> reopen() {
    ServiceOptions o;
    o.clock = clock.clock();
    o.option_seed = 42;
    return AnnotationStore::open(tmp / "store", o);
  }
  QAPair make_qa(const std::string& question = kQuestion) {
    const Task1Assignment a = store->next_task1("w1");
    return *store->submit_task1(pick_first(a, question)).qa;
  }
  Task2Response pass_for(const Task2Assignment& a, std::vector<std::string> selected,
                         std::vector<std::string> written) {
    Task2Response r;
    r.assignment_id = a.assignment_id;
    r.verdict = "pass";
    r.selected = std::move(selected);
    r.written = std::move(written);
    return r;
  }
};

}  // namespace

TEST(Validation, Task1Bounds) {
  const std::array<std::string, 3> offered = {"a", "b", "c"};
  auto check = [&](Task1Response r) { return constraint_of([&] { validate_task1(r, offered); }); };
  EXPECT_EQ(check({"t", "a", "one two three four five six", "x"}), "");
  EXPECT_EQ(check({"t", "a", "one two three four five", "x"}), "question_length");
  std::string thirty;
  for (int i = 0; i < 30; ++i) thirty += "word ";
  EXPECT_EQ(check({"t", "a", thirty, "x"}), "");
  EXPECT_EQ(check({"t", "a", thirty + "more", "x"}), "question_length");
  EXPECT_EQ(check({"t", "a", thirty, "one two three"}), "");
  EXPECT_EQ(check({"t", "a", thirty, "one two three four"}), "answer_length");
  EXPECT_EQ(check({"t", "a", thirty, ""}), "answer_length");
  EXPECT_EQ(check({"t", "z", thirty, "x"}), "invalid_choice");
  EXPECT_EQ(check({"t", std::string(kRejectAll), "", ""}), "");
  EXPECT_EQ(check({"t", std::string(kRejectAll), "some question", ""}), "reject_all_has_question");
}

TEST(Validation, Task2Rules) {
  std::vector<RankedSuggestion> sugg;
  for (const char* s : {"iron", "copper", "zinc", "tin", "lead", "gold"}) sugg.push_back({s, 0.5});
  auto check = [&](Task2Response r) { return constraint_of([&] { validate_task2(r, sugg, "silver"); }); };
  auto pass = [](std::vector<std::string> sel, std::vector<std::string> wr) {
    Task2Response r;
    r.verdict = "pass";
    r.selected = std::move(sel);
    r.written = std::move(wr);
    return r;
  };
  EXPECT_EQ(check(pass({"iron", "zinc"}, {"nickel"})), "");
  EXPECT_EQ(check(pass({}, {"a", "b", "c"})), "");
  EXPECT_EQ(check(pass({"iron", "zinc", "tin"}, {"x"})), "too_many_selected");
  EXPECT_EQ(check(pass({"platinum"}, {"x", "y"})), "unknown_suggestion");
  EXPECT_EQ(check(pass({"iron", "zinc"}, {})), "no_written_distractor");
  EXPECT_EQ(check(pass({"iron"}, {"x", "  "})), "empty_distractor");
  EXPECT_EQ(check(pass({"iron"}, {"x"})), "distractor_count");
  EXPECT_EQ(check(pass({"iron"}, {"Silver", "x"})), "distractor_equals_answer");
  EXPECT_EQ(check(pass({"iron"}, {"iron", "x"})), "duplicate_option");
  Task2Response fin = pass({"iron"}, {"x", "y"});
  fin.final_distractors = std::vector<std::string>{"iron", "x", "q"};
  EXPECT_EQ(check(fin), "final_mismatch");
  fin.final_distractors = std::vector<std::string>{"y", "iron", "x"};
  EXPECT_EQ(check(fin), "");

  Task2Response fail;
  fail.verdict = "fail";
  fail.fail_reason = "too_specific";
  EXPECT_EQ(check(fail), "");
  fail.fail_reason = "boring";
  EXPECT_EQ(check(fail), "invalid_fail_reason");
  Task2Response odd = pass({"iron"}, {"x", "y"});
  odd.verdict = "maybe";
  EXPECT_EQ(check(odd), "invalid_verdict");
}

TEST(Validation, YesNoQuestions) {
  EXPECT_TRUE(looks_like_yes_no("Is the sun a star?"));
  EXPECT_TRUE(looks_like_yes_no("Does it rain in deserts?"));
  EXPECT_TRUE(looks_like_yes_no("Can these plants grow in shade?"));
  EXPECT_FALSE(looks_like_yes_no("What is the sun?"));
  EXPECT_FALSE(looks_like_yes_no("Is"));
  EXPECT_FALSE(looks_like_yes_no("Plants can grow in shade?"));
}

TEST(Store, CreateRefusesAnExistingStore) {
  Fixture f;
  EXPECT_THROW(AnnotationStore::create(f.tmp / "store", paragraphs(3)), ContractViolation);
  EXPECT_THROW(AnnotationStore::open(f.tmp / "missing"), LoadError);
}

TEST(Store, Task1OffersThreeDistinctFreeParagraphs) {
  Fixture f(7);
  const Task1Assignment a = f.store->next_task1("w1");
  const Task1Assignment b = f.store->next_task1("w2");
  std::set<std::string> ids(a.paragraph_ids.begin(), a.paragraph_ids.end());
  ids.insert(b.paragraph_ids.begin(), b.paragraph_ids.end());
  EXPECT_EQ(ids.size(), 6u);
  EXPECT_EQ(a.assignment_id, "t1-000001");
  EXPECT_EQ(b.assignment_id, "t1-000002");
  EXPECT_EQ(constraint_of([&] { f.store->next_task1("w3"); }), "no_work");
  EXPECT_EQ(constraint_of([&] { f.store->next_task1(" "); }), "missing_worker");
}

TEST(Store, ConcurrentRequestsNeverShareParagraphs) {
  Fixture f(3);
  std::atomic<int> got{0};
  std::atomic<int> none{0};
  std::vector<std::thread> ts;
  for (int i = 0; i < 2; ++i) {
    ts.emplace_back([&, i] {
      try {
        f.store->next_task1("w" + std::to_string(i));
        ++got;
      } catch (const NoWork&) {
        ++none;
      }
    });
  }
  for (auto& t : ts) t.join();
  EXPECT_EQ(got, 1);
  EXPECT_EQ(none, 1);
}

TEST(Store, ChosenParagraphIsUsedOthersReturn) {
  Fixture f(3);
  const Task1Assignment a = f.store->next_task1("w1");
  const Task1Result r = f.store->submit_task1(pick_first(a));
  ASSERT_TRUE(r.qa);
  EXPECT_EQ(r.qa->id, "qa-000001");
  EXPECT_EQ(r.qa->paragraph_id, a.paragraph_ids[0]);
  EXPECT_TRUE(f.store->paragraph(a.paragraph_ids[0])->used);
  EXPECT_FALSE(f.store->paragraph(a.paragraph_ids[1])->used);
  EXPECT_EQ(f.store->stats().paragraphs_available, 2u);
  EXPECT_EQ(constraint_of([&] { f.store->next_task1("w1"); }), "no_work");
}

TEST(Store, RejectAllReleasesEveryParagraph) {
  Fixture f(3);
  const Task1Assignment a = f.store->next_task1("w1");
  const Task1Result r = f.store->submit_task1({a.assignment_id, std::string(kRejectAll), "", ""});
  EXPECT_FALSE(r.qa);
  EXPECT_EQ(f.store->stats().task1_rejections, 1u);
  EXPECT_EQ(f.store->stats().paragraphs_available, 3u);
  EXPECT_NO_THROW(f.store->next_task1("w2"));
}

TEST(Store, RejectedTriplesAreNotOfferedStraightBack) {
  Fixture f(6);
  const Task1Assignment a = f.store->next_task1("w1");
  f.store->submit_task1({a.assignment_id, std::string(kRejectAll), "", ""});
  const Task1Assignment b = f.store->next_task1("w1");
  for (const auto& id : b.paragraph_ids) {
    EXPECT_EQ(std::find(a.paragraph_ids.begin(), a.paragraph_ids.end(), id), a.paragraph_ids.end());
  }
}

TEST(Store, InvalidSubmissionsAreCountedAndKeepTheAssignmentOpen) {
  Fixture f;
  const Task1Assignment a = f.store->next_task1("w1");
  EXPECT_EQ(constraint_of([&] { f.store->submit_task1(pick_first(a, "Too short here")); }), "question_length");
  EXPECT_EQ(f.store->stats().invalid_by_constraint.at("question_length"), 1u);
  EXPECT_TRUE(f.store->submit_task1(pick_first(a)).qa);
  EXPECT_EQ(constraint_of([&] { f.store->submit_task1({"t1-999999", "p100", kQuestion, "soil"}); }),
            "unknown_assignment");
}

TEST(Store, ResubmissionIsIdempotentAndConflictsAreNamed) {
  Fixture f;
  const Task1Assignment a = f.store->next_task1("w1");
  const Task1Result first = f.store->submit_task1(pick_first(a));
  const Task1Result again = f.store->submit_task1(pick_first(a));
  EXPECT_TRUE(again.duplicate);
  EXPECT_EQ(again.qa, first.qa);
  EXPECT_EQ(f.store->stats().qa_pairs, 1u);
  Task1Response other = pick_first(a);
  other.answer = "sand";
  EXPECT_EQ(constraint_of([&] { f.store->submit_task1(other); }), "assignment_not_open");
}

TEST(Store, YesNoQuestionsPassWithAWarning) {
  Fixture f;
  const Task1Assignment a = f.store->next_task1("w1");
  const Task1Result r = f.store->submit_task1(pick_first(a, "Is this paragraph about rocks turning into soil?"));
  ASSERT_TRUE(r.qa);
  EXPECT_EQ(r.warnings, (std::vector<std::string>{"yes_no_question"}));
  EXPECT_EQ(f.store->stats().yes_no_warnings, 1u);
}

TEST(Store, AssignmentsExpireAndReturnTheirParagraphs) {
  Fixture f(3);
  const Task1Assignment a = f.store->next_task1("w1");
  f.clock.advance(std::chrono::minutes(29));
  EXPECT_THROW(f.store->next_task1("w2"), NoWork);
  f.clock.advance(std::chrono::minutes(1));
  const Task1Assignment b = f.store->next_task1("w2");
  EXPECT_EQ(f.store->stats().task1_expired, 1u);
  EXPECT_EQ(constraint_of([&] { f.store->submit_task1(pick_first(a)); }), "assignment_not_open");
  EXPECT_TRUE(f.store->submit_task1(pick_first(b)).qa);
}

TEST(Store, Task2NeedsAModelAndWork) {
  testkit::TempDir tmp;
  auto store = AnnotationStore::create(tmp / "s", paragraphs(3));
  EXPECT_EQ(constraint_of([&] { store->next_task2("w"); }), "no_model");
  store->set_suggester(fake_suggester());
  EXPECT_EQ(constraint_of([&] { store->next_task2("w"); }), "no_work");
}

TEST(Store, BadSuggestionsAreAConfigError) {
  Fixture f;
  f.make_qa();
  f.store->set_suggester([](std::string_view, std::string_view) {
    return std::vector<RankedSuggestion>{{"soil", 0.9}, {"a", 0.8}, {"b", 0.7}, {"c", 0.6}, {"d", 0.5}, {"e", 0.4}};
  });
  EXPECT_EQ(constraint_of([&] { f.store->next_task2("w"); }), "bad_suggestions");
  f.store->set_suggester(fake_suggester());
  EXPECT_NO_THROW(f.store->next_task2("w"));
}

TEST(Store, Task2PassBuildsARecordInSelectionOrder) {
  Fixture f;
  const QAPair qa = f.make_qa();
  const Task2Assignment a = f.store->next_task2("w2");
  EXPECT_EQ(a.qa_id, qa.id);
  ASSERT_EQ(a.suggestions.size(), kSuggestionCount);
  const Task2Result r = f.store->submit_task2(f.pass_for(a, {"option0", "option3"}, {" clay "}));
  ASSERT_TRUE(r.record);
  const MCQRecord& rec = *r.record;
  EXPECT_EQ(rec.id, "mcq-000001");
  EXPECT_EQ(rec.correct_answer, "soil");
  EXPECT_EQ(rec.distractors[0], (Distractor{"option0", Origin::Model}));
  EXPECT_EQ(rec.distractors[1], (Distractor{"option3", Origin::Model}));
  EXPECT_EQ(rec.distractors[2], (Distractor{"clay", Origin::Human}));
  EXPECT_EQ(rec.option_seed, 42 ^ stable_hash(rec.id));
  EXPECT_TRUE(check_record(rec).empty());
  const ServiceStats s = f.store->stats();
  EXPECT_EQ(s.records, 1u);
  EXPECT_EQ(s.model_distractors, 2u);
  EXPECT_DOUBLE_EQ(s.model_origin_fraction(), 2.0 / 3.0);
  EXPECT_EQ(constraint_of([&] { f.store->next_task2("w2"); }), "no_work");
}

TEST(Store, SupportIsPresentOnlyForExportableParagraphs) {
  Fixture f(6);
  for (int i = 0; i < 2; ++i) {
    const Task1Assignment a = f.store->next_task1("w");
    f.store->submit_task1(pick_first(a));
  }
  for (int i = 0; i < 2; ++i) {
    const Task2Assignment a = f.store->next_task2("w");
    f.store->submit_task2(f.pass_for(a, {}, {"x", "y", "z"}));
  }
  for (const MCQRecord& r : f.store->records()) {
    const auto p = f.store->paragraph(r.paragraph_id);
    ASSERT_TRUE(p);
    EXPECT_EQ(r.support.has_value(), p->exportable) << r.id;
    if (r.support) EXPECT_EQ(*r.support, p->text);
  }
}

TEST(Store, Task2FailIsRecordedWithItsReason) {
  Fixture f;
  f.make_qa();
  const Task2Assignment a = f.store->next_task2("w");
  Task2Response r;
  r.assignment_id = a.assignment_id;
  r.verdict = "fail";
  r.fail_reason = "false_answer";
  const Task2Result res = f.store->submit_task2(r);
  EXPECT_FALSE(res.record);
  EXPECT_EQ(res.fail_reason, "false_answer");
  EXPECT_TRUE(f.store->submit_task2(r).duplicate);
  EXPECT_EQ(f.store->stats().fail_by_reason.at("false_answer"), 1u);
  EXPECT_DOUBLE_EQ(f.store->stats().pass_rate(), 0.0);
}

TEST(Store, ExpiredTask2ReturnsThePairToTheQueue) {
  Fixture f;
  f.make_qa();
  const Task2Assignment a = f.store->next_task2("w1");
  EXPECT_THROW(f.store->next_task2("w2"), NoWork);
  f.clock.advance(std::chrono::minutes(31));
  const Task2Assignment b = f.store->next_task2("w2");
  EXPECT_EQ(b.qa_id, a.qa_id);
  EXPECT_EQ(constraint_of([&] { f.store->submit_task2(f.pass_for(a, {}, {"x", "y", "z"})); }),
            "assignment_not_open");
}

TEST(Store, SuggestionsAreComputedOutsideTheLock) {
  Fixture f;
  f.make_qa();
  f.make_qa();
  std::atomic<bool> entered{false};
  std::atomic<bool> release{false};
  f.store->set_suggester([&](std::string_view q, std::string_view a) {
    entered = true;
    while (!release) std::this_thread::yield();
    return fake_suggester()(q, a);
  });
  std::thread slow([&] { f.store->next_task2("w1"); });
  while (!entered) std::this_thread::yield();
  // the store stays readable and writable while ranking runs
  EXPECT_EQ(f.store->stats().qa_pairs, 2u);
  EXPECT_NO_THROW(f.store->add_feedback("w3", "tasks are clear"));
  release = true;
  slow.join();
  EXPECT_EQ(f.store->stats().task2_issued, 1u);
  EXPECT_EQ(f.store->stats().feedback, 1u);
}

TEST(Store, RejectionRateUnderScriptedTraffic) {
  Fixture f(300);
  for (int i = 0; i < 100; ++i) {
    const Task1Assignment a = f.store->next_task1("w");
    if (i % 25 < 3) {
      f.store->submit_task1({a.assignment_id, std::string(kRejectAll), "", ""});
    } else {
      f.store->submit_task1(pick_first(a));
    }
  }
  const ServiceStats s = f.store->stats();
  EXPECT_EQ(s.task1_responses, 100u);
  EXPECT_EQ(s.task1_rejections, 12u);
  EXPECT_DOUBLE_EQ(s.rejection_rate(), 0.12);
  EXPECT_EQ(s.qa_pairs, 88u);
  EXPECT_EQ(s.to_json().at("task1_rejections"), 12);
}

TEST(Store, ReplayRestoresTheSameState) {
  Fixture f;
  for (int i = 0; i < 2; ++i) f.make_qa();
  const Task1Assignment open1 = f.store->next_task1("w");
  EXPECT_THROW(f.store->submit_task1(pick_first(open1, "short")), ValidationError);
  const Task2Assignment a = f.store->next_task2("w");
  f.store->submit_task2(f.pass_for(a, {"option1"}, {"x", "y"}));
  f.store->next_task2("w");
  f.store->add_feedback("w", "more maps please");
  const auto before = f.store->snapshot();
  f.store.reset();
  auto back = f.reopen();
  EXPECT_EQ(back->snapshot(), before);
  EXPECT_EQ(back->records().size(), 1u);
  // counters continue after replay
  back->submit_task1(pick_first(open1));
  EXPECT_EQ(back->qa_pairs().back().id, "qa-000003");
}

TEST(Store, TornFinalJournalLineIsDropped) {
  Fixture f;
  f.make_qa();
  const auto before = f.store->snapshot();
  f.store.reset();
  {
    std::ofstream j(f.tmp / "store" / "journal.jsonl", std::ios::app | std::ios::binary);
    j << R"({"type":"task1_issued","id":"t1-0)";
  }
  auto back = f.reopen();
  EXPECT_EQ(back->snapshot(), before);
  EXPECT_NO_THROW(back->next_task1("w"));
  back.reset();
  EXPECT_NO_THROW(f.reopen());
}

TEST(Store, CorruptJournalInTheMiddleFailsToOpen) {
  Fixture f;
  f.make_qa();
  f.store.reset();
  {
    std::ofstream j(f.tmp / "store" / "journal.jsonl", std::ios::app | std::ios::binary);
    j << "{broken\n" << R"({"type":"feedback","worker":"w","text":"x","seq":99})" << "\n";
  }
  EXPECT_THROW(f.reopen(), LoadError);
}

TEST(Store, FeedbackNeedsText) {
  Fixture f;
  EXPECT_EQ(constraint_of([&] { f.store->add_feedback("w", "  "); }), "empty_feedback");
  f.store->add_feedback("w", "fine");
  EXPECT_EQ(f.store->stats().feedback, 1u);
}

TEST(Store, ExactlyThreeParagraphsAreAllOffered) {
  Fixture f(3);
  const Task1Assignment a = f.store->next_task1("w1");
  std::set<std::string> ids(a.paragraph_ids.begin(), a.paragraph_ids.end());
  EXPECT_EQ(ids, (std::set<std::string>{"p100", "p101", "p102"}));
}

TEST(Store, SingleQueuedPairComesWithSixSuggestions) {
  Fixture f;
  const QAPair qa = f.make_qa();
  const Task2Assignment a = f.store->next_task2("w");
  EXPECT_EQ(a.qa_id, qa.id);
  EXPECT_EQ(a.suggestions.size(), 6u);
  EXPECT_EQ(a.assignment_id, "t2-000001");
}
