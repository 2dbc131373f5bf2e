#include <gtest/gtest.h>

#include "mcqforge/corpus.hpp"
#include "mcqforge/error.hpp"
#include "mcqforge/pos_tagger.hpp"
#include "testkit.hpp"

using namespace mcqforge;

namespace {

std::vector<std::string> surfaces(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

ManifestEntry entry(bool exportable = true) { return {"b1", "Book", "b1.txt", exportable}; }

}  // namespace

TEST(Tokenize, SplitsPunctuation) {
  EXPECT_EQ(surfaces(tokenize("Water boils.")), (std::vector<std::string>{"Water", "boils", "."}));
  EXPECT_EQ(surfaces(tokenize("H2O, or water")), (std::vector<std::string>{"H2O", ",", "or", "water"}));
}

TEST(Tokenize, KeepsInnerHyphensApostrophesAndDecimals) {
  EXPECT_EQ(surfaces(tokenize("Earth's well-known 3.5 km")),
            (std::vector<std::string>{"Earth's", "well-known", "3.5", "km"}));
}

TEST(Tokenize, EighteenTokenSentence) {
  // 16 words, a comma and the period
  const auto t = tokenize("Plants use light, water and carbon dioxide to make sugar in the leaves of the stem.");
  EXPECT_EQ(t.size(), 18u);
}

TEST(Tokenize, SpansAreOrderedAndReconstructText) {
  const std::string text = "Ice melts at 0 degrees (Celsius), doesn't it?";
  const auto tokens = tokenize(text);
  std::size_t prev_end = 0;
  for (const Token& t : tokens) {
    EXPECT_GE(t.char_span.start, prev_end);
    EXPECT_LE(t.char_span.end, text.size());
    EXPECT_EQ(text.substr(t.char_span.start, t.char_span.end - t.char_span.start), t.surface);
    EXPECT_EQ(t.lower, casefold(t.surface));
    prev_end = t.char_span.end;
  }
}

TEST(SplitSentences, Examples) {
  EXPECT_EQ(split_sentences("It rains. It pours."), (std::vector<std::string>{"It rains.", "It pours."}));
  EXPECT_EQ(split_sentences("Dr. Smith ran.").size(), 1u);
  EXPECT_EQ(split_sentences("What is energy? Energy is capacity to do work.").size(), 2u);
  EXPECT_EQ(split_sentences("It boils at 100 degrees. 5 grams remain.").size(), 2u);
  EXPECT_EQ(split_sentences("Look at e.g. the sun.").size(), 1u);
}

TEST(SplitSentences, AbbreviationListIsRespected) {
  Lexicon none;
  EXPECT_EQ(split_sentences("Dr. Smith ran.", none).size(), 2u);
  const Lexicon& defaults = default_abbreviations();
  EXPECT_TRUE(defaults.contains("dr."));
  EXPECT_TRUE(defaults.contains("e.g."));
}

TEST(SplitSentences, LosesNoText) {
  const std::string text = "One. Two!  Three?\nFour, five.";
  std::string joined;
  for (const auto& s : split_sentences(text)) joined += s;
  std::string squeezed;
  for (char c : text) {
    if (!is_ascii_space(c)) squeezed += c;
  }
  std::string jsq;
  for (char c : joined) {
    if (!is_ascii_space(c)) jsq += c;
  }
  EXPECT_EQ(jsq, squeezed);
}

TEST(IngestBook, TwoParagraphsAndEmpty) {
  const PosTagger& tagger = PosTagger::shared();
  const auto ps = ingest_book("First one here.\n\nSecond one here.", entry(false), tagger, default_abbreviations());
  ASSERT_EQ(ps.size(), 2u);
  for (const auto& p : ps) {
    EXPECT_EQ(p.book_id, "b1");
    EXPECT_FALSE(p.exportable);
    EXPECT_FALSE(p.used);
  }
  EXPECT_TRUE(ingest_book("", entry(), tagger, default_abbreviations()).empty());
}

TEST(IngestBook, InvalidUtf8NamesOffset) {
  const std::string bad = std::string("Good text. ") + "\xC3\x28" + " more";
  try {
    ingest_book(bad, entry(), PosTagger::shared(), default_abbreviations());
    FAIL() << "expected IngestError";
  } catch (const IngestError& e) {
    EXPECT_EQ(e.offset(), 11u);
  }
}

TEST(IngestBook, FixtureBookMatchesHandCount) {
  const auto manifest = CorpusManifest::load(testkit::fixture_dir() / "book" / "manifest.tsv");
  ASSERT_EQ(manifest.entries.size(), 1u);
  const auto& e = manifest.entries[0];
  const auto ps = ingest_book(read_file(e.source), e, PosTagger::shared(), default_abbreviations());
  std::vector<std::size_t> expected;
  for (const auto& line : read_lines(testkit::fixture_dir() / "book" / "counts.tsv")) {
    if (line.empty() || line[0] == '#') continue;
    expected.push_back(std::stoul(split(line, '\t')[1]));
  }
  ASSERT_EQ(ps.size(), 10u);
  ASSERT_EQ(expected.size(), 10u);
  std::size_t total = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    EXPECT_EQ(ps[i].sentences.size(), expected[i]) << "paragraph " << i + 1;
    total += ps[i].sentences.size();
  }
  EXPECT_EQ(total, 43u);
}

TEST(IngestBook, DeterministicTaggedAndRoundTrips) {
  const auto manifest = CorpusManifest::load(testkit::fixture_dir() / "book" / "manifest.tsv");
  const std::string text = read_file(manifest.entries[0].source);
  const auto a = ingest_book(text, manifest.entries[0], PosTagger::shared(), default_abbreviations());
  const auto b = ingest_book(text, manifest.entries[0], PosTagger::shared(), default_abbreviations());
  EXPECT_EQ(a, b);
  for (const Paragraph& p : a) {
    std::vector<std::string> texts;
    for (const Sentence& s : p.sentences) {
      texts.push_back(s.text);
      EXPECT_EQ(s.paragraph_id, p.id);
      ASSERT_FALSE(s.tokens.empty());
      for (const Token& t : s.tokens) EXPECT_NE(t.pos, PosTag::None) << t.surface;
    }
    EXPECT_EQ(collapse_whitespace(join(texts, " ")), collapse_whitespace(p.text));
  }
}

TEST(ParagraphStore, RoundTrip) {
  testkit::TempDir dir;
  const auto manifest = CorpusManifest::load(testkit::fixture_dir() / "book" / "manifest.tsv");
  auto ps = ingest_book(read_file(manifest.entries[0].source), manifest.entries[0], PosTagger::shared(),
                        default_abbreviations());
  ps[2].used = true;
  write_paragraph_store(dir / "p.jsonl", ps);
  EXPECT_EQ(read_paragraph_store(dir / "p.jsonl"), ps);
}

TEST(Manifest, RejectsDuplicateBookIds) {
  testkit::TempDir dir;
  {
    std::ofstream f(dir / "m.tsv");
    f << "a\tA\ta.txt\t1\na\tB\tb.txt\t0\n";
  }
  EXPECT_THROW(CorpusManifest::load(dir / "m.tsv"), LoadError);
}

TEST(PosTagger, ClosedClass) {
  std::vector<Token> t = tokenize("could this");
  PosTagger::shared().tag(t);
  EXPECT_EQ(t[0].pos, PosTag::Modal);
  EXPECT_EQ(t[1].pos, PosTag::Pron);
  EXPECT_TRUE(t[1].demonstrative);
  std::vector<Token> u = tokenize("this rock");
  PosTagger::shared().tag(u);
  EXPECT_EQ(u[0].pos, PosTag::Det);
  EXPECT_TRUE(u[0].demonstrative);
}

TEST(PosTagger, SuffixFallback) {
  std::vector<Token> t = tokenize("the glorbness glorbly");
  PosTagger().tag(t);
  EXPECT_EQ(t[1].pos, PosTag::Noun);
  EXPECT_EQ(t[2].pos, PosTag::Adv);
}

TEST(PosTagger, HandTaggedFixtureAccuracy) {
  std::size_t right = 0;
  std::size_t total = 0;
  for (const auto& sentence : testkit::pos_fixture()) {
    std::string text;
    for (const auto& [w, tag] : sentence) text += (text.empty() ? "" : " ") + w;
    Sentence s = make_sentence(text, PosTagger::shared());
    ASSERT_EQ(s.tokens.size(), sentence.size()) << text;
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      ++total;
      right += to_string(s.tokens[i].pos) == sentence[i].second ? 1 : 0;
    }
  }
  EXPECT_GE(total, 200u);
  EXPECT_GE(static_cast<double>(right) / static_cast<double>(total), 0.90);
}
