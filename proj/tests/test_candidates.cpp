#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "mcqforge/candidates.hpp"
#include "mcqforge/error.hpp"
#include "mcqforge/pos_tagger.hpp"
#include "mcqforge/text.hpp"
#include "testkit.hpp"

using namespace mcqforge;

TEST(Universe, MergesSourcesByNormalizedSurface) {
  const CandidateUniverse u = build_universe({
      {CandidateSource::EmbeddingVocab, {"atom", "Ion", "  proton "}},
      {CandidateSource::ObservedDistractor, {"ion", "red blood cell"}},
  });
  ASSERT_EQ(u.size(), 4u);
  const CandidateEntry* ion = u.find("ION");
  ASSERT_NE(ion, nullptr);
  EXPECT_EQ(ion->surface, "ion");
  EXPECT_TRUE(ion->has(CandidateSource::EmbeddingVocab));
  EXPECT_TRUE(ion->has(CandidateSource::ObservedDistractor));
  EXPECT_EQ(ion->source_list().size(), 2u);
  EXPECT_NE(u.find("proton"), nullptr);
  EXPECT_EQ(u.find("red blood cell")->tokens.size(), 3u);
  EXPECT_EQ(u.containing("blood").size(), 1u);
  EXPECT_TRUE(u.containing("nothing").empty());
}

TEST(Universe, EmptySourceListIsAContractViolation) {
  EXPECT_THROW(build_universe({}), ContractViolation);
}

TEST(Universe, SaveLoadRoundTrip) {
  testkit::TempDir dir;
  const CandidateUniverse u = build_universe({
      {CandidateSource::SchoolVocab, {"magma", "lava flow"}},
      {CandidateSource::KbNounPhrase, {"lava flow", "crust"}},
  });
  u.save(dir / "u.txt");
  const CandidateUniverse v = CandidateUniverse::load(dir / "u.txt");
  ASSERT_EQ(v.size(), u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    EXPECT_EQ(v.entries()[i].surface, u.entries()[i].surface);
    EXPECT_EQ(v.entries()[i].sources, u.entries()[i].sources);
  }
  {
    std::ofstream f(dir / "bad.txt");
    f << "not a universe\n";
  }
  EXPECT_THROW(CandidateUniverse::load(dir / "bad.txt"), LoadError);
}

TEST(Vocabulary, EmbeddingFilesKeepOnlyTheToken) {
  testkit::TempDir dir;
  {
    std::ofstream f(dir / "e.txt");
    f << "atom 0.1 0.2\nion 0.3 0.4\n";
  }
  const VocabularySource v = load_vocabulary(dir / "e.txt", CandidateSource::EmbeddingVocab);
  EXPECT_EQ(v.expressions, (std::vector<std::string>{"atom", "ion"}));
}

TEST(ExpandMultiword, SubstitutesOneTokenAtATime) {
  const std::vector<std::string> vocab = {"white", "red", "cell"};
  const auto out = expand_multiword("red blood cell", vocab, 100);
  EXPECT_EQ(out, (std::vector<std::string>{"white blood cell", "cell blood cell", "red white cell", "red red cell",
                                           "red cell cell", "red blood white", "red blood red"}));
  EXPECT_EQ(expand_multiword("red blood cell", vocab, 2).size(), 2u);
  EXPECT_TRUE(expand_multiword("atom", vocab, 100).empty());
}

TEST(SubstitutionVocabulary, SingleTokenNounsFromSchoolAndObserved) {
  PosTagger tagger;
  tagger.add_entry("cell", {PosTag::Noun});
  tagger.add_entry("quickly", {PosTag::Adv});
  const CandidateUniverse u = build_universe({
      {CandidateSource::SchoolVocab, {"cell", "quickly", "white blood"}},
      {CandidateSource::EmbeddingVocab, {"nucleus"}},
      {CandidateSource::ObservedDistractor, {"plasma"}},
  });
  EXPECT_EQ(substitution_vocabulary(u, tagger), (std::vector<std::string>{"cell", "plasma"}));
}

TEST(Universe, SmallUnion) {
  const CandidateUniverse u = build_universe({{CandidateSource::SchoolVocab, {"cat", "dog"}},
                                              {CandidateSource::KbNounPhrase, {"dog", "fish"}}});
  EXPECT_EQ(u.size(), 3u);
  EXPECT_TRUE(u.find("dog")->has(CandidateSource::SchoolVocab));
  EXPECT_TRUE(u.find("dog")->has(CandidateSource::KbNounPhrase));
}

TEST(Universe, ToyVocabulariesMatchSetUnion) {
  std::vector<std::string> a;
  std::vector<std::string> b;
  std::vector<std::string> c;
  for (int i = 0; i < 1000; ++i) a.push_back("word" + std::to_string(i));
  // 20 of the later entries repeat words from the first list
  for (int i = 0; i < 50; ++i) b.push_back(i < 10 ? "word" + std::to_string(i) : "term" + std::to_string(i));
  for (int i = 0; i < 30; ++i) c.push_back(i < 10 ? "WORD" + std::to_string(500 + i) : "phrase " + std::to_string(i));
  std::set<std::string> oracle;
  for (const auto* v : {&a, &b, &c}) {
    for (const auto& s : *v) oracle.insert(normalize_expression(s));
  }
  const CandidateUniverse u = build_universe({{CandidateSource::EmbeddingVocab, a},
                                              {CandidateSource::SchoolVocab, b},
                                              {CandidateSource::ObservedDistractor, c}});
  EXPECT_EQ(oracle.size(), 1060u);
  EXPECT_EQ(u.size(), oracle.size());
}

TEST(ExpandMultiword, TwoTokenAnswer) {
  const auto out = expand_multiword("activation energy", {"decomposition", "heat"}, 100);
  EXPECT_NE(std::find(out.begin(), out.end(), "decomposition energy"), out.end());
}

TEST(ExpandMultiword, CountsMatchEnumeration) {
  const std::vector<std::string> nouns = {"red", "white", "blood", "cell", "plasma",
                                          "bone", "skin", "nerve", "muscle", "organ"};
  const std::string answer = "red blood cell";
  std::set<std::string> oracle;
  const std::vector<std::string> toks = {"red", "blood", "cell"};
  for (std::size_t pos = 0; pos < 3; ++pos) {
    for (const auto& n : nouns) {
      auto t = toks;
      t[pos] = n;
      const std::string s = t[0] + " " + t[1] + " " + t[2];
      if (s != answer) oracle.insert(s);
    }
  }
  const auto out = expand_multiword(answer, nouns, 1000);
  EXPECT_EQ(out.size(), 27u);
  EXPECT_EQ(std::set<std::string>(out.begin(), out.end()), oracle);
  EXPECT_TRUE(expand_multiword("nitrogen", nouns, 1000).empty());
}
