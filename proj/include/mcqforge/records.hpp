#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mcqforge {

enum class Origin : std::uint8_t { Model, Human };
enum class Split : std::uint8_t { Unassigned, Train, Validation, Test };

std::string_view to_string(Origin o);
std::string_view to_string(Split s);
std::optional<Origin> parse_origin(std::string_view s);
std::optional<Split> parse_split(std::string_view s);

struct Distractor {
  std::string text;
  Origin origin = Origin::Human;
  bool operator==(const Distractor&) const = default;
};

struct QAPair {
  std::string id;
  std::string question;
  std::string answer;
  std::string paragraph_id;
  bool exportable = true;
  bool operator==(const QAPair&) const = default;
};

struct MCQRecord {
  std::string id;
  std::string question;
  std::string correct_answer;
  std::array<Distractor, 3> distractors;
  std::optional<std::string> support;
  Split split = Split::Unassigned;
  std::string paragraph_id;
  /// Seed of the option shuffle used by the mc export.
  std::uint64_t option_seed = 0;

  bool operator==(const MCQRecord&) const = default;
};

/// Empty when the record satisfies every invariant; otherwise one message per
/// violation (option count and distinctness, origin counts).
std::vector<std::string> check_record(const MCQRecord& r);

/// The four options in presentation order and the index of the answer.
struct OptionOrder {
  std::array<std::string, 4> options;
  std::size_t answer_index = 0;
};
OptionOrder shuffled_options(const MCQRecord& r);

/// Stable 64-bit FNV-1a hash.
std::uint64_t stable_hash(std::string_view s);

struct ExportCounts {
  std::size_t written = 0;
  std::size_t skipped = 0;
  std::array<std::size_t, 4> per_split{};  // indexed by Split
  std::size_t answer_not_in_passage = 0;
};

/// One JSON object per line with `question, correct_answer, distractor1..3,
/// support` plus `id, split, origins, options, answer_index, option_seed,
/// paragraph_id`.
ExportCounts export_mc(const std::vector<MCQRecord>& records, const std::filesystem::path& out);
std::string mc_line(const MCQRecord& r);
MCQRecord parse_mc_line(std::string_view line);
std::vector<MCQRecord> import_mc(const std::filesystem::path& in);

/// `passage, question, answer` plus `id, split, answer_in_passage`; only
/// records with a support passage are written.
ExportCounts export_direct_answer(const std::vector<MCQRecord>& records, const std::filesystem::path& out);

}  // namespace mcqforge
