#pragma once

// bAbI story files, the multi-word replacement table, vocabularies and
// train/validation splitting.
//
// Story file layout, one line each, UTF-8 with LF endings:
//   <n> <sentence>
//   <n> <question>\t<answer>[\t<supporting line numbers>]
// A line number of 1, or one not greater than the previous, starts a new
// story.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ltmn::corpus {

using Tokens = std::vector<std::string>;

// Lowercases, splits on whitespace and detaches '.', '?' and ',' as tokens.
Tokens tokenize(std::string_view sentence);
// Answer field: lowercased, split on whitespace and commas ("apple,milk" is
// two tokens).
Tokens tokenize_answer(std::string_view answer);

struct StoryLine {
  std::size_t number = 0;
  std::string text;                 // as written, without the number
  Tokens tokens;
  bool is_question = false;
  std::string answer_text;          // raw answer field (questions only)
  Tokens answer;
  std::vector<std::size_t> supporting_ids;
};

struct Story {
  std::size_t id = 0;               // 0-based position in the file
  std::vector<StoryLine> lines;
};

std::vector<Story> parse_babi(std::istream& in);
std::vector<Story> parse_babi_string(std::string_view text);
std::string serialize_babi(const std::vector<Story>& stories);

struct QAInstance {
  std::vector<Tokens> context;      // statements preceding the question, in order
  Tokens question;
  Tokens answer;                    // 1..L tokens, no <EOS>
  std::vector<std::size_t> supporting_ids;  // diagnostics only
  std::size_t story_id = 0;
  std::size_t line_no = 0;
};

// One instance per question line. Throws ParseError for a question that has
// no preceding statement in its story.
std::vector<QAInstance> to_instances(const std::vector<Story>& stories);
std::vector<QAInstance> load_instances(const std::string& path);

std::size_t count_questions(const std::vector<Story>& stories);

class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr std::size_t kBoa = 2;
  static constexpr std::size_t kEos = 3;
  static constexpr std::size_t kReserved = 4;

  Vocabulary();
  // Rebuilds a vocabulary from its index->token list; the first four entries
  // must be the reserved tokens.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  std::size_t add(const std::string& token);
  // Unknown tokens resolve to <UNK>.
  std::size_t index(const std::string& token) const;
  std::optional<std::size_t> find(const std::string& token) const;
  bool contains(const std::string& token) const { return find(token).has_value(); }
  const std::string& token(std::size_t index) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<std::size_t> encode(const Tokens& tokens) const;
  Tokens decode(const std::vector<std::size_t>& indices) const;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline const char* const kPadToken = "<PAD>";
inline const char* const kUnkToken = "<UNK>";
inline const char* const kBoaToken = "<BOA>";
inline const char* const kEosToken = "<EOS>";

// Reserved tokens first, then every context/question/answer token in order
// of first occurrence.
Vocabulary build_vocabulary(const std::vector<QAInstance>& instances);

// Seeded shuffle, then the first round(fraction * N) shuffled instances form
// the validation set. Both halves keep their original relative order.
std::pair<std::vector<QAInstance>, std::vector<QAInstance>> split_train_validation(
    const std::vector<QAInstance>& instances, double fraction, std::uint64_t seed);

struct ReplacementTable {
  std::vector<std::pair<std::string, std::string>> entries;

  // The twelve word -> phrase replacements that turn single-word bAbI answers
  // into multi-word ones.
  static ReplacementTable multiword_default();
  // Throws ContractError if originals repeat, a phrase is empty, no phrase has
  // two or more words, or a phrase contains a *different* original as a whole
  // word (which would make repeated application diverge).
  void validate() const;
};

// One `original<TAB>replacement phrase` per line; blank lines are skipped.
ReplacementTable load_replacement_table(std::istream& in);

// Whole-word, case-sensitive replacement. An occurrence that already sits
// inside its own replacement phrase ("Bill" within "Bill Gates") is left
// alone, which makes the transform idempotent.
std::string apply_replacements(std::string_view text, const ReplacementTable& table);

// Number of replaced occurrences per original, in table order.
std::vector<std::size_t> count_replacements(std::string_view text, const ReplacementTable& table);

}  // namespace ltmn::corpus
