#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "ltmn/babi_tasks.hpp"
#include "ltmn/corpus.hpp"
#include "ltmn/errors.hpp"

using namespace ltmn;
using namespace ltmn::corpus;

TEST_CASE("tokenize detaches punctuation and lowercases") {
  CHECK(tokenize("Mary moved to the shower room.") ==
        Tokens{"mary", "moved", "to", "the", "shower", "room", "."});
  CHECK(tokenize("Where is Mary?") == Tokens{"where", "is", "mary", "?"});
  CHECK(tokenize("a,b  c") == Tokens{"a", ",", "b", "c"});
  CHECK(tokenize_answer("apple,milk") == Tokens{"apple", "milk"});
  CHECK(tokenize_answer("Shower Room") == Tokens{"shower", "room"});
}

TEST_CASE("parse a single multi-word question") {
  const auto qa = to_instances(parse_babi_string("1 Mary moved to the shower room.\n2 Where is Mary?\tshower room\t1\n"));
  REQUIRE(qa.size() == 1);
  CHECK(qa[0].context.size() == 1);
  CHECK(qa[0].answer == Tokens{"shower", "room"});
  CHECK(qa[0].supporting_ids == std::vector<std::size_t>{1});
  CHECK(qa[0].question == Tokens{"where", "is", "mary", "?"});
  CHECK(qa[0].line_no == 2);
}

TEST_CASE("story boundaries and interleaving") {
  const std::string text =
      "1 John went to the garden.\n"
      "2 Where is John?\tgarden\t1\n"
      "1 Sandra went to the office.\n"
      "2 Where is Sandra?\toffice\t1\n";
  const auto stories = parse_babi_string(text);
  REQUIRE(stories.size() == 2);
  const auto qa = to_instances(stories);
  REQUIRE(qa.size() == 2);
  CHECK(qa[1].context.size() == 1);
  CHECK(qa[1].context[0][0] == "sandra");
  CHECK(qa[1].story_id == 1);

  // Statements after a question extend the same story for later questions.
  const std::string figure =
      "1 Steve Jobs founded Apple.\n"
      "2 Raskin joined Apple.\n"
      "3 Raskin left Apple.\n"
      "4 Why did Raskin leave?\tpersonality conflict\t3\n"
      "5 Jobs reorganised the team.\n"
      "6 Wozniak stayed.\n"
      "7 Jobs left in 1985.\n"
      "8 Who left in 1985?\tJobs\t7\n";
  const auto fqa = to_instances(parse_babi_string(figure));
  REQUIRE(fqa.size() == 2);
  CHECK(fqa[0].context.size() == 3);
  CHECK(fqa[1].context.size() == 6);

  // A number not larger than the previous one also starts a new story.
  CHECK(parse_babi_string("1 a.\n2 b.\n2 c.\n3 q?\tx\t2\n").size() == 2);
}

TEST_CASE("parse errors carry the line number") {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_babi_string(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("1 ok.\nx bad\n") == 2);
  CHECK(line_of("1 ok.\n2 Where?\t\t1\n") == 2);
  CHECK(line_of("1 ok.\n\n3 Where?\tx\tq\n") == 3);
  CHECK(line_of("1 ok.\n2 Where?\tx\t5\n") == 2);
  CHECK_THROWS_AS(to_instances(parse_babi_string("1 Where?\tx\n")), ParseError);
}

namespace {

// Independent re-scan of raw text: for every question line, the statement
// lines that precede it since the last story boundary.
std::vector<std::vector<std::string>> rescan_contexts(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> current;
  long prev = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto sp = line.find(' ');
    const long n = std::stol(line.substr(0, sp));
    if (n <= prev) current.clear();
    prev = n;
    const std::string body = line.substr(sp + 1);
    if (body.find('\t') == std::string::npos) {
      current.push_back(body);
    } else {
      out.push_back(current);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("contexts equal a brute-force re-scan on every generated task") {
  for (int task = 1; task <= babi::kNumTasks; ++task) {
    CAPTURE(task);
    const std::string text = babi::generate_task(task, 120, 3);
    const auto qa = to_instances(parse_babi_string(text));
    const auto oracle = rescan_contexts(text);
    REQUIRE(qa.size() == oracle.size());
    CHECK(qa.size() == 120);
    for (std::size_t i = 0; i < qa.size(); ++i) {
      REQUIRE(qa[i].context.size() == oracle[i].size());
      for (std::size_t j = 0; j < oracle[i].size(); ++j) CHECK(qa[i].context[j] == tokenize(oracle[i][j]));
      for (std::size_t id : qa[i].supporting_ids) CHECK(id < qa[i].line_no);
      CHECK_FALSE(qa[i].answer.empty());
    }
  }
}

TEST_CASE("serialize round-trips parsed stories") {
  for (int task : {1, 8, 19, 20}) {
    const auto stories = parse_babi_string(babi::generate_task(task, 50, 9));
    const auto again = parse_babi_string(serialize_babi(stories));
    REQUIRE(again.size() == stories.size());
    for (std::size_t s = 0; s < stories.size(); ++s) {
      REQUIRE(again[s].lines.size() == stories[s].lines.size());
      for (std::size_t l = 0; l < stories[s].lines.size(); ++l) {
        const auto& a = stories[s].lines[l];
        const auto& b = again[s].lines[l];
        CHECK(a.number == b.number);
        CHECK(a.tokens == b.tokens);
        CHECK(a.answer == b.answer);
        CHECK(a.supporting_ids == b.supporting_ids);
      }
    }
  }
}

TEST_CASE("vocabulary") {
  Vocabulary v;
  CHECK(v.size() == 4);
  CHECK(v.token(Vocabulary::kPad) == kPadToken);
  CHECK(v.token(Vocabulary::kUnk) == kUnkToken);
  CHECK(v.token(Vocabulary::kBoa) == kBoaToken);
  CHECK(v.token(Vocabulary::kEos) == kEosToken);
  CHECK(v.index("never-seen") == Vocabulary::kUnk);
  CHECK_THROWS_AS(v.token(99), DomainError);

  const auto qa = to_instances(parse_babi_string("1 John went .\n2 where is john ?\tgarden\n"));
  const Vocabulary built = build_vocabulary(qa);
  // john went . where is ? garden
  CHECK(built.size() == 4 + 7);
  for (std::size_t i = 0; i < built.size(); ++i) CHECK(built.index(built.token(i)) == i);

  auto doubled = qa;
  doubled.push_back(qa[0]);
  CHECK(build_vocabulary(doubled) == built);

  const auto a = to_instances(parse_babi_string("1 x y.\n2 q?\tz\n1 y w.\n2 q?\tz\n"));
  auto b = a;
  std::reverse(b.begin(), b.end());
  const auto va = build_vocabulary(a).tokens();
  const auto vb = build_vocabulary(b).tokens();
  CHECK(std::set<std::string>(va.begin(), va.end()) == std::set<std::string>(vb.begin(), vb.end()));
  CHECK(va != vb);

  CHECK(Vocabulary::from_tokens(built.tokens()) == built);
  CHECK_THROWS_AS(Vocabulary::from_tokens({"a", "b", "c", "d"}), ContractError);
  CHECK(built.decode(built.encode({"john", "mystery"})) == Tokens{"john", kUnkToken});
}

TEST_CASE("train/validation split") {
  const auto all = to_instances(parse_babi_string(babi::generate_task(1, 1000, 4)));
  REQUIRE(all.size() == 1000);
  const auto [train, val] = split_train_validation(all, 0.1, 17);
  CHECK(train.size() == 900);
  CHECK(val.size() == 100);
  const auto again = split_train_validation(all, 0.1, 17);
  CHECK(again.second.size() == val.size());
  for (std::size_t i = 0; i < val.size(); ++i) CHECK(again.second[i].line_no == val[i].line_no);

  // Disjoint and exhaustive, keyed by (story, line).
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& q : train) seen.insert({q.story_id, q.line_no});
  for (const auto& q : val) CHECK(seen.insert({q.story_id, q.line_no}).second);
  CHECK(seen.size() == all.size());

  const auto two = std::vector<QAInstance>(all.begin(), all.begin() + 2);
  const auto [t2, v2] = split_train_validation(two, 0.5, 1);
  CHECK(t2.size() == 1);
  CHECK(v2.size() == 1);
  CHECK_THROWS_AS(split_train_validation({all[0]}, 0.5, 1), ContractError);
  CHECK_THROWS_AS(split_train_validation(all, 0.0, 1), ContractError);
  CHECK_THROWS_AS(split_train_validation(all, 1.0, 1), ContractError);
}

TEST_CASE("replacement table") {
  const auto table = ReplacementTable::multiword_default();
  CHECK(table.entries.size() == 12);
  CHECK_NOTHROW(table.validate());

  // The invariant that keeps repeated application stable, checked directly:
  // no phrase contains a different original as a whole word.
  for (const auto& [orig, phrase] : table.entries) {
    std::istringstream words(phrase);
    std::string w;
    while (words >> w) {
      for (const auto& [other, unused] : table.entries) {
        if (other != orig) CHECK(w != other);
      }
    }
  }

  CHECK(apply_replacements("1 Mary went to the bathroom.", table) ==
        "1 Mary Bush went to the shower room.");
  CHECK(apply_replacements("Bill gave Fred the milk.", table) ==
        "Bill Gates gave Fred Bush the hot water.");
  CHECK(apply_replacements("nothing to see here", table) == "nothing to see here");
  // Whole words only, case-sensitive.
  CHECK(apply_replacements("bathrooms Billy mary", table) == "bathrooms Billy mary");
  CHECK(apply_replacements("Where is the milk?\tmilk\t2", table) ==
        "Where is the hot water?\thot water\t2");

  ReplacementTable bad{{{"a", "b a"}, {"b", "c d"}}};
  CHECK_THROWS_AS(bad.validate(), ContractError);
  ReplacementTable single{{{"a", "b"}}};
  CHECK_THROWS_AS(single.validate(), ContractError);
  ReplacementTable dup{{{"a", "x y"}, {"a", "z"}}};
  CHECK_THROWS_AS(dup.validate(), ContractError);

  std::istringstream in("bathroom\tshower room\n\nhallway\tentrance way\n");
  const auto loaded = load_replacement_table(in);
  CHECK(loaded.entries.size() == 2);
  std::istringstream broken("no tab here\n");
  CHECK_THROWS_AS(load_replacement_table(broken), ParseError);
}

TEST_CASE("replacement is idempotent and preserves question counts") {
  const auto table = ReplacementTable::multiword_default();
  for (int task = 1; task <= babi::kNumTasks; ++task) {
    CAPTURE(task);
    const std::string text = babi::generate_task(task, 60, 5);
    const std::string once = apply_replacements(text, table);
    CHECK(apply_replacements(once, table) == once);
    CHECK(count_questions(parse_babi_string(once)) == count_questions(parse_babi_string(text)));
  }
  const auto counts = count_replacements("Mary and Mary Bush met Bill.", table);
  CHECK(counts[7] == 1);  // only the bare "Mary"
  CHECK(counts[5] == 1);
}

TEST_CASE("generated tasks are deterministic and well-formed") {
  for (int task = 1; task <= babi::kNumTasks; ++task) {
    CAPTURE(task);
    CHECK(babi::generate_task(task, 40, 1) == babi::generate_task(task, 40, 1));
    CHECK(babi::generate_task(task, 40, 1) != babi::generate_task(task, 40, 2));
    CHECK(count_questions(parse_babi_string(babi::generate_task(task, 37, 8))) == 37);
  }
  CHECK(babi::task_file_name(1, "train") == "qa1_single-supporting-fact_train.txt");
  CHECK_THROWS_AS(babi::generate_task(21, 1, 1), ContractError);
}
