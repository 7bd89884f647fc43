#include "ltmn/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "ltmn/errors.hpp"

namespace ltmn::corpus {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

Tokens tokenize(std::string_view sentence) {
  std::string spaced;
  spaced.reserve(sentence.size() + 8);
  for (char c : sentence) {
    if (c == '.' || c == '?' || c == ',') {
      spaced += ' ';
      spaced += c;
      spaced += ' ';
    } else {
      spaced += c;
    }
  }
  return split_ws(lower(spaced));
}

Tokens tokenize_answer(std::string_view answer) {
  std::string s = lower(answer);
  std::replace(s.begin(), s.end(), ',', ' ');
  return split_ws(s);
}

// ---------------------------------------------------------------------------
// Parsing

std::vector<Story> parse_babi(std::istream& in) {
  std::vector<Story> stories;
  std::string raw;
  std::size_t line_no = 0;
  std::size_t prev_number = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (trim(raw).empty()) continue;

    std::size_t pos = 0;
    while (pos < raw.size() && std::isdigit(static_cast<unsigned char>(raw[pos]))) ++pos;
    if (pos == 0 || pos >= raw.size() || raw[pos] != ' ') {
      throw ParseError("expected '<n> ' line prefix", line_no);
    }
    const std::size_t number = std::stoul(raw.substr(0, pos));
    if (number == 0) throw ParseError("line numbers start at 1", line_no);
    if (stories.empty() || number == 1 || number <= prev_number) {
      stories.push_back(Story{stories.size(), {}});
    }
    prev_number = number;

    StoryLine line;
    line.number = number;
    const std::string body = raw.substr(pos + 1);
    const std::size_t tab = body.find('\t');
    if (tab == std::string::npos) {
      line.text = std::string(trim(body));
      line.tokens = tokenize(line.text);
    } else {
      line.is_question = true;
      line.text = std::string(trim(body.substr(0, tab)));
      line.tokens = tokenize(line.text);
      std::string rest = body.substr(tab + 1);
      const std::size_t tab2 = rest.find('\t');
      line.answer_text = std::string(trim(rest.substr(0, tab2)));
      line.answer = tokenize_answer(line.answer_text);
      if (line.answer.empty()) throw ParseError("question with an empty answer field", line_no);
      if (tab2 != std::string::npos) {
        std::string ids = rest.substr(tab2 + 1);
        std::replace(ids.begin(), ids.end(), ',', ' ');
        for (const auto& tok : split_ws(ids)) {
          if (!std::all_of(tok.begin(), tok.end(),
                           [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            throw ParseError("non-numeric supporting fact id '" + tok + "'", line_no);
          }
          const std::size_t id = std::stoul(tok);
          if (id == 0 || id >= number) {
            throw ParseError("supporting fact " + tok + " does not precede the question",
                             line_no);
          }
          line.supporting_ids.push_back(id);
        }
      }
    }
    stories.back().lines.push_back(std::move(line));
  }
  return stories;
}

std::vector<Story> parse_babi_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_babi(in);
}

std::string serialize_babi(const std::vector<Story>& stories) {
  std::ostringstream out;
  for (const auto& story : stories) {
    for (const auto& line : story.lines) {
      out << line.number << ' ' << line.text;
      if (line.is_question) {
        out << '\t' << line.answer_text;
        if (!line.supporting_ids.empty()) {
          out << '\t';
          for (std::size_t i = 0; i < line.supporting_ids.size(); ++i) {
            if (i) out << ' ';
            out << line.supporting_ids[i];
          }
        }
      }
      out << '\n';
    }
  }
  return out.str();
}

std::vector<QAInstance> to_instances(const std::vector<Story>& stories) {
  std::vector<QAInstance> out;
  for (const auto& story : stories) {
    std::vector<Tokens> context;
    for (const auto& line : story.lines) {
      if (!line.is_question) {
        context.push_back(line.tokens);
        continue;
      }
      if (context.empty()) {
        throw ParseError("question with no prior sentences (story " + std::to_string(story.id) +
                             ")",
                         line.number);
      }
      QAInstance qa;
      qa.context = context;
      qa.question = line.tokens;
      qa.answer = line.answer;
      qa.supporting_ids = line.supporting_ids;
      qa.story_id = story.id;
      qa.line_no = line.number;
      out.push_back(std::move(qa));
    }
  }
  return out;
}

std::vector<QAInstance> load_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return to_instances(parse_babi(in));
}

std::size_t count_questions(const std::vector<Story>& stories) {
  std::size_t n = 0;
  for (const auto& s : stories) {
    n += static_cast<std::size_t>(std::count_if(s.lines.begin(), s.lines.end(),
                                                [](const StoryLine& l) { return l.is_question; }));
  }
  return n;
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() {
  for (const char* t : {kPadToken, kUnkToken, kBoaToken, kEosToken}) add(t);
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  if (tokens.size() < kReserved || tokens[kPad] != kPadToken || tokens[kUnk] != kUnkToken ||
      tokens[kBoa] != kBoaToken || tokens[kEos] != kEosToken) {
    throw ContractError("vocabulary must start with <PAD> <UNK> <BOA> <EOS>");
  }
  Vocabulary v;
  for (std::size_t i = kReserved; i < tokens.size(); ++i) {
    if (v.contains(tokens[i])) throw ContractError("duplicate vocabulary token '" + tokens[i] + "'");
    v.add(tokens[i]);
  }
  return v;
}

std::size_t Vocabulary::add(const std::string& token) {
  auto [it, inserted] = index_.emplace(token, tokens_.size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

std::size_t Vocabulary::index(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

std::optional<std::size_t> Vocabulary::find(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::token(std::size_t index) const {
  if (index >= tokens_.size()) {
    throw DomainError("vocabulary index " + std::to_string(index) + " out of range");
  }
  return tokens_[index];
}

std::vector<std::size_t> Vocabulary::encode(const Tokens& tokens) const {
  std::vector<std::size_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(index(t));
  return out;
}

Tokens Vocabulary::decode(const std::vector<std::size_t>& indices) const {
  Tokens out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(token(i));
  return out;
}

Vocabulary build_vocabulary(const std::vector<QAInstance>& instances) {
  Vocabulary v;
  for (const auto& qa : instances) {
    for (const auto& s : qa.context) {
      for (const auto& t : s) v.add(t);
    }
    for (const auto& t : qa.question) v.add(t);
    for (const auto& t : qa.answer) v.add(t);
  }
  return v;
}

std::pair<std::vector<QAInstance>, std::vector<QAInstance>> split_train_validation(
    const std::vector<QAInstance>& instances, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ContractError("validation fraction must lie in (0, 1)");
  }
  const std::size_t n = instances.size();
  if (n < 2) throw ContractError("need at least two instances to split");
  std::size_t n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  n_val = std::clamp<std::size_t>(n_val, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<bool> is_val(n, false);
  for (std::size_t i = 0; i < n_val; ++i) is_val[order[i]] = true;

  std::pair<std::vector<QAInstance>, std::vector<QAInstance>> out;
  out.first.reserve(n - n_val);
  out.second.reserve(n_val);
  for (std::size_t i = 0; i < n; ++i) (is_val[i] ? out.second : out.first).push_back(instances[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Replacements

ReplacementTable ReplacementTable::multiword_default() {
  return ReplacementTable{{
      {"hallway", "entrance way"},
      {"bathroom", "shower room"},
      {"office", "computer science office"},
      {"bedroom", "guest room"},
      {"milk", "hot water"},
      {"Bill", "Bill Gates"},
      {"Fred", "Fred Bush"},
      {"Mary", "Mary Bush"},
      {"green", "bright green"},
      {"yellow", "bright yellow"},
      {"hungry", "extremely hungry"},
      {"tired", "extremely tired"},
  }};
}

void ReplacementTable::validate() const {
  std::set<std::string> originals;
  bool multi = false;
  for (const auto& [orig, phrase] : entries) {
    if (orig.empty() || split_ws(orig).size() != 1) {
      throw ContractError("replacement original must be a single word: '" + orig + "'");
    }
    if (!originals.insert(orig).second) throw ContractError("duplicate original '" + orig + "'");
    const auto words = split_ws(phrase);
    if (words.empty()) throw ContractError("empty replacement for '" + orig + "'");
    multi = multi || words.size() > 1;
  }
  if (!multi) throw ContractError("replacement table has no multi-word phrase");
  for (const auto& [orig, phrase] : entries) {
    for (const auto& w : split_ws(phrase)) {
      if (w != orig && originals.count(w)) {
        throw ContractError("phrase '" + phrase + "' contains another original '" + w + "'");
      }
    }
  }
}

ReplacementTable load_replacement_table(std::istream& in) {
  ReplacementTable t;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (trim(raw).empty()) continue;
    const auto tab = raw.find('\t');
    if (tab == std::string::npos) throw ParseError("expected original<TAB>replacement", line_no);
    t.entries.emplace_back(std::string(trim(raw.substr(0, tab))),
                           std::string(trim(raw.substr(tab + 1))));
  }
  t.validate();
  return t;
}

namespace {

bool word_at(std::string_view text, std::size_t pos, std::string_view word) {
  if (pos + word.size() > text.size()) return false;
  if (text.substr(pos, word.size()) != word) return false;
  if (pos > 0 && is_word_char(text[pos - 1])) return false;
  const std::size_t end = pos + word.size();
  return end == text.size() || !is_word_char(text[end]);
}

// True if the occurrence of `orig` at `pos` is part of an occurrence of
// `phrase` that is already present in the text.
bool inside_phrase(std::string_view text, std::size_t pos, std::string_view orig,
                   std::string_view phrase) {
  for (std::size_t off = phrase.find(orig); off != std::string_view::npos;
       off = phrase.find(orig, off + 1)) {
    if (!word_at(phrase, off, orig)) continue;
    if (off > pos) continue;
    if (word_at(text, pos - off, phrase)) return true;
  }
  return false;
}

template <typename OnMatch>
std::string rewrite(std::string_view text, const ReplacementTable& table, OnMatch&& on_match) {
  std::string out;
  out.reserve(text.size() + text.size() / 4);
  std::size_t i = 0;
  while (i < text.size()) {
    bool replaced = false;
    if (i == 0 || !is_word_char(text[i - 1])) {
      for (std::size_t k = 0; k < table.entries.size(); ++k) {
        const auto& [orig, phrase] = table.entries[k];
        if (word_at(text, i, orig) && !inside_phrase(text, i, orig, phrase)) {
          on_match(k);
          out += phrase;
          i += orig.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out += text[i++];
  }
  return out;
}

}  // namespace

std::string apply_replacements(std::string_view text, const ReplacementTable& table) {
  return rewrite(text, table, [](std::size_t) {});
}

std::vector<std::size_t> count_replacements(std::string_view text, const ReplacementTable& table) {
  std::vector<std::size_t> counts(table.entries.size(), 0);
  rewrite(text, table, [&](std::size_t k) { ++counts[k]; });
  return counts;
}

}  // namespace ltmn::corpus
