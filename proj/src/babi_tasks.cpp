#include "ltmn/babi_tasks.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include "ltmn/errors.hpp"

namespace ltmn::babi {

namespace {

using Strings = std::vector<std::string>;

// Portable draws: std::uniform_int_distribution differs between standard
// libraries, so reduce raw 64-bit output directly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

class StoryText {
 public:
  std::size_t say(const std::string& sentence) {
    out_ << ++n_ << ' ' << sentence << '\n';
    return n_;
  }
  void ask(const std::string& question, const std::string& answer,
           const std::vector<std::size_t>& support) {
    out_ << ++n_ << ' ' << question << '\t' << answer << '\t';
    for (std::size_t i = 0; i < support.size(); ++i) out_ << (i ? " " : "") << support[i];
    out_ << '\n';
    ++questions_;
  }
  std::size_t questions() const { return questions_; }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
  std::size_t n_ = 0;
  std::size_t questions_ = 0;
};

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string cap(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

const Strings kActors = {"Mary", "John", "Daniel", "Sandra"};
const Strings kLocations = {"bathroom", "hallway", "office", "bedroom", "kitchen", "garden"};
const Strings kMoveVerbs = {"moved to", "went to", "journeyed to", "travelled to", "went back to"};
const Strings kObjects = {"football", "apple", "milk"};
const Strings kGrabVerbs = {"picked up", "got", "grabbed", "took"};
const Strings kDropVerbs = {"dropped", "discarded", "put down", "left"};
const Strings kNumbers = {"none", "one", "two", "three"};

const Strings kActors2 = {"Bill", "Fred", "Julie", "Mary"};
const Strings kLocations2 = {"park", "cinema", "school", "bedroom", "kitchen", "office"};

std::string other_than(Rng& rng, const Strings& pool, const std::string& avoid) {
  std::string s;
  do s = rng.pick(pool);
  while (s == avoid);
  return s;
}

// Two distinct draws.
std::pair<std::string, std::string> two(Rng& rng, const Strings& pool) {
  std::string a = rng.pick(pool);
  return {a, other_than(rng, pool, a)};
}

std::string move_sentence(Rng& rng, const std::string& who, const std::string& where) {
  return who + " " + rng.pick(kMoveVerbs) + " the " + where + ".";
}

// ---------------------------------------------------------------------------
// Shared world for tasks with actors carrying objects (2, 3, 6, 7, 8).

struct Placed {
  std::string loc;
  std::size_t line = 0;
};

struct ObjectState {
  std::optional<std::string> holder;
  std::optional<std::string> loc;
  std::vector<std::size_t> support;               // lines explaining loc
  std::vector<std::pair<std::string, std::vector<std::size_t>>> history;  // distinct locations
};

struct World {
  std::map<std::string, Placed> actor;
  std::map<std::string, ObjectState> object;
  std::map<std::string, std::vector<std::string>> carrying;  // in pick-up order

  void record(const std::string& obj, const std::string& loc, std::vector<std::size_t> support) {
    auto& o = object[obj];
    o.loc = loc;
    o.support = support;
    if (o.history.empty() || o.history.back().first != loc) o.history.emplace_back(loc, support);
  }

  void act(Rng& rng, StoryText& st, double p_move) {
    std::vector<std::string> can_drop;
    for (const auto& [a, objs] : carrying) {
      if (!objs.empty() && actor.count(a)) can_drop.push_back(a);
    }
    std::vector<std::string> free_objects;
    for (const auto& o : kObjects) {
      if (!object[o].holder) free_objects.push_back(o);
    }
    const double r = static_cast<double>(rng.below(1000)) / 1000.0;
    if (r < p_move || actor.empty()) {
      const std::string& a = rng.pick(kActors);
      const std::string from = actor.count(a) ? actor[a].loc : "";
      const std::string to = other_than(rng, kLocations, from);
      const std::size_t line = st.say(move_sentence(rng, a, to));
      actor[a] = {to, line};
      for (const auto& o : carrying[a]) record(o, to, {object[o].support.front(), line});
      return;
    }
    if (!can_drop.empty() && (free_objects.empty() || rng.chance(0.4))) {
      const std::string& a = rng.pick(can_drop);
      auto& objs = carrying[a];
      const std::size_t k = rng.below(objs.size());
      const std::string o = objs[k];
      objs.erase(objs.begin() + static_cast<std::ptrdiff_t>(k));
      const std::size_t line = st.say(a + " " + rng.pick(kDropVerbs) + " the " + o + ".");
      object[o].holder.reset();
      record(o, actor[a].loc, {line, actor[a].line});
      return;
    }
    if (!free_objects.empty()) {
      std::vector<std::string> present;
      for (const auto& [a, p] : actor) present.push_back(a);
      const std::string a = rng.pick(present);
      const std::string o = rng.pick(free_objects);
      const std::size_t line = st.say(a + " " + rng.pick(kGrabVerbs) + " the " + o + " there.");
      object[o].holder = a;
      carrying[a].push_back(o);
      record(o, actor[a].loc, {line, actor[a].line});
      return;
    }
    const std::string& a = rng.pick(kActors);
    const std::string to = other_than(rng, kLocations, actor.count(a) ? actor[a].loc : "");
    actor[a] = {to, st.say(move_sentence(rng, a, to))};
  }
};

// ---------------------------------------------------------------------------
// Task generators. Each writes one story with 1..max_q questions.

void task1(Rng& rng, StoryText& st, std::size_t max_q) {
  std::map<std::string, Placed> where;
  for (std::size_t q = 0; q < std::min<std::size_t>(5, max_q); ++q) {
    for (int s = 0; s < 2; ++s) {
      const std::string& a = rng.pick(kActors);
      const std::string to = other_than(rng, kLocations, where.count(a) ? where[a].loc : "");
      where[a] = {to, st.say(move_sentence(rng, a, to))};
    }
    std::vector<std::string> known;
    for (const auto& [a, p] : where) known.push_back(a);
    const std::string& a = rng.pick(known);
    st.ask("Where is " + a + "?", where[a].loc, {where[a].line});
  }
}

void task2(Rng& rng, StoryText& st, std::size_t max_q) {
  World w;
  for (std::size_t q = 0; q < std::min<std::size_t>(5, max_q); ++q) {
    std::vector<std::string> answerable;
    for (int tries = 0; tries < 50; ++tries) {
      w.act(rng, st, 0.5);
      answerable.clear();
      for (const auto& [o, s] : w.object) {
        if (s.loc) answerable.push_back(o);
      }
      if (!answerable.empty() && tries >= 1) break;
    }
    if (answerable.empty()) break;
    const std::string o = rng.pick(answerable);
    auto sup = w.object[o].support;
    std::sort(sup.begin(), sup.end());
    st.ask("Where is the " + o + "?", *w.object[o].loc, sup);
  }
}

void task3(Rng& rng, StoryText& st, std::size_t max_q) {
  World w;
  for (std::size_t q = 0; q < std::min<std::size_t>(3, max_q); ++q) {
    std::optional<std::pair<std::string, std::size_t>> target;
    for (int steps = 0; steps < 60 && !target; ++steps) {
      w.act(rng, st, 0.6);
      if (steps < 4) continue;
      for (const auto& [o, s] : w.object) {
        const auto& h = s.history;
        for (std::size_t i = h.size(); i-- > 1;) {
          const auto n_same = std::count_if(h.begin(), h.end(),
                                            [&](const auto& e) { return e.first == h[i].first; });
          if (n_same == 1) {
            target = {o, i};
            break;
          }
        }
        if (target) break;
      }
    }
    if (!target) break;
    const auto& h = w.object[target->first].history;
    std::vector<std::size_t> sup = h[target->second - 1].second;
    sup.insert(sup.end(), h[target->second].second.begin(), h[target->second].second.end());
    std::sort(sup.begin(), sup.end());
    sup.erase(std::unique(sup.begin(), sup.end()), sup.end());
    st.ask("Where was the " + target->first + " before the " + h[target->second].first + "?",
           h[target->second - 1].first, sup);
  }
}

const std::array<std::pair<const char*, const char*>, 4> kDirections = {
    {{"north", "south"}, {"south", "north"}, {"east", "west"}, {"west", "east"}}};

void task4(Rng& rng, StoryText& st, std::size_t) {
  Strings locs = kLocations;
  rng.shuffle(locs);
  const auto& d1 = kDirections[rng.below(4)];
  const auto& d2 = kDirections[rng.below(4)];
  // X d1 Y, Z d2 X
  const std::size_t l1 = st.say("The " + locs[0] + " is " + d1.first + " of the " + locs[1] + ".");
  const std::size_t l2 = st.say("The " + locs[2] + " is " + d2.first + " of the " + locs[0] + ".");
  switch (rng.below(4)) {
    case 0: st.ask("What is " + std::string(d1.first) + " of the " + locs[1] + "?", locs[0], {l1}); break;
    case 1: st.ask("What is the " + locs[0] + " " + d1.first + " of?", locs[1], {l1}); break;
    case 2: st.ask("What is " + std::string(d2.first) + " of the " + locs[0] + "?", locs[2], {l2}); break;
    default: st.ask("What is the " + locs[2] + " " + d2.first + " of?", locs[0], {l2}); break;
  }
}

void task5(Rng& rng, StoryText& st, std::size_t max_q) {
  const Strings actors = {"Bill", "Fred", "Jeff", "Mary"};
  const Strings give = {"gave", "passed", "handed"};
  for (std::size_t q = 0; q < std::min<std::size_t>(5, max_q); ++q) {
    const std::size_t noise = rng.below(3);
    for (std::size_t k = 0; k < noise; ++k) {
      const std::string& a = rng.pick(actors);
      if (rng.chance(0.6)) {
        st.say(a + " " + rng.pick(kMoveVerbs) + " the " + rng.pick(kLocations) + ".");
      } else {
        st.say(a + " " + rng.pick(kGrabVerbs) + " the " + rng.pick(kObjects) + " there.");
      }
    }
    auto [giver, taker] = two(rng, actors);
    const std::string& obj = rng.pick(kObjects);
    const std::size_t line =
        st.say(giver + " " + rng.pick(give) + " the " + obj + " to " + taker + ".");
    switch (rng.below(5)) {
      case 0: st.ask("Who gave the " + obj + " to " + taker + "?", giver, {line}); break;
      case 1: st.ask("Who gave the " + obj + "?", giver, {line}); break;
      case 2: st.ask("What did " + giver + " give to " + taker + "?", obj, {line}); break;
      case 3: st.ask("Who received the " + obj + "?", taker, {line}); break;
      default: st.ask("Who did " + giver + " give the " + obj + " to?", taker, {line}); break;
    }
  }
}

void task6(Rng& rng, StoryText& st, std::size_t max_q) {
  World w;
  for (std::size_t q = 0; q < std::min<std::size_t>(5, max_q); ++q) {
    w.act(rng, st, 0.8);
    w.act(rng, st, 0.8);
    std::vector<std::string> known;
    for (const auto& [a, p] : w.actor) known.push_back(a);
    const std::string& a = rng.pick(known);
    const auto& p = w.actor[a];
    if (rng.chance(0.5)) {
      st.ask("Is " + a + " in the " + p.loc + "?", "yes", {p.line});
    } else {
      st.ask("Is " + a + " in the " + other_than(rng, kLocations, p.loc) + "?", "no", {p.line});
    }
  }
}

void carrying_task(Rng& rng, StoryText& st, std::size_t max_q, bool list) {
  World w;
  for (std::size_t q = 0; q < std::min<std::size_t>(5, max_q); ++q) {
    const std::size_t steps = 1 + rng.below(2);
    for (std::size_t k = 0; k < steps; ++k) w.act(rng, st, 0.35);
    std::vector<std::string> known;
    for (const auto& [a, p] : w.actor) known.push_back(a);
    const std::string& a = rng.pick(known);
    const auto& objs = w.carrying[a];
    if (list) {
      std::string answer;
      for (std::size_t i = 0; i < objs.size(); ++i) answer += (i ? "," : "") + objs[i];
      st.ask("What is " + a + " carrying?", objs.empty() ? "nothing" : answer,
             {w.actor[a].line});
    } else {
      st.ask("How many objects is " + a + " carrying?", kNumbers[objs.size()],
             {w.actor[a].line});
    }
  }
}

void task9(Rng& rng, StoryText& st, std::size_t max_q) {
  struct Fact {
    std::string loc;
    bool positive;
    std::size_t line;
  };
  std::map<std::string, Fact> facts;
  for (std::size_t q = 0; q < std::min<std::size_t>(5, max_q); ++q) {
    for (int s = 0; s < 2; ++s) {
      const std::string& a = rng.pick(kActors);
      const std::string& l = rng.pick(kLocations);
      const std::size_t r = rng.below(3);
      if (r == 0) {
        facts[a] = {l, false, st.say(a + " is no longer in the " + l + ".")};
      } else if (r == 1) {
        facts[a] = {l, false, st.say(a + " is not in the " + l + ".")};
      } else {
        facts[a] = {l, true, st.say(move_sentence(rng, a, l))};
      }
    }
    std::vector<std::string> known;
    for (const auto& [a, f] : facts) known.push_back(a);
    const std::string& a = rng.pick(known);
    const Fact& f = facts[a];
    if (!f.positive || rng.chance(0.5)) {
      st.ask("Is " + a + " in the " + f.loc + "?", f.positive ? "yes" : "no", {f.line});
    } else {
      st.ask("Is " + a + " in the " + other_than(rng, kLocations, f.loc) + "?", "no", {f.line});
    }
  }
}

void task10(Rng& rng, StoryText& st, std::size_t max_q) {
  struct Fact {
    std::string a, b;  // b empty: definite
    std::size_t line;
  };
  std::map<std::string, Fact> facts;
  for (std::size_t q = 0; q < std::min<std::size_t>(5, max_q); ++q) {
    for (int s = 0; s < 2; ++s) {
      const std::string& who = rng.pick(kActors2);
      if (rng.chance(0.5)) {
        auto [l1, l2] = two(rng, kLocations2);
        facts[who] = {l1, l2, st.say(who + " is either in the " + l1 + " or the " + l2 + ".")};
      } else {
        const std::string& l = rng.pick(kLocations2);
        const std::string s_text = rng.chance(0.5) ? who + " is in the " + l + "."
                                                   : who + " went back to the " + l + ".";
        facts[who] = {l, "", st.say(s_text)};
      }
    }
    std::vector<std::string> known;
    for (const auto& [a, f] : facts) known.push_back(a);
    const std::string& who = rng.pick(known);
    const Fact& f = facts[who];
    std::string asked;
    std::string answer;
    const std::size_t r = rng.below(3);
    if (f.b.empty()) {
      asked = r == 0 ? f.a : other_than(rng, kLocations2, f.a);
      answer = asked == f.a ? "yes" : "no";
    } else {
      if (r == 0) {
        asked = f.a;
      } else if (r == 1) {
        asked = f.b;
      } else {
        do asked = rng.pick(kLocations2);
        while (asked == f.a || asked == f.b);
      }
      answer = (asked == f.a || asked == f.b) ? "maybe" : "no";
    }
    st.ask("Is " + who + " in the " + asked + "?", answer, {f.line});
  }
}

bool is_female(const std::string& a) { return a == "Mary" || a == "Sandra"; }

void task11(Rng& rng, StoryText& st, std::size_t max_q) {
  const Strings linkers = {"Afterwards", "Then", "Following that"};
  std::map<std::string, Placed> where;
  for (std::size_t q = 0; q < std::min<std::size_t>(5, max_q); ++q) {
    const std::string& a = rng.pick(kActors);
    const std::string l1 = other_than(rng, kLocations, where.count(a) ? where[a].loc : "");
    where[a] = {l1, st.say(move_sentence(rng, a, l1))};
    const std::string l2 = other_than(rng, kLocations, l1);
    const std::string pron = is_female(a) ? "she" : "he";
    where[a] = {l2, st.say(rng.pick(linkers) + " " + pron + " " + rng.pick(kMoveVerbs) +
                               " the " + l2 + ".")};
    std::vector<std::string> known;
    for (const auto& [k, p] : where) known.push_back(k);
    const std::string& who = rng.pick(known);
    st.ask("Where is " + who + "?", where[who].loc, {where[who].line});
  }
}

void task12(Rng& rng, StoryText& st, std::size_t max_q) {
  std::map<std::string, Placed> where;
  for (std::size_t q = 0; q < std::min<std::size_t>(5, max_q); ++q) {
    for (int s = 0; s < 2; ++s) {
      auto [a, b] = two(rng, kActors);
      const std::string& l = rng.pick(kLocations);
      const std::size_t line = st.say(a + " and " + b + " " + rng.pick(kMoveVerbs) + " the " + l + ".");
      where[a] = {l, line};
      where[b] = {l, line};
    }
    std::vector<std::string> known;
    for (const auto& [k, p] : where) known.push_back(k);
    const std::string& who = rng.pick(known);
    st.ask("Where is " + who + "?", where[who].loc, {where[who].line});
  }
}

void task13(Rng& rng, StoryText& st, std::size_t max_q) {
  const Strings linkers = {"Afterwards", "Then", "Following that"};
  std::map<std::string, Placed> where;
  for (std::size_t q = 0; q < std::min<std::size_t>(5, max_q); ++q) {
    auto [a, b] = two(rng, kActors);
    const std::string& l1 = rng.pick(kLocations);
    const std::size_t first = st.say(a + " and " + b + " " + rng.pick(kMoveVerbs) + " the " + l1 + ".");
    where[a] = {l1, first};
    where[b] = {l1, first};
    const std::string l2 = other_than(rng, kLocations, l1);
    const std::size_t second =
        st.say(rng.pick(linkers) + " they " + rng.pick(kMoveVerbs) + " the " + l2 + ".");
    where[a] = {l2, second};
    where[b] = {l2, second};
    std::vector<std::string> known;
    for (const auto& [k, p] : where) known.push_back(k);
    const std::string& who = rng.pick(known);
    st.ask("Where is " + who + "?", where[who].loc, {where[who].line});
  }
}

void task14(Rng& rng, StoryText& st, std::size_t max_q) {
  const Strings times = {"yesterday", "this morning", "this afternoon", "this evening"};
  Strings actors = kActors2;
  rng.shuffle(actors);
  struct Event {
    std::string who;
    std::size_t time;
    std::string loc;
  };
  std::vector<Event> events;
  std::map<std::string, Strings> trail;
  for (std::size_t k = 0; k < 2; ++k) {
    const std::string& who = actors[k];
    const std::size_t n = 2 + rng.below(3);
    std::string prev;
    for (std::size_t t = 0; t < n; ++t) {
      std::string l;
      do l = rng.pick(kLocations2);
      while (l == prev || std::find(trail[who].begin(), trail[who].end(), l) != trail[who].end());
      trail[who].push_back(l);
      events.push_back({who, t, l});
      prev = l;
    }
  }
  rng.shuffle(events);
  std::map<std::pair<std::string, std::size_t>, std::size_t> line_of;
  for (const auto& e : events) {
    const std::string verb = rng.pick(kMoveVerbs);
    const std::string sentence = rng.chance(0.5)
                                     ? cap(times[e.time]) + " " + e.who + " " + verb + " the " + e.loc + "."
                                     : e.who + " " + verb + " the " + e.loc + " " + times[e.time] + ".";
    line_of[{e.who, e.time}] = st.say(sentence);
  }
  for (std::size_t q = 0; q < std::min<std::size_t>(2, max_q); ++q) {
    const std::string& who = actors[q];
    const auto& tr = trail[who];
    const std::size_t k = 1 + rng.below(tr.size() - 1);
    st.ask("Where was " + who + " before the " + tr[k] + "?", tr[k - 1],
           {std::min(line_of[{who, k - 1}], line_of[{who, k}]),
            std::max(line_of[{who, k - 1}], line_of[{who, k}])});
  }
}

void task15(Rng& rng, StoryText& st, std::size_t max_q) {
  const Strings singular = {"mouse", "sheep", "wolf", "cat"};
  const Strings plural = {"Mice", "Sheep", "Wolves", "Cats"};
  Strings names = {"Gertrude", "Winona", "Jessica", "Emily"};
  std::vector<std::size_t> fears(4);
  std::vector<std::size_t> fact_line(4);
  std::vector<std::size_t> order = {0, 1, 2, 3};
  rng.shuffle(order);
  for (std::size_t i : order) {
    fears[i] = rng.below(3);
    if (fears[i] >= i) ++fears[i];
    std::string target = plural[fears[i]];
    target[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(target[0])));
    fact_line[i] = st.say(plural[i] + " are afraid of " + target + ".");
  }
  rng.shuffle(names);
  std::vector<std::size_t> kind(4);
  std::vector<std::size_t> kind_line(4);
  for (std::size_t n = 0; n < 4; ++n) {
    kind[n] = rng.below(4);
    kind_line[n] = st.say(names[n] + " is a " + singular[kind[n]] + ".");
  }
  std::vector<std::size_t> ask_order = {0, 1, 2, 3};
  rng.shuffle(ask_order);
  for (std::size_t q = 0; q < std::min<std::size_t>(4, max_q); ++q) {
    const std::size_t n = ask_order[q];
    st.ask("What is " + lower(names[n]) + " afraid of?", singular[fears[kind[n]]],
           {std::min(kind_line[n], fact_line[kind[n]]), std::max(kind_line[n], fact_line[kind[n]])});
  }
}

void task16(Rng& rng, StoryText& st, std::size_t) {
  Strings names = {"Lily", "Bernhard", "Greg", "Julius", "Brian"};
  const Strings animals = {"swan", "lion", "frog", "rhino"};
  const Strings colors = {"white", "yellow", "green", "gray"};
  rng.shuffle(names);
  std::vector<std::size_t> color_of(4);
  for (auto& c : color_of) c = rng.below(4);
  std::map<std::size_t, std::size_t> color_line;  // animal -> a line stating its colour
  std::vector<std::size_t> seen;
  for (std::size_t n = 0; n < 4; ++n) {
    const std::size_t a = rng.below(4);
    const std::size_t l1 = st.say(names[n] + " is a " + animals[a] + ".");
    const std::size_t l2 = st.say(names[n] + " is " + colors[color_of[a]] + ".");
    if (!color_line.count(a)) color_line[a] = l2;
    (void)l1;
    seen.push_back(a);
  }
  const std::size_t a = rng.pick(seen);
  const std::size_t l = st.say(names[4] + " is a " + animals[a] + ".");
  st.ask("What color is " + names[4] + "?", colors[color_of[a]], {color_line[a], l});
}

void task17(Rng& rng, StoryText& st, std::size_t max_q) {
  Strings shapes = {"triangle", "pink rectangle", "blue square", "red square", "red sphere",
                    "yellow square"};
  rng.shuffle(shapes);
  const Strings rels = {"to the left of", "to the right of", "above", "below"};
  const int dx[] = {-1, 1, 0, 0};
  const int dy[] = {0, 0, 1, -1};
  // shapes[0] at the origin, shapes[1] relative to it, shapes[2] relative to shapes[1]
  std::array<std::pair<int, int>, 3> pos{};
  const std::size_t r1 = rng.below(4);
  const std::size_t r2 = rng.below(4);
  pos[1] = {dx[r1], dy[r1]};
  pos[2] = {pos[1].first + dx[r2], pos[1].second + dy[r2]};
  const std::size_t l1 = st.say("The " + shapes[1] + " is " + rels[r1] + " the " + shapes[0] + ".");
  const std::size_t l2 = st.say("The " + shapes[2] + " is " + rels[r2] + " the " + shapes[1] + ".");
  const std::array<std::pair<std::size_t, std::size_t>, 6> pairs = {
      {{2, 0}, {0, 2}, {1, 0}, {0, 1}, {2, 1}, {1, 2}}};
  for (std::size_t q = 0; q < std::min<std::size_t>(8, max_q); ++q) {
    const auto [p, o] = pairs[rng.below(pairs.size())];
    const std::size_t r = rng.below(4);
    const int ddx = pos[p].first - pos[o].first;
    const int ddy = pos[p].second - pos[o].second;
    const bool yes = (r == 0 && ddx < 0) || (r == 1 && ddx > 0) || (r == 2 && ddy > 0) ||
                     (r == 3 && ddy < 0);
    st.ask("Is the " + shapes[p] + " " + rels[r] + " the " + shapes[o] + "?", yes ? "yes" : "no",
           {l1, l2});
  }
}

void task18(Rng& rng, StoryText& st, std::size_t max_q) {
  Strings objects = {"box", "chest", "box of chocolates", "suitcase", "container", "chocolate"};
  rng.shuffle(objects);
  // objects[0] < objects[1] < objects[2] < objects[3] in size
  std::vector<std::size_t> lines;
  for (std::size_t i = 0; i + 1 < 4; ++i) {
    if (rng.chance(0.5)) {
      lines.push_back(st.say("The " + objects[i] + " fits inside the " + objects[i + 1] + "."));
    } else {
      lines.push_back(st.say("The " + objects[i + 1] + " is bigger than the " + objects[i] + "."));
    }
  }
  for (std::size_t q = 0; q < std::min<std::size_t>(2, max_q); ++q) {
    std::size_t a = rng.below(4);
    std::size_t b = rng.below(3);
    if (b >= a) ++b;
    const std::size_t lo = std::min(a, b);
    const std::size_t hi = std::max(a, b);
    std::vector<std::size_t> sup(lines.begin() + static_cast<std::ptrdiff_t>(lo),
                                 lines.begin() + static_cast<std::ptrdiff_t>(hi));
    if (rng.chance(0.5)) {
      st.ask("Does the " + objects[a] + " fit in the " + objects[b] + "?", a < b ? "yes" : "no", sup);
    } else {
      st.ask("Is the " + objects[a] + " bigger than the " + objects[b] + "?", a > b ? "yes" : "no",
             sup);
    }
  }
}

void task19(Rng& rng, StoryText& st, std::size_t) {
  Strings locs = kLocations;
  rng.shuffle(locs);
  const char* names[] = {"north", "south", "east", "west"};
  const char* letters[] = {"n", "s", "e", "w"};
  const int dx[] = {0, 0, 1, -1};
  const int dy[] = {1, -1, 0, 0};
  // Self-avoiding walk over five cells.
  std::vector<std::pair<int, int>> cells = {{0, 0}};
  std::vector<std::size_t> steps;
  while (cells.size() < 5) {
    const std::size_t d = rng.below(4);
    const std::pair<int, int> next{cells.back().first + dx[d], cells.back().second + dy[d]};
    if (std::find(cells.begin(), cells.end(), next) != cells.end()) continue;
    cells.push_back(next);
    steps.push_back(d);
  }
  std::vector<std::size_t> order = {0, 1, 2, 3};
  rng.shuffle(order);
  std::vector<std::size_t> line_of(4);
  for (std::size_t k : order) {
    // cell k+1 lies in direction steps[k] from cell k
    line_of[k] = st.say("The " + locs[k + 1] + " is " + names[steps[k]] + " of the " + locs[k] + ".");
  }
  const std::size_t start = rng.below(3);
  st.ask("How do you go from the " + locs[start] + " to the " + locs[start + 2] + "?",
         std::string(letters[steps[start]]) + "," + letters[steps[start + 1]],
         {std::min(line_of[start], line_of[start + 1]), std::max(line_of[start], line_of[start + 1])});
}

void task20(Rng& rng, StoryText& st, std::size_t max_q) {
  struct Motive {
    const char* feeling;
    const char* place;
    const char* thing;
  };
  const Motive motives[] = {{"hungry", "kitchen", "apple"},
                            {"thirsty", "kitchen", "milk"},
                            {"tired", "bedroom", "pajamas"},
                            {"bored", "garden", "football"}};
  Strings actors = {"Sumit", "Yann", "Antoine", "Jason"};
  rng.shuffle(actors);
  const std::size_t n_actors = 2 + rng.below(3);
  std::size_t asked = 0;
  for (std::size_t k = 0; k < n_actors && asked < max_q; ++k) {
    const std::string& who = actors[k];
    const Motive& m = motives[rng.below(4)];
    const std::string low = lower(who);
    const std::size_t fl = st.say(who + " is " + m.feeling + ".");
    st.ask("Where will " + low + " go?", m.place, {fl});
    if (++asked >= max_q) break;
    st.say(who + " " + rng.pick(kMoveVerbs) + " the " + m.place + ".");
    st.ask("Why did " + low + " go to the " + m.place + "?", m.feeling, {fl});
    if (++asked >= max_q) break;
    st.say(who + " " + rng.pick(kGrabVerbs) + " the " + m.thing + " there.");
    st.ask("Why did " + low + " get the " + m.thing + "?", m.feeling, {fl});
    ++asked;
  }
}

using Generator = void (*)(Rng&, StoryText&, std::size_t);

void task7(Rng& rng, StoryText& st, std::size_t max_q) { carrying_task(rng, st, max_q, false); }
void task8(Rng& rng, StoryText& st, std::size_t max_q) { carrying_task(rng, st, max_q, true); }

const Generator kGenerators[kNumTasks] = {task1,  task2,  task3,  task4,  task5,  task6,  task7,
                                          task8,  task9,  task10, task11, task12, task13, task14,
                                          task15, task16, task17, task18, task19, task20};

const char* const kNames[kNumTasks] = {
    "single-supporting-fact", "two-supporting-facts",  "three-supporting-facts",
    "two-arg-relations",      "three-arg-relations",   "yes-no-questions",
    "counting",               "lists-sets",            "simple-negation",
    "indefinite-knowledge",   "basic-coreference",     "conjunction",
    "compound-coreference",   "time-reasoning",        "basic-deduction",
    "basic-induction",        "positional-reasoning",  "size-reasoning",
    "path-finding",           "agents-motivations"};

void check_task(int task) {
  if (task < 1 || task > kNumTasks) {
    throw ContractError("bAbI task must be in 1..20, got " + std::to_string(task));
  }
}

}  // namespace

const char* task_name(int task) {
  check_task(task);
  return kNames[task - 1];
}

std::uint64_t split_seed(std::uint64_t seed, const std::string& split) {
  if (split == "train") return 2 * seed;
  if (split == "test") return 2 * seed + 1;
  throw ContractError("split must be train or test, got '" + split + "'");
}

std::string task_file_name(int task, const std::string& split) {
  return "qa" + std::to_string(task) + "_" + task_name(task) + "_" + split + ".txt";
}

std::string generate_task(int task, std::size_t n_questions, std::uint64_t seed) {
  check_task(task);
  Rng rng(seed * 1000003ULL + static_cast<std::uint64_t>(task));
  std::string out;
  std::size_t total = 0;
  while (total < n_questions) {
    StoryText st;
    kGenerators[task - 1](rng, st, n_questions - total);
    total += st.questions();
    out += st.str();
  }
  return out;
}

}  // namespace ltmn::babi
