#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "ltmn/babi_tasks.hpp"
#include "ltmn/checkpoint.hpp"
#include "ltmn/corpus.hpp"
#include "ltmn/errors.hpp"
#include "ltmn/metrics.hpp"
#include "ltmn/model_check.hpp"
#include "ltmn/training.hpp"

namespace fs = std::filesystem;

namespace ltmn::cli {
namespace {

constexpr double kMaxUnknownFraction = 0.20;

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  if (in.bad()) throw Error("cannot read " + path.string());
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

std::vector<corpus::QAInstance> load_corpus(const std::string& path) {
  try {
    return corpus::load_instances(path);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

// key=value lines; '#' starts a comment. Keys name long flags, with '_' and
// '-' interchangeable. Values fill only options absent from the command line.
void apply_config_file(CLI::App& app, const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    CLI::Option* opt = app.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config" || key == "help") {
      throw UsageError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    opt->clear();
    opt->add_result(value);
    opt->run_callback();
  }
}

void add_training_options(CLI::App* sub, training::TrainingConfig& c, std::string& pretrained) {
  sub->add_option("--lr", c.learning_rate, "SGD learning rate");
  sub->add_option("--batch-size", c.batch_size, "examples per mini-batch");
  sub->add_option("--epochs", c.epochs, "training epochs");
  sub->add_option("--init-std", c.init_std, "standard deviation of the Gaussian weight init");
  sub->add_option("--validation-fraction", c.validation_fraction,
                  "share of the training file held out for model selection");
  sub->add_option("--seed", c.seed, "seed for init, split and shuffling");
  sub->add_option("--hops", c.hops, "memory hops");
  sub->add_option("--dim", c.dim, "embedding size d");
  sub->add_option("--hidden", c.hidden, "decoder state size (0: same as --dim)");
  sub->add_option("--max-len", c.max_len, "maximum answer length in words");
  sub->add_option("--grad-clip", c.grad_clip, "global gradient-norm clip");
  sub->add_flag("--tie-a-b", c.tie_a_b, "share the sentence and question embeddings");
  sub->add_option("--pretrained", pretrained, "word vectors, one `token v1 .. vd` per line");
}

void echo_config(std::ostream& err, const CLI::App& sub) {
  err << "# " << sub.get_name() << " configuration\n";
  std::istringstream lines(sub.config_to_str(true, false));
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty()) err << "#   " << line << '\n';
  }
}

std::string percent(double fraction) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << 100.0 * fraction << '%';
  return s.str();
}

std::string fraction_str(double fraction) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << fraction;
  return s.str();
}

// ---------------------------------------------------------------------------

struct GenerateMultiword {
  std::string in_dir, out_dir, table_path;

  int run(std::ostream& out, std::ostream& err) const {
    corpus::ReplacementTable table = corpus::ReplacementTable::multiword_default();
    if (!table_path.empty()) {
      std::istringstream in(read_file(table_path));
      table = corpus::load_replacement_table(in);
      table.validate();
    }
    if (!fs::is_directory(in_dir)) throw Error("not a directory: " + in_dir);

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(in_dir)) {
      if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      err << "warning: no .txt files in " << in_dir << "\n";
      return kOk;
    }

    int failures = 0;
    for (const auto& f : files) {
      try {
        const std::string text = read_file(f);
        const std::string converted = corpus::apply_replacements(text, table);
        const std::size_t before = corpus::count_questions(corpus::parse_babi_string(text));
        const std::size_t after = corpus::count_questions(corpus::parse_babi_string(converted));
        if (before != after) {
          throw Error("question count changed from " + std::to_string(before) + " to " +
                      std::to_string(after));
        }
        write_file(fs::path(out_dir) / f.filename(), converted);
        const auto counts = corpus::count_replacements(text, table);
        const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
        out << f.filename().string() << "\t" << before << " questions\t" << total
            << " replacements";
        for (std::size_t i = 0; i < counts.size(); ++i) {
          if (counts[i] > 0) out << "\t" << table.entries[i].first << ":" << counts[i];
        }
        out << "\n";
      } catch (const Error& e) {
        ++failures;
        err << "error: " << f.string() << ": " << e.what() << "\n";
      }
    }
    return failures == 0 ? kOk : kData;
  }
};

struct GenerateBabi {
  std::string out_dir;
  std::vector<int> tasks;
  std::size_t train_size = 1000;
  std::size_t test_size = 1000;
  std::uint64_t seed = 1;

  int run(std::ostream& out, std::ostream&) const {
    std::vector<int> which = tasks;
    if (which.empty()) {
      which.resize(babi::kNumTasks);
      std::iota(which.begin(), which.end(), 1);
    }
    for (int t : which) {
      for (const auto& [split, n] : {std::pair{"train", train_size}, std::pair{"test", test_size}}) {
        const fs::path path = fs::path(out_dir) / babi::task_file_name(t, split);
        write_file(path, babi::generate_task(t, n, babi::split_seed(seed, split)));
        out << path.string() << "\t" << n << " questions\n";
      }
    }
    return kOk;
  }
};

struct Train {
  std::string train_path, checkpoint_path, log_path, pretrained;
  training::TrainingConfig config;

  int run(std::ostream& out, std::ostream& err) const {
    training::TrainingConfig c = config;
    if (!pretrained.empty()) c.pretrained_path = pretrained;
    c.validate();
    const auto data = load_corpus(train_path);
    const auto start = std::chrono::steady_clock::now();
    const auto result = training::train(data, c, [&](const training::EpochRecord& r) {
      err << "epoch " << r.epoch << "\tloss " << r.train_loss << "\tval_ema " << r.val_ema
          << "\n";
    });
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    training::save_checkpoint(checkpoint_path,
                              {c, result.vocab, result.best, result.best_epoch, result.best_val_ema});
    const std::string log = log_path.empty() ? checkpoint_path + ".log" : log_path;
    std::ostringstream log_text;
    training::write_epoch_log(log_text, result.log);
    write_file(log, log_text.str());

    out << "train examples\t" << result.train_set.size() << "\n"
        << "validation examples\t" << result.validation_set.size() << "\n"
        << "vocabulary\t" << result.vocab.size() << "\n";
    if (result.pretrained_covered) {
      out << "pretrained coverage\t" << *result.pretrained_covered << "/" << result.vocab.size()
          << "\t" << percent(static_cast<double>(*result.pretrained_covered) /
                              static_cast<double>(result.vocab.size()))
          << "\n";
    }
    out
        << "best epoch\t" << result.best_epoch << "\n"
        << "validation EMA\t" << fraction_str(result.best_val_ema) << "\t"
        << percent(result.best_val_ema) << "\n"
        << "seconds\t" << std::fixed << std::setprecision(1) << seconds << "\n"
        << "checkpoint\t" << checkpoint_path << "\n"
        << "log\t" << log << "\n";
    return kOk;
  }
};

double unknown_fraction(const std::vector<corpus::QAInstance>& data, const corpus::Vocabulary& v) {
  std::size_t total = 0, unknown = 0;
  auto tally = [&](const corpus::Tokens& ts) {
    for (const auto& t : ts) {
      ++total;
      if (!v.contains(t)) ++unknown;
    }
  };
  for (const auto& qa : data) {
    for (const auto& s : qa.context) tally(s);
    tally(qa.question);
    tally(qa.answer);
  }
  return total == 0 ? 0.0 : static_cast<double>(unknown) / static_cast<double>(total);
}

struct Eval {
  std::string checkpoint_path, test_path, report_path;

  int run(std::ostream& out, std::ostream& err) const {
    auto ck = training::load_checkpoint(checkpoint_path);
    const auto data = load_corpus(test_path);
    const double unk = unknown_fraction(data, ck.vocab);
    if (unk > kMaxUnknownFraction) {
      throw DomainError("vocabulary mismatch: " + percent(unk) + " of tokens in " + test_path +
                        " are unknown to the checkpoint (limit " + percent(kMaxUnknownFraction) +
                        ")");
    }
    if (unk > 0.0) err << "note: " << percent(unk) << " of tokens map to <UNK>\n";
    const auto report = metrics::evaluate(ck.params, ck.vocab, data, ck.config.model());
    const std::string path = report_path.empty() ? checkpoint_path + ".eval.tsv" : report_path;
    std::ostringstream text;
    metrics::write_report(text, report);
    write_file(path, text.str());

    out << "examples\t" << report.n_examples << "\n";
    for (const auto& [name, v] : {std::pair{"EMA", report.ema}, std::pair{"PMA", report.pma},
                                  std::pair{"BLEU", report.bleu}}) {
      out << name << "\t" << fraction_str(v) << "\t" << percent(v) << "\n";
    }
    out << "report\t" << path << "\n";
    return kOk;
  }
};

std::string strip_line_number(const std::string& line) {
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i < line.size() && line[i] == ' ') return line.substr(i + 1);
  return line;
}

struct Answer {
  std::string checkpoint_path, story_path, question;
  std::vector<std::string> sentences;
  bool verbose = false;

  int run(std::ostream& out, std::ostream&) const {
    std::vector<std::string> story = sentences;
    if (!story_path.empty()) {
      std::istringstream in(read_file(story_path));
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        story.push_back(strip_line_number(line));
      }
    }
    if (story.empty()) throw ContractError("the story has no sentences");

    auto ck = training::load_checkpoint(checkpoint_path);
    corpus::QAInstance qa;
    for (const auto& s : story) qa.context.push_back(corpus::tokenize(s));
    qa.question = corpus::tokenize(question);
    const ModelConfig mc = ck.config.model();
    const auto pred = predict(ck.params, encode_instance(qa, ck.vocab), mc);
    out << metrics::join(ck.vocab.decode(pred.words)) << "\n";
    if (verbose) {
      for (std::size_t k = 0; k < pred.attention.size(); ++k) {
        const auto& p = pred.attention[k];
        out << "attention hop " << k + 1 << " (sum "
            << std::accumulate(p.begin(), p.end(), 0.0) << ")\n";
        for (std::size_t i = 0; i < p.size(); ++i) {
          out << std::fixed << std::setprecision(4) << p[i] << std::defaultfloat << "\t"
              << story[i] << "\n";
        }
      }
    }
    return kOk;
  }
};

struct GradCheck {
  ModelCheckOptions options;

  int run(std::ostream& out, std::ostream& err) const {
    if (options.epsilon > 1e-2) {
      err << "warning: epsilon " << options.epsilon
          << " is above 1e-2; truncation error will dominate and the check is expected to "
             "degrade\n";
    }
    const auto r = check_model_gradients(options);
    out << "vocabulary\t" << r.vocab_size << "\n";
    for (const auto& p : r.report.params) {
      out << std::left << std::setw(10) << p.name << std::right << "\t" << std::scientific
          << std::setprecision(3) << p.max_rel_error << std::defaultfloat << "\n";
    }
    out << "max relative error\t" << std::scientific << std::setprecision(3)
        << r.report.max_rel_error << std::defaultfloat << "\n"
        << "tolerance\t" << options.tolerance << "\n"
        << "seconds\t" << std::fixed << std::setprecision(2) << r.seconds << std::defaultfloat
        << "\n"
        << (r.report.passed ? "PASS" : "FAIL") << "\n";
    return r.report.passed ? kOk : kNumeric;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Question answering with a soft-attention memory and an LSTM answer decoder."};
  app.name("ltmn");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  GenerateMultiword gm;
  auto* s_gm = app.add_subcommand("generate-multiword",
                                  "rewrite story files with multi-word answers");
  s_gm->add_option("--in", gm.in_dir, "directory of story .txt files")->required();
  s_gm->add_option("--out", gm.out_dir, "output directory")->required();
  s_gm->add_option("--table", gm.table_path, "replacement table (original<TAB>phrase lines)");

  GenerateBabi gb;
  auto* s_gb = app.add_subcommand("generate-babi", "write synthetic train/test story files");
  s_gb->add_option("--out", gb.out_dir, "output directory")->required();
  s_gb->add_option("--tasks", gb.tasks, "task numbers, space or comma separated (default: all 20)")
      ->delimiter(',')
      ->check(CLI::Range(1, babi::kNumTasks));
  s_gb->add_option("--train-size", gb.train_size, "questions per training file");
  s_gb->add_option("--test-size", gb.test_size, "questions per test file");
  s_gb->add_option("--seed", gb.seed, "generator seed");

  Train tr;
  auto* s_tr = app.add_subcommand("train", "train a model and write its best checkpoint");
  s_tr->add_option("--train", tr.train_path, "training story file")->required();
  s_tr->add_option("--checkpoint", tr.checkpoint_path, "checkpoint output path")->required();
  s_tr->add_option("--log", tr.log_path, "epoch log path (default: <checkpoint>.log)");
  add_training_options(s_tr, tr.config, tr.pretrained);

  Eval ev;
  auto* s_ev = app.add_subcommand("eval", "score a checkpoint on a story file");
  s_ev->add_option("--checkpoint", ev.checkpoint_path, "checkpoint path")->required();
  s_ev->add_option("--test", ev.test_path, "test story file")->required();
  s_ev->add_option("--report", ev.report_path, "per-example report (default: <checkpoint>.eval.tsv)");

  Answer an;
  auto* s_an = app.add_subcommand("answer", "answer one question about a story");
  s_an->add_option("--checkpoint", an.checkpoint_path, "checkpoint path")->required();
  s_an->add_option("--story", an.story_path, "file with one statement per line");
  s_an->add_option("--sentence", an.sentences, "a statement; repeat in story order");
  s_an->add_option("--question", an.question, "the question")->required();
  s_an->add_flag("--verbose", an.verbose, "print the attention over statements for each hop");

  GradCheck gc;
  gc.options.config.seed = 1;
  auto* s_gc = app.add_subcommand("gradcheck", "finite-difference check of the full model");
  s_gc->add_option("--epsilon", gc.options.epsilon, "central-difference step");
  s_gc->add_option("--tolerance", gc.options.tolerance, "maximum relative error");
  s_gc->add_option("--dim", gc.options.config.dim, "embedding size d");
  s_gc->add_option("--hidden", gc.options.config.hidden, "decoder state size");
  s_gc->add_option("--hops", gc.options.config.hops, "memory hops");
  s_gc->add_option("--seed", gc.options.config.seed, "initialisation seed");
  s_gc->add_flag("--tie-a-b", gc.options.config.tie_a_b, "share the embeddings");
  s_gc->add_option("--inject-grad-error", gc.options.inject_error,
                   "test hook: scale analytic gradients by (1 + value)");

  std::vector<CLI::App*> subs = {s_gm, s_gb, s_tr, s_ev, s_an, s_gc};
  std::vector<std::string> config_paths(subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i) {
    subs[i]->add_option("--config", config_paths[i], "key=value file; flags take precedence");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    CLI::App* sub = nullptr;
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i]->parsed()) {
        sub = subs[i];
        if (!config_paths[i].empty()) apply_config_file(*sub, config_paths[i]);
      }
    }
    echo_config(err, *sub);
    if (sub == s_gm) return gm.run(out, err);
    if (sub == s_gb) return gb.run(out, err);
    if (sub == s_tr) return tr.run(out, err);
    if (sub == s_ev) return ev.run(out, err);
    if (sub == s_an) return an.run(out, err);
    return gc.run(out, err);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
}

}  // namespace ltmn::cli
