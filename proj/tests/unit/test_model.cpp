#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "ltmn/answer.hpp"
#include "ltmn/embedding.hpp"
#include "ltmn/errors.hpp"
#include "ltmn/memory.hpp"
#include "ltmn/model.hpp"
#include "ltmn/training.hpp"

using namespace ltmn;
using ad::Graph;
using ad::Matrix;
using ad::Node;

namespace {

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

Matrix col(std::initializer_list<double> v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

corpus::Vocabulary small_vocab() {
  return corpus::Vocabulary::from_tokens({"<PAD>", "<UNK>", "<BOA>", "<EOS>", "john", "ran", "garden"});
}

}  // namespace

// ---------------------------------------------------------------------------
// embedding

TEST_CASE("encode_bow counts tokens plus one <EOS>") {
  const auto v = small_vocab();
  const auto bow = embedding::encode_bow({"john", "john", "ran"}, v);
  CHECK(bow.count(v.index("john")) == 2.0);
  CHECK(bow.count(v.index("ran")) == 1.0);
  CHECK(bow.count(corpus::Vocabulary::kEos) == 1.0);
  CHECK(bow.counts.size() == 3);

  const auto empty = embedding::encode_bow({}, v);
  REQUIRE(empty.counts.size() == 1);
  CHECK(empty.count(corpus::Vocabulary::kEos) == 1.0);

  CHECK(embedding::encode_bow({"ran", "john", "john"}, v) == bow);
  CHECK(embedding::encode_bow({"zebra"}, v).count(corpus::Vocabulary::kUnk) == 1.0);

  // Concatenation adds counts, with one <EOS> fewer than the sum of parts.
  const auto left = embedding::encode_bow({"john"}, v).dense();
  const auto right = embedding::encode_bow({"ran", "garden"}, v).dense();
  Matrix expect = left + right;
  expect(corpus::Vocabulary::kEos, 0) -= 1.0;
  CHECK(embedding::encode_bow({"john", "ran", "garden"}, v).dense() == expect);
}

TEST_CASE("embed_sentences and embed_question") {
  std::mt19937_64 rng(1);
  const auto v = small_vocab();
  ad::Parameter a("A", random_matrix(rng, 3, static_cast<Eigen::Index>(v.size())));
  Graph g;
  Node an = g.parameter(a);

  embedding::BagOfWords one_hot{v.size(), {{5, 1.0}}};
  CHECK(max_abs(embedding::embed_sentences(an, {one_hot}).value() - a.value.col(5)) == 0.0);
  embedding::BagOfWords two{v.size(), {{4, 1.0}, {6, 1.0}}};
  CHECK(max_abs(embedding::embed_sentences(an, {two}).value() - (a.value.col(4) + a.value.col(6))) < 1e-15);

  // Loop oracle over random bags.
  std::vector<embedding::BagOfWords> bags;
  for (int i = 0; i < 3; ++i) {
    embedding::BagOfWords b{v.size(), {}};
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (rng() % 2) b.counts.push_back({k, static_cast<double>(1 + rng() % 3)});
    }
    bags.push_back(b);
  }
  const Matrix m = embedding::embed_sentences(an, bags).value();
  for (int i = 0; i < 3; ++i) CHECK(max_abs(m.col(i) - a.value * bags[i].dense()) < 1e-12);

  // Linearity.
  const double alpha = 0.7, beta = -1.3;
  embedding::BagOfWords mix{v.size(), {}};
  Matrix dense_mix = alpha * bags[0].dense() + beta * bags[1].dense();
  for (Eigen::Index k = 0; k < dense_mix.rows(); ++k) {
    if (dense_mix(k, 0) != 0.0) mix.counts.push_back({static_cast<std::size_t>(k), dense_mix(k, 0)});
  }
  CHECK(max_abs(embedding::embed_question(an, mix).value() -
                (alpha * m.col(0) + beta * m.col(1))) < 1e-10);

  // Hand example: d=2, |V|=3.
  ad::Parameter b("B", Matrix{{1, 2, 3}, {4, 5, 6}});
  Node bn = g.parameter(b);
  embedding::BagOfWords q{3, {{0, 1.0}, {2, 2.0}}};
  CHECK(embedding::embed_question(bn, q).value() == col({7, 16}));

  // Tied matrices: question embedding equals the sentence embedding.
  const Matrix via_question = embedding::embed_question(an, two).value();
  CHECK(via_question == embedding::embed_sentences(an, {two}).value());

  embedding::BagOfWords wrong{4, {{0, 1.0}}};
  CHECK_THROWS_AS(embedding::embed_sentences(an, {wrong}), DimensionError);
}

TEST_CASE("load_pretrained") {
  const auto v = small_vocab();
  const auto dir = std::filesystem::temp_directory_path() / "ltmn_pretrained_test";
  std::filesystem::create_directories(dir);
  const auto full = (dir / "full.txt").string();
  {
    std::ofstream out(full);
    for (std::size_t i = 0; i < v.size(); ++i) out << v.token(i) << ' ' << i << ' ' << -double(i) << '\n';
  }
  std::mt19937_64 rng(3);
  const auto pre = embedding::load_pretrained(full, v, 2, 0.3, rng);
  CHECK(pre.coverage == 1.0);
  CHECK(pre.covered == v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(pre.matrix(0, static_cast<Eigen::Index>(i)) == double(i));
    CHECK(pre.matrix(1, static_cast<Eigen::Index>(i)) == -double(i));
  }

  // Half the vocabulary (7 tokens is odd, so use the first 3 of 6 non-pad).
  const auto half = (dir / "half.txt").string();
  {
    std::ofstream out(half);
    out << "john 1 1\nran 2 2\ngarden 3 3\n<UNK> 4 4\nunrelated 9 9\n";
  }
  const auto vh = corpus::Vocabulary::from_tokens({"<PAD>", "<UNK>", "<BOA>", "<EOS>", "john", "ran", "garden", "x"});
  const auto ph = embedding::load_pretrained(half, vh, 2, 0.3, rng);
  CHECK(ph.covered == 4);
  CHECK(ph.coverage == doctest::Approx(0.5));
  CHECK(ph.matrix(0, 4) == 1.0);
  CHECK(ph.matrix(1, 6) == 3.0);

  const auto bad = (dir / "bad.txt").string();
  {
    std::ofstream out(bad);
    out << "john 1 1\nran 2\n";
  }
  CHECK_THROWS_AS(embedding::load_pretrained(bad, v, 2, 0.3, rng), FormatError);
  CHECK_THROWS_AS(embedding::load_pretrained(full, v, 3, 0.3, rng), FormatError);
  std::filesystem::remove_all(dir);
}

// ---------------------------------------------------------------------------
// memory

TEST_CASE("attend") {
  Graph g;
  Node u = g.constant(col({1, 0}));
  CHECK(memory::attend(u, g.constant(col({3, 4}))).value() == col({1.0}));

  Node orth = g.constant(Matrix{{0, 0, 0}, {1, 2, 3}});
  const Matrix p = memory::attend(u, orth).value();
  CHECK(max_abs(p - Matrix::Constant(3, 1, 1.0 / 3.0)) < 1e-15);

  const Matrix q = memory::attend(u, g.constant(Matrix{{1, 0}, {0, 1}})).value();
  const double e = std::exp(1.0);
  CHECK(q(0, 0) == doctest::Approx(e / (e + 1)).epsilon(1e-12));
  CHECK(q(1, 0) == doctest::Approx(1 / (e + 1)).epsilon(1e-12));
  CHECK(q(0, 0) == doctest::Approx(0.7311).epsilon(1e-4));

  CHECK_THROWS_AS(memory::attend(u, g.constant(Matrix(2, 0))), ContractError);
}

TEST_CASE("attend properties") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 6);
    Matrix mem = random_matrix(rng, 4, n);
    Matrix u = random_matrix(rng, 4, 1);
    Graph g;
    const Matrix p = memory::attend(g.constant(u), g.constant(mem)).value();
    CHECK(std::abs(p.sum() - 1.0) < 1e-9);
    CHECK(p.minCoeff() > 0.0);

    // Permutation equivariance.
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix permuted(4, n);
    for (Eigen::Index i = 0; i < n; ++i) permuted.col(i) = mem.col(perm[static_cast<std::size_t>(i)]);
    const Matrix pp = memory::attend(g.constant(u), g.constant(permuted)).value();
    for (Eigen::Index i = 0; i < n; ++i) CHECK(std::abs(pp(i, 0) - p(perm[static_cast<std::size_t>(i)], 0)) < 1e-12);

    // Positive rescaling of u keeps the argmax.
    const Matrix ps = memory::attend(g.constant(u * 3.7), g.constant(mem)).value();
    Eigen::Index a1, a2, dummy;
    p.maxCoeff(&a1, &dummy);
    ps.maxCoeff(&a2, &dummy);
    CHECK(a1 == a2);

    // The readout lies in the coordinate-wise hull of the memories.
    const Matrix o = memory::read(g.constant(p), g.constant(mem)).value();
    for (Eigen::Index j = 0; j < 4; ++j) {
      CHECK(o(j, 0) >= mem.row(j).minCoeff() - 1e-12);
      CHECK(o(j, 0) <= mem.row(j).maxCoeff() + 1e-12);
    }
  }
}

TEST_CASE("read") {
  Graph g;
  Matrix mem{{4, 0, 1}, {0, 4, 2}};
  CHECK(memory::read(g.constant(col({0, 1, 0})), g.constant(mem)).value() == col({0, 4}));
  Matrix same = col({2, -1}).replicate(1, 3);
  CHECK(max_abs(memory::read(g.constant(Matrix::Constant(3, 1, 1.0 / 3)), g.constant(same)).value() -
                col({2, -1})) < 1e-15);
  Matrix two{{4, 0}, {0, 4}};
  CHECK(memory::read(g.constant(col({0.25, 0.75})), g.constant(two)).value() == col({1, 3}));
  CHECK_THROWS_AS(memory::read(g.constant(col({0.5, 0.5})), g.constant(mem)), DimensionError);
}

TEST_CASE("hop") {
  Graph g;
  Matrix mem{{1, 0}, {0, 2}};
  Node u = g.constant(col({1, 1}));
  Node m = g.constant(mem);

  const auto one = memory::hop(u, m, 1);
  const Matrix direct = memory::read(memory::attend(u, m), m).value();
  CHECK(one.output.value() == direct);
  CHECK(one.query.value() == col({1, 1}));
  CHECK(one.attention.size() == 1);

  const auto zero = memory::hop(u, g.constant(Matrix::Zero(2, 3)), 2);
  CHECK(zero.output.value() == Matrix::Zero(2, 1));
  CHECK(zero.query.value() == col({1, 1}));

  // Hand trace of two hops.
  auto softmax2 = [](double a, double b) {
    const double mx = std::max(a, b);
    const double ea = std::exp(a - mx), eb = std::exp(b - mx);
    return std::make_pair(ea / (ea + eb), eb / (ea + eb));
  };
  auto [p1, p2] = softmax2(1.0, 2.0);      // u1 . m = [1, 2]
  const double o1x = p1 * 1, o1y = p2 * 2;
  const double u2x = 1 + o1x, u2y = 1 + o1y;
  auto [q1, q2] = softmax2(u2x * 1, u2y * 2);
  const auto two = memory::hop(u, m, 2);
  CHECK(two.output.value()(0, 0) == doctest::Approx(q1 * 1).epsilon(1e-12));
  CHECK(two.output.value()(1, 0) == doctest::Approx(q2 * 2).epsilon(1e-12));
  CHECK(two.query.value()(0, 0) == doctest::Approx(u2x).epsilon(1e-12));
  CHECK(two.query.value()(1, 0) == doctest::Approx(u2y).epsilon(1e-12));
  CHECK(two.attention.size() == 2);
  CHECK_THROWS_AS(memory::hop(u, m, 0), ContractError);
}

TEST_CASE("attend and read gradients") {
  std::mt19937_64 rng(6);
  ad::Parameter u("u", random_matrix(rng, 3, 1));
  ad::Parameter mem("M", random_matrix(rng, 3, 4));
  std::vector<ad::Parameter*> ps{&u, &mem};
  for (std::size_t k : {1, 2, 3}) {
    const auto report = ad::gradient_check(
        [&](Graph& g) {
          const auto h = memory::hop(g.parameter(u), g.parameter(mem), k);
          return ad::sum(ad::hadamard(h.output, g.constant(col({1.0, -2.0, 0.5}))));
        },
        ps, 1e-5, 1e-4);
    CHECK(report.passed);
  }
}

// ---------------------------------------------------------------------------
// answer

TEST_CASE("init_answer") {
  auto p = answer::DecoderParameters::zeros(5, 2, 2, 3);
  Graph g;
  Node o = g.constant(col({0.3, -0.2}));
  Node u = g.constant(col({1.0, 2.0}));
  CHECK(max_abs(answer::init_answer(o, u, p).value() - Matrix::Constant(5, 1, 0.2)) < 1e-15);

  std::mt19937_64 rng(7);
  p.init_w.value = random_matrix(rng, 5, 2);
  CHECK(max_abs(answer::init_answer(g.constant(-u.value()), u, p).value() - Matrix::Constant(5, 1, 0.2)) < 1e-15);

  // d=2, |V|=3 hand instance.
  auto h = answer::DecoderParameters::zeros(3, 2, 2, 2);
  h.init_w.value = Matrix{{1, 0}, {0, 1}, {1, 1}};
  h.init_b.value = col({0, 0, -1});
  // o + u = [1, 2] -> logits [1, 2, 2]
  const Matrix a0 = answer::init_answer(g.constant(col({0.5, 1.5})), g.constant(col({0.5, 0.5})), h).value();
  const double z = std::exp(1.0) + 2 * std::exp(2.0);
  CHECK(a0(0, 0) == doctest::Approx(std::exp(1.0) / z).epsilon(1e-12));
  CHECK(a0(1, 0) == doctest::Approx(std::exp(2.0) / z).epsilon(1e-12));
  CHECK(a0(2, 0) == doctest::Approx(std::exp(2.0) / z).epsilon(1e-12));

  CHECK_THROWS_AS(answer::init_answer(g.constant(col({1, 2, 3})), g.constant(col({1, 2, 3})), h), DimensionError);
}

TEST_CASE("embed_input") {
  std::mt19937_64 rng(8);
  Graph g;
  ad::Parameter e("E", random_matrix(rng, 3, 4));
  Node en = g.parameter(e);
  Matrix onehot = Matrix::Zero(4, 1);
  onehot(2, 0) = 1.0;
  const Matrix via_dense = answer::embed_input(en, g.constant(onehot)).value();
  CHECK(via_dense == answer::embed_input(en, 2).value());
  CHECK(answer::embed_input(en, 1).value() == e.value.col(1));
  CHECK(max_abs(answer::embed_input(en, g.constant(col({0.5, 0.5, 0, 0}))).value() -
                0.5 * (e.value.col(0) + e.value.col(1))) < 1e-15);
  CHECK_THROWS_AS(answer::embed_input(en, 4), DomainError);
}

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("lstm_step") {
  SUBCASE("zero weights") {
    auto p = answer::DecoderParameters::zeros(4, 2, 2, 3);
    p.vocab_b.value = col({0.1, 0.2, 0.3, 0.4});
    Graph g;
    auto s0 = answer::DecoderState::initial(g, 3);
    auto r = answer::lstm_step(g.constant(col({1.0, -1.0})), s0, p);
    CHECK(r.state.cell.value() == Matrix::Zero(3, 1));
    CHECK(r.state.output.value() == Matrix::Zero(3, 1));
    CHECK(r.logits.value() == p.vocab_b.value);
    CHECK(r.state.t == 1);
  }
  SUBCASE("saturated gates keep the cell") {
    std::mt19937_64 rng(9);
    auto p = answer::DecoderParameters::zeros(4, 2, 2, 2);
    for (auto* m : {&p.w_iv, &p.w_fv, &p.w_ov, &p.w_sv, &p.w_im, &p.w_fm, &p.w_om, &p.w_sm}) {
      m->value = random_matrix(rng, m->value.rows(), m->value.cols(), 0.1);
    }
    p.b_f.value = col({60, 60});
    p.b_i.value = col({-60, -60});
    Graph g;
    answer::DecoderState st{g.constant(col({0.7, -0.4})), g.constant(col({0.2, 0.1})), 3};
    auto r = answer::lstm_step(g.constant(col({0.5, 0.5})), st, p);
    CHECK(max_abs(r.state.cell.value() - col({0.7, -0.4})) < 1e-12);
  }
  SUBCASE("hand trace of the printed cell") {
    // h = 2, d_in = 2, |V| = 2
    auto p = answer::DecoderParameters::zeros(2, 2, 2, 2);
    p.w_iv.value = Matrix{{0.1, 0.2}, {0.3, 0.4}};
    p.w_fv.value = Matrix{{-0.1, 0.0}, {0.2, 0.1}};
    p.w_ov.value = Matrix{{0.5, -0.5}, {0.0, 0.3}};
    p.w_sv.value = Matrix{{0.2, 0.2}, {-0.3, 0.1}};
    p.w_im.value = Matrix{{0.1, 0.0}, {0.0, 0.1}};
    p.w_fm.value = Matrix{{0.0, 0.2}, {0.2, 0.0}};
    p.w_om.value = Matrix{{0.3, 0.1}, {0.1, 0.3}};
    p.w_sm.value = Matrix{{0.4, 0.0}, {0.0, -0.4}};
    p.b_i.value = col({0.1, -0.1});
    p.b_f.value = col({0.5, 0.5});
    p.b_gate_o.value = col({0.0, 0.2});
    p.vocab_w.value = Matrix{{1.0, -1.0}, {0.5, 2.0}};
    p.vocab_b.value = col({0.01, -0.02});

    const double v[2] = {1.0, -2.0};
    const double y0[2] = {0.3, -0.6};
    const double s0[2] = {0.2, 0.4};
    double s1[2], y1[2];
    for (int r = 0; r < 2; ++r) {
      auto lin = [&](const Matrix& wv, const Matrix& wm) {
        return wv(r, 0) * v[0] + wv(r, 1) * v[1] + wm(r, 0) * y0[0] + wm(r, 1) * y0[1];
      };
      const double i = sig(lin(p.w_iv.value, p.w_im.value) + p.b_i.value(r, 0));
      const double f = sig(lin(p.w_fv.value, p.w_fm.value) + p.b_f.value(r, 0));
      const double o = sig(lin(p.w_ov.value, p.w_om.value) + p.b_gate_o.value(r, 0));
      s1[r] = f * s0[r] + i * std::tanh(lin(p.w_sv.value, p.w_sm.value));
      y1[r] = o * s1[r];
    }
    const double l0 = 1.0 * y1[0] - 1.0 * y1[1] + 0.01;
    const double l1 = 0.5 * y1[0] + 2.0 * y1[1] - 0.02;

    Graph g;
    answer::DecoderState st{g.constant(col({s0[0], s0[1]})), g.constant(col({y0[0], y0[1]})), 1};
    auto r = answer::lstm_step(g.constant(col({v[0], v[1]})), st, p);
    CHECK(r.state.cell.value()(0, 0) == doctest::Approx(s1[0]).epsilon(1e-14));
    CHECK(r.state.cell.value()(1, 0) == doctest::Approx(s1[1]).epsilon(1e-14));
    CHECK(r.state.output.value()(0, 0) == doctest::Approx(y1[0]).epsilon(1e-14));
    CHECK(r.state.output.value()(1, 0) == doctest::Approx(y1[1]).epsilon(1e-14));
    CHECK(r.logits.value()(0, 0) == doctest::Approx(l0).epsilon(1e-14));
    CHECK(r.logits.value()(1, 0) == doctest::Approx(l1).epsilon(1e-14));

    // The diagnostic variant differs only by the tanh on the output.
    auto rs = answer::lstm_step<answer::CellVariant::Standard>(g.constant(col({v[0], v[1]})), st, p);
    CHECK(rs.state.cell.value() == r.state.cell.value());
    const double o0 = y1[0] / s1[0];
    CHECK(rs.state.output.value()(0, 0) == doctest::Approx(o0 * std::tanh(s1[0])).epsilon(1e-12));
  }
  SUBCASE("shape mismatch") {
    auto p = answer::DecoderParameters::zeros(4, 2, 2, 3);
    Graph g;
    CHECK_THROWS_AS(answer::lstm_step(g.constant(col({1, 2, 3})), answer::DecoderState::initial(g, 3), p),
                    DimensionError);
  }
}

TEST_CASE("argmax agrees with softmax and breaks ties low") {
  CHECK(answer::argmax(col({1, 3, 3, 2})) == 1);
  CHECK(answer::argmax(col({0, 0, 0})) == 0);
  std::mt19937_64 rng(10);
  for (int i = 0; i < 100; ++i) {
    Matrix z = random_matrix(rng, 9, 1, 4.0);
    Graph g;
    CHECK(answer::argmax(ad::softmax(g.constant(z)).value()) == answer::argmax(z));
  }
}

TEST_CASE("decode_greedy stopping rules") {
  auto p = answer::DecoderParameters::zeros(6, 2, 2, 2);
  Graph g;
  Node o = g.constant(col({0.1, 0.2}));
  Node u = g.constant(col({0.3, 0.1}));
  std::mt19937_64 rng(11);
  ad::Parameter e("E", random_matrix(rng, 2, 6));
  Node en = g.parameter(e);

  p.vocab_b.value = col({0, 0, 0, 5, 0, 0});
  CHECK(answer::decode_greedy(o, u, en, p, 5, 3).words.empty());

  p.vocab_b.value = col({0, 0, 0, 0, 5, 0});
  const auto capped = answer::decode_greedy(o, u, en, p, 1, 3);
  CHECK(capped.words == std::vector<std::size_t>{4});
  CHECK(answer::decode_greedy(o, u, en, p, 5, 3).words.size() == 5);
  CHECK_THROWS_AS(answer::decode_greedy(o, u, en, p, 0, 3), ContractError);

  // Random parameters: length bound and no <EOS> inside answers.
  for (int trial = 0; trial < 30; ++trial) {
    for (auto* m : p.all()) m->value = random_matrix(rng, m->value.rows(), m->value.cols(), 1.0);
    const std::size_t max_len = 1 + rng() % 5;
    const auto d = answer::decode_greedy(o, u, en, p, max_len, 3);
    CHECK(d.words.size() <= max_len);
    for (auto w : d.words) CHECK(w != 3);
  }
}

// ---------------------------------------------------------------------------
// assembled model

namespace {

struct Tiny {
  corpus::Vocabulary vocab;
  std::vector<corpus::QAInstance> data;
};

// |V| = 12: two sentences, two-word answer.
Tiny tiny_fixture() {
  Tiny t;
  t.data = corpus::to_instances(corpus::parse_babi_string(
      "1 Mary ran.\n2 John sat.\n3 Mary?\tguest room\t1\n"));
  t.vocab = corpus::build_vocabulary(t.data);
  return t;
}

}  // namespace

TEST_CASE("tiny model gradient check across every parameter group") {
  const auto t = tiny_fixture();
  CHECK(t.vocab.size() == 12);
  const auto x = encode_instance(t.data[0], t.vocab);
  training::TrainingConfig c;
  c.dim = 8;
  c.hidden = 8;

  SUBCASE("strict relative bound at the default configuration") {
    for (bool tied : {false, true}) {
      c.tie_a_b = tied;
      auto params = training::init_parameters(c, t.vocab);
      const auto mc = c.model();
      const auto report = ad::gradient_check(
          [&](Graph& g) { return training::example_loss(g, params, x, mc); }, params.all(), 1e-4, 1e-4);
      CAPTURE(tied);
      CAPTURE(report.max_rel_error);
      CHECK(report.passed);
      CHECK(report.params.size() == params.all().size());
    }
  }

  SUBCASE("multi-hop: relative bound or roundoff-level absolute error") {
    // Entries near 1e-8 sit at the relative-error floor, where the central
    // difference of a loss of order 1 carries ~1e-11 of roundoff.
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      for (bool tied : {false, true}) {
        for (std::size_t hops : {2, 3}) {
          c.seed = seed;
          c.tie_a_b = tied;
          c.hops = hops;
          auto params = training::init_parameters(c, t.vocab);
          const auto mc = c.model();
          const auto report = ad::gradient_check(
              [&](Graph& g) { return training::example_loss(g, params, x, mc); }, params.all(), 1e-4,
              1e-4);
          for (const auto& p : report.params) {
            CAPTURE(seed);
            CAPTURE(tied);
            CAPTURE(hops);
            CAPTURE(p.name);
            CHECK((p.max_rel_error <= 1e-4 || std::abs(p.analytic - p.numeric) <= 1e-10));
          }
        }
      }
    }
  }
}

TEST_CASE("zero parameters give the uniform loss") {
  const auto t = tiny_fixture();
  ModelConfig mc;
  mc.dim = 4;
  mc.hidden = 4;
  auto params = ModelParameters::zeros(t.vocab.size(), mc);
  const auto x = encode_instance(t.data[0], t.vocab);
  Graph g;
  const double loss = training::example_loss(g, params, x, mc).scalar();
  CHECK(loss == doctest::Approx(3.0 * std::log(double(t.vocab.size()))).epsilon(1e-12));
}

TEST_CASE("predict returns attention per hop") {
  const auto t = tiny_fixture();
  training::TrainingConfig c;
  c.dim = 6;
  c.hops = 3;
  auto params = training::init_parameters(c, t.vocab);
  const auto pred = predict(params, encode_instance(t.data[0], t.vocab), c.model());
  REQUIRE(pred.attention.size() == 3);
  for (const auto& p : pred.attention) {
    CHECK(p.size() == 2);
    CHECK(p[0] + p[1] == doctest::Approx(1.0));
  }
  CHECK(pred.words.size() <= c.max_len);
}

TEST_CASE("tied embeddings share one parameter") {
  ModelConfig mc;
  mc.dim = 3;
  mc.hidden = 3;
  mc.tie_a_b = true;
  auto p = ModelParameters::zeros(7, mc);
  CHECK(&p.question_embedding() == &p.a);
  for (auto* q : p.all()) CHECK(q->name != "B");
  mc.tie_a_b = false;
  auto u = ModelParameters::zeros(7, mc);
  CHECK(&u.question_embedding() == &u.b);
}
