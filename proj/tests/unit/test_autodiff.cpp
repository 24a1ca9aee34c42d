#include <doctest.h>

#include "dense_reference.hpp"
#include "scatclique/autodiff.hpp"

using namespace scatclique;
namespace ad = scatclique::ad;

namespace {

Matrix col(std::vector<double> v) { return Matrix::column(v); }

// Random graph, random inputs of the given shapes, one scalar readout through
// a fixed random projection so every output entry matters.
Matrix projection(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return testref::random_matrix(r, c, rng);
}

ad::Var weighted_sum(ad::Tape& t, ad::Var x, std::uint64_t seed) {
  Matrix w = projection(x.rows(), x.cols(), seed);
  ad::Var flat_w = t.constant(Matrix(x.rows() * x.cols(), 1, w.data()));
  ad::Var flat_x = t.record(Matrix(x.rows() * x.cols(), 1, x.value().data()), {x.id()},
                            [id = x.id()](ad::Tape& tape, std::size_t self) {
                              Matrix& g = tape.grad_accumulator(id);
                              const Matrix& up = tape.grad_accumulator(self);
                              for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] += up.data()[i];
                            });
  return ad::sum(ad::elementwise_mul(flat_w, flat_x));
}

}  // namespace

TEST_CASE("fan-out accumulates") {
  ad::Tape t;
  ad::Var x = t.leaf(col({1.5}), true);
  ad::Var y = ad::add(x, x);
  t.backward(y);
  CHECK(x.grad()(0, 0) == 2.0);
}

TEST_CASE("constant root gives zero gradients") {
  ad::Tape t;
  ad::Var x = t.leaf(col({1.0, 2.0}), true);
  ad::Var c = t.constant(col({3.0}));
  t.backward(c);
  CHECK(x.grad() == Matrix(2, 1));
}

TEST_CASE("backward preconditions") {
  ad::Tape t;
  ad::Var x = t.leaf(col({1.0, 2.0}), true);
  CHECK_THROWS_AS(x.grad(), ad::AutodiffError);
  CHECK_THROWS_AS(t.backward(x), ad::AutodiffError);
  CHECK_THROWS(ad::add(x, t.constant(col({1.0, 2.0, 3.0}))));
  CHECK_THROWS(ad::matmul(x, x));
}

TEST_CASE("relu dead region passes no gradient") {
  ad::Tape t;
  ad::Var x = t.leaf(col({-3.0, 2.0}), true);
  t.backward(ad::sum(ad::relu(x)));
  CHECK(x.grad()(0, 0) == 0.0);
  CHECK(x.grad()(1, 0) == 1.0);
}

TEST_CASE("quad_form_loss gradient is 2Wp at beta 0") {
  std::mt19937_64 rng(4);
  Graph g = testref::random_graph(7, 0.5, rng);
  ad::Tape t;
  Matrix p = testref::random_matrix(7, 1, rng, 0.0, 1.0);
  ad::Var pv = t.leaf(p, true);
  ad::Var l = ad::quad_form_loss(pv, g, 0.0);
  t.backward(l);
  Matrix wp = matmul(testref::adjacency(g), p);
  for (std::size_t i = 0; i < 7; ++i) CHECK(pv.grad()(i, 0) == doctest::Approx(-2.0 * wp(i, 0)));
  CHECK(l.value()(0, 0) == doctest::Approx(-testref::quad(testref::adjacency(g), p.data())));
}

TEST_CASE("grad_check on x^T x") {
  ad::RecordedFn f = [](ad::Tape&, const std::vector<ad::Var>& ps) {
    return ad::sum(ad::elementwise_mul(ps[0], ps[0]));
  };
  ad::Tape t;
  ad::Var x = t.leaf(col({1.0, 2.0}), true);
  t.backward(f(t, {x}));
  CHECK(x.grad() == col({2.0, 4.0}));
  auto res = ad::grad_check(f, {col({1.0, 2.0})});
  CHECK(res.coords_checked == 2);
  CHECK(res.max_rel_error < 1e-8);
}

TEST_CASE("grad_check excludes coordinates that straddle a relu kink") {
  ad::RecordedFn f = [](ad::Tape&, const std::vector<ad::Var>& ps) { return ad::sum(ad::relu(ps[0])); };
  auto res = ad::grad_check(f, {col({0.0, 1.0, -1.0, 3e-6})});
  CHECK(res.coords_skipped == 2);
  CHECK(res.coords_checked == 2);
  CHECK(res.max_rel_error < 1e-8);
  CHECK(res.kink_margin == 0.0);
}

TEST_CASE("grad_check floor scales with the function value") {
  // d/dy of 1e6*x + 0*y: the numeric derivative in y is pure round-off.
  ad::RecordedFn f = [](ad::Tape& t, const std::vector<ad::Var>& ps) {
    return ad::sum(ad::elementwise_mul(t.constant(col({1e6, 0.0})), ps[0]));
  };
  auto res = ad::grad_check(f, {col({1.2345678, 0.7})});
  CHECK(res.coords_checked == 2);
  CHECK(res.max_rel_error < 1e-4);
}

TEST_CASE("grad_check on quad_form_loss over K3") {
  Graph k3 = testref::complete_graph(3);
  std::mt19937_64 rng(6);
  for (double beta : {0.0, 0.25, 1.0}) {
    ad::RecordedFn f = [&](ad::Tape&, const std::vector<ad::Var>& ps) {
      return ad::quad_form_loss(ps[0], k3, beta);
    };
    CHECK(ad::grad_check(f, {testref::random_matrix(3, 1, rng, 0.0, 1.0)}).max_rel_error < 1e-6);
  }
}

TEST_CASE("min_max_normalize: values, degenerate input, gradient") {
  ad::Tape t;
  ad::Var h = t.leaf(col({2.0, -1.0, 5.0, 0.5}), true);
  ad::Var p = ad::min_max_normalize(h);
  CHECK(p.value()(1, 0) == 0.0);
  CHECK(p.value()(2, 0) == 1.0);
  CHECK(p.value()(0, 0) == doctest::Approx(0.5));

  ad::Tape t2;
  ad::Var c = t2.leaf(col({3.0, 3.0, 3.0}), true);
  ad::Var pc = ad::min_max_normalize(c);
  CHECK(pc.value() == col({0.5, 0.5, 0.5}));
  t2.backward(ad::sum(pc));
  CHECK(c.grad() == Matrix(3, 1));

  ad::RecordedFn f = [](ad::Tape& tape, const std::vector<ad::Var>& ps) {
    return weighted_sum(tape, ad::min_max_normalize(ps[0]), 3);
  };
  auto res = ad::grad_check(f, {col({0.3, -1.2, 2.0, 0.9, 1.4})});
  CHECK(res.max_rel_error < 1e-5);
}

TEST_CASE("min_max_normalize ties route to the lowest index") {
  ad::Tape t;
  ad::Var h = t.leaf(col({1.0, 4.0, 1.0, 4.0}), true);
  ad::Var p = ad::min_max_normalize(h);
  t.backward(ad::sum(p));
  // Every entry carries 1/range; the extremum terms land on indices 0 and 1
  // only, so the tied copies at 2 and 3 keep the plain 1/range.
  const Matrix& g = h.grad();
  CHECK(g(0, 0) == doctest::Approx(-1.0 / 3.0));
  CHECK(g(1, 0) == doctest::Approx(-1.0 / 3.0));
  CHECK(g(2, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(g(3, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("softmax_over_group sums to one") {
  ad::Tape t;
  std::mt19937_64 rng(2);
  std::vector<ad::Var> scores;
  for (int f = 0; f < 4; ++f) scores.push_back(t.leaf(testref::random_matrix(6, 1, rng, -4, 4), true));
  auto w = ad::softmax_over_group(scores);
  for (std::size_t i = 0; i < 6; ++i) {
    double s = 0.0;
    for (const auto& v : w) s += v.value()(i, 0);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  auto single = ad::softmax_over_group(std::span<const ad::Var>(scores.data(), 1));
  CHECK(single[0].value() == Matrix(6, 1, 1.0));
}

TEST_CASE("every primitive passes finite differences") {
  std::mt19937_64 rng(31);
  Graph g = testref::random_graph(6, 0.5, rng);
  auto mk = [&](std::size_t r, std::size_t c) { return testref::random_matrix(r, c, rng); };

  struct Case {
    const char* name;
    ad::RecordedFn f;
    std::vector<Matrix> params;
  };
  std::vector<Case> cases;
  cases.push_back({"affine", [](ad::Tape& t, const std::vector<ad::Var>& p) {
                     return weighted_sum(t, ad::affine(p[0], p[1], p[2]), 1);
                   }, {mk(6, 3), mk(3, 2), mk(1, 2)}});
  cases.push_back({"matmul", [](ad::Tape& t, const std::vector<ad::Var>& p) {
                     return weighted_sum(t, ad::matmul(p[0], p[1]), 2);
                   }, {mk(4, 3), mk(3, 5)}});
  for (auto kind : {ad::SparseOpKind::Walk, ad::SparseOpKind::Wavelet, ad::SparseOpKind::RenormAdj}) {
    for (int power : {1, 2, 3}) {
      cases.push_back({"sparse", [&g, kind, power](ad::Tape& t, const std::vector<ad::Var>& p) {
                         return weighted_sum(t, ad::sparse_op_apply(g, {kind, power}, p[0]), 3);
                       }, {mk(6, 2)}});
    }
  }
  cases.push_back({"concat", [](ad::Tape& t, const std::vector<ad::Var>& p) {
                     return weighted_sum(t, ad::concat_columns(p[0], p[1]), 4);
                   }, {mk(5, 2), mk(5, 3)}});
  cases.push_back({"column", [](ad::Tape& t, const std::vector<ad::Var>& p) {
                     return weighted_sum(t, ad::column(p[0], 1), 5);
                   }, {mk(5, 3)}});
  cases.push_back({"elementwise_mul", [](ad::Tape& t, const std::vector<ad::Var>& p) {
                     return weighted_sum(t, ad::elementwise_mul(p[0], p[1]), 6);
                   }, {mk(5, 1), mk(5, 3)}});
  cases.push_back({"relu", [](ad::Tape& t, const std::vector<ad::Var>& p) {
                     return weighted_sum(t, ad::relu(p[0]), 7);
                   }, {mk(5, 3)}});
  cases.push_back({"leaky_relu", [](ad::Tape& t, const std::vector<ad::Var>& p) {
                     return weighted_sum(t, ad::leaky_relu(p[0], 0.2), 8);
                   }, {mk(5, 3)}});
  cases.push_back({"softmax_rows", [](ad::Tape& t, const std::vector<ad::Var>& p) {
                     return weighted_sum(t, ad::softmax_rows(p[0]), 9);
                   }, {mk(5, 4)}});
  cases.push_back({"softmax_over_group", [](ad::Tape& t, const std::vector<ad::Var>& p) {
                     auto w = ad::softmax_over_group(p);
                     return weighted_sum(t, ad::concat_columns(w), 10);
                   }, {mk(5, 1), mk(5, 1), mk(5, 1)}});
  cases.push_back({"row_dot", [](ad::Tape& t, const std::vector<ad::Var>& p) {
                     return weighted_sum(t, ad::row_dot(p[0], p[1]), 11);
                   }, {mk(5, 4), mk(4, 1)}});
  cases.push_back({"scale_sub", [](ad::Tape& t, const std::vector<ad::Var>& p) {
                     return weighted_sum(t, ad::sub(ad::scale(p[0], -1.5), p[1]), 12);
                   }, {mk(3, 3), mk(3, 3)}});
  cases.push_back({"quad_form_loss", [&g](ad::Tape&, const std::vector<ad::Var>& p) {
                     return ad::quad_form_loss(p[0], g, 0.7);
                   }, {mk(6, 1)}});

  for (const auto& c : cases) {
    INFO(c.name);
    auto res = ad::grad_check(c.f, c.params);
    CHECK(res.kink_margin > 1e-4);
    CHECK(res.max_rel_error < 1e-6);
  }
}

TEST_CASE("gradient linearity") {
  std::mt19937_64 rng(12);
  Graph g = testref::random_graph(8, 0.4, rng);
  Matrix p = testref::random_matrix(8, 1, rng, 0.0, 1.0);
  auto grad_of = [&](double a, double b) {
    ad::Tape t;
    ad::Var pv = t.leaf(p, true);
    ad::Var l = ad::add(ad::scale(ad::quad_form_loss(pv, g, 0.0), a),
                        ad::scale(ad::sum(ad::relu(ad::sparse_op_apply(g, {ad::SparseOpKind::Wavelet, 1}, pv))), b));
    t.backward(l);
    return pv.grad();
  };
  Matrix combo = grad_of(2.0, -3.0);
  Matrix parts = grad_of(1.0, 0.0) * 2.0 + grad_of(0.0, 1.0) * -3.0;
  CHECK(testref::max_abs_diff(combo, parts) < 1e-10);
}

TEST_CASE("forward values match plain computation and are deterministic") {
  std::mt19937_64 rng(14);
  Graph g = testref::random_graph(9, 0.3, rng);
  Matrix x = testref::random_matrix(9, 2, rng);
  ad::Tape t;
  ad::Var xv = t.constant(x);
  CHECK(ad::sparse_op_apply(g, {ad::SparseOpKind::Wavelet, 2}, xv).value() == apply_wavelet(g, x, 2));
  CHECK(ad::sparse_op_apply(g, {ad::SparseOpKind::Walk, 3}, xv).value() == apply_walk(g, x, 3));
  CHECK(ad::sparse_op_apply(g, {ad::SparseOpKind::RenormAdj, 2}, xv).value() == apply_renorm_adj(g, x, 2));
  ad::Tape t2;
  CHECK(ad::softmax_rows(t.constant(x)).value() == ad::softmax_rows(t2.constant(x)).value());
}
