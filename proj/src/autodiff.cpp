#include "scatclique/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace scatclique::ad {

const Matrix& Var::value() const {
  if (!tape_) throw AutodiffError("value() on an empty Var");
  return tape_->value(id_);
}

const Matrix& Var::grad() const {
  if (!tape_) throw AutodiffError("grad() on an empty Var");
  return tape_->grad(id_);
}

bool Var::requires_grad() const { return tape_ && tape_->requires_grad(id_); }

Var Tape::leaf(Matrix value, bool requires_grad) {
  nodes_.push_back(Node{std::move(value), {}, requires_grad, {}, {}});
  backward_done_ = false;
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, std::vector<std::size_t> inputs, BackwardFn backward) {
  bool needs = false;
  for (std::size_t in : inputs) {
    if (in >= nodes_.size()) throw AutodiffError("record: input refers to a later node");
    needs = needs || nodes_[in].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), {}, needs, std::move(inputs),
                        needs ? std::move(backward) : BackwardFn{}});
  backward_done_ = false;
  return Var(this, nodes_.size() - 1);
}

const Matrix& Tape::grad(std::size_t id) const {
  if (!backward_done_) throw AutodiffError("grad requested before backward()");
  return nodes_.at(id).grad;
}

Matrix& Tape::grad_accumulator(std::size_t id) {
  Node& node = nodes_.at(id);
  if (node.grad.size() != node.value.size() || !node.grad.same_shape(node.value)) {
    node.grad = Matrix(node.value.rows(), node.value.cols());
  }
  return node.grad;
}

void Tape::backward(Var root) {
  if (root.tape() != this) throw AutodiffError("backward: root belongs to a different tape");
  const Matrix& rv = nodes_.at(root.id()).value;
  if (rv.rows() != 1 || rv.cols() != 1) {
    throw AutodiffError("backward: root must be scalar, got " + rv.shape_str());
  }
  for (Node& node : nodes_) node.grad = Matrix();
  grad_accumulator(root.id())(0, 0) = 1.0;
  for (std::size_t i = root.id() + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.requires_grad || !node.backward || node.grad.size() == 0) continue;
    node.backward(*this, i);
  }
  // Nodes the sweep never reached get an explicit zero gradient.
  for (std::size_t i = 0; i < nodes_.size(); ++i) grad_accumulator(i);
  backward_done_ = true;
}

namespace {

Tape& same_tape(Var a, Var b, const char* op) {
  if (!a.valid() || !b.valid() || a.tape() != b.tape()) {
    throw AutodiffError(std::string(op) + ": operands must live on the same tape");
  }
  return *a.tape();
}

Tape& tape_of(Var a, const char* op) {
  if (!a.valid()) throw AutodiffError(std::string(op) + ": empty Var");
  return *a.tape();
}

void accumulate(Tape& t, std::size_t id, const Matrix& g) {
  if (!t.requires_grad(id)) return;
  t.grad_accumulator(id) += g;
}

}  // namespace

Var add(Var a, Var b) {
  Tape& t = same_tape(a, b, "add");
  a.value().require_same_shape(b.value(), "add");
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(a.value() + b.value(), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Matrix g = tp.grad_accumulator(self);
    accumulate(tp, ia, g);
    accumulate(tp, ib, g);
  });
}

Var sub(Var a, Var b) {
  Tape& t = same_tape(a, b, "sub");
  a.value().require_same_shape(b.value(), "sub");
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(a.value() - b.value(), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Matrix g = tp.grad_accumulator(self);
    accumulate(tp, ia, g);
    accumulate(tp, ib, g * -1.0);
  });
}

Var scale(Var a, double s) {
  Tape& t = tape_of(a, "scale");
  const std::size_t ia = a.id();
  return t.record(a.value() * s, {ia}, [ia, s](Tape& tp, std::size_t self) {
    accumulate(tp, ia, tp.grad_accumulator(self) * s);
  });
}

Var sum(Var a) {
  Tape& t = tape_of(a, "sum");
  const std::size_t ia = a.id();
  double total = 0.0;
  for (double v : a.value().data()) total += v;
  return t.record(Matrix(1, 1, total), {ia}, [ia](Tape& tp, std::size_t self) {
    const double g = tp.grad_accumulator(self)(0, 0);
    const Matrix& x = tp.value(ia);
    accumulate(tp, ia, Matrix(x.rows(), x.cols(), g));
  });
}

Var matmul(Var a, Var b) {
  Tape& t = same_tape(a, b, "matmul");
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(scatclique::matmul(a.value(), b.value()), {ia, ib},
                  [ia, ib](Tape& tp, std::size_t self) {
                    const Matrix& g = tp.grad_accumulator(self);
                    if (tp.requires_grad(ia)) accumulate(tp, ia, matmul_nt(g, tp.value(ib)));
                    if (tp.requires_grad(ib)) accumulate(tp, ib, matmul_tn(tp.value(ia), g));
                  });
}

Var affine(Var x, Var w, Var b) {
  Tape& t = same_tape(x, w, "affine");
  same_tape(x, b, "affine");
  const Matrix& bv = b.value();
  if (bv.rows() != 1 || bv.cols() != w.value().cols()) {
    throw std::invalid_argument("affine: bias " + bv.shape_str() + " does not match weights " +
                                w.value().shape_str());
  }
  Matrix out = scatclique::matmul(x.value(), w.value());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += bv(0, c);
  }
  const std::size_t ix = x.id(), iw = w.id(), ib = b.id();
  return t.record(std::move(out), {ix, iw, ib}, [ix, iw, ib](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_accumulator(self);
    if (tp.requires_grad(ix)) accumulate(tp, ix, matmul_nt(g, tp.value(iw)));
    if (tp.requires_grad(iw)) accumulate(tp, iw, matmul_tn(tp.value(ix), g));
    if (tp.requires_grad(ib)) {
      Matrix gb(1, g.cols());
      for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < g.cols(); ++c) gb(0, c) += g(r, c);
      }
      accumulate(tp, ib, gb);
    }
  });
}

Matrix apply_sparse_op(const Graph& g, SparseOp op, const Matrix& x) {
  switch (op.kind) {
    case SparseOpKind::Walk: return apply_walk(g, x, op.power);
    case SparseOpKind::Wavelet: return apply_wavelet(g, x, op.power);
    case SparseOpKind::RenormAdj: return apply_renorm_adj(g, x, op.power);
  }
  throw std::invalid_argument("unknown sparse operator");
}

Matrix apply_sparse_op_transpose(const Graph& g, SparseOp op, const Matrix& x) {
  switch (op.kind) {
    case SparseOpKind::Walk: return apply_walk_transpose(g, x, op.power);
    case SparseOpKind::Wavelet: return apply_wavelet_transpose(g, x, op.power);
    case SparseOpKind::RenormAdj: return apply_renorm_adj(g, x, op.power);
  }
  throw std::invalid_argument("unknown sparse operator");
}

Var sparse_op_apply(const Graph& g, SparseOp op, Var x) {
  Tape& t = tape_of(x, "sparse_op_apply");
  const std::size_t ix = x.id();
  const Graph* gp = &g;
  return t.record(apply_sparse_op(g, op, x.value()), {ix}, [ix, gp, op](Tape& tp, std::size_t self) {
    accumulate(tp, ix, apply_sparse_op_transpose(*gp, op, tp.grad_accumulator(self)));
  });
}

Var concat_columns(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_columns: no inputs");
  Tape& t = tape_of(parts[0], "concat_columns");
  const std::size_t rows = parts[0].rows();
  std::vector<std::size_t> ids;
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Var& p : parts) {
    same_tape(parts[0], p, "concat_columns");
    if (p.rows() != rows) {
      throw std::invalid_argument("concat_columns: row mismatch " + p.value().shape_str());
    }
    ids.push_back(p.id());
    widths.push_back(p.cols());
    total += p.cols();
  }
  Matrix out(rows, total);
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Matrix& v = p.value();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < v.cols(); ++c) out(r, offset + c) = v(r, c);
    }
    offset += v.cols();
  }
  return t.record(std::move(out), ids, [ids, widths](Tape& tp, std::size_t self) {
    const Matrix g = tp.grad_accumulator(self);
    std::size_t off = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (tp.requires_grad(ids[k])) {
        Matrix part(g.rows(), widths[k]);
        for (std::size_t r = 0; r < g.rows(); ++r) {
          for (std::size_t c = 0; c < widths[k]; ++c) part(r, c) = g(r, off + c);
        }
        accumulate(tp, ids[k], part);
      }
      off += widths[k];
    }
  });
}

Var concat_columns(Var a, Var b) {
  const Var parts[] = {a, b};
  return concat_columns(std::span<const Var>(parts));
}

Var column(Var x, std::size_t j) {
  Tape& t = tape_of(x, "column");
  if (j >= x.cols()) throw std::invalid_argument("column: index out of range");
  const std::size_t ix = x.id();
  return t.record(Matrix::column(x.value().col(j)), {ix}, [ix, j](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_accumulator(self);
    Matrix& dst = tp.grad_accumulator(ix);
    for (std::size_t r = 0; r < g.rows(); ++r) dst(r, j) += g(r, 0);
  });
}

Var elementwise_mul(Var alpha, Var h) {
  Tape& t = same_tape(alpha, h, "elementwise_mul");
  const Matrix& a = alpha.value();
  const Matrix& hv = h.value();
  if (a.cols() != 1 || a.rows() != hv.rows()) {
    throw std::invalid_argument("elementwise_mul: weights " + a.shape_str() +
                                " cannot broadcast over " + hv.shape_str());
  }
  Matrix out = hv;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (double& v : out.row(r)) v *= a(r, 0);
  }
  const std::size_t ia = alpha.id(), ih = h.id();
  return t.record(std::move(out), {ia, ih}, [ia, ih](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_accumulator(self);
    const Matrix& av = tp.value(ia);
    const Matrix& hval = tp.value(ih);
    if (tp.requires_grad(ia)) {
      Matrix ga(av.rows(), 1);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < g.cols(); ++c) acc += g(r, c) * hval(r, c);
        ga(r, 0) = acc;
      }
      accumulate(tp, ia, ga);
    }
    if (tp.requires_grad(ih)) {
      Matrix gh = g;
      for (std::size_t r = 0; r < gh.rows(); ++r) {
        for (double& v : gh.row(r)) v *= av(r, 0);
      }
      accumulate(tp, ih, gh);
    }
  });
}

constexpr double kPatternBand = 1e-12;

Var leaky_relu(Var x, double slope) {
  Tape& t = tape_of(x, "leaky_relu");
  Matrix out = x.value();
  double margin = std::numeric_limits<double>::infinity();
  std::uint64_t bits = 0;
  std::size_t count = 0;
  for (double& v : out.data()) {
    margin = std::min(margin, std::abs(v));
    // Values within round-off of the kink get their own state, so that a
    // structural zero jittering in the last bits is not a piece change.
    const std::uint64_t state = v > kPatternBand ? 1u : (v < -kPatternBand ? 0u : 2u);
    bits = (bits << 2) | state;
    if (v <= 0.0) v *= slope;
    if (++count % 32 == 0) {
      t.note_pattern(bits);
      bits = 0;
    }
  }
  t.note_pattern(bits);
  t.note_kink_distance(margin);
  const std::size_t ix = x.id();
  return t.record(std::move(out), {ix}, [ix, slope](Tape& tp, std::size_t self) {
    Matrix g = tp.grad_accumulator(self);
    const Matrix& xv = tp.value(ix);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (xv.data()[i] <= 0.0) g.data()[i] *= slope;
    }
    accumulate(tp, ix, g);
  });
}

Var relu(Var x) { return leaky_relu(x, 0.0); }

Var softmax_rows(Var scores) {
  Tape& t = tape_of(scores, "softmax_rows");
  Matrix out = scores.value();
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const double peak = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (double& v : row) {
      v = std::exp(v - peak);
      total += v;
    }
    for (double& v : row) v /= total;
  }
  const std::size_t is = scores.id();
  return t.record(std::move(out), {is}, [is](Tape& tp, std::size_t self) {
    const Matrix& y = tp.value(self);
    Matrix g = tp.grad_accumulator(self);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      auto gr = g.row(r);
      auto yr = y.row(r);
      double dot = 0.0;
      for (std::size_t c = 0; c < gr.size(); ++c) dot += gr[c] * yr[c];
      for (std::size_t c = 0; c < gr.size(); ++c) gr[c] = yr[c] * (gr[c] - dot);
    }
    accumulate(tp, is, g);
  });
}

std::vector<Var> softmax_over_group(std::span<const Var> scores) {
  for (const Var& s : scores) {
    if (s.cols() != 1) throw std::invalid_argument("softmax_over_group: scores must be n x 1");
  }
  Var weights = softmax_rows(concat_columns(scores));
  std::vector<Var> out;
  out.reserve(scores.size());
  for (std::size_t f = 0; f < scores.size(); ++f) out.push_back(column(weights, f));
  return out;
}

Var row_dot(Var x, Var a) {
  if (a.cols() != 1 || a.rows() != x.cols()) {
    throw std::invalid_argument("row_dot: vector " + a.value().shape_str() + " vs rows of " +
                                x.value().shape_str());
  }
  return matmul(x, a);
}

Var min_max_normalize(Var h) {
  Tape& t = tape_of(h, "min_max_normalize");
  const Matrix& hv = h.value();
  if (hv.cols() != 1 || hv.rows() == 0) {
    throw std::invalid_argument("min_max_normalize: expected a non-empty column, got " +
                                hv.shape_str());
  }
  const auto& d = hv.data();
  const std::size_t lo = static_cast<std::size_t>(std::min_element(d.begin(), d.end()) - d.begin());
  const std::size_t hi = static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
  const double range = d[hi] - d[lo];
  const std::size_t ih = h.id();
  if (!(range > 0.0)) {
    return t.record(Matrix(hv.rows(), 1, 0.5), {ih}, [](Tape&, std::size_t) {});
  }
  if (d.size() >= 2) {
    double second_hi = -std::numeric_limits<double>::infinity();
    double second_lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (i != hi) second_hi = std::max(second_hi, d[i]);
      if (i != lo) second_lo = std::min(second_lo, d[i]);
    }
    t.note_kink_distance(std::min(d[hi] - second_hi, second_lo - d[lo]));
  }
  // First index within round-off of the extreme, so symmetric ties that
  // differ in the last bits hash the same.
  const double band = 1e-12 * range;
  std::size_t lo_c = lo;
  std::size_t hi_c = hi;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] - d[lo] <= band) { lo_c = i; break; }
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[hi] - d[i] <= band) { hi_c = i; break; }
  }
  t.note_pattern(lo_c * 0x100000001b3ULL + hi_c);
  Matrix out(hv.rows(), 1);
  for (std::size_t i = 0; i < d.size(); ++i) out(i, 0) = (d[i] - d[lo]) / range;
  return t.record(std::move(out), {ih}, [ih, lo, hi, range](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_accumulator(self);
    const Matrix& p = tp.value(self);
    double g_sum = 0.0;
    double gp_sum = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i) {
      g_sum += g(i, 0);
      gp_sum += g(i, 0) * p(i, 0);
    }
    Matrix gh = g * (1.0 / range);
    gh(lo, 0) += (gp_sum - g_sum) / range;
    gh(hi, 0) -= gp_sum / range;
    accumulate(tp, ih, gh);
  });
}

Var quad_form_loss(Var p, const Graph& g, double beta) {
  Tape& t = tape_of(p, "quad_form_loss");
  const Matrix& pv = p.value();
  if (pv.cols() != 1 || pv.rows() != g.node_count()) {
    throw std::invalid_argument("quad_form_loss: p is " + pv.shape_str() + " for " +
                                std::to_string(g.node_count()) + " nodes");
  }
  const double within = quad_form(g, pv.data());
  const double across = complement_quad_form(g, pv.data());
  const std::size_t ip = p.id();
  const Graph* gp = &g;
  return t.record(Matrix(1, 1, -within + beta * across), {ip},
                  [ip, gp, beta](Tape& tp, std::size_t self) {
                    const double up = tp.grad_accumulator(self)(0, 0);
                    const Matrix& pval = tp.value(ip);
                    const auto wp = adjacency_times(*gp, pval.data());
                    double total = 0.0;
                    for (double v : pval.data()) total += v;
                    Matrix gpv(pval.rows(), 1);
                    for (std::size_t i = 0; i < pval.rows(); ++i) {
                      gpv(i, 0) = up * (-2.0 * (1.0 + beta) * wp[i] + 2.0 * beta * total -
                                        2.0 * beta * pval(i, 0));
                    }
                    accumulate(tp, ip, gpv);
                  });
}

GradCheckResult grad_check(const RecordedFn& f, const std::vector<Matrix>& params,
                           const GradCheckOptions& options) {
  if (!(options.step > 0.0)) throw std::invalid_argument("grad_check: step must be positive");
  GradCheckResult result;

  std::vector<Matrix> analytic;
  double f0 = 0.0;
  std::uint64_t pattern0 = 0;
  {
    Tape tape;
    std::vector<Var> leaves;
    for (const Matrix& m : params) leaves.push_back(tape.leaf(m, true));
    Var root = f(tape, leaves);
    f0 = root.value()(0, 0);
    pattern0 = tape.activation_pattern();
    tape.backward(root);
    for (const Var& v : leaves) analytic.push_back(v.grad());
    result.kink_margin = tape.kink_margin();
  }
  double scale = std::max(1.0, std::abs(f0));
  for (const Matrix& g : analytic) {
    for (double v : g.data()) scale = std::max(scale, std::abs(v));
  }
  const double floor = options.abs_floor * scale;

  auto evaluate = [&](const std::vector<Matrix>& at, std::uint64_t& pattern) {
    Tape tape;
    std::vector<Var> leaves;
    for (const Matrix& m : at) leaves.push_back(tape.leaf(m, false));
    const double v = f(tape, leaves).value()(0, 0);
    pattern = tape.activation_pattern();
    return v;
  };

  std::mt19937_64 rng(options.seed);
  std::vector<Matrix> probe = params;
  for (std::size_t k = 0; k < params.size(); ++k) {
    std::vector<std::size_t> coords(params[k].size());
    std::iota(coords.begin(), coords.end(), 0);
    if (options.coords_per_param > 0 && coords.size() > options.coords_per_param) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.coords_per_param);
    }
    for (std::size_t idx : coords) {
      const double orig = params[k].data()[idx];
      std::uint64_t pu = 0;
      std::uint64_t pd = 0;
      probe[k].data()[idx] = orig + options.step;
      const double up = evaluate(probe, pu);
      probe[k].data()[idx] = orig - options.step;
      const double down = evaluate(probe, pd);
      probe[k].data()[idx] = orig;
      if (pu != pattern0 || pd != pattern0) {
        ++result.coords_skipped;
        continue;
      }
      const double numeric = (up - down) / (2.0 * options.step);
      const double a = analytic[k].data()[idx];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      const double err = std::abs(a - numeric) / denom;
      ++result.coords_checked;
      if (err > result.max_rel_error || result.coords_checked == 1) {
        result.max_rel_error = err;
        result.worst_param = k;
        result.worst_index = idx;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace scatclique::ad
