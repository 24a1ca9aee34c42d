#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "scatclique/graph.hpp"
#include "scatclique/matrix.hpp"

// Define-by-run reverse-mode differentiation over dense matrices, with
// sparse graph operators as primitives.
namespace scatclique::ad {

class AutodiffError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Tape;

// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  const Matrix& value() const;
  const Matrix& grad() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  bool requires_grad() const;

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  // Accumulates vector-Jacobian products into the inputs' gradients.
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Matrix value, bool requires_grad = false);
  Var constant(Matrix value) { return leaf(std::move(value), false); }

  // Appends a node computed from `inputs`. `backward` may be empty when no
  // input needs a gradient.
  Var record(Matrix value, std::vector<std::size_t> inputs, BackwardFn backward);

  // Reverse sweep from a 1x1 root. Resets all gradients first.
  void backward(Var root);

  const Matrix& value(std::size_t id) const { return nodes_.at(id).value; }
  const Matrix& grad(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }

  // Gradient accumulator of node `id` (allocated on first use).
  Matrix& grad_accumulator(std::size_t id);

  std::size_t size() const { return nodes_.size(); }
  bool backward_done() const { return backward_done_; }

  // Smallest distance of any recorded non-smooth primitive's input from its
  // kink. Finite-difference checks are meaningful when this exceeds the step.
  double kink_margin() const { return kink_margin_; }
  void note_kink_distance(double d) {
    if (d < kink_margin_) kink_margin_ = d;
  }
  // Hash of the piece of every non-smooth primitive (relu signs, min/max
  // argmins). Two evaluations with equal patterns lie on the same smooth piece.
  std::uint64_t activation_pattern() const { return pattern_; }
  void note_pattern(std::uint64_t v) {
    pattern_ ^= v + 0x9e3779b97f4a7c15ULL + (pattern_ << 6) + (pattern_ >> 2);
  }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  bool backward_done_ = false;
  double kink_margin_ = std::numeric_limits<double>::infinity();
  std::uint64_t pattern_ = 0;
};

// Walk: P^t, Wavelet: Psi_k, RenormAdj: A^r.
enum class SparseOpKind { Walk, Wavelet, RenormAdj };

struct SparseOp {
  SparseOpKind kind;
  int power;
};

Matrix apply_sparse_op(const Graph& g, SparseOp op, const Matrix& x);
Matrix apply_sparse_op_transpose(const Graph& g, SparseOp op, const Matrix& x);

inline constexpr double kAttentionLeakySlope = 0.2;

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var a, double s);
Var sum(Var a);
Var matmul(Var a, Var b);

// x (n x in) * w (in x out) + b (1 x out) broadcast over rows.
Var affine(Var x, Var w, Var b);

// The graph must outlive the tape.
Var sparse_op_apply(const Graph& g, SparseOp op, Var x);

Var concat_columns(std::span<const Var> parts);
Var concat_columns(Var a, Var b);
Var column(Var x, std::size_t j);

// alpha (n x 1) scales each row of h (n x c).
Var elementwise_mul(Var alpha, Var h);

Var relu(Var x);
Var leaky_relu(Var x, double slope);

// Per-row softmax of an n x F matrix.
Var softmax_rows(Var scores);

// Scores are n x 1 each; returns one n x 1 weight vector per input, summing to 1 per row.
std::vector<Var> softmax_over_group(std::span<const Var> scores);

// x (n x m) dotted row-wise with a (m x 1).
Var row_dot(Var x, Var a);

// (h - min h) / (max h - min h) on an n x 1 column. Constant input maps to 0.5
// with zero gradient; ties route the subgradient to the lowest index.
Var min_max_normalize(Var h);

// -p^T W p + beta * p^T Wbar p, with Wbar handled through the sparse identity.
Var quad_form_loss(Var p, const Graph& g, double beta);

using RecordedFn = std::function<Var(Tape&, const std::vector<Var>& params)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t coords_checked = 0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  double kink_margin = std::numeric_limits<double>::infinity();
  // Coordinates whose +/- step moved some primitive onto another piece.
  std::size_t coords_skipped = 0;
};

struct GradCheckOptions {
  double step = 1e-5;
  // Error is |a - n| / max(|a|, |n|, abs_floor * s) with s = max(1, |f|,
  // largest analytic partial). Round-off in f, which follows the size of its
  // intermediate terms rather than |f|, then does not count as error on
  // coordinates whose true derivative is zero.
  double abs_floor = 1e-5;
  // 0 checks every coordinate; otherwise a seeded sample per parameter.
  std::size_t coords_per_param = 0;
  unsigned long long seed = 0;
};

// Central differences against the reverse sweep of `f` at `params`.
GradCheckResult grad_check(const RecordedFn& f, const std::vector<Matrix>& params,
                           const GradCheckOptions& options = {});

}  // namespace scatclique::ad
