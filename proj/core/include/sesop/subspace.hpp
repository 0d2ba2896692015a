#pragma once

#include "sesop/objective.hpp"
#include "sesop/types.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sesop {

/// Where a frame column came from.
enum class Provenance {
  gradient,
  pcd,
  ssf,
  newton,
  orth_weighted_grad,
  orth_total_step,
  tn_direction,
  model_gradient,
  cg_step,
  previous_step,
  previous_gradient,
};

std::string to_string(Provenance p);

/// Last accepted steps and gradients, newest first, each with an optional
/// cached image under the problem operator.
class HistoryBuffer {
public:
  struct Entry {
    Vector vec;
    std::optional<Vector> image;
  };

  explicit HistoryBuffer(Index capacity) : capacity_(capacity < 0 ? 0 : capacity) {}

  void push_step(Vector step, std::optional<Vector> image = std::nullopt);
  void push_gradient(Vector grad, std::optional<Vector> image = std::nullopt);

  const std::deque<Entry>& steps() const { return steps_; }
  const std::deque<Entry>& gradients() const { return gradients_; }
  Index capacity() const { return capacity_; }
  void clear();

private:
  Index capacity_;
  std::deque<Entry> steps_;
  std::deque<Entry> gradients_;
};

struct FrameColumn {
  Vector direction;
  std::optional<Vector> image;
  Provenance tag;
};

/// Orthonormalized spanning set of the affine search subspace x + span(D).
struct SubspaceFrame {
  Vector base;
  Matrix directions;  ///< retained original columns, n x k
  Matrix basis;       ///< orthonormal basis of span(directions), n x k
  Matrix transform;   ///< basis = directions * transform (upper triangular)
  Matrix images;      ///< A * basis when the objective is composite, else empty
  std::vector<Provenance> tags;
  Index dropped = 0;  ///< candidate columns rejected as zero or dependent
  /// Columns whose image was computed as A * basis.col(i) because the
  /// column was nearly dependent on earlier ones.
  Index exact_images = 0;

  Index size() const { return basis.cols(); }
  bool has_images() const { return images.cols() == basis.cols() && images.size() > 0; }
};

/// Schedules checks of a residual that is updated through frame images
/// against A x - b. Cached images feed their rounding back into later
/// steps, so the tracked residual is replaced on a schedule: the interval
/// doubles (up to 32 steps) while checks find it accurate and drops to one
/// step when they do not.
class ResidualCheck {
 public:
  /// Call once per step.
  bool due() { return ++since_ >= interval_; }
  /// Relative difference between the tracked residual and A x - b.
  void checked(double rel_error) {
    since_ = 0;
    if (!(rel_error <= 1e-11)) interval_ = 1;
    else if (rel_error < 1e-13) interval_ = std::min(2 * interval_, 32);
  }

 private:
  int interval_ = 1;
  int since_ = 0;
};

struct FrameOptions {
  Index history_steps = 7;      ///< M, previous steps taken from the history
  Index history_gradients = 0;  ///< previous gradients taken from the history
  double drop_tol = 1e-10;
  /// Reuse images cached on columns / history entries. When false every
  /// retained column is re-multiplied by A.
  bool reuse_images = true;
};

/// Maps a direction to its image A d, counting the matvec.
using ImageMap = std::function<Vector(const Vector&)>;

/// Builds the frame from the current columns followed by up to
/// options.history_steps previous steps (and history_gradients previous
/// gradients). Columns that are zero or whose component orthogonal to the
/// earlier ones is below drop_tol (after normalization) are dropped. When
/// image_map is set, the frame carries A * basis; missing images are
/// computed only for retained columns, and a column that is nearly
/// dependent on the earlier ones costs one product with its basis vector.
///
/// Throws EmptySubspace if nothing survives.
SubspaceFrame build_frame(const Vector& x, std::vector<FrameColumn> current,
                          const HistoryBuffer& history, const FrameOptions& options,
                          const ImageMap& image_map = {});

struct InnerOptions {
  double tol = 1e-10;
  int max_inner = 20;
  double armijo = 1e-4;
};

/// What the caller already knows at the frame base.
struct BasePoint {
  double f = 0.0;  ///< exact objective value
  std::optional<Vector> gradient;
  std::optional<Vector> residual;  ///< A x - b for composite objectives
};

struct SubspaceResult {
  Vector alpha;         ///< coefficients on frame.basis
  Vector coefficients;  ///< coefficients on frame.directions
  Vector x;
  Vector step;          ///< x - base
  double f = 0.0;       ///< exact objective at x
  std::optional<Vector> gradient;  ///< smooth path: gradient at x
  std::optional<Vector> residual;  ///< composite path: A x - b
  std::optional<Vector> step_image;
  int inner_iterations = 0;
  bool converged = false;
  bool fallback = false;
  std::string event;
};

/// Minimizes f over base + span(frame) with damped Newton on the reduced
/// coefficients, starting from alpha = 0.
///
/// Composite objectives with a frame carrying images use them for the
/// smooth term, so the inner loop performs no operator applications; the L1
/// term is smoothed inside the loop and the exact value is enforced to not
/// increase at the end. Smooth objectives use gradient and Hessian-vector
/// products (finite-differenced gradients when no HVP is available). If the
/// reduced Newton iteration fails to make progress, a backtracking line
/// search along the first frame column is used instead.
SubspaceResult subspace_minimize(const Objective& obj, const SubspaceFrame& frame,
                                 const BasePoint& base, const InnerOptions& options,
                                 Counters& counters);

struct LineSearchResult {
  double step = 0.0;
  double f = 0.0;
  int evaluations = 0;
};

/// Armijo backtracking: first t = t0 * rho^j with
/// f(x + t d) <= f_x + c1 t <g_x, d>. Throws Error if d is not a descent
/// direction and LineSearchFailed after 60 reductions.
LineSearchResult line_search_backtracking(const Objective& obj, const Vector& x, const Vector& d,
                                          double f_x, const Vector& g_x, Counters& counters,
                                          double c1 = 1e-4, double rho = 0.5, double t0 = 1.0);

}  // namespace sesop
