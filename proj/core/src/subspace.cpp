#include "sesop/subspace.hpp"

#include <cmath>
#include <limits>

namespace sesop {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::gradient: return "gradient";
    case Provenance::pcd: return "pcd";
    case Provenance::ssf: return "ssf";
    case Provenance::newton: return "newton";
    case Provenance::orth_weighted_grad: return "orth_weighted_grad";
    case Provenance::orth_total_step: return "orth_total_step";
    case Provenance::tn_direction: return "tn_direction";
    case Provenance::model_gradient: return "model_gradient";
    case Provenance::cg_step: return "cg_step";
    case Provenance::previous_step: return "previous_step";
    case Provenance::previous_gradient: return "previous_gradient";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// History

void HistoryBuffer::push_step(Vector step, std::optional<Vector> image) {
  if (capacity_ == 0) return;
  steps_.push_front(Entry{std::move(step), std::move(image)});
  while (static_cast<Index>(steps_.size()) > capacity_) steps_.pop_back();
}

void HistoryBuffer::push_gradient(Vector grad, std::optional<Vector> image) {
  if (capacity_ == 0) return;
  gradients_.push_front(Entry{std::move(grad), std::move(image)});
  while (static_cast<Index>(gradients_.size()) > capacity_) gradients_.pop_back();
}

void HistoryBuffer::clear() {
  steps_.clear();
  gradients_.clear();
}

// ---------------------------------------------------------------------------
// Frame construction

SubspaceFrame build_frame(const Vector& x, std::vector<FrameColumn> current,
                          const HistoryBuffer& history, const FrameOptions& options,
                          const ImageMap& image_map) {
  const Index steps = std::min<Index>(options.history_steps,
                                      static_cast<Index>(history.steps().size()));
  for (Index i = 0; i < steps; ++i) {
    const auto& e = history.steps()[static_cast<std::size_t>(i)];
    current.push_back(FrameColumn{e.vec, e.image, Provenance::previous_step});
  }
  const Index grads = std::min<Index>(options.history_gradients,
                                      static_cast<Index>(history.gradients().size()));
  for (Index i = 0; i < grads; ++i) {
    const auto& e = history.gradients()[static_cast<std::size_t>(i)];
    current.push_back(FrameColumn{e.vec, e.image, Provenance::previous_gradient});
  }

  const Index n = x.size();
  const auto cap = static_cast<Index>(current.size());
  Matrix q(n, cap);
  Matrix t = Matrix::Zero(cap, cap);
  // basis.col(j) = (d_j / norms[j] - q * proj.col(j)) / rems[j]
  Matrix proj = Matrix::Zero(cap, cap);
  std::vector<double> norms, rems;
  std::vector<std::size_t> kept;
  Index k = 0;
  Index dropped = 0;

  for (std::size_t c = 0; c < current.size(); ++c) {
    const Vector& d = current[c].direction;
    if (d.size() != n) throw Error("build_frame: direction has wrong length");
    const double norm = d.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      ++dropped;
      continue;
    }
    Vector v = d / norm;
    Vector coef = Vector::Zero(cap);
    coef[k] = 1.0 / norm;
    // Modified Gram-Schmidt, two passes.
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < k; ++i) {
        const double h = q.col(i).dot(v);
        v -= h * q.col(i);
        coef.head(k) -= h * t.col(i).head(k);
        proj(i, k) += h;
      }
    }
    const double rem = v.norm();
    if (rem < options.drop_tol) {
      ++dropped;
      proj.col(k).setZero();
      continue;
    }
    q.col(k) = v / rem;
    t.col(k) = coef / rem;
    norms.push_back(norm);
    rems.push_back(rem);
    kept.push_back(c);
    ++k;
  }
  if (k == 0) throw EmptySubspace();

  SubspaceFrame frame;
  frame.base = x;
  frame.basis = q.leftCols(k);
  frame.transform = t.topLeftCorner(k, k);
  frame.directions.resize(n, k);
  frame.dropped = dropped;
  for (Index i = 0; i < k; ++i) {
    frame.directions.col(i) = current[kept[static_cast<std::size_t>(i)]].direction;
    frame.tags.push_back(current[kept[static_cast<std::size_t>(i)]].tag);
  }

  if (image_map) {
    // Images follow the same Gram-Schmidt recurrence as the basis. A nearly
    // dependent column would divide the rounding of the earlier images by
    // its small remainder, so its image is taken directly as A * basis.col.
    constexpr double kExactBelow = 1e-4;
    Matrix& img = frame.images;
    for (Index i = 0; i < k; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      Vector col_img;
      if (rems[ui] < kExactBelow) {
        col_img = image_map(frame.basis.col(i));
        ++frame.exact_images;
      } else {
        const FrameColumn& col = current[kept[ui]];
        const Vector raw = (options.reuse_images && col.image) ? *col.image : image_map(col.direction);
        col_img = raw / norms[ui];
        if (i > 0) col_img -= img.leftCols(i) * proj.col(i).head(i);
        col_img /= rems[ui];
      }
      if (img.size() == 0) img.resize(col_img.size(), k);
      img.col(i) = col_img;
    }
  }
  return frame;
}

// ---------------------------------------------------------------------------
// Reduced Newton

namespace {

struct ReducedOutcome {
  Vector alpha;
  double phi = 0.0;
  int iterations = 0;
  bool converged = false;
  bool progressed = false;
};

template <class ValueFn, class DerivFn>
ReducedOutcome reduced_newton(Index k, double phi0, const InnerOptions& options, ValueFn&& value,
                              DerivFn&& derivatives) {
  ReducedOutcome out;
  out.alpha = Vector::Zero(k);
  out.phi = phi0;
  Vector g(k);
  Matrix h(k, k);
  double g0 = -1.0;
  for (int it = 0; it < options.max_inner; ++it) {
    derivatives(out.alpha, g, h);
    const double gnorm = g.norm();
    if (!std::isfinite(gnorm)) break;
    if (g0 < 0.0) g0 = gnorm;
    if (gnorm <= options.tol * (1.0 + g0)) {
      out.converged = true;
      break;
    }
    h = 0.5 * (h + h.transpose()).eval();
    Vector delta;
    Eigen::LLT<Matrix> llt(h);
    if (llt.info() == Eigen::Success && h.allFinite()) {
      delta = -llt.solve(g);
    }
    if (delta.size() == 0 || !delta.allFinite()) {
      // Levenberg shift until positive definite.
      const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
      for (double lambda = 1e-10 * scale; lambda < 1e20 * scale; lambda *= 10.0) {
        Eigen::LLT<Matrix> shifted(h + lambda * Matrix::Identity(k, k));
        if (shifted.info() == Eigen::Success) {
          delta = -shifted.solve(g);
          break;
        }
      }
    }
    double slope = delta.size() ? g.dot(delta) : 0.0;
    if (!(slope < 0.0) || !std::isfinite(slope)) {
      delta = -g;
      slope = -gnorm * gnorm;
    }
    double step = 1.0;
    bool accepted = false;
    double phi_new = 0.0;
    for (int j = 0; j < 50; ++j) {
      phi_new = value(Vector(out.alpha + step * delta));
      if (std::isfinite(phi_new) && phi_new <= out.phi + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    out.alpha += step * delta;
    out.phi = phi_new;
    out.progressed = true;
    ++out.iterations;
  }
  return out;
}

SubspaceResult minimize_composite(const CompositeObjective& obj, const SubspaceFrame& frame,
                                  const BasePoint& base, const InnerOptions& options) {
  const Vector& x = frame.base;
  const Vector& r = *base.residual;
  const Matrix& q = frame.basis;
  const Matrix& b = frame.images;
  const double mu = obj.mu();
  const double eps = obj.smoothing_eps();
  const Index k = frame.size();

  auto smoothed = [&](const Vector& alpha) {
    const Vector z = x + q * alpha;
    const Vector rho = r + b * alpha;
    return obj.smoothed_value_from_residual(rho, z);
  };
  const Matrix btb = b.transpose() * b;
  auto derivatives = [&](const Vector& alpha, Vector& g, Matrix& h) {
    const Vector rho = r + b * alpha;
    g = 2.0 * (b.transpose() * rho);
    h = 2.0 * btb;
    if (mu != 0.0) {
      const Vector z = x + q * alpha;
      Vector d1(z.size()), d2(z.size());
      for (Index j = 0; j < z.size(); ++j) {
        d1[j] = smooth_abs_d1(z[j], eps);
        d2[j] = smooth_abs_d2(z[j], eps);
      }
      g += mu * (q.transpose() * d1);
      h += mu * (q.transpose() * d2.asDiagonal() * q);
    }
  };

  ReducedOutcome red = reduced_newton(k, smoothed(Vector::Zero(k)), options, smoothed, derivatives);

  SubspaceResult res;
  res.inner_iterations = red.iterations;
  res.converged = red.converged;
  Vector alpha = red.alpha;

  auto exact_at = [&](const Vector& a, Vector& rho, Vector& z) {
    rho = r + b * a;
    z = x + q * a;
    return obj.value_from_residual(rho, z);
  };

  if (!red.progressed && !red.converged) {
    // Reduced Newton made no progress: 1-D search along the first column.
    res.fallback = true;
    res.event = "inner newton failed; backtracking along first frame column";
    const Vector q0 = q.col(0);
    const Vector b0 = b.col(0);
    double slope = 2.0 * b0.dot(r);
    for (Index j = 0; j < x.size(); ++j) slope += mu * smooth_abs_d1(x[j], eps) * q0[j];
    const double curv = 2.0 * b0.squaredNorm();
    double t = curv > 0.0 ? -slope / curv : -slope;
    alpha = Vector::Zero(k);
    Vector rho, z;
    for (int j = 0; j < 60 && t != 0.0; ++j) {
      Vector trial = Vector::Zero(k);
      trial[0] = t;
      if (exact_at(trial, rho, z) < base.f) {
        alpha = trial;
        break;
      }
      t *= 0.5;
    }
  }

  Vector rho, z;
  double f_new = exact_at(alpha, rho, z);
  // Smoothing can leave the exact value marginally above the base value.
  for (int j = 0; j < 60 && !(f_new <= base.f); ++j) {
    alpha *= 0.5;
    f_new = exact_at(alpha, rho, z);
  }
  if (!(f_new <= base.f)) {
    alpha.setZero();
    f_new = exact_at(alpha, rho, z);
  }

  res.alpha = alpha;
  res.coefficients = frame.transform * alpha;
  res.step = q * alpha;
  res.x = std::move(z);
  res.f = f_new;
  res.residual = std::move(rho);
  res.step_image = b * alpha;
  return res;
}

SubspaceResult minimize_smooth(const Objective& obj, const SubspaceFrame& frame,
                               const BasePoint& base, const InnerOptions& options,
                               Counters& counters) {
  const Vector& x = frame.base;
  const Matrix& q = frame.basis;
  const Index k = frame.size();
  const bool has_hvp = obj.capabilities().has(Capability::hvp);

  auto value = [&](const Vector& alpha) {
    try {
      const double v = obj.value(Vector(x + q * alpha), counters);
      return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  Vector last_alpha;
  Vector last_grad;
  auto derivatives = [&](const Vector& alpha, Vector& g, Matrix& h) {
    const Vector z = x + q * alpha;
    Vector full;
    if (alpha.squaredNorm() == 0.0 && base.gradient) full = *base.gradient;
    else full = obj.gradient(z, counters);
    last_alpha = alpha;
    last_grad = full;
    g = q.transpose() * full;
    Matrix hq(z.size(), k);
    if (has_hvp) {
      for (Index i = 0; i < k; ++i) hq.col(i) = obj.hvp(z, q.col(i), counters);
    } else {
      const double eps = 1e-7 * (1.0 + z.norm());
      for (Index i = 0; i < k; ++i)
        hq.col(i) = (obj.gradient(Vector(z + eps * q.col(i)), counters) - full) / eps;
    }
    h = q.transpose() * hq;
  };

  ReducedOutcome red = reduced_newton(k, base.f, options, value, derivatives);

  SubspaceResult res;
  res.inner_iterations = red.iterations;
  res.converged = red.converged;
  Vector alpha = red.alpha;
  double f_new = red.phi;

  if (!red.progressed && !red.converged) {
    res.fallback = true;
    res.event = "inner newton failed; backtracking along first frame column";
    Vector g0 = base.gradient ? *base.gradient : obj.gradient(x, counters);
    Vector d = frame.directions.col(0);
    if (!(g0.dot(d) < 0.0)) d = -d;
    alpha = Vector::Zero(k);
    try {
      const LineSearchResult ls = line_search_backtracking(obj, x, d, base.f, g0, counters);
      // directions.col(0) = basis.col(0) / transform(0,0).
      alpha[0] = ls.step * (d.dot(q.col(0)));
      f_new = ls.f;
    } catch (const Error&) {
      f_new = base.f;
    }
  }

  res.alpha = alpha;
  res.coefficients = frame.transform * alpha;
  res.step = q * alpha;
  res.x = x + res.step;
  res.f = f_new;
  if (last_alpha.size() == k && last_alpha == alpha) res.gradient = last_grad;
  else if (alpha.squaredNorm() == 0.0 && base.gradient) res.gradient = *base.gradient;
  else res.gradient = obj.gradient(res.x, counters);
  return res;
}

}  // namespace

SubspaceResult subspace_minimize(const Objective& obj, const SubspaceFrame& frame,
                                 const BasePoint& base, const InnerOptions& options,
                                 Counters& counters) {
  if (frame.size() == 0) throw EmptySubspace();
  if (const CompositeObjective* comp = obj.composite();
      comp != nullptr && frame.has_images() && base.residual) {
    return minimize_composite(*comp, frame, base, options);
  }
  return minimize_smooth(obj, frame, base, options, counters);
}

// ---------------------------------------------------------------------------
// Line search

LineSearchResult line_search_backtracking(const Objective& obj, const Vector& x, const Vector& d,
                                          double f_x, const Vector& g_x, Counters& counters,
                                          double c1, double rho, double t0) {
  const double slope = g_x.dot(d);
  if (!(slope < 0.0)) throw Error("line search: not a descent direction");
  LineSearchResult res;
  double t = t0;
  for (int j = 0; j <= 60; ++j) {
    double ft = std::numeric_limits<double>::infinity();
    try {
      ft = obj.value(Vector(x + t * d), counters);
    } catch (const Error&) {
    }
    ++res.evaluations;
    if (std::isfinite(ft) && ft <= f_x + c1 * t * slope) {
      res.step = t;
      res.f = ft;
      return res;
    }
    t *= rho;
  }
  throw LineSearchFailed();
}

}  // namespace sesop
