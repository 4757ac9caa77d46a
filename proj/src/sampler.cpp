//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <ostream>

#include "motifdiff/diffusion.hpp"
#include "motifdiff/error.hpp"
#include "motifdiff/parallel.hpp"

namespace motifdiff {
namespace {
std::span<const double> as_span(const Eigen::VectorXd &v) {
  return { v.data(), static_cast<std::size_t>(v.size()) };
}

// Draw from the row a * e_x + (1 - a) * m.
int sample_family_row(int x, double a, const Eigen::VectorXd &m, Rng &rng) {
  if (rng.uniform() < a)
    return x;
  return rng.categorical(as_span(m));
}

int argmax(const Eigen::VectorXd &p) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < p.size(); ++k) {
    if (p(k) > p(best))
      best = k;
  }
  return static_cast<int>(best);
}
}  // namespace

// --- forward process ---

TokenState forward_sample(const TokenState &x0, int t, const Marginals &m,
                          const Schedule &sched, Rng &rng) {
  if (t == 0) {
    alpha_bar(0, sched);
    return x0;
  }
  const double a = retention(t, sched);
  TokenState xt = x0;
  for (int i = 0; i < x0.n; ++i)
    xt.motif[i] = sample_family_row(x0.motif[i], a, m.m_v, rng);
  for (int i = 0; i < x0.n; ++i) {
    for (int j = i + 1; j < x0.n; ++j) {
      int b = sample_family_row(x0.bond_at(i, j), a, m.m_e, rng);
      xt.bond[i * x0.n + j] = b;
      xt.bond[j * x0.n + i] = b;
    }
  }
  std::fill(xt.attach.begin(), xt.attach.end(), -1);
  return xt;
}

GraphTokenMatrix forward_sample(const GraphTokenMatrix &x0, int t,
                                const Marginals &m, const Schedule &sched,
                                Rng &rng) {
  if (t == 0) {
    alpha_bar(0, sched);
    return x0;
  }
  TokenState s = from_matrix(x0, true);
  return to_matrix(forward_sample(s, t, m, sched, rng), x0.layout);
}

// --- denoiser contract ---

namespace {
void check_rows(const Eigen::MatrixXd &x, Eigen::Index rows, Eigen::Index cols,
                const char *what, double tol, ErrorKind shape_kind,
                ErrorKind dist_kind) {
  if (x.rows() != rows || x.cols() != cols)
    throw Error(shape_kind, std::string(what) + " has shape " +
                                std::to_string(x.rows()) + "x" +
                                std::to_string(x.cols()) + ", expected " +
                                std::to_string(rows) + "x" +
                                std::to_string(cols));
  for (Eigen::Index r = 0; r < rows; ++r) {
    double s = 0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      double v = x(r, c);
      if (!(v >= 0) || !std::isfinite(v))
        throw Error(dist_kind, std::string(what) + " row " +
                                   std::to_string(r) +
                                   " has a negative or non-finite entry");
      s += v;
    }
    if (std::abs(s - 1) > tol)
      throw Error(dist_kind, std::string(what) + " row " + std::to_string(r) +
                                 " sums to " + std::to_string(s));
  }
}
}  // namespace

void validate_output(const DenoiserOutput &out, int n,
                     const FeatureLayout &layout, double tol) {
  const ErrorKind k = ErrorKind::kDenoiserContractViolation;
  check_rows(out.motif, n, layout.f_motif, "motif prediction", tol, k, k);
  check_rows(out.bond, n * layout.n_max, kNumBondTypes, "bond prediction", tol,
             k, k);
  check_rows(out.attach, n * layout.n_max, layout.f_attach,
             "attachment prediction", tol, k, k);
}

OracleDenoiser::OracleDenoiser(TokenState x0, FeatureLayout layout)
    : x0_(std::move(x0)), layout_(layout) {
  if (x0_.n > layout_.n_max)
    throw Error(ErrorKind::kLayoutOverflow, "oracle target exceeds n_max");
}

DenoiserOutput OracleDenoiser::predict(const TokenState &xt, int,
                                       const Conditioning &) const {
  if (xt.n != x0_.n)
    throw Error(ErrorKind::kShapeMismatch,
                "oracle denoiser queried with a different node count");
  const int n = x0_.n, nm = layout_.n_max;
  DenoiserOutput out;
  out.motif = Eigen::MatrixXd::Zero(n, layout_.f_motif);
  out.bond = Eigen::MatrixXd::Zero(n * nm, kNumBondTypes);
  out.attach = Eigen::MatrixXd::Constant(n * nm, layout_.f_attach,
                                         1.0 / layout_.f_attach);
  for (int i = 0; i < n; ++i) {
    out.motif(i, x0_.motif[i]) = 1;
    for (int j = 0; j < nm; ++j) {
      int b = j < n ? x0_.bond_at(i, j) : 0;
      out.bond(i * nm + j, b) = 1;
      if (b != 0 && x0_.attach_at(i, j) >= 0) {
        out.attach.row(i * nm + j).setZero();
        out.attach(i * nm + j, x0_.attach_at(i, j)) = 1;
      }
    }
  }
  return out;
}

DenoiserOutput UniformDenoiser::predict(const TokenState &xt, int,
                                        const Conditioning &) const {
  const int rows = xt.n * layout_.n_max;
  DenoiserOutput out;
  out.motif = Eigen::MatrixXd::Constant(xt.n, layout_.f_motif,
                                        1.0 / layout_.f_motif);
  out.bond = Eigen::MatrixXd::Constant(rows, kNumBondTypes,
                                       1.0 / kNumBondTypes);
  out.attach = Eigen::MatrixXd::Constant(rows, layout_.f_attach,
                                         1.0 / layout_.f_attach);
  return out;
}

DenoiserOutput MarginalDenoiser::predict(const TokenState &xt, int,
                                         const Conditioning &) const {
  const int rows = xt.n * layout_.n_max;
  DenoiserOutput out;
  out.motif = m_.m_v.transpose().replicate(xt.n, 1);
  out.bond = m_.m_e.transpose().replicate(rows, 1);
  out.attach = Eigen::MatrixXd::Constant(rows, layout_.f_attach,
                                         1.0 / layout_.f_attach);
  return out;
}

// --- reverse process ---

Trajectory reverse_sample(const Denoiser &d, const Conditioning &ctx,
                          const FeatureLayout &layout, const Marginals &m,
                          const Schedule &sched, const SamplerOptions &opts,
                          Rng &rng, const MotifVocabulary *v) {
  const int n = opts.n_nodes;
  if (n < 1 || n > layout.n_max)
    throw Error(ErrorKind::kLayoutOverflow,
                "node count " + std::to_string(n) + " outside [1, n_max]");
  if (m.f_motif() != layout.f_motif)
    throw Error(ErrorKind::kShapeMismatch,
                "marginals and layout disagree on f_motif");
  const int nm = layout.n_max;

  TokenState x;
  x.n = n;
  x.motif.resize(n);
  x.bond.assign(n * n, 0);
  x.attach.assign(n * n, -1);
  for (int i = 0; i < n; ++i)
    x.motif[i] = rng.categorical(as_span(m.m_v));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      int b = rng.categorical(as_span(m.m_e));
      x.bond[i * n + j] = b;
      x.bond[j * n + i] = b;
    }
  }

  Trajectory traj;
  traj.states.push_back(x);
  traj.steps.push_back(sched.t_max);
  DenoiserOutput last;
  for (int t = sched.t_max; t >= 1; --t) {
    TransitionSet ts = build_transitions(m, t, sched);
    DenoiserOutput out = d.predict(x, t, ctx);
    validate_output(out, n, layout);
    TokenState next = x;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd p0 = out.motif.row(i).transpose();
      Eigen::VectorXd p =
          opts.argmax_x0 ? posterior(x.motif[i], argmax(p0), ts, Axis::kMotif)
                         : posterior_mixture(x.motif[i], p0, ts, Axis::kMotif);
      next.motif[i] = rng.categorical(as_span(p));
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        Eigen::VectorXd p0 = out.bond.row(i * nm + j).transpose();
        int xb = x.bond_at(i, j);
        Eigen::VectorXd p =
            opts.argmax_x0 ? posterior(xb, argmax(p0), ts, Axis::kBond)
                           : posterior_mixture(xb, p0, ts, Axis::kBond);
        int b = rng.categorical(as_span(p));
        next.bond[i * n + j] = b;
        next.bond[j * n + i] = b;
      }
    }
    x = std::move(next);
    if (t == 1)
      last = std::move(out);
    traj.states.push_back(x);
    traj.steps.push_back(t - 1);
  }

  TokenState &x0 = traj.states.back();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (x0.bond_at(i, j) != 0)
        x0.attach[i * n + j] = argmax(last.attach.row(i * nm + j).transpose());
    }
  }
  traj.final_graph = from_token_state(x0);
  if (v) {
    try {
      decode(traj.final_graph, *v);
    } catch (const Error &e) {
      traj.status = TrajectoryStatus::kNonDecodable;
      traj.error = std::string(error_kind_name(e.kind())) + ": " + e.what();
    }
  }
  return traj;
}

std::vector<Trajectory>
reverse_sample_batch(const Denoiser &d, const Conditioning &ctx,
                     const FeatureLayout &layout, const Marginals &m,
                     const Schedule &sched, const SamplerOptions &opts,
                     std::uint64_t seed, int count, int threads,
                     const MotifVocabulary *v) {
  std::vector<Trajectory> out(count);
  detail::parallel_for(count, d.concurrent_safe() ? threads : 1, [&](auto k) {
    Rng rng(stream_seed(seed, static_cast<std::uint64_t>(k)));
    out[k] = reverse_sample(d, ctx, layout, m, sched, opts, rng, v);
  });
  return out;
}

// --- loss ---

LossBreakdown pretrain_loss(const DenoiserOutput &pred, const TokenState &x0,
                            const FeatureLayout &layout) {
  const int n = x0.n, nm = layout.n_max;
  if (n > nm)
    throw Error(ErrorKind::kShapeMismatch, "target exceeds n_max");
  const ErrorKind shape = ErrorKind::kShapeMismatch;
  const ErrorKind dist = ErrorKind::kNonDistributionInput;
  check_rows(pred.motif, n, layout.f_motif, "motif prediction", 1e-9, shape,
             dist);
  check_rows(pred.bond, n * nm, kNumBondTypes, "bond prediction", 1e-9, shape,
             dist);
  check_rows(pred.attach, n * nm, layout.f_attach, "attachment prediction",
             1e-9, shape, dist);

  LossBreakdown l;
  for (int i = 0; i < n; ++i) {
    l.l_motif -= std::log(pred.motif(i, x0.motif[i]));
    for (int j = 0; j < nm; ++j) {
      int b = j < n ? x0.bond_at(i, j) : 0;
      l.l_bond -= std::log(pred.bond(i * nm + j, b));
      if (b == 0)
        continue;
      int a = x0.attach_at(i, j);
      if (a < 0 || a >= layout.f_attach)
        throw Error(shape, "target bond without a valid attachment");
      l.l_attach -= std::log(pred.attach(i * nm + j, a));
    }
  }
  return l;
}

LossBreakdown pretrain_loss(const DenoiserOutput &pred,
                            const GraphTokenMatrix &x0) {
  return pretrain_loss(pred, from_matrix(x0), x0.layout);
}

void write_trajectory(const Trajectory &traj, std::ostream &os) {
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const TokenState &s = traj.states[k];
    os << traj.steps[k] << '\t';
    for (int i = 0; i < s.n; ++i)
      os << (i ? "," : "") << s.motif[i];
    os << '\t';
    bool first = true;
    for (int i = 0; i < s.n; ++i) {
      for (int j = i + 1; j < s.n; ++j) {
        if (s.bond_at(i, j) == 0)
          continue;
        os << (first ? "" : ";") << i << '-' << j << ':' << s.bond_at(i, j);
        first = false;
      }
    }
    os << '\n';
  }
}

}  // namespace motifdiff
