//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "motifdiff/rng.hpp"
#include "motifdiff/tokenizer.hpp"

namespace motifdiff {

struct Marginals {
  Eigen::VectorXd m_v;   // f_motif
  Eigen::VectorXd m_e;   // kNumBondTypes
  Eigen::MatrixXd m_ev;  // kNumBondTypes x f_motif, rows are distributions
  Eigen::MatrixXd m_ve;  // f_motif x kNumBondTypes, rows are distributions

  int f_motif() const { return static_cast<int>(m_v.size()); }
};

// Counts over the dense representation: every row i < n of a molecule has
// n_max bond blocks, padding and self blocks counted as null. The bond/motif
// co-occurrence pairs each bond block with the motif of its row. Throws
// Error(kCorpusEmpty).
Marginals estimate_marginals(const std::vector<MotifGraph> &encoded,
                             const FeatureLayout &layout);

void save_marginals(const Marginals &m, std::ostream &os);
Marginals load_marginals(std::istream &is);

struct Schedule {
  int t_max = 500;
  double s = 0.008;
};

// cos(0.5*pi*(t/T + s)/(1 + s))^2; exactly 0 at t = T. Throws
// Error(kOutOfRangeStep).
double alpha_bar(int t, const Schedule &sched);

// alpha_bar(t) / alpha_bar(0): the retention used by the transition
// matrices, so that the cumulative transition at t = 0 is the identity.
double retention(int t, const Schedule &sched);

// Dense a*I + (1 - a) * 1 m^T.
Eigen::MatrixXd family_matrix(double a, const Eigen::VectorXd &m);

// Transition matrices at step t. Per-step matrices use
// alpha = retention(t) / retention(t - 1); cumulative ones use retention
// directly. Dense matrices are built on request.
struct TransitionSet {
  int t = 0;
  double alpha = 1;     // per step
  double abar = 1;      // cumulative at t
  double abar_prev = 1; // cumulative at t - 1
  Eigen::VectorXd m_v, m_e;
  Eigen::MatrixXd m_ev, m_ve;

  Eigen::MatrixXd q_v() const { return family_matrix(alpha, m_v); }
  Eigen::MatrixXd q_e() const { return family_matrix(alpha, m_e); }
  Eigen::MatrixXd q_ev() const;
  Eigen::MatrixXd q_ve() const;
  Eigen::MatrixXd qbar_v() const { return family_matrix(abar, m_v); }
  Eigen::MatrixXd qbar_e() const { return family_matrix(abar, m_e); }
  Eigen::MatrixXd qbar_v_prev() const { return family_matrix(abar_prev, m_v); }
  Eigen::MatrixXd qbar_e_prev() const { return family_matrix(abar_prev, m_e); }
};

// Throws Error(kOutOfRangeStep) unless 1 <= t <= T and
// Error(kScheduleDegeneracy) when alpha_bar(t - 1) is 0.
TransitionSet build_transitions(const Marginals &m, int t,
                                const Schedule &sched);

// Square operator over one motif row and n bond blocks:
//   [[Q_V,        1_n^T (x) Q_VE],
//    [1_n (x) Q_EV, I_n (x) Q_E ]]
// with every row renormalized to sum to 1.
Eigen::MatrixXd assemble_graph_transition(const TransitionSet &ts, int n);

enum class Axis { kMotif, kBond };

// q(x_{t-1} | x_t, x_0) for one categorical element. Throws
// Error(kZeroMassPosterior).
Eigen::VectorXd posterior(int xt, int x0, const TransitionSet &ts, Axis axis);

// Posterior mixed over a predicted x0 distribution:
//   sum_k p(x0 = k) q(x_{t-1} | x_t, x0 = k).
// Linear in the category count.
Eigen::VectorXd posterior_mixture(int xt, const Eigen::VectorXd &p_x0,
                                  const TransitionSet &ts, Axis axis);

// Forward corruption q(x_t | x_0). Bonds are sampled on the upper triangle
// and mirrored; attachments are cleared (-1) for t >= 1. t = 0 returns x0.
TokenState forward_sample(const TokenState &x0, int t, const Marginals &m,
                          const Schedule &sched, Rng &rng);
GraphTokenMatrix forward_sample(const GraphTokenMatrix &x0, int t,
                                const Marginals &m, const Schedule &sched,
                                Rng &rng);

// --- denoiser contract ---

// Conditioning passed through to the denoiser: packed demonstrations and
// the query score.
struct Conditioning {
  std::vector<std::pair<MotifGraph, double>> demonstrations;
  double query_score = 1.0;
};

// Row layout: motif is n x f_motif; bond and attach have one row per
// (i, j) block, index i * n_max + j.
struct DenoiserOutput {
  Eigen::MatrixXd motif;
  Eigen::MatrixXd bond;
  Eigen::MatrixXd attach;
};

class Denoiser {
public:
  virtual ~Denoiser() = default;
  virtual DenoiserOutput predict(const TokenState &xt, int t,
                                 const Conditioning &ctx) const = 0;
  // False when predict must not be called concurrently.
  virtual bool concurrent_safe() const { return true; }
};

// Throws Error(kDenoiserContractViolation).
void validate_output(const DenoiserOutput &out, int n,
                     const FeatureLayout &layout, double tol = 1e-9);

// Point mass on a known x0.
class OracleDenoiser: public Denoiser {
public:
  OracleDenoiser(TokenState x0, FeatureLayout layout);
  DenoiserOutput predict(const TokenState &xt, int t,
                         const Conditioning &ctx) const override;

private:
  TokenState x0_;
  FeatureLayout layout_;
};

class UniformDenoiser: public Denoiser {
public:
  explicit UniformDenoiser(FeatureLayout layout): layout_(layout) { }
  DenoiserOutput predict(const TokenState &xt, int t,
                         const Conditioning &ctx) const override;

private:
  FeatureLayout layout_;
};

// Predicts the corpus marginals regardless of input.
class MarginalDenoiser: public Denoiser {
public:
  MarginalDenoiser(Marginals m, FeatureLayout layout)
      : m_(std::move(m)), layout_(layout) { }
  DenoiserOutput predict(const TokenState &xt, int t,
                         const Conditioning &ctx) const override;

private:
  Marginals m_;
  FeatureLayout layout_;
};

enum class TrajectoryStatus { kOk, kNonDecodable };

struct Trajectory {
  // states[k] is x^{T-k}; states.back() is x^0 with attachments.
  std::vector<TokenState> states;
  std::vector<int> steps;
  TrajectoryStatus status = TrajectoryStatus::kOk;
  std::string error;
  MotifGraph final_graph;
};

struct SamplerOptions {
  int n_nodes = 8;
  // Use the argmax of the predicted x0 instead of mixing over it.
  bool argmax_x0 = false;
};

// Reverse process from the stationary distribution. The final state is
// converted to a MotifGraph and, when `v` is given, decoded; failures set
// status kNonDecodable and keep the trajectory.
Trajectory reverse_sample(const Denoiser &d, const Conditioning &ctx,
                          const FeatureLayout &layout, const Marginals &m,
                          const Schedule &sched, const SamplerOptions &opts,
                          Rng &rng, const MotifVocabulary *v = nullptr);

// Independent trajectories; trajectory k uses stream_seed(seed, k).
std::vector<Trajectory>
reverse_sample_batch(const Denoiser &d, const Conditioning &ctx,
                     const FeatureLayout &layout, const Marginals &m,
                     const Schedule &sched, const SamplerOptions &opts,
                     std::uint64_t seed, int count, int threads,
                     const MotifVocabulary *v = nullptr);

struct LossBreakdown {
  double l_motif = 0;
  double l_bond = 0;
  double l_attach = 0;

  double total() const { return l_motif + l_bond + l_attach; }
};

// Summed negative log-likelihoods (nats). Throws Error(kShapeMismatch) and
// Error(kNonDistributionInput).
LossBreakdown pretrain_loss(const DenoiserOutput &pred, const TokenState &x0,
                            const FeatureLayout &layout);
LossBreakdown pretrain_loss(const DenoiserOutput &pred,
                            const GraphTokenMatrix &x0);

// One line per state: "t<TAB>ids<TAB>i-j:cat;..." over the upper triangle.
void write_trajectory(const Trajectory &traj, std::ostream &os);

}  // namespace motifdiff
