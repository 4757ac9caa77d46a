//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "motifdiff/diffusion.hpp"
#include "motifdiff/error.hpp"
#include "motifdiff/npe.hpp"
#include "motifdiff/smiles.hpp"
#include "test_util.hpp"

namespace motifdiff {
namespace {

Eigen::VectorXd random_dist(std::mt19937_64 &gen, int size) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Eigen::VectorXd v(size);
  for (int k = 0; k < size; ++k)
    v(k) = u(gen);
  return v / v.sum();
}

Marginals random_marginals(std::mt19937_64 &gen, int f) {
  Marginals m;
  m.m_v = random_dist(gen, f);
  m.m_e = random_dist(gen, kNumBondTypes);
  m.m_ev.resize(kNumBondTypes, f);
  for (int b = 0; b < kNumBondTypes; ++b)
    m.m_ev.row(b) = random_dist(gen, f).transpose();
  m.m_ve.resize(f, kNumBondTypes);
  for (int k = 0; k < f; ++k)
    m.m_ve.row(k) = random_dist(gen, kNumBondTypes).transpose();
  return m;
}

Eigen::MatrixXd random_rows(std::mt19937_64 &gen, int rows, int cols) {
  Eigen::MatrixXd x(rows, cols);
  for (int r = 0; r < rows; ++r)
    x.row(r) = random_dist(gen, cols).transpose();
  return x;
}

TEST(Schedule, Endpoints) {
  Schedule sched{ 500, 0.008 };
  EXPECT_EQ(alpha_bar(500, sched), 0.0);
  EXPECT_EQ(alpha_bar(0, Schedule{ 500, 0.0 }), 1.0);
  EXPECT_EQ(retention(0, sched), 1.0);
  EXPECT_EQ(retention(500, sched), 0.0);
  for (int t = 1; t <= 500; ++t)
    EXPECT_LT(alpha_bar(t, sched), alpha_bar(t - 1, sched));
  EXPECT_THROW(alpha_bar(501, sched), Error);
  EXPECT_THROW(alpha_bar(-1, sched), Error);
  try {
    build_transitions(Marginals{}, 0, sched);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kOutOfRangeStep);
  }
}

TEST(Schedule, CosineValues) {
  Schedule sched{ 100, 0.008 };
  for (int t: { 1, 25, 50, 99 }) {
    double x = 0.5 * M_PI * (t / 100.0 + 0.008) / 1.008;
    EXPECT_NEAR(alpha_bar(t, sched), std::cos(x) * std::cos(x), 1e-15);
  }
}

TEST(Transitions, FamilyMatrixIsStochastic) {
  std::mt19937_64 gen(1);
  Eigen::VectorXd m = random_dist(gen, 6);
  Eigen::MatrixXd q = family_matrix(0.3, m);
  for (int r = 0; r < 6; ++r) {
    EXPECT_NEAR(q.row(r).sum(), 1.0, 1e-15);
    EXPECT_NEAR(q(r, r), 0.3 + 0.7 * m(r), 1e-15);
  }
}

// The cumulative matrix at t equals the product of the per-step matrices.
TEST(Transitions, CumulativeEqualsProduct) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 20; ++trial) {
    Marginals m = random_marginals(gen, 2 + trial % 7);
    Schedule sched{ 16, trial % 2 ? 0.008 : 0.0 };
    Eigen::MatrixXd pv = Eigen::MatrixXd::Identity(m.f_motif(), m.f_motif());
    Eigen::MatrixXd pe = Eigen::MatrixXd::Identity(4, 4);
    for (int t = 1; t <= 16; ++t) {
      TransitionSet ts = build_transitions(m, t, sched);
      pv = pv * ts.q_v();
      pe = pe * ts.q_e();
      EXPECT_LT((pv - ts.qbar_v()).cwiseAbs().maxCoeff(), 1e-8);
      EXPECT_LT((pe - ts.qbar_e()).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

// Bayes' rule evaluated with the explicit matrices.
TEST(Transitions, PosteriorMatchesEnumeration) {
  std::mt19937_64 gen(3);
  for (int f = 1; f <= 8; ++f) {
    for (int T = 1; T <= 8; ++T) {
      Marginals m = random_marginals(gen, f);
      Schedule sched{ T, 0.008 };
      for (int t = 1; t <= T; ++t) {
        TransitionSet ts = build_transitions(m, t, sched);
        Eigen::MatrixXd q = ts.q_v(), qb = ts.qbar_v_prev();
        for (int xt = 0; xt < f; ++xt) {
          for (int x0 = 0; x0 < f; ++x0) {
            Eigen::VectorXd joint(f);
            for (int k = 0; k < f; ++k)
              joint(k) = qb(x0, k) * q(k, xt);
            Eigen::VectorXd p = posterior(xt, x0, ts, Axis::kMotif);
            EXPECT_LT((p - joint / joint.sum()).cwiseAbs().maxCoeff(), 1e-10);
          }
        }
        Eigen::MatrixXd qe = ts.q_e(), qbe = ts.qbar_e_prev();
        for (int xt = 0; xt < 4; ++xt) {
          for (int x0 = 0; x0 < 4; ++x0) {
            Eigen::VectorXd joint(4);
            for (int k = 0; k < 4; ++k)
              joint(k) = qbe(x0, k) * qe(k, xt);
            Eigen::VectorXd p = posterior(xt, x0, ts, Axis::kBond);
            EXPECT_LT((p - joint / joint.sum()).cwiseAbs().maxCoeff(), 1e-10);
          }
        }
      }
    }
  }
}

TEST(Transitions, MixtureIsWeightedPosterior) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 50; ++trial) {
    int f = 2 + trial % 7;
    Marginals m = random_marginals(gen, f);
    Schedule sched{ 10, 0.008 };
    TransitionSet ts = build_transitions(m, 1 + trial % 10, sched);
    Eigen::VectorXd p0 = random_dist(gen, f);
    for (int xt = 0; xt < f; ++xt) {
      Eigen::VectorXd ref = Eigen::VectorXd::Zero(f);
      for (int k = 0; k < f; ++k)
        ref += p0(k) * posterior(xt, k, ts, Axis::kMotif);
      Eigen::VectorXd got = posterior_mixture(xt, p0, ts, Axis::kMotif);
      EXPECT_LT((got - ref).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Transitions, ZeroMassPosterior) {
  Marginals m;
  m.m_v = Eigen::VectorXd::Unit(3, 0);
  m.m_e = Eigen::VectorXd::Unit(4, 0);
  m.m_ev = Eigen::MatrixXd::Constant(4, 3, 1.0 / 3);
  m.m_ve = Eigen::MatrixXd::Constant(3, 4, 0.25);
  Schedule sched{ 4, 0.008 };
  TransitionSet ts = build_transitions(m, 4, sched);
  // At t = T nothing is retained, and category 2 has no marginal mass.
  try {
    posterior(2, 1, ts, Axis::kMotif);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kZeroMassPosterior);
  }
}

TEST(Transitions, GraphTransitionBlocks) {
  std::mt19937_64 gen(5);
  Marginals m = random_marginals(gen, 5);
  TransitionSet ts = build_transitions(m, 3, Schedule{ 10, 0.008 });
  const int n = 3, f = 5, e = 4;
  Eigen::MatrixXd g = assemble_graph_transition(ts, n);
  ASSERT_EQ(g.rows(), f + n * e);
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    EXPECT_NEAR(g.row(r).sum(), 1.0, 1e-12);
  // Bond blocks of different slots do not mix.
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a != b) {
        EXPECT_EQ(g.block(f + a * e, f + b * e, e, e).cwiseAbs().maxCoeff(),
                  0.0);
      }
    }
  }
  // Cross blocks repeat across slots.
  for (int a = 1; a < n; ++a) {
    EXPECT_EQ(g.block(0, f + a * e, f, e), g.block(0, f, f, e));
    EXPECT_EQ(g.block(f + a * e, 0, e, f), g.block(f, 0, e, f));
  }
}

TEST(Marginals, HandCount) {
  MotifGraph h{ { 6, 8 },
                { { 0, 1, BondOrder::kSingle, 0 },
                  { 1, 0, BondOrder::kSingle, 0 } } };
  FeatureLayout layout;
  layout.f_motif = 10;
  layout.f_attach = 1;
  layout.n_max = 2;
  Marginals m = estimate_marginals({ h }, layout);
  EXPECT_DOUBLE_EQ(m.m_v(6), 0.5);
  EXPECT_DOUBLE_EQ(m.m_v(8), 0.5);
  EXPECT_DOUBLE_EQ(m.m_e(0), 0.5);
  EXPECT_DOUBLE_EQ(m.m_e(1), 0.5);
  EXPECT_DOUBLE_EQ(m.m_ve(6, 1), 0.5);
  EXPECT_DOUBLE_EQ(m.m_ev(1, 8), 0.5);
  // Unseen rows fall back to the plain marginal.
  EXPECT_DOUBLE_EQ(m.m_ev(2, 6), 0.5);
  EXPECT_DOUBLE_EQ(m.m_ve(0, 0), 0.5);
  EXPECT_THROW(estimate_marginals({}, layout), Error);
}

TEST(Marginals, SaveLoad) {
  std::mt19937_64 gen(6);
  Marginals m = random_marginals(gen, 7);
  std::stringstream ss;
  save_marginals(m, ss);
  Marginals back = load_marginals(ss);
  EXPECT_EQ(back.m_v, m.m_v);
  EXPECT_EQ(back.m_e, m.m_e);
  EXPECT_EQ(back.m_ev, m.m_ev);
  EXPECT_EQ(back.m_ve, m.m_ve);
}

TokenState sample_state(int n) {
  TokenState s;
  s.n = n;
  s.motif.assign(n, 0);
  s.bond.assign(n * n, 0);
  s.attach.assign(n * n, -1);
  for (int i = 0; i + 1 < n; ++i) {
    s.bond[i * n + i + 1] = s.bond[(i + 1) * n + i] = 1;
    s.attach[i * n + i + 1] = s.attach[(i + 1) * n + i] = 0;
  }
  return s;
}

TEST(Forward, StepZeroIsIdentityAndSymmetryHolds) {
  std::mt19937_64 gen(7);
  Marginals m = random_marginals(gen, 5);
  Schedule sched{ 50, 0.008 };
  TokenState x0 = sample_state(6);
  Rng rng(1);
  EXPECT_EQ(forward_sample(x0, 0, m, sched, rng), x0);
  for (int t = 1; t <= 50; ++t) {
    TokenState xt = forward_sample(x0, t, m, sched, rng);
    for (int i = 0; i < xt.n; ++i) {
      EXPECT_EQ(xt.bond_at(i, i), 0);
      for (int j = 0; j < xt.n; ++j)
        EXPECT_EQ(xt.bond_at(i, j), xt.bond_at(j, i));
    }
  }
}

TEST(Forward, FullNoiseMatchesMarginals) {
  std::mt19937_64 gen(8);
  Marginals m = random_marginals(gen, 4);
  Schedule sched{ 20, 0.008 };
  TokenState x0 = sample_state(3);
  Rng rng(99);
  const int draws = 20000;
  Eigen::VectorXd cv = Eigen::VectorXd::Zero(4);
  for (int d = 0; d < draws; ++d) {
    TokenState xt = forward_sample(x0, 20, m, sched, rng);
    cv(xt.motif[0]) += 1;
  }
  for (int k = 0; k < 4; ++k) {
    double p = m.m_v(k);
    EXPECT_LE(std::abs(cv(k) - draws * p), 3 * std::sqrt(draws * p * (1 - p)));
  }
}

TEST(Forward, MatrixForm) {
  std::mt19937_64 gen(9);
  Marginals m = random_marginals(gen, 5);
  FeatureLayout layout;
  layout.f_motif = 5;
  layout.f_attach = 2;
  layout.n_max = 4;
  TokenState x0 = sample_state(3);
  GraphTokenMatrix mx = to_matrix(x0, layout);
  Rng a(5), b(5);
  GraphTokenMatrix noisy = forward_sample(mx, 7, m, Schedule{ 10, 0.008 }, a);
  TokenState direct = forward_sample(x0, 7, m, Schedule{ 10, 0.008 }, b);
  EXPECT_EQ(from_matrix(noisy, true), direct);
}

TEST(Reverse, OracleRecoversTarget) {
  std::vector<MolecularGraph> corpus = test::corpus(200);
  MotifVocabulary v = train_vocabulary(corpus, 400, 20);
  std::vector<MotifGraph> enc = encode_all(corpus, v);
  int n_max = 0;
  for (const MotifGraph &h: enc)
    n_max = std::max(n_max, h.num_nodes());
  FeatureLayout layout = FeatureLayout::for_vocabulary(v, n_max);
  Marginals m = estimate_marginals(enc, layout);
  Schedule sched{ 50, 0.008 };
  for (int k = 0; k < 20; ++k) {
    const MotifGraph &h = enc[k];
    TokenState x0 = to_token_state(h);
    OracleDenoiser oracle(x0, layout);
    SamplerOptions opts;
    opts.n_nodes = x0.n;
    Rng rng(stream_seed(7, k));
    Trajectory t = reverse_sample(oracle, {}, layout, m, sched, opts, rng, &v);
    ASSERT_EQ(t.status, TrajectoryStatus::kOk) << t.error;
    EXPECT_EQ(t.final_graph, h);
    EXPECT_EQ(t.states.size(), 51U);
    EXPECT_EQ(t.steps.front(), 50);
    EXPECT_EQ(t.steps.back(), 0);
  }
}

TEST(Reverse, BatchIsThreadIndependent) {
  std::mt19937_64 gen(10);
  FeatureLayout layout;
  layout.f_motif = 6;
  layout.f_attach = 3;
  layout.n_max = 5;
  Marginals m = random_marginals(gen, 6);
  MarginalDenoiser d(m, layout);
  SamplerOptions opts;
  opts.n_nodes = 4;
  Schedule sched{ 30, 0.008 };
  auto a = reverse_sample_batch(d, {}, layout, m, sched, opts, 3, 12, 1);
  auto b = reverse_sample_batch(d, {}, layout, m, sched, opts, 3, 12, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k)
    EXPECT_EQ(a[k].states, b[k].states);
}

TEST(Denoiser, ContractViolations) {
  FeatureLayout layout;
  layout.f_motif = 4;
  layout.f_attach = 2;
  layout.n_max = 3;
  UniformDenoiser d(layout);
  TokenState x = sample_state(2);
  DenoiserOutput out = d.predict(x, 1, {});
  EXPECT_NO_THROW(validate_output(out, 2, layout));
  DenoiserOutput bad_shape = out;
  bad_shape.motif.conservativeResize(2, 3);
  DenoiserOutput bad_sum = out;
  bad_sum.bond(0, 0) += 0.5;
  for (const DenoiserOutput *o: { &bad_shape, &bad_sum }) {
    try {
      validate_output(*o, 2, layout);
      FAIL();
    } catch (const Error &e) {
      EXPECT_EQ(e.kind(), ErrorKind::kDenoiserContractViolation);
    }
  }
}

// Negative log-likelihood read straight off the one-hot feature matrix.
LossBreakdown naive_loss(const DenoiserOutput &p, const GraphTokenMatrix &x) {
  const FeatureLayout &l = x.layout;
  LossBreakdown out;
  for (int i = 0; i < x.n(); ++i) {
    for (int k = 0; k < l.f_motif; ++k)
      if (x.rows(i, k) == 1.0)
        out.l_motif -= std::log(p.motif(i, k));
    for (int j = 0; j < l.n_max; ++j) {
      for (int b = 0; b < l.f_bond; ++b)
        if (x.rows(i, l.bond_offset(j) + b) == 1.0)
          out.l_bond -= std::log(p.bond(i * l.n_max + j, b));
      for (int a = 0; a < l.f_attach; ++a)
        if (x.rows(i, l.attach_offset(j) + a) == 1.0)
          out.l_attach -= std::log(p.attach(i * l.n_max + j, a));
    }
  }
  return out;
}

TEST(Loss, MatchesNaiveNll) {
  std::vector<MolecularGraph> corpus = test::corpus(300);
  MotifVocabulary v = train_vocabulary(corpus, 400, 20);
  std::vector<MotifGraph> enc = encode_all(corpus, v);
  std::mt19937_64 gen(11);
  FeatureLayout layout = FeatureLayout::for_vocabulary(v, 12);
  int checked = 0;
  for (int trial = 0; checked < 200; ++trial) {
    const MotifGraph &h = enc[trial % enc.size()];
    if (h.num_nodes() > 12)
      continue;
    ++checked;
    GraphTokenMatrix x = featurize(h, layout);
    const int n = h.num_nodes(), rows = n * layout.n_max;
    DenoiserOutput p{ random_rows(gen, n, layout.f_motif),
                      random_rows(gen, rows, kNumBondTypes),
                      random_rows(gen, rows, layout.f_attach) };
    LossBreakdown got = pretrain_loss(p, x);
    LossBreakdown ref = naive_loss(p, x);
    EXPECT_NEAR(got.l_motif, ref.l_motif, 1e-12);
    EXPECT_NEAR(got.l_bond, ref.l_bond, 1e-12);
    EXPECT_NEAR(got.l_attach, ref.l_attach, 1e-12);

    // Attachment rows of null bonds never contribute.
    TokenState s = to_token_state(h);
    DenoiserOutput q = p;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < layout.n_max; ++j)
        if (j >= n || s.bond_at(i, j) == 0)
          q.attach.row(i * layout.n_max + j) =
              random_dist(gen, layout.f_attach).transpose();
    EXPECT_EQ(pretrain_loss(q, x).l_attach, got.l_attach);
  }
}

TEST(Loss, RejectsBadInput) {
  FeatureLayout layout;
  layout.f_motif = 4;
  layout.f_attach = 2;
  layout.n_max = 3;
  TokenState x = sample_state(2);
  UniformDenoiser d(layout);
  DenoiserOutput out = d.predict(x, 1, {});
  DenoiserOutput wrong = out;
  wrong.attach.conservativeResize(5, 2);
  try {
    pretrain_loss(wrong, x, layout);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShapeMismatch);
  }
  DenoiserOutput neg = out;
  neg.motif(0, 0) = -0.25;
  neg.motif(0, 1) = 0.75;
  try {
    pretrain_loss(neg, x, layout);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonDistributionInput);
  }
}

TEST(Trajectory, TextFormat) {
  Trajectory t;
  t.states.push_back(sample_state(3));
  t.steps.push_back(4);
  std::ostringstream os;
  write_trajectory(t, os);
  EXPECT_EQ(os.str(), "4\t0,0,0\t0-1:1;1-2:1\n");
}

}  // namespace
}  // namespace motifdiff
