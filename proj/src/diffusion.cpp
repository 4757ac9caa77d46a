//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "motifdiff/diffusion.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include <json.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "motifdiff/error.hpp"

namespace motifdiff {

// --- marginals ---

namespace {
Eigen::VectorXd normalized(const Eigen::VectorXd &counts,
                           const Eigen::VectorXd &fallback) {
  double total = counts.sum();
  if (total <= 0)
    return fallback;
  return counts / total;
}
}  // namespace

Marginals estimate_marginals(const std::vector<MotifGraph> &encoded,
                             const FeatureLayout &layout) {
  if (encoded.empty())
    throw Error(ErrorKind::kCorpusEmpty, "no encoded molecules");
  const int f = layout.f_motif;
  Eigen::VectorXd cv = Eigen::VectorXd::Zero(f);
  Eigen::MatrixXd cev = Eigen::MatrixXd::Zero(kNumBondTypes, f);
  for (const MotifGraph &h: encoded) {
    TokenState s = to_token_state(h);
    if (s.n > layout.n_max)
      throw Error(ErrorKind::kLayoutOverflow,
                  std::to_string(s.n) + " nodes exceed n_max " +
                      std::to_string(layout.n_max));
    for (int i = 0; i < s.n; ++i) {
      int id = s.motif[i];
      if (id < 0 || id >= f)
        throw Error(ErrorKind::kLayoutOverflow,
                    "motif id " + std::to_string(id) + " outside layout");
      cv(id) += 1;
      for (int j = 0; j < layout.n_max; ++j) {
        int b = j < s.n ? s.bond_at(i, j) : 0;
        cev(b, id) += 1;
      }
    }
  }
  if (cv.sum() <= 0)
    throw Error(ErrorKind::kCorpusEmpty, "encoded corpus has no nodes");

  Marginals m;
  m.m_v = cv / cv.sum();
  Eigen::VectorXd ce = cev.rowwise().sum();
  m.m_e = ce / ce.sum();
  m.m_ev.resize(kNumBondTypes, f);
  for (int b = 0; b < kNumBondTypes; ++b)
    m.m_ev.row(b) = normalized(cev.row(b).transpose(), m.m_v).transpose();
  m.m_ve.resize(f, kNumBondTypes);
  for (int k = 0; k < f; ++k)
    m.m_ve.row(k) = normalized(cev.col(k), m.m_e).transpose();
  return m;
}

void save_marginals(const Marginals &m, std::ostream &os) {
  using nlohmann::json;
  auto vec = [](const Eigen::VectorXd &v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  auto mat = [](const Eigen::MatrixXd &x) {
    std::vector<std::vector<double>> rows(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      for (Eigen::Index c = 0; c < x.cols(); ++c)
        rows[r].push_back(x(r, c));
    return rows;
  };
  json doc;
  doc["format"] = "motifdiff-marginals";
  doc["version"] = 1;
  doc["m_v"] = vec(m.m_v);
  doc["m_e"] = vec(m.m_e);
  doc["m_ev"] = mat(m.m_ev);
  doc["m_ve"] = mat(m.m_ve);
  os << doc.dump() << '\n';
}

Marginals load_marginals(std::istream &is) {
  using nlohmann::json;
  try {
    json doc = json::parse(is);
    if (doc.at("format") != "motifdiff-marginals" || doc.at("version") != 1)
      throw Error(ErrorKind::kFormatError, "not a marginals file");
    auto vec = [](const json &j) {
      auto v = j.get<std::vector<double>>();
      return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(
          v.data(), static_cast<Eigen::Index>(v.size())));
    };
    auto mat = [](const json &j) {
      auto rows = j.get<std::vector<std::vector<double>>>();
      Eigen::MatrixXd x(rows.size(), rows.empty() ? 0 : rows[0].size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<Eigen::Index>(rows[r].size()) != x.cols())
          throw Error(ErrorKind::kFormatError, "ragged marginal matrix");
        for (std::size_t c = 0; c < rows[r].size(); ++c)
          x(r, c) = rows[r][c];
      }
      return x;
    };
    Marginals m;
    m.m_v = vec(doc.at("m_v"));
    m.m_e = vec(doc.at("m_e"));
    m.m_ev = mat(doc.at("m_ev"));
    m.m_ve = mat(doc.at("m_ve"));
    if (m.m_e.size() != kNumBondTypes || m.m_ev.rows() != kNumBondTypes ||
        m.m_ev.cols() != m.m_v.size() || m.m_ve.rows() != m.m_v.size() ||
        m.m_ve.cols() != kNumBondTypes)
      throw Error(ErrorKind::kFormatError, "marginal shapes disagree");
    return m;
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kFormatError,
                std::string("malformed marginals: ") + e.what());
  }
}

// --- schedule and transitions ---

double alpha_bar(int t, const Schedule &sched) {
  if (sched.t_max < 1 || t < 0 || t > sched.t_max)
    throw Error(ErrorKind::kOutOfRangeStep,
                "step " + std::to_string(t) + " outside [0, " +
                    std::to_string(sched.t_max) + "]");
  if (t == sched.t_max)
    return 0.0;
  if (t == 0 && sched.s == 0.0)
    return 1.0;
  double x = 0.5 * std::numbers::pi *
             (static_cast<double>(t) / sched.t_max + sched.s) / (1 + sched.s);
  double c = std::cos(x);
  return c * c;
}

double retention(int t, const Schedule &sched) {
  if (t == 0)
    return 1.0;
  return alpha_bar(t, sched) / alpha_bar(0, sched);
}

Eigen::MatrixXd family_matrix(double a, const Eigen::VectorXd &m) {
  const Eigen::Index f = m.size();
  Eigen::MatrixXd q = (1 - a) * Eigen::VectorXd::Ones(f) * m.transpose();
  q.diagonal().array() += a;
  return q;
}

namespace {
// a * (rectangular identity) + (1 - a) * base, rows renormalized. Rows with
// no mass fall back to the base row.
Eigen::MatrixXd cross_block(double a, const Eigen::MatrixXd &base) {
  Eigen::MatrixXd q = (1 - a) * base;
  for (Eigen::Index i = 0; i < std::min(q.rows(), q.cols()); ++i)
    q(i, i) += a;
  for (Eigen::Index r = 0; r < q.rows(); ++r) {
    double s = q.row(r).sum();
    if (s > 0)
      q.row(r) /= s;
    else
      q.row(r) = base.row(r);
  }
  return q;
}
}  // namespace

Eigen::MatrixXd TransitionSet::q_ev() const { return cross_block(alpha, m_ev); }
Eigen::MatrixXd TransitionSet::q_ve() const { return cross_block(alpha, m_ve); }

TransitionSet build_transitions(const Marginals &m, int t,
                                const Schedule &sched) {
  if (t < 1 || t > sched.t_max)
    throw Error(ErrorKind::kOutOfRangeStep,
                "transition step " + std::to_string(t) + " outside [1, " +
                    std::to_string(sched.t_max) + "]");
  TransitionSet ts;
  ts.t = t;
  ts.abar = retention(t, sched);
  ts.abar_prev = retention(t - 1, sched);
  if (ts.abar_prev == 0)
    throw Error(ErrorKind::kScheduleDegeneracy,
                "alpha_bar vanishes at step " + std::to_string(t - 1));
  ts.alpha = ts.abar / ts.abar_prev;
  ts.m_v = m.m_v;
  ts.m_e = m.m_e;
  ts.m_ev = m.m_ev;
  ts.m_ve = m.m_ve;
  return ts;
}

Eigen::MatrixXd assemble_graph_transition(const TransitionSet &ts, int n) {
  if (n < 1)
    throw Error(ErrorKind::kInvalidArgument, "node count must be positive");
  const Eigen::Index f = ts.m_v.size();
  const Eigen::Index e = kNumBondTypes;
  const Eigen::Index dim = f + n * e;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
  g.topLeftCorner(f, f) = ts.q_v();
  g.topRightCorner(f, n * e) =
      Eigen::kroneckerProduct(Eigen::RowVectorXd::Ones(n), ts.q_ve());
  g.bottomLeftCorner(n * e, f) =
      Eigen::kroneckerProduct(Eigen::VectorXd::Ones(n), ts.q_ev());
  g.bottomRightCorner(n * e, n * e) =
      Eigen::kroneckerProduct(Eigen::MatrixXd::Identity(n, n), ts.q_e());
  for (Eigen::Index r = 0; r < dim; ++r)
    g.row(r) /= g.row(r).sum();
  return g;
}

// --- posterior ---

namespace {
const Eigen::VectorXd &axis_marginal(const TransitionSet &ts, Axis axis) {
  return axis == Axis::kMotif ? ts.m_v : ts.m_e;
}

void check_category(int x, Eigen::Index size, const char *what) {
  if (x < 0 || x >= size)
    throw Error(ErrorKind::kInvalidArgument,
                std::string(what) + " category " + std::to_string(x) +
                    " out of range");
}
}  // namespace

Eigen::VectorXd posterior(int xt, int x0, const TransitionSet &ts, Axis axis) {
  const Eigen::VectorXd &m = axis_marginal(ts, axis);
  check_category(xt, m.size(), "x_t");
  check_category(x0, m.size(), "x_0");
  // Column xt of Q_t times row x0 of the cumulative matrix at t - 1.
  Eigen::VectorXd p = (1 - ts.abar_prev) * m;
  p(x0) += ts.abar_prev;
  p *= (1 - ts.alpha) * m(xt);
  p(xt) += ts.alpha * ((1 - ts.abar_prev) * m(xt) + ts.abar_prev * (x0 == xt));
  double z = p.sum();
  if (!(z > 0))
    throw Error(ErrorKind::kZeroMassPosterior,
                "posterior has no mass for x_t=" + std::to_string(xt) +
                    ", x_0=" + std::to_string(x0));
  return p / z;
}

Eigen::VectorXd posterior_mixture(int xt, const Eigen::VectorXd &p_x0,
                                  const TransitionSet &ts, Axis axis) {
  const Eigen::VectorXd &m = axis_marginal(ts, axis);
  check_category(xt, m.size(), "x_t");
  if (p_x0.size() != m.size())
    throw Error(ErrorKind::kShapeMismatch, "x0 distribution has wrong size");
  // Each x0 contributes its normalized posterior; the normalizer is
  // q(x_t | x0) = abar [x0 == xt] + (1 - abar) m[xt].
  const double off = (1 - ts.abar) * m(xt);
  Eigen::VectorXd w(m.size());
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    double z = off + (k == xt ? ts.abar : 0.0);
    w(k) = z > 0 ? p_x0(k) / z : 0.0;
  }
  double wsum = w.sum();
  Eigen::VectorXd r = ts.abar_prev * w + (1 - ts.abar_prev) * wsum * m;
  // Multiply by column xt of Q_t.
  double own = r(xt);
  r *= (1 - ts.alpha) * m(xt);
  r(xt) += ts.alpha * own;
  double z = r.sum();
  if (!(z > 0))
    throw Error(ErrorKind::kZeroMassPosterior,
                "mixed posterior has no mass for x_t=" + std::to_string(xt));
  return r / z;
}

}  // namespace motifdiff
