#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace irsfd::testing {

KroneckerDraw::KroneckerDraw(const Mat& j_cov, const Mat& k_cov)
    : rows_(k_cov.rows()), cols_(j_cov.rows()) {
  const Eigen::Index n = rows_ * cols_;
  Mat kron(n, n);
  for (Eigen::Index a = 0; a < cols_; ++a) {
    for (Eigen::Index b = 0; b < cols_; ++b) {
      kron.block(a * rows_, b * rows_, rows_, rows_) = j_cov(a, b) * k_cov;
    }
  }
  if (kron.norm() == 0.0) {
    zero_ = true;
    return;
  }
  // Semidefinite-safe factor via eigen decomposition.
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(kron));
  const RealVec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  factor_ = es.eigenvectors() * ev.cast<cplx>().asDiagonal();
}

Mat KroneckerDraw::operator()(Rng& rng) const {
  if (zero_) return Mat::Zero(rows_, cols_);
  const Vec g = rng.complex_normal(rows_ * cols_, 1);
  const Vec v = factor_ * g;
  return Eigen::Map<const Mat>(v.data(), rows_, cols_);
}

Mat mc_expect(const Mat& est, const Mat& j_cov, const Mat& k_cov, const Mat& x, bool inner,
              int draws, Rng& rng) {
  const KroneckerDraw draw(j_cov, k_cov);
  Mat acc = Mat::Zero(inner ? est.cols() : est.rows(), inner ? est.cols() : est.rows());
  for (int n = 0; n < draws; ++n) {
    const Mat h = est + draw(rng);
    acc += inner ? Mat(h.adjoint() * x * h) : Mat(h * x * h.adjoint());
  }
  return acc / static_cast<double>(draws);
}

McSigma mc_sigma(const RandomInstance& inst, int draws, Rng& rng) {
  const SystemConfig& c = inst.cfg;
  std::vector<KroneckerDraw> d;
  for (Link l : kAllLinks) d.emplace_back(inst.err[l].j_cov, inst.err[l].k_cov);
  auto idx = [](Link l) { return static_cast<std::size_t>(l); };
  const Mat th = inst.state.theta.vec().asDiagonal();
  const Mat u = inst.state.u_cov(), v = inst.state.v_cov();

  const ChannelEstimates& e = inst.est;
  auto eff = [&](const Mat& a, const Mat& b, const Mat& cc) -> Mat { return a + b * th * cc; };

  Mat rk = Mat::Zero(c.n0, c.n0), rj = Mat::Zero(c.nj, c.nj);
  for (int n = 0; n < draws; ++n) {
    const Mat hk = e.h_k + d[idx(Link::ul_direct)](rng);
    const Mat hj = e.h_j + d[idx(Link::dl_direct)](rng);
    const Mat h0 = e.h_0 + d[idx(Link::self_interf)](rng);
    const Mat hjk = e.h_jk + d[idx(Link::cross)](rng);
    const Mat ht0 = e.h_theta0 + d[idx(Link::bs_to_irs)](rng);
    const Mat h0t = e.h_0theta + d[idx(Link::irs_to_bs)](rng);
    const Mat hjt = e.h_jtheta + d[idx(Link::irs_to_dl)](rng);
    const Mat htk = e.h_thetak + d[idx(Link::ul_to_irs)](rng);
    const Mat bk = eff(hk, h0t, htk), b0 = eff(h0, h0t, ht0);
    const Mat bj = eff(hj, hjt, ht0), bjk = eff(hjk, hjt, htk);
    rk += bk * u * bk.adjoint() + b0 * v * b0.adjoint();
    rj += bj * v * bj.adjoint() + bjk * u * bjk.adjoint();
  }
  const Mat sk = eff(e.h_k, e.h_0theta, e.h_thetak), sj = eff(e.h_j, e.h_jtheta, e.h_theta0);
  McSigma out;
  out.ul = rk / static_cast<double>(draws) - sk * u * sk.adjoint() +
           c.sigma0_sq * Mat::Identity(c.n0, c.n0);
  out.dl = rj / static_cast<double>(draws) - sj * v * sj.adjoint() +
           c.sigmaj_sq * Mat::Identity(c.nj, c.nj);
  return out;
}

double trace_objective(const StzMatrices& m, const Vec& theta) {
  const Mat big = theta.asDiagonal();
  const cplx v = (big.adjoint() * m.z_mat * big * m.t_mat).trace() +
                 (big.adjoint() * m.s_mat.adjoint()).trace() + (big * m.s_mat).trace();
  return v.real();
}

double grid_min_rc2(const StzMatrices& m) {
  auto eval = [&](double a, double b) {
    Vec t(2);
    t << std::polar(1.0, a), std::polar(1.0, b);
    return trace_objective(m, t);
  };
  const int n = 720;
  const double step = 2.0 * std::numbers::pi / n;
  double best = INFINITY, ba = 0.0, bb = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double v = eval(i * step, k * step);
      if (v < best) {
        best = v;
        ba = i * step;
        bb = k * step;
      }
    }
  }
  for (double h = step; h > 1e-12;) {
    bool moved = false;
    for (int da = -1; da <= 1; ++da) {
      for (int db = -1; db <= 1; ++db) {
        const double v = eval(ba + da * h, bb + db * h);
        if (v < best) {
          best = v;
          ba += da * h;
          bb += db * h;
          moved = true;
        }
      }
    }
    if (!moved) h *= 0.5;
  }
  return best;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
}

SystemConfig desk_config() {
  SystemConfig c;
  c.m0 = 8;
  c.n0 = 4;
  c.mk = 3;
  c.nj = 3;
  c.uk = 2;
  c.vj = 2;
  c.irs_rows = 4;
  c.irs_cols = 4;
  return c;
}

}  // namespace irsfd::testing
