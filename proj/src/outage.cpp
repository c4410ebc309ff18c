// SPDX-License-Identifier: Apache-2.0
#include "pinch/outage.hpp"

#include "pinch/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pinch {

namespace {

OutageEstimate finish(std::int64_t hits, std::int64_t n, std::uint64_t seed) {
  OutageEstimate e;
  e.n = n;
  e.seed = seed;
  e.p_hat = static_cast<double>(hits) / static_cast<double>(n);
  e.std_err = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(n));
  return e;
}

}  // namespace

double accumulated_snr(const Eigen::VectorXd& q, const Eigen::VectorXcd& sigma) {
  if (q.size() != sigma.size()) throw std::invalid_argument("accumulated_snr: length mismatch");
  return (q.array() * sigma.array().abs2()).sum();
}

OutageEstimate mc_outage(const Eigen::VectorXd& q, const RcsModel& model, double gamma_th, std::int64_t n,
                         std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("mc_outage: n must be >= 1");
  if (q.size() != model.size()) throw std::invalid_argument("mc_outage: length mismatch");
  std::vector<std::int64_t> hits(thread_count(), 0);
  parallel_chunks(n, [&](std::int64_t lo, std::int64_t hi, int w) {
    std::int64_t h = 0;
    for (std::int64_t i = lo; i < hi; ++i)
      if (accumulated_snr(q, draw_rcs(model, seed, static_cast<std::uint64_t>(i))) < gamma_th) ++h;
    hits[w] += h;
  });
  std::int64_t total = 0;
  for (auto h : hits) total += h;
  return finish(total, n, seed);
}

RcsPowerSamples draw_power_samples(const RcsModel& model, std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("draw_power_samples: n must be >= 1");
  RcsPowerSamples s;
  s.seed = seed;
  s.power.resize(n, model.size());
  parallel_chunks(n, [&](std::int64_t lo, std::int64_t hi, int) {
    for (std::int64_t i = lo; i < hi; ++i)
      s.power.row(i) = draw_rcs(model, seed, static_cast<std::uint64_t>(i)).cwiseAbs2().transpose();
  });
  return s;
}

OutageEstimate mc_outage(const Eigen::VectorXd& q, const RcsPowerSamples& samples, double gamma_th) {
  if (q.size() != samples.power.cols()) throw std::invalid_argument("mc_outage: length mismatch");
  const Eigen::VectorXd snr = samples.power * q;
  const std::int64_t hits = (snr.array() < gamma_th).count();
  return finish(hits, samples.power.rows(), samples.seed);
}

double chernoff_value(const Eigen::VectorXd& q, const Eigen::MatrixXd& cov, double gamma_th, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("chernoff_value: s must be > 0");
  const Eigen::VectorXd d = q.cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd a = s * (d.asDiagonal() * cov * d.asDiagonal());
  a.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw std::runtime_error("chernoff_value: factorization failed");
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return s * gamma_th - logdet;
}

double chernoff_value(const Eigen::VectorXd& q, const RcsModel& model, double gamma_th, double s) {
  return chernoff_value(q, model.covariance, gamma_th, s);
}

ChernoffResult chernoff_bound(const Eigen::VectorXd& q, const RcsModel& model, double gamma_th,
                              const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("chernoff_bound: empty grid");
  std::vector<double> g(grid);
  std::sort(g.begin(), g.end());
  auto f = [&](double s) { return chernoff_value(q, model, gamma_th, s); };
  std::size_t best = 0;
  double fbest = f(g[0]);
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double v = f(g[i]);
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  ChernoffResult r{g[best], std::exp(fbest), fbest};
  if (g.size() == 1) return r;
  double a = g[best > 0 ? best - 1 : 0];
  double b = g[std::min(best + 1, g.size() - 1)];
  // Golden-section on the bracket; the objective is convex in s.
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * b; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  const double s = fc <= fd ? c : d;
  const double v = std::min(fc, fd);
  if (v < r.log_bound) r = {s, std::exp(v), v};
  return r;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (n < 1 || !(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("log_grid: bad range");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1));
  return g;
}

std::vector<double> default_s_grid(double gamma_th, int n) { return log_grid(1e-3 / gamma_th, 1e3 / gamma_th, n); }

}  // namespace pinch
