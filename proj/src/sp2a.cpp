// SPDX-License-Identifier: Apache-2.0
#include "pinch/sp2a.hpp"

#include "pinch/outage.hpp"
#include "pinch/sp1.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace pinch {

using conic::Affine;
using cd = std::complex<double>;

SlotBeam consistent_beam(const ScenarioConfig& cfg, int slot, int cluster, const Eigen::VectorXd& x, int user) {
  const int N = static_cast<int>(x.size());
  const double k = 2.0 * kPi / cfg.wavelength(), kg = 2.0 * kPi / cfg.guided_wavelength();
  SlotBeam b;
  b.slot = slot;
  b.cluster = cluster;
  b.x = x;
  b.c.resize(N);
  for (int n = 0; n < N; ++n) b.c[n] = cfg.eta() * std::exp(-cfg.attenuation * std::abs(x[n] - cfg.feed_point));
  std::vector<std::pair<Point2, int>> who{{cfg.target_position, -1}};
  if (user >= 0) who.emplace_back(cfg.user_positions.at(user), user);
  for (const auto& [pos, k_user] : who) {
    NodeBeam nb;
    nb.pos = pos;
    nb.user = k_user;
    Eigen::VectorXd f(N);
    Eigen::VectorXcd a(N);
    nb.theta.resize(N);
    for (int n = 0; n < N; ++n) {
      const double dx = x[n] - pos.x;
      const double d = std::sqrt(dx * dx + pos.y * pos.y + cfg.height * cfg.height);
      f[n] = 1.0 / d;
      nb.theta[n] = k * d + kg * std::abs(x[n] - cfg.feed_point);
      a[n] = std::polar(1.0, -nb.theta[n]);
    }
    nb.F = f * f.transpose();
    nb.A = a * a.adjoint();
    b.nodes.push_back(std::move(nb));
  }
  return b;
}

double PhaseMajorizer::operator()(const Eigen::Vector3d& v) const {
  const Eigen::Vector3d d = v - point;
  return value + grad.dot(d) + 0.5 * (lipschitz.array() * d.array().square()).sum();
}

double phase_penalty(const Eigen::Vector3d& v) {
  const double r = v[0] - std::cos(v[2]), i = v[1] + std::sin(v[2]);
  return r * r + i * i;
}

Eigen::Vector3d phase_penalty_gradient(const Eigen::Vector3d& v) {
  const double c = std::cos(v[2]), s = std::sin(v[2]);
  const double r = v[0] - c, i = v[1] + s;
  return {2.0 * r, 2.0 * i, 2.0 * r * s + 2.0 * i * c};
}

double NodeSurrogates::frob_lin(const Eigen::MatrixXd& F, const Eigen::MatrixXcd& A, const Eigen::VectorXd& c) const {
  const Eigen::MatrixXcd Snew = F.cast<cd>() + c.asDiagonal() * A * c.asDiagonal();
  return S.squaredNorm() + 2.0 * (S.conjugate().cwiseProduct(Snew - S)).sum().real();
}

namespace {

template <class Mat>
auto principal(const Mat& Y) {
  Eigen::SelfAdjointEigenSolver<Mat> es(Y);
  const int n = static_cast<int>(Y.rows());
  return std::make_pair(es.eigenvalues()[n - 1], es.eigenvectors().col(n - 1).eval());
}

}  // namespace

Surrogates mm_surrogates(const ScenarioConfig& cfg, const SlotBeam& beam, const Eigen::Vector3d& lipschitz) {
  const int N = static_cast<int>(beam.x.size());
  const double k = 2.0 * kPi / cfg.wavelength();
  Surrogates out;
  for (const auto& nb : beam.nodes) {
    NodeSurrogates ns;
    for (int n = 0; n < N; ++n) {
      const double dx = beam.x[n] - nb.pos.x;
      ns.x_aff.push_back({beam.x[n], dx * dx, 2.0 * dx});
      const double z = nb.F(n, n);
      ns.z_aff.push_back({z, 1.0 / z, -1.0 / (z * z)});
      ns.zbar_aff.push_back({z, k / std::sqrt(z), -0.5 * k * std::pow(z, -1.5)});
    }
    ns.S = nb.F.cast<cd>() + beam.c.asDiagonal() * nb.A * beam.c.asDiagonal();
    ns.f_vec = principal(nb.F).second;
    ns.a_vec = principal(nb.A).second;
    for (int i = 1; i < N; ++i) {
      PhaseMajorizer pm;
      pm.point = {nb.A(i, 0).real(), nb.A(i, 0).imag(), nb.theta[i] - nb.theta[0]};
      pm.value = phase_penalty(pm.point);
      pm.grad = phase_penalty_gradient(pm.point);
      pm.lipschitz = lipschitz;
      ns.phase.push_back(pm);
    }
    out.nodes.push_back(std::move(ns));
  }
  return out;
}

Eigen::MatrixXcd rank_one_projection(const Eigen::MatrixXcd& Y, double* residual) {
  const auto [lam, v] = principal(Y);
  const double tr = Y.trace().real();
  if (residual) *residual = tr > 0.0 ? 1.0 - lam / tr : 0.0;
  return tr * v * v.adjoint();
}

Eigen::MatrixXd rank_one_projection(const Eigen::MatrixXd& Y, double* residual) {
  const auto [lam, v] = principal(Y);
  const double tr = Y.trace();
  if (residual) *residual = tr > 0.0 ? 1.0 - lam / tr : 0.0;
  return tr * v * v.transpose();
}

namespace {

double snr_scale(const ScenarioConfig& cfg, SnrCoefficient c) {
  const double N = cfg.antennas_per_cluster;
  const double base = cfg.transmit_power / cfg.noise_power;
  switch (c) {
    case SnrCoefficient::consistent: return base / N;
    case SnrCoefficient::derivation: return base;
    case SnrCoefficient::printed: return 2.0 * base / N;
  }
  return base / N;
}

}  // namespace

Sp2aProgram build_sp2a(const ScenarioConfig& cfg, const SlotBeam& beam, const SlotContext& ctx,
                       const RcsModel& model, double s, double rho1, const Sp2aOptions& opt) {
  const int N = static_cast<int>(beam.x.size());
  const int M = model.size();
  const double lam = cfg.wavelength();
  const double k = 2.0 * kPi / lam, kg = 2.0 * kPi / cfg.guided_wavelength();
  const double eta = cfg.eta();
  const double lo = cfg.aperture_lo(beam.cluster), hi = cfg.aperture_hi(beam.cluster);
  const Eigen::VectorXd& x = beam.x;

  Sp2aProgram sp;
  auto& prog = sp.program;
  std::vector<std::pair<int, double>> point;  // (variable, value) at the expansion point

  for (int n = 0; n < N; ++n) {
    sp.xi.push_back(prog.add_variable((lo - x[n]) / lam, (hi - x[n]) / lam, "xi"));
    point.emplace_back(sp.xi.back(), 0.0);
  }
  for (int n = 0; n + 1 < N; ++n)
    prog.add_nonneg(lam * (prog.var(sp.xi[n + 1]) - prog.var(sp.xi[n])) + (x[n + 1] - x[n] - cfg.min_spacing));

  const Eigen::VectorXd chat = beam.c / eta;
  Affine penalty;
  std::vector<Affine> q(M);
  for (int m = 0; m < M; ++m) q[m] = Affine(ctx.q_rest[m]);
  std::vector<double> gl(beam.nodes.size());

  for (std::size_t o = 0; o < beam.nodes.size(); ++o) {
    const NodeBeam& nb = beam.nodes[o];
    const double phi = nb.F.diagonal().mean();
    const Eigen::MatrixXd Fh = nb.F / phi;
    const Eigen::MatrixXcd Sl = Fh.cast<cd>() + chat.asDiagonal() * nb.A * chat.asDiagonal();
    const double Gl = (chat.asDiagonal() * Fh * chat.asDiagonal()).cwiseProduct(nb.A.real()).sum();
    gl[o] = Gl;
    sp.phi.push_back(phi);
    sp.gain_scale.push_back(eta * eta * phi);

    auto F = prog.add_symmetric_psd(N, "F");
    auto A = prog.add_hermitian_psd(N, "A");
    for (int i = 0; i < N; ++i)
      for (int j = 0; j <= i; ++j) {
        point.emplace_back(F(i, j).terms[0].var, Fh(i, j));
        point.emplace_back(A.real(i, j).terms[0].var, nb.A(i, j).real());
        if (i != j) point.emplace_back(A.imag(i, j).terms[0].var, nb.A(i, j).imag());
      }
    for (int i = 0; i < N; ++i) prog.add_equality(A.real(i, i) - 1.0);

    // Frobenius split of the bilinear gain with the norm of F + C A C linearized.
    const int g = prog.add_variable(0.0, HUGE_VAL, "g");
    point.emplace_back(g, Gl);
    Affine lin(-Sl.squaredNorm());
    std::vector<Affine> rows;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const double cc = chat[i] * chat[j];
        lin += 2.0 * (Sl(i, j).real() * (F(i, j) + cc * A.real(i, j)) + Sl(i, j).imag() * cc * A.imag(i, j));
        rows.push_back(F(i, j));
        rows.push_back(cc * A.real(i, j));
        if (i != j) rows.push_back(cc * A.imag(i, j));
      }
    Affine att;
    if (opt.attenuation_term)
      for (int n = 0; n < N; ++n) {
        double dG = 0.0;
        for (int j = 0; j < N; ++j) dG += chat[n] * chat[j] * Fh(n, j) * nb.A(n, j).real();
        att += Affine::var(sp.xi[n], -2.0 * cfg.attenuation * dG * lam);
      }
    prog.add_rsoc(0.5, lin - 2.0 * prog.var(g) + 2.0 * att, rows);
    sp.g.push_back(g);
    sp.F.push_back(F);
    sp.A.push_back(A);

    // Rank penalties with the spectral norm linearized at the principal eigenvector.
    const auto fv = principal(Fh).second;
    const auto av = principal(nb.A).second;
    for (int i = 0; i < N; ++i) {
      penalty += rho1 * F(i, i);
      for (int j = 0; j < N; ++j) {
        penalty -= rho1 * fv[i] * fv[j] * F(i, j);
        const cd w = std::conj(av[i]) * av[j];
        penalty -= rho1 * (w.real() * A.real(i, j) - w.imag() * A.imag(i, j));
      }
    }
    penalty += rho1 * N;

    // Distance and phase couplings per antenna.
    std::vector<int> dth;
    const double sh = nb.pos.y * nb.pos.y + cfg.height * cfg.height;
    for (int n = 0; n < N; ++n) {
      const double D = 1.0 / nb.F(n, n);
      const double r = phi * D;
      const double dx = x[n] - nb.pos.x;
      const Affine xi = prog.var(sp.xi[n]);
      const Affine zr = r * F(n, n);  // z / z_l
      prog.add_rsoc(0.5, 2.0 - zr - sh / D, {(dx + lam * xi) * (1.0 / std::sqrt(D))});
      const int s10 = prog.add_variable(0.0, HUGE_VAL, "s10");
      point.emplace_back(s10, 0.0);
      prog.add_rsoc(zr, (sh + dx * dx + 2.0 * dx * lam * xi) * (1.0 / D) + prog.var(s10), {Affine(std::sqrt(2.0))});
      const int w = prog.add_variable("w");
      point.emplace_back(w, 1.0);
      prog.add_power(prog.var(w), zr, 1.0, 2.0 / 3.0);
      const int dt = prog.add_variable("dtheta");
      point.emplace_back(dt, 0.0);
      const double kd = k * std::sqrt(D);
      prog.add_leq(kd * (prog.var(w) - 1.0) + kg * lam * xi, prog.var(dt));
      const int s12 = prog.add_variable(0.0, HUGE_VAL, "s12");
      point.emplace_back(s12, 0.0);
      prog.add_leq(prog.var(dt), -0.5 * kd * (zr - 1.0) + kg * lam * xi + prog.var(s12));
      penalty += opt.slack_weight * (prog.var(s10) + prog.var(s12));
      dth.push_back(dt);
    }
    // Quadratic majorizer of the phase-consistency penalty, first column entries.
    for (int i = 1; i < N; ++i) {
      PhaseMajorizer pm;
      pm.point = {nb.A(i, 0).real(), nb.A(i, 0).imag(), nb.theta[i] - nb.theta[0]};
      pm.value = phase_penalty(pm.point);
      pm.grad = phase_penalty_gradient(pm.point);
      const Affine d0 = A.real(i, 0) - pm.point[0];
      const Affine d1 = A.imag(i, 0) - pm.point[1];
      const Affine d2 = prog.var(dth[i]) - prog.var(dth[0]);
      const int t = prog.add_variable("phase");
      point.emplace_back(t, pm.value);
      const auto& L = opt.phase_lipschitz;
      prog.add_rsoc(0.5, prog.var(t) - pm.value - pm.grad[0] * d0 - pm.grad[1] * d1 - pm.grad[2] * d2,
                    {std::sqrt(0.5 * L[0]) * d0, std::sqrt(0.5 * L[1]) * d1, std::sqrt(0.5 * L[2]) * d2});
      penalty += rho1 * prog.var(t);
    }
    sp.dtheta.push_back(dth);

    if (o == 0) {
      const double scale = psi_gain(cfg) * ctx.weight * eta * eta * phi / N;
      q[beam.cluster] += scale * prog.var(g);
    } else {
      const double gamma_l = cfg.transmit_power / cfg.noise_power * eta * eta * phi * Gl / N;
      sp.rho = prog.add_variable(0.0, HUGE_VAL, "rho");
      point.emplace_back(sp.rho, 1.0);
      prog.add_leq(gamma_l * prog.var(sp.rho), snr_scale(cfg, opt.snr_coefficient) * eta * eta * phi * prog.var(g));
      if (ctx.rate_floor > 0.0 && ctx.weight > 0.0)
        prog.add_exp(Affine(ctx.rate_floor * std::log(2.0) / ctx.weight), Affine(1.0),
                     1.0 + gamma_l * prog.var(sp.rho));
    }
  }

  prog.minimize(penalty);
  prog.add_smooth_objective(chernoff_term(model, cfg.snr_threshold, s, q, prog.num_variables()));

  sp.expansion = Eigen::VectorXd::Zero(prog.num_variables());
  for (const auto& [v, val] : point) sp.expansion[v] = val;
  double f = 0.0;
  prog.smooth_objective()(sp.expansion, f, nullptr, nullptr);
  sp.surrogate_at_point = f + penalty.eval(sp.expansion);
  return sp;
}

double schedule_objective(const ScenarioConfig& cfg, const Schedule& sched, const RcsModel& model, double s) {
  return chernoff_value(schedule_weights(cfg, sched).q, model, cfg.snr_threshold, s);
}

BeamState initial_beam_state(const ScenarioConfig& cfg, const Schedule& sched, const Sp2aOptions& opt) {
  BeamState st;
  st.rho1 = opt.rho1_start;
  const auto act = active_clusters(sched.b);
  for (int t = 0; t < static_cast<int>(act.size()); ++t) {
    const int user = cfg.rate_min > 0.0 ? served_user(sched.u, t) : -1;
    st.slots.push_back(consistent_beam(cfg, t, act[t], sched.layouts.at(t).clusters.at(act[t]), user));
  }
  return st;
}

namespace {

// Clip into the aperture and restore the minimum spacing exactly.
Eigen::VectorXd repair_positions(const ScenarioConfig& cfg, int m, Eigen::VectorXd x) {
  const double lo = cfg.aperture_lo(m), hi = cfg.aperture_hi(m), d = cfg.min_spacing;
  const int N = static_cast<int>(x.size());
  for (int n = 0; n < N; ++n) x[n] = std::clamp(x[n], lo + n * d, hi - (N - 1 - n) * d);
  for (int n = 1; n < N; ++n) x[n] = std::max(x[n], x[n - 1] + d);
  for (int n = N - 2; n >= 0; --n) x[n] = std::min(x[n], x[n + 1] - d);
  return x;
}

}  // namespace

Eigen::VectorXd polish_positions(const ScenarioConfig& cfg, int m, Eigen::VectorXd x, int user, double snr_floor,
                                 int sweeps, double resolution) {
  const int N = static_cast<int>(x.size());
  const double lo = cfg.aperture_lo(m), hi = cfg.aperture_hi(m), dmin = cfg.min_spacing;
  const double h = resolution * cfg.wavelength();
  const Point2 tgt = cfg.target_position;
  const Point2 usr = user >= 0 ? cfg.user_positions.at(user) : Point2{};
  const double snr_scale = cfg.transmit_power / cfg.noise_power;
  const double k = 2.0 * kPi / cfg.wavelength(), kg = 2.0 * kPi / cfg.guided_wavelength();
  auto term = [&](double xn, Point2 node) {
    const double dx = xn - node.x, l = std::abs(xn - cfg.feed_point);
    const double d = std::sqrt(dx * dx + node.y * node.y + cfg.height * cfg.height);
    return std::polar(cfg.eta() * std::exp(-cfg.attenuation * l) / (d * std::sqrt(double(N))), -(kg * l + k * d));
  };
  // Grid scan of [a, b] at step h followed by golden-section refinement around the best cell.
  auto maximize = [&](double a, double b, double start, auto&& value) {
    double best_v = start, best = value(start);
    const int steps = static_cast<int>(std::floor((b - a) / h));
    for (int i = 0; i <= steps + 1; ++i) {
      const double v = std::min(a + i * h, b);
      const double f = value(v);
      if (f > best) best = f, best_v = v;
    }
    double l = std::max(a, best_v - h), r = std::min(b, best_v + h);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c1 = r - g * (r - l), c2 = l + g * (r - l);
    double f1 = value(c1), f2 = value(c2);
    for (int it = 0; it < 40; ++it) {
      if (f1 > f2) {
        r = c2, c2 = c1, f2 = f1, c1 = r - g * (r - l), f1 = value(c1);
      } else {
        l = c1, c1 = c2, f1 = f2, c2 = l + g * (r - l), f2 = value(c2);
      }
    }
    if (f1 > best) best = f1, best_v = c1;
    if (f2 > best) best = f2, best_v = c2;
    return best_v;
  };
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    bool moved = false;
    for (int n = 0; n < N; ++n) {
      cd rest_e = 0.0, rest_k = 0.0;
      for (int j = 0; j < N; ++j)
        if (j != n) {
          rest_e += term(x[j], tgt);
          if (user >= 0) rest_k += term(x[j], usr);
        }
      auto value = [&](double v) {
        if (user >= 0 && snr_scale * std::norm(rest_k + term(v, usr)) < snr_floor) return -1.0;
        return std::norm(rest_e + term(v, tgt));
      };
      const double a = n > 0 ? std::max(lo, x[n - 1] + dmin) : lo;
      const double b = n + 1 < N ? std::min(hi, x[n + 1] - dmin) : hi;
      if (b < a) continue;
      const double v = maximize(a, b, x[n], value);
      moved = moved || std::abs(v - x[n]) > 1e-12;
      x[n] = v;
    }
    // Rigid shift of the whole cluster keeps the relative phases and can trade attenuation for path loss,
    // a direction single-coordinate moves cannot follow.
    if (N > 1) {
      auto value = [&](double dv) {
        cd e = 0.0, u = 0.0;
        for (int j = 0; j < N; ++j) {
          e += term(x[j] + dv, tgt);
          if (user >= 0) u += term(x[j] + dv, usr);
        }
        if (user >= 0 && snr_scale * std::norm(u) < snr_floor) return -1.0;
        return std::norm(e);
      };
      const double a = std::min(lo - x[0], 0.0), b = std::max(hi - x[N - 1], 0.0);
      {
        const double dv = maximize(a, b, 0.0, value);
        if (std::abs(dv) > 1e-12) {
          x.array() += dv;
          moved = true;
        }
      }
    }
    if (!moved) break;
  }
  return x;
}

Sp2aResult step_sp2a(const ScenarioConfig& cfg, const Schedule& sched, const RcsModel& model, double s,
                     const BeamState& state, const Sp2aOptions& opt) {
  const int T = static_cast<int>(sched.tau.size());
  const auto act = active_clusters(sched.b);
  Schedule cur = sched;
  Sp2aResult res;
  res.state = state;
  double F_cur = schedule_objective(cfg, cur, model, s);
  double worst_phase = 0.0;

  for (int t = 0; t < T; ++t) {
    const int m = act[t];
    const double w = cur.tau[t] / cfg.total_time;
    if (w <= 0.0) continue;
    const int user = cfg.rate_min > 0.0 ? served_user(cur.u, t) : -1;
    const Eigen::VectorXd xl = cur.layouts[t].clusters[m];
    SlotBeam beam = consistent_beam(cfg, t, m, xl, user);

    SlotContext ctx;
    ctx.weight = w;
    ctx.q_rest = schedule_weights(cfg, cur).q;
    ctx.q_rest[m] -= psi_gain(cfg) * w * sensing_gain(cfg, xl);
    ctx.q_rest[m] = std::max(ctx.q_rest[m], 0.0);
    Eigen::VectorXd rates;
    if (user >= 0) {
      rates = user_rates(cfg, cur);
      const double r_t = w * std::log2(1.0 + comm_snr(cfg, xl, user));
      ctx.rate_floor = rates[user] >= cfg.rate_min && rates[user] > 0.0 ? r_t * cfg.rate_min / rates[user] : r_t;
    }

    Sp2aSlotReport rep;
    rep.slot = t;
    rep.objective_before = F_cur;
    rep.objective_after = F_cur;
    const Sp2aProgram sp = build_sp2a(cfg, beam, ctx, model, s, res.state.rho1, opt);
    rep.surrogate_before = sp.surrogate_at_point;
    const conic::Solution sol = conic::solve(sp.program, opt.solver);
    rep.status = sol.status;
    rep.diagnostics = sol.diagnostics;
    rep.surrogate_after = sol.ok() ? sol.objective : rep.surrogate_before;
    if (sol.ok()) {
      // Consistency diagnostics of the relaxed solution.
      for (std::size_t o = 0; o < beam.nodes.size(); ++o) {
        const int N = static_cast<int>(xl.size());
        Eigen::MatrixXcd Av(N, N);
        Eigen::MatrixXd Fv(N, N);
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) {
            Fv(i, j) = sol.value(sp.F[o](i, j));
            Av(i, j) = cd(sol.value(sp.A[o].real(i, j)), sol.value(sp.A[o].imag(i, j)));
          }
        double ra = 0.0, rf = 0.0;
        rank_one_projection(Av, &ra);
        rank_one_projection(Fv, &rf);
        rep.rank_residual = std::max({rep.rank_residual, ra, rf});
        for (int i = 1; i < N; ++i) {
          const double th = beam.nodes[o].theta[i] - beam.nodes[o].theta[0] + sol.value(sp.dtheta[o][i]) -
                            sol.value(sp.dtheta[o][0]);
          rep.phase_residual = std::max(rep.phase_residual, phase_penalty({Av(i, 0).real(), Av(i, 0).imag(), th}));
        }
      }
      if (rep.rank_residual > opt.projection_warning) {
        std::ostringstream os;
        os << "slot " << t << ": rank-one projection residual " << rep.rank_residual;
        res.state.warnings.push_back(os.str());
      }
      worst_phase = std::max(worst_phase, rep.phase_residual);

      Eigen::VectorXd xs = xl;
      for (int n = 0; n < xl.size(); ++n) xs[n] += cfg.wavelength() * sol.value(sp.xi[n]);
      for (double beta : opt.line_search) {
        Schedule trial = cur;
        trial.layouts[t].clusters[m] = repair_positions(cfg, m, xl + beta * (xs - xl));
        const double F_new = schedule_objective(cfg, trial, model, s);
        if (!(F_new < F_cur - 1e-12 * std::abs(F_cur))) continue;
        if (user >= 0) {
          const Eigen::VectorXd r_new = user_rates(cfg, trial);
          const double need = std::min(cfg.rate_min, rates[user]);
          if (r_new[user] < need - 1e-12) continue;
        }
        cur = trial;
        F_cur = F_new;
        rep.step = beta;
        rep.objective_after = F_new;
        break;
      }
    }
    rep.objective_mm = F_cur;

    if (opt.polish) {
      double floor = 0.0;
      if (user >= 0) {
        const double need = std::min(cfg.rate_min, rates[user]);
        const double own = w * std::log2(1.0 + comm_snr(cfg, cur.layouts[t].clusters[m], user));
        const double other = user_rates(cfg, cur)[user] - own;
        floor = std::exp2((need - other) / w) - 1.0;
      }
      Schedule trial = cur;
      trial.layouts[t].clusters[m] =
          polish_positions(cfg, m, cur.layouts[t].clusters[m], user, floor, opt.polish_sweeps, opt.polish_resolution);
      const double F_new = schedule_objective(cfg, trial, model, s);
      bool ok = F_new < F_cur;
      if (ok && user >= 0) ok = user_rates(cfg, trial)[user] >= std::min(cfg.rate_min, rates[user]) - 1e-12;
      if (ok) {
        cur = trial;
        F_cur = F_new;
        rep.objective_after = F_new;
      }
    }
    res.state.slots.at(t) = consistent_beam(cfg, t, m, cur.layouts[t].clusters[m], user);
    res.slots.push_back(rep);
  }

  // Clusters idle in a slot carry no weight, so moving them leaves F unchanged; co-phasing them toward the
  // target lets the next cluster-selection step compare every cluster at its best.
  if (opt.polish && opt.polish_inactive)
    for (int t = 0; t < T; ++t)
      for (int m = 0; m < cfg.num_clusters; ++m) {
        if (m == act[t]) continue;
        auto& x = cur.layouts[t].clusters[m];
        x = polish_positions(cfg, m, x, -1, 0.0, opt.polish_sweeps, opt.polish_resolution);
      }

  if (worst_phase > opt.phase_tol &&
      (res.state.last_phase_residual < 0.0 || worst_phase > 0.9 * res.state.last_phase_residual))
    res.state.rho1 = std::min(res.state.rho1 * opt.rho1_growth, opt.rho1_max);
  res.state.last_phase_residual = worst_phase;
  res.layouts = cur.layouts;
  res.objective = F_cur;
  return res;
}

}  // namespace pinch
