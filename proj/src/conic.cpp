// SPDX-License-Identifier: Apache-2.0
#include "pinch/conic.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pinch::conic {

Affine& Affine::operator+=(const Affine& o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  constant += o.constant;
  return *this;
}

Affine& Affine::operator-=(const Affine& o) {
  for (const auto& t : o.terms) terms.push_back({t.var, -t.coef});
  constant -= o.constant;
  return *this;
}

Affine& Affine::operator*=(double k) {
  for (auto& t : terms) t.coef *= k;
  constant *= k;
  return *this;
}

double Affine::eval(const Eigen::VectorXd& x) const {
  double v = constant;
  for (const auto& t : terms) v += t.coef * x[t.var];
  return v;
}

Affine operator+(Affine a, const Affine& b) { return a += b; }
Affine operator-(Affine a, const Affine& b) { return a -= b; }
Affine operator-(Affine a) { return a *= -1.0; }
Affine operator*(Affine a, double k) { return a *= k; }
Affine operator*(double k, Affine a) { return a *= k; }

const char* to_string(ConeKind kind) {
  switch (kind) {
    case ConeKind::nonneg: return "nonneg";
    case ConeKind::soc: return "soc";
    case ConeKind::rsoc: return "rsoc";
    case ConeKind::power: return "power";
    case ConeKind::exp: return "exp";
    case ConeKind::psd: return "psd";
  }
  return "?";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::near_optimal: return "near_optimal";
    case Status::infeasible: return "infeasible";
    case Status::numerical_failure: return "numerical_failure";
  }
  return "?";
}

namespace {
int packed(int i, int j) {
  if (i < j) std::swap(i, j);
  return i * (i + 1) / 2 + j;
}
}  // namespace

Affine SymmetricVar::operator()(int i, int j) const { return Affine::var(idx.at(packed(i, j))); }

Affine HermitianVar::real(int i, int j) const { return Affine::var(re.at(packed(i, j))); }

Affine HermitianVar::imag(int i, int j) const {
  if (i == j) return Affine();
  if (i > j) return Affine::var(im.at(i * (i - 1) / 2 + j));
  return Affine::var(im.at(j * (j - 1) / 2 + i), -1.0);
}

int Program::add_variable(const std::string& name) {
  names_.push_back(name.empty() ? "x" + std::to_string(names_.size()) : name);
  return static_cast<int>(names_.size()) - 1;
}

int Program::add_variable(double lo, double hi, const std::string& name) {
  const int v = add_variable(name);
  add_bounds(v, lo, hi);
  return v;
}

void Program::add_bounds(int v, double lo, double hi) {
  if (std::isfinite(lo)) add_nonneg(var(v) - lo);
  if (std::isfinite(hi)) add_nonneg(hi - var(v));
}

void Program::check(const Affine& a) const {
  for (const auto& t : a.terms)
    if (t.var < 0 || t.var >= num_variables()) throw std::invalid_argument("conic: undeclared variable");
  if (!std::isfinite(a.constant)) throw std::invalid_argument("conic: non-finite constant");
  for (const auto& t : a.terms)
    if (!std::isfinite(t.coef)) throw std::invalid_argument("conic: non-finite coefficient");
}

void Program::add_equality(const Affine& e) {
  check(e);
  equalities_.push_back(e);
}

void Program::add_nonneg(const Affine& e) {
  check(e);
  cones_.push_back({ConeKind::nonneg, {e}});
}

void Program::add_soc(const Affine& t, const std::vector<Affine>& x) {
  Cone c{ConeKind::soc, {t}};
  c.rows.insert(c.rows.end(), x.begin(), x.end());
  for (const auto& r : c.rows) check(r);
  cones_.push_back(std::move(c));
}

void Program::add_rsoc(const Affine& u, const Affine& v, const std::vector<Affine>& x) {
  Cone c{ConeKind::rsoc, {u, v}};
  c.rows.insert(c.rows.end(), x.begin(), x.end());
  for (const auto& r : c.rows) check(r);
  cones_.push_back(std::move(c));
}

void Program::add_power(const Affine& x, const Affine& y, const Affine& z, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("conic: power cone alpha must lie in (0, 1)");
  Cone c{ConeKind::power, {x, y, z}, alpha};
  for (const auto& r : c.rows) check(r);
  cones_.push_back(std::move(c));
}

void Program::add_exp(const Affine& x, const Affine& y, const Affine& z) {
  Cone c{ConeKind::exp, {x, y, z}};
  for (const auto& r : c.rows) check(r);
  cones_.push_back(std::move(c));
}

void Program::add_psd(int n, const std::vector<Affine>& lower) {
  if (n < 1 || static_cast<int>(lower.size()) != n * (n + 1) / 2)
    throw std::invalid_argument("conic: PSD block needs n(n+1)/2 entries");
  for (const auto& r : lower) check(r);
  Cone c{ConeKind::psd, lower};
  c.n = n;
  cones_.push_back(std::move(c));
}

SymmetricVar Program::add_symmetric_psd(int n, const std::string& name) {
  SymmetricVar s;
  s.n = n;
  std::vector<Affine> lower;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      s.idx.push_back(add_variable(name + "[" + std::to_string(i) + "," + std::to_string(j) + "]"));
      lower.push_back(var(s.idx.back()));
    }
  add_psd(n, lower);
  return s;
}

HermitianVar Program::add_hermitian_psd(int n, const std::string& name) {
  HermitianVar h;
  h.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      h.re.push_back(add_variable(name + ".re[" + std::to_string(i) + "," + std::to_string(j) + "]"));
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j)
      h.im.push_back(add_variable(name + ".im[" + std::to_string(i) + "," + std::to_string(j) + "]"));
  std::vector<Affine> lower;
  for (int a = 0; a < 2 * n; ++a)
    for (int b = 0; b <= a; ++b) {
      if (a < n) {
        lower.push_back(h.real(a, b));
      } else if (b >= n) {
        lower.push_back(h.real(a - n, b - n));
      } else {
        lower.push_back(h.imag(a - n, b));
      }
    }
  add_psd(2 * n, lower);
  return h;
}

namespace {
nlohmann::json affine_json(const Affine& a) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : a.terms) terms.push_back({t.var, t.coef});
  return {{"terms", terms}, {"constant", a.constant}};
}
}  // namespace

nlohmann::json Program::to_json() const {
  nlohmann::json j;
  j["format"] = "pinch-conic-1";
  j["variables"] = names_;
  j["minimize"] = affine_json(objective_);
  nlohmann::json eq = nlohmann::json::array();
  for (const auto& e : equalities_) eq.push_back(affine_json(e));
  j["equalities"] = eq;
  nlohmann::json cones = nlohmann::json::array();
  for (const auto& c : cones_) {
    nlohmann::json cj;
    cj["kind"] = to_string(c.kind);
    if (c.kind == ConeKind::power) cj["alpha"] = c.alpha;
    if (c.kind == ConeKind::psd) cj["n"] = c.n;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : c.rows) rows.push_back(affine_json(r));
    cj["rows"] = rows;
    cones.push_back(cj);
  }
  j["cones"] = cones;
  return j;
}

// ---------------------------------------------------------------------------
// Barrier machinery. Rows are ordered: all nonnegative rows first, then blocks.

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Block {
  ConeKind kind;
  int off;
  int dim;
  double alpha;
  int n;
};

struct Reduced {
  MatrixXd G;  // rows x nz
  VectorXd h;
  VectorXd c;
  double c0 = 0.0;
  int n_nonneg = 0;
  std::vector<Block> blocks;
  VectorXd e;  // interior direction per row
  double nu = 0.0;
  // Optional smooth term in the original coordinates x = xp + N z.
  SmoothTerm smooth;
  MatrixXd N;
  VectorXd xp;

  bool smooth_eval(const VectorXd& z, double& f, VectorXd* g, MatrixXd* H) const {
    f = 0.0;
    if (!smooth) return true;
    const VectorXd x = xp + N * z;
    VectorXd gx;
    MatrixXd Hx;
    if (!smooth(x, f, g ? &gx : nullptr, H ? &Hx : nullptr) || !std::isfinite(f)) return false;
    if (g) *g = N.transpose() * gx;
    if (H) *H = N.transpose() * Hx * N;
    return true;
  }
};

// -log(psi) with gradient gp and Hessian Hp of psi.
void add_neg_log(double psi, const VectorXd& gp, const MatrixXd& Hp, double& f, VectorXd* g, MatrixXd* H) {
  f += -std::log(psi);
  if (g) *g += -gp / psi;
  if (H) *H += gp * gp.transpose() / (psi * psi) - Hp / psi;
}

bool block_barrier(const Block& b, const double* s, double& f, VectorXd* g, MatrixXd* H) {
  f = 0.0;
  if (g) g->setZero(b.dim);
  if (H) H->setZero(b.dim, b.dim);
  switch (b.kind) {
    case ConeKind::nonneg: break;
    case ConeKind::soc: {
      const double t = s[0];
      double x2 = 0.0;
      for (int i = 1; i < b.dim; ++i) x2 += s[i] * s[i];
      const double psi = t * t - x2;
      if (!(t > 0.0) || !(psi > 0.0)) return false;
      VectorXd gp(b.dim);
      gp[0] = 2.0 * t;
      for (int i = 1; i < b.dim; ++i) gp[i] = -2.0 * s[i];
      MatrixXd hp = MatrixXd::Identity(b.dim, b.dim) * -2.0;
      hp(0, 0) = 2.0;
      add_neg_log(psi, gp, hp, f, g, H);
      return true;
    }
    case ConeKind::rsoc: {
      const double u = s[0], v = s[1];
      double x2 = 0.0;
      for (int i = 2; i < b.dim; ++i) x2 += s[i] * s[i];
      const double psi = 2.0 * u * v - x2;
      if (!(u > 0.0) || !(v > 0.0) || !(psi > 0.0)) return false;
      VectorXd gp(b.dim);
      gp[0] = 2.0 * v;
      gp[1] = 2.0 * u;
      for (int i = 2; i < b.dim; ++i) gp[i] = -2.0 * s[i];
      MatrixXd hp = MatrixXd::Identity(b.dim, b.dim) * -2.0;
      hp(0, 0) = 0.0;
      hp(1, 1) = 0.0;
      hp(0, 1) = hp(1, 0) = 2.0;
      add_neg_log(psi, gp, hp, f, g, H);
      return true;
    }
    case ConeKind::power: {
      const double x = s[0], y = s[1], z = s[2], a = b.alpha;
      if (!(x > 0.0) || !(y > 0.0)) return false;
      const double p = std::exp(2.0 * a * std::log(x) + (2.0 - 2.0 * a) * std::log(y));
      const double psi = p - z * z;
      if (!(psi > 0.0)) return false;
      VectorXd gp(3);
      gp << 2.0 * a * p / x, (2.0 - 2.0 * a) * p / y, -2.0 * z;
      MatrixXd hp = MatrixXd::Zero(3, 3);
      hp(0, 0) = 2.0 * a * (2.0 * a - 1.0) * p / (x * x);
      hp(1, 1) = (2.0 - 2.0 * a) * (1.0 - 2.0 * a) * p / (y * y);
      hp(0, 1) = hp(1, 0) = 2.0 * a * (2.0 - 2.0 * a) * p / (x * y);
      hp(2, 2) = -2.0;
      add_neg_log(psi, gp, hp, f, g, H);
      f += -(1.0 - a) * std::log(x) - a * std::log(y);
      if (g) {
        (*g)[0] += -(1.0 - a) / x;
        (*g)[1] += -a / y;
      }
      if (H) {
        (*H)(0, 0) += (1.0 - a) / (x * x);
        (*H)(1, 1) += a / (y * y);
      }
      return true;
    }
    case ConeKind::exp: {
      const double x = s[0], y = s[1], z = s[2];
      if (!(y > 0.0) || !(z > 0.0)) return false;
      const double lzy = std::log(z / y);
      const double psi = y * lzy - x;
      if (!(psi > 0.0)) return false;
      VectorXd gp(3);
      gp << -1.0, lzy - 1.0, y / z;
      MatrixXd hp = MatrixXd::Zero(3, 3);
      hp(1, 1) = -1.0 / y;
      hp(1, 2) = hp(2, 1) = 1.0 / z;
      hp(2, 2) = -y / (z * z);
      add_neg_log(psi, gp, hp, f, g, H);
      f += -std::log(z) - std::log(y);
      if (g) {
        (*g)[1] += -1.0 / y;
        (*g)[2] += -1.0 / z;
      }
      if (H) {
        (*H)(1, 1) += 1.0 / (y * y);
        (*H)(2, 2) += 1.0 / (z * z);
      }
      return true;
    }
    case ConeKind::psd: {
      const int n = b.n;
      MatrixXd S(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) S(i, j) = S(j, i) = s[packed(i, j)];
      Eigen::LLT<MatrixXd> llt(S);
      if (llt.info() != Eigen::Success) return false;
      const VectorXd d = llt.matrixLLT().diagonal();
      if ((d.array() <= 0.0).any() || !d.allFinite()) return false;
      f = -2.0 * d.array().log().sum();
      if (!g && !H) return true;
      const MatrixXd W = llt.solve(MatrixXd::Identity(n, n));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
          const int r = packed(i, j);
          if (g) (*g)[r] = -W(i, j) * (i == j ? 1.0 : 2.0);
          if (H) {
            const double kr = i == j ? 0.5 : 1.0;
            for (int k = 0; k < n; ++k)
              for (int l = 0; l <= k; ++l) {
                const double kc = k == l ? 0.5 : 1.0;
                (*H)(r, packed(k, l)) = 2.0 * kr * kc * (W(i, l) * W(j, k) + W(i, k) * W(j, l));
              }
          }
        }
      return true;
    }
  }
  return false;
}

struct Eval {
  bool inside = false;
  double f = 0.0;
  VectorXd g;
  MatrixXd H;
};

bool domain(const Reduced& p, const VectorXd& s) {
  for (int i = 0; i < p.n_nonneg; ++i)
    if (!(s[i] > 0.0)) return false;
  double f;
  for (const auto& b : p.blocks)
    if (!block_barrier(b, s.data() + b.off, f, nullptr, nullptr)) return false;
  return true;
}

double barrier_value(const Reduced& p, const VectorXd& s, bool& inside) {
  inside = false;
  double f = 0.0;
  for (int i = 0; i < p.n_nonneg; ++i) {
    if (!(s[i] > 0.0)) return 0.0;
    f -= std::log(s[i]);
  }
  for (const auto& b : p.blocks) {
    double fb;
    if (!block_barrier(b, s.data() + b.off, fb, nullptr, nullptr)) return 0.0;
    f += fb;
  }
  inside = true;
  return f;
}

Eval barrier_full(const Reduced& p, const VectorXd& s) {
  Eval e;
  const int nz = static_cast<int>(p.G.cols());
  e.g.setZero(nz);
  e.H.setZero(nz, nz);
  if (p.n_nonneg > 0) {
    const auto sn = s.head(p.n_nonneg).array();
    if ((sn <= 0.0).any()) return e;
    e.f -= sn.log().sum();
    const auto Gn = p.G.topRows(p.n_nonneg);
    e.g -= Gn.transpose() * sn.inverse().matrix();
    const MatrixXd Ws = sn.inverse().matrix().asDiagonal() * Gn;
    e.H.noalias() += Ws.transpose() * Ws;
  }
  VectorXd gb;
  MatrixXd Hb;
  for (const auto& b : p.blocks) {
    double fb;
    if (!block_barrier(b, s.data() + b.off, fb, &gb, &Hb)) return e;
    e.f += fb;
    const auto Gb = p.G.middleRows(b.off, b.dim);
    e.g.noalias() += Gb.transpose() * gb;
    e.H.noalias() += Gb.transpose() * (Hb * Gb);
  }
  e.inside = true;
  return e;
}

enum class CenterResult { centered, stalled, budget, stop };

struct Centering {
  const Reduced& p;
  int& iters;
  int max_iter;

  // Minimizes t c'z + barrier(z). `stop` is polled after every step.
  template <class Stop>
  CenterResult run(VectorXd& z, double t, Stop stop) {
    for (;;) {
      if (iters >= max_iter) return CenterResult::budget;
      const VectorXd s = p.G * z + p.h;
      Eval ev = barrier_full(p, s);
      if (!ev.inside) return CenterResult::stalled;
      double fs0 = 0.0;
      VectorXd gs;
      MatrixXd Hs;
      if (p.smooth) {
        if (!p.smooth_eval(z, fs0, &gs, &Hs)) return CenterResult::stalled;
        ev.g += t * gs;
        ev.H += t * Hs;
      }
      const VectorXd grad = t * p.c + ev.g;
      // Jacobi equilibration so the regularization is relative per coordinate.
      const VectorXd dinv =
          ev.H.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
      MatrixXd H = dinv.asDiagonal() * ev.H * dinv.asDiagonal();
      H.diagonal().array() += 1e-13;
      Eigen::LLT<MatrixXd> llt(H);
      if (llt.info() != Eigen::Success) {
        H.diagonal().array() += 1e-8;
        llt.compute(H);
        if (llt.info() != Eigen::Success) return CenterResult::stalled;
      }
      const VectorXd dz = -(dinv.asDiagonal() * llt.solve(dinv.asDiagonal() * grad)).eval();
      const double lam2 = -grad.dot(dz);
      if (!std::isfinite(lam2)) return CenterResult::stalled;
      // Round-off in t * objective sets a floor on the attainable decrement.
      const double floor = std::max(1e-8, 1e-12 * t * (std::abs(p.c.dot(z)) + std::abs(fs0)));
      if (lam2 < floor) return CenterResult::centered;
      ++iters;
      const VectorXd ds = p.G * dz;
      double step = 1.0;
      for (int i = 0; i < p.n_nonneg; ++i)
        if (ds[i] < 0.0) step = std::min(step, -0.99 * s[i] / ds[i]);
      // Compare differences directly; t * c'z can be large at the end of the path.
      const double slope = t * p.c.dot(dz);
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        bool inside;
        const VectorXd sn = s + step * ds;
        const double fb = barrier_value(p, sn, inside);
        double fs1 = 0.0;
        if (inside && p.smooth) inside = p.smooth_eval(z + step * dz, fs1, nullptr, nullptr);
        if (inside) {
          const double df = step * slope + t * (fs1 - fs0) + (fb - ev.f);
          if (df <= -0.25 * step * lam2) {
            accepted = true;
            break;
          }
        }
        step *= 0.5;
      }
      if (!accepted) return lam2 < 1e-6 ? CenterResult::centered : CenterResult::stalled;
      z += step * dz;
      // Round-off floor: the line search only accepts negligible steps.
      if (step < 1e-4 && lam2 < 1e-6) return CenterResult::centered;
      if (std::getenv("PINCH_CONIC_TRACE")) fprintf(stderr, "t=%g lam2=%g step=%g last=%g\n", t, lam2, step, z[z.size()-1]);
      if (stop(z)) return CenterResult::stop;
    }
  }
};

}  // namespace

Solution solve(const Program& program, const Settings& settings, const std::optional<Eigen::VectorXd>& initial) {
  Solution sol;
  const int n = program.num_variables();
  sol.x = VectorXd::Zero(n);

  // Rows in canonical order.
  std::vector<const Affine*> rows;
  std::vector<double> e_dir;
  Reduced red;
  for (const auto& c : program.cones())
    if (c.kind == ConeKind::nonneg) {
      rows.push_back(&c.rows[0]);
      e_dir.push_back(1.0);
    }
  red.n_nonneg = static_cast<int>(rows.size());
  red.nu = red.n_nonneg;
  for (const auto& c : program.cones()) {
    if (c.kind == ConeKind::nonneg) continue;
    Block b{c.kind, static_cast<int>(rows.size()), static_cast<int>(c.rows.size()), c.alpha, c.n};
    for (const auto& r : c.rows) rows.push_back(&r);
    switch (c.kind) {
      case ConeKind::soc:
        red.nu += 2;
        e_dir.push_back(1.0);
        for (int i = 1; i < b.dim; ++i) e_dir.push_back(0.0);
        break;
      case ConeKind::rsoc:
        red.nu += 2;
        e_dir.push_back(1.0);
        e_dir.push_back(1.0);
        for (int i = 2; i < b.dim; ++i) e_dir.push_back(0.0);
        break;
      case ConeKind::power:
        red.nu += 3;
        e_dir.insert(e_dir.end(), {1.0, 1.0, 0.0});
        break;
      case ConeKind::exp:
        red.nu += 3;
        e_dir.insert(e_dir.end(), {-1.0, 1.0, 1.0});
        break;
      case ConeKind::psd:
        red.nu += c.n;
        for (int i = 0; i < c.n; ++i)
          for (int j = 0; j <= i; ++j) e_dir.push_back(i == j ? 1.0 : 0.0);
        break;
      case ConeKind::nonneg: break;
    }
    red.blocks.push_back(b);
  }
  const int R = static_cast<int>(rows.size());
  MatrixXd G = MatrixXd::Zero(R, n);
  VectorXd h(R);
  for (int r = 0; r < R; ++r) {
    for (const auto& t : rows[r]->terms) G(r, t.var) += t.coef;
    h[r] = rows[r]->constant;
  }
  VectorXd c = VectorXd::Zero(n);
  for (const auto& t : program.objective().terms) c[t.var] += t.coef;

  // Eliminate equalities: x = xp + N z.
  const int p_eq = static_cast<int>(program.equalities().size());
  VectorXd xp = VectorXd::Zero(n);
  MatrixXd N = MatrixXd::Identity(n, n);
  MatrixXd A;
  VectorXd bvec;
  if (p_eq > 0) {
    A = MatrixXd::Zero(p_eq, n);
    bvec.resize(p_eq);
    for (int i = 0; i < p_eq; ++i) {
      for (const auto& t : program.equalities()[i].terms) A(i, t.var) += t.coef;
      bvec[i] = -program.equalities()[i].constant;
    }
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(A);
    cod.setThreshold(1e-11);
    xp = cod.solve(bvec);
    const double res = (A * xp - bvec).norm();
    if (res > 1e-8 * (1.0 + bvec.norm())) {
      sol.status = Status::infeasible;
      sol.diagnostics = "inconsistent equality constraints (residual " + std::to_string(res) + ")";
      sol.equality_residual = res;
      return sol;
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(A.transpose());
    qr.setThreshold(1e-11);
    const int rank = static_cast<int>(qr.rank());
    const MatrixXd Q = qr.householderQ();
    N = Q.rightCols(n - rank);
  }
  const int nz = static_cast<int>(N.cols());
  red.G = G * N;
  red.h = G * xp + h;
  red.c = N.transpose() * c;
  red.c0 = c.dot(xp) + program.objective().constant;
  red.N = N;
  red.xp = xp;
  red.e = Eigen::Map<VectorXd>(e_dir.data(), R);

  VectorXd z = VectorXd::Zero(nz);
  if (initial && initial->size() == n) z = N.transpose() * (*initial - xp);

  // Large box around the start keeps the barrier bounded below on unbounded sets.
  const double box = 1e4 * (1.0 + (nz > 0 ? z.cwiseAbs().maxCoeff() : 0.0));
  {
    const int nb = 2 * nz;
    MatrixXd Gb(nb + R, nz);
    VectorXd hb(nb + R), eb(nb + R);
    Gb.topRows(nz) = MatrixXd::Identity(nz, nz);
    Gb.middleRows(nz, nz) = -MatrixXd::Identity(nz, nz);
    hb.head(nz) = VectorXd::Constant(nz, box) - z;
    hb.segment(nz, nz) = VectorXd::Constant(nz, box) + z;
    eb.head(nb).setZero();
    Gb.bottomRows(R) = red.G;
    hb.tail(R) = red.h;
    eb.tail(R) = red.e;
    red.G = std::move(Gb);
    red.h = std::move(hb);
    red.e = std::move(eb);
    red.n_nonneg += nb;
    red.nu += nb;
    for (auto& b : red.blocks) b.off += nb;
  }
  const int R_all = static_cast<int>(red.G.rows());
  auto on_box = [&] { return nz > 0 && z.cwiseAbs().maxCoeff() > 0.5 * box; };

  int iters = 0;
  auto finish = [&](Status st, const std::string& diag) {
    sol.status = st;
    sol.iterations = iters;
    sol.x = xp + N * z;
    sol.objective = c.dot(sol.x) + program.objective().constant;
    if (program.smooth_objective()) {
      double f = 0.0;
      if (program.smooth_objective()(sol.x, f, nullptr, nullptr)) sol.objective += f;
    }
    sol.diagnostics = diag;
    if (p_eq > 0) sol.equality_residual = (A * sol.x - bvec).cwiseAbs().maxCoeff();
    return sol;
  };

  if (R == 0) {
    if (red.c.norm() > 1e-12) return finish(Status::numerical_failure, "unbounded: objective without cones");
    return finish(Status::optimal, "");
  }

  const double max_iter = settings.max_iter;

  // Phase I: minimize r subject to s + r e in K and r >= -1.
  if (!domain(red, red.G * z + red.h)) {
    Reduced p1;
    p1.n_nonneg = red.n_nonneg + 1;
    p1.G = MatrixXd::Zero(R_all + 1, nz + 1);
    p1.h = VectorXd::Zero(R_all + 1);
    p1.G(0, nz) = 1.0;
    p1.h[0] = 1.0;
    p1.G.bottomLeftCorner(R_all, nz) = red.G;
    p1.G.bottomRightCorner(R_all, 1) = red.e;
    p1.h.tail(R_all) = red.h;
    p1.c = VectorXd::Zero(nz + 1);
    p1.c[nz] = 1.0;
    p1.nu = red.nu + 1;
    for (auto b : red.blocks) {
      b.off += 1;
      p1.blocks.push_back(b);
    }
    const VectorXd s0 = red.G * z + red.h;
    double r = 1.0;
    while (!domain(red, s0 + r * red.e) && r < 1e30) r *= 2.0;
    if (r >= 1e30) return finish(Status::numerical_failure, "phase I could not find an interior start");
    VectorXd z1(nz + 1);
    z1 << z, 2.0 * r + 1.0;
    Centering cen{p1, iters, static_cast<int>(max_iter)};
    double t = 1.0;
    bool found = false;
    double gap = p1.nu / t;
    for (int outer = 0; outer < 80; ++outer) {
      const auto res = cen.run(z1, t, [&](const VectorXd& zz) { return zz[nz] < -1e-3; });
      if (z1[nz] < 0.0) {
        found = true;
        break;
      }
      gap = p1.nu / t;
      if (res == CenterResult::budget) return finish(Status::numerical_failure, "iteration budget exhausted in phase I");
      if (res == CenterResult::stalled && gap > 1e-6) {
        z = z1.head(nz);
        return finish(Status::numerical_failure, "phase I stalled");
      }
      if (z1[nz] - gap > 1e-8) {
        z = z1.head(nz);
        sol.phase1_margin = z1[nz];
        return finish(Status::infeasible, "phase I certificate: min r = " + std::to_string(z1[nz]));
      }
      if (gap < 1e-11 || res == CenterResult::stalled) break;
      t *= 8.0;
    }
    sol.phase1_margin = z1[nz];
    z = z1.head(nz);
    if (!found) {
      // Interior is empty or nearly so: relax every cone slightly along e.
      const double relax = std::max(z1[nz], 0.0) + 1e-7;
      red.h += relax * red.e;
      if (!domain(red, red.G * z + red.h)) return finish(Status::numerical_failure, "relaxed start not interior");
      sol.diagnostics = "empty interior relaxed by " + std::to_string(relax);
    }
  }

  // Phase II.
  red.smooth = program.smooth_objective();
  if (red.smooth) {
    double f;
    if (!red.smooth_eval(z, f, nullptr, nullptr))
      return finish(Status::numerical_failure, "smooth objective undefined at the interior start");
  }
  const bool relaxed = !sol.diagnostics.empty();
  Centering cen{red, iters, static_cast<int>(max_iter)};
  double t;
  {
    const Eval ev = barrier_full(red, red.G * z + red.h);
    MatrixXd H = ev.H;
    H.diagonal().array() += 1e-10 * std::max(1.0, H.diagonal().maxCoeff());
    Eigen::LLT<MatrixXd> llt(H);
    VectorXd cg = red.c;
    if (red.smooth) {
      double f;
      VectorXd gs;
      red.smooth_eval(z, f, &gs, nullptr);
      cg += gs;
    }
    const VectorXd hc = llt.solve(cg), hg = llt.solve(ev.g);
    const double den = cg.dot(hc);
    t = den > 0.0 ? -cg.dot(hg) / den : 1.0;
    if (!std::isfinite(t) || t <= 0.0) t = 1.0;
    t = std::clamp(t, 1e-6, 1e6);
  }
  const double mu = 10.0;
  for (;;) {
    const auto res = cen.run(z, t, [](const VectorXd&) { return false; });
    double fsm = 0.0;
    red.smooth_eval(z, fsm, nullptr, nullptr);
    const double obj = red.c.dot(z) + red.c0 + fsm;
    const double gap = red.nu / t;
    const double target = settings.abs_tol + settings.rel_tol * std::abs(obj);
    if (res == CenterResult::centered && gap <= target && on_box())
      return finish(Status::numerical_failure, "solution reached the internal bounding box (unbounded program?)");
    if (res == CenterResult::centered && gap <= target)
      return finish(relaxed ? Status::near_optimal : Status::optimal, sol.diagnostics);
    if (res != CenterResult::centered) {
      std::ostringstream os;
      os << (res == CenterResult::budget ? "iteration budget exhausted" : "line search stalled") << " at gap " << gap;
      if (gap <= 1e-5 * (1.0 + std::abs(obj))) return finish(Status::near_optimal, os.str());
      return finish(Status::numerical_failure, os.str());
    }
    t *= mu;
  }
}

}  // namespace pinch::conic
