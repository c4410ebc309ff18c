// SPDX-License-Identifier: Apache-2.0
// Small dense conic optimization layer: affine, second-order, rotated second-order,
// 3-D power, exponential and PSD cones, solved by a primal log-barrier method.
#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pinch::conic {

struct Term {
  int var;
  double coef;
};

// Affine expression sum_i coef_i * x_{var_i} + constant.
class Affine {
 public:
  Affine() = default;
  Affine(double c) : constant(c) {}  // NOLINT: implicit scalar promotion is intended
  static Affine var(int v, double coef = 1.0) {
    Affine a;
    a.terms.push_back({v, coef});
    return a;
  }
  Affine& operator+=(const Affine& o);
  Affine& operator-=(const Affine& o);
  Affine& operator*=(double k);
  double eval(const Eigen::VectorXd& x) const;

  std::vector<Term> terms;
  double constant = 0.0;
};

Affine operator+(Affine a, const Affine& b);
Affine operator-(Affine a, const Affine& b);
Affine operator-(Affine a);
Affine operator*(Affine a, double k);
Affine operator*(double k, Affine a);

enum class ConeKind { nonneg, soc, rsoc, power, exp, psd };
const char* to_string(ConeKind kind);

struct Cone {
  ConeKind kind;
  std::vector<Affine> rows;
  double alpha = 0.0;  // power cone exponent
  int n = 0;           // PSD order
};

// Real symmetric matrix variable with packed lower-triangle storage.
struct SymmetricVar {
  int n = 0;
  std::vector<int> idx;
  Affine operator()(int i, int j) const;
};

// Hermitian matrix variable; the realified embedding [Re -Im; Im Re] is constrained PSD.
struct HermitianVar {
  int n = 0;
  std::vector<int> re;  // packed lower triangle incl. diagonal
  std::vector<int> im;  // packed strict lower triangle
  Affine real(int i, int j) const;
  Affine imag(int i, int j) const;
};

// Smooth convex objective term over the full variable vector. Returns false outside its domain;
// g and H are filled when non-null.
using SmoothTerm = std::function<bool(const Eigen::VectorXd& x, double& f, Eigen::VectorXd* g, Eigen::MatrixXd* H)>;

class Program {
 public:
  int add_variable(const std::string& name = {});
  // Adds lo <= x <= hi; infinite bounds are skipped.
  int add_variable(double lo, double hi, const std::string& name = {});
  Affine var(int v) const { return Affine::var(v); }
  int num_variables() const { return static_cast<int>(names_.size()); }

  void minimize(const Affine& objective) { objective_ = objective; }
  const Affine& objective() const { return objective_; }
  // Adds a smooth convex term to the linear objective.
  void add_smooth_objective(SmoothTerm term) { smooth_ = std::move(term); }
  const SmoothTerm& smooth_objective() const { return smooth_; }

  void add_equality(const Affine& e);  // e == 0
  void add_nonneg(const Affine& e);    // e >= 0
  void add_leq(const Affine& a, const Affine& b) { add_nonneg(b - a); }
  void add_bounds(int v, double lo, double hi);
  // t >= ||x||
  void add_soc(const Affine& t, const std::vector<Affine>& x);
  // 2 u v >= ||x||^2, u, v >= 0
  void add_rsoc(const Affine& u, const Affine& v, const std::vector<Affine>& x);
  // x^alpha y^(1-alpha) >= |z|, x, y >= 0
  void add_power(const Affine& x, const Affine& y, const Affine& z, double alpha);
  // y exp(x / y) <= z, y > 0
  void add_exp(const Affine& x, const Affine& y, const Affine& z);
  // Symmetric n x n matrix given by its packed lower triangle (row-major, i >= j) is PSD.
  void add_psd(int n, const std::vector<Affine>& lower);

  SymmetricVar add_symmetric_psd(int n, const std::string& name = {});
  HermitianVar add_hermitian_psd(int n, const std::string& name = {});

  const std::vector<Affine>& equalities() const { return equalities_; }
  const std::vector<Cone>& cones() const { return cones_; }
  const std::vector<std::string>& names() const { return names_; }

  nlohmann::json to_json() const;

 private:
  void check(const Affine& a) const;

  std::vector<std::string> names_;
  Affine objective_;
  SmoothTerm smooth_;
  std::vector<Affine> equalities_;
  std::vector<Cone> cones_;
};

enum class Status { optimal, near_optimal, infeasible, numerical_failure };
const char* to_string(Status s);

struct Settings {
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  int max_iter = 600;  // total Newton steps over both phases
};

struct Solution {
  Status status = Status::numerical_failure;
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  double equality_residual = 0.0;
  double phase1_margin = 0.0;  // optimal phase-I value; positive certifies infeasibility
  std::string diagnostics;

  bool ok() const { return status == Status::optimal || status == Status::near_optimal; }
  double value(int v) const { return x[v]; }
  double value(const Affine& a) const { return a.eval(x); }
};

Solution solve(const Program& program, const Settings& settings = {},
               const std::optional<Eigen::VectorXd>& initial = std::nullopt);

}  // namespace pinch::conic
