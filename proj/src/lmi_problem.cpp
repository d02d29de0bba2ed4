/*
 Copyright 2026 The aniso authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "aniso/lmi.hpp"
#include "json.hpp"

namespace aniso::lmi {

AffineMatrix MaxdetProblem::make_variable(MatrixVariable v) {
  for (const auto& w : vars_)
    if (w.name == v.name) throw std::invalid_argument("duplicate variable name '" + v.name + "'");
  AffineMatrix m(v.rows, v.cols);
  for (int r = 0; r < v.rows; ++r)
    for (int c = 0; c < v.cols; ++c) {
      const int k = v.coords[r * v.cols + c];
      if (k < 0) continue;
      MatrixXd E = MatrixXd::Zero(v.rows, v.cols);
      E(r, c) = 1.0;
      m.add_term(k, E);
    }
  vars_.push_back(std::move(v));
  return m;
}

int MaxdetProblem::allocate(int count) {
  const int first = ncoords_;
  ncoords_ += count;
  c_.conservativeResize(ncoords_);
  c_.tail(count).setZero();
  return first;
}

AffineMatrix MaxdetProblem::symmetric(const std::string& name, int n) {
  MatrixVariable v{name, n, n, Structure::symmetric, std::vector<int>(n * n, -1), false};
  const int first = allocate(n * (n + 1) / 2);
  int k = first;
  for (int c = 0; c < n; ++c)
    for (int r = c; r < n; ++r) {
      v.coords[r * n + c] = k;
      v.coords[c * n + r] = k;
      ++k;
    }
  return make_variable(std::move(v));
}

AffineMatrix MaxdetProblem::full(const std::string& name, int rows, int cols) {
  return patterned(name, MatrixXd::Ones(rows, cols));
}

AffineMatrix MaxdetProblem::patterned(const std::string& name, const MatrixXd& mask) {
  const int rows = static_cast<int>(mask.rows()), cols = static_cast<int>(mask.cols());
  MatrixVariable v{name, rows, cols, Structure::full, std::vector<int>(rows * cols, -1), false};
  int free = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (mask(r, c) != 0.0) ++free;
  if (free < rows * cols) v.structure = Structure::patterned;
  int k = allocate(free);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (mask(r, c) != 0.0) v.coords[r * cols + c] = k++;
  return make_variable(std::move(v));
}

AffineMatrix MaxdetProblem::scalar(const std::string& name) {
  MatrixVariable v{name, 1, 1, Structure::scalar, {allocate(1)}, false};
  return make_variable(std::move(v));
}

void MaxdetProblem::constrain(const std::string& name, const AffineMatrix& expr, Sense sense, bool strict) {
  if (!expr.is_symmetric(1e-12 * std::max(1.0, expr.data_norm())))
    throw std::invalid_argument("constraint '" + name + "' is not symmetric");
  blocks_.push_back({name, expr.symmetrized(), sense, strict, 0.0});
}

AffineMatrix MaxdetProblem::detroot(const std::string& name, const AffineMatrix& psi, double scale) {
  if (psi.rows() != psi.cols() || psi.rows() == 0) throw DimensionMismatch("det-root argument must be square");
  if (!(scale > 0.0)) throw std::invalid_argument("det-root scale must be positive");
  MatrixVariable v{name + ".u", 1, 1, Structure::scalar, {allocate(1)}, true};
  const int u = v.coords[0];
  vars_.push_back(v);
  detroots_.push_back({name, psi.symmetrized(), scale, u});
  return AffineMatrix::coordinate(u, MatrixXd::Constant(1, 1, scale));
}

void MaxdetProblem::minimize(const AffineMatrix& objective) {
  if (objective.rows() != 1 || objective.cols() != 1) throw DimensionMismatch("objective must be scalar");
  c_ = VectorXd::Zero(ncoords_);
  for (const auto& [i, M] : objective.terms()) c_(i) = M(0, 0);
  c0_ = objective.constant()(0, 0);
  has_objective_ = true;
}

bool MaxdetProblem::has_variable(const std::string& name) const {
  for (const auto& v : vars_)
    if (v.name == name) return true;
  return false;
}

const MatrixVariable& MaxdetProblem::variable_info(const std::string& name) const {
  for (const auto& v : vars_)
    if (v.name == name) return v;
  throw std::out_of_range("no variable named '" + name + "'");
}

AffineMatrix MaxdetProblem::variable(const std::string& name) const {
  const auto& v = variable_info(name);
  AffineMatrix m(v.rows, v.cols);
  for (int r = 0; r < v.rows; ++r)
    for (int c = 0; c < v.cols; ++c) {
      const int k = v.coords[r * v.cols + c];
      if (k < 0) continue;
      MatrixXd E = MatrixXd::Zero(v.rows, v.cols);
      E(r, c) = 1.0;
      m.add_term(k, E);
    }
  return m;
}

MatrixXd MaxdetProblem::value(const std::string& name, const VectorXd& x) const {
  if (auto it = expressions.find(name); it != expressions.end()) return it->second.evaluate(x);
  return variable(name).evaluate(x);
}

MaxdetProblem strictness_margin(const MaxdetProblem& problem, double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("strictness margin must be nonnegative");
  MaxdetProblem out = problem;
  for (auto& b : out.blocks()) {
    b.margin = b.strict ? eps * (1.0 + b.expr.data_norm()) : 0.0;
    out.meta["margin." + b.name] = b.margin;
  }
  out.meta["epsilon"] = eps;
  return out;
}

void encode_detroot(const DetRootTerm& term, MaxdetProblem& problem) {
  const int m = term.psi.rows();
  const AffineMatrix u = AffineMatrix::coordinate(term.hypograph, MatrixXd::Ones(1, 1));
  if (m == 1) {
    problem.constrain(term.name + ".root", term.psi - u, Sense::positive_definite, false);
    return;
  }
  // Lower-triangular Z.
  MatrixVariable zv{term.name + ".Z", m, m, Structure::patterned, std::vector<int>(m * m, -1), true};
  int k = problem.allocate(m * (m + 1) / 2);
  AffineMatrix Z(m, m), dZ(m, m);
  std::vector<AffineMatrix> leaves;
  for (int c = 0; c < m; ++c)
    for (int r = c; r < m; ++r) {
      zv.coords[r * m + c] = k;
      MatrixXd E = MatrixXd::Zero(m, m);
      E(r, c) = 1.0;
      Z.add_term(k, E);
      if (r == c) {
        dZ.add_term(k, E);
        leaves.push_back(AffineMatrix::coordinate(k, MatrixXd::Ones(1, 1)));
      }
      ++k;
    }
  problem.add_variable(zv);
  AffineMatrix top = hstack({term.psi, Z});
  AffineMatrix bottom = hstack({Z.transpose(), dZ});
  problem.constrain(term.name + ".triangular", vstack({top, bottom}), Sense::positive_definite, false);

  size_t width = 1;
  while (width < leaves.size()) width *= 2;
  while (leaves.size() < width) leaves.push_back(u);

  int level = 0;
  while (leaves.size() > 1) {
    std::vector<AffineMatrix> next;
    for (size_t i = 0; i + 1 < leaves.size(); i += 2) {
      const std::string nm = term.name + ".g" + std::to_string(level) + "_" + std::to_string(i / 2);
      MatrixVariable vv{nm, 1, 1, Structure::scalar, {problem.allocate(1)}, true};
      problem.add_variable(vv);
      AffineMatrix v = AffineMatrix::coordinate(vv.coords[0], MatrixXd::Ones(1, 1));
      SymmetricBlocks cone({1, 1});
      cone.set(0, 0, leaves[i]);
      cone.set(1, 0, v);
      cone.set(1, 1, leaves[i + 1]);
      problem.constrain(nm, cone.build(), Sense::positive_definite, false);
      next.push_back(v);
    }
    leaves.swap(next);
    ++level;
  }
  problem.constrain(term.name + ".root", leaves.front() - u, Sense::positive_definite, false);
}

MaxdetProblem encode_detroots(const MaxdetProblem& problem) {
  MaxdetProblem out = problem;
  out.clear_detroots();
  for (const auto& t : problem.detroots()) encode_detroot(t, out);
  return out;
}

namespace {

double extreme_eig(const MatrixXd& S, bool largest) {
  if (S.rows() == 0) return largest ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  return largest ? es.eigenvalues().maxCoeff() : es.eigenvalues().minCoeff();
}

}  // namespace

ResidualReport check_point(const MaxdetProblem& problem, const VectorXd& x, double tol) {
  if (x.size() < problem.num_coords()) throw DimensionMismatch("assignment shorter than problem");
  ResidualReport rep;
  for (const auto& b : problem.blocks()) {
    BlockResidual r{b.name, 0.0, b.margin, false};
    const MatrixXd V = b.expr.evaluate(x);
    const double slack_tol = tol * std::max(1.0, b.expr.data_norm());
    double violation;
    if (b.sense == Sense::negative_definite) {
      r.extreme_eigenvalue = extreme_eig(V, true);
      violation = r.extreme_eigenvalue + b.margin;
    } else {
      r.extreme_eigenvalue = extreme_eig(V, false);
      violation = b.margin - r.extreme_eigenvalue;
    }
    r.satisfied = violation <= slack_tol;
    rep.worst_violation = std::max(rep.worst_violation, violation);
    rep.all_satisfied = rep.all_satisfied && r.satisfied;
    rep.blocks.push_back(r);
  }
  for (const auto& t : problem.detroots()) {
    const MatrixXd P = t.psi.evaluate(x);
    const int m = static_cast<int>(P.rows());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (P + P.transpose()), Eigen::EigenvaluesOnly);
    double root = -std::numeric_limits<double>::infinity();
    if (es.eigenvalues().minCoeff() >= 0.0) {
      double logdet = 0.0;
      for (int i = 0; i < m; ++i) logdet += std::log(es.eigenvalues()(i));
      root = std::exp(logdet / m);
    }
    const double slack = t.scale * root - t.scale * x(t.hypograph);
    rep.detroot_slack.push_back(slack);
    const double violation = -slack;
    rep.worst_violation = std::max(rep.worst_violation, violation);
    if (violation > tol * std::max(1.0, std::abs(t.scale * x(t.hypograph)))) rep.all_satisfied = false;
  }
  if (problem.has_objective()) rep.objective = problem.objective().dot(x.head(problem.num_coords())) +
                                               problem.objective_offset();
  return rep;
}

namespace {

nlohmann::ordered_json matrix_json(const MatrixXd& M) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int r = 0; r < M.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

const char* structure_name(Structure s) {
  switch (s) {
    case Structure::symmetric: return "symmetric";
    case Structure::full: return "full";
    case Structure::patterned: return "patterned";
    case Structure::scalar: return "scalar";
  }
  return "full";
}

}  // namespace

std::string dump_problem(const MaxdetProblem& p) {
  nlohmann::ordered_json j;
  j["coordinates"] = p.num_coords();
  j["variables"] = nlohmann::ordered_json::array();
  for (const auto& v : p.variables())
    j["variables"].push_back({{"name", v.name},
                              {"rows", v.rows},
                              {"cols", v.cols},
                              {"structure", structure_name(v.structure)},
                              {"auxiliary", v.auxiliary},
                              {"coords", v.coords}});
  j["blocks"] = nlohmann::ordered_json::array();
  for (const auto& b : p.blocks()) {
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (const auto& [k, M] : b.expr.terms()) terms.push_back({{"coord", k}, {"coef", matrix_json(M)}});
    j["blocks"].push_back({{"name", b.name},
                           {"sense", b.sense == Sense::negative_definite ? "negative" : "positive"},
                           {"strict", b.strict},
                           {"margin", b.margin},
                           {"size", b.expr.rows()},
                           {"constant", matrix_json(b.expr.constant())},
                           {"terms", terms}});
  }
  j["detroots"] = nlohmann::ordered_json::array();
  for (const auto& t : p.detroots()) {
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (const auto& [k, M] : t.psi.terms()) terms.push_back({{"coord", k}, {"coef", matrix_json(M)}});
    j["detroots"].push_back({{"name", t.name},
                             {"scale", t.scale},
                             {"hypograph", t.hypograph},
                             {"constant", matrix_json(t.psi.constant())},
                             {"terms", terms}});
  }
  std::vector<double> c(p.objective().data(), p.objective().data() + p.objective().size());
  j["objective"] = {{"minimize", p.has_objective()}, {"c", c}, {"offset", p.objective_offset()}};
  j["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : p.meta) j["meta"][k] = v;
  return j.dump(2);
}

}  // namespace aniso::lmi
