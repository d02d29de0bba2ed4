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
#ifndef ANISO_SOLVER_HPP
#define ANISO_SOLVER_HPP

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aniso/lmi.hpp"

namespace aniso::solver {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Status { optimal, feasible, infeasible, max_iterations, numerical_failure };
std::string to_string(Status s);

struct Options {
  double gap_tol = 1e-8;       // relative duality gap
  double feas_tol = 1e-9;      // relative primal/dual residuals
  double infeas_tol = 1e-8;    // Farkas certificate quality
  int max_iterations = 100;
  double step_fraction = 0.98;  // fraction of the step to the cone boundary
  double min_step = 1e-9;       // stall detection threshold on both step lengths
  int stall_iterations = 4;
  bool verbose = false;
};

struct Solution {
  Status status = Status::numerical_failure;
  VectorXd x;                  // all coordinates, including encoding auxiliaries
  double objective = 0.0;      // c'x + offset
  double dual_bound = 0.0;     // lower bound from the dual matrix
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;            // relative duality gap
  int iterations = 0;
  double wall_time = 0.0;
  std::string message;
  std::string backend;
  // Dual matrices per (encoded) block; for infeasible problems a normalized
  // Farkas certificate: X >= 0, <F_i, X> = 0, <F_0, X> < 0.
  std::vector<MatrixXd> dual;

  bool has_point() const { return status == Status::optimal || status == Status::feasible; }
};

// Standard form:  min c'y  s.t.  G_b(y) = F0_b + sum_i y_i F_bi >= 0  for every block b.
struct SdpData {
  int m = 0;
  std::vector<int> sizes;
  std::vector<MatrixXd> F0;
  std::vector<std::vector<std::pair<int, MatrixXd>>> F;
  VectorXd c;
  std::vector<std::string> names;
};

// Encodes det-root terms and turns every block into ">= 0" form with its margin.
SdpData compile(const lmi::MaxdetProblem& problem);

// Raw primal-dual path-following run on standard-form data.
struct IpmResult {
  bool converged = false;
  bool infeasible = false;   // Farkas certificate for the LMI found
  bool stalled = false;
  VectorXd y;
  std::vector<MatrixXd> X, Z;
  std::optional<VectorXd> best_y;  // lowest-objective iterate with G(y) > 0
  int iterations = 0;
  double pobj = 0.0, dobj = 0.0, pinf = 0.0, dinf = 0.0, relgap = 0.0;
  std::string message;
};
IpmResult interior_point(const SdpData& data, const Options& opts, const std::optional<VectorXd>& y0 = std::nullopt);

// Swappable conic backend.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual Solution solve(const lmi::MaxdetProblem& problem, const Options& opts) const = 0;
};

// Built-in primal-dual interior-point method with Nesterov-Todd scaling.
class ReferenceBackend : public Backend {
 public:
  std::string name() const override { return "reference"; }
  Solution solve(const lmi::MaxdetProblem& problem, const Options& opts) const override;
};

std::unique_ptr<Backend> make_backend(const std::string& name);
// Selected by the ANISO_SOLVER environment variable (default "reference").
std::unique_ptr<Backend> default_backend();

Solution solve(const lmi::MaxdetProblem& problem, const Options& opts = {});

// Re-evaluates the solution against the unencoded problem.
lmi::ResidualReport verify(const lmi::MaxdetProblem& problem, const Solution& sol, double tol = 1e-7);

std::string dump_solution(const Solution& sol);

}  // namespace aniso::solver

#endif
