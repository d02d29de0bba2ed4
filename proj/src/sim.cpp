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
#include "aniso/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace aniso::sim {

double GaussianSource::uniform() {
  // 53 random bits -> [0, 1), mapped to [-1, 1).
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

double GaussianSource::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = uniform();
    v = uniform();
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

MatrixXd GaussianSource::matrix(int rows, int cols) {
  MatrixXd M(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) M(i, j) = next();
  return M;
}

NoiseSpec NoiseSpec::white(int mw, long length, std::uint64_t seed, double lambda) {
  NoiseSpec s;
  s.kind = Kind::white;
  s.mw = mw;
  s.length = length;
  s.seed = seed;
  s.lambda = lambda;
  return s;
}

NoiseSpec NoiseSpec::shaped(const ShapingFilter& filter, long length, std::uint64_t seed) {
  NoiseSpec s;
  s.kind = Kind::shaped;
  s.mw = filter.outputs();
  s.length = length;
  s.seed = seed;
  s.filter = filter;
  return s;
}

void NoiseSpec::check() const {
  if (mw <= 0 || length < 0) throw DimensionMismatch("noise spec needs mw > 0 and length >= 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("noise variance lambda must be positive");
  if (warmup && *warmup < 0) throw std::invalid_argument("warm-up length must be nonnegative");
  if (kind == Kind::shaped) {
    if (!filter) throw std::invalid_argument("shaped noise needs a shaping filter");
    filter->check_dimensions();
    if (filter->outputs() != mw) throw DimensionMismatch("shaping filter output count differs from mw");
    if (!filter->is_stable()) throw UnstableSystem("shaping filter is not stable");
  }
}

long warmup_length(const NoiseSpec& spec) {
  if (spec.warmup) return *spec.warmup;
  if (spec.kind != NoiseSpec::Kind::shaped || !spec.filter || spec.filter->order() == 0) return 0;
  const double rho = spec.filter->spectral_radius();
  if (rho <= 0.0) return static_cast<long>(spec.filter->order());  // nilpotent: transient ends after n steps
  return static_cast<long>(std::ceil(-10.0 / std::log(rho)));
}

MatrixXd generate_noise(const NoiseSpec& spec) {
  spec.check();
  GaussianSource g(spec.seed);
  if (spec.kind == NoiseSpec::Kind::white) return std::sqrt(spec.lambda) * g.matrix(spec.mw, static_cast<int>(spec.length));

  const ShapingFilter& G = *spec.filter;
  const long skip = warmup_length(spec);
  const int mv = G.inputs();
  MatrixXd W(spec.mw, spec.length);
  VectorXd x = VectorXd::Zero(G.order());
  for (long k = 0; k < skip + spec.length; ++k) {
    const VectorXd v = std::sqrt(spec.lambda) * g.matrix(mv, 1);
    if (k >= skip) W.col(k - skip) = G.C * x + G.D * v;
    x = G.A * x + G.B * v;
  }
  return W;
}

ShapingFilter first_order_filter(int mw, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("first-order filter pole must lie in [0, 1)");
  const double c = std::sqrt(1.0 - rho * rho);
  const MatrixXd I = MatrixXd::Identity(mw, mw);
  // c / (1 - rho q^-1) = c + c rho / (q - rho)
  return ShapingFilter{rho * I, I, c * rho * I, c * I};
}

double first_order_anisotropy(int mw, double rho) { return -0.5 * mw * std::log1p(-rho * rho); }

double first_order_pole(int mw, double a, double max_pole) {
  if (a <= 0.0) return 0.0;
  return std::min(max_pole, std::sqrt(-std::expm1(-2.0 * a / mw)));
}

bool Trajectory::finite() const {
  return state.allFinite() && w.allFinite() && z.allFinite() && u.allFinite() && y.allFinite();
}

Trajectory simulate(const ClosedLoopRealization& sys, const MatrixXd& W, const VectorXd& x0) {
  sys.check_dimensions();
  if (W.rows() != sys.inputs()) throw DimensionMismatch("disturbance sequence has the wrong number of channels");
  const int n = sys.order();
  if (x0.size() != 0 && x0.size() != n) throw DimensionMismatch("initial state has the wrong size");
  const long N = W.cols();
  Trajectory t;
  t.w = W;
  t.state.resize(n, N);
  t.z.resize(sys.outputs(), N);
  VectorXd x = x0.size() ? x0 : VectorXd::Zero(n);
  for (long k = 0; k < N; ++k) {
    t.state.col(k) = x;
    t.z.col(k) = sys.C * x + sys.D * W.col(k);
    x = sys.A * x + sys.B * W.col(k);
  }
  return t;
}

Trajectory simulate(const PlantRealization& plant, const ControllerRealization& ctrl, const MatrixXd& W,
                    const VectorXd& x0) {
  plant.check_dimensions();
  const ClosedLoopRealization cl = close_loop_dynamic(plant, ctrl);
  Trajectory t = simulate(cl, W, x0);
  const int n = plant.nx();
  t.y = plant.Cy * t.state.topRows(n) + plant.Dyw * W;
  t.u = ctrl.Dc * t.y;
  if (ctrl.order() > 0) t.u += ctrl.Cc * t.state.bottomRows(ctrl.order());
  return t;
}

GainEstimate empirical_gain(const ClosedLoopRealization& sys, const NoiseSpec& spec, int trials, double z) {
  if (trials <= 0) throw std::invalid_argument("empirical_gain needs at least one trial");
  if (!sys.is_stable()) throw UnstableSystem("empirical gain of an unstable system");
  GainEstimate e;
  // Discard the closed-loop transient from the zero initial state as well.
  const double rho = sys.spectral_radius();
  const long settle = rho > 0.0 ? static_cast<long>(std::ceil(-10.0 / std::log(rho))) : sys.order();
  for (int k = 0; k < trials; ++k) {
    NoiseSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(k);
    s.length = spec.length + settle;
    const MatrixXd W = generate_noise(s);
    const Trajectory t = simulate(sys, W);
    const double num = t.z.rightCols(spec.length).squaredNorm();
    const double den = W.rightCols(spec.length).squaredNorm();
    e.trials.push_back(std::sqrt(num / den));
  }
  const double n = static_cast<double>(trials);
  for (double g : e.trials) e.mean += g / n;
  if (trials > 1) {
    double ss = 0.0;
    for (double g : e.trials) ss += (g - e.mean) * (g - e.mean);
    e.stddev = std::sqrt(ss / (n - 1.0));
  }
  e.standard_error = e.stddev / std::sqrt(n);
  e.lower = e.mean - z * e.standard_error;
  e.upper = e.mean + z * e.standard_error;
  return e;
}

namespace {

struct Column {
  std::string name;
  const MatrixXd* signal;
  int row;
};

std::vector<Column> columns(const Trajectory& t) {
  std::vector<Column> cols;
  auto add = [&](const char* prefix, const MatrixXd& M) {
    if (M.cols() != t.length()) return;
    for (int i = 0; i < M.rows(); ++i) cols.push_back({prefix + std::to_string(i + 1), &M, i});
  };
  add("w", t.w);
  add("z", t.z);
  add("x", t.state);
  add("u", t.u);
  add("y", t.y);
  return cols;
}

}  // namespace

void write_csv(const Trajectory& traj, std::ostream& out) {
  const auto cols = columns(traj);
  out << "k";
  for (const auto& c : cols) out << ',' << c.name;
  out << '\n';
  char buf[32];
  for (long k = 0; k < traj.length(); ++k) {
    out << k;
    for (const auto& c : cols) {
      std::snprintf(buf, sizeof buf, "%.17g", (*c.signal)(c.row, k));
      out << ',' << buf;
    }
    out << '\n';
  }
}

std::vector<std::pair<std::string, double>> max_abs_deviation(const Trajectory& traj) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& c : columns(traj))
    out.emplace_back(c.name, traj.length() ? c.signal->row(c.row).cwiseAbs().maxCoeff() : 0.0);
  return out;
}

}  // namespace aniso::sim
