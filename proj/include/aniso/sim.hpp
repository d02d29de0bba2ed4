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
#ifndef ANISO_SIM_HPP
#define ANISO_SIM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "aniso/spectral.hpp"
#include "aniso/statespace.hpp"

namespace aniso::sim {

// Standard normal samples: std::mt19937_64 (output sequence fixed by the C++
// standard) feeding the Marsaglia polar method. Unlike
// std::normal_distribution, whose algorithm is implementation-defined, the
// stream is bit-identical across platforms and standard libraries.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}
  double next();
  MatrixXd matrix(int rows, int cols);  // filled column by column

 private:
  double uniform();  // open interval (-1, 1)
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct NoiseSpec {
  enum class Kind { white, shaped };
  Kind kind = Kind::white;
  int mw = 1;
  long length = 0;
  std::uint64_t seed = 0;
  double lambda = 1.0;                  // white-noise variance per channel
  std::optional<ShapingFilter> filter;  // shaped kind: stable, mw outputs
  std::optional<long> warmup;           // discarded prefix; default 10 time constants

  static NoiseSpec white(int mw, long length, std::uint64_t seed, double lambda = 1.0);
  static NoiseSpec shaped(const ShapingFilter& filter, long length, std::uint64_t seed);
  void check() const;
};

// Samples discarded before the shaped output is used: ceil(10 tau) with
// tau = -1 / ln rho(A_G) (zero for static filters and white noise).
long warmup_length(const NoiseSpec& spec);

// mw x length disturbance sequence.
MatrixXd generate_noise(const NoiseSpec& spec);

// m identical first-order channels w = c / (1 - rho q^-1) v with c = sqrt(1 - rho^2)
// (unit output variance); mean anisotropy -(m/2) ln(1 - rho^2).
ShapingFilter first_order_filter(int mw, double rho);
double first_order_anisotropy(int mw, double rho);
// Pole giving mean anisotropy a (capped at max_pole).
double first_order_pole(int mw, double a, double max_pole = 0.999);

struct Trajectory {
  MatrixXd state, w, z;  // columns are time samples
  MatrixXd u, y;         // empty unless a plant/controller pair was simulated
  long length() const { return static_cast<long>(w.cols()); }
  bool finite() const;
};

// chi_{k+1} = A chi_k + B w_k, z_k = C chi_k + D w_k.
Trajectory simulate(const ClosedLoopRealization& sys, const MatrixXd& W, const VectorXd& x0 = VectorXd());

// Plant and controller interconnection; state = [x; x_c].
Trajectory simulate(const PlantRealization& plant, const ControllerRealization& ctrl, const MatrixXd& W,
                    const VectorXd& x0 = VectorXd());

// Power-norm ratio sqrt(sum |z|^2 / sum |w|^2) per trial; trial k uses seed + k.
struct GainEstimate {
  std::vector<double> trials;
  double mean = 0.0;
  double stddev = 0.0;
  double standard_error = 0.0;
  double lower = 0.0, upper = 0.0;  // mean -/+ z * standard_error
};
GainEstimate empirical_gain(const ClosedLoopRealization& sys, const NoiseSpec& spec, int trials, double z = 1.96);

// Columnar CSV: k, w1.., z1.., x1.., u1.., y1..
void write_csv(const Trajectory& traj, std::ostream& out);

// Largest absolute value of every signal channel, keyed by its CSV name.
std::vector<std::pair<std::string, double>> max_abs_deviation(const Trajectory& traj);

}  // namespace aniso::sim

#endif
