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
// Deterministic random systems and plants shared by the test programs.
#ifndef ANISO_TESTS_SUPPORT_HPP
#define ANISO_TESTS_SUPPORT_HPP

#include <cstdint>

#include "aniso/sim.hpp"
#include "aniso/statespace.hpp"

namespace aniso::testing {

class Random {
 public:
  explicit Random(std::uint64_t seed) : g_(seed) {}
  MatrixXd gaussian(int rows, int cols) { return g_.matrix(rows, cols); }
  double gaussian() { return g_.next(); }
  // Square matrix rescaled to spectral radius rho.
  MatrixXd with_radius(int n, double rho) {
    MatrixXd A = gaussian(n, n);
    const double r = spectral_radius(A);
    return r > 0.0 ? MatrixXd(A * (rho / r)) : A;
  }
  MatrixXd spd(int n, double floor = 0.1) {
    const MatrixXd M = gaussian(n, n);
    return M * M.transpose() + floor * MatrixXd::Identity(n, n);
  }

 private:
  sim::GaussianSource g_;
};

inline ClosedLoopRealization random_stable_system(Random& r, int n, int m, int p, double rho = 0.9) {
  return ClosedLoopRealization{r.with_radius(n, rho), r.gaussian(n, m), r.gaussian(p, n), r.gaussian(p, m)};
}

struct PlantShape {
  int n = 2, mw = 1, mu = 1, pz = 1, py = 1;
};

inline PlantRealization random_plant(Random& r, const PlantShape& s, double rho, double dzw_scale = 0.3) {
  PlantRealization p;
  p.A = r.with_radius(s.n, rho);
  p.Bw = r.gaussian(s.n, s.mw);
  p.Bu = r.gaussian(s.n, s.mu);
  p.Cz = r.gaussian(s.pz, s.n);
  p.Dzw = dzw_scale * r.gaussian(s.pz, s.mw);
  p.Dzu = r.gaussian(s.pz, s.mu);
  p.Cy = r.gaussian(s.py, s.n);
  p.Dyw = r.gaussian(s.py, s.mw);
  return p;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace aniso::testing

#endif
