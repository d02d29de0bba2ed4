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
#ifndef ANISO_ERRORS_HPP
#define ANISO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace aniso {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// A structural precondition of a synthesis class does not hold
// (vanishing Tyu, Dzu = 0, Dyw = 0, canonical patterns, ...).
struct StructuralPropertyViolation : Error {
  using Error::Error;
};

struct RankViolation : Error {
  using Error::Error;
};

struct UnstableSystem : Error {
  using Error::Error;
};

// Integrand of a log-det functional vanished on the quadrature grid.
struct SingularSpectrum : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

// None of the convex static-output-feedback classes fits the plant.
struct NoConvexClassApplies : Error {
  using Error::Error;
};

// Controller recovery from the linearized variables is ill-posed
// (singular coupling or gain factor).
struct ReconstructionDegenerate : Error {
  using Error::Error;
};

// A synthesis driver was given a plant that fails the stabilizability or
// detectability test.
struct InadmissiblePlant : Error {
  using Error::Error;
};

}  // namespace aniso

#endif
