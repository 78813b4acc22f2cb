// Copyright 2026 The qvlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

#include "qvlab/common.hpp"

namespace qvlab {

// Seedable RNG with a fixed Gaussian transform (Box-Muller on top of
// mt19937_64), so generated corpora do not depend on the standard library's
// distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1).
  double uniform();
  // Uniform in {0, ..., n-1}.
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard normal.
  double gaussian();
  Cplx gaussian_complex();

  // Haar-random unitary via QR of a complex Ginibre matrix, with the R-phase
  // fix that makes the distribution exactly Haar.
  Matrix haar_unitary(Index dim);

  // Haar-random pure state of the given dimension.
  Vector random_state(Index dim);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qvlab
