// Copyright 2026 The sqlcov Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SQLCOV_COMMON_RNG_H_
#define SQLCOV_COMMON_RNG_H_

#include <cstdint>
#include <random>

namespace sqlcov {

// All randomized components take an explicit generator so runs are
// reproducible from a seed.
using Rng = std::mt19937_64;

// Uniform in [0, n). n must be nonzero. Uses plain modulo reduction rather
// than std::uniform_int_distribution so sequences do not depend on the
// standard library implementation.
inline uint64_t Below(Rng& rng, uint64_t n) { return rng() % n; }

inline bool OneIn(Rng& rng, uint64_t n) { return Below(rng, n) == 0; }

// Uniform in [0, 1).
inline double UnitInterval(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace sqlcov

#endif  // SQLCOV_COMMON_RNG_H_
