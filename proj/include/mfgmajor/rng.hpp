// Copyright 2026 The mfgmajor Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MFGMAJOR_RNG_HPP_
#define MFGMAJOR_RNG_HPP_

#include <cstdint>
#include <random>

namespace mfgmajor {

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t SplitMix64(std::uint64_t x);

// Seed of scenario k in an ensemble.
inline std::uint64_t ScenarioSeed(std::uint64_t base_seed, std::uint64_t k) {
  return base_seed ^ k;
}

// Standard normal draws from mt19937_64 seeded with
// SplitMix64(seed ^ SplitMix64(stream + 1)), transformed by Box-Muller.
// Both pieces are fully specified, so streams are identical on every
// platform with IEEE doubles and a conforming libm.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream);
  double Next();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mfgmajor

#endif  // MFGMAJOR_RNG_HPP_
