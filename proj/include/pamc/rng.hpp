// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

namespace pamc {

// xoshiro256++ seeded through splitmix64. We deliberately avoid
// std::mt19937 + std::*_distribution: the engine is portable but the
// distributions are not specified bit-exactly across standard library
// implementations. Every draw here is defined purely in terms of 64-bit
// integer arithmetic, so identical seeds give identical sequences on any
// platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    auto next_u64() -> std::uint64_t;

    // Uniform in [0, 1), 53-bit resolution.
    auto uniform() -> double;
    auto uniform(double lo, double hi) -> double;

    // Standard normal via Box-Muller (no rejection, so the draw count per
    // call is fixed and the sequence stays reproducible).
    auto normal() -> double;

    // Unbiased integer in [0, n) (Lemire reduction with rejection).
    auto bounded(std::uint64_t n) -> std::uint64_t;
    auto uniform_int(int n) -> int { return static_cast<int>(bounded(static_cast<std::uint64_t>(n))); }

    // Independent deterministic substream; fork(k) depends only on the
    // original seed and k, not on how many draws were made so far.
    [[nodiscard]] auto fork(std::uint64_t stream) const -> Rng;

    auto permutation(int n) -> std::vector<int>;

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    [[nodiscard]] auto seed() const -> std::uint64_t { return seed_; }

  private:
    std::uint64_t seed_;
    std::uint64_t state_[4];
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

// splitmix64 mixing step; exposed for deriving named sub-seeds.
auto mix_seed(std::uint64_t a, std::uint64_t b) -> std::uint64_t;

} // namespace pamc
