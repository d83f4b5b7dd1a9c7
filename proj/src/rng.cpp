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

#include "pamc/rng.hpp"

#include <cmath>
#include <numbers>

namespace pamc {

namespace {

auto splitmix64(std::uint64_t& state) -> std::uint64_t
{
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

auto rotl(const std::uint64_t x, const int k) -> std::uint64_t
{
    return (x << k) | (x >> (64 - k));
}

} // namespace

auto mix_seed(const std::uint64_t a, const std::uint64_t b) -> std::uint64_t
{
    std::uint64_t s = a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2));
    return splitmix64(s);
}

Rng::Rng(const std::uint64_t seed)
  : seed_ { seed }
{
    std::uint64_t s = seed;
    for (auto& word : state_) {
        word = splitmix64(s);
    }
}

auto Rng::next_u64() -> std::uint64_t
{
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

auto Rng::uniform() -> double
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

auto Rng::uniform(const double lo, const double hi) -> double
{
    return lo + (hi - lo) * uniform();
}

auto Rng::normal() -> double
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    // u1 must be strictly positive for the log.
    double u1 = uniform();
    if (u1 <= 0.0) {
        u1 = 0x1.0p-53;
    }
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

auto Rng::bounded(const std::uint64_t n) -> std::uint64_t
{
    __uint128_t m = static_cast<__uint128_t>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
        const std::uint64_t threshold = (static_cast<std::uint64_t>(0) - n) % n;
        while (lo < threshold) {
            m = static_cast<__uint128_t>(next_u64()) * n;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

auto Rng::fork(const std::uint64_t stream) const -> Rng
{
    return Rng(mix_seed(seed_, stream));
}

auto Rng::permutation(const int n) -> std::vector<int>
{
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        p[static_cast<std::size_t>(i)] = i;
    }
    shuffle(p);
    return p;
}

} // namespace pamc
