/*
   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "rankdiff/rng.hpp"

#include <cmath>

namespace rankdiff {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline void philox_round(std::array<std::uint32_t, 4>& c,
                         const std::array<std::uint32_t, 2>& k) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mul_hi_lo(kPhiloxM0, c[0], hi0, lo0);
    mul_hi_lo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

// Map 64 random bits to (0, 1]: 53-bit mantissa, shifted off zero.
inline double to_unit_half_open(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Map 64 random bits to the open interval (0, 1).
inline double to_unit_open(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

inline std::uint64_t join(std::uint32_t hi, std::uint32_t lo) {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        philox_round(counter, key);
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return counter;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base + index * 0x9E3779B97F4A7C15ull);
}

std::array<std::uint32_t, 4> CounterRng::block(Lane lane, std::uint32_t major,
                                               std::uint64_t minor) const {
    const std::array<std::uint32_t, 4> counter = {
        static_cast<std::uint32_t>(minor),
        static_cast<std::uint32_t>(minor >> 32),
        major,
        static_cast<std::uint32_t>(lane),
    };
    return philox4x32(counter, key_);
}

std::uint64_t CounterRng::bits(Lane lane, std::uint32_t major,
                               std::uint64_t minor) const {
    const auto out = block(lane, major, minor);
    return join(out[0], out[1]);
}

double CounterRng::uniform(Lane lane, std::uint32_t major,
                           std::uint64_t minor) const {
    return to_unit_half_open(bits(lane, major, minor));
}

double CounterRng::uniform_open(Lane lane, std::uint32_t major,
                                std::uint64_t minor) const {
    return to_unit_open(bits(lane, major, minor));
}

double CounterRng::normal(Lane lane, std::uint32_t major,
                          std::uint64_t minor) const {
    const auto out = block(lane, major, minor);
    const double u1 = to_unit_half_open(join(out[0], out[1]));
    const double u2 = to_unit_half_open(join(out[2], out[3]));
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * M_PI * u2);
}

} // namespace rankdiff
