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

// Counter-based random streams (Philox4x32-10, Salmon et al. SC 2011).
//
// Every variate is a pure function of (key, lane, major, minor), so a
// simulation replica produces the same bits no matter how its work is
// scheduled across threads.  Replicas get independent streams by deriving
// per-replica keys from the experiment seed with a splitmix64 step.

#pragma once

#include <array>
#include <cstdint>

namespace rankdiff {

// One 10-round Philox4x32 block.  Pure function of counter and key.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Finalizer of the splitmix64 generator; bijective on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x);

// Key for sub-stream `index` of the stream keyed by `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Disjoint draw families sharing one key.
enum class Lane : std::uint32_t {
    initial_gaps = 1, // stationary gap sampling, minor = gap index
    step_noise = 2,   // diffusion increments, major = step, minor = particle
    tagged_init = 3,  // tagged-particle initial quantile draws, minor = path
    tagged_noise = 4, // tagged-particle increments, major = step, minor = path
    diagnostics = 5,  // Monte Carlo diagnostics, major = replica, minor = gap
};

class CounterRng {
public:
    explicit CounterRng(std::uint64_t key)
        : key_{static_cast<std::uint32_t>(key),
               static_cast<std::uint32_t>(key >> 32)} {}

    std::uint64_t key() const {
        return static_cast<std::uint64_t>(key_[0]) |
               (static_cast<std::uint64_t>(key_[1]) << 32);
    }

    // Raw 64 bits for (lane, major, minor).
    std::uint64_t bits(Lane lane, std::uint32_t major, std::uint64_t minor) const;

    // Uniform on (0, 1]; safe under log().
    double uniform(Lane lane, std::uint32_t major, std::uint64_t minor) const;

    // Uniform on the open interval (0, 1); safe under quantile functions
    // that diverge at both ends.
    double uniform_open(Lane lane, std::uint32_t major, std::uint64_t minor) const;

    // Standard normal via Box-Muller on one Philox block.
    double normal(Lane lane, std::uint32_t major, std::uint64_t minor) const;

private:
    std::array<std::uint32_t, 4> block(Lane lane, std::uint32_t major,
                                       std::uint64_t minor) const;

    std::array<std::uint32_t, 2> key_;
};

} // namespace rankdiff
