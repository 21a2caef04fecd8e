// Copyright 2026 Tempest Developers
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

#pragma once

#include <cstdint>

namespace tempest {

// splitmix64; used to expand a 64-bit seed into generator state.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent seed for sub-stream `stream` of a master seed.
// Chains and resampling loops each get their own stream so that results
// do not depend on scheduling order.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64_next(s);
    std::uint64_t t = stream ^ 0x6a09e667f3bcc909ULL;
    std::uint64_t b = splitmix64_next(t);
    std::uint64_t c = a ^ b;
    return splitmix64_next(c);
}

// xoshiro256++ (Blackman & Vigna, public-domain reference implementation).
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        // never all-zero state: splitmix64 of any seed is fine
        for (auto& word : state_) word = splitmix64_next(seed);
    }

    std::uint64_t next_u64() {
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

    // uniform in [0, 1), 53 bits
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform ±1 spin
    int next_spin() { return (next_u64() >> 63) ? 1 : -1; }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        // Lemire's rejection-free-ish multiply-shift with widening; bias is
        // negligible for n << 2^64 but we reject to keep it exact.
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        std::uint64_t lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    static Xoshiro256pp substream(std::uint64_t master, std::uint64_t stream) {
        return Xoshiro256pp(derive_stream_seed(master, stream));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

}  // namespace tempest
