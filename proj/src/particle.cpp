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

#include "rankdiff/particle.hpp"

#include <algorithm>
#include <numeric>

#include "rankdiff/init_law.hpp"

namespace rankdiff {

double EmpiricalMeasure::cdf(double x) const {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(n());
}

double EmpiricalMeasure::cdf_left(double x) const {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(n());
}

EmpiricalMeasure make_empirical(const ParticleState& s) {
    EmpiricalMeasure e;
    e.t = s.t;
    e.sorted = s.positions;
    std::sort(e.sorted.begin(), e.sorted.end());
    return e;
}

namespace detail {

void compute_ranks(std::span<const double> positions, std::vector<int>& order,
                   std::vector<int>& rank) {
    const int n = static_cast<int>(positions.size());
    order.resize(n);
    rank.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&positions](int a, int b) {
        if (positions[a] != positions[b]) return positions[a] < positions[b];
        return a < b; // deterministic order among exact ties
    });
    int k = 0;
    while (k < n) {
        int e = k;
        while (e + 1 < n && positions[order[e + 1]] == positions[order[k]]) ++e;
        for (int q = k; q <= e; ++q) rank[order[q]] = e + 1;
        k = e + 1;
    }
}

} // namespace detail

std::vector<double> rank_cdf_values(const ParticleState& s) {
    std::vector<int> order, rank;
    detail::compute_ranks(s.positions, order, rank);
    std::vector<double> u(s.positions.size());
    const double n = static_cast<double>(s.n());
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = static_cast<double>(rank[i]) / n;
    }
    return u;
}

std::vector<ParticleState> run_replica(const CoefficientModel& m,
                                       const GapRates& rates, double t_final,
                                       double dt,
                                       std::span<const double> checkpoints,
                                       std::uint64_t stream_seed) {
    if (!(dt > 0.0)) throw InvalidStep("dt must be positive");
    const long steps = std::lround(t_final / dt);
    if (steps < 0 ||
        std::fabs(static_cast<double>(steps) * dt - t_final) > 1e-9) {
        throw ConfigError("t_final must be an integer multiple of dt");
    }

    // Map checkpoint times onto step indices.
    std::vector<long> stops;
    stops.reserve(checkpoints.size());
    for (const double t : checkpoints) {
        const long k = std::lround(t / dt);
        if (k < 0 || k > steps || std::fabs(static_cast<double>(k) * dt - t) > 1e-9) {
            throw ConfigError("checkpoint is not a multiple of dt inside [0, t_final]");
        }
        if (!stops.empty() && k <= stops.back()) {
            throw ConfigError("checkpoints must be strictly increasing");
        }
        stops.push_back(k);
    }

    const CounterRng rng(stream_seed);
    ParticleState state = sample_initial_positions(rates, rng);
    const int n = state.n();

    const auto tables = detail::make_step_tables(m, n, dt);
    std::vector<int> order, rank;
    std::vector<double> noise(n);

    std::vector<ParticleState> out;
    out.reserve(stops.size());
    std::size_t next_stop = 0;
    for (long k = 0; k <= steps; ++k) {
        if (next_stop < stops.size() && stops[next_stop] == k) {
            ParticleState snap = state;
            snap.t = checkpoints[next_stop];
            out.push_back(std::move(snap));
            ++next_stop;
        }
        if (k == steps) break;
        detail::compute_ranks(state.positions, order, rank);
        for (int i = 0; i < n; ++i) {
            noise[i] = rng.normal(Lane::step_noise, static_cast<std::uint32_t>(k),
                                  static_cast<std::uint64_t>(i));
        }
        detail::advance_positions(state.positions, rank, tables, noise);
    }
    return out;
}

std::vector<EmpiricalMeasure> simulate(const CoefficientModel& m, int n,
                                       double t_final, double dt,
                                       std::span<const double> checkpoints,
                                       std::uint64_t seed,
                                       std::uint32_t replica) {
    const GapRates rates = compute_gap_rates(m, n);
    const auto states = run_replica(m, rates, t_final, dt, checkpoints,
                                    derive_seed(seed, replica));
    std::vector<EmpiricalMeasure> measures;
    measures.reserve(states.size());
    for (const auto& s : states) measures.push_back(make_empirical(s));
    return measures;
}

std::vector<double> tagged_particle(const CoefficientModel& m,
                                    const PdeSolution& w, double t_final,
                                    double dt, int paths, std::uint64_t seed) {
    const LimitLaw law(m);
    const CounterRng rng(seed);
    return tagged_particle_paths(
        m, w, t_final, dt, paths,
        [&](int p) {
            return law.quantile(
                rng.uniform_open(Lane::tagged_init, 0, static_cast<std::uint64_t>(p)));
        },
        [&](int p, std::uint32_t k) {
            return rng.normal(Lane::tagged_noise, k, static_cast<std::uint64_t>(p));
        });
}

} // namespace rankdiff
