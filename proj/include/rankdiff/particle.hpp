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

// The N-particle rank-based diffusion: every particle moves with drift and
// volatility read off the empirical CDF at its own position, i.e. off its
// rank.  Explicit Euler-Maruyama with coefficients frozen at the start of
// each step and a full re-ranking per step.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "rankdiff/model.hpp"
#include "rankdiff/pme.hpp"
#include "rankdiff/rng.hpp"

namespace rankdiff {

struct GapRates;

struct ParticleState {
    double t = 0.0;
    std::vector<double> positions; // indexed by particle id
    std::uint64_t seed = 0;        // stream key that produced the trajectory

    int n() const { return static_cast<int>(positions.size()); }
};

// Atoms of mass 1/n at the sorted positions.
struct EmpiricalMeasure {
    double t = 0.0;
    std::vector<double> sorted; // ascending

    int n() const { return static_cast<int>(sorted.size()); }
    double cdf(double x) const;      // right-continuous
    double cdf_left(double x) const; // left limit
};

EmpiricalMeasure make_empirical(const ParticleState& s);

namespace detail {

// 1-based ranks; tied positions share the maximal rank of their block,
// matching the right-continuous empirical CDF.  `order` and `rank` are
// caller-owned scratch reused across steps.
void compute_ranks(std::span<const double> positions, std::vector<int>& order,
                   std::vector<int>& rank);

// Per-rank coefficient tables: the empirical CDF value of a particle is
// always rank/n, so drift*dt and volatility*sqrt(dt) only ever need the n
// values at u = r/n.
struct StepTables {
    std::vector<double> drift_dt;
    std::vector<double> vol_sqdt;
};

template <Coefficients M>
StepTables make_step_tables(const M& m, int n, double dt) {
    StepTables t;
    t.drift_dt.resize(n);
    t.vol_sqdt.resize(n);
    const double sq = std::sqrt(dt);
    for (int r = 1; r <= n; ++r) {
        const double u = static_cast<double>(r) / n;
        t.drift_dt[r - 1] = m.drift(u) * dt;
        t.vol_sqdt[r - 1] = m.volatility(u) * sq;
    }
    return t;
}

inline void advance_positions(std::span<double> pos, std::span<const int> rank,
                              const StepTables& tables,
                              std::span<const double> noise) {
    for (std::size_t i = 0; i < pos.size(); ++i) {
        const int r = rank[i] - 1;
        pos[i] += tables.drift_dt[r] + tables.vol_sqdt[r] * noise[i];
    }
}

} // namespace detail

// Empirical CDF values rank/n per particle id (ties share the block's
// upper rank).
std::vector<double> rank_cdf_values(const ParticleState& s);

// One explicit Euler-Maruyama step with the supplied standard-normal
// increments; coefficients are frozen at the step's start.
template <Coefficients M>
ParticleState em_step(const ParticleState& s, const M& m, double dt,
                      std::span<const double> noise) {
    if (!(dt > 0.0)) throw InvalidStep("dt must be positive");
    if (noise.size() != s.positions.size()) {
        throw InvalidStep("noise vector length must match particle count");
    }
    const auto tables = detail::make_step_tables(m, s.n(), dt);
    std::vector<int> order, rank;
    detail::compute_ranks(s.positions, order, rank);
    ParticleState out = s;
    detail::advance_positions(out.positions, rank, tables, noise);
    out.t = s.t + dt;
    return out;
}

// One replica from the stationary-gap initial condition to t_final,
// recording the state at each checkpoint time (multiples of dt).  All
// randomness is keyed off `stream_seed`; the result is a pure function of
// its arguments.
std::vector<ParticleState> run_replica(const CoefficientModel& m,
                                       const GapRates& rates, double t_final,
                                       double dt,
                                       std::span<const double> checkpoints,
                                       std::uint64_t stream_seed);

// Replica `replica` of the experiment keyed by `seed`; returns the
// empirical measures at the checkpoints.
std::vector<EmpiricalMeasure> simulate(const CoefficientModel& m, int n,
                                       double t_final, double dt,
                                       std::span<const double> checkpoints,
                                       std::uint64_t seed,
                                       std::uint32_t replica = 0);

// Single tagged particle driven by a precomputed CDF flow w:
// dX = drift(w(t, X)) dt + volatility(0) dW.  Requires constant volatility
// (c = 0); initial positions and increments are supplied by callables so
// tests can inject deterministic values.
template <class InitFn, class NoiseFn>
std::vector<double> tagged_particle_paths(const CoefficientModel& m,
                                          const PdeSolution& w, double t_final,
                                          double dt, int paths, InitFn&& init,
                                          NoiseFn&& noise) {
    if (m.c() != 0.0) {
        throw ModelError("tagged particle requires constant volatility (c = 0)");
    }
    if (!(dt > 0.0)) throw InvalidStep("dt must be positive");
    const double steps_real = t_final / dt;
    const long steps = std::lround(steps_real);
    if (std::fabs(static_cast<double>(steps) * dt - t_final) > 1e-9) {
        throw ConfigError("t_final must be an integer multiple of dt");
    }
    const double vol_sqdt = m.volatility(0.0) * std::sqrt(dt);
    std::vector<double> terminal(paths);
    for (int p = 0; p < paths; ++p) {
        double x = init(p);
        for (long k = 0; k < steps; ++k) {
            const double t = static_cast<double>(k) * dt;
            const double u = std::clamp(w.value(t, x), 0.0, 1.0);
            x += m.drift(u) * dt + vol_sqdt * noise(p, static_cast<std::uint32_t>(k));
        }
        terminal[p] = x;
    }
    return terminal;
}

// Production wrapper: initial draws from the limiting law via its quantile
// function, increments from the counter-based stream keyed by `seed`.
std::vector<double> tagged_particle(const CoefficientModel& m,
                                    const PdeSolution& w, double t_final,
                                    double dt, int paths, std::uint64_t seed);

} // namespace rankdiff
