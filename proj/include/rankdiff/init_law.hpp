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

// Stationary initial condition of the ranked system and its large-N limit.
//
// For an affine model the gaps of the ordered particles are independent
// exponentials; compute_gap_rates evaluates their rates by direct summation
// over the drift samples.  LimitLaw is the N -> infinity law of the
// centered configuration, given in closed form through its quantile
// function.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rankdiff/model.hpp"
#include "rankdiff/particle.hpp"
#include "rankdiff/pme.hpp"
#include "rankdiff/rng.hpp"

namespace rankdiff {

struct GapRates {
    int n = 0;                 // particle count
    std::vector<double> rates; // rates[i-1] is the rate of gap i, i = 1..n-1
};

// Split form of the rates: rate_i = (4 i (n-i) / n) * drift_gap_i / variance_sum_i
// with drift_gap_i the difference of drift averages below and above rank i
// and variance_sum_i the sum of the two adjacent variance samples.
struct GapRateParts {
    std::vector<double> drift_gap;    // must be strictly positive
    std::vector<double> variance_sum; // sigma^2(i/n) + sigma^2((i+1)/n)
};

GapRateParts gap_rate_parts(const CoefficientModel& m, int n);

// Throws NonPositiveRate if any drift gap fails to be positive (a
// non-decreasing drift slipped through validation).
GapRates compute_gap_rates(const CoefficientModel& m, int n);

// 1-based index of the centering particle: 1 + n/2 for even n, (n+1)/2 for
// odd n.
int median_index(int n);

// Uniform variates in (0,1] addressed by gap number 0..n-2.
using IndexedUniform = std::function<double(std::size_t)>;

// Draws the gaps by inverse transform, accumulates the ordered positions
// and recenters so the median-index particle sits at 0 exactly.
ParticleState sample_initial_positions(const GapRates& g,
                                       const IndexedUniform& uniforms);

// Production keying: gap i uses lane initial_gaps, minor index i.
ParticleState sample_initial_positions(const GapRates& g, const CounterRng& rng);

// Partial sums of gap means/variances between the median index and the
// u-quantile index; the centering and scale of the finite-N quantile.
struct QuantileStats {
    double m = 0.0;
    double v = 0.0;
};

QuantileStats quantile_stats(const GapRates& g, double u);

// Limiting initial law: quantile
//   q(u) = -A log(2 - 2u) + B log(2u)
// with A = (c+d)/omega0 (right tail scale) and B = d/omega0 (left tail
// scale).  Strictly increasing, continuously differentiable, with density
// omega0 u(1-u) / (c u + d) at the u-quantile.
class LimitLaw {
public:
    explicit LimitLaw(const CoefficientModel& m);

    double right_tail_scale() const { return a_; }
    double left_tail_scale() const { return b_; }

    double quantile(double u) const; // DomainError outside (0,1)

    // Inverse of the quantile.  Closed form (logistic) when c = 0;
    // bisection to absolute tolerance 1e-12 otherwise.
    double cdf(double x) const;

    // Bisection path regardless of c; kept public as the cross-check for
    // the closed form.
    double cdf_bisection(double x) const;

    double density(double x) const;

    // Antiderivative of the quantile with value 0 at 0; used for exact
    // transport-distance integrals against this law.
    double quantile_antiderivative(double u) const;

private:
    double a_, b_, omega_, c_, d_;
};

// Grid wide enough that the law's CDF is within 1e-8 of {0,1} at the ends,
// then padded by max|drift|*t_final + 6*max volatility*sqrt(t_final).
GridExtent derive_extent(const LimitLaw& law, const CoefficientModel& m,
                         double t_final, double dx);

// CDF of the law sampled on the grid, with the boundary nodes forced to
// exactly 0 and 1.
GridCdf sample_limit_cdf(const LimitLaw& law, const GridExtent& extent);

} // namespace rankdiff
