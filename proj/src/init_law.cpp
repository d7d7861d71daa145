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

#include "rankdiff/init_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rankdiff {

namespace {

// Compensated (Neumaier) accumulation in extended precision.  The gap-rate
// drift averages cancel to a constant for affine drift; keeping the error
// of the prefix sums at the epsilon^2 level lets that constant come out
// correctly rounded, which downstream checks rely on.
struct CompensatedSum {
    long double hi = 0.0L;
    long double lo = 0.0L;

    void add(long double x) {
        const long double t = hi + x;
        if (std::fabs(hi) >= std::fabs(x)) {
            lo += (hi - t) + x;
        } else {
            lo += (x - t) + hi;
        }
        hi = t;
    }

    long double value() const { return hi + lo; }
};

} // namespace

GapRateParts gap_rate_parts(const CoefficientModel& m, int n) {
    if (n < 2) throw DomainError("gap rates need at least two particles");

    // Direct summation of the drift samples at j/n, j = 1..n.
    std::vector<long double> prefix(static_cast<std::size_t>(n) + 1, 0.0L);
    std::vector<long double> suffix(static_cast<std::size_t>(n) + 2, 0.0L);
    {
        CompensatedSum acc;
        for (int j = 1; j <= n; ++j) {
            const long double u = static_cast<long double>(j) / n;
            acc.add(static_cast<long double>(m.mu0()) +
                    static_cast<long double>(m.mu1()) * u);
            prefix[j] = acc.value();
        }
        CompensatedSum back;
        for (int j = n; j >= 1; --j) {
            const long double u = static_cast<long double>(j) / n;
            back.add(static_cast<long double>(m.mu0()) +
                     static_cast<long double>(m.mu1()) * u);
            suffix[j] = back.value();
        }
    }

    GapRateParts parts;
    parts.drift_gap.resize(n - 1);
    parts.variance_sum.resize(n - 1);
    for (int i = 1; i <= n - 1; ++i) {
        const long double num = static_cast<long double>(n - i) * prefix[i] -
                                static_cast<long double>(i) * suffix[i + 1];
        const long double den =
            static_cast<long double>(i) * static_cast<long double>(n - i);
        parts.drift_gap[i - 1] = static_cast<double>(num / den);
        parts.variance_sum[i - 1] =
            m.variance(static_cast<double>(i) / n) +
            m.variance(static_cast<double>(i + 1) / n);
    }
    return parts;
}

GapRates compute_gap_rates(const CoefficientModel& m, int n) {
    const GapRateParts parts = gap_rate_parts(m, n);
    GapRates g;
    g.n = n;
    g.rates.resize(n - 1);
    for (int i = 1; i <= n - 1; ++i) {
        if (!(parts.drift_gap[i - 1] > 0.0)) {
            throw NonPositiveRate("drift averages do not decrease across rank " +
                                  std::to_string(i));
        }
        const double prefactor =
            4.0 * static_cast<double>(i) * static_cast<double>(n - i) / n;
        g.rates[i - 1] =
            prefactor * parts.drift_gap[i - 1] / parts.variance_sum[i - 1];
    }
    return g;
}

int median_index(int n) { return (n % 2 == 0) ? 1 + n / 2 : (n + 1) / 2; }

ParticleState sample_initial_positions(const GapRates& g,
                                       const IndexedUniform& uniforms) {
    const int n = g.n;
    if (n < 2 || static_cast<int>(g.rates.size()) != n - 1) {
        throw DomainError("invalid gap rates");
    }
    ParticleState s;
    s.t = 0.0;
    s.positions.resize(n);
    s.positions[0] = 0.0;
    for (int i = 0; i < n - 1; ++i) {
        const double u = uniforms(static_cast<std::size_t>(i));
        const double gap = -std::log(u) / g.rates[i];
        s.positions[i + 1] = s.positions[i] + gap;
    }
    const double center = s.positions[median_index(n) - 1];
    for (double& x : s.positions) x -= center;
    s.positions[median_index(n) - 1] = 0.0; // exact, not just up to rounding
    return s;
}

ParticleState sample_initial_positions(const GapRates& g, const CounterRng& rng) {
    ParticleState s = sample_initial_positions(g, [&rng](std::size_t i) {
        return rng.uniform(Lane::initial_gaps, 0, i);
    });
    s.seed = rng.key();
    return s;
}

QuantileStats quantile_stats(const GapRates& g, double u) {
    if (g.n < 3) throw DomainError("quantile statistics need n >= 3");
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile level outside (0,1)");
    const int n = g.n;
    const int median = median_index(n);
    const int ceil_un = static_cast<int>(std::ceil(u * static_cast<double>(n)));

    int lo = 0, hi = -1; // inclusive 1-based gap range; empty when lo > hi
    double sign = 1.0;
    if (u > 0.5) {
        lo = median;
        hi = ceil_un - 1;
    } else {
        lo = ceil_un;
        hi = median - 1;
        sign = -1.0;
    }
    QuantileStats qs;
    if (lo > hi) return qs; // empty range convention: (0, 0)
    for (int i = lo; i <= hi; ++i) {
        const double inv = 1.0 / g.rates[i - 1];
        qs.m += inv;
        qs.v += inv * inv;
    }
    qs.m *= sign;
    return qs;
}

LimitLaw::LimitLaw(const CoefficientModel& m)
    : a_((m.c() + m.d()) / m.omega0()),
      b_(m.d() / m.omega0()),
      omega_(m.omega0()),
      c_(m.c()),
      d_(m.d()) {}

double LimitLaw::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile level outside (0,1)");
    return -a_ * std::log(2.0 - 2.0 * u) + b_ * std::log(2.0 * u);
}

double LimitLaw::cdf_bisection(double x) const {
    // The quantile is strictly increasing, so bisect it.  The bracket is
    // widened through the formula itself on the low side; on the high side
    // 1 - 1e-15 already exhausts double resolution next to 1.
    double lo = 1e-15;
    double hi = 1.0 - 1e-15;
    while (quantile(lo) > x && lo > 1e-290) lo *= 1e-2;
    if (quantile(lo) > x) return lo;
    if (quantile(hi) < x) return hi;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (quantile(mid) <= x) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double LimitLaw::cdf(double x) const {
    if (c_ == 0.0) {
        // Logistic closed form with scale B.
        const double z = x / b_;
        double u;
        if (z >= 0.0) {
            u = 1.0 / (1.0 + std::exp(-z));
        } else {
            const double e = std::exp(z);
            u = e / (1.0 + e);
        }
        const double tiny = std::numeric_limits<double>::min();
        return std::clamp(u, tiny, 1.0 - std::numeric_limits<double>::epsilon() / 2);
    }
    return cdf_bisection(x);
}

double LimitLaw::density(double x) const {
    const double u = cdf(x);
    return omega_ * u * (1.0 - u) / (c_ * u + d_);
}

double LimitLaw::quantile_antiderivative(double u) const {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("quantile level outside [0,1]");
    // int_0^u log(2-2s) ds = log 2 - u - (1-u) log(2-2u)
    // int_0^u log(2s) ds   = u log(2u) - u
    const double log2 = std::log(2.0);
    double upper = log2 - u;
    if (u < 1.0) upper -= (1.0 - u) * std::log(2.0 - 2.0 * u);
    double lower = -u;
    if (u > 0.0) lower += u * std::log(2.0 * u);
    return -a_ * upper + b_ * lower;
}

GridExtent derive_extent(const LimitLaw& law, const CoefficientModel& m,
                         double t_final, double dx) {
    if (!(dx > 0.0)) throw DomainError("dx must be positive");
    if (!(t_final >= 0.0)) throw DomainError("t_final must be nonnegative");
    const double tail = 1e-8;
    const double pad = m.max_abs_drift() * t_final +
                       6.0 * std::sqrt(m.max_variance() * t_final);
    const double lo = law.quantile(tail) - pad;
    const double hi = law.quantile(1.0 - tail) + pad;
    GridExtent e;
    e.dx = dx;
    e.x_min = std::floor(lo / dx) * dx;
    e.x_max = std::ceil(hi / dx) * dx;
    return e;
}

GridCdf sample_limit_cdf(const LimitLaw& law, const GridExtent& extent) {
    if (!(extent.dx > 0.0) || !(extent.x_max > extent.x_min)) {
        throw DomainError("invalid grid extent");
    }
    const int cells =
        static_cast<int>(std::lround((extent.x_max - extent.x_min) / extent.dx));
    if (cells < 2) throw DomainError("grid extent shorter than two cells");
    GridCdf g;
    g.x_min = extent.x_min;
    g.dx = extent.dx;
    g.t = 0.0;
    g.w.resize(cells + 1);
    g.w.front() = 0.0;
    g.w.back() = 1.0;
    for (int j = 1; j < cells; ++j) {
        g.w[j] = law.cdf(g.node(j));
    }
    return g;
}

} // namespace rankdiff
