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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rankdiff/init_law.hpp"

using namespace rankdiff;

namespace {

const CoefficientModel kStationary(0.5, -1.0, 0.0, 1.0);

// Literal double-loop evaluation of the drift averages, independent of the
// compensated prefix-sum path in gap_rate_parts.
double drift_gap_oracle(const CoefficientModel& m, int n, int i) {
    double below = 0.0;
    for (int j = 1; j <= i; ++j) below += m.drift(static_cast<double>(j) / n);
    double above = 0.0;
    for (int j = i + 1; j <= n; ++j) above += m.drift(static_cast<double>(j) / n);
    return below / i - above / (n - i);
}

} // namespace

TEST_CASE("gap rates by hand") {
    // drift(u) = -u, unit variance: one gap with rate 1/2.
    const CoefficientModel m(0.0, -1.0, 0.0, 1.0);
    const GapRates g = compute_gap_rates(m, 2);
    REQUIRE(g.rates.size() == 1);
    CHECK(g.rates[0] == doctest::Approx(0.5).epsilon(1e-15));

    // Stationary model: rate_i = i(n-i)/n.
    const GapRates g4 = compute_gap_rates(kStationary, 4);
    CHECK(g4.rates[1] == doctest::Approx(1.0).epsilon(1e-15));
    for (const int n : {8, 100, 1000}) {
        const GapRates gn = compute_gap_rates(kStationary, n);
        for (int i = 1; i <= n - 1; ++i) {
            const double oracle =
                static_cast<double>(i) * static_cast<double>(n - i) / n;
            CHECK(gn.rates[i - 1] == doctest::Approx(oracle).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(compute_gap_rates(kStationary, 1), DomainError);
}

TEST_CASE("gap rate parts against the double-loop oracle") {
    const CoefficientModel m(0.3, -0.7, 0.5, 0.8);
    const int n = 37;
    const GapRateParts parts = gap_rate_parts(m, n);
    for (int i = 1; i <= n - 1; ++i) {
        CHECK(parts.drift_gap[i - 1] ==
              doctest::Approx(drift_gap_oracle(m, n, i)).epsilon(1e-12));
        CHECK(parts.variance_sum[i - 1] ==
              m.variance(static_cast<double>(i) / n) +
                  m.variance(static_cast<double>(i + 1) / n));
    }
}

TEST_CASE("affine drift averages collapse to |mu1|/2") {
    for (const double mu1 : {-0.5, -1.0, -2.0, -0.37}) {
        const CoefficientModel m(0.2, mu1, 0.5, 1.0);
        for (const int n : {2, 3, 10, 100, 1000, 10000}) {
            const GapRateParts parts = gap_rate_parts(m, n);
            for (const double d : parts.drift_gap) {
                CHECK(d == doctest::Approx(0.5 * std::fabs(mu1)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("gap rate lower bound holds without tolerance") {
    for (const double mu1 : {-0.5, -1.0, -2.0}) {
        for (const auto& [c, d] :
             std::vector<std::pair<double, double>>{{0, 1}, {1, 1}, {-0.5, 1}}) {
            const CoefficientModel m(0.5 * std::fabs(mu1), mu1, c, d);
            const double bound = m.omega0() / m.max_variance();
            for (int n = 2; n <= 64; ++n) {
                const GapRateParts parts = gap_rate_parts(m, n);
                for (int i = 1; i <= n - 1; ++i) {
                    CHECK(4.0 * parts.drift_gap[i - 1] /
                              parts.variance_sum[i - 1] >=
                          bound);
                }
            }
        }
    }
}

TEST_CASE("median index") {
    CHECK(median_index(2) == 2);
    CHECK(median_index(3) == 2);
    CHECK(median_index(4) == 3);
    CHECK(median_index(10) == 6);
    CHECK(median_index(11) == 6);
}

TEST_CASE("initial positions from forced uniforms") {
    {
        const CoefficientModel m(0.0, -1.0, 0.0, 1.0);
        const GapRates g = compute_gap_rates(m, 2);
        const ParticleState s = sample_initial_positions(
            g, [](std::size_t) { return std::exp(-1.0); });
        REQUIRE(s.n() == 2);
        CHECK(s.positions[1] == 0.0);
        CHECK(s.positions[0] == doctest::Approx(-2.0).epsilon(1e-12));
        CHECK(s.t == 0.0);
    }
    {
        const GapRates g = compute_gap_rates(kStationary, 3);
        const ParticleState s =
            sample_initial_positions(g, [](std::size_t) { return 1.0; });
        CHECK(s.positions == std::vector<double>{0.0, 0.0, 0.0});
    }
}

TEST_CASE("initial positions are ordered and centered") {
    const GapRates g = compute_gap_rates(kStationary, 101);
    const CounterRng rng(12345);
    const ParticleState s = sample_initial_positions(g, rng);
    CHECK(std::is_sorted(s.positions.begin(), s.positions.end()));
    CHECK(s.positions[median_index(101) - 1] == 0.0);
    CHECK(s.seed == 12345);
}

TEST_CASE("sampled gap means match their rates") {
    const int n = 10000;
    const int replicas = 1000;
    const GapRates g = compute_gap_rates(kStationary, n);
    std::vector<double> mean(n - 1, 0.0);
    for (int rep = 0; rep < replicas; ++rep) {
        const CounterRng rng(derive_seed(777, rep));
        for (int i = 0; i < n - 1; ++i) {
            mean[i] += -std::log(rng.uniform(Lane::initial_gaps, 0, i)) /
                       g.rates[i];
        }
    }
    int failures = 0;
    for (int i = 0; i < n - 1; ++i) {
        mean[i] /= replicas;
        const double expected = 1.0 / g.rates[i];
        const double se = expected / std::sqrt(static_cast<double>(replicas));
        if (std::fabs(mean[i] - expected) > 5.0 * se) ++failures;
    }
    // 5-sigma per gap; across ~10^4 gaps even one failure is unexpected.
    CHECK(failures <= 1);
}

TEST_CASE("quantile statistics") {
    const GapRates g8 = compute_gap_rates(kStationary, 8);
    const QuantileStats qs = quantile_stats(g8, 0.75);
    CHECK(qs.m == 8.0 / 15.0); // single term 1/a_5, exact
    CHECK(qs.v == (8.0 / 15.0) * (8.0 / 15.0));
    CHECK(qs.m == doctest::Approx(0.53333).epsilon(1e-4));
    CHECK(qs.v == doctest::Approx(0.28444).epsilon(1e-4));

    // Empty-range convention just above 1/2.
    const QuantileStats empty = quantile_stats(g8, 0.5 + 1.0 / 32.0);
    CHECK(empty.m == 0.0);
    CHECK(empty.v == 0.0);

    const GapRates g1e4 = compute_gap_rates(kStationary, 10000);
    CHECK(std::fabs(quantile_stats(g1e4, 0.75).m - std::log(3.0)) <= 0.02);

    CHECK_THROWS_AS(quantile_stats(g8, 0.0), DomainError);
    CHECK_THROWS_AS(quantile_stats(g8, 1.0), DomainError);
    CHECK_THROWS_AS(quantile_stats(compute_gap_rates(kStationary, 2), 0.7),
                    DomainError);
}

TEST_CASE("quantile statistic is nondecreasing in u") {
    const GapRates g = compute_gap_rates(kStationary, 1000);
    double prev = -1e300;
    for (int k = 1; k <= 39; ++k) {
        const double m = quantile_stats(g, k / 40.0).m;
        CHECK(m >= prev);
        prev = m;
    }
}

TEST_CASE("finite-N quantiles approach the limit quantile") {
    const LimitLaw law(kStationary);
    for (const double u : {0.25, 0.75}) {
        double prev = 1e300;
        for (const int n : {100, 1000, 10000}) {
            const GapRates g = compute_gap_rates(kStationary, n);
            const double err = std::fabs(quantile_stats(g, u).m - law.quantile(u));
            CHECK(err < prev);
            prev = err;
        }
    }
}

TEST_CASE("limit quantile closed form") {
    const LimitLaw law(kStationary); // A = B = 1: standard logistic
    CHECK(law.right_tail_scale() == 1.0);
    CHECK(law.left_tail_scale() == 1.0);
    CHECK(law.quantile(0.5) == 0.0);
    CHECK(law.quantile(0.75) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
    for (int k = 1; k <= 9; ++k) {
        const double u = k / 10.0;
        CHECK(std::fabs(law.quantile(u) + law.quantile(1.0 - u)) < 1e-13);
    }
    CHECK_THROWS_AS(law.quantile(0.0), DomainError);
    CHECK_THROWS_AS(law.quantile(1.0), DomainError);
}

TEST_CASE("limit cdf inverts the quantile") {
    const LimitLaw logistic(kStationary);
    CHECK(logistic.cdf(0.0) == 0.5);
    CHECK(logistic.cdf(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-12));

    // Closed form against bisection on the c = 0 path.
    for (int k = -30; k <= 30; ++k) {
        const double x = k / 10.0;
        CHECK(std::fabs(logistic.cdf(x) - logistic.cdf_bisection(x)) <= 2e-12);
    }

    // Bisection path: c != 0.
    const LimitLaw skew(CoefficientModel(0.5, -1.0, 1.0, 1.0));
    for (int k = 1; k <= 19; ++k) {
        const double u = 0.05 * k;
        CHECK(std::fabs(skew.cdf(skew.quantile(u)) - u) <= 1e-10);
    }
}

TEST_CASE("limit density") {
    const LimitLaw logistic(kStationary);
    CHECK(logistic.density(0.0) == 0.25);

    // Monotone decay in the tails.
    double prev = logistic.density(1.0);
    for (int k = 2; k <= 40; ++k) {
        const double cur = logistic.density(static_cast<double>(k));
        CHECK(cur <= prev + 1e-18);
        prev = cur;
    }
    prev = logistic.density(-1.0);
    for (int k = 2; k <= 40; ++k) {
        const double cur = logistic.density(-static_cast<double>(k));
        CHECK(cur <= prev + 1e-18);
        prev = cur;
    }

    // Centered difference of the CDF, including the bisection path.
    for (const auto& model :
         {kStationary, CoefficientModel(0.5, -1.0, 1.0, 1.0)}) {
        const LimitLaw law(model);
        const double h = 1e-4;
        for (int k = -2; k <= 2; ++k) {
            const double x = static_cast<double>(k);
            const double fd = (law.cdf(x + h) - law.cdf(x - h)) / (2 * h);
            CHECK(fd == doctest::Approx(law.density(x)).epsilon(1e-6));
        }
    }
}

TEST_CASE("quantile antiderivative differentiates to the quantile") {
    const LimitLaw law(CoefficientModel(0.75, -1.5, 0.8, 1.0));
    const double h = 1e-6;
    for (int k = 1; k <= 9; ++k) {
        const double u = k / 10.0;
        const double fd =
            (law.quantile_antiderivative(u + h) -
             law.quantile_antiderivative(u - h)) / (2 * h);
        CHECK(fd == doctest::Approx(law.quantile(u)).epsilon(1e-6));
    }
    CHECK(law.quantile_antiderivative(0.0) == 0.0);
}

TEST_CASE("limit law grid sampling") {
    const LimitLaw law(kStationary);
    const GridExtent extent = derive_extent(law, kStationary, 1.0, 0.01);
    CHECK(extent.x_min <= law.quantile(1e-8) - 6.0);
    CHECK(extent.x_max >= law.quantile(1.0 - 1e-8) + 6.0);

    const GridCdf g = sample_limit_cdf(law, extent);
    CHECK(g.w.front() == 0.0);
    CHECK(g.w.back() == 1.0);
    CHECK(std::is_sorted(g.w.begin(), g.w.end()));
    const int mid = g.nodes() / 2;
    CHECK(g.w[mid] == doctest::Approx(law.cdf(g.node(mid))).epsilon(1e-12));
}
