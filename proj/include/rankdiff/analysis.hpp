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

// Agreement measures between particle clouds, grid CDFs and the limiting
// law: Kolmogorov-Smirnov and Wasserstein-1 distances, weak-form residuals
// of the mean-field evolution, ranked-capitalization curves and the
// stationary-configuration diagnostics.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rankdiff/config.hpp"
#include "rankdiff/init_law.hpp"
#include "rankdiff/model.hpp"
#include "rankdiff/particle.hpp"
#include "rankdiff/pme.hpp"

namespace rankdiff {

// --- Distribution distances -----------------------------------------------
//
// KS is the sup of |F_a - F_b| over all breakpoints of both arguments,
// evaluating both one-sided limits at atoms.  W1 integrates |F_a - F_b|
// exactly piecewise (empirical CDFs are steps, grid CDFs are piecewise
// linear); against the limiting law the integral is done in the quantile
// domain with the closed-form antiderivative.

double ks_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b);
double ks_distance(const EmpiricalMeasure& a, const GridCdf& b);
double ks_distance(const EmpiricalMeasure& a, const LimitLaw& b);
double ks_distance(const GridCdf& a, const GridCdf& b);
double ks_distance(const GridCdf& a, const LimitLaw& b);

double w1_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b);
double w1_distance(const EmpiricalMeasure& a, const GridCdf& b);
double w1_distance(const EmpiricalMeasure& a, const LimitLaw& b);
double w1_distance(const GridCdf& a, const GridCdf& b);

// --- Weak-form residuals ----------------------------------------------------

// Cubic B-spline bump: support [center - width/2, center + width/2], twice
// continuously differentiable.
struct BumpFunction {
    double center = 0.0;
    double width = 2.0;

    double value(double x) const;
    double deriv1(double x) const;
    double deriv2(double x) const;
    std::string label() const;
};

struct ResidualReport {
    std::string test_id;
    double residual = 0.0;
    std::vector<double> times;
};

namespace detail {

// (xi, g) with g(x, u) = f'(x) drift(u) + f''(x) variance(u) / 2 evaluated
// at u = F_xi(x): exact atom summation for particles, cell-midpoint
// quadrature for grids.
template <class TestFn>
double generator_pairing(const EmpiricalMeasure& xi, const CoefficientModel& m,
                         const TestFn& f) {
    const int n = xi.n();
    double acc = 0.0;
    int k = 0;
    while (k < n) {
        int e = k;
        while (e + 1 < n && xi.sorted[e + 1] == xi.sorted[k]) ++e;
        const double x = xi.sorted[k];
        const double u = static_cast<double>(e + 1) / n; // shared upper rank
        acc += (e - k + 1) *
               (f.deriv1(x) * m.drift(u) + 0.5 * f.deriv2(x) * m.variance(u));
        k = e + 1;
    }
    return acc / n;
}

template <class TestFn>
double generator_pairing(const GridCdf& xi, const CoefficientModel& m,
                         const TestFn& f) {
    double acc = 0.0;
    for (int j = 0; j + 1 < xi.nodes(); ++j) {
        const double mass = xi.w[j + 1] - xi.w[j];
        if (mass == 0.0) continue;
        const double x = xi.node(j) + 0.5 * xi.dx;
        const double u = 0.5 * (xi.w[j] + xi.w[j + 1]);
        acc += mass *
               (f.deriv1(x) * m.drift(u) + 0.5 * f.deriv2(x) * m.variance(u));
    }
    return acc;
}

template <class TestFn>
double test_pairing(const EmpiricalMeasure& xi, const TestFn& f) {
    double acc = 0.0;
    for (const double x : xi.sorted) acc += f.value(x);
    return acc / xi.n();
}

template <class TestFn>
double test_pairing(const GridCdf& xi, const TestFn& f) {
    double acc = 0.0;
    for (int j = 0; j + 1 < xi.nodes(); ++j) {
        acc += f.value(xi.node(j) + 0.5 * xi.dx) * (xi.w[j + 1] - xi.w[j]);
    }
    return acc;
}

} // namespace detail

// Largest defect, over the checkpoints, of the weak identity
//   (xi(t), f) - (xi(0), f) = int_0^t (xi(s), f' drift(F) + f'' variance(F)/2) ds
// with the time integral by the trapezoid rule over the checkpoints.
template <class Measure, class TestFn>
double mv_residual_value(const std::vector<Measure>& path,
                         const CoefficientModel& m, const TestFn& f) {
    if (path.empty()) {
        throw InsufficientCheckpoints("need at least one checkpoint");
    }
    const double base = detail::test_pairing(path.front(), f);
    double integral = 0.0;
    double prev_g = detail::generator_pairing(path.front(), m, f);
    double prev_t = path.front().t;
    double worst = 0.0;
    for (std::size_t k = 1; k < path.size(); ++k) {
        const double t = path[k].t;
        if (!(t > prev_t)) {
            throw InsufficientCheckpoints("checkpoint times must increase");
        }
        const double g = detail::generator_pairing(path[k], m, f);
        integral += 0.5 * (g + prev_g) * (t - prev_t);
        const double lhs = detail::test_pairing(path[k], f) - base;
        worst = std::max(worst, std::fabs(lhs - integral));
        prev_g = g;
        prev_t = t;
    }
    return worst;
}

template <class Measure>
ResidualReport mv_residual(const std::vector<Measure>& path,
                           const CoefficientModel& m, const BumpFunction& f) {
    ResidualReport r;
    r.test_id = f.label();
    r.residual = mv_residual_value(path, m, f);
    r.times.reserve(path.size());
    for (const auto& xi : path) r.times.push_back(xi.t);
    return r;
}

// --- Law of large numbers report -------------------------------------------

struct DistanceReport {
    double t = 0.0;
    double ks = 0.0;
    double w1 = 0.0;
    int n = 0;
    std::uint64_t seed = 0; // per-replica stream key
};

// Runs cfg.replicas particle replicas against the PDE solution started
// from the limiting law and reports KS/W1 at every checkpoint.  Rows are
// ordered by replica then checkpoint and do not depend on `workers`.
std::vector<DistanceReport> lln_report(const RunConfig& cfg, int workers);

// Mean/max of a column of reports sharing a checkpoint time.
struct DistanceSummary {
    double t = 0.0;
    double mean_ks = 0.0;
    double max_ks = 0.0;
    double mean_w1 = 0.0;
    double max_w1 = 0.0;
};

std::vector<DistanceSummary> summarize_reports(
    std::span<const DistanceReport> rows);

// --- Ranked-capitalization curve --------------------------------------------

enum class RankQuantile {
    mid_rank,   // u_j = (market - j + 1/2) / market
    upper_rank, // u_j = (market - j + 1) / market; diverges at j = 1
};

struct CapitalPoint {
    int j = 0;
    double u = 0.0;
    double x = 0.0;
};

std::vector<CapitalPoint> capital_curve(
    const GridCdf& w, int market_size, std::span<const int> j_list,
    RankQuantile convention = RankQuantile::mid_rank);

// --- Stationary-configuration diagnostics -----------------------------------

struct GapDiagnostics {
    // (1/n) sum_i E|Y_i - Y_median|, exact from the rate sums.
    double mean_abs_displacement = 0.0;
    // Monte Carlo estimate of (1/n^2) sum_{i,l} P(|Y_i - Y_l| <= epsilon).
    double close_pair_fraction = 0.0;
};

GapDiagnostics stationary_diagnostics(const GapRates& g, double epsilon,
                                      int replicas, const CounterRng& rng);

} // namespace rankdiff
