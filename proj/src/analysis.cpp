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

#include "rankdiff/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rankdiff/parallel.hpp"

namespace rankdiff {

namespace {

// Right-continuous CDF with finitely many breakpoints: a step function
// (empirical measure) or a piecewise-linear interpolant (grid CDF).
// Between breakpoints both kinds are linear, so sups and integrals of
// differences reduce exactly to the union of breakpoints.
struct CdfView {
    std::vector<double> x; // strictly increasing
    std::vector<double> f; // value at/right of x[k]
    bool step = true;

    double value(double q) const {
        const auto it = std::upper_bound(x.begin(), x.end(), q);
        if (it == x.begin()) return step ? 0.0 : f.front();
        const std::size_t k = static_cast<std::size_t>(it - x.begin()) - 1;
        if (step) return f[k];
        if (k + 1 == x.size()) return f.back();
        const double frac = (q - x[k]) / (x[k + 1] - x[k]);
        return f[k] + frac * (f[k + 1] - f[k]);
    }

    double left(double q) const {
        if (!step) return value(q);
        const auto it = std::lower_bound(x.begin(), x.end(), q);
        if (it == x.begin()) return 0.0;
        return f[static_cast<std::size_t>(it - x.begin()) - 1];
    }
};

CdfView view_of(const EmpiricalMeasure& e) {
    CdfView v;
    v.step = true;
    const int n = e.n();
    v.x.reserve(n);
    v.f.reserve(n);
    int k = 0;
    while (k < n) {
        int end = k;
        while (end + 1 < n && e.sorted[end + 1] == e.sorted[k]) ++end;
        v.x.push_back(e.sorted[k]);
        v.f.push_back(static_cast<double>(end + 1) / n);
        k = end + 1;
    }
    return v;
}

CdfView view_of(const GridCdf& g) {
    CdfView v;
    v.step = false;
    v.x.resize(g.nodes());
    for (int j = 0; j < g.nodes(); ++j) v.x[j] = g.node(j);
    v.f = g.w;
    return v;
}

std::vector<double> merged_breakpoints(const CdfView& a, const CdfView& b) {
    std::vector<double> pts;
    pts.reserve(a.x.size() + b.x.size());
    std::merge(a.x.begin(), a.x.end(), b.x.begin(), b.x.end(),
               std::back_inserter(pts));
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double ks_views(const CdfView& a, const CdfView& b) {
    double worst = 0.0;
    for (const double q : merged_breakpoints(a, b)) {
        worst = std::max(worst, std::fabs(a.value(q) - b.value(q)));
        worst = std::max(worst, std::fabs(a.left(q) - b.left(q)));
    }
    return worst;
}

// Exact integral of |g| over a segment where g is linear with endpoint
// values g0, g1.
double integral_abs_linear(double g0, double g1, double len) {
    if (len <= 0.0) return 0.0;
    if (g0 * g1 >= 0.0) return 0.5 * std::fabs(g0 + g1) * len;
    const double a0 = std::fabs(g0);
    const double a1 = std::fabs(g1);
    return 0.5 * len * (g0 * g0 + g1 * g1) / (a0 + a1);
}

double w1_views(const CdfView& a, const CdfView& b) {
    const std::vector<double> pts = merged_breakpoints(a, b);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double g0 = a.value(pts[k]) - b.value(pts[k]);
        const double g1 = a.left(pts[k + 1]) - b.left(pts[k + 1]);
        total += integral_abs_linear(g0, g1, pts[k + 1] - pts[k]);
    }
    return total;
}

double ks_against_law(const CdfView& a, const LimitLaw& law) {
    double worst = 0.0;
    for (const double q : a.x) {
        const double target = law.cdf(q);
        worst = std::max(worst, std::fabs(a.value(q) - target));
        worst = std::max(worst, std::fabs(a.left(q) - target));
    }
    return worst;
}

double cubic_bspline(double s) {
    const double t = std::fabs(s);
    if (t >= 2.0) return 0.0;
    if (t >= 1.0) {
        const double r = 2.0 - t;
        return r * r * r / 6.0;
    }
    return 2.0 / 3.0 - t * t + 0.5 * t * t * t;
}

double cubic_bspline_d1(double s) {
    const double t = std::fabs(s);
    double d;
    if (t >= 2.0) {
        d = 0.0;
    } else if (t >= 1.0) {
        const double r = 2.0 - t;
        d = -0.5 * r * r;
    } else {
        d = -2.0 * t + 1.5 * t * t;
    }
    return s < 0.0 ? -d : d;
}

double cubic_bspline_d2(double s) {
    const double t = std::fabs(s);
    if (t >= 2.0) return 0.0;
    if (t >= 1.0) return 2.0 - t;
    return -2.0 + 3.0 * t;
}

} // namespace

double ks_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    return ks_views(view_of(a), view_of(b));
}

double ks_distance(const EmpiricalMeasure& a, const GridCdf& b) {
    return ks_views(view_of(a), view_of(b));
}

double ks_distance(const GridCdf& a, const GridCdf& b) {
    return ks_views(view_of(a), view_of(b));
}

double ks_distance(const EmpiricalMeasure& a, const LimitLaw& b) {
    return ks_against_law(view_of(a), b);
}

double ks_distance(const GridCdf& a, const LimitLaw& b) {
    return ks_against_law(view_of(a), b);
}

double w1_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    return w1_views(view_of(a), view_of(b));
}

double w1_distance(const EmpiricalMeasure& a, const GridCdf& b) {
    return w1_views(view_of(a), view_of(b));
}

double w1_distance(const GridCdf& a, const GridCdf& b) {
    return w1_views(view_of(a), view_of(b));
}

double w1_distance(const EmpiricalMeasure& a, const LimitLaw& b) {
    // Quantile-domain form: sum_i int_{(i-1)/n}^{i/n} |x_(i) - q(u)| du with
    // the closed-form antiderivative of q.
    const int n = a.n();
    double total = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double lo = static_cast<double>(i - 1) / n;
        const double hi = static_cast<double>(i) / n;
        const double xi = a.sorted[i - 1];
        double cross = b.cdf(xi);
        cross = std::clamp(cross, lo, hi);
        const double q_lo = b.quantile_antiderivative(lo);
        const double q_cross = b.quantile_antiderivative(cross);
        const double q_hi = b.quantile_antiderivative(hi);
        total += xi * (cross - lo) - (q_cross - q_lo);
        total += (q_hi - q_cross) - xi * (hi - cross);
    }
    return total;
}

double BumpFunction::value(double x) const {
    return cubic_bspline(4.0 * (x - center) / width);
}

double BumpFunction::deriv1(double x) const {
    return cubic_bspline_d1(4.0 * (x - center) / width) * (4.0 / width);
}

double BumpFunction::deriv2(double x) const {
    return cubic_bspline_d2(4.0 * (x - center) / width) * (16.0 / (width * width));
}

std::string BumpFunction::label() const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "bump(center=%g,width=%g)", center, width);
    return buf;
}

std::vector<DistanceReport> lln_report(const RunConfig& cfg, int workers) {
    if (cfg.checkpoints.empty()) {
        throw ConfigError("lln report needs at least one checkpoint");
    }
    const CoefficientModel& m = cfg.model;
    const GapRates rates = compute_gap_rates(m, cfg.n);
    const LimitLaw law(m);
    const GridExtent extent =
        cfg.grid ? *cfg.grid : derive_extent(law, m, cfg.t_final, 0.01);
    const GridCdf initial = sample_limit_cdf(law, extent);
    const PdeSolution pde =
        solve_pme(initial, m, cfg.t_final, cfg.checkpoints, 0.9);

    const std::size_t per_replica = cfg.checkpoints.size();
    std::vector<DistanceReport> rows(static_cast<std::size_t>(cfg.replicas) *
                                     per_replica);
    parallel_for_index(
        static_cast<std::size_t>(cfg.replicas), workers, [&](std::size_t r) {
            const std::uint64_t stream = derive_seed(cfg.seed, r);
            const auto states = run_replica(m, rates, cfg.t_final, cfg.dt,
                                            cfg.checkpoints, stream);
            for (std::size_t k = 0; k < per_replica; ++k) {
                const EmpiricalMeasure emp = make_empirical(states[k]);
                DistanceReport& row = rows[r * per_replica + k];
                row.t = cfg.checkpoints[k];
                row.ks = ks_distance(emp, pde.snapshots[k]);
                row.w1 = w1_distance(emp, pde.snapshots[k]);
                row.n = cfg.n;
                row.seed = stream;
            }
        });
    return rows;
}

std::vector<DistanceSummary> summarize_reports(
    std::span<const DistanceReport> rows) {
    std::vector<DistanceSummary> out;
    std::vector<int> counts;
    for (const auto& row : rows) {
        std::size_t k = 0;
        while (k < out.size() && out[k].t != row.t) ++k;
        if (k == out.size()) {
            out.push_back({row.t, 0.0, 0.0, 0.0, 0.0});
            counts.push_back(0);
        }
        out[k].mean_ks += row.ks;
        out[k].max_ks = std::max(out[k].max_ks, row.ks);
        out[k].mean_w1 += row.w1;
        out[k].max_w1 = std::max(out[k].max_w1, row.w1);
        ++counts[k];
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].mean_ks /= counts[k];
        out[k].mean_w1 /= counts[k];
    }
    return out;
}

std::vector<CapitalPoint> capital_curve(const GridCdf& w, int market_size,
                                        std::span<const int> j_list,
                                        RankQuantile convention) {
    if (market_size < 1) throw DomainError("market size must be at least 1");
    std::vector<CapitalPoint> out;
    out.reserve(j_list.size());
    for (const int j : j_list) {
        if (j < 1 || j > market_size) {
            throw DomainError("rank j outside [1, market_size]");
        }
        double u;
        if (convention == RankQuantile::mid_rank) {
            u = (static_cast<double>(market_size - j) + 0.5) / market_size;
        } else {
            if (j == 1) {
                throw DomainError(
                    "upper-rank convention hits u = 1 at j = 1; use mid_rank");
            }
            u = static_cast<double>(market_size - j + 1) / market_size;
        }
        out.push_back({j, u, grid_quantile(w, u)});
    }
    return out;
}

GapDiagnostics stationary_diagnostics(const GapRates& g, double epsilon,
                                      int replicas, const CounterRng& rng) {
    if (!(epsilon >= 0.0)) throw DomainError("epsilon must be nonnegative");
    if (replicas < 1) throw DomainError("need at least one replica");
    const int n = g.n;
    const int median = median_index(n);

    GapDiagnostics diag;
    {
        // Exact: E|Y_i - Y_median| telescopes over the gap means.
        std::vector<double> cum(n, 0.0);
        for (int j = 1; j < n; ++j) cum[j] = cum[j - 1] + 1.0 / g.rates[j - 1];
        const double center = cum[median - 1];
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += std::fabs(cum[i] - center);
        diag.mean_abs_displacement = acc / n;
    }
    {
        double acc = 0.0;
        std::vector<double> pos(n);
        for (int rep = 0; rep < replicas; ++rep) {
            pos[0] = 0.0;
            for (int i = 0; i < n - 1; ++i) {
                const double u = rng.uniform(Lane::diagnostics,
                                             static_cast<std::uint32_t>(rep),
                                             static_cast<std::uint64_t>(i));
                pos[i + 1] = pos[i] - std::log(u) / g.rates[i];
            }
            // Ordered pairs within epsilon, self-pairs included.
            long count = 0;
            int lo = 0, hi = 0;
            for (int i = 0; i < n; ++i) {
                if (hi < i) hi = i;
                while (hi + 1 < n && pos[hi + 1] - pos[i] <= epsilon) ++hi;
                while (pos[i] - pos[lo] > epsilon) ++lo;
                count += hi - lo + 1;
            }
            acc += static_cast<double>(count) /
                   (static_cast<double>(n) * static_cast<double>(n));
        }
        diag.close_pair_fraction = acc / replicas;
    }
    return diag;
}

} // namespace rankdiff
