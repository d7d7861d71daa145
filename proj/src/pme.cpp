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

#include "rankdiff/pme.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace rankdiff {

namespace {

void check_grid(const GridCdf& g) {
    if (g.nodes() < 3 || !(g.dx > 0.0)) {
        throw DomainError("grid needs dx > 0 and at least three nodes");
    }
}

// Interior update shared by pme_step and solve_pme.  Reads `in`, writes
// `out`; both include the boundary nodes, which are copied through.
void step_kernel(std::span<const double> in, std::span<double> out,
                 const CoefficientModel& m, double dt, double dx,
                 std::vector<double>& diffusion_scratch) {
    const std::size_t nodes = in.size();
    auto& s = diffusion_scratch;
    s.resize(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
        s[j] = m.diffusion_potential(in[j]);
    }
    const double lam_diff = dt / (dx * dx);
    const double lam_conv = dt / dx;
    out[0] = in[0];
    out[nodes - 1] = in[nodes - 1];
    double flux_left = engquist_osher_flux(m, in[0], in[1]);
    for (std::size_t j = 1; j + 1 < nodes; ++j) {
        const double flux_right = engquist_osher_flux(m, in[j], in[j + 1]);
        out[j] = in[j] + lam_diff * (s[j + 1] - 2.0 * s[j] + s[j - 1]) -
                 lam_conv * (flux_right - flux_left);
        flux_left = flux_right;
    }
}

} // namespace

double GridCdf::value(double x) const {
    if (x <= x_min) return w.front();
    if (x >= x_max()) return w.back();
    const double s = (x - x_min) / dx;
    std::size_t j = static_cast<std::size_t>(s);
    if (j >= w.size() - 1) j = w.size() - 2;
    const double frac = s - static_cast<double>(j);
    return w[j] + frac * (w[j + 1] - w[j]);
}

double cfl_dt(const CoefficientModel& m, double dx, double safety) {
    if (!(dx > 0.0)) throw DomainError("dx must be positive");
    if (!(safety > 0.0 && safety <= 1.0)) {
        throw DomainError("CFL safety must lie in (0, 1]");
    }
    const double max_slope = 0.5 * m.max_variance();
    const double max_speed = m.max_abs_drift();
    return safety / (2.0 * max_slope / (dx * dx) + max_speed / dx);
}

double engquist_osher_flux(const CoefficientModel& m, double a, double b) {
    const double star = m.drift_sign_change();
    return m.drift_potential(std::min(a, star)) +
           m.drift_potential(std::max(b, star)) - m.drift_potential(star);
}

GridCdf pme_step(const GridCdf& g, const CoefficientModel& m, double dt) {
    check_grid(g);
    if (!(dt > 0.0)) throw InvalidStep("dt must be positive");
    if (dt > cfl_dt(m, g.dx, 1.0) * (1.0 + 1e-12)) {
        throw CflViolation("dt exceeds the CFL bound for this grid");
    }
    GridCdf out = g;
    std::vector<double> scratch;
    step_kernel(g.w, out.w, m, dt, g.dx, scratch);
    out.t = g.t + dt;
    return out;
}

double PdeSolution::value(double t, double x) const {
    if (snapshots.empty()) throw DomainError("empty PDE solution");
    if (t <= snapshots.front().t) return snapshots.front().value(x);
    if (t >= snapshots.back().t) return snapshots.back().value(x);
    std::size_t hi = 1;
    while (snapshots[hi].t < t) ++hi;
    const GridCdf& a = snapshots[hi - 1];
    const GridCdf& b = snapshots[hi];
    const double frac = (t - a.t) / (b.t - a.t);
    return a.value(x) + frac * (b.value(x) - a.value(x));
}

const GridCdf& PdeSolution::snapshot_at(double t) const {
    for (const auto& s : snapshots) {
        if (std::fabs(s.t - t) <= 1e-9) return s;
    }
    throw DomainError("no PDE snapshot at the requested time");
}

PdeSolution solve_pme(const GridCdf& initial, const CoefficientModel& m,
                      double t_final, std::span<const double> checkpoints,
                      double safety, std::optional<double> dt_override) {
    check_grid(initial);
    if (!(t_final >= 0.0)) throw DomainError("t_final must be nonnegative");
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 0.0 || checkpoints[i] > t_final) {
            throw DomainError("checkpoint outside [0, t_final]");
        }
        if (i > 0 && !(checkpoints[i] > checkpoints[i - 1])) {
            throw DomainError("checkpoints must be strictly increasing");
        }
    }
    if (dt_override) {
        if (!(*dt_override > 0.0)) throw InvalidStep("dt must be positive");
        if (*dt_override > cfl_dt(m, initial.dx, 1.0) * (1.0 + 1e-12)) {
            throw CflViolation("requested dt exceeds the CFL bound for this grid");
        }
    }

    PdeSolution sol;
    sol.dx = initial.dx;
    sol.dt = dt_override ? *dt_override : cfl_dt(m, initial.dx, safety);
    sol.cfl_safety = safety;

    std::vector<double> cur(initial.w);
    std::vector<double> next(cur.size());
    std::vector<double> scratch;
    double t = initial.t;

    auto snapshot = [&](double at) {
        GridCdf g;
        g.x_min = initial.x_min;
        g.dx = initial.dx;
        g.w = cur;
        g.t = at;
        sol.snapshots.push_back(std::move(g));
    };

    for (const double target : checkpoints) {
        while (t < target - 1e-12) {
            const double step = std::min(sol.dt, target - t);
            step_kernel(cur, next, m, step, initial.dx, scratch);
            cur.swap(next);
            t += step;
        }
        t = target;
        snapshot(target);
    }
    return sol;
}

double grid_mean(const GridCdf& g) {
    double mean = 0.0;
    for (int j = 0; j + 1 < g.nodes(); ++j) {
        const double mid = g.node(j) + 0.5 * g.dx;
        mean += mid * (g.w[j + 1] - g.w[j]);
    }
    return mean;
}

double grid_quantile(const GridCdf& g, double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("quantile level outside [0,1]");
    const auto& w = g.w;
    if (u <= w.front()) return g.x_min;
    if (u >= w.back()) return g.x_max();
    const auto it = std::lower_bound(w.begin(), w.end(), u);
    const std::size_t k = static_cast<std::size_t>(it - w.begin());
    const double w_lo = w[k - 1];
    const double w_hi = w[k];
    if (w_hi == w_lo) return g.node(static_cast<int>(k));
    const double frac = (u - w_lo) / (w_hi - w_lo);
    return g.node(static_cast<int>(k - 1)) + frac * g.dx;
}

} // namespace rankdiff
