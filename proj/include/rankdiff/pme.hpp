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

// Explicit monotone finite-volume solver for the limiting CDF equation
//
//   dw/dt = d^2/dx^2 S(w) - d/dx T(w)
//
// where S is the diffusion potential and T the drift potential of a
// CoefficientModel.  Central differences for the diffusion term,
// Engquist-Osher flux for the convection term, Dirichlet 0/1 boundaries.
// Under the CFL bound the update is monotone, so values stay in [0,1] and
// monotone profiles stay monotone.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rankdiff/model.hpp"

namespace rankdiff {

// CDF sample w(t, x) on the uniform grid x_min + j*dx, j = 0..J.
// Builders keep w[0] = 0 and w[J] = 1 (Dirichlet boundaries).
struct GridCdf {
    double x_min = 0.0;
    double dx = 0.0;
    std::vector<double> w;
    double t = 0.0;

    int nodes() const { return static_cast<int>(w.size()); }
    double x_max() const { return x_min + dx * static_cast<double>(nodes() - 1); }
    double node(int j) const { return x_min + dx * static_cast<double>(j); }

    // Linear interpolation between nodes, constant 0/1 outside the grid.
    double value(double x) const;
};

struct GridExtent {
    double x_min = 0.0;
    double x_max = 0.0;
    double dx = 0.0;
};

// Largest stable explicit step at the given safety factor in (0, 1]:
// dt = safety / (2 max S' / dx^2 + max|drift| / dx).
double cfl_dt(const CoefficientModel& m, double dx, double safety);

// Engquist-Osher numerical flux for the convection term: splits the drift
// potential at the sign change of the drift.
double engquist_osher_flux(const CoefficientModel& m, double a, double b);

// One explicit step; throws CflViolation when dt exceeds cfl_dt(m, dx, 1).
GridCdf pme_step(const GridCdf& g, const CoefficientModel& m, double dt);

struct PdeSolution {
    std::vector<GridCdf> snapshots; // strictly increasing times, shared grid
    double dx = 0.0;
    double dt = 0.0; // interior step actually used
    double cfl_safety = 0.0;

    // w(t, x): linear interpolation in time between snapshots (clamped to
    // the first/last snapshot outside their range) and in space on the grid.
    double value(double t, double x) const;

    // Snapshot with time closest to t within 1e-9; throws DomainError if
    // no checkpoint matches.
    const GridCdf& snapshot_at(double t) const;
};

// Marches from `initial` to each checkpoint time with steps of size
// cfl_dt(m, dx, safety); the final sub-step before each checkpoint is
// shortened so checkpoints land exactly.  A dt_override replaces the
// CFL-derived step and is rejected (CflViolation) when unstable.
PdeSolution solve_pme(const GridCdf& initial, const CoefficientModel& m,
                      double t_final, std::span<const double> checkpoints,
                      double safety = 0.9,
                      std::optional<double> dt_override = std::nullopt);

// Mean of the measure dw, by summation over cell increments.
double grid_mean(const GridCdf& g);

// Monotone quantile of a grid CDF by linear interpolation.
double grid_quantile(const GridCdf& g, double u);

} // namespace rankdiff
