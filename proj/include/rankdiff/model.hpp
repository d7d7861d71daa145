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

#pragma once

#include <concepts>
#include <vector>

#include "rankdiff/errors.hpp"

namespace rankdiff {

// Affine coefficient pair on [0,1]:
//
//   drift(u)    = mu0 + mu1 * u          with mu1 < 0
//   variance(u) = c * u + d              with d > 0 and c + d > 0
//
// Immutable after construction; safe to share across threads.
class CoefficientModel {
public:
    // Validates the parameters; throws NonDecreasingDrift or
    // DegenerateDiffusion on violations.
    CoefficientModel(double mu0, double mu1, double c, double d);

    double mu0() const { return mu0_; }
    double mu1() const { return mu1_; }
    double c() const { return c_; }
    double d() const { return d_; }

    // Decay constant of the drift: |mu1|.
    double omega0() const { return omega0_; }

    double drift(double u) const;
    double variance(double u) const;
    double volatility(double u) const;

    // Antiderivative of the drift with value 0 at 0.
    double drift_potential(double w) const;
    // Antiderivative of variance/2 with value 0 at 0.
    double diffusion_potential(double w) const;

    // Point in [0,1] where the drift changes sign (clamped to the ends when
    // the drift keeps one sign on the whole interval).
    double drift_sign_change() const;

    double min_variance() const;
    double max_variance() const;
    double max_abs_drift() const;

private:
    double mu0_, mu1_, c_, d_, omega0_;
};

// Functional form of the validating constructor.
CoefficientModel validate_model(double mu0, double mu1, double c, double d);

// Strictly decreasing drift given by samples at k/(m-1), k = 0..m-1,
// interpolated linearly; the variance stays affine.  The simulation engine
// accepts this through the same evaluation interface as the affine model;
// closed forms (gap rates, limit law) remain affine-only.
class TabulatedModel {
public:
    // Requires at least two samples.  Monotonicity is checked on a
    // 1000-point grid of the interpolant; throws NonDecreasingDrift.
    TabulatedModel(std::vector<double> drift_samples, double c, double d);

    double drift(double u) const;
    double variance(double u) const;
    double volatility(double u) const;

    // Antiderivative of the drift, computed by trapezoidal quadrature with
    // step halving to an absolute tolerance of 1e-8.
    double drift_potential(double w) const;
    double diffusion_potential(double w) const;

private:
    std::vector<double> samples_;
    double c_, d_;
};

template <class M>
concept Coefficients = requires(const M& m, double u) {
    { m.drift(u) } -> std::convertible_to<double>;
    { m.volatility(u) } -> std::convertible_to<double>;
};

namespace detail {

inline void require_unit_interval(double u, const char* what) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw DomainError(std::string(what) + " outside [0,1]");
    }
}

} // namespace detail

} // namespace rankdiff
