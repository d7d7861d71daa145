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

#include "rankdiff/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

namespace rankdiff {

CoefficientModel::CoefficientModel(double mu0, double mu1, double c, double d)
    : mu0_(mu0), mu1_(mu1), c_(c), d_(d), omega0_(std::fabs(mu1)) {
    if (!(mu1 < 0.0)) {
        throw NonDecreasingDrift("drift slope mu1 must be strictly negative");
    }
    if (!(d > 0.0) || !(c + d > 0.0)) {
        throw DegenerateDiffusion(
            "variance must be strictly positive on [0,1]: need d > 0 and c + d > 0");
    }
}

double CoefficientModel::drift(double u) const {
    detail::require_unit_interval(u, "drift argument");
    return mu0_ + mu1_ * u;
}

double CoefficientModel::variance(double u) const {
    detail::require_unit_interval(u, "variance argument");
    return c_ * u + d_;
}

double CoefficientModel::volatility(double u) const {
    return std::sqrt(variance(u));
}

double CoefficientModel::drift_potential(double w) const {
    detail::require_unit_interval(w, "drift potential argument");
    return mu0_ * w + 0.5 * mu1_ * w * w;
}

double CoefficientModel::diffusion_potential(double w) const {
    detail::require_unit_interval(w, "diffusion potential argument");
    return 0.25 * c_ * w * w + 0.5 * d_ * w;
}

double CoefficientModel::drift_sign_change() const {
    return std::clamp(mu0_ / omega0_, 0.0, 1.0);
}

double CoefficientModel::min_variance() const { return std::min(d_, c_ + d_); }

double CoefficientModel::max_variance() const { return std::max(d_, c_ + d_); }

double CoefficientModel::max_abs_drift() const {
    return std::max(std::fabs(mu0_), std::fabs(mu0_ + mu1_));
}

CoefficientModel validate_model(double mu0, double mu1, double c, double d) {
    return CoefficientModel(mu0, mu1, c, d);
}

TabulatedModel::TabulatedModel(std::vector<double> drift_samples, double c,
                               double d)
    : samples_(std::move(drift_samples)), c_(c), d_(d) {
    if (samples_.size() < 2) {
        throw ModelError("tabulated drift needs at least two samples");
    }
    if (!(d > 0.0) || !(c + d > 0.0)) {
        throw DegenerateDiffusion(
            "variance must be strictly positive on [0,1]: need d > 0 and c + d > 0");
    }
    constexpr int kGrid = 1000;
    double prev = drift(0.0);
    for (int k = 1; k <= kGrid; ++k) {
        const double cur = drift(static_cast<double>(k) / kGrid);
        if (!(cur < prev)) {
            throw NonDecreasingDrift("tabulated drift is not strictly decreasing");
        }
        prev = cur;
    }
}

double TabulatedModel::drift(double u) const {
    detail::require_unit_interval(u, "drift argument");
    const std::size_t cells = samples_.size() - 1;
    const double s = u * static_cast<double>(cells);
    std::size_t k = static_cast<std::size_t>(s);
    if (k >= cells) k = cells - 1;
    const double frac = s - static_cast<double>(k);
    return samples_[k] + frac * (samples_[k + 1] - samples_[k]);
}

double TabulatedModel::variance(double u) const {
    detail::require_unit_interval(u, "variance argument");
    return c_ * u + d_;
}

double TabulatedModel::volatility(double u) const {
    return std::sqrt(variance(u));
}

double TabulatedModel::drift_potential(double w) const {
    detail::require_unit_interval(w, "drift potential argument");
    if (w == 0.0) return 0.0;
    // Trapezoidal quadrature of the interpolant with step halving.
    constexpr double kTol = 1e-8;
    constexpr int kMaxDoublings = 24;
    std::size_t intervals = std::max<std::size_t>(samples_.size() - 1, 8);
    auto trapezoid = [&](std::size_t m) {
        double sum = 0.5 * (drift(0.0) + drift(w));
        for (std::size_t k = 1; k < m; ++k) {
            sum += drift(w * static_cast<double>(k) / static_cast<double>(m));
        }
        return sum * w / static_cast<double>(m);
    };
    double value = trapezoid(intervals);
    for (int pass = 0; pass < kMaxDoublings; ++pass) {
        intervals *= 2;
        const double refined = trapezoid(intervals);
        const double change = std::fabs(refined - value);
        value = refined;
        if (change <= kTol) break;
    }
    return value;
}

double TabulatedModel::diffusion_potential(double w) const {
    detail::require_unit_interval(w, "diffusion potential argument");
    return 0.25 * c_ * w * w + 0.5 * d_ * w;
}

} // namespace rankdiff
