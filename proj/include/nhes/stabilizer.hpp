/*
 Copyright 2026 The nonholo-es Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef NHES_STABILIZER_HPP
#define NHES_STABILIZER_HPP

#include "nhes/system_model.hpp"

namespace nhes {

/// Stabilizer gain gamma1 and sampling period epsilon.
struct StabilizerGains {
    double gamma1 = 1.0;
    double epsilon = 0.1;

    std::vector<std::string> problems() const {
        std::vector<std::string> errors;
        if (!(gamma1 > 0.0) || !std::isfinite(gamma1)) errors.push_back("gamma1 must be positive");
        if (!(epsilon > 0.0) || !std::isfinite(epsilon)) errors.push_back("epsilon must be positive");
        return errors;
    }

    /// epsilon * gamma1 < 1, needed by the constructive bounds (not by the simulator).
    bool sampling_condition() const { return epsilon * gamma1 < 1.0; }
};

/**
 * Coefficients a(x, xi) split into the S1 block (first `s1_count` entries)
 * and the S2 block, in frame-column order.
 */
struct CoefficientVector {
    Vector values;
    int s1_count = 0;

    auto s1() const { return values.head(s1_count); }
    auto s2() const { return values.tail(values.size() - s1_count); }
    double s1_at(int k) const { return values[k]; }
    double s2_at(int k) const { return values[s1_count + k]; }

    bool operator==(const CoefficientVector& other) const {
        return s1_count == other.s1_count && values.size() == other.values.size() &&
               (values.array() == other.values.array()).all();
    }
};

/// a(x, xi) = -gamma1 F^{-1}(x) (x - xi)
inline CoefficientVector coefficients(const FrameMatrix& frame, const StabilizerGains& gains,
                                      const Vector& x, const Vector& xi) {
    frame.system().require_in_domain(xi);
    CoefficientVector a;
    a.values = -gains.gamma1 * frame.solve(x, x - xi);
    a.s1_count = static_cast<int>(frame.selection().s1.size());
    return a;
}

/// sign with sign(0) = 0.
inline double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// Only the S2 (oscillating) part of the control.
inline Vector control_oscillation(const BracketSelection& sel, const StabilizerGains& gains,
                                  const CoefficientVector& coeffs, double t, int input_dim) {
    Vector u = Vector::Zero(input_dim);
    const double scale = std::sqrt(4.0 * kPi / gains.epsilon);
    for (std::size_t p = 0; p < sel.s2.size(); ++p) {
        const double a = coeffs.s2_at(static_cast<int>(p));
        if (a == 0.0) continue;
        const double kappa = sel.kappa[p];
        const double amp = scale * std::sqrt(kappa * std::abs(a));
        const double arg = 2.0 * kPi * kappa * t / gains.epsilon;
        u[sel.s2[p].first] += amp * sign0(a) * std::cos(arg);
        u[sel.s2[p].second] += amp * std::sin(arg);
    }
    return u;
}

/// Stabilizing control u(t) with frozen coefficients; t is absolute time.
inline Vector control_value(const BracketSelection& sel, const StabilizerGains& gains,
                            const CoefficientVector& coeffs, double t, int input_dim) {
    Vector u = control_oscillation(sel, gains, coeffs, t, input_dim);
    for (std::size_t k = 0; k < sel.s1.size(); ++k) u[sel.s1[k]] += coeffs.s1_at(static_cast<int>(k));
    return u;
}

/// Supremum over t of |oscillating part of u_i|, per input.
inline Vector oscillation_amplitude_bound(const BracketSelection& sel, const StabilizerGains& gains,
                                          const CoefficientVector& coeffs, int input_dim) {
    Vector bound = Vector::Zero(input_dim);
    const double scale = std::sqrt(4.0 * kPi / gains.epsilon);
    for (std::size_t p = 0; p < sel.s2.size(); ++p) {
        const double amp = scale * std::sqrt(sel.kappa[p] * std::abs(coeffs.s2_at(static_cast<int>(p))));
        bound[sel.s2[p].first] += amp;
        bound[sel.s2[p].second] += amp;
    }
    return bound;
}

/// Sample instants t_j = epsilon j up to and including the last t_j <= horizon.
inline std::vector<double> hold_schedule(const StabilizerGains& gains, double horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("hold_schedule: horizon must be positive");
    if (!(gains.epsilon > 0.0)) throw std::invalid_argument("hold_schedule: epsilon must be positive");
    std::vector<double> instants;
    const double limit = horizon * (1.0 + 1e-12);
    for (long long j = 0;; ++j) {
        const double t = gains.epsilon * static_cast<double>(j);
        if (t > limit) break;
        instants.push_back(t);
    }
    return instants;
}

}  // namespace nhes

#endif  // NHES_STABILIZER_HPP
