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
#ifndef NHES_SEEKER_HPP
#define NHES_SEEKER_HPP

#include "nhes/core.hpp"

#include <optional>

namespace nhes {

/// Where a generating pair is defined.
enum class PairDomain {
    real_line,    ///< all z
    positive,     ///< z > 0
    nonnegative,  ///< z > 0 by formula, value 0 at z = 0
};

using ScalarFunction = std::function<double(double)>;

/**
 * @brief Generating pair g_j = r sin(phi), g_{j+n} = r cos(phi) with r^2 phi' = gamma2.
 *
 * `direct_sin` / `direct_cos` override the polar evaluation when a closed
 * form is cheaper or exact (e.g. the (z, 1) pair).
 */
struct GeneratingPair {
    std::string name;
    ScalarFunction r;
    ScalarFunction phi;
    double gamma2 = 1.0;
    std::optional<double> zero_at;
    PairDomain domain = PairDomain::real_line;
    ScalarFunction direct_sin;
    ScalarFunction direct_cos;

    bool in_range(double z) const {
        if (!std::isfinite(z)) return false;
        switch (domain) {
            case PairDomain::real_line: return true;
            case PairDomain::positive: return z > 0.0;
            case PairDomain::nonnegative: return z >= 0.0;
        }
        return false;
    }

    void require_in_range(double z) const {
        if (!in_range(z)) {
            std::ostringstream os;
            os << "generating pair '" << name << "' undefined at z = " << z;
            throw DomainError(os.str());
        }
    }

    /// g_j(z)
    double g_sin(double z) const {
        require_in_range(z);
        if (domain == PairDomain::nonnegative && z == 0.0) return 0.0;
        if (direct_sin) return direct_sin(z);
        return r(z) * std::sin(phi(z));
    }

    /// g_{j+n}(z)
    double g_cos(double z) const {
        require_in_range(z);
        if (domain == PairDomain::nonnegative && z == 0.0) return 0.0;
        if (direct_cos) return direct_cos(z);
        return r(z) * std::cos(phi(z));
    }

    /// Generator with zero-based index j in [0, 2n).
    double g(int j, int n, double z) const { return j < n ? g_sin(z) : g_cos(z); }
};

namespace detail {

/// log(e^z - 1) without overflow.
inline double log_expm1(double z) {
    if (z > 30.0) return z + std::log1p(-std::exp(-z));
    return std::log(std::expm1(z));
}

}  // namespace detail

inline std::vector<std::string> pair_names() {
    return {"linear", "bounded", "sqrt_log", "gze18", "tanh_vanishing"};
}

/**
 * @brief Library of generating pairs, scaled to the requested gamma2.
 *
 * Scaling multiplies r by sqrt(gamma2) and keeps phi.
 *   linear          g = (z, 1)                         (r^2 = 1 + z^2, phi = atan z)
 *   bounded         r = 1, phi = z
 *   sqrt_log        r = sqrt z, phi = ln z                          z > 0
 *   gze18           r = sqrt((1 - e^-z)/(1 + e^z)), phi = e^z + 2 ln(e^z - 1)
 *   tanh_vanishing  r = sqrt(tanh(z/2)), phi = 2 ln(e^z - 1) - z     g(0) = 0
 */
inline GeneratingPair pair_library(const std::string& name, double gamma2 = 1.0) {
    if (!(gamma2 > 0.0) || !std::isfinite(gamma2))
        throw std::invalid_argument("pair_library: gamma2 must be positive");
    const double s = std::sqrt(gamma2);
    GeneratingPair p;
    p.name = name;
    p.gamma2 = gamma2;
    if (name == "linear") {
        p.r = [s](double z) { return s * std::sqrt(1.0 + z * z); };
        p.phi = [](double z) { return std::atan(z); };
        p.direct_sin = [s](double z) { return s * z; };
        p.direct_cos = [s](double) { return s; };
        p.domain = PairDomain::real_line;
    } else if (name == "bounded") {
        p.r = [s](double) { return s; };
        p.phi = [](double z) { return z; };
        p.domain = PairDomain::real_line;
    } else if (name == "sqrt_log") {
        p.r = [s](double z) { return s * std::sqrt(z); };
        p.phi = [](double z) { return std::log(z); };
        p.domain = PairDomain::positive;
    } else if (name == "gze18") {
        p.r = [s](double z) { return s * std::sqrt(-std::expm1(-z) / (1.0 + std::exp(z))); };
        p.phi = [](double z) { return std::exp(z) + 2.0 * detail::log_expm1(z); };
        p.domain = PairDomain::nonnegative;
        p.zero_at = 0.0;
    } else if (name == "tanh_vanishing") {
        p.r = [s](double z) { return s * std::sqrt(std::tanh(0.5 * z)); };
        p.phi = [](double z) { return 2.0 * detail::log_expm1(z) - z; };
        p.domain = PairDomain::nonnegative;
        p.zero_at = 0.0;
    } else {
        throw std::invalid_argument("unknown generating pair '" + name + "'");
    }
    return p;
}

/// Derivative step used for pair identities: relative to |z| with an absolute floor.
inline double pair_derivative_step(double z) { return 2.5e-4 * std::max(std::abs(z), 1e-2); }

namespace detail {

inline void require_interior(const GeneratingPair& pair, double z) {
    const bool interior = pair.domain == PairDomain::real_line ? std::isfinite(z) : (z > 0.0 && std::isfinite(z));
    if (!interior) {
        std::ostringstream os;
        os << "generating pair '" << pair.name << "': derivative undefined at boundary point z = " << z;
        throw DomainError(os.str());
    }
}

}  // namespace detail

/// g'_{j+n} g_j - g'_j g_{j+n} at z by central differences; equals -gamma2 for a valid pair.
inline double bracket_gain(const GeneratingPair& pair, double z) {
    detail::require_interior(pair, z);
    const double h = pair_derivative_step(z);
    const double ds = five_point_derivative([&](double w) { return pair.g_sin(w); }, z, h);
    const double dc = five_point_derivative([&](double w) { return pair.g_cos(w); }, z, h);
    return dc * pair.g_sin(z) - ds * pair.g_cos(z);
}

/// r(z)^2 phi'(z), phi' by central differences; equals gamma2 for a valid pair.
inline double amplitude_phase_product(const GeneratingPair& pair, double z) {
    detail::require_interior(pair, z);
    const double h = pair_derivative_step(z);
    const double rv = pair.r(z);
    return rv * rv * five_point_derivative(pair.phi, z, h);
}

/**
 * @brief Dither frequencies k_j, period mu and slow-down factor eta >= 1.
 */
struct DitherSchedule {
    std::vector<int> k;
    double mu = 1.0;
    double eta = 1.0;

    /// k_j = j
    static DitherSchedule with_default_k(int n, double mu, double eta = 1.0) {
        DitherSchedule s{{}, mu, eta};
        for (int j = 1; j <= n; ++j) s.k.push_back(j);
        return s;
    }

    int dim() const { return static_cast<int>(k.size()); }
    int k_max() const {
        int m = 0;
        for (int v : k) m = std::max(m, v);
        return m;
    }
    /// Common period of all dithers (eta mu).
    double period() const { return eta * mu; }

    std::vector<std::string> problems() const {
        std::vector<std::string> errors;
        if (k.empty()) errors.push_back("dither frequency list k must be nonempty");
        for (std::size_t a = 0; a < k.size(); ++a) {
            if (k[a] < 1) errors.push_back("dither frequencies k must be naturals >= 1");
            for (std::size_t b = a + 1; b < k.size(); ++b) {
                if (k[a] == k[b]) errors.push_back("dither frequencies k must be pairwise distinct");
            }
        }
        if (!(mu > 0.0) || !std::isfinite(mu)) errors.push_back("mu must be positive");
        if (!(eta >= 1.0) || !std::isfinite(eta)) errors.push_back("eta must be >= 1");
        return errors;
    }

    void validate() const {
        auto errors = problems();
        if (!errors.empty()) throw ValidationError(errors);
    }
};

/// v_j(t) for zero-based j in [0, 2n); for eta > 1 the slowed (1/eta) v_j(t/eta).
inline double dither(const DitherSchedule& sched, int j, double t) {
    const int n = sched.dim();
    if (j < 0 || j >= 2 * n) throw std::out_of_range("dither: index out of range");
    const double tau = t / sched.eta;
    const double kj = sched.k[static_cast<std::size_t>(j < n ? j : j - n)];
    const double amp = std::sqrt(4.0 * kPi * kj / sched.mu);
    const double arg = 2.0 * kPi * kj * tau / sched.mu;
    const double v = j < n ? amp * std::cos(arg) : amp * std::sin(arg);
    return v / sched.eta;
}

/// xi' = g(y, t): coordinate j gets g_j(y) v_j(t) + g_{j+n}(y) v_{j+n}(t).
inline Vector seeker_rhs(const GeneratingPair& pair, const DitherSchedule& sched, double y, double t) {
    const int n = sched.dim();
    const double gs = pair.g_sin(y);
    const double gc = pair.g_cos(y);
    Vector rate(n);
    for (int j = 0; j < n; ++j) rate[j] = gs * dither(sched, j, t) + gc * dither(sched, j + n, t);
    return rate;
}

/// c_w = 2 sum_j sqrt(2 pi k_j); bounds sum_j |v_j| by c_w / sqrt(mu).
inline double dither_sum_constant(const std::vector<int>& k) {
    double c = 0.0;
    for (int kj : k) c += std::sqrt(2.0 * kPi * kj);
    return 2.0 * c;
}

}  // namespace nhes

#endif  // NHES_SEEKER_HPP
