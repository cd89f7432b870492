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
#ifndef NHES_ANALYSIS_HPP
#define NHES_ANALYSIS_HPP

#include "nhes/integrator.hpp"

#include <optional>

namespace nhes {

// ---------------------------------------------------------------------------
// Cost constants
// ---------------------------------------------------------------------------

/**
 * Constants of the quadratic-like cost hypotheses:
 *   s11 |x - x*|^2 <= J - J* <= s12 |x - x*|^2
 *   s21 (J - J*) <= |grad J|^2 <= s22 (J - J*)
 *   |Hess J| <= s3
 */
struct SigmaBounds {
    double sigma11 = 0.0;
    double sigma12 = 0.0;
    double sigma21 = 0.0;
    double sigma22 = 0.0;
    double sigma3 = 0.0;
    Vector x_star;
    double j_star = 0.0;
};

inline constexpr double kSigmaSafety = 1.05;

/**
 * @brief Tightest sigma constants over a seeded sample cloud.
 *
 * Lower constants are divided and upper constants multiplied by `safety`
 * (1.05 by default; pass 1 for the raw sampled values). Missing gradient or
 * Hessian evaluators fall back to central differences.
 */
inline SigmaBounds estimate_sigma(const ScalarField& cost, const VectorField& gradient,
                                  const JacobianField& hessian, const Box& domain, const Vector& x_star,
                                  std::size_t samples, std::uint64_t seed = 1, double safety = kSigmaSafety) {
    if (samples == 0) throw std::invalid_argument("estimate_sigma: samples must be >= 1");
    if (!domain.contains(x_star)) throw DomainError("estimate_sigma: x_star outside the domain");
    const double j_star = cost(x_star);
    double q1_lo = std::numeric_limits<double>::infinity(), q1_hi = 0.0;
    double q2_lo = std::numeric_limits<double>::infinity(), q2_hi = 0.0;
    double hess_hi = 0.0;
    std::size_t used = 0;
    const double exclusion = 1e-9 * (1.0 + x_star.norm());
    for (const Vector& x : sample_points(domain, samples, seed)) {
        const double dist2 = (x - x_star).squaredNorm();
        if (std::sqrt(dist2) <= exclusion) continue;
        const double excess = cost(x) - j_star;
        if (!(excess > 0.0))
            throw HypothesisError("cost does not exceed J(x*) at a sample point " + format_vector(x), x);
        const Vector g = gradient ? gradient(x) : central_gradient(cost, x);
        const Matrix hess = hessian ? hessian(x) : central_hessian(cost, x);
        const double q1 = excess / dist2;
        const double q2 = g.squaredNorm() / excess;
        q1_lo = std::min(q1_lo, q1);
        q1_hi = std::max(q1_hi, q1);
        q2_lo = std::min(q2_lo, q2);
        q2_hi = std::max(q2_hi, q2);
        hess_hi = std::max(hess_hi, spectral_norm(hess));
        ++used;
    }
    if (used == 0) throw std::invalid_argument("estimate_sigma: every sample coincides with x_star");
    if (!(q2_lo > 0.0))
        throw HypothesisError("gradient vanishes away from x_star (sigma21 = 0)", x_star);
    SigmaBounds s;
    s.sigma11 = q1_lo / safety;
    s.sigma12 = q1_hi * safety;
    s.sigma21 = q2_lo / safety;
    s.sigma22 = q2_hi * safety;
    s.sigma3 = hess_hi * safety;
    s.x_star = x_star;
    s.j_star = j_star;
    return s;
}

// ---------------------------------------------------------------------------
// Quadrature and iterated integrals
// ---------------------------------------------------------------------------

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_q).
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int q) : nodes(static_cast<std::size_t>(q)), weights(static_cast<std::size_t>(q)) {
        if (q < 1) throw std::invalid_argument("GaussLegendre: order must be >= 1");
        for (int i = 0; i < q; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (q + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= q; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                if (q == 1) p0 = 1.0;
                const double pq = q == 1 ? x : p1;
                const double pq1 = q == 1 ? 1.0 : p0;
                dp = q * (x * pq - pq1) / (x * x - 1.0);
                const double dx = pq / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[static_cast<std::size_t>(i)] = x;
            weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    int order() const { return static_cast<int>(nodes.size()); }
};

using ScalarSignal = std::function<double(double)>;

/// First and second iterated integrals of a family of inputs over [t0, t1].
struct IteratedIntegrals {
    Vector first;   ///< int w_i
    Matrix second;  ///< (i1, i2) -> int_{t0}^{t1} w_i1(v) int_{t0}^{v} w_i2(s) ds dv
};

inline constexpr int kQuadratureOrder = 16;

/// Composite Gauss-Legendre with `panels` panels of order 16.
inline IteratedIntegrals iterated_integrals(const std::vector<ScalarSignal>& inputs, double t0, double t1,
                                            int panels) {
    if (panels < 1) throw std::invalid_argument("iterated_integrals: panels must be >= 1");
    const auto l = static_cast<Eigen::Index>(inputs.size());
    static const GaussLegendre gl(kQuadratureOrder);
    const int q = gl.order();
    IteratedIntegrals out{Vector::Zero(l), Matrix::Zero(l, l)};
    Vector cumulative = Vector::Zero(l);  // int_{t0}^{a} w_i
    const double width = (t1 - t0) / panels;
    Vector w_outer(l), inner(l);
    for (int p = 0; p < panels; ++p) {
        const double a = t0 + p * width;
        const double b = (p + 1 == panels) ? t1 : a + width;
        const double half = 0.5 * (b - a);
        Vector panel_first = Vector::Zero(l);
        for (int k = 0; k < q; ++k) {
            const double v = a + half * (1.0 + gl.nodes[static_cast<std::size_t>(k)]);
            const double wv = half * gl.weights[static_cast<std::size_t>(k)];
            for (Eigen::Index i = 0; i < l; ++i) w_outer[i] = inputs[static_cast<std::size_t>(i)](v);
            // inner integral from a to v
            inner.setZero();
            const double ihalf = 0.5 * (v - a);
            for (int r = 0; r < q; ++r) {
                const double s = a + ihalf * (1.0 + gl.nodes[static_cast<std::size_t>(r)]);
                const double ws = ihalf * gl.weights[static_cast<std::size_t>(r)];
                for (Eigen::Index i = 0; i < l; ++i) inner[i] += ws * inputs[static_cast<std::size_t>(i)](s);
            }
            inner += cumulative;
            out.second.noalias() += wv * w_outer * inner.transpose();
            panel_first += wv * w_outer;
        }
        cumulative += panel_first;
    }
    out.first = cumulative;
    return out;
}

/// Panels giving at least 64 nodes per fastest period.
inline int panels_for(double duration, double fastest_period) {
    if (!(fastest_period > 0.0)) fastest_period = duration;
    const double nodes = 64.0 * duration / fastest_period;
    return std::max(1, static_cast<int>(std::ceil(nodes / kQuadratureOrder)));
}

// ---------------------------------------------------------------------------
// Input-driven vector field families
// ---------------------------------------------------------------------------

/// Vector fields h_i of x' = sum_i h_i(x) w_i(t), with optional Jacobians.
struct FieldSet {
    std::vector<VectorField> fields;
    std::vector<JacobianField> jacobians;

    std::size_t size() const { return fields.size(); }

    Matrix jacobian(std::size_t i, const Vector& x) const {
        if (!jacobians.empty() && jacobians[i]) return jacobians[i](x);
        return central_jacobian(fields[i], x, 1e-5 * (1.0 + x.norm()));
    }

    /// L_{h_along} h_of (x) = (dh_of/dx) h_along
    Vector lie_derivative(std::size_t along, std::size_t of, const Vector& x) const {
        return jacobian(of, x) * fields[along](x);
    }

    Vector rhs(const std::vector<ScalarSignal>& inputs, double t, const Vector& x) const {
        Vector dx = Vector::Zero(x.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const double w = inputs[i](t);
            if (w != 0.0) dx += w * fields[i](x);
        }
        return dx;
    }
};

inline FieldSet control_field_set(const ControlSystem& sys) {
    FieldSet set;
    for (int i = 0; i < sys.input_dim(); ++i) {
        set.fields.push_back(sys.field_function(i));
        if (sys.has_analytic_jacobians())
            set.jacobians.push_back([sys, i](const Vector& x) { return sys.jacobian(i, x); });
    }
    return set;
}

/// h_j(xi) = g_j(J(xi) - shift) e_{j mod n}, j in [0, 2n).
inline FieldSet seeker_field_set(const GeneratingPair& pair, const ScalarField& cost, int n, double shift = 0.0) {
    FieldSet set;
    for (int j = 0; j < 2 * n; ++j) {
        set.fields.push_back([pair, cost, n, j, shift](const Vector& xi) {
            Vector h = Vector::Zero(n);
            h[j % n] = pair.g(j, n, cost(xi) - shift);
            return h;
        });
    }
    return set;
}

inline std::vector<ScalarSignal> dither_inputs(const DitherSchedule& sched) {
    std::vector<ScalarSignal> inputs;
    for (int j = 0; j < 2 * sched.dim(); ++j) inputs.push_back([sched, j](double t) { return dither(sched, j, t); });
    return inputs;
}

/// u_i(t) with coefficients frozen, one signal per input.
inline std::vector<ScalarSignal> stabilizer_inputs(const BracketSelection& sel, const StabilizerGains& gains,
                                                   const CoefficientVector& coeffs, int input_dim) {
    std::vector<ScalarSignal> inputs;
    for (int i = 0; i < input_dim; ++i) {
        inputs.push_back(
            [sel, gains, coeffs, input_dim, i](double t) { return control_value(sel, gains, coeffs, t, input_dim)[i]; });
    }
    return inputs;
}

// ---------------------------------------------------------------------------
// Chen-Fliess truncation
// ---------------------------------------------------------------------------

/**
 * @brief Chen-Fliess series of x' = sum_i h_i(x) w_i(t) truncated at `order` <= 2.
 *
 *   x0 + sum_i h_i(x0) int w_i + sum_{i1,i2} L_{h_i2} h_i1 (x0) int int w_i1 w_i2
 *
 * Quadrature is run at two resolutions; disagreement above 1e-8 (relative to
 * the largest term) raises NumericalError.
 */
inline Vector chen_fliess_truncation(const FieldSet& set, const std::vector<ScalarSignal>& inputs, const Vector& x0,
                                     double t_end, int order = 2, double fastest_period = 0.0) {
    if (order < 0 || order > 2) throw std::invalid_argument("chen_fliess_truncation: order must be 0, 1 or 2");
    if (inputs.size() != set.size()) throw std::invalid_argument("chen_fliess_truncation: one input per field");
    if (!(t_end > 0.0)) throw std::invalid_argument("chen_fliess_truncation: t_end must be positive");
    Vector x = x0;
    if (order == 0) return x;

    const int panels = panels_for(t_end, fastest_period);
    const IteratedIntegrals coarse = iterated_integrals(inputs, 0.0, t_end, panels);
    const IteratedIntegrals fine = iterated_integrals(inputs, 0.0, t_end, 2 * panels);
    const double scale = std::max({1.0, fine.first.cwiseAbs().maxCoeff(), fine.second.cwiseAbs().maxCoeff()});
    const double gap = std::max((coarse.first - fine.first).cwiseAbs().maxCoeff(),
                                (coarse.second - fine.second).cwiseAbs().maxCoeff());
    if (gap > 1e-8 * scale) throw NumericalError("chen_fliess_truncation: quadrature did not converge");

    const std::size_t l = set.size();
    for (std::size_t i = 0; i < l; ++i) {
        const double w = fine.first[static_cast<Eigen::Index>(i)];
        if (w != 0.0) x += set.fields[i](x0) * w;
    }
    if (order == 2) {
        for (std::size_t i1 = 0; i1 < l; ++i1) {
            for (std::size_t i2 = 0; i2 < l; ++i2) {
                const double w = fine.second(static_cast<Eigen::Index>(i1), static_cast<Eigen::Index>(i2));
                if (w != 0.0) x += set.lie_derivative(i2, i1, x0) * w;
            }
        }
    }
    return x;
}

// ---------------------------------------------------------------------------
// Stabilizer remainder
// ---------------------------------------------------------------------------

/// x(eps) over one hold interval with xi frozen, by reference integration.
inline Vector stabilizer_hold_endpoint(const ControlSystem& sys, const BracketSelection& sel,
                                       const StabilizerGains& gains, const Vector& x0, const Vector& xi0,
                                       double tol = 1e-12) {
    const FrameMatrix frame(sys, sel);
    const CoefficientVector a = coefficients(frame, gains, x0, xi0);
    const int m = sys.input_dim();
    auto rhs = [&](double t, const Vector& x) { return sys.velocity(x, control_value(sel, gains, a, t, m)); };
    return reference_integrate(rhs, x0, 0.0, gains.epsilon, tol);
}

/// R = x(eps) - x0 + eps gamma1 (x0 - xi0).
inline Vector stabilizer_remainder(const ControlSystem& sys, const BracketSelection& sel,
                                   const StabilizerGains& gains, const Vector& x0, const Vector& xi0,
                                   double tol = 1e-12) {
    return stabilizer_hold_endpoint(sys, sel, gains, x0, xi0, tol) - x0 + gains.epsilon * gains.gamma1 * (x0 - xi0);
}

struct RemainderScaling {
    std::vector<double> eps;
    std::vector<double> norms;
    double slope = std::numeric_limits<double>::quiet_NaN();
    bool inconclusive = false;
};

/// Remainder norms along a geometric epsilon ladder and the log-log slope.
inline RemainderScaling remainder_scaling(const ControlSystem& sys, const BracketSelection& sel, double gamma1,
                                          const Vector& x0, const Vector& xi0, const std::vector<double>& eps_ladder,
                                          double tol = 1e-12) {
    if (eps_ladder.size() < 3) throw std::invalid_argument("remainder_scaling: ladder needs >= 3 points");
    const double ratio = eps_ladder[1] / eps_ladder[0];
    for (std::size_t i = 1; i < eps_ladder.size(); ++i) {
        if (std::abs(eps_ladder[i] / eps_ladder[i - 1] - ratio) > 1e-9 * std::abs(ratio))
            throw std::invalid_argument("remainder_scaling: ladder must be geometric");
    }
    RemainderScaling out;
    const double floor = 1e-11 * (1.0 + x0.norm());
    for (double eps : eps_ladder) {
        const StabilizerGains gains{gamma1, eps};
        const double r = stabilizer_remainder(sys, sel, gains, x0, xi0, tol).norm();
        out.eps.push_back(eps);
        out.norms.push_back(r);
        if (!(r > floor)) out.inconclusive = true;
    }
    if (!out.inconclusive) out.slope = loglog_slope(out.eps, out.norms);
    return out;
}

// ---------------------------------------------------------------------------
// One-step decay envelope
// ---------------------------------------------------------------------------

struct DecayEnvelope {
    double value = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
};

/**
 * One-step envelope for W(x(eps)) when x(eps) = x0 - gamma eps grad W(x0) + r:
 *   W0 (1 - eps k1/m W0^{1-1/m} + eps^2 k2/(2 m^2) W0^{2-2/m})^m
 *   k1 = gamma s21 - sqrt(s22) |r| W0^{1/(2m)-1} / eps
 *   k2 = ((m-1) s22 + m s3) (gamma sqrt(s22) + |r| W0^{1/(2m)-1} / eps)^2
 */
inline DecayEnvelope decay_envelope(double w0, double r_norm, double gamma, double eps, const SigmaBounds& s,
                                    double m = 1.0) {
    DecayEnvelope env;
    if (w0 <= 0.0) return env;
    const double rterm = r_norm * std::pow(w0, 1.0 / (2.0 * m) - 1.0) / eps;
    env.kappa1 = gamma * s.sigma21 - std::sqrt(s.sigma22) * rterm;
    const double speed = gamma * std::sqrt(s.sigma22) + rterm;
    env.kappa2 = ((m - 1.0) * s.sigma22 + m * s.sigma3) * speed * speed;
    double base = 1.0 - eps * env.kappa1 / m * std::pow(w0, 1.0 - 1.0 / m) +
                  eps * eps * env.kappa2 / (2.0 * m * m) * std::pow(w0, 2.0 - 2.0 / m);
    if (m != std::floor(m)) base = std::max(base, 0.0);
    env.value = w0 * std::pow(base, m);
    return env;
}

struct DecayStep {
    std::size_t index = 0;
    double w_before = 0.0;
    double w_after = 0.0;
    double envelope = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double r_norm = 0.0;
    double slack = 0.0;
};

struct DecayReport {
    std::vector<DecayStep> steps;
    bool ok = true;
    std::optional<std::size_t> first_violation;
};

/// Checks the one-step envelope between consecutive states sampled eps apart.
inline DecayReport decay_check(const std::vector<Vector>& states, const ScalarField& w, const VectorField& grad_w,
                               double gamma, double eps, const SigmaBounds& s, double m = 1.0) {
    if (states.size() < 2) throw std::invalid_argument("decay_check: need at least two states");
    DecayReport report;
    for (std::size_t k = 0; k + 1 < states.size(); ++k) {
        const Vector& x0 = states[k];
        const Vector& x1 = states[k + 1];
        DecayStep step;
        step.index = k;
        step.w_before = w(x0);
        step.w_after = w(x1);
        const Vector r = x1 - x0 + gamma * eps * grad_w(x0);
        step.r_norm = r.norm();
        const DecayEnvelope env = decay_envelope(step.w_before, step.r_norm, gamma, eps, s, m);
        step.envelope = env.value;
        step.kappa1 = env.kappa1;
        step.kappa2 = env.kappa2;
        step.slack = step.envelope - step.w_after;
        const double tol = 1e-12 * std::max(1.0, std::abs(step.w_before));
        if (step.slack < -tol) {
            report.ok = false;
            if (!report.first_violation) report.first_violation = k;
        }
        report.steps.push_back(step);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Exponential envelope fit
// ---------------------------------------------------------------------------

/// |x(t) - x*| <= beta |x0 - x*| exp(-lambda t) + rho, fitted as an envelope.
struct DecayFit {
    double beta = 1.0;
    double lambda = 0.0;  ///< +infinity when every sample after t = 0 lies within rho
    double rho = 0.0;
    double initial_distance = 0.0;
    double window_start = 0.0;
    double window_end = 0.0;
    bool diverged = false;

    double bound(double t) const {
        if (std::isinf(lambda)) return t == 0.0 ? beta * initial_distance + rho : rho;
        return beta * initial_distance * std::exp(-lambda * t) + rho;
    }
};

inline constexpr double kTrailingWindow = 0.2;

/**
 * @brief Envelope fit on a distance trace.
 *
 * rho is the maximum distance over the trailing 20% of the time span,
 * beta = max(1, max_i (d_i - rho) / d_0) and lambda is the largest rate for
 * which every sample satisfies the envelope (closed form per sample). An
 * interior peak that would force lambda = 0 grows beta on a x1.1 grid.
 */
inline DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& distances) {
    if (times.empty() || times.size() != distances.size())
        throw std::invalid_argument("fit_decay: trajectory must be nonempty");
    DecayFit fit;
    const double t0 = times.front();
    const double t_end = times.back();
    fit.window_end = t_end;
    fit.window_start = t_end - kTrailingWindow * (t_end - t0);
    fit.initial_distance = distances.front();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] >= fit.window_start) fit.rho = std::max(fit.rho, distances[i]);
    }
    const double d0 = fit.initial_distance;
    if (fit.rho > d0 && times.size() > 1) {
        fit.diverged = true;
        fit.lambda = 0.0;
        fit.beta = 1.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (d0 > 0.0) fit.beta = std::max(fit.beta, (distances[i] - fit.rho) / d0);
        }
        return fit;
    }
    if (d0 <= 0.0) {
        fit.beta = 1.0;
        fit.lambda = std::numeric_limits<double>::infinity();
        return fit;
    }
    double beta = 1.0;
    for (std::size_t i = 0; i < times.size(); ++i) beta = std::max(beta, (distances[i] - fit.rho) / d0);

    auto lambda_for = [&](double b) {
        double lam = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double excess = distances[i] - fit.rho;
            const double dt = times[i] - t0;
            if (excess <= 0.0 || dt <= 0.0) continue;
            lam = std::min(lam, std::log(b * d0 / excess) / dt);
        }
        return std::max(lam, 0.0);
    };
    // A rate that is pure rounding over the span counts as zero.
    const double negligible = 1e-9 / std::max(t_end - t0, std::numeric_limits<double>::min());
    double lam = lambda_for(beta);
    for (int k = 0; k < 40 && lam <= negligible; ++k) {
        beta *= 1.1;
        lam = lambda_for(beta);
    }
    fit.beta = beta;
    fit.lambda = lam;
    return fit;
}

inline std::vector<double> distance_trace(const PiEpsTrajectory& traj, const Vector& x_star) {
    std::vector<double> d;
    d.reserve(traj.size());
    for (const Vector& x : traj.x) d.push_back((x - x_star).norm());
    return d;
}

inline DecayFit fit_decay(const PiEpsTrajectory& traj, const Vector& x_star) {
    return fit_decay(traj.times, distance_trace(traj, x_star));
}

// ---------------------------------------------------------------------------
// Displacement bound
// ---------------------------------------------------------------------------

struct DisplacementReport {
    bool ok = true;
    double worst_ratio = 0.0;  ///< max displacement / bound
    std::vector<std::size_t> violations;
};

/**
 * @brief |xi(t) - xi(0)| <= t nu max_i |h_i(xi(0))| exp(nu L t) on one segment.
 *
 * `times` and `states` are the recorded segment; `h_max` is the largest field
 * norm at the segment start.
 */
inline DisplacementReport displacement_bound_check(const std::vector<double>& times, const std::vector<Vector>& states,
                                       double h_max, double lipschitz, double nu) {
    if (times.empty() || times.size() != states.size())
        throw std::invalid_argument("displacement_bound_check: segment must be nonempty");
    DisplacementReport report;
    const double t0 = times.front();
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i] - t0;
        const double displacement = (states[i] - states.front()).norm();
        const double bound = t * nu * h_max * std::exp(nu * lipschitz * t);
        const double tol = 1e-12 * (1.0 + states.front().norm());
        if (displacement > bound + tol) {
            report.ok = false;
            report.violations.push_back(i);
        }
        if (bound > 0.0) report.worst_ratio = std::max(report.worst_ratio, displacement / bound);
    }
    return report;
}

/// max_t sum_i |w_i(t)| sampled on a fine grid over [t0, t1].
inline double input_sum_bound(const std::vector<ScalarSignal>& inputs, double t0, double t1, int samples = 20000) {
    double best = 0.0;
    for (int k = 0; k <= samples; ++k) {
        const double t = t0 + (t1 - t0) * k / samples;
        double s = 0.0;
        for (const auto& w : inputs) s += std::abs(w(t));
        best = std::max(best, s);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Trajectory metrics
// ---------------------------------------------------------------------------

struct TrajectoryMetrics {
    DecayFit fit;
    double sup_tracking_error = 0.0;  ///< max_t |x(t) - xi(t)|
    double final_cost = 0.0;
    double trailing_max_distance = 0.0;
};

inline TrajectoryMetrics trajectory_metrics(const PiEpsTrajectory& traj, const Vector& x_star) {
    if (traj.empty()) throw std::invalid_argument("trajectory_metrics: empty trajectory");
    TrajectoryMetrics m;
    m.fit = fit_decay(traj, x_star);
    m.trailing_max_distance = m.fit.rho;
    for (std::size_t i = 0; i < traj.size(); ++i)
        m.sup_tracking_error = std::max(m.sup_tracking_error, (traj.x[i] - traj.xi[i]).norm());
    m.final_cost = traj.y.back();
    return m;
}

/**
 * @brief One seeker period with x pinned to xi:
 * returns |xi(mu) - xi0 + mu gamma2 grad J(xi0)|.
 */
inline double one_period_gradient_defect(const ControlSystem& sys, const BracketSelection& sel,
                                         const ScalarField& cost, const VectorField& grad,
                                         const GeneratingPair& pair, const DitherSchedule& sched, const Vector& xi0,
                                         int substeps_per_period = 64) {
    SimConfig cfg;
    cfg.gains = {1.0, sched.mu / 8.0};
    cfg.sched = sched;
    cfg.pair = pair;
    cfg.sel = sel;
    cfg.x0 = xi0;
    cfg.xi0 = xi0;
    cfg.horizon = sched.period();
    cfg.substeps_per_period = substeps_per_period;
    cfg.pin_x_to_xi = true;
    const PiEpsTrajectory traj = simulate(sys, cost, cfg);
    return (traj.xi.back() - xi0 + sched.period() * pair.gamma2 * grad(xi0) / sched.eta).norm();
}

}  // namespace nhes

#endif  // NHES_ANALYSIS_HPP
