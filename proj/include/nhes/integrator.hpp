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
#ifndef NHES_INTEGRATOR_HPP
#define NHES_INTEGRATOR_HPP

#include "nhes/seeker.hpp"
#include "nhes/stabilizer.hpp"

#include <boost/numeric/odeint.hpp>

namespace nhes {

/// How the stabilizer coefficients are evaluated along the flow.
enum class FeedbackMode {
    sampled,     ///< frozen at t_j = epsilon j (pi_epsilon-solutions)
    continuous,  ///< a(x(t), xi(t)) at every instant (classical solutions)
};

inline const char* to_string(FeedbackMode mode) {
    return mode == FeedbackMode::sampled ? "sampled" : "continuous";
}

/**
 * @brief Closed-loop simulation settings.
 *
 * finalize() validates everything against the plant, rounds epsilon down so
 * that mu / epsilon is a natural number and collects warnings (for instance
 * x0 != xi0, which the convergence guarantee does not cover).
 */
struct SimConfig {
    StabilizerGains gains;
    DitherSchedule sched;
    GeneratingPair pair;
    BracketSelection sel;
    Vector x0;
    Vector xi0;
    double horizon = 1.0;
    int substeps_per_period = 32;
    /// Integrator steps between records; 0 records each hold boundary plus 8 interior points.
    long long record_stride = 0;
    /// Upper limit on integrator steps; larger requests are rejected by validation.
    long long max_steps = 2'000'000'000LL;
    FeedbackMode feedback = FeedbackMode::sampled;
    /// Bypass the x-subsystem and evolve xi with y = J(xi).
    bool pin_x_to_xi = false;
    /// Subtracted from J before it reaches the generating pair.
    double cost_shift = 0.0;
    bool keep_coefficients = false;
    double cond_tol = kDefaultCondTol;

    double epsilon_requested = 0.0;
    std::vector<std::string> warnings;

    std::vector<std::string> problems(const ControlSystem& sys) const {
        std::vector<std::string> errors = gains.problems();
        for (auto& e : sched.problems()) errors.push_back(std::move(e));
        for (auto& e : sel.problems(sys.state_dim(), sys.input_dim())) errors.push_back(std::move(e));
        const int n = sys.state_dim();
        if (sched.dim() != n) errors.push_back("dither list k must have n = " + std::to_string(n) + " entries");
        if (!pair.r && !pair.direct_sin) errors.push_back("generating pair is not set");
        if (x0.size() != n) errors.push_back("x0 must have n entries");
        else if (!sys.domain().contains(x0)) errors.push_back("x0 must lie in the domain D");
        if (xi0.size() != n) errors.push_back("xi0 must have n entries");
        else if (!sys.domain().contains(xi0)) errors.push_back("xi0 must lie in the domain D");
        if (!(horizon > 0.0) || !std::isfinite(horizon)) errors.push_back("horizon must be positive");
        if (substeps_per_period < 1) errors.push_back("substeps_per_period must be >= 1");
        if (record_stride < 0) errors.push_back("record_stride must be >= 0");
        if (gains.epsilon > 0.0 && sched.mu > 0.0 && !(gains.epsilon < sched.mu))
            errors.push_back("epsilon < mu is required (stabilizer must oscillate faster than the seeker)");
        if (errors.empty() && planned_steps() > static_cast<double>(max_steps))
            errors.push_back("horizon needs more than max_steps integrator steps");
        return errors;
    }

    void finalize(const ControlSystem& sys) {
        auto errors = problems(sys);
        if (!errors.empty()) throw ValidationError(errors);
        warnings.clear();
        if (epsilon_requested == 0.0) epsilon_requested = gains.epsilon;
        const double ratio = sched.mu / gains.epsilon;
        const double nearest = std::round(ratio);
        const double divisions = std::abs(ratio - nearest) <= 1e-9 * ratio ? nearest : std::ceil(ratio);
        const double adjusted = sched.mu / divisions;
        if (adjusted != gains.epsilon) {
            if (std::abs(adjusted - gains.epsilon) > 1e-9 * gains.epsilon) {
                std::ostringstream os;
                os.precision(17);
                os << "epsilon adjusted from " << gains.epsilon << " to " << adjusted
                   << " so that mu/epsilon is a natural number";
                warnings.push_back(os.str());
            }
            gains.epsilon = adjusted;
        }
        if (!pin_x_to_xi && x0 != xi0)
            warnings.push_back("x0 != xi0: outside the x(0) = xi(0) hypothesis of the convergence bound");
        if (!pin_x_to_xi && feedback == FeedbackMode::sampled && !gains.sampling_condition())
            warnings.push_back("epsilon * gamma1 >= 1: sampled stabilizer is not contracting");
    }

    /// Approximate step count for the current settings.
    double planned_steps() const { return horizon / gains.epsilon * substeps_per_hold(); }

    /// Integrator steps per hold interval: the fastest oscillation gets >= substeps_per_period steps.
    int substeps_per_hold() const {
        const int kappa = std::max(1, sel.kappa_max());
        const double dither_ratio = gains.epsilon * sched.k_max() / (sched.eta * sched.mu);
        const int dither_factor = std::max(1, static_cast<int>(std::ceil(dither_ratio - 1e-12)));
        return substeps_per_period * std::max(kappa, dither_factor);
    }
};

enum class Termination { completed, domain_exit };

inline const char* to_string(Termination t) {
    return t == Termination::completed ? "completed" : "domain_exit";
}

/// Sampled record of one closed-loop solution.
struct PiEpsTrajectory {
    std::vector<double> times;
    std::vector<Vector> x;
    std::vector<Vector> xi;
    std::vector<double> y;
    std::vector<Vector> u;

    SimConfig config;
    double step = 0.0;
    int substeps_per_hold = 0;
    Termination termination = Termination::completed;
    double exit_time = std::numeric_limits<double>::quiet_NaN();
    /// Coefficients held on each interval (only with keep_coefficients, sampled mode).
    std::vector<CoefficientVector> held;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
};

/// Numerical blow-up (non-finite state) during simulation.
class NumericalBlowup : public NumericalError {
public:
    NumericalBlowup(const std::string& what, double time) : NumericalError(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

/// Coefficients refreshed at a hold boundary; rank errors carry the time stamp.
inline CoefficientVector hold_boundary_refresh(const FrameMatrix& frame, const StabilizerGains& gains,
                                               const Vector& x, const Vector& xi, double t) {
    try {
        return coefficients(frame, gains, x, xi);
    } catch (const RankDeficiencyError& e) {
        std::ostringstream os;
        os << e.what() << " at t = " << t;
        throw RankDeficiencyError(os.str(), e.point(), e.condition());
    }
}

namespace detail {

/// Default recording pattern inside one hold: the boundary plus 8 interior points.
inline std::vector<char> record_mask(int substeps) {
    std::vector<char> mask(static_cast<std::size_t>(substeps), 0);
    for (int k = 0; k < 9; ++k) {
        const auto s = static_cast<std::size_t>(std::lround(static_cast<double>(k) * substeps / 9.0));
        if (s < mask.size()) mask[s] = 1;
    }
    return mask;
}

}  // namespace detail

/**
 * @brief Integrates the closed loop with fixed-step classical RK4.
 *
 * The step divides epsilon exactly, so coefficient refreshes happen on step
 * boundaries and the right-hand side is smooth inside every step. Leaving D
 * ends the run with Termination::domain_exit; non-finite states throw
 * NumericalBlowup.
 */
inline PiEpsTrajectory simulate(const ControlSystem& sys, const ScalarField& cost, SimConfig cfg) {
    cfg.finalize(sys);
    const int n = sys.state_dim();
    const int m = sys.input_dim();
    const FrameMatrix frame(sys, cfg.sel, cfg.cond_tol);

    PiEpsTrajectory traj;
    traj.substeps_per_hold = cfg.substeps_per_hold();
    const int substeps = traj.substeps_per_hold;
    const double h = cfg.gains.epsilon / substeps;
    traj.step = h;

    const auto total_steps = static_cast<long long>(std::ceil(cfg.horizon / h - 1e-9));
    const std::vector<char> mask = detail::record_mask(substeps);
    const long long stride = cfg.record_stride;
    auto recorded = [&](long long index, int s) {
        return stride > 0 ? index % stride == 0 : mask[static_cast<std::size_t>(s)] != 0;
    };

    const auto& gains = cfg.gains;
    const auto& sel = cfg.sel;
    const bool pinned = cfg.pin_x_to_xi;
    const bool continuous = cfg.feedback == FeedbackMode::continuous;

    CoefficientVector held;
    double stage_time = 0.0;
    auto seeker_output = [&](const Vector& x) {
        const double y = cost(x);
        if (!std::isfinite(y)) {
            std::ostringstream os;
            os << "numerical blow-up: non-finite cost at t = " << stage_time;
            throw NumericalBlowup(os.str(), stage_time);
        }
        return y - cfg.cost_shift;
    };

    auto control_at = [&](const Vector& x, const Vector& xi, double t) -> Vector {
        if (pinned) return Vector::Zero(m);
        if (continuous) return control_value(sel, gains, coefficients(frame, gains, x, xi), t, m);
        return control_value(sel, gains, held, t, m);
    };

    auto blowup = [](double t) {
        std::ostringstream os;
        os << "numerical blow-up: non-finite state at t = " << t;
        return NumericalBlowup(os.str(), t);
    };

    auto rhs = [&](double t, const Vector& z) -> Vector {
        // Overflow inside a stage would otherwise surface as a domain error of the pair.
        if (!z.allFinite()) throw blowup(t);
        stage_time = t;
        Vector dz(2 * n);
        const Vector x = z.head(n);
        const Vector xi = z.tail(n);
        if (pinned) {
            dz.head(n).setZero();
            dz.tail(n) = seeker_rhs(cfg.pair, cfg.sched, seeker_output(xi), t);
            return dz;
        }
        dz.head(n) = sys.velocity(x, control_at(x, xi, t));
        dz.tail(n) = seeker_rhs(cfg.pair, cfg.sched, seeker_output(x), t);
        return dz;
    };

    auto record = [&](double t, const Vector& z) {
        const Vector x = pinned ? Vector(z.tail(n)) : Vector(z.head(n));
        const Vector xi = z.tail(n);
        traj.times.push_back(t);
        traj.x.push_back(x);
        traj.xi.push_back(xi);
        traj.y.push_back(cost(x));
        traj.u.push_back(control_at(x, xi, t));
    };

    Vector z(2 * n);
    z.head(n) = pinned ? cfg.xi0 : cfg.x0;
    z.tail(n) = cfg.xi0;

    long long step_index = 0;
    bool exited = false;
    while (step_index < total_steps && !exited) {
        const long long hold_index = step_index / substeps;
        const double t_hold = static_cast<double>(hold_index * substeps) * h;
        if (!pinned && !continuous) {
            held = hold_boundary_refresh(frame, gains, z.head(n), z.tail(n), t_hold);
            if (cfg.keep_coefficients) traj.held.push_back(held);
        }
        for (int s = 0; s < substeps && step_index < total_steps; ++s, ++step_index) {
            const double t = static_cast<double>(step_index) * h;
            const bool rec = recorded(step_index, s);
            if (rec) record(t, z);

            const Vector k1 = rhs(t, z);
            const Vector k2 = rhs(t + 0.5 * h, z + 0.5 * h * k1);
            const Vector k3 = rhs(t + 0.5 * h, z + 0.5 * h * k2);
            const Vector k4 = rhs(t + h, z + h * k3);
            Vector next = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (pinned) next.head(n) = next.tail(n);

            const double t_next = static_cast<double>(step_index + 1) * h;
            if (!next.allFinite()) throw blowup(t_next);
            if (!sys.domain().contains(next.head(n)) || !sys.domain().contains(next.tail(n))) {
                if (!rec) record(t, z);
                traj.termination = Termination::domain_exit;
                traj.exit_time = t_next;
                exited = true;
                ++step_index;
                break;
            }
            z = std::move(next);
        }
    }

    if (!exited) {
        const double t_end = static_cast<double>(total_steps) * h;
        if (!pinned && !continuous) {
            held = hold_boundary_refresh(frame, gains, z.head(n), z.tail(n), t_end);
            if (cfg.keep_coefficients) traj.held.push_back(held);
        }
        record(t_end, z);
    }
    traj.config = std::move(cfg);
    return traj;
}

// ---------------------------------------------------------------------------
// Reference integration (oracle)
// ---------------------------------------------------------------------------

using TimeVaryingField = std::function<Vector(double, const Vector&)>;

/// Adaptive Runge-Kutta-Fehlberg 7(8) to local tolerance `tol`; test/analysis use only.
inline Vector reference_integrate(const TimeVaryingField& rhs, const Vector& x0, double t0, double t1,
                                  double tol = 1e-10) {
    if (!(t1 > t0)) throw std::invalid_argument("reference_integrate: t1 must exceed t0");
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<double>;
    const auto n = static_cast<std::size_t>(x0.size());
    State state(x0.data(), x0.data() + n);
    auto system = [&](const State& s, State& ds, double t) {
        const Eigen::Map<const Vector> sv(s.data(), static_cast<Eigen::Index>(n));
        const Vector d = rhs(t, sv);
        for (std::size_t i = 0; i < n; ++i) ds[i] = d[static_cast<Eigen::Index>(i)];
    };
    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State>());
    try {
        odeint::integrate_adaptive(stepper, system, state, t0, t1, (t1 - t0) * 1e-3);
    } catch (const odeint::odeint_error& e) {
        throw NumericalError(std::string("reference_integrate: step collapse: ") + e.what());
    }
    Vector out = Eigen::Map<const Vector>(state.data(), static_cast<Eigen::Index>(n));
    if (!out.allFinite()) throw NumericalError("reference_integrate: non-finite result");
    return out;
}

}  // namespace nhes

#endif  // NHES_INTEGRATOR_HPP
