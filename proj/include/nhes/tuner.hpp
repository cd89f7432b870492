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
#ifndef NHES_TUNER_HPP
#define NHES_TUNER_HPP

#include "nhes/analysis.hpp"

namespace nhes {

/// Requested budget admits no parameters; names the binding constraint.
class InfeasibleBudget : public std::runtime_error {
public:
    InfeasibleBudget(const std::string& what, std::string constraint)
        : std::runtime_error(what), constraint_(std::move(constraint)) {}
    const std::string& constraint() const { return constraint_; }

private:
    std::string constraint_;
};

inline constexpr double kConstantSafety = 1.1;

/**
 * @brief Sampled bounds of the plant and seeker fields on a working box D'.
 *
 * Every sampled maximum carries a 1.1 inflation; alpha carries the factor of
 * estimate_alpha. nu = c_w M_g holds exactly.
 */
struct ConstantEstimates {
    double M_f = 0.0;
    double M_2f = 0.0;
    double M_3f = 0.0;
    double M_g = 0.0;
    double L_g = 0.0;
    double L_2g = 0.0;
    double M_3g = 0.0;
    double alpha = 0.0;
    double c_w = 0.0;
    double nu = 0.0;
    Box working_set;

    // Structural data the bounds depend on.
    BracketSelection sel;
    int input_dim = 0;
    double gamma2 = 1.0;
    std::size_t samples_used = 0;
};

namespace detail {

/// Grid (corners included, at most ~4096 points) plus a seeded cloud.
inline std::vector<Vector> constant_cloud(const Box& box, std::size_t samples, std::uint64_t seed) {
    const int n = box.dim();
    int per_axis = 5;
    while (per_axis > 2 && std::pow(static_cast<double>(per_axis), n) > 4096.0) --per_axis;
    std::vector<Vector> pts;
    if (std::pow(2.0, n) <= 4096.0) pts = grid_points(box, per_axis);
    for (Vector& p : sample_points(box, samples, seed)) pts.push_back(std::move(p));
    return pts;
}

inline std::vector<Vector> thin(const std::vector<Vector>& pts, std::size_t cap) {
    if (pts.size() <= cap) return pts;
    std::vector<Vector> out;
    out.reserve(cap);
    const double stride = static_cast<double>(pts.size()) / static_cast<double>(cap);
    for (std::size_t k = 0; k < cap; ++k) out.push_back(pts[static_cast<std::size_t>(k * stride)]);
    return out;
}

}  // namespace detail

/**
 * @brief Estimates the field constants on `working_set`.
 *
 * Lie derivatives use nested central differences unless analytic Jacobians
 * are registered. Lipschitz constants come from pairwise difference quotients
 * over a thinned cloud. Derivative-based seeker bounds skip points where the
 * pair argument sits on the boundary of its domain.
 */
inline ConstantEstimates estimate_constants(const ControlSystem& sys, const BracketSelection& sel,
                                            const GeneratingPair& pair, const DitherSchedule& sched,
                                            const ScalarField& cost, const Box& working_set, std::size_t samples,
                                            std::uint64_t seed = 1, double cost_shift = 0.0) {
    const int n = sys.state_dim();
    const int m = sys.input_dim();
    if (working_set.dim() != n) throw std::invalid_argument("estimate_constants: working set has wrong dimension");
    if (!working_set.bounded()) throw DomainError("estimate_constants: working set must be compact");
    if (!sys.domain().contains_box(working_set)) throw DomainError("estimate_constants: working set must lie in D");
    sel.validate(n, m);
    sched.validate();
    if (sched.dim() != n) throw std::invalid_argument("estimate_constants: dither list must have n entries");

    const std::vector<Vector> cloud = detail::constant_cloud(working_set, samples, seed);
    ConstantEstimates est;
    est.working_set = working_set;
    est.sel = sel;
    est.input_dim = m;
    est.gamma2 = pair.gamma2;
    est.samples_used = cloud.size();

    auto z_of = [&](const Vector& x) { return cost(x) - cost_shift; };
    for (const Vector& x : cloud) {
        const double z = z_of(x);
        if (!pair.in_range(z)) {
            std::ostringstream os;
            os << "seeker field undefined on the working set: pair '" << pair.name << "' at J - shift = " << z
               << ", x = " << format_vector(x);
            throw DomainError(os.str());
        }
    }

    // Plant fields.
    std::vector<VectorField> lie1;  // (j1, j2) -> L_{f_j1} f_j2
    for (int j1 = 0; j1 < m; ++j1) {
        for (int j2 = 0; j2 < m; ++j2) {
            lie1.push_back([sys, j1, j2](const Vector& x) { return lie_derivative(sys, j1, j2, x); });
        }
    }
    double mf = 0.0, m2f = 0.0, m3f = 0.0;
    for (const Vector& x : cloud) {
        for (int i = 0; i < m; ++i) mf = std::max(mf, sys.field(i, x).norm());
        for (const auto& l : lie1) m2f = std::max(m2f, l(x).norm());
    }
    for (const Vector& x : detail::thin(cloud, 400)) {
        for (const auto& l : lie1) {
            const Matrix jl = central_jacobian(l, x, 1e-4 * (1.0 + x.norm()));
            for (int j3 = 0; j3 < m; ++j3) m3f = std::max(m3f, (jl * sys.field(j3, x)).norm());
        }
    }
    est.M_f = kConstantSafety * mf;
    est.M_2f = kConstantSafety * m2f;
    est.M_3f = kConstantSafety * m3f / 6.0;

    // Seeker fields g_j(J(x)) e_{j mod n}.
    double mg = 0.0;
    for (const Vector& x : cloud) {
        const double z = z_of(x);
        mg = std::max({mg, std::abs(pair.g_sin(z)), std::abs(pair.g_cos(z))});
    }
    est.M_g = kConstantSafety * mg;

    const std::vector<Vector> pair_cloud = detail::thin(cloud, 300);
    auto interior = [&](double z) {
        return pair.domain == PairDomain::real_line ? std::isfinite(z) : (z > 0.0 && std::isfinite(z));
    };
    auto gprime = [&](int j, double z) {
        const double h = pair_derivative_step(z);
        return j < n ? five_point_derivative([&](double w) { return pair.g_sin(w); }, z, h)
                     : five_point_derivative([&](double w) { return pair.g_cos(w); }, z, h);
    };
    auto gval = [&](int j, const Vector& x) { return pair.g(j, n, z_of(x)); };

    // Lipschitz constants from pairwise quotients.
    double lg = 0.0, dg_ratio = 0.0;
    for (std::size_t a = 0; a < pair_cloud.size(); ++a) {
        for (std::size_t b = a + 1; b < pair_cloud.size(); ++b) {
            const double dist = (pair_cloud[a] - pair_cloud[b]).norm();
            if (dist <= 0.0) continue;
            for (int j = 0; j < 2 * n; ++j) {
                const double q = std::abs(gval(j, pair_cloud[a]) - gval(j, pair_cloud[b])) / dist;
                lg = std::max(lg, q);
            }
        }
    }
    dg_ratio = lg;
    // |L_{(g_j2(J(x)) - g_j2(J(xi))) e} g_j1(J(xi)) e| = |g'_j1(J(xi)) dJ/dxi_c| |g_j2(J(x)) - g_j2(J(xi))|
    double chain = 0.0;
    double m3g_inner = 0.0;
    for (const Vector& xi : pair_cloud) {
        const double z = z_of(xi);
        if (!interior(z)) continue;
        const Vector grad = central_gradient(cost, xi);
        for (int j1 = 0; j1 < 2 * n; ++j1) chain = std::max(chain, std::abs(gprime(j1, z)) * grad.cwiseAbs().maxCoeff());
        // phi_{j1 j2}(xi) = g'_j1(J) dJ/dxi_{c(j2)} g_j2(J); M_3g bounds |grad phi| M_g
        for (int j1 = 0; j1 < 2 * n; ++j1) {
            for (int j2 = 0; j2 < 2 * n; ++j2) {
                const int c2 = j2 % n;
                ScalarField phi = [&, j1, j2, c2](const Vector& p) {
                    const double zp = z_of(p);
                    if (!interior(zp)) return 0.0;
                    return gprime(j1, zp) * central_gradient(cost, p)[c2] * pair.g(j2, n, zp);
                };
                const double h = 1e-4 * (1.0 + xi.norm());
                for (int c = 0; c < n; ++c) {
                    Vector e = Vector::Zero(n);
                    e[c] = h;
                    const double d = (phi(xi + e) - phi(xi - e)) / (2.0 * h);
                    if (std::isfinite(d)) m3g_inner = std::max(m3g_inner, std::abs(d));
                }
            }
        }
    }
    est.L_g = kConstantSafety * lg;
    est.L_2g = kConstantSafety * chain * dg_ratio;
    est.M_3g = kConstantSafety * m3g_inner * mg;

    est.alpha = estimate_alpha(sys, sel, working_set, static_cast<int>(std::max<std::size_t>(samples, 27)));
    est.c_w = dither_sum_constant(sched.k);
    est.nu = est.c_w * est.M_g;
    return est;
}

// ---------------------------------------------------------------------------
// Budget and bounds
// ---------------------------------------------------------------------------

/// Residual target and its splits. Zero for delta_x, rho2 or lambda2 selects the default.
struct TuningBudget {
    double delta = 0.1;
    double rho = 1.0;
    double rho1 = 1.0;
    double rho2 = 0.0;
    double varsigma = 0.5;
    double lambda2 = 0.0;
    double delta_x = 0.0;
};

namespace detail {

/// Smallest positive root of an increasing f with f(0+) < 0, by bisection on a
/// bracket grown geometrically from machine epsilon. nullopt when f stays negative.
inline std::optional<double> increasing_root(const std::function<double(double)>& f, double limit = 1e12) {
    double lo = std::numeric_limits<double>::epsilon();
    if (f(lo) >= 0.0) return lo;
    double hi = 2.0 * lo;
    while (f(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > limit) return std::nullopt;
    }
    for (int it = 0; it < 400 && (hi - lo) > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/**
 * @brief Closed-form pieces of the constructive bounds for one budget.
 *
 * All members are pure functions of the stored constants, so a model can be
 * shared across threads.
 */
class BoundModel {
public:
    BoundModel(ConstantEstimates est, SigmaBounds sigma, TuningBudget budget)
        : est_(std::move(est)), sigma_(std::move(sigma)), budget_(budget) {
        resolve();
    }

    const ConstantEstimates& constants() const { return est_; }
    const SigmaBounds& sigmas() const { return sigma_; }
    /// Budget with defaults filled in.
    const TuningBudget& budget() const { return budget_; }
    double dist_to_boundary() const { return dist_; }
    double d() const { return dist_ - budget_.delta_x; }
    double c_J() const { return sigma_.sigma11 * budget_.delta_x * budget_.delta_x; }

    /// gamma1_bar(mu) = 3 nu / (rho1 mu^(varsigma + 1)), divided by eta for slowed dithers.
    double gamma1_bar(double mu, double eta = 1.0) const {
        return 3.0 * est_.nu / (eta * budget_.rho1 * std::pow(mu, budget_.varsigma + 1.0));
    }

    /// rho0 = rho1 mu^varsigma sqrt(mu) / 3
    double rho0(double mu) const { return budget_.rho1 * std::pow(mu, budget_.varsigma) * std::sqrt(mu) / 3.0; }

    double kappa_power_sum() const {
        double s = 0.0;
        for (int k : est_.sel.kappa) s += std::pow(static_cast<double>(k), 2.0 / 3.0);
        return std::pow(s, 0.75);
    }

    /// c_u at separation |x0 - xi0| = rho0(mu).
    double c_u(double gamma1, double eps, double mu) const {
        const double s1 = static_cast<double>(est_.sel.s1.size());
        const double a = est_.alpha;
        return std::sqrt(a) * (std::sqrt(gamma1 * a * eps * rho0(mu) * s1) + 2.0 * std::sqrt(2.0 * kPi)) *
               kappa_power_sum();
    }

    /// eps0 for a given c_u.
    double eps0_given(double gamma1, double mu, double cu) const {
        const double mf2cu2 = est_.M_f * est_.M_f * cu * cu;
        const double ratio = mf2cu2 > 0.0 ? 3.0 * rho0(mu) / mf2cu2 : std::numeric_limits<double>::infinity();
        return std::min(1.0, ratio) / gamma1;
    }

    /**
     * eps0(gamma1, mu) with the epsilon dependence of c_u resolved by a
     * fixed-point sweep from eps = mu; returns the largest iterate that
     * satisfies eps <= eps0(c_u(eps)).
     */
    double eps0(double gamma1, double mu) const {
        double e = eps0_given(gamma1, mu, c_u(gamma1, mu, mu));
        double best = e;
        for (int it = 0; it < 20; ++it) {
            const double next = eps0_given(gamma1, mu, c_u(gamma1, e, mu));
            if (next <= eps0_given(gamma1, mu, c_u(gamma1, next, mu))) best = std::max(best, next);
            if (std::abs(next - e) <= 1e-14 * e) break;
            e = next;
        }
        return best;
    }

    double zeta1(double gamma1, double cu, double eta = 1.0) const {
        const double a = est_.alpha;
        const double ga = std::pow(gamma1 * a, 1.5);
        double bracket_sum = 0.0;
        for (int j1 = 0; j1 < est_.input_dim; ++j1) {
            double inner = 0.0;
            for (std::size_t p = 0; p < est_.sel.s2.size(); ++p) {
                if (est_.sel.s2[p].second == j1) inner += std::pow(static_cast<double>(est_.sel.kappa[p]), -2.0 / 3.0);
            }
            if (inner > 0.0) bracket_sum += std::pow(inner, 0.75);
        }
        return est_.M_3f * cu * cu * cu +
               0.5 * est_.M_2f * std::sqrt(est_.nu / eta * budget_.varsigma * a) * ga +
               2.0 * ga * est_.M_2f * std::sqrt(static_cast<double>(est_.sel.s1.size())) * bracket_sum;
    }

    /**
     * eps_bar(gamma1, mu) = min{eps0, ((gamma1 - lambda1) / (zeta1 sqrt(delta_x)))^2}
     * with lambda1 the midpoint of [gamma1_bar, gamma1); capped at mu / 2 and
     * strictly below 1 / gamma1. Zero when gamma1 <= gamma1_bar.
     */
    double eps_bar(double gamma1, double mu, double eta = 1.0) const {
        const double gbar = gamma1_bar(mu, eta);
        if (!(gamma1 > gbar)) return 0.0;
        const double e0 = eps0(gamma1, mu);
        const double lambda1 = 0.5 * (gbar + gamma1);
        const double z1 = zeta1(gamma1, c_u(gamma1, e0, mu), eta);
        double e1 = e0;
        if (z1 > 0.0) {
            const double q = (gamma1 - lambda1) / (z1 * std::sqrt(budget_.delta_x));
            e1 = std::min(e1, q * q);
        }
        e1 = std::min(e1, 0.5 * mu);
        if (e1 * gamma1 >= 1.0) e1 = std::nextafter(1.0 / gamma1, 0.0);
        return e1;
    }

    /// Which term of eps_bar binds.
    std::string eps_binding(double gamma1, double mu, double eta = 1.0) const {
        const double gbar = gamma1_bar(mu, eta);
        if (!(gamma1 > gbar)) return "gamma1 <= gamma1_bar";
        const double e0 = eps0(gamma1, mu);
        const double eb = eps_bar(gamma1, mu, eta);
        if (eb == 0.5 * mu && e0 > eb) return "eps < mu";
        if (eb == e0) return std::abs(e0 * gamma1 - 1.0) < 1e-12 ? "eps gamma1 < 1" : "state excursion (eps0)";
        return "remainder contraction (eps1)";
    }

    /// Left side of the mu0 equation minus d.
    double mu0_residual(double mu) const {
        return std::sqrt(mu) * (2.0 * budget_.rho1 * std::pow(mu, budget_.varsigma) / 3.0 + est_.nu) - d();
    }

    double zeta2(double mu) const {
        const double s = budget_.varsigma;
        return est_.c_w * std::pow(mu, std::max(0.0, s - 0.5)) * budget_.rho1 *
                   (est_.L_g + std::sqrt(mu) * est_.L_2g * est_.c_w) +
               std::pow(mu, std::max(0.0, 0.5 - s)) * est_.M_3g;
    }

    /// Left minus right side of the mu_hat1 equation.
    double mu_hat1_residual(double mu) const {
        const double s = budget_.varsigma;
        const double r2 = budget_.rho2;
        const double z2 = zeta2(mu);
        const double g2 = est_.gamma2;
        return r2 * mu * g2 * sigma_.sigma3 * sigma_.sigma22 * sigma_.sigma22 +
               std::pow(mu, s) * z2 * (std::sqrt(sigma_.sigma22 * r2) + sigma_.sigma3 * z2 * std::pow(mu, 1.0 + s)) -
               r2 * (g2 * sigma_.sigma21 - budget_.lambda2);
    }

    /// Left side of the residual budget minus rho / 2.
    double budget_residual(double mu) const {
        return budget_.rho1 * std::pow(mu, budget_.varsigma) * std::sqrt(mu) + est_.nu * std::sqrt(mu) -
               0.5 * budget_.rho;
    }

    double beta(double mu) const {
        return std::sqrt(sigma_.sigma12 / sigma_.sigma11) * std::exp(budget_.lambda2 * mu);
    }

private:
    void resolve() {
        const auto& b = budget_;
        if (!(b.rho > 0.0)) throw InfeasibleBudget("rho must be positive", "rho > 0");
        if (!(b.rho1 > 0.0)) throw InfeasibleBudget("rho1 must be positive", "rho1 > 0");
        if (!(b.varsigma > 0.0)) throw InfeasibleBudget("varsigma must be positive", "varsigma > 0");
        if (!(sigma_.sigma11 > 0.0) || !(sigma_.sigma21 > 0.0))
            throw InfeasibleBudget("sigma11 and sigma21 must be positive", "cost hypotheses");
        if (sigma_.x_star.size() != est_.working_set.dim() || !est_.working_set.contains(sigma_.x_star))
            throw InfeasibleBudget("x* must lie in the working set", "x* in D'");
        dist_ = est_.working_set.distance_to_boundary(sigma_.x_star);
        const double ratio = std::sqrt(sigma_.sigma11 / sigma_.sigma12);
        if (!(b.delta > 0.0) || !(b.delta < ratio * dist_)) {
            std::ostringstream os;
            os << "delta must lie in (0, " << ratio * dist_ << ")";
            throw InfeasibleBudget(os.str(), "0 < delta < sqrt(sigma11/sigma12) dist(x*, dD)");
        }
        const double dx_lo = b.delta / ratio;
        if (budget_.delta_x == 0.0) budget_.delta_x = 0.5 * (dx_lo + dist_);
        if (!(budget_.delta_x > dx_lo) || !(budget_.delta_x < dist_)) {
            std::ostringstream os;
            os << "delta_x must lie in (" << dx_lo << ", " << dist_ << ")";
            throw InfeasibleBudget(os.str(), "delta_x interval");
        }
        const double rho2_cap = std::min(c_J(), 0.25 * b.rho * b.rho * sigma_.sigma11);
        if (budget_.rho2 == 0.0) budget_.rho2 = rho2_cap;
        if (!(budget_.rho2 > 0.0) || budget_.rho2 > rho2_cap * (1.0 + 1e-15))
            throw InfeasibleBudget("rho2 must lie in (0, min(c_J, rho^2 sigma11 / 4)]", "rho2 budget");
        const double lam_cap = est_.gamma2 * sigma_.sigma21;
        if (budget_.lambda2 == 0.0) budget_.lambda2 = 0.5 * lam_cap;
        if (!(budget_.lambda2 > 0.0) || !(budget_.lambda2 < lam_cap))
            throw InfeasibleBudget("lambda2 must lie in (0, gamma2 sigma21)", "lambda2 range");
    }

    ConstantEstimates est_;
    SigmaBounds sigma_;
    TuningBudget budget_;
    double dist_ = 0.0;
};

/// Output of compute_bounds: mu_bar with the candidates it was the minimum of.
struct TuningResult {
    std::shared_ptr<const BoundModel> model;
    double mu_bar = 0.0;
    std::string mu_binding;
    double mu0 = 0.0;
    double mu_hat1 = std::numeric_limits<double>::infinity();
    double mu_rate = 0.0;  ///< 1 / lambda2
    double mu_budget = 0.0;
    double predicted_beta = 0.0;
    double predicted_lambda = 0.0;

    double gamma1_bar(double mu, double eta = 1.0) const { return model->gamma1_bar(mu, eta); }
    double eps_bar(double gamma1, double mu, double eta = 1.0) const { return model->eps_bar(gamma1, mu, eta); }

    /// Slow-down factor so that gamma1_bar(mu) / eta <= gamma1 / 2 for a fixed gamma1.
    double eta_bar(double gamma1, double mu) const { return std::max(1.0, 2.0 * model->gamma1_bar(mu) / gamma1); }
};

/**
 * @brief mu_bar, gamma1_bar(mu), eps_bar(gamma1, mu) and the predicted decay.
 *
 * mu_bar = min{mu0, 1/lambda2, mu_hat1, mu_budget} where mu_budget is the
 * largest mu meeting the residual split.
 */
inline TuningResult compute_bounds(const ConstantEstimates& est, const SigmaBounds& sigmas,
                                   const TuningBudget& budget) {
    auto model = std::make_shared<const BoundModel>(est, sigmas, budget);
    TuningResult r;
    r.model = model;
    if (!(model->d() > 0.0)) throw InfeasibleBudget("dist(x*, dD') - delta_x must be positive", "d > 0");

    const auto& b = model->budget();
    if (est.nu == 0.0) {
        r.mu0 = std::pow(3.0 * model->d() / (2.0 * b.rho1), 2.0 / (2.0 * b.varsigma + 1.0));
    } else {
        auto root = detail::increasing_root([&](double mu) { return model->mu0_residual(mu); });
        if (!root) throw InfeasibleBudget("no positive root for the excursion constraint", "mu0");
        r.mu0 = *root;
    }
    r.mu_rate = 1.0 / b.lambda2;
    if (auto root = detail::increasing_root([&](double mu) { return model->mu_hat1_residual(mu); }))
        r.mu_hat1 = *root;
    auto budget_root = detail::increasing_root([&](double mu) { return model->budget_residual(mu); });
    if (!budget_root) throw InfeasibleBudget("no positive root for the residual split", "rho budget");
    r.mu_budget = *budget_root;
    // Bisection lands on either side of the root; step inside so the budget holds exactly.
    while (model->budget_residual(r.mu_budget) > 0.0) r.mu_budget = std::nextafter(r.mu_budget, 0.0);

    r.mu_bar = r.mu0;
    r.mu_binding = "excursion (mu0)";
    if (r.mu_rate < r.mu_bar) {
        r.mu_bar = r.mu_rate;
        r.mu_binding = "rate (1/lambda2)";
    }
    if (r.mu_hat1 < r.mu_bar) {
        r.mu_bar = r.mu_hat1;
        r.mu_binding = "cost decay (mu_hat1)";
    }
    if (r.mu_budget < r.mu_bar) {
        r.mu_bar = r.mu_budget;
        r.mu_binding = "residual split (rho)";
    }
    if (!(r.mu_bar > 0.0)) throw InfeasibleBudget("mu_bar is not positive", r.mu_binding);
    r.predicted_lambda = b.lambda2;
    r.predicted_beta = model->beta(r.mu_bar);
    return r;
}

// ---------------------------------------------------------------------------
// Chain validation
// ---------------------------------------------------------------------------

/// One constraint of the chain. margin >= 1 (or > 1 for strict checks) passes.
struct ChainCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double bound = 0.0;
    double margin = 0.0;
};

struct ChainReport {
    std::vector<ChainCheck> checks;
    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const ChainCheck& c) { return c.pass; });
    }
    const ChainCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

inline bool mu_over_eps_natural(double mu, double eps) {
    const double q = mu / eps;
    const double tol = std::max(1e-9, 8.0 * std::numeric_limits<double>::epsilon() * q);
    return std::abs(q - std::round(q)) <= tol && std::round(q) >= 1.0;
}

/// Ordered report on mu <= mu_bar, gamma1 > gamma1_bar, eps <= eps_bar, eps < mu, mu/eps in N, eps gamma1 < 1.
inline ChainReport validate_chain(const TuningResult& result, double mu, double gamma1, double eps,
                                  double eta = 1.0) {
    ChainReport rep;
    auto upper = [&](std::string name, double value, double bound, bool strict) {
        ChainCheck c{std::move(name), false, value, bound, value > 0.0 ? bound / value : 0.0};
        c.pass = strict ? value < bound : value <= bound;
        rep.checks.push_back(std::move(c));
    };
    upper("mu <= mu_bar", mu, result.mu_bar, false);
    const double gbar = result.gamma1_bar(mu, eta);
    {
        ChainCheck c{"gamma1 > gamma1_bar", gamma1 > gbar, gamma1, gbar,
                     gbar > 0.0 ? gamma1 / gbar : std::numeric_limits<double>::infinity()};
        rep.checks.push_back(std::move(c));
    }
    upper("eps <= eps_bar", eps, result.eps_bar(gamma1, mu, eta), false);
    upper("eps < mu", eps, mu, true);
    {
        const bool ok = mu_over_eps_natural(mu, eps);
        const double q = mu / eps;
        rep.checks.push_back({"mu/eps natural", ok, q, std::round(q), ok ? 1.0 : 0.0});
    }
    upper("eps gamma1 < 1", eps * gamma1, 1.0, true);
    return rep;
}

/// Parameters inside the chain: mu = mu_bar, gamma1 = 2 gamma1_bar(mu), eps = mu / ceil(mu / eps_bar).
struct Recommendation {
    double mu = 0.0;
    double gamma1 = 0.0;
    double epsilon = 0.0;
    double eta = 1.0;
};

inline Recommendation recommend(const TuningResult& result, double gamma1_factor = 2.0) {
    Recommendation rec;
    rec.mu = result.mu_bar;
    const double gbar = result.gamma1_bar(rec.mu);
    rec.gamma1 = gbar > 0.0 ? gamma1_factor * gbar : 1.0;
    const double eb = result.eps_bar(rec.gamma1, rec.mu);
    if (!(eb > 0.0)) throw InfeasibleBudget("eps_bar vanishes at the recommended gains", "eps_bar > 0");
    const double divisions = std::max(2.0, std::ceil(rec.mu / eb * (1.0 + 1e-12)));
    rec.epsilon = rec.mu / divisions;
    return rec;
}

/// Slowed-dither ordering: fixed gamma1, eta = eta_bar(gamma1, mu), eps from the slowed bound.
inline Recommendation recommend_slowed(const TuningResult& result, double gamma1) {
    Recommendation rec;
    rec.mu = result.mu_bar;
    rec.gamma1 = gamma1;
    rec.eta = result.eta_bar(gamma1, rec.mu);
    const double eb = result.eps_bar(gamma1, rec.mu, rec.eta);
    if (!(eb > 0.0)) throw InfeasibleBudget("eps_bar vanishes for the slowed dither", "eps_bar > 0");
    const double divisions = std::max(2.0, std::ceil(rec.mu / eb * (1.0 + 1e-12)));
    rec.epsilon = rec.mu / divisions;
    return rec;
}

}  // namespace nhes

#endif  // NHES_TUNER_HPP
