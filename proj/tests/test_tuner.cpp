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
#include "nhes/cost.hpp"
#include "nhes/tuner.hpp"

#include <gtest/gtest.h>

using namespace nhes;

namespace {

// Hand-set constants: unit quadratic cost, cube of half-width 1.
ConstantEstimates synthetic_constants(double nu) {
    ConstantEstimates e;
    e.M_f = std::sqrt(2.0);
    e.M_2f = 1.0;
    e.M_3f = 0.1;
    e.M_g = nu / 20.0;
    e.L_g = 2.0;
    e.L_2g = 4.0;
    e.M_3g = 1.0;
    e.alpha = 1.2;
    e.c_w = 20.0;
    e.nu = nu;
    e.working_set = Box::cube(3, -1.0, 1.0);
    e.sel = brockett_selection();
    e.input_dim = 2;
    e.gamma2 = 1.0;
    return e;
}

SigmaBounds unit_sigma() {
    SigmaBounds s;
    s.sigma11 = s.sigma12 = 1.0;
    s.sigma21 = s.sigma22 = 4.0;
    s.sigma3 = 2.0;
    s.x_star = Vector::Zero(3);
    return s;
}

TuningBudget desk_budget() {
    TuningBudget b;
    b.delta = 0.05;
    b.rho = 0.5;
    b.varsigma = 2.0;
    b.rho1 = 1e10;
    return b;
}

// The estimated Brockett setup used throughout: vanishing pair on [-0.5, 0.5]^3.
struct BrockettTuning {
    ConstantEstimates est;
    SigmaBounds sig;
    TuningResult res;
};

const BrockettTuning& brockett_tuning() {
    static const BrockettTuning t = [] {
        const QuadraticCost cost = QuadraticCost::isotropic(Vector::Zero(3));
        const Box working = Box::cube(3, -0.5, 0.5);
        BrockettTuning out;
        out.est = estimate_constants(brockett_system(), brockett_selection(), pair_library("tanh_vanishing"),
                                     DitherSchedule{{1, 2, 3}, 0.5, 1.0}, cost.as_field(), working, 200, 7);
        out.sig = estimate_sigma(cost.as_field(), cost.gradient_field(), cost.hessian_field(), working,
                                 Vector::Zero(3), 500, 7);
        out.res = compute_bounds(out.est, out.sig, desk_budget());
        return out;
    }();
    return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// estimate_constants
// ---------------------------------------------------------------------------

TEST(EstimateConstants, BrockettPlantBounds) {
    const QuadraticCost cost = QuadraticCost::isotropic(Vector::Zero(3));
    const auto e = estimate_constants(brockett_system(), brockett_selection(), pair_library("bounded"),
                                      DitherSchedule{{1, 2, 3}, 0.5, 1.0}, cost.as_field(), Box::cube(3, -2.0, 2.0),
                                      100, 3);
    // |f1| = sqrt(1 + x2^2) peaks at the grid corners.
    EXPECT_NEAR(e.M_f, kConstantSafety * std::sqrt(5.0), 1e-12);
    // L_{f_i} f_j is (0, 0, +-1) or zero.
    EXPECT_NEAR(e.M_2f, kConstantSafety, 1e-12);
    EXPECT_NEAR(e.M_3f, 0.0, 1e-6);
    EXPECT_NEAR(e.M_g, kConstantSafety, 1e-12);
    EXPECT_NEAR(e.c_w, 2.0 * (std::sqrt(2 * kPi) + std::sqrt(4 * kPi) + std::sqrt(6 * kPi)), 1e-12);
    EXPECT_NEAR(e.c_w, 20.786, 1e-3);
    EXPECT_DOUBLE_EQ(e.nu, e.c_w * e.M_g);
    EXPECT_GT(e.alpha, 1.0);
}

TEST(EstimateConstants, ConstantFieldsAndConstantCost) {
    const ControlSystem sys("planar", 2,
                            {[](const Vector&) { return Vector{{1.0, 0.0}}; },
                             [](const Vector&) { return Vector{{0.0, 1.0}}; }},
                            Box::unbounded(2));
    const auto e = estimate_constants(sys, BracketSelection{{0, 1}, {}, {}}, pair_library("linear"),
                                      DitherSchedule{{1, 2}, 0.5, 1.0}, [](const Vector&) { return 0.3; },
                                      Box::cube(2, -1.0, 1.0), 50);
    EXPECT_EQ(e.M_2f, 0.0);
    EXPECT_EQ(e.M_3f, 0.0);
    EXPECT_EQ(e.L_g, 0.0);
    EXPECT_EQ(e.L_2g, 0.0);
}

TEST(EstimateConstants, UndefinedSeekerFieldIsADomainReport) {
    const QuadraticCost cost = QuadraticCost::isotropic(Vector::Zero(3));
    EXPECT_THROW(estimate_constants(brockett_system(), brockett_selection(), pair_library("sqrt_log"),
                                    DitherSchedule{{1, 2, 3}, 0.5, 1.0}, cost.as_field(), Box::cube(3, -1.0, 1.0), 50,
                                    1, 0.5),
                 DomainError);
    EXPECT_THROW(estimate_constants(brockett_system(), brockett_selection(), pair_library("linear"),
                                    DitherSchedule{{1, 2, 3}, 0.5, 1.0}, cost.as_field(), Box::unbounded(3), 50),
                 DomainError);
}

TEST(EstimateConstants, LipschitzBoundsTheCloudQuotients) {
    const auto& e = brockett_tuning().est;
    const GeneratingPair p = pair_library("tanh_vanishing");
    const QuadraticCost cost = QuadraticCost::isotropic(Vector::Zero(3));
    const auto pts = sample_points(e.working_set, 60, 99);
    for (std::size_t a = 0; a + 1 < pts.size(); ++a) {
        const double za = cost(pts[a]), zb = cost(pts[a + 1]);
        const double q = std::abs(p.g_cos(za) - p.g_cos(zb)) / (pts[a] - pts[a + 1]).norm();
        EXPECT_LE(q, e.L_g);
    }
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

TEST(BoundModel, Gamma1BarWorkedExample) {
    TuningBudget b;
    b.rho1 = 1.0;
    b.varsigma = 0.5;
    b.rho = 1.0;
    b.delta = 0.1;
    const BoundModel m(synthetic_constants(20.0), unit_sigma(), b);
    EXPECT_NEAR(m.gamma1_bar(0.25), 480.0, 1e-10);
    EXPECT_NEAR(m.gamma1_bar(0.25, 4.0), 120.0, 1e-10);
}

TEST(BoundModel, Gamma1BarStrictlyDecreasesInMu) {
    const BoundModel& m = *brockett_tuning().res.model;
    double prev = std::numeric_limits<double>::infinity();
    for (double mu = 1e-6; mu < 1.0; mu *= 1.5) {
        const double g = m.gamma1_bar(mu);
        EXPECT_LT(g, prev);
        prev = g;
    }
}

TEST(BoundModel, EpsBarDecreasesInGamma1OnceTheExcursionTermBinds) {
    // Just above gamma1_bar the contraction term starts from zero and rises;
    // from there on the excursion term binds and eps_bar strictly decreases.
    const TuningResult& r = brockett_tuning().res;
    const double mu = r.mu_bar;
    const double gbar = r.gamma1_bar(mu);
    EXPECT_EQ(r.eps_bar(0.5 * gbar, mu), 0.0);
    EXPECT_EQ(r.eps_bar(gbar, mu), 0.0);
    double prev = 0.0;
    bool decreasing = false;
    for (double f = 1.01; f < 1e4; f *= 1.2) {
        const double e = r.eps_bar(f * gbar, mu);
        const bool excursion = r.model->eps_binding(f * gbar, mu) == "state excursion (eps0)";
        EXPECT_GT(e, 0.0);
        if (excursion) {
            if (decreasing) EXPECT_LT(e, prev) << f;
            decreasing = true;
        } else {
            EXPECT_FALSE(decreasing) << f;
            EXPECT_GT(e, prev) << f;
        }
        prev = e;
    }
    EXPECT_TRUE(decreasing);
}

TEST(BoundModel, EpsBarRespectsCaps) {
    const TuningResult& r = brockett_tuning().res;
    for (double mu : {r.mu_bar, 0.5 * r.mu_bar}) {
        const double g = 3.0 * r.gamma1_bar(mu);
        const double e = r.eps_bar(g, mu);
        EXPECT_LE(e, 0.5 * mu);
        EXPECT_LT(e * g, 1.0);
        EXPECT_LE(e, r.model->eps0(g, mu));
    }
}

TEST(BoundModel, Eps0SweepReturnsAConsistentIterate) {
    const BoundModel& m = *brockett_tuning().res.model;
    const double mu = brockett_tuning().res.mu_bar;
    const double g = 2.0 * m.gamma1_bar(mu);
    const double e = m.eps0(g, mu);
    EXPECT_LE(e, m.eps0_given(g, mu, m.c_u(g, e, mu)) * (1.0 + 1e-12));
    // c_u increases in epsilon.
    EXPECT_LT(m.c_u(g, 0.5 * e, mu), m.c_u(g, e, mu));
}

TEST(BoundModel, DefaultsAreFilledInside) {
    const BoundModel& m = *brockett_tuning().res.model;
    const auto& b = m.budget();
    const SigmaBounds& s = m.sigmas();
    EXPECT_GT(b.delta_x, b.delta / std::sqrt(s.sigma11 / s.sigma12));
    EXPECT_LT(b.delta_x, m.dist_to_boundary());
    EXPECT_LE(b.rho2, 0.25 * b.rho * b.rho * s.sigma11);
    EXPECT_LE(b.rho2, m.c_J());
    EXPECT_DOUBLE_EQ(b.lambda2, 0.5 * m.constants().gamma2 * s.sigma21);
}

TEST(BoundModel, InfeasibleBudgetsNameTheConstraint) {
    TuningBudget b = desk_budget();
    b.delta = 5.0;
    try {
        BoundModel(synthetic_constants(20.0), unit_sigma(), b);
        FAIL();
    } catch (const InfeasibleBudget& e) {
        EXPECT_NE(e.constraint().find("delta"), std::string::npos);
    }
    b = desk_budget();
    b.rho = 0.0;
    EXPECT_THROW(BoundModel(synthetic_constants(20.0), unit_sigma(), b), InfeasibleBudget);
    SigmaBounds far = unit_sigma();
    far.x_star = Vector::Constant(3, 3.0);
    EXPECT_THROW(BoundModel(synthetic_constants(20.0), far, desk_budget()), InfeasibleBudget);
    b = desk_budget();
    b.lambda2 = 10.0;
    EXPECT_THROW(BoundModel(synthetic_constants(20.0), unit_sigma(), b), InfeasibleBudget);
}

// ---------------------------------------------------------------------------
// compute_bounds
// ---------------------------------------------------------------------------

TEST(ComputeBounds, Mu0RootResidual) {
    const TuningResult& r = brockett_tuning().res;
    const double d = r.model->d();
    EXPECT_LE(std::abs(r.model->mu0_residual(r.mu0)), 1e-10 * d);
}

TEST(ComputeBounds, ZeroNuUsesClosedForm) {
    const ConstantEstimates e = synthetic_constants(0.0);
    TuningBudget b;
    b.delta = 0.1;
    b.rho = 0.5;
    const TuningResult r = compute_bounds(e, unit_sigma(), b);
    const double d = r.model->d();
    EXPECT_NEAR(r.mu0, std::pow(3.0 * d / 2.0, 2.0 / 2.0), 1e-14);
    EXPECT_NEAR(r.model->mu0_residual(r.mu0), 0.0, 1e-12);
    EXPECT_EQ(r.gamma1_bar(r.mu_bar), 0.0);
}

TEST(ComputeBounds, BudgetConsistencyAtMuBar) {
    const TuningResult& r = brockett_tuning().res;
    const auto& b = r.model->budget();
    const double mu = r.mu_bar;
    EXPECT_LE(r.model->budget_residual(mu), 0.0);
    EXPECT_GT(r.model->budget_residual(2.0 * r.mu_budget), 0.0);
    EXPECT_LE(b.rho2, 0.25 * b.rho * b.rho * r.model->sigmas().sigma11);
}

TEST(ComputeBounds, MuBarIsTheSmallestCandidate) {
    const TuningResult& r = brockett_tuning().res;
    EXPECT_EQ(r.mu_bar, std::min({r.mu0, r.mu_rate, r.mu_hat1, r.mu_budget}));
    EXPECT_FALSE(r.mu_binding.empty());
    EXPECT_NEAR(r.predicted_beta,
                std::sqrt(r.model->sigmas().sigma12 / r.model->sigmas().sigma11) *
                    std::exp(r.predicted_lambda * r.mu_bar),
                1e-12);
}

TEST(ComputeBounds, TightResidualBudgetShrinksMu) {
    const auto& t = brockett_tuning();
    TuningBudget b = desk_budget();
    b.rho = 0.25;
    const TuningResult tight = compute_bounds(t.est, t.sig, b);
    EXPECT_LT(tight.mu_budget, t.res.mu_budget);
}

TEST(IncreasingRoot, FindsRootOrReportsNone) {
    const auto r = detail::increasing_root([](double x) { return x * x - 2.0; });
    ASSERT_TRUE(r.has_value());
    EXPECT_NEAR(*r, std::sqrt(2.0), 1e-14);
    EXPECT_FALSE(detail::increasing_root([](double) { return -1.0; }).has_value());
}

// ---------------------------------------------------------------------------
// validate_chain and recommendations
// ---------------------------------------------------------------------------

TEST(ValidateChain, PassesAtTheRecommendation) {
    const TuningResult& r = brockett_tuning().res;
    const Recommendation rec = recommend(r);
    const ChainReport rep = validate_chain(r, rec.mu, rec.gamma1, rec.epsilon);
    EXPECT_TRUE(rep.all_pass());
    ASSERT_EQ(rep.checks.size(), 6u);
    EXPECT_EQ(rep.checks[0].name, "mu <= mu_bar");
}

TEST(ValidateChain, EachViolationFailsItsOwnCheck) {
    const TuningResult& r = brockett_tuning().res;
    const Recommendation rec = recommend(r);
    auto failing = [&](double mu, double g, double eps) {
        std::vector<std::string> names;
        for (const auto& c : validate_chain(r, mu, g, eps).checks)
            if (!c.pass) names.push_back(c.name);
        return names;
    };
    auto contains = [](const std::vector<std::string>& v, const std::string& s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    };
    EXPECT_TRUE(contains(failing(2.0 * rec.mu, rec.gamma1, rec.epsilon), "mu <= mu_bar"));
    EXPECT_TRUE(contains(failing(rec.mu, 0.5 * r.gamma1_bar(rec.mu), rec.epsilon), "gamma1 > gamma1_bar"));
    EXPECT_TRUE(contains(failing(rec.mu, rec.gamma1, rec.mu), "eps < mu"));
    EXPECT_TRUE(contains(failing(rec.mu, rec.gamma1, rec.mu / 2.5), "mu/eps natural"));
    EXPECT_TRUE(contains(failing(rec.mu, rec.gamma1, rec.mu / 2.0), "eps <= eps_bar"));
    EXPECT_TRUE(contains(failing(rec.mu, 2.0 / rec.epsilon, rec.epsilon), "eps gamma1 < 1"));
}

TEST(ValidateChain, GammaMarginReportsTheFactor) {
    const TuningResult& r = brockett_tuning().res;
    const double gbar = r.gamma1_bar(r.mu_bar);
    const ChainCheck* c = validate_chain(r, r.mu_bar, 0.5 * gbar, 1e-12).find("gamma1 > gamma1_bar");
    ASSERT_NE(c, nullptr);
    EXPECT_FALSE(c->pass);
    EXPECT_NEAR(c->bound / c->value, 2.0, 1e-12);
}

TEST(ValidateChain, HandPickedGainsNeedNotPass) {
    // The bounds are conservative: the hand-picked gains sit far outside them.
    const TuningResult& r = brockett_tuning().res;
    EXPECT_FALSE(validate_chain(r, 0.5, 20.0, 0.1).all_pass());
}

TEST(Recommend, SlowedDitherKeepsGamma1) {
    const TuningResult& r = brockett_tuning().res;
    const double gamma1 = 0.25 * r.gamma1_bar(r.mu_bar);
    const Recommendation rec = recommend_slowed(r, gamma1);
    EXPECT_EQ(rec.gamma1, gamma1);
    EXPECT_NEAR(rec.eta, 8.0, 1e-9);
    EXPECT_TRUE(validate_chain(r, rec.mu, rec.gamma1, rec.epsilon, rec.eta).all_pass());
    EXPECT_TRUE(mu_over_eps_natural(rec.mu, rec.epsilon));
}

TEST(MuOverEpsNatural, ToleranceScalesWithQuotient) {
    EXPECT_TRUE(mu_over_eps_natural(0.5, 0.1));
    EXPECT_FALSE(mu_over_eps_natural(0.5, 0.2));
    EXPECT_FALSE(mu_over_eps_natural(1.0, 2.0));
    EXPECT_TRUE(mu_over_eps_natural(1.0, 1.0 / 3.0));
}
