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
#include "nhes/system_model.hpp"

#include <gtest/gtest.h>

using namespace nhes;

namespace {

// Brockett fields without Jacobians, so brackets go through finite differences.
ControlSystem brockett_fd() {
    const ControlSystem ref = brockett_system();
    return ControlSystem("brockett-fd", 3, {ref.field_function(0), ref.field_function(1)}, Box::unbounded(3));
}

Matrix dense_inverse_norm_oracle(const Box& box) {
    // Brute force over a fine grid: F(x) = [[1,0,0],[0,1,0],[x2,-x1,-2]].
    Matrix worst(1, 1);
    worst(0, 0) = 0.0;
    for (const Vector& x : grid_points(box, 21)) {
        Matrix f(3, 3);
        f << 1, 0, 0, 0, 1, 0, x[1], -x[0], -2;
        worst(0, 0) = std::max(worst(0, 0), spectral_norm(f.inverse()));
    }
    return worst;
}

}  // namespace

TEST(ControlSystem, RejectsInconsistentShapes) {
    const VectorField f = [](const Vector& x) { return x; };
    EXPECT_THROW(ControlSystem("bad", 2, {f, f, f}, Box::unbounded(2)), ValidationError);
    EXPECT_THROW(ControlSystem("bad", 2, {f}, Box::unbounded(3)), ValidationError);
    EXPECT_THROW(ControlSystem("bad", 2, {}, Box::unbounded(2)), ValidationError);
    EXPECT_TRUE(brockett_system().is_nonholonomic());
}

TEST(LieBracket, BrockettIsConstant) {
    const ControlSystem sys = brockett_system();
    for (const Vector& x : sample_points(Box::cube(3, -2.0, 2.0), 20, 5)) {
        EXPECT_EQ(lie_bracket(sys, 0, 1, x), (Vector{{0.0, 0.0, -2.0}}));
        EXPECT_EQ(lie_bracket(sys, 0, 0, x), Vector::Zero(3));
    }
}

TEST(LieBracket, AntisymmetricExactlyWithAnalyticJacobians) {
    const ControlSystem sys = brockett_system();
    for (const Vector& x : sample_points(Box::cube(3, -2.0, 2.0), 50, 9))
        EXPECT_EQ(lie_bracket(sys, 0, 1, x), -lie_bracket(sys, 1, 0, x));
}

TEST(LieBracket, FiniteDifferencesAgreeWithAnalytic) {
    const ControlSystem exact = brockett_system();
    const ControlSystem fd = brockett_fd();
    for (const Vector& x : grid_points(Box::cube(3, -2.0, 2.0), 5)) {
        const Vector a = lie_bracket(exact, 0, 1, x);
        const Vector b = lie_bracket(fd, 0, 1, x);
        EXPECT_LE((a - b).norm(), 1e-6 * a.norm());
        EXPECT_LE((b + lie_bracket(fd, 1, 0, x)).norm(), 1e-6);
    }
}

TEST(LieBracket, OutsideDomainThrows) {
    const ControlSystem sys = brockett_system().with_domain(Box::cube(3, -1.0, 1.0));
    EXPECT_THROW(lie_bracket(sys, 0, 1, Vector::Constant(3, 2.0)), DomainError);
    EXPECT_THROW(lie_bracket(sys, 0, 2, Vector::Zero(3)), std::out_of_range);
}

TEST(LieBracket, NonlinearFieldsMatchHandComputation) {
    // f1 = (1, 0, x1^2), f2 = (0, 1, 0): [f1, f2] = -Df1 f2 = 0; [f2, f1] = Df1 f2 = 0;
    // f1 = (x2, 0, 0), f2 = (0, x1, 0): [f1, f2] = Df2 f1 - Df1 f2 = (-x1, x2, 0).
    const ControlSystem sys("pair", 3,
                            {[](const Vector& x) { return Vector{{x[1], 0.0, 0.0}}; },
                             [](const Vector& x) { return Vector{{0.0, x[0], 0.0}}; }},
                            Box::unbounded(3));
    const Vector x{{0.7, -0.4, 2.0}};
    EXPECT_LE((lie_bracket(sys, 0, 1, x) - Vector{{-0.7, -0.4, 0.0}}).norm(), 1e-8);
}

TEST(FrameMatrix, BrockettAssemblyExamples) {
    const ControlSystem sys = brockett_system();
    const BracketSelection sel = brockett_selection();
    Matrix expected(3, 3);
    expected << 1, 0, 0, 0, 1, 0, -1, -1, -2;
    EXPECT_EQ(frame_matrix(sys, sel, Vector{{1.0, -1.0, 1.0}}), expected);
    expected << 1, 0, 0, 0, 1, 0, 0, 0, -2;
    EXPECT_EQ(frame_matrix(sys, sel, Vector::Zero(3)), expected);
}

TEST(FrameMatrix, ColumnsAreTheIndividualFieldsAndBrackets) {
    const ControlSystem sys = brockett_fd();
    const BracketSelection sel = brockett_selection(2);
    for (const Vector& x : sample_points(Box::cube(3, -2.0, 2.0), 10, 2)) {
        const Matrix f = frame_matrix(sys, sel, x);
        EXPECT_EQ(Vector(f.col(0)), sys.field(0, x));
        EXPECT_EQ(Vector(f.col(1)), sys.field(1, x));
        EXPECT_EQ(Vector(f.col(2)), lie_bracket(sys, 0, 1, x));
    }
}

TEST(FrameMatrix, SingularFrameNamesThePoint) {
    const ControlSystem sys("dependent", 2,
                            {[](const Vector&) { return Vector{{1.0, 0.0}}; },
                             [](const Vector&) { return Vector{{2.0, 0.0}}; }},
                            Box::unbounded(2));
    const BracketSelection sel{{0, 1}, {}, {}};
    try {
        frame_matrix(sys, sel, Vector{{0.5, 0.25}});
        FAIL() << "expected RankDeficiencyError";
    } catch (const RankDeficiencyError& e) {
        EXPECT_EQ(e.point(), (Vector{{0.5, 0.25}}));
        EXPECT_NE(std::string(e.what()).find("0.5"), std::string::npos);
    }
}

TEST(BracketSelection, ValidationRules) {
    EXPECT_TRUE(brockett_selection().problems(3, 2).empty());
    EXPECT_FALSE((BracketSelection{{0}, {{0, 1}}, {1}}).problems(3, 2).empty());
    EXPECT_FALSE((BracketSelection{{0, 1}, {{0, 2}}, {1}}).problems(3, 2).empty());
    EXPECT_FALSE((BracketSelection{{0}, {{0, 1}, {1, 0}}, {2, 2}}).problems(3, 2).empty());
    EXPECT_FALSE((BracketSelection{{0, 1}, {{0, 1}}, {}}).problems(3, 2).empty());
    const auto d = BracketSelection::with_default_kappa({0}, {{0, 1}, {1, 0}});
    EXPECT_EQ(d.kappa, (std::vector<int>{1, 2}));
}

TEST(RankCondition, BrockettGridIsOk) {
    const auto grid = grid_points(Box::cube(3, -2.0, 2.0), 5);
    const RankReport r = check_rank_condition(brockett_system(), brockett_selection(), grid);
    EXPECT_TRUE(r.ok);
    EXPECT_TRUE(r.witnesses.empty());
    EXPECT_TRUE(std::isfinite(r.worst_condition));
    // ok on a grid implies estimate_alpha succeeds on it.
    EXPECT_GT(estimate_alpha(brockett_system(), brockett_selection(), Box::cube(3, -2.0, 2.0), 125), 0.0);
}

TEST(RankCondition, DependentFieldsFailEverywhere) {
    const ControlSystem sys("dependent", 2,
                            {[](const Vector& x) { return Vector{{1.0, x[0]}}; },
                             [](const Vector& x) { return Vector{{2.0, 2.0 * x[0]}}; }},
                            Box::unbounded(2));
    const auto grid = grid_points(Box::cube(2, -1.0, 1.0), 4);
    const RankReport r = check_rank_condition(sys, BracketSelection{{0, 1}, {}, {}}, grid);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.witnesses.size(), grid.size());
}

TEST(RankCondition, ConstantIndependentFieldsWithoutBrackets) {
    const ControlSystem sys("planar", 2,
                            {[](const Vector&) { return Vector{{1.0, 0.0}}; },
                             [](const Vector&) { return Vector{{1.0, 1.0}}; }},
                            Box::unbounded(2));
    const RankReport r = check_rank_condition(sys, BracketSelection{{0, 1}, {}, {}},
                                              grid_points(Box::cube(2, -1.0, 1.0), 3));
    EXPECT_TRUE(r.ok);
}

TEST(EstimateAlpha, BoundsDenseGridOracle) {
    const Box box = Box::cube(3, -2.0, 2.0);
    const double alpha = estimate_alpha(brockett_system(), brockett_selection(), box, 125);
    const double oracle = dense_inverse_norm_oracle(box)(0, 0);
    EXPECT_GE(alpha, oracle);
    EXPECT_LE(alpha, 1.1 * oracle * (1.0 + 1e-12));
}

TEST(EstimateAlpha, IdentityFrameAndSinglePoint) {
    const ControlSystem id("identity", 2,
                           {[](const Vector&) { return Vector{{1.0, 0.0}}; },
                            [](const Vector&) { return Vector{{0.0, 1.0}}; }},
                           Box::unbounded(2));
    EXPECT_DOUBLE_EQ(estimate_alpha(id, BracketSelection{{0, 1}, {}, {}}, Box::cube(2, -1.0, 1.0), 9), 1.1);
    // F(0)^{-1} = diag(1, 1, -1/2), spectral norm 1.
    EXPECT_NEAR(estimate_alpha(brockett_system(), brockett_selection(), Box::cube(3, -1.0, 1.0), 1), 1.1, 1e-14);
}

TEST(SystemRegistry, BuiltInAndCustom) {
    auto& reg = SystemRegistry::instance();
    EXPECT_TRUE(reg.contains("brockett"));
    EXPECT_THROW(reg.make("no-such-system"), std::out_of_range);
    reg.add("brockett-copy", brockett_system);
    EXPECT_EQ(reg.make("brockett-copy").state_dim(), 3);
}
