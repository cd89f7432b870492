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
#include "nhes/analysis.hpp"

#include <gtest/gtest.h>

using namespace nhes;

namespace {

// 200 points on each pair's validity range; log-spaced on the half line.
std::vector<double> pair_grid(const GeneratingPair& p) {
    std::vector<double> z;
    for (int i = 0; i < 200; ++i) {
        if (p.domain == PairDomain::real_line)
            z.push_back(-3.0 + 6.0 * i / 199.0);
        else
            z.push_back(0.05 * std::pow(3.0 / 0.05, i / 199.0));
    }
    return z;
}

class PairIdentity : public ::testing::TestWithParam<std::string> {};

}  // namespace

TEST_P(PairIdentity, AmplitudePhaseProductIsGamma2) {
    for (double gamma2 : {1.0, 2.0, 0.3}) {
        const GeneratingPair p = pair_library(GetParam(), gamma2);
        for (double z : pair_grid(p)) EXPECT_NEAR(amplitude_phase_product(p, z), gamma2, 1e-8 * gamma2) << z;
    }
}

TEST_P(PairIdentity, BracketGainIsMinusGamma2) {
    for (double gamma2 : {1.0, 2.0}) {
        const GeneratingPair p = pair_library(GetParam(), gamma2);
        for (double z : pair_grid(p)) EXPECT_NEAR(bracket_gain(p, z), -gamma2, 1e-6) << z;
    }
}

TEST_P(PairIdentity, PolarFormMatchesDirectEvaluation) {
    const GeneratingPair p = pair_library(GetParam(), 1.5);
    for (double z : pair_grid(p)) {
        EXPECT_NEAR(p.g_sin(z), p.r(z) * std::sin(p.phi(z)), 1e-12 * (1.0 + std::abs(z)));
        EXPECT_NEAR(p.g_cos(z), p.r(z) * std::cos(p.phi(z)), 1e-12 * (1.0 + std::abs(z)));
    }
}

INSTANTIATE_TEST_SUITE_P(Library, PairIdentity,
                         ::testing::Values("linear", "bounded", "sqrt_log", "gze18", "tanh_vanishing"));

TEST(PairLibrary, TanhVanishingPhaseDerivativeIsCoth) {
    const GeneratingPair p = pair_library("tanh_vanishing");
    for (double z : {0.1, 0.7, 2.0, 5.0}) {
        const double dphi = five_point_derivative(p.phi, z, 1e-4);
        EXPECT_NEAR(dphi, 1.0 / std::tanh(0.5 * z), 1e-8);
        EXPECT_NEAR(p.r(z) * p.r(z), std::tanh(0.5 * z), 1e-15);
    }
}

TEST(PairLibrary, HandValues) {
    EXPECT_EQ(bracket_gain(pair_library("linear"), 0.0), -1.0);
    EXPECT_NEAR(bracket_gain(pair_library("bounded"), kPi / 4), -1.0, 1e-9);
    const GeneratingPair lin = pair_library("linear", 4.0);
    EXPECT_DOUBLE_EQ(lin.g_sin(3.0), 6.0);
    EXPECT_DOUBLE_EQ(lin.g_cos(3.0), 2.0);
}

TEST(PairLibrary, VanishingPairsAreZeroAtTheirZero) {
    for (const char* name : {"gze18", "tanh_vanishing"}) {
        const GeneratingPair p = pair_library(name);
        ASSERT_TRUE(p.zero_at.has_value());
        EXPECT_EQ(p.g_sin(*p.zero_at), 0.0);
        EXPECT_EQ(p.g_cos(*p.zero_at), 0.0);
        EXPECT_LT(std::abs(p.g_sin(1e-8)) + std::abs(p.g_cos(1e-8)), 1e-3);
    }
}

TEST(PairLibrary, DomainErrors) {
    EXPECT_THROW(pair_library("sqrt_log").g_sin(-0.1), DomainError);
    EXPECT_THROW(pair_library("tanh_vanishing").g_cos(-1e-3), DomainError);
    EXPECT_THROW(bracket_gain(pair_library("gze18"), 0.0), DomainError);
    EXPECT_THROW(pair_library("linear").g_sin(std::nan("")), DomainError);
    EXPECT_THROW(pair_library("unknown"), std::invalid_argument);
    EXPECT_THROW(pair_library("linear", 0.0), std::invalid_argument);
}

TEST(Dither, HandValues) {
    const DitherSchedule s{{1, 2, 3}, 0.5, 1.0};
    EXPECT_NEAR(dither(s, 0, 0.0), std::sqrt(8.0 * kPi), 1e-12);
    EXPECT_NEAR(std::sqrt(8.0 * kPi), 5.0133, 1e-4);
    for (int j = 3; j < 6; ++j) EXPECT_EQ(dither(s, j, 0.0), 0.0);
    EXPECT_THROW(dither(s, 6, 0.0), std::out_of_range);
}

TEST(Dither, SlowedVariantScalesAmplitudeAndTime) {
    const DitherSchedule fast{{1, 2}, 0.4, 1.0};
    const DitherSchedule slow{{1, 2}, 0.4, 3.0};
    for (int j = 0; j < 4; ++j) {
        for (double t : {0.0, 0.11, 0.5}) EXPECT_DOUBLE_EQ(dither(slow, j, 3.0 * t), dither(fast, j, t) / 3.0);
    }
    const DitherSchedule same{{1, 2}, 0.4, 1.0};
    EXPECT_EQ(dither(same, 1, 0.123), dither(fast, 1, 0.123));
}

TEST(Dither, IteratedIntegralLaw) {
    for (double mu : {0.5, 0.1}) {
        const DitherSchedule s{{1, 2, 3}, mu, 1.0};
        const auto inputs = dither_inputs(s);
        const IteratedIntegrals it = iterated_integrals(inputs, 0.0, mu, 1024);  // 16384 nodes
        for (int j = 0; j < 3; ++j) {
            const double amp = std::sqrt(4.0 * kPi * s.k[static_cast<std::size_t>(j)] / mu);
            EXPECT_LE(std::abs(it.first[j]), 1e-8 * amp * mu);
            EXPECT_NEAR(it.second(j + 3, j), mu, 1e-6 * mu);
            EXPECT_NEAR(it.second(j, j + 3), -mu, 1e-6 * mu);
        }
    }
}

TEST(Dither, CrossFrequencyOrthogonality) {
    const double mu = 0.5;
    const DitherSchedule s{{1, 2, 3}, mu, 1.0};
    const int nodes = 4096;
    for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
            if (s.k[static_cast<std::size_t>(a % 3)] == s.k[static_cast<std::size_t>(b % 3)]) continue;
            double sum = 0.0;
            for (int k = 0; k < nodes; ++k) {
                const double t = (k + 0.5) * mu / nodes;
                sum += dither(s, a, t) * dither(s, b, t) * mu / nodes;
            }
            const double scale = std::abs(dither(s, a % 3, 0.0) * dither(s, b % 3, 0.0)) * mu;
            EXPECT_LE(std::abs(sum), 1e-8 * scale) << a << "," << b;
        }
    }
}

TEST(SeekerRhs, LinearPairAtZeroCostAndTimeZero) {
    const DitherSchedule s{{1, 2, 3}, 0.5, 1.0};
    EXPECT_EQ(seeker_rhs(pair_library("linear"), s, 0.0, 0.0), Vector::Zero(3));
}

TEST(SeekerRhs, VanishingPairAtItsZeroIsStill) {
    const DitherSchedule s{{1, 2, 3}, 0.5, 1.0};
    for (double t : {0.0, 0.1, 0.33}) EXPECT_EQ(seeker_rhs(pair_library("tanh_vanishing"), s, 0.0, t), Vector::Zero(3));
    EXPECT_THROW(seeker_rhs(pair_library("sqrt_log"), s, -1.0, 0.0), DomainError);
}

TEST(DitherSchedule, Validation) {
    EXPECT_TRUE((DitherSchedule{{1, 2, 3}, 0.5, 1.0}).problems().empty());
    EXPECT_FALSE((DitherSchedule{{1, 1}, 0.5, 1.0}).problems().empty());
    EXPECT_FALSE((DitherSchedule{{0}, 0.5, 1.0}).problems().empty());
    EXPECT_FALSE((DitherSchedule{{1}, 0.0, 1.0}).problems().empty());
    EXPECT_FALSE((DitherSchedule{{1}, 0.5, 0.5}).problems().empty());
    EXPECT_EQ(DitherSchedule::with_default_k(3, 0.5).k, (std::vector<int>{1, 2, 3}));
    EXPECT_DOUBLE_EQ((DitherSchedule{{1}, 0.5, 2.0}).period(), 1.0);
}

TEST(DitherSumConstant, MatchesDefinitionAndBoundsTheInputs) {
    const double cw = dither_sum_constant({1, 2, 3});
    EXPECT_NEAR(cw, 2.0 * (std::sqrt(2 * kPi) + std::sqrt(4 * kPi) + std::sqrt(6 * kPi)), 1e-12);
    EXPECT_NEAR(cw, 20.786, 1e-3);
    const DitherSchedule s{{1, 2, 3}, 0.25, 1.0};
    EXPECT_LE(input_sum_bound(dither_inputs(s), 0.0, s.mu), cw / std::sqrt(s.mu));
}
