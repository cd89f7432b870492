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
#ifndef NHES_COST_HPP
#define NHES_COST_HPP

#include "nhes/core.hpp"

namespace nhes {

/// J(x) = sum_i w_i (x_i - x*_i)^2 + offset
struct QuadraticCost {
    Vector x_star;
    Vector weights;
    double offset = 0.0;

    static QuadraticCost isotropic(const Vector& x_star, double scale = 1.0, double offset = 0.0) {
        return {x_star, Vector::Constant(x_star.size(), scale), offset};
    }

    double operator()(const Vector& x) const {
        return (weights.array() * (x - x_star).array().square()).sum() + offset;
    }

    Vector gradient(const Vector& x) const { return 2.0 * weights.cwiseProduct(x - x_star); }

    Matrix hessian(const Vector&) const { return Matrix(2.0 * weights.asDiagonal()); }

    double minimum() const { return offset; }

    ScalarField as_field() const {
        return [c = *this](const Vector& x) { return c(x); };
    }
    VectorField gradient_field() const {
        return [c = *this](const Vector& x) { return c.gradient(x); };
    }
    JacobianField hessian_field() const {
        return [c = *this](const Vector& x) { return c.hessian(x); };
    }
};

}  // namespace nhes

#endif  // NHES_COST_HPP
