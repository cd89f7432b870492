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
#ifndef NHES_CORE_HPP
#define NHES_CORE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nhes {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// x -> R^n
using VectorField = std::function<Vector(const Vector&)>;
/// x -> R^{n x n}
using JacobianField = std::function<Matrix(const Vector&)>;
/// x -> R
using ScalarField = std::function<double(const Vector&)>;

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// A point left the domain where the model is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Frame matrix is (numerically) singular.
class RankDeficiencyError : public std::runtime_error {
public:
    RankDeficiencyError(const std::string& what, Vector point, double condition)
        : std::runtime_error(what), point_(std::move(point)), condition_(condition) {}

    const Vector& point() const { return point_; }
    double condition() const { return condition_; }

private:
    Vector point_;
    double condition_;
};

/// Step underflow, non-finite values, failed root brackets.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A hypothesis on the cost function (sandwich inequalities) does not hold.
class HypothesisError : public std::runtime_error {
public:
    HypothesisError(const std::string& what, Vector witness)
        : std::runtime_error(what), witness_(std::move(witness)) {}
    const Vector& witness() const { return witness_; }

private:
    Vector witness_;
};

/// Configuration rejected; carries every violated rule.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(std::vector<std::string> errors)
        : std::invalid_argument(join(errors)), errors_(std::move(errors)) {}
    const std::vector<std::string>& errors() const { return errors_; }

private:
    static std::string join(const std::vector<std::string>& errors) {
        std::string out;
        for (const auto& e : errors) {
            if (!out.empty()) out += "; ";
            out += e;
        }
        return out;
    }
    std::vector<std::string> errors_;
};

// ---------------------------------------------------------------------------
// Formatting helpers
// ---------------------------------------------------------------------------

inline std::string format_vector(const Vector& v) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v[i];
    }
    os << ')';
    return os.str();
}

// ---------------------------------------------------------------------------
// Axis-aligned boxes
// ---------------------------------------------------------------------------

/// Axis-aligned box; bounds may be +-infinity.
struct Box {
    Vector lower;
    Vector upper;

    static Box unbounded(int n) {
        const double inf = std::numeric_limits<double>::infinity();
        return {Vector::Constant(n, -inf), Vector::Constant(n, inf)};
    }

    static Box cube(int n, double lo, double hi) {
        return {Vector::Constant(n, lo), Vector::Constant(n, hi)};
    }

    int dim() const { return static_cast<int>(lower.size()); }

    bool contains(const Vector& x) const {
        if (x.size() != lower.size()) return false;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
        }
        return true;
    }

    bool bounded() const { return lower.allFinite() && upper.allFinite(); }

    Vector center() const {
        Vector c(lower.size());
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            if (std::isfinite(lower[i]) && std::isfinite(upper[i]))
                c[i] = 0.5 * (lower[i] + upper[i]);
            else if (std::isfinite(lower[i]))
                c[i] = lower[i];
            else if (std::isfinite(upper[i]))
                c[i] = upper[i];
            else
                c[i] = 0.0;
        }
        return c;
    }

    /// Euclidean distance from an interior point to the boundary.
    double distance_to_boundary(const Vector& x) const {
        double d = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            d = std::min({d, x[i] - lower[i], upper[i] - x[i]});
        }
        return std::max(d, 0.0);
    }

    bool contains_box(const Box& other) const {
        return (other.lower.array() >= lower.array()).all() &&
               (other.upper.array() <= upper.array()).all();
    }
};

/// Tensor grid with `per_axis` points per coordinate, endpoints included.
inline std::vector<Vector> grid_points(const Box& box, int per_axis) {
    if (!box.bounded()) throw DomainError("grid_points: box must be bounded");
    if (per_axis < 1) throw std::invalid_argument("grid_points: per_axis must be >= 1");
    const int n = box.dim();
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_axis);
    std::vector<Vector> pts;
    pts.reserve(total);
    std::vector<int> idx(n, 0);
    for (std::size_t k = 0; k < total; ++k) {
        Vector p(n);
        for (int i = 0; i < n; ++i) {
            const double s = per_axis == 1 ? 0.5 : static_cast<double>(idx[i]) / (per_axis - 1);
            p[i] = box.lower[i] + s * (box.upper[i] - box.lower[i]);
        }
        pts.push_back(std::move(p));
        for (int i = 0; i < n; ++i) {
            if (++idx[i] < per_axis) break;
            idx[i] = 0;
        }
    }
    return pts;
}

/// Uniform random cloud in a bounded box; deterministic for a given seed.
inline std::vector<Vector> sample_points(const Box& box, std::size_t count, std::uint64_t seed) {
    if (!box.bounded()) throw DomainError("sample_points: box must be bounded");
    std::mt19937_64 rng(seed);
    std::vector<Vector> pts;
    pts.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Vector p(box.dim());
        for (int i = 0; i < box.dim(); ++i) {
            std::uniform_real_distribution<double> dist(box.lower[i], box.upper[i]);
            p[i] = dist(rng);
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

/// Central-difference Jacobian with an explicit step.
inline Matrix central_jacobian(const VectorField& f, const Vector& x, double h) {
    const Eigen::Index n = x.size();
    Vector xp = x;
    Vector xm = x;
    Matrix jac;
    for (Eigen::Index k = 0; k < n; ++k) {
        xp[k] = x[k] + h;
        xm[k] = x[k] - h;
        if (xp[k] == x[k] || xm[k] == x[k]) {
            throw NumericalError("finite-difference step underflow at coordinate " +
                                 std::to_string(k) + " of " + format_vector(x));
        }
        const Vector col = (f(xp) - f(xm)) / (xp[k] - xm[k]);
        if (k == 0) jac.resize(col.size(), n);
        jac.col(k) = col;
        xp[k] = x[k];
        xm[k] = x[k];
    }
    return jac;
}

/// Five-point central derivative of a scalar function.
inline double five_point_derivative(const std::function<double(double)>& f, double z, double h) {
    return (-f(z + 2 * h) + 8 * f(z + h) - 8 * f(z - h) + f(z - 2 * h)) / (12 * h);
}

/// Gradient by central differences with step 1e-5 (1 + |x|).
inline Vector central_gradient(const ScalarField& f, const Vector& x) {
    const double h = 1e-5 * (1.0 + x.norm());
    Vector g(x.size());
    Vector xp = x;
    Vector xm = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        xp[k] = x[k] + h;
        xm[k] = x[k] - h;
        g[k] = (f(xp) - f(xm)) / (xp[k] - xm[k]);
        xp[k] = x[k];
        xm[k] = x[k];
    }
    return g;
}

/// Hessian by second central differences, step 1e-4 (1 + |x|).
inline Matrix central_hessian(const ScalarField& f, const Vector& x) {
    const Eigen::Index n = x.size();
    const double h = 1e-4 * (1.0 + x.norm());
    Matrix hess(n, n);
    const double f0 = f(x);
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector xp = x;
        Vector xm = x;
        xp[i] += h;
        xm[i] -= h;
        hess(i, i) = (f(xp) - 2 * f0 + f(xm)) / (h * h);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            Vector pp = x, pm = x, mp = x, mm = x;
            pp[i] += h; pp[j] += h;
            pm[i] += h; pm[j] -= h;
            mp[i] -= h; mp[j] += h;
            mm[i] -= h; mm[j] -= h;
            hess(i, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
            hess(j, i) = hess(i, j);
        }
    }
    return hess;
}

/// Spectral norm (largest singular value).
inline double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("loglog_slope: need >= 2 matching points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace nhes

#endif  // NHES_CORE_HPP
