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
#ifndef NHES_SYSTEM_MODEL_HPP
#define NHES_SYSTEM_MODEL_HPP

#include "nhes/core.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <span>

namespace nhes {

/**
 * @brief Driftless control-affine plant  x' = sum_i u_i f_i(x).
 *
 * Holds the m control vector fields, optional analytic Jacobians and the
 * box-shaped domain D. When Jacobians are absent they are replaced by
 * central differences with step max(1e-6, 1e-8 (1 + |x|)).
 */
class ControlSystem {
public:
    ControlSystem(std::string name, int state_dim, std::vector<VectorField> fields, Box domain,
                  std::vector<JacobianField> jacobians = {})
        : name_(std::move(name)),
          n_(state_dim),
          fields_(std::move(fields)),
          jacobians_(std::move(jacobians)),
          domain_(std::move(domain)) {
        std::vector<std::string> errors;
        const int m = input_dim();
        if (n_ < 1) errors.push_back("state dimension must be >= 1");
        if (m < 1) errors.push_back("at least one control field is required");
        if (m > n_) errors.push_back("input dimension m must not exceed state dimension n");
        if (!jacobians_.empty() && static_cast<int>(jacobians_.size()) != m)
            errors.push_back("jacobians must be absent or one per field");
        if (domain_.dim() != n_) errors.push_back("domain dimension must equal n");
        if (!errors.empty()) throw ValidationError(errors);
    }

    const std::string& name() const { return name_; }
    int state_dim() const { return n_; }
    int input_dim() const { return static_cast<int>(fields_.size()); }
    bool is_nonholonomic() const { return input_dim() < n_; }
    bool has_analytic_jacobians() const { return !jacobians_.empty(); }
    const Box& domain() const { return domain_; }

    void require_in_domain(const Vector& x) const {
        if (!domain_.contains(x))
            throw DomainError("point " + format_vector(x) + " outside domain of system '" + name_ + "'");
    }

    Vector field(int i, const Vector& x) const { return fields_.at(static_cast<std::size_t>(i))(x); }

    const VectorField& field_function(int i) const { return fields_.at(static_cast<std::size_t>(i)); }

    /// Jacobian of f_i, analytic when available.
    Matrix jacobian(int i, const Vector& x) const {
        if (has_analytic_jacobians()) return jacobians_.at(static_cast<std::size_t>(i))(x);
        const double h = std::max(1e-6, 1e-8 * (1.0 + x.norm()));
        return central_jacobian(fields_.at(static_cast<std::size_t>(i)), x, h);
    }

    /// Same fields on a different domain.
    ControlSystem with_domain(Box domain) const {
        return ControlSystem(name_, n_, fields_, std::move(domain), jacobians_);
    }

    /// sum_i u_i f_i(x)
    Vector velocity(const Vector& x, const Vector& u) const {
        Vector dx = Vector::Zero(n_);
        for (int i = 0; i < input_dim(); ++i) {
            if (u[i] != 0.0) dx += u[i] * fields_[static_cast<std::size_t>(i)](x);
        }
        return dx;
    }

private:
    std::string name_;
    int n_;
    std::vector<VectorField> fields_;
    std::vector<JacobianField> jacobians_;
    Box domain_;
};

/// Lie bracket [f_i, f_j](x) = (df_j/dx) f_i - (df_i/dx) f_j.
inline Vector lie_bracket(const ControlSystem& sys, int i, int j, const Vector& x) {
    sys.require_in_domain(x);
    const int m = sys.input_dim();
    if (i < 0 || i >= m || j < 0 || j >= m)
        throw std::out_of_range("lie_bracket: field index out of range");
    if (i == j) return Vector::Zero(sys.state_dim());
    return sys.jacobian(j, x) * sys.field(i, x) - sys.jacobian(i, x) * sys.field(j, x);
}

/// L_{f_along} f_of (x) = (df_of/dx) f_along.
inline Vector lie_derivative(const ControlSystem& sys, int along, int of, const Vector& x) {
    return sys.jacobian(of, x) * sys.field(along, x);
}

/**
 * @brief Index sets S1, S2 and bracket frequencies kappa.
 *
 * Indices are zero-based. Frame columns are ordered S1 first, then S2, both
 * in declaration order; kappa[k] belongs to s2[k].
 */
struct BracketSelection {
    std::vector<int> s1;
    std::vector<std::pair<int, int>> s2;
    std::vector<int> kappa;

    /// kappa defaults to 1..|S2|.
    static BracketSelection with_default_kappa(std::vector<int> s1, std::vector<std::pair<int, int>> s2) {
        BracketSelection sel{std::move(s1), std::move(s2), {}};
        for (std::size_t k = 0; k < sel.s2.size(); ++k) sel.kappa.push_back(static_cast<int>(k) + 1);
        return sel;
    }

    int size() const { return static_cast<int>(s1.size() + s2.size()); }

    int kappa_max() const {
        int k = 0;
        for (int v : kappa) k = std::max(k, v);
        return k;
    }

    std::vector<std::string> problems(int n, int m) const {
        std::vector<std::string> errors;
        if (size() != n)
            errors.push_back("|S1| + |S2| must equal n = " + std::to_string(n) + " (got " +
                             std::to_string(size()) + ")");
        for (int i : s1) {
            if (i < 0 || i >= m) errors.push_back("S1 index " + std::to_string(i + 1) + " out of range");
        }
        for (const auto& [a, b] : s2) {
            if (a < 0 || a >= m || b < 0 || b >= m)
                errors.push_back("S2 pair (" + std::to_string(a + 1) + "," + std::to_string(b + 1) +
                                 ") out of range");
        }
        if (kappa.size() != s2.size()) errors.push_back("kappa must have one entry per S2 pair");
        for (std::size_t p = 0; p < kappa.size(); ++p) {
            if (kappa[p] < 1) errors.push_back("kappa values must be naturals >= 1");
            for (std::size_t q = p + 1; q < kappa.size(); ++q) {
                if (kappa[p] == kappa[q]) errors.push_back("kappa values must be pairwise distinct");
            }
        }
        return errors;
    }

    void validate(int n, int m) const {
        auto errors = problems(n, m);
        if (!errors.empty()) throw ValidationError(errors);
    }
};

/// Condition number sigma_max / sigma_min (infinite when singular).
inline double condition_number(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

/// Unchecked frame assembly: columns f_{S1} then [f_a, f_b]_{S2}.
inline Matrix assemble_frame(const ControlSystem& sys, const BracketSelection& sel, const Vector& x) {
    const int n = sys.state_dim();
    Matrix frame(n, sel.size());
    int col = 0;
    for (int i : sel.s1) frame.col(col++) = sys.field(i, x);
    for (const auto& [a, b] : sel.s2) frame.col(col++) = lie_bracket(sys, a, b, x);
    return frame;
}

inline constexpr double kDefaultCondTol = 1e8;

/// Frame matrix F(x); throws RankDeficiencyError above `cond_tol`.
inline Matrix frame_matrix(const ControlSystem& sys, const BracketSelection& sel, const Vector& x,
                           double cond_tol = kDefaultCondTol) {
    sys.require_in_domain(x);
    Matrix frame = assemble_frame(sys, sel, x);
    const double cond = condition_number(frame);
    if (!(cond <= cond_tol)) {
        std::ostringstream os;
        os << "frame matrix rank-deficient at x = " << format_vector(x) << " (condition number " << cond
           << ")";
        throw RankDeficiencyError(os.str(), x, cond);
    }
    return frame;
}

/**
 * @brief F(x) bound to a system and a bracket selection.
 *
 * `alpha` is the uniform bound on |F^{-1}(x)| over the working set when it
 * has been estimated.
 */
class FrameMatrix {
public:
    FrameMatrix(ControlSystem sys, BracketSelection sel, double cond_tol = kDefaultCondTol)
        : sys_(std::move(sys)), sel_(std::move(sel)), cond_tol_(cond_tol) {
        sel_.validate(sys_.state_dim(), sys_.input_dim());
    }

    const ControlSystem& system() const { return sys_; }
    const BracketSelection& selection() const { return sel_; }
    double cond_tol() const { return cond_tol_; }

    Matrix at(const Vector& x) const { return frame_matrix(sys_, sel_, x, cond_tol_); }

    /// F(x)^{-1} rhs
    Vector solve(const Vector& x, const Vector& rhs) const { return at(x).partialPivLu().solve(rhs); }

    Matrix inverse(const Vector& x) const { return at(x).inverse(); }

    std::optional<double> alpha;

private:
    ControlSystem sys_;
    BracketSelection sel_;
    double cond_tol_;
};

struct RankReport {
    bool ok = true;
    double worst_condition = 0.0;
    Vector worst_point;
    std::vector<Vector> witnesses;
};

/// Evaluates the bracket-generating rank condition on a sample set.
inline RankReport check_rank_condition(const ControlSystem& sys, const BracketSelection& sel,
                                       std::span<const Vector> grid, double cond_tol = kDefaultCondTol) {
    if (grid.empty()) throw std::invalid_argument("check_rank_condition: grid must be nonempty");
    sel.validate(sys.state_dim(), sys.input_dim());
    RankReport report;
    for (const Vector& x : grid) {
        sys.require_in_domain(x);
        const double cond = condition_number(assemble_frame(sys, sel, x));
        if (!(cond <= cond_tol)) {
            report.ok = false;
            report.witnesses.push_back(x);
        }
        if (report.worst_point.size() == 0 || !(cond <= report.worst_condition)) {
            report.worst_condition = cond;
            report.worst_point = x;
        }
    }
    return report;
}

inline constexpr double kAlphaSafety = 1.1;

/// Points used by estimate_alpha: the centre for one sample, else a tensor grid
/// with at least `samples` points (corners included).
inline std::vector<Vector> alpha_sample_points(const Box& compact, int samples) {
    if (samples < 1) throw std::invalid_argument("estimate_alpha: samples must be >= 1");
    if (!compact.bounded()) throw DomainError("estimate_alpha: working set must be bounded");
    if (samples == 1) return {compact.center()};
    const int n = compact.dim();
    int per_axis = 2;
    while (std::pow(static_cast<double>(per_axis), n) < samples) ++per_axis;
    return grid_points(compact, per_axis);
}

/// alpha = 1.1 * max |F^{-1}(x)|_2 over sampled x in the compact set.
inline double estimate_alpha(const ControlSystem& sys, const BracketSelection& sel, const Box& compact,
                             int samples, double cond_tol = kDefaultCondTol) {
    sel.validate(sys.state_dim(), sys.input_dim());
    double worst = 0.0;
    for (const Vector& x : alpha_sample_points(compact, samples)) {
        const Matrix frame = frame_matrix(sys, sel, x, cond_tol);
        Eigen::JacobiSVD<Matrix> svd(frame);
        const auto& s = svd.singularValues();
        worst = std::max(worst, 1.0 / s(s.size() - 1));
    }
    return kAlphaSafety * worst;
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// Brockett integrator: f1 = (1, 0, x2), f2 = (0, 1, -x1) on R^3.
inline ControlSystem brockett_system() {
    std::vector<VectorField> fields{
        [](const Vector& x) { return Vector{{1.0, 0.0, x[1]}}; },
        [](const Vector& x) { return Vector{{0.0, 1.0, -x[0]}}; },
    };
    std::vector<JacobianField> jacobians{
        [](const Vector&) {
            Matrix j = Matrix::Zero(3, 3);
            j(2, 1) = 1.0;
            return j;
        },
        [](const Vector&) {
            Matrix j = Matrix::Zero(3, 3);
            j(2, 0) = -1.0;
            return j;
        },
    };
    return ControlSystem("brockett", 3, std::move(fields), Box::unbounded(3), std::move(jacobians));
}

/// S1 = {1, 2}, S2 = {(1, 2)} with the given kappa_12.
inline BracketSelection brockett_selection(int kappa12 = 1) {
    return BracketSelection{{0, 1}, {{0, 1}}, {kappa12}};
}

/// Named system factories; "brockett" is built in.
class SystemRegistry {
public:
    using Factory = std::function<ControlSystem()>;

    static SystemRegistry& instance() {
        static SystemRegistry registry;
        return registry;
    }

    void add(const std::string& name, Factory factory) {
        std::lock_guard lock(mutex_);
        factories_[name] = std::move(factory);
    }

    bool contains(const std::string& name) const {
        std::lock_guard lock(mutex_);
        return factories_.count(name) != 0;
    }

    ControlSystem make(const std::string& name) const {
        Factory factory;
        {
            std::lock_guard lock(mutex_);
            auto it = factories_.find(name);
            if (it == factories_.end()) throw std::out_of_range("unknown system preset '" + name + "'");
            factory = it->second;
        }
        return factory();
    }

    std::vector<std::string> names() const {
        std::lock_guard lock(mutex_);
        std::vector<std::string> out;
        for (const auto& [k, v] : factories_) out.push_back(k);
        return out;
    }

private:
    SystemRegistry() { factories_["brockett"] = brockett_system; }

    mutable std::mutex mutex_;
    std::map<std::string, Factory> factories_;
};

}  // namespace nhes

#endif  // NHES_SYSTEM_MODEL_HPP
