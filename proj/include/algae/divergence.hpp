#pragma once

#include <functional>
#include <string>

#include "algae/mdp.hpp"

namespace algae {

/// A convex function f, its derivative, its Fenchel conjugate f*, and the
/// conjugate's derivative, kept together as one coherent object. f and f*
/// have domain all of R and f' and f*' are mutual inverses; pairs are
/// cross-checked on a grid at construction in debug builds and explicitly
/// in tests via check_consistency().
class DivergencePair {
public:
    using Fn = std::function<double(double)>;

    DivergencePair(std::string name, Fn f, Fn f_prime, Fn f_star, Fn f_star_prime);

    double f(double x) const { return f_(x); }
    double f_prime(double x) const { return f_prime_(x); }
    double f_star(double y) const { return f_star_(y); }
    double f_star_prime(double y) const { return f_star_prime_(y); }

    const std::string& name() const { return name_; }

    /// Verifies, on the grid {lo, lo+step, ..., hi}: conjugacy of (f, f*) by
    /// independent maximization, f*'(f'(x)) = x, and discrete convexity of f.
    /// Throws ValidationError on any violation beyond tol.
    void check_consistency(double lo = -5.0, double hi = 5.0, double step = 0.1,
                           double tol = 1e-8) const;

private:
    std::string name_;
    Fn f_;
    Fn f_prime_;
    Fn f_star_;
    Fn f_star_prime_;
};

/// f(x) = x^2/2, self-conjugate.
DivergencePair quadratic();

/// Conjugate pair f*(y) = |y|^p / p, f(x) = |x|^q / q with 1/p + 1/q = 1.
/// Requires p > 1.
DivergencePair polynomial(double p);

/// Parses "quadratic" or "polynomial:<p>".
DivergencePair divergence_from_name(const std::string& spec);

/// sup_y (x*y - f_star(y)) by dense scan over [lo, hi] with golden-section
/// refinement. Independent of the stored f; used as the conjugacy oracle.
double conjugate_by_maximization(const std::function<double(double)>& f_star, double x,
                                 double lo, double hi);

/// D_f(d_pi || d_D) = sum_{d_D > 0} d_D(s,a) f(d_pi(s,a) / d_D(s,a)).
/// Pairs where both distributions are zero contribute nothing; a pair with
/// d_pi > 0 but d_D = 0 raises CoverageError.
double f_divergence(const Occupancy& d_pi, const Occupancy& d_D, const DivergencePair& div);

/// Variational lower bound E_{d_pi}[x] - E_{d_D}[f*(x)]. Never exceeds
/// f_divergence, with equality at x(s,a) = f'(d_pi/d_D).
double variational_gap(const Occupancy& d_pi, const Occupancy& d_D, const ValueTable& x,
                       const DivergencePair& div);

} // namespace algae
