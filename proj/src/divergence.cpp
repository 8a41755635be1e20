#include "algae/divergence.hpp"

#include <cmath>
#include <utility>

#include "algae/errors.hpp"

namespace algae {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void check_same_shape(const Occupancy& a, const Occupancy& b) {
    if (a.num_states() != b.num_states() || a.num_actions() != b.num_actions()) {
        throw ValidationError("occupancy shapes do not match");
    }
}

void check_coverage(const Occupancy& d_pi, const Occupancy& d_D) {
    for (int s = 0; s < d_pi.num_states(); ++s) {
        for (int a = 0; a < d_pi.num_actions(); ++a) {
            if (d_pi(s, a) > 0.0 && d_D(s, a) <= 0.0) throw CoverageError(s, a);
        }
    }
}

} // namespace

DivergencePair::DivergencePair(std::string name, Fn f, Fn f_prime, Fn f_star, Fn f_star_prime)
    : name_(std::move(name)), f_(std::move(f)), f_prime_(std::move(f_prime)),
      f_star_(std::move(f_star)), f_star_prime_(std::move(f_star_prime)) {
#ifndef NDEBUG
    check_consistency();
#endif
}

double conjugate_by_maximization(const std::function<double(double)>& f_star, double x,
                                 double lo, double hi) {
    const auto value = [&](double y) { return x * y - f_star(y); };
    // Dense scan locates the bracket; the objective is concave in y.
    constexpr int kScanPoints = 4096;
    int best = 0;
    double best_value = value(lo);
    for (int i = 1; i <= kScanPoints; ++i) {
        const double y = lo + (hi - lo) * i / kScanPoints;
        const double v = value(y);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    const double step = (hi - lo) / kScanPoints;
    double a = lo + step * (best - 1);
    double b = lo + step * (best + 1);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = value(c), fd = value(d);
    for (int it = 0; it < 200 && b - a > 1e-13 * (1.0 + std::abs(a)); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = value(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = value(d);
        }
    }
    return std::max(fc, fd);
}

void DivergencePair::check_consistency(double lo, double hi, double step, double tol) const {
    const double slope_bound =
        1.0 + 2.0 * std::max(std::abs(f_prime_(lo)), std::abs(f_prime_(hi)));
    double prev = 0.0, prev2 = 0.0;
    int count = 0;
    for (double x = lo; x <= hi + step / 2; x += step) {
        const double sup = conjugate_by_maximization(f_star_, x, -slope_bound, slope_bound);
        if (std::abs(f_(x) - sup) > tol) {
            throw ValidationError("divergence '" + name_ + "' fails conjugacy at x=" +
                                  std::to_string(x) + ": f(x)=" + std::to_string(f_(x)) +
                                  " vs sup=" + std::to_string(sup));
        }
        if (std::abs(f_star_prime_(f_prime_(x)) - x) > tol) {
            throw ValidationError("divergence '" + name_ +
                                  "' derivative pair is not inverse at x=" + std::to_string(x));
        }
        const double fx = f_(x);
        if (count >= 2 && (fx - 2.0 * prev + prev2) < -1e-10) {
            throw ValidationError("divergence '" + name_ + "' is not convex near x=" +
                                  std::to_string(x));
        }
        prev2 = prev;
        prev = fx;
        ++count;
    }
}

DivergencePair quadratic() {
    return DivergencePair(
        "quadratic", [](double x) { return 0.5 * x * x; }, [](double x) { return x; },
        [](double y) { return 0.5 * y * y; }, [](double y) { return y; });
}

DivergencePair polynomial(double p) {
    if (!(p > 1.0)) {
        throw ValidationError("polynomial divergence requires p > 1, got " + std::to_string(p));
    }
    const double q = p / (p - 1.0);
    // |.| extensions keep both functions finite on all of R, which the saddle
    // optimization relies on when residuals go negative.
    return DivergencePair(
        "polynomial:" + std::to_string(p),
        [q](double x) { return std::pow(std::abs(x), q) / q; },
        [q](double x) { return sign(x) * std::pow(std::abs(x), q - 1.0); },
        [p](double y) { return std::pow(std::abs(y), p) / p; },
        [p](double y) { return sign(y) * std::pow(std::abs(y), p - 1.0); });
}

DivergencePair divergence_from_name(const std::string& spec) {
    if (spec == "quadratic") return quadratic();
    const std::string prefix = "polynomial:";
    if (spec.rfind(prefix, 0) == 0) {
        const std::string arg = spec.substr(prefix.size());
        try {
            return polynomial(std::stod(arg));
        } catch (const std::invalid_argument&) {
            throw ValidationError("cannot parse polynomial exponent '" + arg + "'");
        }
    }
    throw ValidationError("unknown divergence '" + spec +
                          "'; expected \"quadratic\" or \"polynomial:<p>\"");
}

double f_divergence(const Occupancy& d_pi, const Occupancy& d_D, const DivergencePair& div) {
    check_same_shape(d_pi, d_D);
    check_coverage(d_pi, d_D);
    double total = 0.0;
    for (int s = 0; s < d_pi.num_states(); ++s) {
        for (int a = 0; a < d_pi.num_actions(); ++a) {
            const double w = d_D(s, a);
            if (w > 0.0) total += w * div.f(d_pi(s, a) / w);
        }
    }
    return total;
}

double variational_gap(const Occupancy& d_pi, const Occupancy& d_D, const ValueTable& x,
                       const DivergencePair& div) {
    check_same_shape(d_pi, d_D);
    check_coverage(d_pi, d_D);
    double expectation_pi = 0.0;
    double expectation_data = 0.0;
    for (int s = 0; s < d_pi.num_states(); ++s) {
        for (int a = 0; a < d_pi.num_actions(); ++a) {
            expectation_pi += d_pi(s, a) * x(s, a);
            expectation_data += d_D(s, a) * div.f_star(x(s, a));
        }
    }
    return expectation_pi - expectation_data;
}

} // namespace algae
