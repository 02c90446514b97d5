#include "abmcalib/box_optimize.hpp"

#include "abmcalib/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace abmcalib {

namespace {

void clamp_to_box(std::vector<double>& x, const std::vector<double>& lo,
                  const std::vector<double>& hi) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = std::clamp(x[i], lo[i], hi[i]);
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double inf_norm(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

struct CurvaturePair {
    std::vector<double> s;
    std::vector<double> y;
    double rho = 0.0;
};

// Two-loop recursion over the stored pairs; returns -H*g.
std::vector<double> lbfgs_direction(const std::vector<double>& g,
                                    const std::deque<CurvaturePair>& pairs) {
    std::vector<double> q = g;
    std::vector<double> alpha(pairs.size());
    for (std::size_t k = pairs.size(); k-- > 0;) {
        alpha[k] = pairs[k].rho * dot(pairs[k].s, q);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * pairs[k].y[i];
    }
    if (!pairs.empty()) {
        const auto& last = pairs.back();
        const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
        for (double& v : q) v *= gamma;
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double beta = pairs[k].rho * dot(pairs[k].y, q);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * pairs[k].s[i];
    }
    for (double& v : q) v = -v;
    return q;
}

BoxMinimizeResult minimize_impl(const BoxObjective& f, const BoxGradient& grad,
                                const std::vector<double>& x0,
                                const std::vector<double>& lo, const std::vector<double>& hi,
                                const BoxMinimizeOptions& opt, bool use_curvature) {
    const std::size_t d = x0.size();
    if (lo.size() != d || hi.size() != d) {
        throw InputError("box minimize: bounds dimension mismatch");
    }

    std::vector<double> x = x0;
    clamp_to_box(x, lo, hi);
    double fx = f(x);
    std::vector<double> g = grad(x);

    BoxMinimizeResult best{x, fx, 0};
    std::deque<CurvaturePair> pairs;

    std::vector<double> masked(d), direction(d), candidate(d), step(d);
    for (std::size_t iter = 1; iter <= opt.max_iterations; ++iter) {
        best.iterations = iter;

        // Coordinates pinned at a bound with the gradient pushing outward
        // are frozen for this step.
        for (std::size_t i = 0; i < d; ++i) {
            const bool pinned = (x[i] <= lo[i] && g[i] >= 0.0) || (x[i] >= hi[i] && g[i] <= 0.0);
            masked[i] = pinned ? 0.0 : g[i];
        }

        // Projected-gradient stationarity check.
        double pg = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            pg = std::max(pg, std::abs(std::clamp(x[i] - g[i], lo[i], hi[i]) - x[i]));
        }
        if (pg < opt.pg_tolerance) break;

        // Steepest-descent steps are normalized to unit infinity norm: the
        // gradient magnitude carries no useful scale on a plateaued surface,
        // while a unit step plus dyadic backtracking probes every scale of
        // the box along the ray.
        auto normalized_descent = [&] {
            std::vector<double> dir = masked;
            const double scale = inf_norm(dir);
            if (scale > 0.0) {
                for (double& v : dir) v = -v / scale;
            }
            return dir;
        };
        if (use_curvature && !pairs.empty()) {
            direction = lbfgs_direction(masked, pairs);
            for (std::size_t i = 0; i < d; ++i) {
                if (masked[i] == 0.0) direction[i] = 0.0;
            }
            if (dot(direction, masked) >= 0.0 || inf_norm(direction) == 0.0) {
                direction = normalized_descent();
            }
        } else {
            direction = normalized_descent();
        }
        if (inf_norm(direction) == 0.0) break;

        // Backtracking line search on the projected path. Armijo acceptance
        // when it triggers, otherwise the lowest strict decrease seen. A
        // divided-difference gradient can carry the wrong sign across the
        // plateaus of a forest surface, so a failed forward ray is retried
        // backward before the step counts as failed.
        const std::vector<double> x_old = x;
        bool accepted = false;
        double best_ls_f = fx;
        std::vector<double> best_ls_x;
        for (const double sign : {1.0, -1.0}) {
            double alpha = sign;
            for (std::size_t bt = 0; bt < opt.max_backtracks; ++bt, alpha *= 0.5) {
                double displacement_dot_g = 0.0;
                bool moved = false;
                for (std::size_t i = 0; i < d; ++i) {
                    candidate[i] = std::clamp(x_old[i] + alpha * direction[i], lo[i], hi[i]);
                    displacement_dot_g += (candidate[i] - x_old[i]) * g[i];
                    moved = moved || candidate[i] != x_old[i];
                }
                if (!moved) continue;
                const double fc = f(candidate);
                if (sign > 0.0 && fc <= fx + opt.armijo_c1 * displacement_dot_g) {
                    x = candidate;
                    fx = fc;
                    accepted = true;
                    break;
                }
                if (fc < best_ls_f) {
                    best_ls_f = fc;
                    best_ls_x = candidate;
                }
            }
            if (accepted || !best_ls_x.empty()) break;
        }
        if (!accepted) {
            if (best_ls_x.empty()) {
                // Dead ray. Drop stale curvature once and retry from the
                // plain projected gradient before giving up on this start.
                if (use_curvature && !pairs.empty()) {
                    pairs.clear();
                    continue;
                }
                break;
            }
            x = std::move(best_ls_x);
            fx = best_ls_f;
            best_ls_x.clear();
        }
        for (std::size_t i = 0; i < d; ++i) step[i] = x[i] - x_old[i];

        std::vector<double> g_new = grad(x);
        if (use_curvature) {
            CurvaturePair pair;
            pair.s.resize(d);
            pair.y.resize(d);
            for (std::size_t i = 0; i < d; ++i) {
                pair.s[i] = step[i];
                pair.y[i] = g_new[i] - g[i];
            }
            const double sy = dot(pair.s, pair.y);
            const double sn = inf_norm(pair.s);
            const double yn = inf_norm(pair.y);
            if (sy > 1e-10 * sn * yn && sy > 0.0) {
                pair.rho = 1.0 / sy;
                pairs.push_back(std::move(pair));
                if (pairs.size() > opt.memory) pairs.pop_front();
            }
        }
        g = std::move(g_new);

        if (fx < best.f) {
            best.f = fx;
            best.x = x;
        }
    }
    return best;
}

} // namespace

BoxMinimizeResult lbfgsb_minimize(const BoxObjective& f, const BoxGradient& grad,
                                  const std::vector<double>& x0,
                                  const std::vector<double>& lower,
                                  const std::vector<double>& upper,
                                  const BoxMinimizeOptions& options) {
    return minimize_impl(f, grad, x0, lower, upper, options, true);
}

BoxMinimizeResult projected_gradient_minimize(const BoxObjective& f, const BoxGradient& grad,
                                              const std::vector<double>& x0,
                                              const std::vector<double>& lower,
                                              const std::vector<double>& upper,
                                              const BoxMinimizeOptions& options) {
    return minimize_impl(f, grad, x0, lower, upper, options, false);
}

} // namespace abmcalib
