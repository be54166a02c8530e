#include "molspec/fitting/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "molspec/core/errors.hpp"

namespace molspec::fitting {

namespace {

struct Vertex {
    std::vector<double> x;
    double f;
};

class PenalizedObjective {
public:
    PenalizedObjective(const Objective& f, std::span<const Bounds> bounds, int budget) : f_(f), bounds_(bounds), budget_(budget) {}

    double operator()(const std::vector<double>& x) {
        ++evaluations_;
        std::vector<double> inside(x.size());
        double violation = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            inside[i] = bounds_[i].clamp(x[i]);
            const double scale = std::max(std::abs(inside[i]), 1e-3);
            violation += std::pow((x[i] - inside[i]) / scale, 2);
        }
        const double value = f_(inside);
        return violation > 0.0 ? value + (1.0 + std::abs(value)) * 1e3 * violation : value;
    }

    std::vector<double> project(std::vector<double> x) const {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = bounds_[i].clamp(x[i]);
        return x;
    }

    int evaluations() const { return evaluations_; }
    bool exhausted() const { return evaluations_ >= budget_; }

private:
    const Objective& f_;
    std::span<const Bounds> bounds_;
    int budget_;
    int evaluations_ = 0;
};

std::vector<Vertex> initial_simplex(PenalizedObjective& f, const std::vector<double>& x0, std::span<const Bounds> bounds,
                                    double rel_step, std::mt19937_64* rng) {
    const std::size_t n = x0.size();
    std::vector<Vertex> s;
    s.push_back({x0, f(x0)});
    std::uniform_real_distribution<double> jitter(0.5, 1.5);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x = x0;
        double step = rel_step * (x0[i] != 0.0 ? std::abs(x0[i]) : 1.0);
        if (rng) step *= jitter(*rng) * (((*rng)() & 1U) ? 1.0 : -1.0);
        if (!bounds[i].contains(x0[i] + step)) step = -step;
        x[i] += step;
        s.push_back({x, f(x)});
    }
    return s;
}

bool simplex_converged(const std::vector<Vertex>& s, const SimplexOptions& o) {
    const double fbest = s.front().f, fworst = s.back().f;
    const bool flat = (fworst - fbest) <= o.f_tolerance * std::abs(fbest);
    double diameter = 0.0, size = 0.0;
    for (std::size_t i = 0; i < s.front().x.size(); ++i) {
        size = std::max(size, std::abs(s.front().x[i]));
        for (std::size_t v = 1; v < s.size(); ++v) diameter = std::max(diameter, std::abs(s[v].x[i] - s.front().x[i]));
    }
    return flat || diameter <= o.x_tolerance * std::max(size, 1.0);
}

// One Nelder–Mead descent; returns true if the simplex collapsed within the budget.
bool descend(PenalizedObjective& f, std::vector<Vertex>& s, const SimplexOptions& o) {
    const std::size_t n = s.front().x.size();
    const double dn = static_cast<double>(n);
    const double alpha = 1.0, beta = 1.0 + 2.0 / dn, gamma = 0.75 - 0.5 / dn, delta = 1.0 - 1.0 / dn;
    auto order = [&] { std::stable_sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; }); };
    auto along = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = c[i] + t * (c[i] - w[i]);
        return x;
    };
    order();
    while (!f.exhausted()) {
        if (simplex_converged(s, o)) return true;
        std::vector<double> c(n, 0.0);
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t i = 0; i < n; ++i) c[i] += s[v].x[i] / dn;
        const Vertex& worst = s.back();

        auto xr = along(c, worst.x, alpha);
        const double fr = f(xr);
        if (fr < s.front().f) {
            auto xe = along(c, worst.x, alpha * beta);
            const double fe = f(xe);
            s.back() = fe < fr ? Vertex{std::move(xe), fe} : Vertex{std::move(xr), fr};
        } else if (fr < s[n - 1].f) {
            s.back() = {std::move(xr), fr};
        } else {
            const bool outside = fr < worst.f;
            auto xc = along(c, worst.x, outside ? alpha * gamma : -gamma);
            const double fc = f(xc);
            if (fc < (outside ? fr : worst.f)) {
                s.back() = {std::move(xc), fc};
            } else {
                for (std::size_t v = 1; v <= n; ++v) {
                    for (std::size_t i = 0; i < n; ++i) s[v].x[i] = s[0].x[i] + delta * (s[v].x[i] - s[0].x[i]);
                    s[v].f = f(s[v].x);
                }
            }
        }
        order();
    }
    return false;
}

}  // namespace

SimplexResult minimize_simplex(const Objective& f, std::vector<double> x0, std::span<const Bounds> bounds, const SimplexOptions& options) {
    if (bounds.size() != x0.size()) throw InvalidArgument("one bound is required per parameter");
    for (std::size_t i = 0; i < x0.size(); ++i)
        if (!bounds[i].contains(x0[i])) throw InvalidArgument("initial parameter " + std::to_string(i) + " lies outside its bounds");

    PenalizedObjective pf(f, bounds, options.max_evaluations);
    SimplexResult r;
    if (x0.empty()) {
        r.value = pf(x0);
        r.evaluations = pf.evaluations();
        r.converged = true;
        return r;
    }

    std::mt19937_64 rng(options.seed);
    auto simplex = initial_simplex(pf, x0, bounds, options.initial_step, nullptr);
    bool collapsed = descend(pf, simplex, options);
    double best = simplex.front().f;
    std::vector<double> best_x = simplex.front().x;
    while (collapsed && r.restarts < options.max_restarts && !pf.exhausted()) {
        ++r.restarts;
        simplex = initial_simplex(pf, pf.project(best_x), bounds, options.initial_step, &rng);
        collapsed = descend(pf, simplex, options);
        const double improvement = best - simplex.front().f;
        double moved = 0.0, size = 1.0;
        for (std::size_t i = 0; i < best_x.size(); ++i) {
            moved = std::max(moved, std::abs(simplex.front().x[i] - best_x[i]));
            size = std::max(size, std::abs(best_x[i]));
        }
        if (simplex.front().f < best) {
            best = simplex.front().f;
            best_x = simplex.front().x;
        }
        if (collapsed && (improvement <= options.f_tolerance * std::abs(best) || moved <= options.x_tolerance * size)) {
            r.converged = true;
            break;
        }
    }
    if (collapsed && options.max_restarts == 0) r.converged = true;
    r.x = pf.project(best_x);
    r.value = best;
    r.evaluations = pf.evaluations();
    return r;
}

}  // namespace molspec::fitting
