#include "molspec/fitting/fit_result.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "molspec/core/errors.hpp"

namespace molspec::fitting {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

double number_or(const nlohmann::json& j, double fallback) { return j.is_number() ? j.get<double>() : fallback; }

double sum_squares(const std::vector<double>& r) { return std::accumulate(r.begin(), r.end(), 0.0, [](double a, double x) { return a + x * x; }); }

Eigen::VectorXd as_vector(const std::vector<double>& r) { return Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size())); }

class Problem {
public:
    Problem(const ResidualFunction& f, std::span<const ParameterSpec> params, double fd_step)
        : f_(f), params_(params), fd_step_(fd_step) {}

    std::vector<double> residuals(const std::vector<double>& p) const {
        ++evaluations_;
        return f_(p);
    }

    // Central differences, one-sided at an active bound.
    Eigen::MatrixXd jacobian(const std::vector<double>& p, std::size_t m) const {
        Eigen::MatrixXd j(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p.size()));
        for (std::size_t i = 0; i < p.size(); ++i) {
            const auto& b = params_[i].bounds;
            const double h = fd_step_ * std::max(std::abs(p[i]), 1e-3);
            std::vector<double> up = p, down = p;
            up[i] = b.clamp(p[i] + h);
            down[i] = b.clamp(p[i] - h);
            const double span = up[i] - down[i];
            if (!(span > 0.0)) {
                j.col(static_cast<Eigen::Index>(i)).setZero();
                continue;
            }
            j.col(static_cast<Eigen::Index>(i)) = (as_vector(residuals(up)) - as_vector(residuals(down))) / span;
        }
        return j;
    }

    int evaluations() const { return evaluations_; }

private:
    const ResidualFunction& f_;
    std::span<const ParameterSpec> params_;
    double fd_step_;
    mutable int evaluations_ = 0;
};

}  // namespace

const FitParameter& FitResult::parameter(const std::string& name) const {
    for (const auto& p : parameters)
        if (p.name == name) return p;
    throw InvalidArgument("fit result has no parameter '" + name + "'");
}

nlohmann::json to_json(const FitResult& result) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& p : result.parameters)
        params[p.name] = {{"value", p.value},
                          {"uncertainty", finite_or_null(p.uncertainty)},
                          {"lower", finite_or_null(p.bounds.lower)},
                          {"upper", finite_or_null(p.bounds.upper)}};
    return {{"parameters", params},
            {"parameter_order", [&] {
                 std::vector<std::string> names;
                 for (const auto& p : result.parameters) names.push_back(p.name);
                 return names;
             }()},
            {"residual_norm", result.residual_norm},
            {"n_residuals", result.n_residuals},
            {"n_evaluations", result.n_evaluations},
            {"failed_evaluations", result.failed_evaluations},
            {"converged", result.converged}};
}

FitResult fit_result_from_json(const nlohmann::json& j) {
    FitResult r;
    const auto& params = j.at("parameters");
    for (const auto& name : j.at("parameter_order")) {
        const auto& p = params.at(name.get<std::string>());
        r.parameters.push_back({name.get<std::string>(), p.at("value").get<double>(), number_or(p.at("uncertainty"), kNaN),
                                {number_or(p.at("lower"), -std::numeric_limits<double>::infinity()),
                                 number_or(p.at("upper"), std::numeric_limits<double>::infinity())}});
    }
    r.residual_norm = j.at("residual_norm").get<double>();
    r.n_residuals = j.at("n_residuals").get<std::size_t>();
    r.n_evaluations = j.at("n_evaluations").get<int>();
    r.failed_evaluations = j.value("failed_evaluations", 0);
    r.converged = j.at("converged").get<bool>();
    return r;
}

FitResult fit_least_squares(const ResidualFunction& residuals, std::span<const ParameterSpec> params, const LeastSquaresOptions& options) {
    const Problem problem(residuals, params, options.relative_fd_step);
    std::vector<double> x0;
    std::vector<Bounds> bounds;
    for (const auto& p : params) {
        x0.push_back(p.initial);
        bounds.push_back(p.bounds);
    }

    const auto search = minimize_simplex([&](std::span<const double> p) { return sum_squares(problem.residuals({p.begin(), p.end()})); },
                                         x0, bounds, options.simplex);
    std::vector<double> best = search.x.empty() ? x0 : search.x;
    std::vector<double> r = problem.residuals(best);
    double cost = sum_squares(r);
    bool converged = search.converged;

    const std::size_t n = best.size(), m = r.size();
    if (n > 0 && options.polish_iterations > 0) {
        double lambda = 1e-3;
        for (int it = 0; it < options.polish_iterations; ++it) {
            const Eigen::MatrixXd j = problem.jacobian(best, m);
            const Eigen::MatrixXd jtj = j.transpose() * j;
            const Eigen::VectorXd g = j.transpose() * as_vector(r);
            bool improved = false;
            for (int attempt = 0; attempt < 8 && !improved; ++attempt) {
                Eigen::MatrixXd a = jtj;
                a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
                const Eigen::VectorXd step = a.ldlt().solve(-g);
                std::vector<double> trial = best;
                for (std::size_t i = 0; i < n; ++i) trial[i] = bounds[i].clamp(best[i] + step(static_cast<Eigen::Index>(i)));
                auto rt = problem.residuals(trial);
                const double ct = sum_squares(rt);
                if (std::isfinite(ct) && ct < cost) {
                    const double gain = cost - ct;
                    best = std::move(trial);
                    r = std::move(rt);
                    cost = ct;
                    lambda = std::max(lambda * 0.3, 1e-12);
                    improved = true;
                    if (gain <= 1e-15 * ct) it = options.polish_iterations;
                } else {
                    lambda *= 10.0;
                }
            }
            if (!improved) break;
        }
    }

    FitResult out;
    out.residual_norm = std::sqrt(cost);
    out.n_residuals = m;
    out.converged = converged && std::isfinite(cost);
    std::vector<double> sigma(n, kNaN);
    if (n > 0 && m > n) {
        const Eigen::MatrixXd j = problem.jacobian(best, m);
        const Eigen::MatrixXd jtj = j.transpose() * j;
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
        if (lu.isInvertible()) {
            const Eigen::MatrixXd cov = lu.inverse() * (cost / static_cast<double>(m - n));
            for (std::size_t i = 0; i < n; ++i) {
                const double v = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
                sigma[i] = v >= 0.0 ? std::sqrt(v) : kNaN;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) out.parameters.push_back({params[i].name, best[i], sigma[i], bounds[i]});
    out.n_evaluations = problem.evaluations();
    return out;
}

std::vector<ParameterAverage> average_fits(std::span<const FitResult> fits) {
    std::vector<ParameterAverage> out;
    if (fits.empty()) return out;
    for (const auto& p : fits.front().parameters) {
        ParameterAverage a;
        a.name = p.name;
        std::vector<double> values, sigmas;
        for (const auto& f : fits) {
            const auto& q = f.parameter(p.name);
            values.push_back(q.value);
            sigmas.push_back(q.uncertainty);
        }
        a.count = values.size();
        a.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(a.count);
        double ss = 0.0;
        for (double v : values) ss += (v - a.mean) * (v - a.mean);
        a.standard_deviation = a.count > 1 ? std::sqrt(ss / static_cast<double>(a.count - 1)) : 0.0;
        double wsum = 0.0, wx = 0.0;
        bool all = true;
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (!(std::isfinite(sigmas[k]) && sigmas[k] > 0.0)) {
                all = false;
                break;
            }
            const double w = 1.0 / (sigmas[k] * sigmas[k]);
            wsum += w;
            wx += w * values[k];
        }
        a.weighted_mean = all ? wx / wsum : kNaN;
        a.weighted_uncertainty = all ? 1.0 / std::sqrt(wsum) : kNaN;
        out.push_back(a);
    }
    return out;
}

nlohmann::json to_json(std::span<const ParameterAverage> averages) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& a : averages)
        j.push_back({{"name", a.name},
                     {"count", a.count},
                     {"mean", a.mean},
                     {"standard_deviation", a.standard_deviation},
                     {"weighted_mean", finite_or_null(a.weighted_mean)},
                     {"weighted_uncertainty", finite_or_null(a.weighted_uncertainty)}});
    return j;
}

}  // namespace molspec::fitting
