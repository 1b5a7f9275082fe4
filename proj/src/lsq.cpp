#include "qdev/lsq.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace qdev::lsq {

namespace {

constexpr double kLambda0 = 1e-3;
constexpr double kLambdaMin = 1e-12;
constexpr double kLambdaMax = 1e16;

Eigen::VectorXd project(const Eigen::VectorXd& p,
                        const Eigen::VectorXd& lower,
                        const Eigen::VectorXd& upper) {
    Eigen::VectorXd out = p;
    if (lower.size() == p.size()) out = out.cwiseMax(lower);
    if (upper.size() == p.size()) out = out.cwiseMin(upper);
    return out;
}

double relative_step(const Eigen::VectorXd& p_new, const Eigen::VectorXd& p_old) {
    double denom = std::max(p_old.norm(), 1e-300);
    return (p_new - p_old).norm() / denom;
}

} // namespace

const char* stop_reason_name(StopReason reason) {
    switch (reason) {
    case StopReason::GradientTol: return "gradient-tolerance";
    case StopReason::StepTol: return "step-tolerance";
    case StopReason::CostTol: return "cost-tolerance";
    case StopReason::MaxIterations: return "max-iterations";
    case StopReason::Stalled: return "stalled";
    }
    return "unknown";
}

double fd_default_step(double param) {
    return std::max(1e-8, 1e-6 * std::abs(param));
}

Eigen::MatrixXd jacobian_fd(const ResidualFn& residual,
                            const Eigen::VectorXd& params,
                            const Eigen::VectorXd& steps) {
    const Eigen::Index np = params.size();
    Eigen::MatrixXd jac;
    for (Eigen::Index j = 0; j < np; ++j) {
        const double h = (steps.size() == np) ? steps[j] : fd_default_step(params[j]);
        Eigen::VectorXd plus = params;
        Eigen::VectorXd minus = params;
        plus[j] += h;
        minus[j] -= h;
        const Eigen::VectorXd rp = residual(plus);
        const Eigen::VectorXd rm = residual(minus);
        if (jac.size() == 0) jac.resize(rp.size(), np);
        Eigen::VectorXd col = (rp - rm) / (2.0 * h);
        if (!col.allFinite()) {
            throw Error(ErrorCode::FitFailure,
                        "non-finite Jacobian entries for parameter " + std::to_string(j));
        }
        jac.col(j) = col;
    }
    return jac;
}

FitResult fit(const FitProblem& problem) {
    const Eigen::Index np = problem.initial.size();
    if (np == 0 || !problem.residual) {
        throw Error(ErrorCode::InvalidInput, "fit problem needs parameters and a residual");
    }
    const bool has_lower = problem.lower.size() > 0;
    const bool has_upper = problem.upper.size() > 0;
    if ((has_lower && problem.lower.size() != np) || (has_upper && problem.upper.size() != np)) {
        throw Error(ErrorCode::InvalidInput, "bound vectors must match parameter dimension");
    }
    for (Eigen::Index i = 0; i < np; ++i) {
        if ((has_lower && problem.initial[i] < problem.lower[i]) ||
            (has_upper && problem.initial[i] > problem.upper[i])) {
            throw Error(ErrorCode::InvalidInput,
                        "initial parameter " + std::to_string(i) + " violates bounds");
        }
    }

    Eigen::VectorXd p = problem.initial;
    Eigen::VectorXd r = problem.residual(p);
    if (!r.allFinite()) {
        throw Error(ErrorCode::BadInitialGuess, "residual non-finite at initial parameters");
    }
    if (r.size() < np) {
        throw Error(ErrorCode::InvalidInput, "residual dimension below parameter dimension");
    }

    FitResult result;
    double cost = r.squaredNorm();
    result.cost_trace.push_back(cost);

    double lambda = kLambda0;
    bool converged = false;
    StopReason reason = StopReason::MaxIterations;
    int iter = 0;

    Eigen::MatrixXd jac;
    while (iter < problem.max_iterations && !converged) {
        ++iter;
        jac = jacobian_fd(problem.residual, p, problem.fd_steps);
        const Eigen::VectorXd grad = jac.transpose() * r;
        if (grad.cwiseAbs().maxCoeff() < problem.gradient_tol) {
            converged = true;
            reason = StopReason::GradientTol;
            break;
        }
        const Eigen::MatrixXd normal = jac.transpose() * jac;
        const Eigen::VectorXd damping = normal.diagonal().cwiseMax(1e-30);

        bool accepted = false;
        while (lambda <= kLambdaMax) {
            Eigen::MatrixXd damped = normal;
            damped.diagonal() += lambda * damping;
            const Eigen::VectorXd delta = damped.ldlt().solve(-grad);
            if (!delta.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd p_new = project(p + delta, problem.lower, problem.upper);
            const Eigen::VectorXd r_new = problem.residual(p_new);
            const double cost_new = r_new.allFinite()
                                        ? r_new.squaredNorm()
                                        : std::numeric_limits<double>::infinity();
            if (cost_new <= cost) {
                const double step_rel = relative_step(p_new, p);
                const double cost_drop_rel = (cost - cost_new) / std::max(cost, 1e-300);
                p = p_new;
                r = r_new;
                cost = cost_new;
                lambda = std::max(lambda / 10.0, kLambdaMin);
                accepted = true;
                result.cost_trace.push_back(cost);
                if (problem.observer) {
                    problem.observer(IterationRecord{iter, cost, lambda, p});
                }
                if (step_rel < problem.step_tol) {
                    converged = true;
                    reason = StopReason::StepTol;
                } else if (cost_drop_rel < problem.cost_tol) {
                    converged = true;
                    reason = StopReason::CostTol;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            reason = StopReason::Stalled;
            break;
        }
    }

    result.params = p;
    result.cost = cost;
    result.iterations = iter;
    result.converged = converged;
    result.reason = converged ? reason
                              : (reason == StopReason::Stalled ? StopReason::Stalled
                                                               : StopReason::MaxIterations);

    // Asymptotic covariance (J^T J)^-1 * s^2 with s^2 = SSR/(n-p); a singular
    // normal matrix flags the covariance unavailable instead of failing.
    result.uncertainties =
        Eigen::VectorXd::Constant(np, std::numeric_limits<double>::quiet_NaN());
    const Eigen::Index n_res = r.size();
    if (n_res > np) {
        jac = jacobian_fd(problem.residual, p, problem.fd_steps);
        const Eigen::MatrixXd normal = jac.transpose() * jac;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
        if (lu.isInvertible()) {
            const double s2 = cost / static_cast<double>(n_res - np);
            Eigen::MatrixXd cov = lu.inverse() * s2;
            result.covariance = 0.5 * (cov + cov.transpose());
            result.covariance_valid = true;
            result.uncertainties = result.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
        }
    }
    return result;
}

} // namespace qdev::lsq
