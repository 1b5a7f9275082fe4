#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "qdev/errors.hpp"

namespace qdev::lsq {

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct IterationRecord {
    int iteration = 0;
    double cost = 0.0;
    double lambda = 0.0;
    Eigen::VectorXd params;
};

/// Damped least-squares problem. Bounds and finite-difference steps are
/// optional; empty vectors mean "unbounded" / "default step policy".
struct FitProblem {
    ResidualFn residual;
    Eigen::VectorXd initial;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    Eigen::VectorXd fd_steps;
    int max_iterations = 200;
    double gradient_tol = 1e-10;
    double step_tol = 1e-10;
    double cost_tol = 1e-12;
    std::function<void(const IterationRecord&)> observer;
};

enum class StopReason {
    GradientTol,
    StepTol,
    CostTol,
    MaxIterations,
    Stalled, // damping hit its ceiling without an acceptable step
};

const char* stop_reason_name(StopReason reason);

struct FitResult {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;        // valid only when covariance_valid
    bool covariance_valid = false;
    Eigen::VectorXd uncertainties;     // 1σ = sqrt(diag(covariance)), NaN if unavailable
    double cost = 0.0;                 // final sum of squared residuals
    int iterations = 0;
    bool converged = false;
    StopReason reason = StopReason::MaxIterations;
    std::vector<double> cost_trace;    // accepted costs, starting at the initial cost
};

/// Default central-difference step for a parameter value.
double fd_default_step(double param);

/// Central-difference Jacobian, shape (n_residuals x n_params). Steps may be
/// supplied per parameter; otherwise h_i = max(1e-8, 1e-6*|p_i|).
Eigen::MatrixXd jacobian_fd(const ResidualFn& residual,
                            const Eigen::VectorXd& params,
                            const Eigen::VectorXd& steps = Eigen::VectorXd());

/// Levenberg-Marquardt with multiplicative damping (x10 on reject, /10 on
/// accept, lambda0 = 1e-3) and bound handling by step projection.
FitResult fit(const FitProblem& problem);

} // namespace qdev::lsq
