#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qdev/lsq.hpp"
#include "qdev/resonator.hpp"
#include "qdev/rng.hpp"
#include "qdev/synth.hpp"

using namespace qdev;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Independent forward-difference scheme used as the Jacobian oracle; shares
// nothing with lsq::jacobian_fd except the residual callback.
MatrixXd jacobian_forward_oracle(const lsq::ResidualFn& residual, const VectorXd& params,
                                 double scale = 5e-7) {
    const VectorXd r0 = residual(params);
    MatrixXd jac(r0.size(), params.size());
    for (Eigen::Index j = 0; j < params.size(); ++j) {
        const double h = std::max(2e-9, scale * std::abs(params[j]));
        VectorXd plus = params;
        plus[j] += h;
        jac.col(j) = (residual(plus) - r0) / h;
    }
    return jac;
}

lsq::ResidualFn line_residual(const std::vector<double>& xs, const std::vector<double>& ys) {
    return [xs, ys](const VectorXd& p) {
        VectorXd r(static_cast<Eigen::Index>(xs.size()));
        for (std::size_t i = 0; i < xs.size(); ++i) {
            r[static_cast<Eigen::Index>(i)] = p[0] * xs[i] + p[1] - ys[i];
        }
        return r;
    };
}

} // namespace

TEST_CASE("exact line through 5 points from a cold start") {
    std::vector<double> xs{-2.0, -1.0, 0.0, 1.0, 2.0};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(2.0 * x + 1.0);

    lsq::FitProblem problem;
    problem.residual = line_residual(xs, ys);
    problem.initial = VectorXd::Zero(2);
    const auto res = lsq::fit(problem);
    CHECK(res.converged);
    CHECK(res.params[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(res.params[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(res.cost <= 1e-18);
}

TEST_CASE("identity residual drives the parameter to zero") {
    lsq::FitProblem problem;
    problem.residual = [](const VectorXd& p) { return p; };
    problem.initial = VectorXd::Constant(1, 3.0);
    const auto res = lsq::fit(problem);
    CHECK(res.converged);
    CHECK(std::abs(res.params[0]) < 1e-9);
    CHECK(res.cost < 1e-18);
}

TEST_CASE("noiseless exponential recovery within 1e-6 relative") {
    // y = 5*exp(-t/10us) sampled at 20 delays, fit in microsecond units.
    std::vector<double> ts, ys;
    for (int i = 0; i < 20; ++i) {
        const double t_us = 2.0 * i;
        ts.push_back(t_us);
        ys.push_back(5.0 * std::exp(-t_us / 10.0));
    }
    lsq::FitProblem problem;
    problem.residual = [&](const VectorXd& p) {
        VectorXd r(20);
        for (int i = 0; i < 20; ++i) r[i] = p[0] * std::exp(-ts[i] / p[1]) - ys[i];
        return r;
    };
    problem.initial = VectorXd(2);
    problem.initial << 1.0, 1.0;
    const auto res = lsq::fit(problem);
    CHECK(res.converged);
    CHECK(res.params[0] == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(res.params[1] == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("jacobian_fd on simple functions") {
    lsq::ResidualFn square = [](const VectorXd& p) {
        VectorXd r(1);
        r[0] = p[0] * p[0];
        return r;
    };
    const MatrixXd j = lsq::jacobian_fd(square, VectorXd::Constant(1, 3.0));
    CHECK(j(0, 0) == doctest::Approx(6.0).epsilon(1e-6));

    lsq::ResidualFn constant = [](const VectorXd& p) {
        (void)p;
        return VectorXd::Constant(4, 2.5).eval();
    };
    const MatrixXd jc = lsq::jacobian_fd(constant, VectorXd::Constant(2, 1.0));
    CHECK(jc.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("jacobian_fd agrees with the forward-difference oracle on the DCM model") {
    const ResonatorParams truth{5.5e9, 9e4, 1.2e5, 0.1, 0.9, 0.3, 30e-9};
    const S21Trace trace = synth_s21(truth, 5.4985e9, 5.5015e9, 64, NoiseSpec{0.0, 0});
    const auto& pts = trace.points();

    // Residuals in the scaled space used by fit_resonator: [GHz, Ql, Qc, phi, a, theta, ns].
    lsq::ResidualFn residual = [&pts](const VectorXd& v) {
        const ResonatorParams p{v[0] * 1e9, v[1], v[2], v[3], v[4], v[5], v[6] * 1e-9};
        VectorXd r(static_cast<Eigen::Index>(2 * pts.size()));
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto d = s21_model(p, pts[i].freq_hz) - pts[i].value;
            r[static_cast<Eigen::Index>(2 * i)] = d.real();
            r[static_cast<Eigen::Index>(2 * i + 1)] = d.imag();
        }
        return r;
    };
    VectorXd at(7);
    at << 5.5, 9e4, 1.2e5, 0.1, 0.9, 0.3, 30.0;

    VectorXd steps(7);
    steps << 1e-8, 9e-2, 1.2e-1, 1e-6, 1e-6, 1e-6, 1e-6;
    const MatrixXd fast = lsq::jacobian_fd(residual, at, steps);
    const MatrixXd oracle = jacobian_forward_oracle(residual, at);
    for (Eigen::Index i = 0; i < fast.rows(); ++i) {
        for (Eigen::Index j = 0; j < fast.cols(); ++j) {
            const double scale = std::max({std::abs(fast(i, j)), std::abs(oracle(i, j)), 1e-4});
            CHECK(std::abs(fast(i, j) - oracle(i, j)) / scale < 1e-4);
        }
    }
}

TEST_CASE("two finite-difference schemes agree to 1e-3 on fit models") {
    // exponential + cosine models at generic parameter points
    lsq::ResidualFn expmodel = [](const VectorXd& p) {
        VectorXd r(12);
        for (int i = 0; i < 12; ++i) {
            r[i] = p[0] * std::exp(-0.7 * i / p[1]) + p[2];
        }
        return r;
    };
    VectorXd at(3);
    at << 2.0, 6.0, 0.4;
    const MatrixXd a = lsq::jacobian_fd(expmodel, at);
    const MatrixXd b = jacobian_forward_oracle(expmodel, at, 3e-6);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double scale = std::max({std::abs(a(i, j)), std::abs(b(i, j)), 1e-6});
            CHECK(std::abs(a(i, j) - b(i, j)) / scale < 1e-3);
        }
    }
}

TEST_CASE("accepted costs are non-increasing") {
    Xoshiro256pp rng(3);
    std::vector<double> ts, ys;
    for (int i = 0; i < 40; ++i) {
        const double t = 0.5 * i;
        ts.push_back(t);
        ys.push_back(3.0 * std::exp(-t / 7.0) + 0.2 + 0.05 * rng.normal());
    }
    lsq::FitProblem problem;
    problem.residual = [&](const VectorXd& p) {
        VectorXd r(40);
        for (int i = 0; i < 40; ++i) r[i] = p[0] * std::exp(-ts[i] / p[1]) + p[2] - ys[i];
        return r;
    };
    problem.initial = VectorXd(3);
    problem.initial << 1.0, 2.0, 0.0;
    const auto res = lsq::fit(problem);
    REQUIRE(res.cost_trace.size() > 1);
    for (std::size_t i = 1; i < res.cost_trace.size(); ++i) {
        CHECK(res.cost_trace[i] <= res.cost_trace[i - 1]);
    }
    CHECK(res.cost <= res.cost_trace.front());
}

TEST_CASE("noiseless recovery from perturbed starts across models") {
    Xoshiro256pp rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        const double amp = 0.5 + 4.0 * rng.uniform01();
        const double tau = 2.0 + 30.0 * rng.uniform01();
        const double off = -1.0 + 2.0 * rng.uniform01();
        std::vector<double> ts, ys;
        for (int i = 0; i < 30; ++i) {
            const double t = tau * 3.0 * i / 29.0;
            ts.push_back(t);
            ys.push_back(amp * std::exp(-t / tau) + off);
        }
        lsq::FitProblem problem;
        problem.residual = [&](const VectorXd& p) {
            VectorXd r(30);
            for (int i = 0; i < 30; ++i) {
                r[i] = p[0] * std::exp(-ts[i] / p[1]) + p[2] - ys[i];
            }
            return r;
        };
        auto perturb = [&](double v) { return v * (1.0 + 0.2 * (rng.uniform01() - 0.5)); };
        problem.initial = VectorXd(3);
        problem.initial << perturb(amp), perturb(tau), off + 0.05;
        const auto res = lsq::fit(problem);
        CHECK(res.converged);
        CHECK(res.params[0] == doctest::Approx(amp).epsilon(1e-6));
        CHECK(res.params[1] == doctest::Approx(tau).epsilon(1e-6));
        CHECK(std::abs(res.params[2] - off) < 1e-6 * std::max(std::abs(off), 1.0));
    }
}

TEST_CASE("bounds are respected by every accepted iterate") {
    // Unconstrained optimum at p = (-1, 8); box forces p0 >= 0, p1 <= 5.
    lsq::FitProblem problem;
    problem.residual = [](const VectorXd& p) {
        VectorXd r(2);
        r[0] = p[0] + 1.0;
        r[1] = 0.5 * (p[1] - 8.0);
        return r;
    };
    problem.initial = VectorXd(2);
    problem.initial << 2.0, 1.0;
    problem.lower = VectorXd(2);
    problem.lower << 0.0, -10.0;
    problem.upper = VectorXd(2);
    problem.upper << 10.0, 5.0;
    std::vector<VectorXd> accepted;
    problem.observer = [&](const lsq::IterationRecord& rec) {
        accepted.push_back(rec.params);
    };
    const auto res = lsq::fit(problem);
    REQUIRE(!accepted.empty());
    for (const auto& p : accepted) {
        CHECK(p[0] >= 0.0);
        CHECK(p[1] <= 5.0);
    }
    CHECK(res.params[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(res.params[1] == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("non-finite residual at the start raises bad-initial-guess") {
    lsq::FitProblem problem;
    problem.residual = [](const VectorXd& p) {
        VectorXd r(2);
        r[0] = std::sqrt(p[0]); // NaN for negative start
        r[1] = p[0];
        return r;
    };
    problem.initial = VectorXd::Constant(1, -1.0);
    try {
        lsq::fit(problem);
        FAIL("expected bad-initial-guess");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadInitialGuess);
    }
}

TEST_CASE("singular normal equations flag the covariance unavailable") {
    lsq::FitProblem problem;
    problem.residual = [](const VectorXd& p) {
        VectorXd r(3);
        r[0] = p[0] - 1.0;
        r[1] = 2.0 * (p[0] - 1.0);
        r[2] = 0.0 * p[1]; // second parameter unused
        return r;
    };
    problem.initial = VectorXd(2);
    problem.initial << 0.0, 0.0;
    const auto res = lsq::fit(problem);
    CHECK(res.params[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(!res.covariance_valid);
    CHECK(std::isnan(res.uncertainties[0]));
}

TEST_CASE("residual dimension below parameter dimension is rejected") {
    lsq::FitProblem problem;
    problem.residual = [](const VectorXd& p) {
        VectorXd r(1);
        r[0] = p[0] + p[1];
        return r;
    };
    problem.initial = VectorXd::Zero(2);
    CHECK_THROWS_AS(lsq::fit(problem), Error);
}

TEST_CASE("covariance matches the textbook line-fit result") {
    // y = 2x + 1 with unit-ish residual spread; compare against the closed
    // form (X^T X)^{-1} s^2 computed here independently.
    std::vector<double> xs{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> ys{1.1, 2.9, 5.2, 6.8, 9.1, 10.9};
    lsq::FitProblem problem;
    problem.residual = line_residual(xs, ys);
    problem.initial = VectorXd::Zero(2);
    const auto res = lsq::fit(problem);
    REQUIRE(res.covariance_valid);

    MatrixXd design(xs.size(), 2);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        design(static_cast<Eigen::Index>(i), 0) = xs[i];
        design(static_cast<Eigen::Index>(i), 1) = 1.0;
    }
    const MatrixXd expected =
        (design.transpose() * design).inverse() * (res.cost / (6.0 - 2.0));
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            CHECK(res.covariance(i, j) == doctest::Approx(expected(i, j)).epsilon(1e-4));
        }
    }
}
