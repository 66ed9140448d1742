#include <cmath>
#include <random>
#include <stdexcept>

#include "agglm/glm.hpp"
#include "agglm/rng.hpp"
#include "agglm/simulate.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace agglm;

namespace {

Eigen::MatrixXd random_design(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd X(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) X(i, j) = normal(rng);
    return X;
}

}  // namespace

TEST_CASE("gaussian fit matches the analytic ridge solution") {
    std::mt19937_64 rng = make_engine(21, 0);
    GlmFamily family = GlmFamily::gaussian();
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::MatrixXd X = random_design(rng, 60, 5);
        Eigen::VectorXd z = testutil::random_domain_vector(rng, family, 60);
        for (double lambda : {0.0, 0.3, 2.0}) {
            GlmOptions opts;
            opts.lambda = lambda;
            GlmFit fit = fit_glm(X, z, family, opts);
            CHECK(fit.converged);
            Eigen::VectorXd expected = oracle::ridge_solution(X, z, lambda);
            CHECK((fit.beta - expected).lpNorm<Eigen::Infinity>() < 1e-8);
        }
    }
}

TEST_CASE("objective gradient vanishes at the fitted coefficients") {
    for (FamilyKind kind :
         {FamilyKind::gaussian, FamilyKind::poisson, FamilyKind::bernoulli}) {
        GlmFamily family(kind);
        std::mt19937_64 rng = make_engine(22, static_cast<std::uint64_t>(kind));
        Eigen::MatrixXd X = random_design(rng, 120, 4) * 0.5;
        Eigen::VectorXd z = testutil::random_domain_vector(rng, family, 120);
        GlmOptions opts;
        opts.lambda = 0.1;
        GlmFit fit = fit_glm(X, z, family, opts);
        REQUIRE(fit.converged);

        Eigen::VectorXd g = oracle::fd_gradient(
            [&](const Eigen::VectorXd& b) { return glm_objective(X, z, b, family, opts); },
            fit.beta);
        CHECK(g.lpNorm<Eigen::Infinity>() < 1e-4);
    }
}

TEST_CASE("analytic gradient agrees with finite differences away from the optimum") {
    for (FamilyKind kind :
         {FamilyKind::gaussian, FamilyKind::poisson, FamilyKind::bernoulli}) {
        GlmFamily family(kind);
        std::mt19937_64 rng = make_engine(23, static_cast<std::uint64_t>(kind));
        std::normal_distribution<double> normal(0.0, 0.3);
        Eigen::MatrixXd X = random_design(rng, 50, 3) * 0.4;
        Eigen::VectorXd z = testutil::random_domain_vector(rng, family, 50);
        GlmOptions opts;
        opts.lambda = 0.7;
        for (int rep = 0; rep < 5; ++rep) {
            Eigen::VectorXd beta(3);
            for (Eigen::Index j = 0; j < 3; ++j) beta[j] = normal(rng);

            Eigen::VectorXd mu = predict_means(X, beta, family);
            Eigen::VectorXd analytic = X.transpose() * (mu - z) + 2.0 * opts.lambda * beta;
            Eigen::VectorXd numeric = oracle::fd_gradient(
                [&](const Eigen::VectorXd& b) { return glm_objective(X, z, b, family, opts); },
                beta);
            CHECK((analytic - numeric).lpNorm<Eigen::Infinity>() < 1e-4);
        }
    }
}

TEST_CASE("warm started fits never end above the starting objective") {
    for (FamilyKind kind :
         {FamilyKind::gaussian, FamilyKind::poisson, FamilyKind::bernoulli}) {
        GlmFamily family(kind);
        std::mt19937_64 rng = make_engine(24, static_cast<std::uint64_t>(kind));
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::MatrixXd X = random_design(rng, 40, 4) * 0.3;
        Eigen::VectorXd z = testutil::random_domain_vector(rng, family, 40);
        GlmOptions opts;
        for (int rep = 0; rep < 20; ++rep) {
            Eigen::VectorXd start(4);
            for (Eigen::Index j = 0; j < 4; ++j) start[j] = normal(rng);
            double before = glm_objective(X, z, start, family, opts);
            GlmFit fit = fit_glm(X, z, family, opts, &start);
            double after = glm_objective(X, z, fit.beta, family, opts);
            CHECK(after <= before + 1e-12);
        }
    }
}

TEST_CASE("unpenalized intercept survives a heavy penalty") {
    std::mt19937_64 rng = make_engine(25, 0);
    GlmFamily family = GlmFamily::gaussian();
    Eigen::MatrixXd X(200, 3);
    X.col(0).setOnes();
    X.rightCols(2) = random_design(rng, 200, 2);
    Eigen::VectorXd z = testutil::random_domain_vector(rng, family, 200);
    z.array() += 4.0;

    GlmOptions opts;
    opts.lambda = 1e6;
    opts.unpenalized_columns = {0};
    GlmFit fit = fit_glm(X, z, family, opts);
    CHECK(std::abs(fit.beta[1]) < 1e-3);
    CHECK(std::abs(fit.beta[2]) < 1e-3);
    CHECK(fit.beta[0] == doctest::Approx(z.mean()).epsilon(1e-2));
}

TEST_CASE("input validation") {
    GlmFamily poisson = GlmFamily::poisson();
    Eigen::MatrixXd X = Eigen::MatrixXd::Ones(3, 1);
    Eigen::VectorXd bad(3);
    bad << 1.0, -2.0, 0.5;
    CHECK_THROWS_AS(fit_glm(X, bad, poisson), std::invalid_argument);

    Eigen::VectorXd z = Eigen::VectorXd::Ones(3);
    Eigen::MatrixXd nan_X = X;
    nan_X(1, 0) = std::nan("");
    CHECK_THROWS_AS(fit_glm(nan_X, z, poisson), std::invalid_argument);

    GlmOptions negative;
    negative.lambda = -0.5;
    CHECK_THROWS_AS(fit_glm(X, z, poisson, negative), std::invalid_argument);

    Eigen::VectorXd short_start = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(fit_glm(X, z, poisson, GlmOptions{}, &short_start),
                    std::invalid_argument);

    GlmOptions bad_col;
    bad_col.unpenalized_columns = {5};
    CHECK_THROWS_AS(fit_glm(X, z, poisson, bad_col), std::invalid_argument);

    CHECK_THROWS_AS(fit_glm(Eigen::MatrixXd(0, 0), Eigen::VectorXd(0), poisson),
                    std::invalid_argument);

    CHECK_THROWS_AS(predict_means(X, Eigen::VectorXd::Zero(2), poisson),
                    std::invalid_argument);
}

TEST_CASE("singular unpenalized systems take the minimum-norm step") {
    std::mt19937_64 rng = make_engine(26, 0);
    GlmFamily family = GlmFamily::gaussian();
    Eigen::MatrixXd X(50, 3);
    X.leftCols(2) = random_design(rng, 50, 2);
    X.col(2) = X.col(1);  // exact duplicate
    Eigen::VectorXd z = testutil::random_domain_vector(rng, family, 50);

    GlmFit fit = fit_glm(X, z, family);
    CHECK(fit.rank_deficient);
    CHECK(fit.beta.allFinite());
    // the fitted means still solve the least squares problem
    Eigen::VectorXd residual = z - X * fit.beta;
    CHECK((X.transpose() * residual).lpNorm<Eigen::Infinity>() < 1e-7);

    GlmOptions ridged;
    ridged.lambda = 0.5;
    GlmFit reg = fit_glm(X, z, family, ridged);
    CHECK_FALSE(reg.rank_deficient);
}

TEST_CASE("poisson and bernoulli fits recover simulated coefficients") {
    for (FamilyKind kind : {FamilyKind::poisson, FamilyKind::bernoulli}) {
        SimulationConfig config;
        config.family = kind;
        config.n = 4000;
        config.d = 4;
        config.coefficient_scale = 0.3;
        config.seed = 27;
        SimulatedData data = simulate_glm(config);

        GlmFit fit = fit_glm(data.X, data.z, GlmFamily(kind));
        CHECK(fit.converged);
        CHECK((fit.beta - data.beta).lpNorm<Eigen::Infinity>() < 0.2);
    }
}

TEST_CASE("fits are deterministic") {
    std::mt19937_64 rng = make_engine(28, 0);
    GlmFamily family = GlmFamily::poisson();
    Eigen::MatrixXd X = random_design(rng, 80, 4) * 0.4;
    Eigen::VectorXd z = testutil::random_domain_vector(rng, family, 80);
    GlmFit a = fit_glm(X, z, family);
    GlmFit b = fit_glm(X, z, family);
    CHECK(a.beta == b.beta);
    CHECK(a.iterations == b.iterations);
}
