#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "agglm/family.hpp"
#include "agglm/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace agglm;

namespace {

const std::vector<FamilyKind> kKinds{FamilyKind::gaussian, FamilyKind::poisson,
                                     FamilyKind::bernoulli};

}

TEST_CASE("family names round trip") {
    for (FamilyKind kind : kKinds) CHECK(family_from_name(family_name(kind)) == kind);
    CHECK_THROWS_AS(family_from_name("weibull"), std::invalid_argument);
    CHECK_THROWS_AS(family_from_name(""), std::invalid_argument);
}

TEST_CASE("epsilon must lie in (0, 1e-3)") {
    CHECK_THROWS_AS(GlmFamily(FamilyKind::gaussian, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(GlmFamily(FamilyKind::poisson, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(GlmFamily(FamilyKind::bernoulli, -1e-9), std::invalid_argument);
    CHECK_NOTHROW(GlmFamily(FamilyKind::bernoulli, 1e-4));
}

TEST_CASE("divergences match their closed forms") {
    // squared loss, generalized I-divergence, binary KL
    GlmFamily gaussian = GlmFamily::gaussian();
    CHECK(gaussian.divergence(3.0, 1.0) == doctest::Approx(0.5 * 4.0).epsilon(1e-15));
    CHECK(gaussian.divergence(-2.5, 0.5) == doctest::Approx(0.5 * 9.0).epsilon(1e-15));

    GlmFamily poisson = GlmFamily::poisson();
    auto gi = [](double y, double x) { return y * std::log(y / x) - y + x; };
    CHECK(poisson.divergence(2.0, 3.0) == doctest::Approx(gi(2.0, 3.0)).epsilon(1e-14));
    CHECK(poisson.divergence(5.0, 0.5) == doctest::Approx(gi(5.0, 0.5)).epsilon(1e-14));
    // y = 0 is in the domain; y log y -> 0
    CHECK(poisson.divergence(0.0, 2.0) < 2.0 + 1e-6);
    CHECK(std::isfinite(poisson.divergence(0.0, 2.0)));

    GlmFamily bernoulli = GlmFamily::bernoulli();
    auto kl = [](double y, double x) {
        return y * std::log(y / x) + (1.0 - y) * std::log((1.0 - y) / (1.0 - x));
    };
    CHECK(bernoulli.divergence(0.3, 0.7) == doctest::Approx(kl(0.3, 0.7)).epsilon(1e-14));
    CHECK(bernoulli.divergence(0.9, 0.2) == doctest::Approx(kl(0.9, 0.2)).epsilon(1e-14));
    CHECK(std::isfinite(bernoulli.divergence(0.0, 0.5)));
    CHECK(std::isfinite(bernoulli.divergence(1.0, 0.5)));
}

TEST_CASE("divergence is the Bregman gap of phi") {
    // D(y||x) = phi(y) - phi(x) - phi'(x) (y - x), with phi' taken numerically
    for (FamilyKind kind : kKinds) {
        GlmFamily family(kind);
        std::mt19937_64 rng = make_engine(11, static_cast<std::uint64_t>(kind));
        for (int i = 0; i < 200; ++i) {
            double y = testutil::random_domain_value(rng, family);
            double x = testutil::random_domain_value(rng, family);
            double gap = family.phi(y) - family.phi(x) - oracle::fd_phi_prime(family, x) * (y - x);
            CHECK(family.divergence(y, x) == doctest::Approx(gap).epsilon(1e-5));
        }
    }
}

TEST_CASE("divergence is nonnegative and zero only at equality") {
    for (FamilyKind kind : kKinds) {
        GlmFamily family(kind);
        std::mt19937_64 rng = make_engine(12, static_cast<std::uint64_t>(kind));
        for (int i = 0; i < 500; ++i) {
            double y = testutil::random_domain_value(rng, family);
            double x = testutil::random_domain_value(rng, family);
            CHECK(family.divergence(y, y) == 0.0);
            if (y != x) CHECK(family.divergence(y, x) > 0.0);
        }
    }
}

TEST_CASE("link inverses") {
    GlmFamily gaussian = GlmFamily::gaussian();
    CHECK(gaussian.link_inverse(-3.25) == -3.25);

    GlmFamily poisson = GlmFamily::poisson();
    for (double eta : {-5.0, -0.5, 0.0, 2.0, 10.0})
        CHECK(poisson.link_inverse(eta) == doctest::Approx(std::exp(eta)).epsilon(1e-15));
    CHECK(std::isfinite(poisson.link_inverse(1e6)));
    CHECK(poisson.link_inverse(-1e6) == poisson.epsilon());

    GlmFamily bernoulli = GlmFamily::bernoulli();
    for (double eta : {-6.0, -1.0, 0.0, 1.5, 8.0})
        CHECK(bernoulli.link_inverse(eta) ==
              doctest::Approx(1.0 / (1.0 + std::exp(-eta))).epsilon(1e-12));
    CHECK(bernoulli.link_inverse(100.0) == 1.0 - bernoulli.epsilon());
    CHECK(bernoulli.link_inverse(-100.0) == bernoulli.epsilon());
    CHECK(bernoulli.link_inverse(0.0) == 0.5);
}

TEST_CASE("mean_derivative matches the numeric link slope") {
    for (FamilyKind kind : kKinds) {
        GlmFamily family(kind);
        std::mt19937_64 rng = make_engine(13, static_cast<std::uint64_t>(kind));
        std::uniform_real_distribution<double> etas(-2.0, 2.0);
        for (int i = 0; i < 100; ++i) {
            double eta = etas(rng);
            double h = 1e-6;
            double slope = (family.link_inverse(eta + h) - family.link_inverse(eta - h)) / (2 * h);
            CHECK(family.mean_derivative(family.link_inverse(eta)) ==
                  doctest::Approx(slope).epsilon(1e-5));
        }
    }
}

TEST_CASE("vector divergence sums the scalar terms and is permutation equivariant") {
    for (FamilyKind kind : kKinds) {
        GlmFamily family(kind);
        std::mt19937_64 rng = make_engine(14, static_cast<std::uint64_t>(kind));
        Eigen::VectorXd y = testutil::random_domain_vector(rng, family, 40);
        Eigen::VectorXd x = testutil::random_domain_vector(rng, family, 40);

        long double acc = 0.0L;
        for (Eigen::Index i = 0; i < y.size(); ++i) acc += family.divergence(y[i], x[i]);
        CHECK(family.divergence(y, x) == doctest::Approx(static_cast<double>(acc)).epsilon(1e-15));

        std::vector<Eigen::Index> perm(40);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Eigen::VectorXd yp(40), xp(40);
        for (Eigen::Index i = 0; i < 40; ++i) {
            yp[i] = y[perm[static_cast<std::size_t>(i)]];
            xp[i] = x[perm[static_cast<std::size_t>(i)]];
        }
        CHECK(family.divergence(yp, xp) ==
              doctest::Approx(family.divergence(y, x)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(GlmFamily::gaussian().divergence(Eigen::VectorXd::Zero(3),
                                                     Eigen::VectorXd::Zero(4)),
                    std::invalid_argument);
}

TEST_CASE("domain checks") {
    GlmFamily gaussian = GlmFamily::gaussian();
    CHECK(gaussian.in_domain(-1e300));
    CHECK_FALSE(gaussian.in_domain(std::nan("")));

    GlmFamily poisson = GlmFamily::poisson();
    CHECK(poisson.in_domain(0.0));
    CHECK(poisson.in_domain(17.0));
    CHECK_FALSE(poisson.in_domain(-1e-9));

    GlmFamily bernoulli = GlmFamily::bernoulli();
    CHECK(bernoulli.in_domain(0.0));
    CHECK(bernoulli.in_domain(1.0));
    CHECK_FALSE(bernoulli.in_domain(1.0 + 1e-9));
    CHECK_FALSE(bernoulli.in_domain(-0.1));
}
