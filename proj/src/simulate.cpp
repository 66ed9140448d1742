#include "agglm/simulate.hpp"

#include <random>
#include <stdexcept>
#include <string>

#include "agglm/rng.hpp"

namespace agglm {

Relationship relationship_from_name(std::string_view name) {
    if (name == "linear") return Relationship::linear;
    if (name == "none") return Relationship::none;
    throw std::invalid_argument("unknown relationship '" + std::string(name) +
                                "' (expected linear or none)");
}

SimulatedData simulate_glm(const SimulationConfig& config) {
    if (config.n < 1 || config.d < 1)
        throw std::invalid_argument("simulation needs n >= 1 and d >= 1");
    if (!(config.coefficient_scale > 0.0) || !(config.covariate_scale > 0.0))
        throw std::invalid_argument("simulation scales must be positive");

    const GlmFamily family(config.family, config.epsilon);
    std::mt19937_64 rng = make_engine(config.seed, 0);
    std::normal_distribution<double> normal(0.0, 1.0);

    SimulatedData data;
    data.X.resize(config.n, config.d);
    for (Eigen::Index i = 0; i < config.n; ++i)
        for (Eigen::Index j = 0; j < config.d; ++j)
            data.X(i, j) = normal(rng) * config.covariate_scale;

    data.beta = Eigen::VectorXd::Zero(config.d);
    if (config.relationship == Relationship::linear)
        for (Eigen::Index j = 0; j < config.d; ++j)
            data.beta[j] = normal(rng) * config.coefficient_scale;

    const Eigen::VectorXd eta = data.X * data.beta;
    data.z.resize(config.n);
    for (Eigen::Index i = 0; i < config.n; ++i) {
        const double mu = family.link_inverse(eta[i]);
        switch (config.family) {
            case FamilyKind::gaussian:
                data.z[i] = mu + normal(rng);
                break;
            case FamilyKind::poisson: {
                std::poisson_distribution<long long> poisson(mu);
                data.z[i] = static_cast<double>(poisson(rng));
                break;
            }
            case FamilyKind::bernoulli: {
                std::bernoulli_distribution coin(mu);
                data.z[i] = coin(rng) ? 1.0 - config.epsilon : config.epsilon;
                break;
            }
        }
    }
    return data;
}

}  // namespace agglm
