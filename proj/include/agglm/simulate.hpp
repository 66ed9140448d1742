#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "agglm/family.hpp"

namespace agglm {

enum class Relationship { linear, none };

Relationship relationship_from_name(std::string_view name);

struct SimulationConfig {
    FamilyKind family = FamilyKind::gaussian;
    Eigen::Index n = 1000;
    Eigen::Index d = 10;
    double coefficient_scale = 1.0;
    double covariate_scale = 1.0;
    std::uint64_t seed = 0;
    Relationship relationship = Relationship::linear;
    double epsilon = 1e-8;
};

struct SimulatedData {
    Eigen::MatrixXd X;
    Eigen::VectorXd z;
    Eigen::VectorXd beta;  // zero vector when relationship is none
};

/// Standard-normal covariates and coefficients (scaled), targets drawn from
/// the family at mean linkinv(X beta). Bernoulli draws are softened to
/// {eps, 1-eps}. Deterministic given the seed.
SimulatedData simulate_glm(const SimulationConfig& config);

}  // namespace agglm
