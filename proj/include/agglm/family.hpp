#pragma once

#include <Eigen/Dense>
#include <string_view>

namespace agglm {

enum class FamilyKind { gaussian, poisson, bernoulli };

FamilyKind family_from_name(std::string_view name);
std::string_view family_name(FamilyKind kind);

/// Exponential-family bundle: the scalar convex function phi, its canonical
/// link inverse, the matching Bregman divergence, and the valid target domain.
/// All vector operations are sums of identical per-coordinate terms, so the
/// divergence is permutation-equivariant.
class GlmFamily {
  public:
    explicit GlmFamily(FamilyKind kind, double epsilon = 1e-8);

    static GlmFamily gaussian(double epsilon = 1e-8) { return GlmFamily(FamilyKind::gaussian, epsilon); }
    static GlmFamily poisson(double epsilon = 1e-8) { return GlmFamily(FamilyKind::poisson, epsilon); }
    static GlmFamily bernoulli(double epsilon = 1e-8) { return GlmFamily(FamilyKind::bernoulli, epsilon); }

    FamilyKind kind() const { return kind_; }
    double epsilon() const { return epsilon_; }
    double domain_min() const { return domain_min_; }
    double domain_max() const { return domain_max_; }

    bool in_domain(double value) const;

    // Linear predictor -> mean parameter. Saturates into the open mean domain
    // instead of overflowing (poisson caps the exponent, bernoulli clips to
    // [eps, 1-eps]).
    double link_inverse(double eta) const;
    Eigen::VectorXd link_inverse(const Eigen::VectorXd& eta) const;

    // The convex function generating the divergence, evaluated after the same
    // epsilon clipping the divergence applies.
    double phi(double x) const;

    // d(mean)/d(linear predictor) at a given mean; the curvature weight of the
    // canonical-link likelihood.
    double mean_derivative(double mu) const;

    double divergence(double y, double mu) const;
    double divergence(const Eigen::VectorXd& y, const Eigen::VectorXd& mu) const;

  private:
    FamilyKind kind_;
    double epsilon_;
    double domain_min_;
    double domain_max_;
};

}  // namespace agglm
