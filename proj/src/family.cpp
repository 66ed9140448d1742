#include "agglm/family.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace agglm {

FamilyKind family_from_name(std::string_view name) {
    if (name == "gaussian") return FamilyKind::gaussian;
    if (name == "poisson") return FamilyKind::poisson;
    if (name == "bernoulli") return FamilyKind::bernoulli;
    throw std::invalid_argument("unknown family '" + std::string(name) +
                                "' (expected gaussian, poisson or bernoulli)");
}

std::string_view family_name(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::gaussian: return "gaussian";
        case FamilyKind::poisson: return "poisson";
        case FamilyKind::bernoulli: return "bernoulli";
    }
    return "?";
}

GlmFamily::GlmFamily(FamilyKind kind, double epsilon) : kind_(kind), epsilon_(epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < 1e-3))
        throw std::invalid_argument("family epsilon must lie in (0, 1e-3)");
    switch (kind_) {
        case FamilyKind::gaussian:
            domain_min_ = -std::numeric_limits<double>::infinity();
            domain_max_ = std::numeric_limits<double>::infinity();
            break;
        case FamilyKind::poisson:
            domain_min_ = 0.0;
            domain_max_ = std::numeric_limits<double>::infinity();
            break;
        case FamilyKind::bernoulli:
            domain_min_ = 0.0;
            domain_max_ = 1.0;
            break;
    }
}

bool GlmFamily::in_domain(double value) const {
    if (std::isnan(value)) return false;
    return value >= domain_min_ && value <= domain_max_;
}

double GlmFamily::link_inverse(double eta) const {
    switch (kind_) {
        case FamilyKind::gaussian:
            return eta;
        case FamilyKind::poisson: {
            // exp(700) is still finite in double.
            double mu = std::exp(std::min(eta, 700.0));
            return std::max(mu, epsilon_);
        }
        case FamilyKind::bernoulli: {
            double p;
            if (eta >= 0.0) {
                p = 1.0 / (1.0 + std::exp(-eta));
            } else {
                double t = std::exp(eta);
                p = t / (1.0 + t);
            }
            return std::clamp(p, epsilon_, 1.0 - epsilon_);
        }
    }
    return eta;
}

Eigen::VectorXd GlmFamily::link_inverse(const Eigen::VectorXd& eta) const {
    Eigen::VectorXd mu(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) mu[i] = link_inverse(eta[i]);
    return mu;
}

double GlmFamily::phi(double x) const {
    switch (kind_) {
        case FamilyKind::gaussian:
            return 0.5 * x * x;
        case FamilyKind::poisson: {
            double xc = std::max(x, epsilon_);
            return xc * std::log(xc) - xc;
        }
        case FamilyKind::bernoulli: {
            double xc = std::clamp(x, epsilon_, 1.0 - epsilon_);
            return xc * std::log(xc) + (1.0 - xc) * std::log(1.0 - xc);
        }
    }
    return 0.0;
}

double GlmFamily::mean_derivative(double mu) const {
    switch (kind_) {
        case FamilyKind::gaussian: return 1.0;
        case FamilyKind::poisson: return mu;
        case FamilyKind::bernoulli: return mu * (1.0 - mu);
    }
    return 1.0;
}

double GlmFamily::divergence(double y, double mu) const {
    switch (kind_) {
        case FamilyKind::gaussian: {
            double r = y - mu;
            return 0.5 * r * r;
        }
        case FamilyKind::poisson: {
            // generalized I-divergence, arguments clipped away from 0
            double yc = std::max(y, epsilon_);
            double mc = std::max(mu, epsilon_);
            return yc * std::log(yc / mc) - yc + mc;
        }
        case FamilyKind::bernoulli: {
            // binary KL, arguments clipped away from {0, 1}
            double yc = std::clamp(y, epsilon_, 1.0 - epsilon_);
            double mc = std::clamp(mu, epsilon_, 1.0 - epsilon_);
            return yc * std::log(yc / mc) + (1.0 - yc) * std::log((1.0 - yc) / (1.0 - mc));
        }
    }
    return 0.0;
}

double GlmFamily::divergence(const Eigen::VectorXd& y, const Eigen::VectorXd& mu) const {
    if (y.size() != mu.size())
        throw std::invalid_argument("divergence: vectors have lengths " + std::to_string(y.size()) +
                                    " and " + std::to_string(mu.size()));
    long double acc = 0.0L;
    for (Eigen::Index i = 0; i < y.size(); ++i) acc += divergence(y[i], mu[i]);
    return static_cast<double>(acc);
}

}  // namespace agglm
