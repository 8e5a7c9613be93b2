#pragma once

// Random networks and beliefs shared by the property tests.

#include <random>

#include "social_learning/protocol.hpp"
#include "support/oracles.hpp"

namespace random_instances {

using namespace social_learning;

inline std::vector<double> random_pmf(std::size_t n, std::mt19937_64& rng) {
    std::gamma_distribution<double> g(1.0, 1.0);
    std::vector<double> p(n);
    for (auto& x : p) x = g(rng) + 1e-3;
    return oracle::normalize(p);
}

// Random connected network of `agents` agents with a random left-stochastic
// matrix on a ring-plus-chords support, random Gaussian means.
inline SocialNetwork random_network(std::size_t agents, std::size_t hyps, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::uniform_real_distribution<double> mean(-1.0, 1.0);
    Topology topology(agents);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(agents), static_cast<Eigen::Index>(agents));
    for (std::size_t k = 0; k < agents; ++k) {
        a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = u(rng);
        const std::size_t l = (k + 1) % agents;
        if (l != k) {
            topology.add_edge(l, k);
            a(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = u(rng);
        }
    }
    if (agents > 3) {
        topology.add_edge(0, 2);
        a(0, 2) = u(rng);
    }
    for (Eigen::Index k = 0; k < a.cols(); ++k) a.col(k) /= a.col(k).sum();
    std::vector<AgentLikelihood> models;
    for (std::size_t k = 0; k < agents; ++k) {
        std::vector<double> means(hyps);
        for (auto& m : means) m = mean(rng);
        models.push_back(AgentLikelihood::gaussian(means));
    }
    return SocialNetwork{CombinationMatrix::from_entries(a, topology), ObservationModel(std::move(models)), 0};
}

inline std::vector<Belief> random_beliefs(std::size_t agents, std::size_t hyps, std::mt19937_64& rng) {
    std::vector<Belief> out;
    for (std::size_t k = 0; k < agents; ++k) out.push_back(Belief::from_probabilities(random_pmf(hyps, rng)));
    return out;
}

}  // namespace random_instances
