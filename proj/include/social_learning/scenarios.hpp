#pragma once

#include <cstdint>

#include "social_learning/engine.hpp"

namespace social_learning::scenarios {

// Ten agents on a ring with chords, Metropolis weights (doubly stochastic).
Topology ten_agent_topology();

// Unit-variance Gaussian families with means 0.3 n, n = 1..5, assigned so
// that agents {0,1}, {2,3,4}, {5,6}, {7,8,9} cannot tell the true
// hypothesis 1 apart from 2, 3, 4, 5 respectively.
ObservationModel ten_agent_model();

// Trending protocol that never shares the truth: pi = (0, .25, .25, .25, .25).
ExperimentConfig trending_never_truth(std::uint64_t seed = 1, std::size_t horizon = 2000);
// Same network, full belief sharing.
ExperimentConfig full_sharing(std::uint64_t seed = 1, std::size_t horizon = 2000);
// Same network, the truth is the only shared hypothesis (pi = delta at 1).
ExperimentConfig trending_truth_only(std::uint64_t seed = 1, std::size_t horizon = 5000);
// Same network, fixed shared hypothesis with uniform completion.
ExperimentConfig uniform_fill(Hypothesis tau, std::uint64_t seed = 1, std::size_t horizon = 2000);

// Three fully connected agents, four hypotheses, truth = 4 (index 3).
// Agent k cannot tell hypothesis k from the truth and separates the others.
ObservationModel three_agent_model();
// Beliefs alpha on the truth, 1 - alpha on the agent's look-alike
// hypothesis, exactly zero elsewhere; trend is a point mass on the truth.
ExperimentConfig three_agent_equilibrium(double alpha, std::uint64_t seed = 1, std::size_t horizon = 100);

// Two agents, three hypotheses with means (0, 0.5, 5) and (0, 0.4, 4).
// The shared hypothesis 2 sits next to the truth 1 and hypothesis 3 is far
// away, so uniform completion with tau = 2 drives both agents to 2.
ObservationModel two_agent_model();
ExperimentConfig two_agent_uniform_fill(std::uint64_t seed = 1, std::size_t horizon = 400);

}  // namespace social_learning::scenarios
