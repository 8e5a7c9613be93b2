#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "social_learning/belief.hpp"
#include "social_learning/models.hpp"
#include "social_learning/network.hpp"

namespace social_learning {

// Every agent shares its whole intermediate belief.
struct FullSharing {};

// Every agent shares psi(tau) for a fixed tau; receivers complete the rest
// uniformly (including their own message).
struct FixedPartial {
    Hypothesis tau;
};

// A single trending hypothesis tau_i ~ trend is shared each round; receivers
// complete the rest from their own intermediate belief.
struct TrendingBootstrap {
    TrendDistribution trend;
};

using Protocol = std::variant<FullSharing, FixedPartial, TrendingBootstrap>;

std::string protocol_name(const Protocol& protocol);
// Throws std::invalid_argument when tau or the trend size does not fit H.
void validate_protocol(const Protocol& protocol, std::size_t hypotheses);
bool is_trending(const Protocol& protocol);

// Fixed ingredients of a simulated network.
struct SocialNetwork {
    CombinationMatrix combination;
    ObservationModel model;
    Hypothesis truth;

    std::size_t num_agents() const { return model.num_agents(); }
    std::size_t hypotheses() const { return model.hypotheses(); }
};

// Throws std::invalid_argument when sizes disagree or some agent has an
// infinite KL divergence from the true hypothesis.
void validate_network(const SocialNetwork& network);

struct NetworkState {
    std::vector<Belief> beliefs;        // mu_{k,i}
    std::vector<Belief> intermediates;  // psi_{k,i}; empty at time 0
    std::size_t time = 0;
    std::optional<Hypothesis> tau;          // shared hypothesis of the last round
    std::vector<Observation> observations;  // observations of the last round

    static NetworkState initial(std::vector<Belief> beliefs);
};

class StepError : public std::runtime_error {
   public:
    StepError(std::size_t agent, std::size_t time, const std::string& what);
    std::size_t agent() const { return agent_; }
    std::size_t time() const { return time_; }

   private:
    std::size_t agent_;
    std::size_t time_;
};

// Draws the round's observations from streams (seed, Observation, k, i).
std::vector<Observation> sample_round_observations(const SocialNetwork& network, std::uint64_t seed, std::size_t time);
// Trend draw for round i from stream (seed, Trend, 0, i); nullopt for
// protocols without a random trend.
std::optional<Hypothesis> sample_round_trend(const Protocol& protocol, std::uint64_t seed, std::size_t time);

// One synchronous round with given randomness: all agents adapt, then all
// exchange, then all combine. `tau` is required for TrendingBootstrap and
// ignored otherwise.
NetworkState advance(const NetworkState& state, const Protocol& protocol, const SocialNetwork& network,
                     const std::vector<Observation>& observations, std::optional<Hypothesis> tau);

// One round with randomness drawn from the seeded streams for time
// state.time + 1.
NetworkState step(const NetworkState& state, const Protocol& protocol, const SocialNetwork& network,
                  std::uint64_t seed);

}  // namespace social_learning
