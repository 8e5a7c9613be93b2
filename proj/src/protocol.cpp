#include "social_learning/protocol.hpp"

#include <sstream>

namespace social_learning {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string with_context(std::size_t agent, std::size_t time, const std::string& what) {
    std::ostringstream msg;
    msg << "agent " << agent << ", time " << time << ": " << what;
    return msg.str();
}

}  // namespace

std::string protocol_name(const Protocol& protocol) {
    return std::visit(Overloaded{[](const FullSharing&) { return std::string("full"); },
                                 [](const FixedPartial&) { return std::string("fixed_partial"); },
                                 [](const TrendingBootstrap&) { return std::string("trending"); }},
                      protocol);
}

void validate_protocol(const Protocol& protocol, std::size_t hypotheses) {
    std::visit(Overloaded{[](const FullSharing&) {},
                          [&](const FixedPartial& p) {
                              if (p.tau >= hypotheses) throw std::invalid_argument("fixed shared hypothesis out of range");
                          },
                          [&](const TrendingBootstrap& p) {
                              if (p.trend.size() != hypotheses) {
                                  throw std::invalid_argument("trend distribution has " + std::to_string(p.trend.size()) +
                                                              " entries, expected " + std::to_string(hypotheses));
                              }
                          }},
               protocol);
}

bool is_trending(const Protocol& protocol) { return std::holds_alternative<TrendingBootstrap>(protocol); }

void validate_network(const SocialNetwork& network) {
    if (network.combination.size() != network.model.num_agents()) {
        throw std::invalid_argument("combination matrix has " + std::to_string(network.combination.size()) +
                                    " agents but the observation model has " +
                                    std::to_string(network.model.num_agents()));
    }
    network.model.require_finite_informativeness(network.truth);
}

NetworkState NetworkState::initial(std::vector<Belief> beliefs) {
    NetworkState s;
    s.beliefs = std::move(beliefs);
    return s;
}

StepError::StepError(std::size_t agent, std::size_t time, const std::string& what)
    : std::runtime_error(with_context(agent, time, what)), agent_(agent), time_(time) {}

std::vector<Observation> sample_round_observations(const SocialNetwork& network, std::uint64_t seed, std::size_t time) {
    std::vector<Observation> out;
    out.reserve(network.num_agents());
    for (std::size_t k = 0; k < network.num_agents(); ++k) {
        Stream stream(seed, StreamKind::Observation, k, time);
        out.push_back(sample_observation(network.model, k, network.truth, stream));
    }
    return out;
}

std::optional<Hypothesis> sample_round_trend(const Protocol& protocol, std::uint64_t seed, std::size_t time) {
    const auto* trending = std::get_if<TrendingBootstrap>(&protocol);
    if (trending == nullptr) return std::nullopt;
    Stream stream(seed, StreamKind::Trend, 0, time);
    return sample_trend(trending->trend, stream);
}

NetworkState advance(const NetworkState& state, const Protocol& protocol, const SocialNetwork& network,
                     const std::vector<Observation>& observations, std::optional<Hypothesis> tau) {
    const std::size_t agents = network.num_agents();
    const std::size_t time = state.time + 1;
    if (state.beliefs.size() != agents || observations.size() != agents) {
        throw StepError(0, time, "state, observations and network disagree on the number of agents");
    }

    NetworkState next;
    next.time = time;
    next.observations = observations;
    next.intermediates.reserve(agents);

    // Adapt.
    for (std::size_t k = 0; k < agents; ++k) {
        try {
            const auto row = network.model.agent(k).log_likelihood_row(observations[k]);
            next.intermediates.push_back(local_bayes_update(state.beliefs[k], row));
        } catch (const std::exception& e) {
            throw StepError(k, time, e.what());
        }
    }

    // Exchange and combine.
    const auto& psi = next.intermediates;
    next.beliefs.reserve(agents);
    for (std::size_t k = 0; k < agents; ++k) {
        try {
            std::visit(Overloaded{
                           [&](const FullSharing&) { next.beliefs.push_back(combine_full(psi, network.combination, k)); },
                           [&](const FixedPartial& p) {
                               const auto& hood = network.combination.neighbors(k);
                               std::vector<Belief> completed;
                               std::vector<double> weights;
                               for (std::size_t l : hood) {
                                   completed.push_back(fill_uniform(share(psi[l], p.tau), network.hypotheses()));
                                   weights.push_back(network.combination.weight(l, k));
                               }
                               next.beliefs.push_back(combine_geometric(completed, weights));
                           },
                           [&](const TrendingBootstrap&) {
                               if (!tau) throw BeliefError("trending round without a shared hypothesis");
                               const auto& hood = network.combination.neighbors(k);
                               std::vector<Belief> completed;
                               std::vector<double> weights;
                               for (std::size_t l : hood) {
                                   // Own intermediate belief is used as is.
                                   completed.push_back(l == k ? psi[k] : bootstrap_fill(psi[k], share(psi[l], *tau)));
                                   weights.push_back(network.combination.weight(l, k));
                               }
                               next.beliefs.push_back(combine_geometric(completed, weights));
                           }},
                       protocol);
        } catch (const StepError&) {
            throw;
        } catch (const std::exception& e) {
            throw StepError(k, time, e.what());
        }
    }

    if (const auto* fixed = std::get_if<FixedPartial>(&protocol)) {
        next.tau = fixed->tau;
    } else if (is_trending(protocol)) {
        next.tau = tau;
    }
    return next;
}

NetworkState step(const NetworkState& state, const Protocol& protocol, const SocialNetwork& network, std::uint64_t seed) {
    const std::size_t time = state.time + 1;
    return advance(state, protocol, network, sample_round_observations(network, seed, time),
                   sample_round_trend(protocol, seed, time));
}

}  // namespace social_learning
