#include "social_learning/scenarios.hpp"

#include <cmath>

#include "social_learning/numeric.hpp"

namespace social_learning::scenarios {

namespace {

std::vector<Belief> uniform_beliefs(std::size_t agents, std::size_t hypotheses) {
    return std::vector<Belief>(agents, Belief::uniform(hypotheses));
}

ExperimentConfig ten_agent_config(Protocol protocol, std::uint64_t seed, std::size_t horizon) {
    const Topology topology = ten_agent_topology();
    ExperimentConfig config{topology,
                            SocialNetwork{build_metropolis(topology), ten_agent_model(), 0},
                            std::move(protocol),
                            uniform_beliefs(10, 5),
                            horizon,
                            seed,
                            1,
                            RecordStride{},
                            false};
    config.validate();
    return config;
}

}  // namespace

Topology ten_agent_topology() {
    return Topology::undirected(10, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8}, {8, 9},
                                     {9, 0}, {0, 5}, {1, 7}, {2, 6}, {3, 8}, {4, 9}, {0, 3}, {6, 9}});
}

ObservationModel ten_agent_model() {
    const auto f = [](int n) { return 0.3 * n; };
    std::vector<AgentLikelihood> agents;
    for (int k = 0; k < 10; ++k) {
        std::vector<double> means{f(1), f(2), f(3), f(4), f(5)};
        // Look-alike of the truth for this group.
        const int twin = k < 2 ? 1 : k < 5 ? 2 : k < 7 ? 3 : 4;
        means[static_cast<std::size_t>(twin)] = f(1);
        agents.push_back(AgentLikelihood::gaussian(std::move(means)));
    }
    return ObservationModel(std::move(agents));
}

ExperimentConfig trending_never_truth(std::uint64_t seed, std::size_t horizon) {
    return ten_agent_config(TrendingBootstrap{TrendDistribution({0.0, 0.25, 0.25, 0.25, 0.25})}, seed, horizon);
}

ExperimentConfig full_sharing(std::uint64_t seed, std::size_t horizon) {
    return ten_agent_config(FullSharing{}, seed, horizon);
}

ExperimentConfig trending_truth_only(std::uint64_t seed, std::size_t horizon) {
    return ten_agent_config(TrendingBootstrap{TrendDistribution::point_mass(5, 0)}, seed, horizon);
}

ExperimentConfig uniform_fill(Hypothesis tau, std::uint64_t seed, std::size_t horizon) {
    return ten_agent_config(FixedPartial{tau}, seed, horizon);
}

ObservationModel three_agent_model() {
    return ObservationModel({AgentLikelihood::gaussian({0.0, 1.0, 2.0, 0.0}),
                             AgentLikelihood::gaussian({1.0, 0.0, 2.0, 0.0}),
                             AgentLikelihood::gaussian({1.0, 2.0, 0.0, 0.0})});
}

ExperimentConfig three_agent_equilibrium(double alpha, std::uint64_t seed, std::size_t horizon) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    const Topology topology = Topology::undirected(3, {{0, 1}, {0, 2}, {1, 2}});
    std::vector<Belief> beliefs;
    for (std::size_t k = 0; k < 3; ++k) {
        std::vector<double> logs(4, kNegInf);
        logs[3] = std::log(alpha);
        logs[k] = std::log1p(-alpha);
        beliefs.push_back(Belief::from_log(std::move(logs)));
    }
    ExperimentConfig config{topology,
                            SocialNetwork{build_metropolis(topology), three_agent_model(), 3},
                            TrendingBootstrap{TrendDistribution::point_mass(4, 3)},
                            std::move(beliefs),
                            horizon,
                            seed,
                            1,
                            RecordStride{horizon, 1},
                            true};
    config.validate();
    return config;
}

ObservationModel two_agent_model() {
    return ObservationModel({AgentLikelihood::gaussian({0.0, 0.5, 5.0}), AgentLikelihood::gaussian({0.0, 0.4, 4.0})});
}

ExperimentConfig two_agent_uniform_fill(std::uint64_t seed, std::size_t horizon) {
    const Topology topology = Topology::undirected(2, {{0, 1}});
    ExperimentConfig config{topology,
                            SocialNetwork{build_metropolis(topology), two_agent_model(), 0},
                            FixedPartial{1},
                            uniform_beliefs(2, 3),
                            horizon,
                            seed,
                            1,
                            RecordStride{},
                            false};
    config.validate();
    return config;
}

}  // namespace social_learning::scenarios
