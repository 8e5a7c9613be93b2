#include <gtest/gtest.h>

#include <map>

#include <boost/math/distributions/chi_squared.hpp>

#include "social_learning/engine.hpp"
#include "social_learning/models.hpp"
#include "social_learning/scenarios.hpp"
#include "support/oracles.hpp"

using namespace social_learning;

namespace {

Observation draw(const ObservationModel& model, std::size_t agent, std::uint64_t seed, std::size_t time) {
    Stream stream(seed, StreamKind::Observation, agent, time);
    return sample_observation(model, agent, 0, stream);
}

}  // namespace

TEST(Likelihood, RejectsInvalidFamilies) {
    EXPECT_THROW(AgentLikelihood::gaussian({0.0}), std::invalid_argument);
    EXPECT_THROW(AgentLikelihood::finite({{0.5, 0.6}, {0.5, 0.5}}), std::invalid_argument);
    EXPECT_THROW(AgentLikelihood::finite({{1.5, -0.5}, {0.5, 0.5}}), std::invalid_argument);
    EXPECT_THROW(AgentLikelihood::finite({{0.5, 0.5}, {1.0}}), std::invalid_argument);
    EXPECT_THROW(ObservationModel({AgentLikelihood::gaussian({0, 1}), AgentLikelihood::gaussian({0, 1, 2})}),
                 std::invalid_argument);
}

TEST(KL, GaussianClosedForm) {
    const auto l = AgentLikelihood::gaussian({0.3, 0.3, 0.6});
    EXPECT_EQ(l.kl_divergence(0, 1), 0.0);
    EXPECT_NEAR(l.kl_divergence(0, 2), 0.045, 1e-15);
    EXPECT_NEAR(l.kl_divergence(2, 0), oracle::gaussian_kl(0.6, 0.3), 1e-15);
}

TEST(KL, FiniteSum) {
    const auto l = AgentLikelihood::finite({{0.5, 0.5}, {0.25, 0.75}});
    EXPECT_NEAR(l.kl_divergence(0, 1), 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0), 1e-15);
    EXPECT_EQ(l.kl_divergence(1, 1), 0.0);
}

TEST(KL, FiniteSupportViolationIsDistinct) {
    const auto l = AgentLikelihood::finite({{0.5, 0.5}, {1.0, 0.0}});
    EXPECT_THROW(l.kl_divergence(0, 1), InfiniteDivergence);
    EXPECT_NEAR(l.kl_divergence(1, 0), std::log(2.0), 1e-15);  // 0 log 0 = 0
    ObservationModel model({l});
    try {
        model.require_finite_informativeness(0);
        ADD_FAILURE() << "expected a support violation";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("agent 0"), std::string::npos);
    }
    EXPECT_NO_THROW(model.require_finite_informativeness(1));
}

TEST(KL, MatchesMonteCarloWithinThreeStandardErrors) {
    const auto l = AgentLikelihood::gaussian({0.3, 0.9});
    Stream stream(42, StreamKind::Check, 0, 0);
    const int n = 100000;
    double mean = 0.0;
    double m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto x = l.sample(0, stream);
        const double r = l.log_likelihood(x, 0) - l.log_likelihood(x, 1);
        const double d = r - mean;
        mean += d / (i + 1);
        m2 += d * (r - mean);
    }
    const double se = std::sqrt(m2 / (n - 1) / n);
    EXPECT_LT(std::abs(mean - l.kl_divergence(0, 1)), 3.0 * se);
}

TEST(AverageLikelihood, Examples) {
    const auto two = AgentLikelihood::gaussian({0.0, 1.0});
    EXPECT_DOUBLE_EQ(two.average_likelihood(0, 0.4), two.likelihood(0.4, 1));

    const auto same = AgentLikelihood::finite({{0.2, 0.8}, {0.2, 0.8}, {0.2, 0.8}});
    EXPECT_NEAR(same.average_likelihood(1, std::size_t{1}), 0.8, 1e-15);

    // Ten-agent model, agent 3 (means f1, f2, f1, f4, f5), tau = hypothesis 1.
    const auto model = scenarios::ten_agent_model();
    const auto& agent = model.agent(2);
    const double expected = (oracle::gaussian_density(0.0, 0.6) + oracle::gaussian_density(0.0, 0.3) +
                             oracle::gaussian_density(0.0, 1.2) + oracle::gaussian_density(0.0, 1.5)) /
                            4.0;
    EXPECT_NEAR(agent.average_likelihood(0, 0.0), expected, 1e-15);
}

TEST(Identifiability, TenAgentModel) {
    const auto entries = check_global_identifiability(scenarios::ten_agent_model(), 0);
    ASSERT_EQ(entries.size(), 4u);
    for (const auto& e : entries) {
        EXPECT_TRUE(e.identifiable);
        ASSERT_TRUE(e.witness.has_value());
        EXPECT_GT(scenarios::ten_agent_model().agent(*e.witness).kl_divergence(0, e.hypothesis), 1e-12);
    }
    // Hypothesis 2 is invisible to agents 0 and 1 only.
    EXPECT_EQ(entries[0].distinguishing_agents, (std::vector<std::size_t>{2, 3, 4, 5, 6, 7, 8, 9}));
}

TEST(Identifiability, IdenticalRowsAreNotIdentifiable) {
    ObservationModel model({AgentLikelihood::gaussian({1.0, 1.0, 1.0}), AgentLikelihood::gaussian({0.0, 0.0, 0.0})});
    for (const auto& e : check_global_identifiability(model, 0)) {
        EXPECT_FALSE(e.identifiable);
        EXPECT_FALSE(e.witness.has_value());
    }
}

TEST(Identifiability, ThreeAgentModelHasTwoWitnessesEach) {
    const auto entries = check_global_identifiability(scenarios::three_agent_model(), 3);
    ASSERT_EQ(entries.size(), 3u);
    for (const auto& e : entries) {
        EXPECT_TRUE(e.identifiable);
        EXPECT_EQ(e.distinguishing_agents.size(), 2u);
    }
}

TEST(Sampling, PointMassAlwaysSameSymbol) {
    const auto l = AgentLikelihood::finite({{0, 0, 1, 0}, {0.25, 0.25, 0.25, 0.25}});
    for (int t = 0; t < 100; ++t) {
        Stream s(5, StreamKind::Observation, 0, static_cast<std::uint64_t>(t));
        EXPECT_EQ(std::get<std::size_t>(l.sample(0, s)), 2u);
    }
}

TEST(Sampling, DeterministicPerAgentAndTime) {
    const auto model = scenarios::ten_agent_model();
    const auto a = draw(model, 3, 99, 17);
    const auto b = draw(model, 3, 99, 17);
    EXPECT_EQ(std::get<double>(a), std::get<double>(b));
    EXPECT_NE(std::get<double>(a), std::get<double>(draw(model, 4, 99, 17)));
    EXPECT_NE(std::get<double>(a), std::get<double>(draw(model, 3, 99, 18)));
}

TEST(Sampling, GaussianLawOfLargeNumbers) {
    const auto model = scenarios::ten_agent_model();
    double sum = 0.0;
    const int n = 100000;
    for (int t = 0; t < n; ++t) sum += std::get<double>(draw(model, 0, 3, static_cast<std::size_t>(t)));
    EXPECT_NEAR(sum / n, 0.3, 0.01);
}

TEST(Sampling, AgentsAtSameTimeAreUncorrelated) {
    const auto model = scenarios::ten_agent_model();
    const int n = 50000;
    double sxy = 0.0;
    for (int t = 0; t < n; ++t) {
        const double x = std::get<double>(draw(model, 0, 8, static_cast<std::size_t>(t))) - 0.3;
        const double y = std::get<double>(draw(model, 1, 8, static_cast<std::size_t>(t))) - 0.3;
        sxy += x * y;
    }
    EXPECT_LT(std::abs(sxy / n), 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST(Trend, ValidatesPmf) {
    EXPECT_THROW(TrendDistribution({0.5, 0.4}), std::invalid_argument);
    EXPECT_THROW(TrendDistribution({1.1, -0.1}), std::invalid_argument);
    EXPECT_NO_THROW(TrendDistribution({0.0, 1.0}));
}

TEST(Trend, PointMass) {
    const auto trend = TrendDistribution::point_mass(5, 0);
    for (int t = 0; t < 200; ++t) {
        Stream s(3, StreamKind::Trend, 0, static_cast<std::uint64_t>(t));
        EXPECT_EQ(sample_trend(trend, s), 0u);
    }
}

TEST(Trend, NeverTruthFrequencies) {
    const TrendDistribution trend({0.0, 0.25, 0.25, 0.25, 0.25});
    std::vector<int> counts(5, 0);
    const int n = 100000;
    for (int t = 0; t < n; ++t) {
        Stream s(9, StreamKind::Trend, 0, static_cast<std::uint64_t>(t));
        ++counts[sample_trend(trend, s)];
    }
    EXPECT_EQ(counts[0], 0);
    for (int h = 1; h < 5; ++h) EXPECT_NEAR(counts[h] / static_cast<double>(n), 0.25, 0.01);
}

TEST(Trend, UniformPassesChiSquare) {
    const auto trend = TrendDistribution::uniform(4);
    std::vector<double> counts(4, 0.0);
    const int n = 100000;
    for (int t = 0; t < n; ++t) {
        Stream s(21, StreamKind::Trend, 0, static_cast<std::uint64_t>(t));
        counts[sample_trend(trend, s)] += 1.0;
    }
    double stat = 0.0;
    for (double c : counts) stat += (c - n / 4.0) * (c - n / 4.0) / (n / 4.0);
    const boost::math::chi_squared_distribution<double> dist(3.0);
    EXPECT_GT(boost::math::cdf(boost::math::complement(dist, stat)), 1e-3);
}

TEST(ComplementMixture, FiniteIsExact) {
    const auto l = AgentLikelihood::finite({{0.5, 0.5}, {0.25, 0.75}, {0.75, 0.25}});
    const auto q = kl_to_complement_mixture(l, 0, 1);
    // Mixture of rows 0 and 2.
    EXPECT_NEAR(q.value, oracle::finite_kl({0.5, 0.5}, {0.625, 0.375}), 1e-15);
    EXPECT_EQ(q.error_estimate, 0.0);
}

TEST(ComplementMixture, TwoHypothesesDegeneratesToPlainKL) {
    const auto l = AgentLikelihood::gaussian({0.0, 0.8});
    const auto q = kl_to_complement_mixture(l, 0, 0);
    EXPECT_NEAR(q.value, l.kl_divergence(0, 1), 1e-9);
    EXPECT_LT(q.error_estimate, 1e-6);
}

TEST(ComplementMixture, GaussianMatchesMonteCarlo) {
    const auto l = AgentLikelihood::gaussian({0.0, 0.5, 5.0});
    const auto q = kl_to_complement_mixture(l, 0, 1);
    EXPECT_LT(q.error_estimate, 1e-6);
    Stream s(77, StreamKind::Check, 1, 0);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = s.normal();
        const double mix = 0.5 * (oracle::gaussian_density(x, 0.0) + oracle::gaussian_density(x, 5.0));
        sum += std::log(oracle::gaussian_density(x, 0.0) / mix);
    }
    EXPECT_NEAR(q.value, sum / n, 5e-3);
}
