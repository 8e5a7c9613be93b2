// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "social_learning/checks.hpp"
#include "social_learning/engine.hpp"
#include "social_learning/output.hpp"
#include "social_learning/scenarios.hpp"
#include "support/oracles.hpp"
#include "support/random_instances.hpp"

using namespace social_learning;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

// d_ave(h) for the ten-agent model from the Gaussian KL closed form and v = 1/10.
double oracle_rate(const ExperimentConfig& config, Hypothesis h) {
    double d = 0.0;
    for (std::size_t k = 0; k < config.num_agents(); ++k) {
        const auto& means = config.network.model.agent(k).gaussian_family()->means;
        d -= oracle::gaussian_kl(means[0], means[h]) / static_cast<double>(config.num_agents());
    }
    return d;
}

double empirical_rate(const TraceRecord& last, std::size_t agent, Hypothesis h) {
    return (last.beliefs[agent].log(h) - last.beliefs[agent].log(0)) / static_cast<double>(last.time);
}

Outcome rate_reproduction() {
    const auto config = scenarios::trending_never_truth(kSeed, 3000);
    const auto last = run_single(config, kSeed).last();
    double worst = 0.0;
    std::string per;
    for (Hypothesis h = 1; h < 5; ++h) {
        const double d = oracle_rate(config, h);
        double w = 0.0;
        for (std::size_t k = 0; k < 10; ++k) w = std::max(w, std::abs(empirical_rate(last, k, h) - d) / std::abs(d));
        per += " h" + std::to_string(h + 1) + "(d_ave " + num(d) + ")=" + num(w);
        worst = std::max(worst, w);
    }
    return {worst < 0.05, "max relative error " + num(worst) + " < 0.05;" + per};
}

Outcome truth_learning() {
    const auto last = run_single(scenarios::trending_never_truth(kSeed, 2000), kSeed).last();
    double low = 1.0;
    for (const auto& b : last.beliefs) low = std::min(low, b.prob(0));
    return {low > 0.99, "min mu_T(truth) " + num(low) + " > 0.99 at T=2000"};
}

Outcome protocol_equivalence() {
    const auto trending = run_single(scenarios::trending_never_truth(kSeed, 3000), kSeed).last();
    const auto full = run_single(scenarios::full_sharing(kSeed, 3000), kSeed).last();
    double worst = 0.0;
    for (Hypothesis h = 1; h < 5; ++h) {
        for (std::size_t k = 0; k < 10; ++k) {
            const double f = empirical_rate(full, k, h);
            worst = std::max(worst, std::abs(empirical_rate(trending, k, h) - f) / std::abs(f));
        }
    }
    return {worst < 0.02, "max relative disagreement " + num(worst) + " < 0.02 at T=3000"};
}

Outcome supermartingale() {
    const auto config = scenarios::trending_never_truth(kSeed, 2000);
    SupermartingaleOptions options;
    options.states = 20;
    options.branches = 1000;
    const auto report = check_supermartingale(config, kSeed, options);
    options.flipped = true;
    const auto control = check_supermartingale(config, kSeed, options);
    return {report.passed() && !control.passed(),
            "max (estimate - Q_prev - 3SE) " + num(report.statistic) + " <= 0 over 20 states x 1000 branches; "
            "flipped control " + (control.passed() ? "passed (unexpected)" : "fails as expected")};
}

Outcome fixed_point() {
    double worst = 0.0;
    std::size_t runs = 0;
    for (double alpha : {0.1, 0.3, 0.5}) {
        for (std::uint64_t r = 0; r < 10; ++r) {
            const std::uint64_t seed = derive_seed(kSeed, StreamKind::Check, r, 0);
            const auto config = scenarios::three_agent_equilibrium(alpha, seed, 100);
            auto dense = config;
            dense.stride = RecordStride{100, 1};
            const auto trace = run_single(dense, seed);
            for (const auto& rec : trace.records) {
                for (std::size_t k = 0; k < 3; ++k) {
                    for (Hypothesis h = 0; h < 4; ++h) {
                        worst = std::max(worst, std::abs(rec.beliefs[k].prob(h) - config.initial_beliefs[k].prob(h)));
                    }
                }
            }
            ++runs;
        }
    }
    return {worst <= 1e-10, "max entry drift " + num(worst) + " <= 1e-10 over " + std::to_string(runs) + " runs x 100 steps"};
}

Outcome no_mislearning() {
    auto config = scenarios::trending_truth_only(kSeed, 5000);
    config.stride = RecordStride{5000, 1};
    const auto trace = run_single(config, kSeed);
    double low = 1.0;
    double high = 0.0;
    for (const auto& rec : trace.records) {
        for (const auto& b : rec.beliefs) {
            low = std::min(low, b.prob(0));
            for (Hypothesis h = 1; h < 5; ++h) high = std::max(high, b.prob(h));
        }
    }
    return {low > 0.01 && high <= 0.99,
            "min mu(truth) " + num(low) + " > 0.01; max wrong belief " + num(high) + " <= 0.99 over T=5000"};
}

Outcome mislearning_contrast() {
    const auto config = scenarios::two_agent_uniform_fill(kSeed, 400);
    const Hypothesis tau = std::get<FixedPartial>(config.protocol).tau;
    const auto c = evaluate_mislearning_condition(config.network.model, config.network.combination.perron(), 0, tau);
    // The shared side has a closed form.
    double shared = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& means = config.network.model.agent(k).gaussian_family()->means;
        shared += config.network.combination.perron()[static_cast<Eigen::Index>(k)] * oracle::gaussian_kl(means[0], means[tau]);
    }
    const auto last = run_single(config, kSeed).last();
    double low = 1.0;
    for (const auto& b : last.beliefs) low = std::min(low, b.prob(tau));
    const bool ok = c.holds && std::abs(c.shared_side - shared) < 1e-12 && c.quadrature_error < 1e-6 && low > 0.99;
    return {ok, "shared side " + num(c.shared_side) + " < complement side " + num(c.complement_side) +
                    " (quadrature error " + num(c.quadrature_error) + "); min mu_T(tau) " + num(low) + " > 0.99"};
}

Outcome matrix_products() {
    const auto a = build_metropolis(scenarios::ten_agent_topology());
    const auto report = check_matrix_product_lemmas(a, 0.25, kSeed);
    std::string detail;
    for (const auto& p : report.parts) {
        detail += (detail.empty() ? "" : "; ") + p.name + " " + num(p.statistic) + " " + p.comparison + " " + num(p.tolerance);
    }
    return {report.passed(), detail};
}

// Property suites against the linear-domain oracles.
Outcome properties() {
    using namespace random_instances;
    std::mt19937_64 rng(kSeed);
    std::vector<std::string> failures;
    const auto expect = [&](bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    };

    // Normalization after every fusion, all protocols.
    {
        const auto net = random_network(5, 4, rng);
        double worst = 0.0;
        for (const Protocol& protocol :
             {Protocol{FullSharing{}}, Protocol{FixedPartial{2}}, Protocol{TrendingBootstrap{TrendDistribution::uniform(4)}}}) {
            auto state = NetworkState::initial(random_beliefs(5, 4, rng));
            for (int t = 0; t < 200; ++t) {
                state = step(state, protocol, net, kSeed);
                for (const auto& b : state.beliefs) worst = std::max(worst, b.normalization_error());
            }
        }
        expect(worst < 1e-10, "normalization " + num(worst));
    }
    // Support of a geometric fusion is the intersection of supports.
    {
        bool ok = true;
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<Belief> bs;
            std::vector<bool> support(4, true);
            for (int l = 0; l < 3; ++l) {
                auto p = random_pmf(4, rng);
                p[static_cast<std::size_t>((trial + l) % 4)] = 0.0;
                p[static_cast<std::size_t>(trial % 3 == 0 ? 3 : 0)] += 0.1;
                p = oracle::normalize(p);
                for (std::size_t h = 0; h < 4; ++h) support[h] = support[h] && p[h] > 0.0;
                bs.push_back(Belief::from_probabilities(p));
            }
            if (std::none_of(support.begin(), support.end(), [](bool s) { return s; })) continue;
            const auto out = combine_geometric(bs, std::vector<double>{0.2, 0.3, 0.5});
            for (std::size_t h = 0; h < 4; ++h) ok = ok && ((out.prob(h) > 0.0) == support[h]);
        }
        expect(ok, "support intersection");
    }
    // Full sharing: x_i = A^T (x_{i-1} + lambda_i) over 50 random steps.
    {
        const auto net = random_network(4, 3, rng);
        auto s = NetworkState::initial(random_beliefs(4, 3, rng));
        const Eigen::MatrixXd at = net.combination.entries().transpose();
        Eigen::VectorXd x(4);
        for (Eigen::Index k = 0; k < 4; ++k) x[k] = s.beliefs[static_cast<std::size_t>(k)].log(1) - s.beliefs[static_cast<std::size_t>(k)].log(0);
        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            s = step(s, FullSharing{}, net, kSeed);
            Eigen::VectorXd innovation(4);
            for (Eigen::Index k = 0; k < 4; ++k) {
                const auto& m = net.model.agent(static_cast<std::size_t>(k));
                const auto& obs = s.observations[static_cast<std::size_t>(k)];
                innovation[k] = std::log(m.likelihood(obs, 1) / m.likelihood(obs, 0));
            }
            x = at * (x + innovation);
            for (Eigen::Index k = 0; k < 4; ++k) {
                const auto& b = s.beliefs[static_cast<std::size_t>(k)];
                worst = std::max(worst, std::abs(b.log(1) - b.log(0) - x[k]));
            }
        }
        expect(worst < 1e-10, "full-sharing recursion " + num(worst));
    }
    // Trending: one step against the brute-force bootstrap fusion, and the
    // effective-matrix identity on the log-ratios.
    {
        double worst = 0.0;
        for (int trial = 0; trial < 40; ++trial) {
            const auto net = random_network(4, 4, rng);
            const auto state = NetworkState::initial(random_beliefs(4, 4, rng));
            const auto obs = sample_round_observations(net, static_cast<std::uint64_t>(trial), 1);
            const Hypothesis tau = static_cast<Hypothesis>(trial % 4);
            const auto next = advance(state, TrendingBootstrap{TrendDistribution::uniform(4)}, net, obs, tau);
            std::vector<std::vector<double>> psi;
            for (const auto& b : next.intermediates) psi.push_back(b.probabilities());
            const auto& a = net.combination.entries();
            const auto brute = oracle::combine_step(psi, a, oracle::Fill::Bootstrap, tau);
            for (std::size_t k = 0; k < 4; ++k) {
                for (Hypothesis h = 1; h < 4; ++h) {
                    worst = std::max(worst, std::abs(next.beliefs[k].log(h) - next.beliefs[k].log(0) -
                                                     std::log(brute[k][h] / brute[k][0])));
                    const double c = (tau == 0 ? 1.0 : 0.0) - (tau == h ? 1.0 : 0.0);
                    double expected = 0.0;
                    for (std::size_t l = 0; l < 4; ++l) {
                        const double w = a(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k));
                        const double eff = tau == h ? w : (l == k ? 1.0 : 0.0);
                        expected += eff * std::log(psi[l][h] / psi[l][0]) + c * w * std::log(psi[k][0] / psi[l][0]);
                    }
                    worst = std::max(worst, std::abs(next.beliefs[k].log(h) - next.beliefs[k].log(0) - expected));
                }
            }
        }
        expect(worst < 1e-10, "trending effective-matrix identity " + num(worst));
    }
    // Relabeling hypotheses relabels every belief.
    {
        const std::vector<std::size_t> perm{2, 0, 3, 1};
        const auto net = random_network(4, 4, rng);
        std::vector<AgentLikelihood> models;
        for (std::size_t k = 0; k < 4; ++k) {
            const auto& means = net.model.agent(k).gaussian_family()->means;
            std::vector<double> m(4);
            for (std::size_t h = 0; h < 4; ++h) m[perm[h]] = means[h];
            models.push_back(AgentLikelihood::gaussian(m));
        }
        const SocialNetwork relabeled{net.combination, ObservationModel(models), perm[net.truth]};
        const auto init = random_beliefs(4, 4, rng);
        std::vector<Belief> init_perm;
        for (const auto& b : init) {
            std::vector<double> lg(4);
            for (std::size_t h = 0; h < 4; ++h) lg[perm[h]] = b.log(h);
            init_perm.push_back(Belief::from_log(lg));
        }
        auto a = NetworkState::initial(init);
        auto b = NetworkState::initial(init_perm);
        const Protocol protocol = TrendingBootstrap{TrendDistribution::uniform(4)};
        double worst = 0.0;
        for (std::size_t t = 1; t <= 50; ++t) {
            const auto obs = sample_round_observations(net, kSeed, t);
            const auto tau = *sample_round_trend(protocol, kSeed, t);
            a = advance(a, protocol, net, obs, tau);
            b = advance(b, protocol, relabeled, obs, perm[tau]);
            for (std::size_t k = 0; k < 4; ++k) {
                for (std::size_t h = 0; h < 4; ++h) worst = std::max(worst, std::abs(a.beliefs[k].log(h) - b.beliefs[k].log(perm[h])));
            }
        }
        expect(worst < 1e-9, "permutation equivariance " + num(worst));
    }
    // Same seed, same bytes.
    {
        const auto config = scenarios::trending_never_truth(7, 200);
        std::ostringstream x;
        std::ostringstream y;
        write_trace_csv(x, run_single(config, 7));
        write_trace_csv(y, run_single(config, 7));
        expect(x.str() == y.str(), "trace reproducibility");
    }

    if (failures.empty()) {
        return {true, "normalization, support intersection, full-sharing recursion, trending identity, "
                      "permutation equivariance, reproducibility"};
    }
    std::string detail = "failed:";
    for (const auto& f : failures) detail += " [" + f + "]";
    return {false, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"rate reproduction", rate_reproduction},
        {"truth learning without truth sharing", truth_learning},
        {"protocol-rate equivalence", protocol_equivalence},
        {"network loss supermartingale", supermartingale},
        {"zero-belief fixed point", fixed_point},
        {"no mislearning with truth always trending", no_mislearning},
        {"uniform-fill mislearning contrast", mislearning_contrast},
        {"random matrix products", matrix_products},
        {"property suites", properties},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): " << o.detail
                  << '\n';
    }
    std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
