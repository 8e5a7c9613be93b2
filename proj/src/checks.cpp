#include "social_learning/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "social_learning/numeric.hpp"
#include "social_learning/output.hpp"
#include "social_learning/scenarios.hpp"

namespace social_learning {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

CheckReport make_report(std::string name, std::uint64_t seed) {
    CheckReport r;
    r.name = std::move(name);
    r.seed = seed;
    return r;
}

void set_status(CheckReport& r, bool ok) { r.status = ok ? CheckStatus::Pass : CheckStatus::Fail; }

// Overall status from the parts; skipped parts do not count either way.
void combine_parts(CheckReport& r) {
    bool any = false;
    bool ok = true;
    for (const auto& p : r.parts) {
        if (p.status == CheckStatus::Skipped) continue;
        any = true;
        ok = ok && p.passed();
    }
    r.status = !any ? CheckStatus::Skipped : ok ? CheckStatus::Pass : CheckStatus::Fail;
}

double trend_prob(const Protocol& protocol, Hypothesis h) {
    if (const auto* t = std::get_if<TrendingBootstrap>(&protocol)) return t->trend.prob(h);
    return 1.0;
}

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

double spectral_norm(const Eigen::MatrixXd& m) {
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

ExperimentConfig with_protocol(ExperimentConfig config, Protocol protocol) {
    config.protocol = std::move(protocol);
    return config;
}

ExperimentConfig single_agent(std::uint64_t seed, std::size_t horizon) {
    ExperimentConfig config{Topology(1),
                            SocialNetwork{build_metropolis(Topology(1)),
                                          ObservationModel({AgentLikelihood::gaussian({0.3, 0.6, 0.9, 1.2, 1.5})}), 0},
                            TrendingBootstrap{TrendDistribution::uniform(5)},
                            {Belief::uniform(5)},
                            horizon,
                            seed,
                            1,
                            RecordStride{},
                            false};
    config.validate();
    return config;
}

}  // namespace

std::string status_name(CheckStatus status) {
    switch (status) {
        case CheckStatus::Pass: return "PASS";
        case CheckStatus::Fail: return "FAIL";
        case CheckStatus::Skipped: return "SKIP";
    }
    return "?";
}

nlohmann::json report_json(const CheckReport& report) {
    nlohmann::json j;
    j["name"] = report.name;
    j["status"] = status_name(report.status);
    j["statistic"] = std::isfinite(report.statistic) ? nlohmann::json(report.statistic)
                                                      : nlohmann::json(format_double(report.statistic));
    j["tolerance"] = report.tolerance;
    j["comparison"] = report.comparison;
    j["seed"] = report.seed;
    j["samples"] = nlohmann::json::object();
    for (const auto& [what, n] : report.samples) j["samples"][what] = n;
    j["details"] = report.details;
    if (!report.note.empty()) j["note"] = report.note;
    if (!report.parts.empty()) {
        j["parts"] = nlohmann::json::array();
        for (const auto& p : report.parts) j["parts"].push_back(report_json(p));
    }
    return j;
}

std::string report_summary(const CheckReport& report) {
    std::ostringstream out;
    const auto line = [&](const CheckReport& r, const std::string& indent) {
        out << indent << status_name(r.status) << ' ' << r.name;
        if (r.status != CheckStatus::Skipped && !r.comparison.empty()) {
            out << ": " << fmt(r.statistic) << ' ' << r.comparison << ' ' << fmt(r.tolerance);
        }
        out << '\n';
        if (r.status == CheckStatus::Fail) {
            for (const auto& d : r.details) out << indent << "    " << d << '\n';
        }
    };
    line(report, "");
    for (const auto& p : report.parts) line(p, "  ");
    return out.str();
}

CheckReport check_rate_convergence(const ExperimentConfig& config, std::optional<Hypothesis> hypothesis,
                                   double tolerance) {
    const auto& net = config.network;
    std::vector<Hypothesis> targets;
    if (hypothesis) {
        targets.push_back(*hypothesis);
    } else {
        for (Hypothesis h = 0; h < config.hypotheses(); ++h) {
            if (h != net.truth) targets.push_back(h);
        }
    }
    const auto rates = asymptotic_rates(net.model, net.combination.perron(), net.truth);

    auto report = make_report("rate_convergence", config.seed);
    report.samples = {{"horizon", config.horizon}, {"agents", config.num_agents()}};
    std::optional<RunTrace> trace;
    for (Hypothesis h : targets) {
        auto part = make_report("rate_convergence h=" + std::to_string(h + 1), config.seed);
        part.tolerance = tolerance;
        part.comparison = "<";
        if (h == net.truth) {
            part.status = CheckStatus::Skipped;
            part.note = "rate at the true hypothesis is 0 by definition";
        } else if (trend_prob(config.protocol, h) <= 0.0) {
            part.status = CheckStatus::Skipped;
            part.note = "hypothesis is never shared";
        } else if (rates[h] == 0.0) {
            part.status = CheckStatus::Skipped;
            part.note = "hypothesis is not identifiable";
        } else {
            if (!trace) trace = run_single(config, config.seed);
            const auto& last = trace->last();
            const double t = static_cast<double>(last.time);
            double worst = 0.0;
            std::size_t worst_agent = 0;
            for (std::size_t k = 0; k < last.beliefs.size(); ++k) {
                const double measured = log_belief_ratio(last.beliefs[k], h, net.truth) / t;
                const double rel = std::abs(measured - rates[h]) / std::abs(rates[h]);
                if (!(rel <= worst)) {
                    worst = rel;
                    worst_agent = k;
                }
                part.details.push_back("agent " + std::to_string(k) + ": r/T = " + fmt(measured) +
                                       ", d_ave = " + fmt(rates[h]) + ", relative error " + fmt(rel));
            }
            part.statistic = worst;
            set_status(part, worst < tolerance);
            part.details.insert(part.details.begin(), "worst agent " + std::to_string(worst_agent));
        }
        report.parts.push_back(std::move(part));
    }
    if (report.parts.size() == 1) {
        auto single = std::move(report.parts.front());
        single.name = "rate_convergence";
        single.samples = report.samples;
        return single;
    }
    combine_parts(report);
    report.comparison = "<";
    report.tolerance = tolerance;
    for (const auto& p : report.parts) {
        if (p.status != CheckStatus::Skipped) report.statistic = std::max(report.statistic, p.statistic);
    }
    return report;
}

CheckReport check_protocol_equivalence(const ExperimentConfig& config, double tolerance) {
    const auto& net = config.network;
    const auto trace = run_single(config, config.seed);
    const auto full = run_single(with_protocol(config, FullSharing{}), config.seed);
    const double t = static_cast<double>(trace.last().time);

    auto report = make_report("protocol_equivalence", config.seed);
    report.samples = {{"horizon", config.horizon}, {"agents", config.num_agents()}};
    report.tolerance = tolerance;
    report.comparison = "<";
    for (Hypothesis h = 0; h < config.hypotheses(); ++h) {
        if (h == net.truth) continue;
        auto part = make_report("protocol_equivalence h=" + std::to_string(h + 1), config.seed);
        part.tolerance = tolerance;
        part.comparison = "<";
        double worst = 0.0;
        for (std::size_t k = 0; k < config.num_agents(); ++k) {
            const double a = log_belief_ratio(trace.last().beliefs[k], h, net.truth) / t;
            const double b = log_belief_ratio(full.last().beliefs[k], h, net.truth) / t;
            const double rel = std::abs(a - b) / std::abs(b);
            if (!(rel <= worst)) worst = rel;
            part.details.push_back("agent " + std::to_string(k) + ": " + protocol_name(config.protocol) + " " +
                                   fmt(a) + ", full " + fmt(b) + ", relative difference " + fmt(rel));
        }
        part.statistic = worst;
        set_status(part, worst < tolerance);
        report.statistic = std::max(report.statistic, worst);
        report.parts.push_back(std::move(part));
    }
    combine_parts(report);
    return report;
}

CheckReport check_truth_learning(const ExperimentConfig& config, double threshold) {
    const auto trace = run_single(config, config.seed);
    auto report = make_report("truth_learning", config.seed);
    report.samples = {{"horizon", config.horizon}, {"agents", config.num_agents()}};
    report.tolerance = threshold;
    report.comparison = ">";
    double lowest = 1.0;
    for (std::size_t k = 0; k < config.num_agents(); ++k) {
        const double p = trace.last().beliefs[k].prob(config.network.truth);
        lowest = std::min(lowest, p);
        if (!(p > threshold)) {
            report.details.push_back("agent " + std::to_string(k) + " ends at " + fmt(p) + " on the truth");
        }
    }
    report.statistic = lowest;
    set_status(report, lowest > threshold);
    return report;
}

CheckReport check_supermartingale(const ExperimentConfig& config, std::uint64_t seed,
                                  const SupermartingaleOptions& options) {
    if (!is_trending(config.protocol)) throw std::invalid_argument("supermartingale check needs the trending protocol");
    if (options.states == 0 || options.branches < 2 || options.prefix < 2) {
        throw std::invalid_argument("supermartingale check needs states, at least 2 branches and a prefix >= 2");
    }
    auto prefix_config = config;
    prefix_config.horizon = options.prefix;
    const auto states = simulate_states(prefix_config, config.seed);
    const auto& net = config.network;
    const auto& perron = net.combination.perron();

    auto report = make_report(options.flipped ? "supermartingale_flipped" : "supermartingale", seed);
    report.samples = {{"frozen_states", options.states}, {"branches", options.branches}};
    report.tolerance = 0.0;
    report.comparison = "<=";
    report.statistic = -kInf;
    bool ok = true;
    for (std::size_t s = 0; s < options.states; ++s) {
        const std::size_t t = 1 + s * (options.prefix - 1) / options.states;
        const auto& frozen = states[t];
        const double q_prev = network_loss(frozen.beliefs, perron, net.truth);
        double mean = 0.0;
        double m2 = 0.0;
        for (std::size_t b = 0; b < options.branches; ++b) {
            const std::uint64_t key = derive_seed(seed, StreamKind::Branch, s * options.branches + b, t);
            const auto obs = sample_round_observations(net, key, t + 1);
            const auto tau = sample_round_trend(config.protocol, key, t + 1);
            const auto next = advance(frozen, config.protocol, net, obs, tau);
            const double q = network_loss(next.beliefs, perron, net.truth);
            // Welford running moments.
            const double delta = q - mean;
            mean += delta / static_cast<double>(b + 1);
            m2 += delta * (q - mean);
        }
        const double se = std::sqrt(m2 / static_cast<double>(options.branches - 1) / static_cast<double>(options.branches));
        const double slack = 1e-12 * std::max(1.0, std::abs(q_prev));
        // Margin <= 0 means the asserted inequality holds at this state.
        const double margin = options.flipped ? (q_prev - 3.0 * se - slack) - mean : mean - (q_prev + 3.0 * se + slack);
        report.statistic = std::max(report.statistic, margin);
        const std::string line = "time " + std::to_string(t) + ": Q = " + fmt(q_prev) + ", E[next Q] = " + fmt(mean) +
                                 ", SE = " + fmt(se) + ", margin " + fmt(margin);
        if (margin > 0.0) {
            ok = false;
            report.details.insert(report.details.begin(), "violated at " + line);
        } else {
            report.details.push_back(line);
        }
    }
    set_status(report, ok);
    return report;
}

namespace {

// Largest per-entry change of the belief pmfs relative to time 0; a change
// of support counts as infinite drift.
std::pair<double, std::size_t> max_drift(const std::vector<NetworkState>& states) {
    double worst = 0.0;
    std::size_t when = 0;
    const auto& first = states.front().beliefs;
    for (const auto& st : states) {
        for (std::size_t k = 0; k < first.size(); ++k) {
            for (Hypothesis h = 0; h < first[k].size(); ++h) {
                const double d = std::abs(st.beliefs[k].prob(h) - first[k].prob(h));
                const bool support_changed = (st.beliefs[k].log(h) == kNegInf) != (first[k].log(h) == kNegInf);
                const double drift = support_changed ? kInf : d;
                if (drift > worst) {
                    worst = drift;
                    when = st.time;
                }
            }
        }
    }
    return {worst, when};
}

}  // namespace

CheckReport check_fixed_point(double alpha, std::uint64_t seed, std::size_t steps, double tolerance) {
    const auto config = scenarios::three_agent_equilibrium(alpha, seed, steps);
    const auto states = simulate_states(config, seed);
    auto report = make_report("fixed_point alpha=" + fmt(alpha), seed);
    report.samples = {{"steps", steps}};
    report.tolerance = tolerance;
    report.comparison = "<";
    const auto [worst, when] = max_drift(states);
    report.statistic = worst;
    set_status(report, worst < tolerance);
    if (!report.passed()) report.details.push_back("largest drift " + fmt(worst) + " at step " + std::to_string(when));
    return report;
}

CheckReport check_fixed_point_contrast(double alpha, std::uint64_t seed, std::size_t steps, double min_drift) {
    auto config = scenarios::three_agent_equilibrium(alpha, seed, steps);
    config.protocol = TrendingBootstrap{TrendDistribution::uniform(4)};
    const auto states = simulate_states(config, seed);
    auto report = make_report("fixed_point_contrast alpha=" + fmt(alpha), seed);
    report.samples = {{"steps", steps}};
    report.tolerance = min_drift;
    report.comparison = ">";
    const auto [worst, when] = max_drift(states);
    report.statistic = worst;
    set_status(report, worst > min_drift);
    report.note = "uniform trend over all hypotheses breaks the equilibrium";
    for (std::size_t k = 0; k < 3; ++k) {
        report.details.push_back("agent " + std::to_string(k) + " final truth belief " +
                                 fmt(states.back().beliefs[k].prob(config.network.truth)));
    }
    report.details.push_back("first large drift at step " + std::to_string(when));
    return report;
}

CheckReport check_no_mislearning(const std::vector<std::pair<std::string, ExperimentConfig>>& configs, double epsilon) {
    auto report = make_report("no_mislearning", configs.empty() ? 0 : configs.front().second.seed);
    report.tolerance = -epsilon;
    report.comparison = ">=";
    report.statistic = kInf;
    for (const auto& [name, config] : configs) {
        const auto trace = run_single(config, config.seed);
        const auto guard = mislearning_guard(trace);
        auto part = make_report("no_mislearning " + name, config.seed);
        part.samples = {{"horizon", config.horizon}, {"agents", config.num_agents()}};
        part.tolerance = -epsilon;
        part.comparison = ">=";
        part.statistic = kInf;
        bool ok = !guard.zero_reached && guard.min_truth_belief > 0.0;
        if (!ok) part.details.push_back("agent " + std::to_string(guard.agent) + " lost the truth at time " +
                                        std::to_string(guard.time));
        const std::size_t start = config.horizon - config.horizon / 4;
        for (std::size_t k = 0; k < config.num_agents(); ++k) {
            std::vector<double> x;
            std::vector<double> y;
            for (const auto& rec : trace.records) {
                if (rec.time < start) continue;
                x.push_back(static_cast<double>(rec.time));
                y.push_back(rec.beliefs[k].log(config.network.truth));
            }
            const double slope = x.size() >= 2 ? fit_slope(x, y) : 0.0;
            part.statistic = std::min(part.statistic, slope);
            if (!(slope >= -epsilon)) {
                ok = false;
                part.details.push_back("agent " + std::to_string(k) + " final-quarter slope " + fmt(slope));
            }
        }
        part.details.push_back("min truth belief " + fmt(guard.min_truth_belief) + " (agent " +
                               std::to_string(guard.agent) + ", time " + std::to_string(guard.time) + ")");
        set_status(part, ok);
        report.statistic = std::min(report.statistic, part.statistic);
        report.parts.push_back(std::move(part));
    }
    combine_parts(report);
    return report;
}

CheckReport check_confidence_bounds(const ExperimentConfig& config, double floor, double ceiling) {
    const auto trace = run_single(config, config.seed);
    const auto guard = mislearning_guard(trace);
    const Hypothesis truth = config.network.truth;
    double top_wrong = 0.0;
    std::size_t top_agent = 0;
    Hypothesis top_h = 0;
    std::size_t top_time = 0;
    for (const auto& rec : trace.records) {
        for (std::size_t k = 0; k < rec.beliefs.size(); ++k) {
            for (Hypothesis h = 0; h < rec.beliefs[k].size(); ++h) {
                if (h != truth && rec.beliefs[k].prob(h) > top_wrong) {
                    top_wrong = rec.beliefs[k].prob(h);
                    top_agent = k;
                    top_h = h;
                    top_time = rec.time;
                }
            }
        }
    }
    auto report = make_report("confidence_bounds", config.seed);
    report.samples = {{"horizon", config.horizon}, {"records", trace.records.size()}};

    auto lower = make_report("truth belief floor", config.seed);
    lower.statistic = guard.min_truth_belief;
    lower.tolerance = floor;
    lower.comparison = ">";
    set_status(lower, guard.min_truth_belief > floor);
    lower.details.push_back("minimum at agent " + std::to_string(guard.agent) + ", time " + std::to_string(guard.time));

    auto upper = make_report("wrong hypothesis ceiling", config.seed);
    upper.statistic = top_wrong;
    upper.tolerance = ceiling;
    upper.comparison = "<";
    set_status(upper, top_wrong < ceiling);
    upper.details.push_back("maximum at agent " + std::to_string(top_agent) + ", hypothesis " +
                            std::to_string(top_h + 1) + ", time " + std::to_string(top_time));

    report.parts = {std::move(lower), std::move(upper)};
    combine_parts(report);
    return report;
}

CheckReport check_matrix_product_lemmas(const CombinationMatrix& combination, double pi, std::uint64_t seed,
                                        const MatrixLemmaOptions& options) {
    if (!(pi >= 0.0 && pi <= 1.0)) throw std::invalid_argument("pi must lie in [0, 1]");
    const Eigen::MatrixXd& a = combination.entries();
    const auto size = a.rows();
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(size, size);
    const Eigen::MatrixXd gap = identity - a.transpose();
    const double lambda = combination.mixing_lambda();
    const double lambda_tilde = 1.0 - (1.0 - lambda) * pi;

    // Powers A^m built with the same multiplication order as the random products.
    std::vector<Eigen::MatrixXd> powers{identity};
    std::vector<double> power_norms;
    for (std::size_t m = 1; m <= std::max(options.window, options.max_length); ++m) powers.push_back(powers.back() * a);
    for (const auto& p : powers) power_norms.push_back(spectral_norm(p.transpose() * gap));

    auto report = make_report("matrix_products pi=" + fmt(pi), seed);
    report.details.push_back("lambda = " + fmt(lambda) + ", lambda_tilde = " + fmt(lambda_tilde));

    // (a) factor counts and product structure.
    {
        const std::size_t n = options.window;
        std::vector<std::size_t> counts(n + 1, 0);
        double worst_structure = 0.0;
        double mean = 0.0;
        double m2 = 0.0;
        for (std::size_t s = 0; s < options.samples; ++s) {
            Stream stream(seed, StreamKind::MatrixFactor, s, 0);
            Eigen::MatrixXd product = identity;
            std::size_t m = 0;
            for (std::size_t f = 0; f < n; ++f) {
                if (stream.bernoulli(pi)) {
                    product = product * a;
                    ++m;
                } else {
                    product = product * identity;
                }
            }
            ++counts[m];
            worst_structure = std::max(worst_structure, (product - powers[m]).cwiseAbs().maxCoeff());
            const double norm = spectral_norm(product.transpose() * gap);
            const double delta = norm - mean;
            mean += delta / static_cast<double>(s + 1);
            m2 += delta * (norm - mean);
        }
        const double total = static_cast<double>(options.samples);

        // Chi-square against Binomial(n, pi), pooling bins until each expects >= 5.
        const boost::math::binomial_distribution<double> binom(static_cast<double>(n), pi);
        std::vector<std::pair<double, double>> bins;  // observed, expected
        double obs_acc = 0.0;
        double exp_acc = 0.0;
        for (std::size_t m = 0; m <= n; ++m) {
            obs_acc += static_cast<double>(counts[m]);
            exp_acc += total * boost::math::pdf(binom, static_cast<double>(m));
            if (exp_acc >= 5.0) {
                bins.emplace_back(obs_acc, exp_acc);
                obs_acc = exp_acc = 0.0;
            }
        }
        if (exp_acc > 0.0 || obs_acc > 0.0) {
            if (bins.empty()) {
                bins.emplace_back(obs_acc, exp_acc);
            } else {
                bins.back().first += obs_acc;
                bins.back().second += exp_acc;
            }
        }
        auto chi = make_report("factor counts vs binomial", seed);
        chi.samples = {{"windows", options.samples}, {"window_length", n}, {"bins", bins.size()}};
        chi.tolerance = 1e-3;
        chi.comparison = ">=";
        if (bins.size() < 2) {
            // Degenerate pi: every window has the same count.
            const std::size_t expected_m = pi >= 1.0 ? n : 0;
            chi.statistic = counts[expected_m] == options.samples ? 1.0 : 0.0;
        } else {
            double stat = 0.0;
            for (const auto& [o, e] : bins) stat += (o - e) * (o - e) / e;
            const boost::math::chi_squared_distribution<double> dist(static_cast<double>(bins.size() - 1));
            chi.statistic = boost::math::cdf(boost::math::complement(dist, stat));
            chi.details.push_back("chi-square " + fmt(stat) + " on " + std::to_string(bins.size() - 1) + " df");
        }
        set_status(chi, chi.statistic >= 1e-3);
        report.parts.push_back(std::move(chi));

        auto structure = make_report("realized product equals A^m", seed);
        structure.samples = {{"windows", options.samples}};
        structure.statistic = worst_structure;
        structure.tolerance = 1e-12;
        structure.comparison = "<=";
        set_status(structure, worst_structure <= 1e-12);
        report.parts.push_back(std::move(structure));

        double exact = 0.0;
        for (std::size_t m = 0; m <= n; ++m) exact += boost::math::pdf(binom, static_cast<double>(m)) * power_norms[m];
        const double se = std::sqrt(m2 / (total - 1.0) / total);
        auto expectation = make_report("binomial-weighted norm vs Monte Carlo", seed);
        expectation.samples = {{"windows", options.samples}};
        expectation.statistic = se > 0.0 ? std::abs(mean - exact) / se : (std::abs(mean - exact) <= 1e-12 ? 0.0 : kInf);
        expectation.tolerance = 3.0;
        expectation.comparison = "<=";
        expectation.details.push_back("exact " + fmt(exact) + ", Monte Carlo " + fmt(mean) + " (SE " + fmt(se) + ")");
        set_status(expectation, expectation.statistic <= 3.0);
        report.parts.push_back(std::move(expectation));
    }

    // (b) decay slope of E||(A~^{1->n})^T (I - A^T)||.
    {
        std::vector<double> sums(options.max_length + 1, 0.0);
        for (std::size_t s = 0; s < options.slope_samples; ++s) {
            Stream stream(seed, StreamKind::MatrixFactor, s, 1);
            Eigen::MatrixXd product = identity;
            for (std::size_t len = 1; len <= options.max_length; ++len) {
                if (stream.bernoulli(pi)) product = product * a;
                sums[len] += spectral_norm(product.transpose() * gap);
            }
        }
        std::vector<double> x;
        std::vector<double> y;
        for (std::size_t len = 1; len <= options.max_length; ++len) {
            x.push_back(static_cast<double>(len));
            y.push_back(std::log(sums[len] / static_cast<double>(options.slope_samples)));
        }
        auto decay = make_report("decay slope", seed);
        decay.samples = {{"windows", options.slope_samples}, {"max_length", options.max_length}};
        decay.statistic = fit_slope(x, y);
        decay.tolerance = std::log(lambda_tilde) + options.slope_margin;
        decay.comparison = "<=";
        decay.details.push_back("log lambda_tilde = " + fmt(std::log(lambda_tilde)));
        set_status(decay, decay.statistic <= decay.tolerance);
        report.parts.push_back(std::move(decay));
    }

    // (c) long products approach v 1^T.
    {
        const Eigen::MatrixXd limit = combination.perron() * Eigen::RowVectorXd::Ones(size);
        double worst = 0.0;
        for (std::size_t s = 0; s < options.product_samples; ++s) {
            Stream stream(seed, StreamKind::MatrixFactor, s, 2);
            Eigen::MatrixXd product = identity;
            for (std::size_t f = 0; f < options.product_length; ++f) {
                if (stream.bernoulli(pi)) product = product * a;
            }
            worst = std::max(worst, (product - limit).cwiseAbs().maxCoeff());
        }
        auto conv = make_report("product limit", seed);
        conv.samples = {{"products", options.product_samples}, {"length", options.product_length}};
        conv.statistic = worst;
        conv.tolerance = options.product_tolerance;
        conv.comparison = "<";
        set_status(conv, worst < options.product_tolerance);
        report.parts.push_back(std::move(conv));
    }
    combine_parts(report);
    return report;
}

MislearningCondition evaluate_mislearning_condition(const ObservationModel& model, const Eigen::VectorXd& perron,
                                                    Hypothesis truth, Hypothesis tau) {
    if (tau == truth) throw std::invalid_argument("the mislearning condition needs tau different from the truth");
    if (tau >= model.hypotheses() || truth >= model.hypotheses()) throw std::invalid_argument("hypothesis out of range");
    MislearningCondition c{0.0, 0.0, 0.0, false};
    for (std::size_t k = 0; k < model.num_agents(); ++k) {
        const double v = perron[static_cast<Eigen::Index>(k)];
        c.shared_side += v * model.agent(k).kl_divergence(truth, tau);
        const auto q = kl_to_complement_mixture(model.agent(k), truth, tau);
        c.complement_side += v * q.value;
        c.quadrature_error += v * q.error_estimate;
    }
    c.holds = c.shared_side < c.complement_side;
    return c;
}

CheckReport check_mislearning_condition(const ExperimentConfig& config, double threshold, double quadrature_tolerance) {
    const auto* fixed = std::get_if<FixedPartial>(&config.protocol);
    if (!fixed) throw std::invalid_argument("mislearning condition check needs the fixed_partial protocol");
    const auto& net = config.network;
    const auto cond = evaluate_mislearning_condition(net.model, net.combination.perron(), net.truth, fixed->tau);

    auto report = make_report("mislearning_condition tau=" + std::to_string(fixed->tau + 1), config.seed);
    auto condition = make_report("condition", config.seed);
    condition.statistic = cond.complement_side - cond.shared_side;
    condition.tolerance = 0.0;
    condition.comparison = ">";
    condition.details.push_back("KL to shared hypothesis " + fmt(cond.shared_side) + ", KL to complement mixture " +
                                fmt(cond.complement_side));
    set_status(condition, cond.holds);

    auto quad = make_report("quadrature error", config.seed);
    quad.statistic = cond.quadrature_error;
    quad.tolerance = quadrature_tolerance;
    quad.comparison = "<";
    set_status(quad, cond.quadrature_error < quadrature_tolerance);

    auto sim = make_report("uniform-fill run ends on tau", config.seed);
    sim.samples = {{"horizon", config.horizon}};
    sim.tolerance = threshold;
    sim.comparison = ">";
    if (!cond.holds) {
        sim.status = CheckStatus::Skipped;
        sim.note = "condition does not hold; no mislearning is predicted";
    } else {
        const auto trace = run_single(config, config.seed);
        double lowest = 1.0;
        for (const auto& b : trace.last().beliefs) lowest = std::min(lowest, b.prob(fixed->tau));
        sim.statistic = lowest;
        set_status(sim, lowest > threshold);
    }
    report.details = condition.details;
    report.parts = {std::move(condition), std::move(quad), std::move(sim)};
    combine_parts(report);
    return report;
}

CheckReport check_truth_sharing_uniform_fill(const ExperimentConfig& config, double threshold) {
    const auto* fixed = std::get_if<FixedPartial>(&config.protocol);
    const auto& net = config.network;
    if (!fixed || fixed->tau != net.truth) {
        throw std::invalid_argument("truth-sharing check needs fixed_partial with the true hypothesis shared");
    }
    auto report = check_truth_learning(config, threshold);
    report.name = "truth_sharing_uniform_fill";
    // Identifiability against the completion mixture, per agent.
    std::vector<std::string> witnesses;
    for (std::size_t k = 0; k < net.num_agents(); ++k) {
        if (net.hypotheses() >= 2 && kl_to_complement_mixture(net.model.agent(k), net.truth, net.truth).value > 1e-12) {
            witnesses.push_back(std::to_string(k));
        }
    }
    std::string list;
    for (const auto& w : witnesses) list += (list.empty() ? "" : ", ") + w;
    report.details.push_back("agents separating the truth from the completion mixture: " + (list.empty() ? "none" : list));
    return report;
}

CheckReport check_boundedness(const ExperimentConfig& config, double growth) {
    const auto states = simulate_states(config, config.seed);
    const Hypothesis truth = config.network.truth;
    double running = 0.0;
    double at_half = 0.0;
    const std::size_t half = config.horizon / 2;
    for (std::size_t j = 1; j < states.size(); ++j) {
        for (const auto& psi : states[j].intermediates) running = std::max(running, -psi.log(truth));
        if (j == half) at_half = running;
    }
    auto report = make_report("boundedness", config.seed);
    report.samples = {{"horizon", config.horizon}};
    report.statistic = at_half > 0.0 ? running / at_half - 1.0 : (running > 0.0 ? kInf : 0.0);
    report.tolerance = growth;
    report.comparison = "<=";
    report.details.push_back("running max of ||Psi||_inf: " + fmt(at_half) + " at half horizon, " + fmt(running) +
                             " at the end");
    set_status(report, std::isfinite(running) && report.statistic <= growth);
    return report;
}

CheckReport check_residual_mean(const ExperimentConfig& config, double fraction) {
    if (!is_trending(config.protocol)) throw std::invalid_argument("residual check needs the trending protocol");
    const auto& net = config.network;
    const Hypothesis truth = net.truth;
    const auto states = simulate_states(config, config.seed);
    const Eigen::MatrixXd at = net.combination.entries().transpose();
    const Eigen::Index size = at.rows();
    const Eigen::MatrixXd gap = Eigen::MatrixXd::Identity(size, size) - at;
    const auto rates = asymptotic_rates(net.model, net.combination.perron(), truth);
    const double horizon = static_cast<double>(config.horizon);

    auto report = make_report("residual_mean", config.seed);
    report.samples = {{"horizon", config.horizon}};
    report.note = "finite-horizon surrogate for an almost-sure limit";
    report.tolerance = fraction;
    report.comparison = "<=";
    for (Hypothesis h = 0; h < config.hypotheses(); ++h) {
        if (h == truth) continue;
        auto part = make_report("residual_mean h=" + std::to_string(h + 1), config.seed);
        part.tolerance = fraction;
        part.comparison = "<=";
        if (trend_prob(config.protocol, h) <= 0.0 || rates[h] == 0.0) {
            part.status = CheckStatus::Skipped;
            part.note = "hypothesis never shared or not identifiable";
            report.parts.push_back(std::move(part));
            continue;
        }
        // Forward recursions: after round i each vector holds its part of x_i.
        Eigen::VectorXd initial(size);
        for (Eigen::Index k = 0; k < size; ++k) {
            initial[k] = log_belief_ratio(states[0].beliefs[static_cast<std::size_t>(k)], h, truth);
        }
        Eigen::VectorXd data = Eigen::VectorXd::Zero(size);
        Eigen::VectorXd residual = Eigen::VectorXd::Zero(size);
        for (std::size_t i = 1; i < states.size(); ++i) {
            const auto& st = states[i];
            Eigen::VectorXd innovation(size);
            Eigen::VectorXd psi_loss(size);
            for (Eigen::Index k = 0; k < size; ++k) {
                const auto& model = net.model.agent(static_cast<std::size_t>(k));
                const auto& x = st.observations[static_cast<std::size_t>(k)];
                innovation[k] = model.log_likelihood(x, h) - model.log_likelihood(x, truth);
                psi_loss[k] = -st.intermediates[static_cast<std::size_t>(k)].log(truth);
            }
            const bool mixes = st.tau == h;
            const double c = st.tau == truth ? 1.0 : mixes ? -1.0 : 0.0;
            if (mixes) {
                initial = at * initial;
                data = at * (data + innovation);
                residual = at * residual;
            } else {
                data += innovation;
            }
            if (c != 0.0) residual -= c * (gap * psi_loss);
        }
        Eigen::VectorXd actual(size);
        for (Eigen::Index k = 0; k < size; ++k) {
            actual[k] = log_belief_ratio(states.back().beliefs[static_cast<std::size_t>(k)], h, truth);
        }
        const double identity_error = (initial + data + residual - actual).cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, actual.cwiseAbs().maxCoeff());
        const double mean_residual = residual.cwiseAbs().maxCoeff() / horizon;
        part.statistic = mean_residual / std::abs(rates[h]);
        part.details.push_back("max |residual| / T = " + fmt(mean_residual) + ", |d_ave| = " + fmt(std::abs(rates[h])));
        part.details.push_back("decomposition error " + fmt(identity_error) + " (scale " + fmt(scale) + ")");
        const bool identity_ok = identity_error <= 1e-8 * scale;
        if (!identity_ok) part.details.insert(part.details.begin(), "decomposition does not reproduce x_T");
        set_status(part, identity_ok && part.statistic <= fraction);
        report.statistic = std::max(report.statistic, part.statistic);
        report.parts.push_back(std::move(part));
    }
    combine_parts(report);
    return report;
}

namespace {

CheckReport group(std::string name, std::uint64_t seed, std::vector<CheckReport> parts) {
    auto r = make_report(std::move(name), seed);
    r.parts = std::move(parts);
    combine_parts(r);
    return r;
}

std::vector<BatteryEntry> build_battery() {
    using scenarios::trending_never_truth;
    return {
        {"rate_convergence", "per-agent r_T/T against d_ave, T = 3000, tolerance 5%",
         [](std::uint64_t seed) { return check_rate_convergence(trending_never_truth(seed, 3000), std::nullopt, 0.05); }},
        {"protocol_equivalence", "trending vs full sharing rates, T = 3000, tolerance 2%",
         [](std::uint64_t seed) { return check_protocol_equivalence(trending_never_truth(seed, 3000), 0.02); }},
        {"truth_learning", "truth learned without ever sharing it, T = 2000",
         [](std::uint64_t seed) { return check_truth_learning(trending_never_truth(seed, 2000), 0.99); }},
        {"supermartingale", "branched one-step estimates of E[Q], plus a flipped negative control",
         [](std::uint64_t seed) {
             const auto config = trending_never_truth(seed, 200);
             auto main = check_supermartingale(config, seed, {});
             auto flipped = check_supermartingale(config, seed, {.flipped = true});
             auto control = make_report("negative control (flipped inequality must fail)", seed);
             control.statistic = flipped.statistic;
             control.tolerance = 0.0;
             control.comparison = ">";
             set_status(control, !flipped.passed());
             return group("supermartingale", seed, {std::move(main), std::move(control)});
         }},
        {"fixed_point", "zero-belief equilibrium, alpha in {0.1, 0.3, 0.5}, 10 seeds, plus contrast",
         [](std::uint64_t seed) {
             std::vector<CheckReport> parts;
             for (double alpha : {0.1, 0.3, 0.5}) {
                 double worst = 0.0;
                 bool ok = true;
                 for (std::uint64_t r = 0; r < 10; ++r) {
                     const auto rep = check_fixed_point(alpha, derive_seed(seed, StreamKind::Check, r, 0));
                     worst = std::max(worst, rep.statistic);
                     ok = ok && rep.passed();
                 }
                 auto part = make_report("fixed_point alpha=" + fmt(alpha), seed);
                 part.samples = {{"seeds", 10}, {"steps", 100}};
                 part.statistic = worst;
                 part.tolerance = 1e-10;
                 part.comparison = "<";
                 set_status(part, ok);
                 parts.push_back(std::move(part));
             }
             parts.push_back(check_fixed_point_contrast(0.3, seed));
             return group("fixed_point", seed, std::move(parts));
         }},
        {"no_mislearning", "truth belief stays positive with no final downward trend",
         [](std::uint64_t seed) {
             auto skewed = trending_never_truth(seed, 2000);
             skewed.protocol = TrendingBootstrap{TrendDistribution({0.1, 0.6, 0.1, 0.1, 0.1})};
             return check_no_mislearning({{"truth-only trend", scenarios::trending_truth_only(seed, 5000)},
                                          {"never-truth trend", trending_never_truth(seed, 2000)},
                                          {"skewed trend", skewed},
                                          {"single agent", single_agent(seed, 2000)}});
         }},
        {"confidence_bounds", "truth-only trend: truth belief > 0.01, wrong beliefs < 0.99, T = 5000",
         [](std::uint64_t seed) {
             auto config = scenarios::trending_truth_only(seed, 5000);
             config.stride = RecordStride{config.horizon, 1};
             return check_confidence_bounds(config, 0.01, 0.99);
         }},
        {"matrix_products", "random matrix products of the ten-agent matrix with pi = 0.25",
         [](std::uint64_t seed) {
             return check_matrix_product_lemmas(build_metropolis(scenarios::ten_agent_topology()), 0.25, seed);
         }},
        {"mislearning_condition", "uniform fill of a nearby hypothesis leads every agent to it",
         [](std::uint64_t seed) { return check_mislearning_condition(scenarios::two_agent_uniform_fill(seed), 0.99); }},
        {"truth_sharing_uniform_fill", "uniform fill sharing the truth learns it, T = 2000",
         [](std::uint64_t seed) { return check_truth_sharing_uniform_fill(scenarios::uniform_fill(0, seed, 2000), 0.99); }},
        {"boundedness", "running max of -log psi(truth) stabilizes",
         [](std::uint64_t seed) { return check_boundedness(trending_never_truth(seed, 2000)); }},
        {"residual_mean", "residual term of the effective-matrix split is small relative to d_ave",
         [](std::uint64_t seed) { return check_residual_mean(trending_never_truth(seed, 3000)); }},
    };
}

}  // namespace

const std::vector<BatteryEntry>& available_checks() {
    static const std::vector<BatteryEntry> battery = build_battery();
    return battery;
}

std::vector<std::string> check_names() {
    std::vector<std::string> names;
    for (const auto& e : available_checks()) names.push_back(e.name);
    return names;
}

std::vector<CheckReport> run_battery(const std::vector<std::string>& selected, std::uint64_t seed) {
    std::vector<const BatteryEntry*> chosen;
    for (const auto& name : selected) {
        if (name == "all") {
            chosen.clear();
            for (const auto& e : available_checks()) chosen.push_back(&e);
            break;
        }
        const auto it = std::find_if(available_checks().begin(), available_checks().end(),
                                     [&](const BatteryEntry& e) { return e.name == name; });
        if (it == available_checks().end()) {
            std::string list;
            for (const auto& n : check_names()) list += (list.empty() ? "" : ", ") + n;
            throw std::invalid_argument("unknown check '" + name + "' (available: all, " + list + ")");
        }
        chosen.push_back(&*it);
    }
    std::vector<CheckReport> reports;
    for (const auto* e : chosen) {
        auto r = e->run(seed);
        r.name = e->name;
        r.seed = seed;
        reports.push_back(std::move(r));
    }
    return reports;
}

}  // namespace social_learning
