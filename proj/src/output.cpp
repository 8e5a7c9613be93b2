#include "social_learning/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace social_learning {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::string tau_field(const std::optional<Hypothesis>& tau) { return tau ? std::to_string(*tau + 1) : std::string(); }

// JSON has no infinities; keep them as strings.
nlohmann::json json_number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
    out << "time,agent,hypothesis,log_belief,tau,Q\n";
    for (const auto& rec : trace.records) {
        const std::string tau = tau_field(rec.tau);
        const std::string q = format_double(rec.loss);
        for (std::size_t k = 0; k < rec.beliefs.size(); ++k) {
            for (Hypothesis h = 0; h < rec.beliefs[k].size(); ++h) {
                out << rec.time << ',' << k << ',' << h + 1 << ',' << format_double(rec.beliefs[k].log(h)) << ',' << tau
                    << ',' << q << '\n';
            }
        }
    }
}

void write_mean_trace_csv(std::ostream& out, const ExperimentResult& result) {
    out << "time,agent,hypothesis,mean_log_belief,mean_Q\n";
    for (const auto& rec : result.mean) {
        const std::string q = format_double(rec.loss);
        for (std::size_t k = 0; k < rec.log_beliefs.size(); ++k) {
            for (Hypothesis h = 0; h < rec.log_beliefs[k].size(); ++h) {
                out << rec.time << ',' << k << ',' << h + 1 << ',' << format_double(rec.log_beliefs[k][h]) << ',' << q
                    << '\n';
            }
        }
    }
}

nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentResult& result) {
    const auto& net = config.network;
    const auto& perron = net.combination.perron();
    nlohmann::json j;
    j["agents"] = config.num_agents();
    j["hypotheses"] = config.hypotheses();
    j["truth"] = net.truth + 1;
    j["protocol"] = protocol_name(config.protocol);
    if (const auto* fixed = std::get_if<FixedPartial>(&config.protocol)) j["shared"] = fixed->tau + 1;
    if (const auto* trending = std::get_if<TrendingBootstrap>(&config.protocol)) j["trend"] = trending->trend.probs();
    j["horizon"] = config.horizon;
    j["seed"] = config.seed;
    j["runs"] = config.runs;
    j["mixing_lambda"] = net.combination.mixing_lambda();
    j["perron"] = std::vector<double>(perron.data(), perron.data() + perron.size());

    const auto rates = asymptotic_rates(net.model, perron, net.truth);
    auto& rate_table = j["d_ave"];
    rate_table = nlohmann::json::array();
    for (Hypothesis h = 0; h < rates.size(); ++h) {
        if (h != net.truth) rate_table.push_back({{"hypothesis", h + 1}, {"d_ave", rates[h]}});
    }

    auto& runs = j["run_results"];
    runs = nlohmann::json::array();
    for (const auto& trace : result.runs) {
        nlohmann::json run;
        run["seed"] = trace.seed;
        const auto& last = trace.last();
        run["final_time"] = last.time;
        run["final_Q"] = json_number(last.loss);
        nlohmann::json beliefs = nlohmann::json::array();
        for (const auto& b : last.beliefs) beliefs.push_back(b.probabilities());
        run["final_beliefs"] = beliefs;
        const auto guard = mislearning_guard(trace);
        run["guard"] = {{"min_truth_belief", guard.min_truth_belief},
                        {"min_log_truth_belief", json_number(guard.min_log_truth_belief)},
                        {"agent", guard.agent},
                        {"time", guard.time},
                        {"zero_reached", guard.zero_reached}};
        run["zero_truth_events"] = trace.zero_truth_events;
        runs.push_back(std::move(run));
    }
    return j;
}

void write_plot_data(const std::filesystem::path& dir, const ExperimentConfig& config, const RunTrace& trace) {
    const auto& net = config.network;
    {
        auto out = open_output(dir / "network.csv");
        out << "from,to,weight\n";
        const auto& a = net.combination.entries();
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            for (Eigen::Index c = 0; c < a.cols(); ++c) {
                if (a(r, c) > 0.0) out << r << ',' << c << ',' << format_double(a(r, c)) << '\n';
            }
        }
    }
    {
        auto out = open_output(dir / "beliefs.csv");
        out << "time,agent,hypothesis,belief\n";
        for (const auto& rec : trace.records) {
            for (std::size_t k = 0; k < rec.beliefs.size(); ++k) {
                for (Hypothesis h = 0; h < rec.beliefs[k].size(); ++h) {
                    out << rec.time << ',' << k << ',' << h + 1 << ',' << format_double(rec.beliefs[k].prob(h)) << '\n';
                }
            }
        }
    }
    {
        const auto rates = asymptotic_rates(net.model, net.combination.perron(), net.truth);
        auto out = open_output(dir / "rates.csv");
        out << "time,agent,hypothesis,rate,d_ave\n";
        for (const auto& rec : trace.records) {
            if (rec.time == 0) continue;
            for (std::size_t k = 0; k < rec.beliefs.size(); ++k) {
                for (Hypothesis h = 0; h < rec.beliefs[k].size(); ++h) {
                    if (h == net.truth) continue;
                    const double rate = log_belief_ratio(rec.beliefs[k], h, net.truth) / static_cast<double>(rec.time);
                    out << rec.time << ',' << k << ',' << h + 1 << ',' << format_double(rate) << ','
                        << format_double(rates[h]) << '\n';
                }
            }
        }
    }
    {
        auto out = open_output(dir / "tau.csv");
        out << "time,tau\n";
        for (const auto& rec : trace.records) {
            if (rec.tau) out << rec.time << ',' << *rec.tau + 1 << '\n';
        }
    }
}

void write_experiment(const std::filesystem::path& dir, const ExperimentConfig& config, const ExperimentResult& result) {
    std::filesystem::create_directories(dir);
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
        auto out = open_output(dir / (r == 0 ? std::string("trace.csv") : "trace_run" + std::to_string(r) + ".csv"));
        write_trace_csv(out, result.runs[r]);
    }
    if (!result.mean.empty()) {
        auto out = open_output(dir / "mean_trace.csv");
        write_mean_trace_csv(out, result);
    }
    write_text_file(dir / "summary.json", summary_json(config, result).dump(2) + "\n");
    if (!result.runs.empty()) write_plot_data(dir, config, result.runs.front());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    auto out = open_output(path);
    out << text;
}

}  // namespace social_learning
