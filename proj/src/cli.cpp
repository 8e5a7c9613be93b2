#include "social_learning/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "social_learning/checks.hpp"
#include "social_learning/config.hpp"
#include "social_learning/output.hpp"

namespace social_learning {

namespace {

namespace fs = std::filesystem;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    std::optional<std::size_t> horizon;
    std::optional<std::size_t> stride;
};

void apply(const Overrides& o, ExperimentConfig& config) {
    if (o.seed) config.seed = *o.seed;
    if (o.runs) config.runs = *o.runs;
    if (o.horizon) config.horizon = *o.horizon;
    if (o.stride) config.stride = RecordStride{0, *o.stride};
}

std::string fixed(double x, int digits = 6) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::string general(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

int simulate(const fs::path& config_path, const fs::path& out_dir, const Overrides& overrides, std::ostream& out,
             std::ostream& err) {
    auto config = parse_config(config_path);
    apply(overrides, config);
    config.validate();
    fs::create_directories(out_dir);
    ExperimentResult result;
    try {
        result = run_experiment(config);
    } catch (const SimulationError& e) {
        std::ofstream trace(out_dir / "trace.csv", std::ios::binary);
        write_trace_csv(trace, e.partial());
        err << "error: simulation failed: " << e.what() << "\n"
            << "partial trace (" << e.partial().records.size() << " records) written to "
            << (out_dir / "trace.csv").string() << "\n";
        return 1;
    }
    write_experiment(out_dir, config, result);

    const Hypothesis truth = config.network.truth;
    out << "protocol " << protocol_name(config.protocol) << ", " << config.num_agents() << " agents, "
        << config.hypotheses() << " hypotheses, truth " << truth + 1 << ", horizon " << config.horizon << ", seed "
        << config.seed << "\n";
    for (const auto& trace : result.runs) {
        if (result.runs.size() > 1) out << "run seed " << trace.seed << "\n";
        out << "final truth beliefs:";
        for (const auto& b : trace.last().beliefs) out << ' ' << fixed(b.prob(truth));
        out << "\n";
        const auto guard = mislearning_guard(trace);
        out << "min truth belief " << general(guard.min_truth_belief) << " (agent " << guard.agent << ", time "
            << guard.time << ")" << (guard.zero_reached ? " ZERO REACHED" : "") << "\n";
    }
    out << "wrote " << out_dir.string() << "\n";
    return 0;
}

int rates(const fs::path& config_path, const fs::path& out_dir, std::ostream& out) {
    const auto config = parse_config(config_path);
    const auto& net = config.network;
    const auto& v = net.combination.perron();
    const auto d = asymptotic_rates(net.model, v, net.truth);
    const auto ident = check_global_identifiability(net.model, net.truth);

    fs::create_directories(out_dir);
    std::ofstream table(out_dir / "rates.csv", std::ios::binary);
    table << "hypothesis,d_ave,identifiable,witness\n";
    std::ofstream contrib(out_dir / "kl_contributions.csv", std::ios::binary);
    contrib << "hypothesis,agent,perron,kl,weighted_kl\n";

    out << "hypothesis        d_ave  identifiable  witness\n";
    for (const auto& entry : ident) {
        const Hypothesis h = entry.hypothesis;
        char line[128];
        std::snprintf(line, sizeof line, "%10zu  %11.6f  %12s  %s\n", h + 1, d[h], entry.identifiable ? "yes" : "NO",
                      entry.witness ? ("agent " + std::to_string(*entry.witness)).c_str() : "-");
        out << line;
        table << h + 1 << ',' << format_double(d[h]) << ',' << (entry.identifiable ? 1 : 0) << ','
              << (entry.witness ? std::to_string(*entry.witness) : "") << '\n';
        for (std::size_t k = 0; k < net.num_agents(); ++k) {
            const double kl = net.model.agent(k).kl_divergence(net.truth, h);
            const double vk = v[static_cast<Eigen::Index>(k)];
            contrib << h + 1 << ',' << k << ',' << format_double(vk) << ',' << format_double(kl) << ','
                    << format_double(vk * kl) << '\n';
        }
    }
    out << "\nper-agent KL(truth || h) and Perron weight\n";
    out << "agent   weight";
    for (const auto& entry : ident) out << "       h=" << entry.hypothesis + 1;
    out << "\n";
    for (std::size_t k = 0; k < net.num_agents(); ++k) {
        char head[48];
        std::snprintf(head, sizeof head, "%5zu  %7.4f", k, v[static_cast<Eigen::Index>(k)]);
        out << head;
        for (const auto& entry : ident) {
            char cell[32];
            std::snprintf(cell, sizeof cell, "  %9.6f", net.model.agent(k).kl_divergence(net.truth, entry.hypothesis));
            out << cell;
        }
        out << "\n";
    }
    bool warned = false;
    for (const auto& entry : ident) {
        if (!entry.identifiable) {
            out << "warning: hypothesis " << entry.hypothesis + 1 << " is not identifiable from the truth\n";
            warned = true;
        }
    }
    if (!warned) out << "all wrong hypotheses are identifiable\n";
    return 0;
}

int verify(const std::vector<std::string>& selected, std::uint64_t seed, const std::optional<fs::path>& out_dir,
           std::ostream& out) {
    const auto reports = run_battery(selected, seed);
    bool ok = true;
    nlohmann::json all = nlohmann::json::array();
    std::string text;
    for (const auto& r : reports) {
        ok = ok && r.passed();
        all.push_back(report_json(r));
        text += report_summary(r);
    }
    out << text;
    const std::size_t failed = static_cast<std::size_t>(
        std::count_if(reports.begin(), reports.end(), [](const CheckReport& r) { return !r.passed(); }));
    out << reports.size() - failed << "/" << reports.size() << " checks passed (seed " << seed << ")\n";
    if (out_dir) {
        fs::create_directories(*out_dir);
        write_text_file(*out_dir / "checks.json", all.dump(2) + "\n");
        write_text_file(*out_dir / "checks.txt", text);
    }
    return ok ? 0 : 1;
}

std::vector<double> pi_with_truth(const std::vector<double>& pi, Hypothesis truth, double p) {
    std::vector<double> out(pi.size(), 0.0);
    double rest = 0.0;
    for (Hypothesis h = 0; h < pi.size(); ++h) {
        if (h != truth) rest += pi[h];
    }
    for (Hypothesis h = 0; h < pi.size(); ++h) {
        if (h == truth) {
            out[h] = p;
        } else {
            out[h] = rest > 0.0 ? (1.0 - p) * pi[h] / rest : (1.0 - p) / static_cast<double>(pi.size() - 1);
        }
    }
    return out;
}

int sweep(const fs::path& config_path, const fs::path& out_dir, std::vector<std::uint64_t> seeds,
          std::vector<std::size_t> horizons, std::vector<std::size_t> taus, std::vector<double> pi_true,
          std::ostream& out, std::ostream& err) {
    const auto base = parse_config(config_path);
    if (seeds.empty()) seeds = {base.seed};
    if (horizons.empty()) horizons = {base.horizon};
    const bool fixed_partial = std::holds_alternative<FixedPartial>(base.protocol);
    const bool trending = is_trending(base.protocol);
    if (!taus.empty() && !fixed_partial) {
        err << "error: --tau needs a fixed_partial config\n";
        return 2;
    }
    if (!pi_true.empty() && !trending) {
        err << "error: --pi-true needs a trending config\n";
        return 2;
    }
    std::vector<std::optional<std::size_t>> tau_axis;
    for (auto t : taus) tau_axis.emplace_back(t);
    if (tau_axis.empty()) tau_axis.emplace_back(std::nullopt);
    std::vector<std::optional<double>> pi_axis;
    for (auto p : pi_true) pi_axis.emplace_back(p);
    if (pi_axis.empty()) pi_axis.emplace_back(std::nullopt);

    fs::create_directories(out_dir);
    std::ofstream csv(out_dir / "sweep.csv", std::ios::binary);
    csv << "seed,horizon,tau,pi_true,min_truth_belief,final_min_truth_belief,final_Q,zero_reached\n";
    bool ok = true;
    for (auto seed : seeds) {
        for (auto horizon : horizons) {
            for (const auto& tau : tau_axis) {
                for (const auto& p : pi_axis) {
                    auto config = base;
                    config.seed = seed;
                    config.horizon = horizon;
                    config.runs = 1;
                    if (tau) {
                        if (*tau < 1 || *tau > config.hypotheses()) {
                            err << "error: --tau " << *tau << " outside 1.." << config.hypotheses() << "\n";
                            return 2;
                        }
                        config.protocol = FixedPartial{*tau - 1};
                    }
                    if (p) {
                        if (!(*p >= 0.0 && *p <= 1.0)) {
                            err << "error: --pi-true " << *p << " outside [0, 1]\n";
                            return 2;
                        }
                        const auto& probs = std::get<TrendingBootstrap>(config.protocol).trend.probs();
                        config.protocol =
                            TrendingBootstrap{TrendDistribution(pi_with_truth(probs, config.network.truth, *p))};
                    }
                    csv << seed << ',' << horizon << ',' << (tau ? std::to_string(*tau) : "") << ','
                        << (p ? format_double(*p) : "") << ',';
                    try {
                        const auto trace = run_single(config, seed);
                        const auto guard = mislearning_guard(trace);
                        double final_min = 1.0;
                        for (const auto& b : trace.last().beliefs) {
                            final_min = std::min(final_min, b.prob(config.network.truth));
                        }
                        csv << format_double(guard.min_truth_belief) << ',' << format_double(final_min) << ','
                            << format_double(trace.last().loss) << ',' << (guard.zero_reached ? 1 : 0) << '\n';
                    } catch (const SimulationError& e) {
                        csv << ",,,\n";
                        err << "error: grid point seed " << seed << " horizon " << horizon << " failed: " << e.what()
                            << "\n";
                        ok = false;
                    }
                }
            }
        }
    }
    out << "wrote " << (out_dir / "sweep.csv").string() << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulate social learning with partial belief sharing", "sociallearn"};
    app.require_subcommand(1);

    Overrides overrides;
    std::string config_path;
    std::string out_dir = "out";

    auto* sim = app.add_subcommand("simulate", "Run a config and write traces, summary and plot data");
    sim->add_option("config", config_path, "Experiment config (YAML)")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sim->add_option("--seed", overrides.seed, "Master seed (overrides the config)");
    sim->add_option("--runs", overrides.runs, "Number of runs")->check(CLI::PositiveNumber);
    sim->add_option("--horizon", overrides.horizon, "Number of rounds");
    sim->add_option("--stride", overrides.stride, "Record every n-th round")->check(CLI::PositiveNumber);

    std::vector<std::string> selected;
    std::uint64_t verify_seed = 1;
    std::optional<std::string> verify_out;
    auto* ver = app.add_subcommand("verify", "Run verification checks");
    ver->add_option("checks", selected, "Check names or 'all'")->required();
    ver->add_option("--seed", verify_seed, "Seed for every check")->capture_default_str();
    ver->add_option("--out", verify_out, "Directory for checks.json and checks.txt");

    auto* rat = app.add_subcommand("rates", "Print asymptotic rates, KL contributions and identifiability");
    rat->add_option("config", config_path, "Experiment config (YAML)")->required()->check(CLI::ExistingFile);
    rat->add_option("--out", out_dir, "Output directory")->capture_default_str();

    std::vector<std::uint64_t> seeds;
    std::vector<std::size_t> horizons;
    std::vector<std::size_t> taus;
    std::vector<double> pi_true;
    auto* swp = app.add_subcommand("sweep", "Run a grid of seeds, horizons, shared hypotheses or truth weights");
    swp->add_option("config", config_path, "Experiment config (YAML)")->required()->check(CLI::ExistingFile);
    swp->add_option("--out", out_dir, "Output directory")->capture_default_str();
    swp->add_option("--seeds", seeds, "Seeds")->delimiter(',');
    swp->add_option("--horizons", horizons, "Horizons")->delimiter(',');
    swp->add_option("--tau", taus, "Shared hypotheses for fixed_partial (1-based)")->delimiter(',');
    swp->add_option("--pi-true", pi_true, "Trend probability of the true hypothesis")->delimiter(',');

    std::vector<std::string> argv_store{"sociallearn"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        if (app.got_subcommand(ver) || app.got_subcommand(sim) || app.got_subcommand(rat) || app.got_subcommand(swp)) {
            for (auto* sub : app.get_subcommands()) err << sub->help();
        } else {
            err << app.help();
        }
        return 2;
    }

    try {
        if (*sim) return simulate(config_path, out_dir, overrides, out, err);
        if (*rat) return rates(config_path, out_dir, out);
        if (*swp) return sweep(config_path, out_dir, seeds, horizons, taus, pi_true, out, err);
        if (*ver) {
            try {
                return verify(selected, verify_seed, verify_out ? std::optional<fs::path>(*verify_out) : std::nullopt,
                              out);
            } catch (const std::invalid_argument& e) {
                err << "error: " << e.what() << "\n" << ver->help();
                return 2;
            }
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace social_learning
