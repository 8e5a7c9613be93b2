#include "social_learning/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace social_learning {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::ostringstream out;
    out << problems.size() << " config problem" << (problems.size() == 1 ? "" : "s") << ':';
    for (const auto& p : problems) out << "\n  - " << p;
    return out.str();
}

class Problems {
   public:
    explicit Problems(std::string source) : source_(std::move(source)) {}
    void add(const std::string& where, const std::string& what) { list_.push_back(source_ + ": " + where + ": " + what); }
    bool empty() const { return list_.empty(); }
    [[noreturn]] void raise() const { throw ConfigError(list_); }

   private:
    std::string source_;
    std::vector<std::string> list_;
};

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed, Problems& problems) {
    for (const auto& item : node) {
        const auto key = item.first.as<std::string>();
        if (!allowed.contains(key)) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            problems.add(where.empty() ? key : where + "." + key, "unknown key (allowed: " + list + ")");
        }
    }
}

template <class T>
std::optional<T> scalar(const YAML::Node& node, const std::string& where, Problems& problems) {
    if (!node.IsScalar()) {
        problems.add(where, "expected a scalar value");
        return std::nullopt;
    }
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        problems.add(where, "cannot read '" + node.Scalar() + "' as a " +
                                (std::is_floating_point_v<T> ? "number" : std::is_same_v<T, std::string> ? "string" : "integer"));
        return std::nullopt;
    }
}

std::optional<long long> integer_in(const YAML::Node& node, const std::string& where, long long lo, long long hi,
                                    Problems& problems) {
    auto v = scalar<long long>(node, where, problems);
    if (v && (*v < lo || *v > hi)) {
        problems.add(where, "value " + std::to_string(*v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return std::nullopt;
    }
    return v;
}

std::optional<std::vector<double>> number_list(const YAML::Node& node, const std::string& where, Problems& problems) {
    if (!node.IsSequence()) {
        problems.add(where, "expected a list of numbers");
        return std::nullopt;
    }
    std::vector<double> out;
    bool ok = true;
    for (std::size_t i = 0; i < node.size(); ++i) {
        auto v = scalar<double>(node[i], where + "[" + std::to_string(i) + "]", problems);
        if (v && std::isfinite(*v)) {
            out.push_back(*v);
        } else {
            if (v) problems.add(where + "[" + std::to_string(i) + "]", "value must be finite");
            ok = false;
        }
    }
    if (!ok) return std::nullopt;
    return out;
}

std::optional<std::vector<std::vector<double>>> number_matrix(const YAML::Node& node, const std::string& where,
                                                              Problems& problems) {
    if (!node.IsSequence()) {
        problems.add(where, "expected a list of rows");
        return std::nullopt;
    }
    std::vector<std::vector<double>> out;
    bool ok = true;
    for (std::size_t i = 0; i < node.size(); ++i) {
        auto row = number_list(node[i], where + "[" + std::to_string(i) + "]", problems);
        if (row) {
            out.push_back(std::move(*row));
        } else {
            ok = false;
        }
    }
    if (!ok) return std::nullopt;
    return out;
}

void check_pmf(const std::vector<double>& p, const std::string& where, Problems& problems) {
    double sum = 0.0;
    for (double x : p) {
        if (x < 0.0) {
            problems.add(where, "entries must be nonnegative");
            return;
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "sums to " << sum << ", expected 1";
        problems.add(where, msg.str());
    }
}

struct LikelihoodGroup {
    std::vector<std::size_t> agents;
    std::optional<AgentLikelihood> likelihood;
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({path.string() + ": cannot open file"});
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path.string());
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
    Problems problems(source);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError({source + ": " + e.what()});
    }
    if (!root.IsMap()) throw ConfigError({source + ": top level must be a mapping"});
    check_keys(root, "", {"network", "hypotheses", "protocol", "likelihoods", "beliefs", "simulation"}, problems);

    // hypotheses
    std::optional<std::size_t> hypotheses;
    std::optional<Hypothesis> truth;
    if (const auto node = root["hypotheses"]; !node) {
        problems.add("hypotheses", "missing section");
    } else if (!node.IsMap()) {
        problems.add("hypotheses", "expected a mapping with count and truth");
    } else {
        check_keys(node, "hypotheses", {"count", "truth"}, problems);
        if (!node["count"]) {
            problems.add("hypotheses.count", "missing");
        } else if (auto c = integer_in(node["count"], "hypotheses.count", 2, 1'000'000, problems)) {
            hypotheses = static_cast<std::size_t>(*c);
        }
        if (!node["truth"]) {
            problems.add("hypotheses.truth", "missing");
        } else if (auto t = integer_in(node["truth"], "hypotheses.truth", 1, hypotheses ? static_cast<long long>(*hypotheses) : 1'000'000,
                                       problems)) {
            truth = static_cast<Hypothesis>(*t - 1);
        }
    }

    // network
    std::optional<std::size_t> agents;
    std::vector<std::vector<std::size_t>> adjacency;
    std::optional<std::vector<std::vector<double>>> explicit_matrix;
    bool metropolis = false;
    if (const auto node = root["network"]; !node) {
        problems.add("network", "missing section");
    } else if (!node.IsMap()) {
        problems.add("network", "expected a mapping");
    } else {
        check_keys(node, "network", {"adjacency", "combination"}, problems);
        const auto adj = node["adjacency"];
        if (!adj) {
            problems.add("network.adjacency", "missing");
        } else if (!adj.IsSequence() || adj.size() == 0) {
            problems.add("network.adjacency", "expected a non-empty list of neighbor lists");
        } else {
            agents = adj.size();
            bool ok = true;
            for (std::size_t k = 0; k < adj.size(); ++k) {
                const std::string where = "network.adjacency[" + std::to_string(k) + "]";
                std::vector<std::size_t> hood;
                if (!adj[k].IsSequence()) {
                    problems.add(where, "expected a list of agent ids");
                    ok = false;
                    continue;
                }
                for (std::size_t j = 0; j < adj[k].size(); ++j) {
                    auto id = integer_in(adj[k][j], where + "[" + std::to_string(j) + "]", 0,
                                         static_cast<long long>(adj.size()) - 1, problems);
                    if (id) {
                        hood.push_back(static_cast<std::size_t>(*id));
                    } else {
                        ok = false;
                    }
                }
                adjacency.push_back(std::move(hood));
            }
            if (!ok) adjacency.clear();
        }
        const auto comb = node["combination"];
        if (!comb) {
            problems.add("network.combination", "missing (use 'metropolis' or a matrix)");
        } else if (comb.IsScalar()) {
            if (comb.Scalar() == "metropolis") {
                metropolis = true;
            } else {
                problems.add("network.combination", "unknown rule '" + comb.Scalar() + "' (use 'metropolis' or a matrix)");
            }
        } else {
            explicit_matrix = number_matrix(comb, "network.combination", problems);
            if (explicit_matrix && agents) {
                bool square = explicit_matrix->size() == *agents;
                for (const auto& row : *explicit_matrix) square = square && row.size() == *agents;
                if (!square) {
                    problems.add("network.combination", "matrix must be " + std::to_string(*agents) + "x" +
                                                            std::to_string(*agents) + " to match network.adjacency");
                    explicit_matrix.reset();
                }
            }
        }
    }

    // likelihoods
    std::vector<LikelihoodGroup> groups;
    if (const auto node = root["likelihoods"]; !node) {
        problems.add("likelihoods", "missing section");
    } else if (!node.IsSequence()) {
        problems.add("likelihoods", "expected a list of likelihood groups");
    } else {
        for (std::size_t g = 0; g < node.size(); ++g) {
            const std::string where = "likelihoods[" + std::to_string(g) + "]";
            const auto item = node[g];
            if (!item.IsMap()) {
                problems.add(where, "expected a mapping");
                continue;
            }
            check_keys(item, where, {"agents", "kind", "means", "rows"}, problems);
            LikelihoodGroup group;
            if (!item["agents"] || !item["agents"].IsSequence()) {
                problems.add(where + ".agents", "expected a list of agent ids");
            } else {
                for (std::size_t j = 0; j < item["agents"].size(); ++j) {
                    auto id = integer_in(item["agents"][j], where + ".agents[" + std::to_string(j) + "]", 0,
                                         agents ? static_cast<long long>(*agents) - 1 : 1'000'000, problems);
                    if (id) group.agents.push_back(static_cast<std::size_t>(*id));
                }
            }
            const auto kind = item["kind"] ? scalar<std::string>(item["kind"], where + ".kind", problems) : std::nullopt;
            if (!item["kind"]) problems.add(where + ".kind", "missing (gaussian or finite)");
            if (kind == "gaussian") {
                if (item["rows"]) problems.add(where + ".rows", "not allowed for kind gaussian");
                if (!item["means"]) {
                    problems.add(where + ".means", "missing");
                } else if (auto means = number_list(item["means"], where + ".means", problems)) {
                    if (hypotheses && means->size() != *hypotheses) {
                        problems.add(where + ".means", "has " + std::to_string(means->size()) + " entries, expected " +
                                                           std::to_string(*hypotheses) + " (hypotheses.count)");
                    } else if (means->size() >= 2) {
                        group.likelihood = AgentLikelihood::gaussian(std::move(*means));
                    }
                }
            } else if (kind == "finite") {
                if (item["means"]) problems.add(where + ".means", "not allowed for kind finite");
                if (!item["rows"]) {
                    problems.add(where + ".rows", "missing");
                } else if (auto rows = number_matrix(item["rows"], where + ".rows", problems)) {
                    bool ok = true;
                    if (hypotheses && rows->size() != *hypotheses) {
                        problems.add(where + ".rows", "has " + std::to_string(rows->size()) + " rows, expected " +
                                                          std::to_string(*hypotheses) + " (hypotheses.count)");
                        ok = false;
                    }
                    for (std::size_t r = 0; r < rows->size(); ++r) {
                        if ((*rows)[r].size() != rows->front().size()) {
                            problems.add(where + ".rows[" + std::to_string(r) + "]", "alphabet size differs from row 0");
                            ok = false;
                        }
                        const auto before = problems.empty();
                        check_pmf((*rows)[r], where + ".rows[" + std::to_string(r) + "]", problems);
                        if (before && !problems.empty()) ok = false;
                    }
                    if (ok && rows->size() >= 2 && !rows->front().empty()) {
                        try {
                            group.likelihood = AgentLikelihood::finite(std::move(*rows));
                        } catch (const std::exception& e) {
                            problems.add(where + ".rows", e.what());
                        }
                    }
                }
            } else if (kind) {
                problems.add(where + ".kind", "unknown kind '" + *kind + "' (gaussian or finite)");
            }
            groups.push_back(std::move(group));
        }
    }

    // protocol
    std::optional<Protocol> protocol;
    if (const auto node = root["protocol"]; !node) {
        problems.add("protocol", "missing section");
    } else if (!node.IsMap()) {
        problems.add("protocol", "expected a mapping");
    } else {
        check_keys(node, "protocol", {"kind", "shared", "trend"}, problems);
        const auto kind = node["kind"] ? scalar<std::string>(node["kind"], "protocol.kind", problems) : std::nullopt;
        if (!node["kind"]) problems.add("protocol.kind", "missing (full, fixed_partial or trending)");
        if (kind && *kind != "trending" && node["trend"]) {
            problems.add("protocol.trend", "only allowed for kind trending");
        }
        if (kind && *kind != "fixed_partial" && node["shared"]) {
            problems.add("protocol.shared", "only allowed for kind fixed_partial");
        }
        if (kind == "full") {
            protocol = FullSharing{};
        } else if (kind == "fixed_partial") {
            if (!node["shared"]) {
                problems.add("protocol.shared", "missing (the fixed shared hypothesis)");
            } else if (auto s = integer_in(node["shared"], "protocol.shared", 1,
                                           hypotheses ? static_cast<long long>(*hypotheses) : 1'000'000, problems)) {
                protocol = FixedPartial{static_cast<Hypothesis>(*s - 1)};
            }
        } else if (kind == "trending") {
            if (!node["trend"]) {
                problems.add("protocol.trend", "missing (required for kind trending)");
            } else if (auto trend = number_list(node["trend"], "protocol.trend", problems)) {
                bool ok = true;
                if (hypotheses && trend->size() != *hypotheses) {
                    problems.add("protocol.trend", "has " + std::to_string(trend->size()) + " entries, expected " +
                                                       std::to_string(*hypotheses) + " (hypotheses.count)");
                    ok = false;
                }
                const bool before = problems.empty();
                check_pmf(*trend, "protocol.trend", problems);
                if (before && !problems.empty()) ok = false;
                if (ok) {
                    try {
                        protocol = TrendingBootstrap{TrendDistribution(*trend)};
                    } catch (const std::exception& e) {
                        problems.add("protocol.trend", e.what());
                    }
                }
            }
        } else if (kind) {
            problems.add("protocol.kind", "unknown kind '" + *kind + "' (full, fixed_partial or trending)");
        }
    }

    // beliefs
    bool allow_zero = false;
    std::optional<std::vector<std::vector<double>>> initial;
    if (const auto node = root["beliefs"]; node) {
        if (!node.IsMap()) {
            problems.add("beliefs", "expected a mapping");
        } else {
            check_keys(node, "beliefs", {"initial", "allow_zero"}, problems);
            if (node["allow_zero"]) allow_zero = scalar<bool>(node["allow_zero"], "beliefs.allow_zero", problems).value_or(false);
            if (const auto init = node["initial"]; init && !(init.IsScalar() && init.Scalar() == "uniform")) {
                initial = number_matrix(init, "beliefs.initial", problems);
                if (initial) {
                    if (agents && initial->size() != *agents) {
                        problems.add("beliefs.initial", "has " + std::to_string(initial->size()) + " beliefs, expected " +
                                                            std::to_string(*agents) + " (one per agent)");
                    }
                    for (std::size_t k = 0; k < initial->size(); ++k) {
                        const std::string where = "beliefs.initial[" + std::to_string(k) + "]";
                        if (hypotheses && (*initial)[k].size() != *hypotheses) {
                            problems.add(where, "has " + std::to_string((*initial)[k].size()) + " entries, expected " +
                                                    std::to_string(*hypotheses));
                        }
                        check_pmf((*initial)[k], where, problems);
                    }
                }
            }
        }
    }

    // simulation
    std::size_t horizon = 2000;
    std::uint64_t seed = 1;
    std::size_t runs = 1;
    RecordStride stride;
    if (const auto node = root["simulation"]; node) {
        if (!node.IsMap()) {
            problems.add("simulation", "expected a mapping");
        } else {
            check_keys(node, "simulation", {"horizon", "seed", "runs", "record"}, problems);
            if (node["horizon"]) {
                if (auto v = integer_in(node["horizon"], "simulation.horizon", 0, 100'000'000, problems)) horizon = static_cast<std::size_t>(*v);
            }
            if (node["seed"]) {
                if (auto v = scalar<std::uint64_t>(node["seed"], "simulation.seed", problems)) seed = *v;
            }
            if (node["runs"]) {
                if (auto v = integer_in(node["runs"], "simulation.runs", 1, 1'000'000, problems)) runs = static_cast<std::size_t>(*v);
            }
            if (const auto rec = node["record"]; rec) {
                if (!rec.IsMap()) {
                    problems.add("simulation.record", "expected a mapping with dense_until and every");
                } else {
                    check_keys(rec, "simulation.record", {"dense_until", "every"}, problems);
                    if (rec["dense_until"]) {
                        if (auto v = integer_in(rec["dense_until"], "simulation.record.dense_until", 0, 100'000'000, problems)) {
                            stride.dense_until = static_cast<std::size_t>(*v);
                        }
                    }
                    if (rec["every"]) {
                        if (auto v = integer_in(rec["every"], "simulation.record.every", 1, 100'000'000, problems)) {
                            stride.every = static_cast<std::size_t>(*v);
                        }
                    }
                }
            }
        }
    }

    // Cross-checks that need several sections.
    std::vector<std::optional<AgentLikelihood>> per_agent;
    if (agents) {
        per_agent.resize(*agents);
        std::vector<std::size_t> cover(*agents, 0);
        for (const auto& group : groups) {
            for (std::size_t k : group.agents) {
                if (k < *agents) {
                    ++cover[k];
                    if (group.likelihood) per_agent[k] = group.likelihood;
                }
            }
        }
        for (std::size_t k = 0; k < *agents; ++k) {
            if (cover[k] == 0) problems.add("likelihoods", "agent " + std::to_string(k) + " has no likelihood group");
            if (cover[k] > 1) problems.add("likelihoods", "agent " + std::to_string(k) + " appears in several groups");
        }
    }
    if (!problems.empty()) problems.raise();

    // Build and validate the domain objects.
    std::optional<Topology> topology;
    try {
        topology = Topology::from_adjacency(adjacency);
    } catch (const std::exception& e) {
        problems.add("network.adjacency", e.what());
    }
    std::optional<CombinationMatrix> combination;
    if (topology) {
        try {
            if (metropolis) {
                combination = build_metropolis(*topology);
            } else {
                Eigen::MatrixXd m(static_cast<Eigen::Index>(*agents), static_cast<Eigen::Index>(*agents));
                for (std::size_t r = 0; r < *agents; ++r) {
                    for (std::size_t c = 0; c < *agents; ++c) {
                        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (*explicit_matrix)[r][c];
                    }
                }
                combination = CombinationMatrix::from_entries(m, *topology);
            }
        } catch (const std::exception& e) {
            problems.add("network.combination", e.what());
        }
    }
    std::vector<AgentLikelihood> likelihoods;
    for (auto& l : per_agent) likelihoods.push_back(*l);
    ObservationModel model(std::move(likelihoods));
    try {
        model.require_finite_informativeness(*truth);
    } catch (const std::exception& e) {
        problems.add("likelihoods", e.what());
    }

    std::vector<Belief> beliefs;
    if (initial) {
        for (std::size_t k = 0; k < initial->size(); ++k) {
            const auto& p = (*initial)[k];
            if (!allow_zero) {
                for (double x : p) {
                    if (x == 0.0) {
                        problems.add("beliefs.initial[" + std::to_string(k) + "]",
                                     "zero entry; initial beliefs must be strictly positive unless beliefs.allow_zero is set");
                        break;
                    }
                }
            }
            try {
                beliefs.push_back(Belief::from_probabilities(p));
            } catch (const std::exception& e) {
                problems.add("beliefs.initial[" + std::to_string(k) + "]", e.what());
            }
        }
    } else {
        beliefs.assign(*agents, Belief::uniform(*hypotheses));
    }
    if (!problems.empty()) problems.raise();

    ExperimentConfig config{*topology,
                            SocialNetwork{*combination, std::move(model), *truth},
                            *protocol,
                            std::move(beliefs),
                            horizon,
                            seed,
                            runs,
                            stride,
                            allow_zero};
    try {
        config.validate();
    } catch (const std::exception& e) {
        problems.add("config", e.what());
        problems.raise();
    }
    return config;
}

}  // namespace social_learning
