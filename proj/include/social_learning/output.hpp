#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "social_learning/engine.hpp"

namespace social_learning {

// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double x);

// time,agent,hypothesis,log_belief,tau,Q with 1-based hypotheses and tau
// (tau empty when the protocol has no trend).
void write_trace_csv(std::ostream& out, const RunTrace& trace);
// time,agent,hypothesis,mean_log_belief,mean_Q averaged over runs.
void write_mean_trace_csv(std::ostream& out, const ExperimentResult& result);

nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentResult& result);

// Tidy files for plotting:
//   network.csv  from,to,weight
//   beliefs.csv  time,agent,hypothesis,belief
//   rates.csv    time,agent,hypothesis,rate,d_ave  (rate = r_{k,i}(h) / i)
//   tau.csv      time,tau
void write_plot_data(const std::filesystem::path& dir, const ExperimentConfig& config, const RunTrace& trace);

// trace.csv (run 0), trace_run<r>.csv for later runs, mean_trace.csv when
// runs > 1, summary.json and the plot files.
void write_experiment(const std::filesystem::path& dir, const ExperimentConfig& config, const ExperimentResult& result);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace social_learning
