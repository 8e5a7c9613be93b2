#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "social_learning/engine.hpp"

namespace social_learning {

// Every problem found in a config file, not just the first.
class ConfigError : public std::runtime_error {
   public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

   private:
    std::vector<std::string> problems_;
};

// Parses the YAML experiment format documented in README.md. Unknown keys
// are errors. Throws ConfigError.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& source = "<config>");

}  // namespace social_learning
