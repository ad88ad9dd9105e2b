#pragma once

// JSON-configured command runner behind the herdsim tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "herd/experiments.hpp"
#include "herd/integrator.hpp"
#include "herd/model.hpp"
#include "herd/regimes.hpp"

namespace herd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

inline constexpr const char* kVersion = "0.1.0";

/// Invalid configuration; `key` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& why)
        : std::runtime_error(key + ": " + why), key_(std::move(key)) {}
    [[nodiscard]] const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct LimitCycleSpec {
    double horizon = 2000.0;
};

struct RunConfig {
    std::string command;
    std::optional<ModelSpec> model;
    std::optional<State> initial;
    IntegratorConfig integrator{};
    std::optional<Scenario> scenario;
    std::optional<BasinGrid> grid;
    BasinOptions basin_options{};
    std::optional<SweepSpec> sweep;
    std::optional<LimitCycleSpec> limit_cycle;
    /// The configuration with every default filled in; echoed in outputs and
    /// hashed.
    nlohmann::json effective;
};

/// Validate a JSON configuration. Throws ConfigError.
[[nodiscard]] RunConfig parse_config(const nlohmann::json& config);

/// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
[[nodiscard]] std::string config_hash(const nlohmann::json& config);

struct Invocation {
    std::string command;
    std::filesystem::path config;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
};

/// Run one command and write its files into `inv.out`. Diagnostics go to
/// `log`. Returns the process exit code.
int run(const Invocation& inv, std::ostream& log);

}  // namespace herd::cli
