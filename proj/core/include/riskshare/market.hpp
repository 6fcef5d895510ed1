#pragma once

#include "riskshare/allocation.hpp"
#include "riskshare/distortion.hpp"
#include "riskshare/distribution.hpp"
#include "riskshare/quadrature.hpp"
#include "riskshare/solver.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace riskshare {

/// Configuration schema violation: which field and why.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field, std::string reason)
        : std::runtime_error(field + ": " + reason), field_(std::move(field)),
          reason_(std::move(reason)) {}
    [[nodiscard]] const std::string& field() const { return field_; }
    [[nodiscard]] const std::string& reason() const { return reason_; }

  private:
    std::string field_;
    std::string reason_;
};

/// Initial position X_i = theta * S. When every agent is proportional the
/// thetas must sum to 1 within 1e-9.
struct ProportionalShare {
    double theta;
};

/// Initial risk rho_i(X_i) supplied directly.
struct PrecomputedRisk {
    double rho_x;
};

/// Initial position read from column `column` of a joint sample matrix
/// (comma-separated, no header, one row per aggregate sample). Requires an
/// empirical aggregate; every row must sum to the matching aggregate sample
/// within 1e-9.
struct EmpiricalColumn {
    std::filesystem::path path;
    std::size_t column;
};

using InitialPosition = std::variant<ProportionalShare, PrecomputedRisk, EmpiricalColumn>;

struct AgentConfig {
    std::string label;
    DistortionSet set;
    InitialPosition position;
};

struct MarketConfig {
    RiskDistribution aggregate;
    std::vector<double> aggregate_samples_raw{}; // file order, empirical aggregates only
    std::vector<AgentConfig> agents{};           // at least one
    SolverOptions solver{};
    QuadratureConfig quad{};
    TieRule tie_rule = TieRule::EqualSplit;
    std::vector<double> tie_weights{}; // WeightVector rule only
    double truncation_mass = 1e-9;
    int curve_grid = 512;
    double verify_rel_tol = 1e-5;
};

/// Parse and validate a market config. Unknown keys, missing fields, type
/// mismatches and parameter-range violations all raise ConfigError. File
/// paths inside the config resolve relative to the config's directory.
/// truncation_mass_override replaces the config's value before the
/// aggregate distribution is built (the CLI's --truncation-mass flag).
MarketConfig load_market_config(const std::filesystem::path& path,
                                std::optional<double> truncation_mass_override = {});

/// rho_i(X_i) per agent: theta * rho_i(S) for proportional shares (positive
/// homogeneity), the given value for precomputed risks, the coherent risk of
/// the column samples for empirical columns (after row-sum validation).
std::vector<double> initial_risks(const MarketConfig& config);

} // namespace riskshare
