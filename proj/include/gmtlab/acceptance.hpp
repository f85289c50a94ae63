#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace gmtlab::acceptance {

inline constexpr int kCriteria = 13;
inline constexpr std::uint64_t kDefaultSeed = 20240601;

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    /// Failed, but the failure is known and analysed in the README.
    bool documented_failure = false;
    double seconds = 0.0;
    double budget = 0.0;  ///< runtime limit in seconds, part of the verdict
    std::string summary;
    std::vector<std::pair<std::string, double>> metrics;
};

/// Criteria whose FAIL is expected and explained in the README.
bool is_documented_failure(int id);

/// Runs one criterion (1..kCriteria). Exceptions become a FAIL with the message.
CriterionResult run_criterion(int id, std::uint64_t seed = kDefaultSeed);

/// Runs the listed criteria (all when empty), calling `progress` after each.
std::vector<CriterionResult> run_suite(std::vector<int> ids = {}, std::uint64_t seed = kDefaultSeed,
                                       const std::function<void(const CriterionResult&)>& progress = {});

/// "[ 7] PASS  Riesz-system constant  (12.3 s)  summary"
std::string format_line(const CriterionResult& r);

/// True when every criterion passed or failed in a documented way.
bool suite_ok(const std::vector<CriterionResult>& results);

}  // namespace gmtlab::acceptance
