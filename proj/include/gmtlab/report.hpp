#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace gmtlab {

class DiscreteMeasure;

/// Library version, set by the build.
const char* version();

enum class RunStatus { complete, pass, violation };
std::string to_string(RunStatus s);

/// Envelope shared by every CLI report: tool, version, command, parameters,
/// measure identity, wall time, status and the command's result payload.
class Report {
public:
    explicit Report(std::string command);

    nlohmann::json& parameters() { return parameters_; }
    nlohmann::json& result() { return result_; }
    const nlohmann::json& result() const { return result_; }

    /// Records the measure file: path, FNV-1a of its bytes, point-set fingerprint.
    void set_measure(const std::string& path, const std::string& file_bytes, const DiscreteMeasure& mu);
    void set_status(RunStatus s) { status_ = s; }
    RunStatus status() const { return status_; }

    /// Adds a line to the human summary (insertion order).
    void line(const std::string& key, const std::string& value);
    void line(const std::string& key, double value);

    /// Stops the wall clock and returns the JSON document.
    nlohmann::json to_json() const;
    /// Aligned "key : value" text.
    std::string summary() const;

    /// Writes `<path>` (JSON) and `<path minus .json>.txt` (summary), each atomically.
    void write(const std::string& path) const;

private:
    std::string command_;
    nlohmann::json parameters_ = nlohmann::json::object();
    nlohmann::json result_ = nlohmann::json::object();
    nlohmann::json measure_;
    RunStatus status_ = RunStatus::complete;
    std::vector<std::pair<std::string, std::string>> lines_;
    std::chrono::steady_clock::time_point start_;
};

/// %.17g, so values survive a text round trip.
std::string exact(double v);

}  // namespace gmtlab
