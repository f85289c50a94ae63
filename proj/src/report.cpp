#include "gmtlab/report.hpp"

#include <algorithm>
#include <cstdio>

#include "gmtlab/measure.hpp"
#include "gmtlab/measure_io.hpp"

#ifndef GMTLAB_VERSION
#define GMTLAB_VERSION "0.0.0"
#endif

namespace gmtlab {

const char* version() { return GMTLAB_VERSION; }

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::complete: return "complete";
        case RunStatus::pass: return "pass";
        case RunStatus::violation: return "violation";
    }
    return "?";
}

std::string exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Report::Report(std::string command) : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

void Report::set_measure(const std::string& path, const std::string& file_bytes, const DiscreteMeasure& mu) {
    measure_ = {{"path", path},
                {"file_hash", hex64(fnv1a(file_bytes.data(), file_bytes.size()))},
                {"fingerprint", hex64(mu.fingerprint())},
                {"dim", mu.dim()},
                {"points", mu.size()},
                {"total_mass", mu.total_mass()}};
}

void Report::line(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }

void Report::line(const std::string& key, double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    lines_.emplace_back(key, buf);
}

nlohmann::json Report::to_json() const {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    nlohmann::json j = {{"tool", "gmtlab"},
                        {"version", version()},
                        {"command", command_},
                        {"parameters", parameters_},
                        {"measure", measure_.is_null() ? nlohmann::json(nullptr) : measure_},
                        {"wall_time_s", wall},
                        {"status", to_string(status_)},
                        {"result", result_}};
    return j;
}

std::string Report::summary() const {
    std::size_t width = 6;
    for (const auto& [k, v] : lines_) width = std::max(width, k.size());
    std::string out = "gmtlab " + command_ + "\n";
    auto add = [&](const std::string& k, const std::string& v) {
        out += "  " + k + std::string(width - k.size(), ' ') + " : " + v + "\n";
    };
    if (!measure_.is_null()) {
        add("measure", measure_["path"].get<std::string>() + " (" + std::to_string(measure_["points"].get<std::size_t>()) +
                           " points, d = " + std::to_string(measure_["dim"].get<int>()) + ")");
    }
    for (const auto& [k, v] : lines_) add(k, v);
    add("status", to_string(status_));
    return out;
}

void Report::write(const std::string& path) const {
    write_file_atomic(path, to_json().dump(2) + "\n");
    std::string txt = path;
    if (txt.size() > 5 && txt.compare(txt.size() - 5, 5, ".json") == 0) txt.resize(txt.size() - 5);
    write_file_atomic(txt + ".txt", summary());
}

}  // namespace gmtlab
