#include "gmtlab/measure_io.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gmtlab {

namespace {

static_assert(std::endian::native == std::endian::little, "binary measure IO assumes a little-endian host");

constexpr char kMagic[4] = {'G', 'M', 'T', 'M'};

template <class T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw InvalidArgument("truncated binary measure");
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

}  // namespace

std::string measure_to_json(const DiscreteMeasure& mu) {
    nlohmann::json j;
    j["dim"] = mu.dim();
    nlohmann::json pts = nlohmann::json::array();
    for (std::size_t i = 0; i < mu.size(); ++i)
        pts.push_back(std::vector<double>(mu.point(i), mu.point(i) + mu.dim()));
    j["points"] = std::move(pts);
    j["weights"] = std::vector<double>(mu.weights().begin(), mu.weights().end());
    return j.dump();
}

DiscreteMeasure measure_from_json(const std::string& text, Duplicates duplicates) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument(std::string("measure JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("dim") || !j.contains("points") || !j.contains("weights"))
        throw InvalidArgument("measure JSON needs dim, points and weights");
    const int d = j["dim"].get<int>();
    std::vector<double> coords;
    for (const auto& p : j["points"]) {
        if (!p.is_array() || static_cast<int>(p.size()) != d)
            throw InvalidArgument("measure JSON: point of wrong dimension");
        for (const auto& c : p) coords.push_back(c.get<double>());
    }
    auto weights = j["weights"].get<std::vector<double>>();
    return DiscreteMeasure(d, std::move(coords), std::move(weights), duplicates);
}

std::string measure_to_binary(const DiscreteMeasure& mu) {
    std::string out(kMagic, 4);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(mu.dim()));
    put<std::uint64_t>(out, mu.size());
    for (int k = 0; k < mu.dim(); ++k)
        for (std::size_t i = 0; i < mu.size(); ++i) put<double>(out, mu.point(i)[k]);
    for (double w : mu.weights()) put<double>(out, w);
    return out;
}

DiscreteMeasure measure_from_binary(const std::string& bytes, Duplicates duplicates) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw InvalidArgument("not a GMTM binary measure");
    std::size_t pos = 4;
    const auto d = get<std::uint32_t>(bytes, pos);
    const auto n = get<std::uint64_t>(bytes, pos);
    if (d == 0) throw InvalidArgument("measure dimension must be >= 1");
    if ((bytes.size() - pos) / 8 != (static_cast<std::uint64_t>(d) + 1) * n || (bytes.size() - pos) % 8)
        throw InvalidArgument("binary measure size does not match header");
    std::vector<double> coords(n * d), weights(n);
    for (std::uint32_t k = 0; k < d; ++k)
        for (std::uint64_t i = 0; i < n; ++i) coords[i * d + k] = get<double>(bytes, pos);
    for (std::uint64_t i = 0; i < n; ++i) weights[i] = get<double>(bytes, pos);
    return DiscreteMeasure(static_cast<int>(d), std::move(coords), std::move(weights), duplicates);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidArgument("cannot write " + tmp);
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw InvalidArgument("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

DiscreteMeasure read_measure(const std::string& path, Duplicates duplicates) {
    const std::string bytes = read_file(path);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0)
        return measure_from_binary(bytes, duplicates);
    return measure_from_json(bytes, duplicates);
}

void write_measure(const DiscreteMeasure& mu, const std::string& path) {
    const bool binary = path.size() >= 5 && path.compare(path.size() - 5, 5, ".gmtm") == 0;
    write_file_atomic(path, binary ? measure_to_binary(mu) : measure_to_json(mu));
}

}  // namespace gmtlab
