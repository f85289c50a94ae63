// Runs the acceptance criteria and prints one PASS/FAIL line each.
// Usage: acceptance [--seed N] [id ...]
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "gmtlab/acceptance.hpp"

int main(int argc, char** argv) {
    namespace acc = gmtlab::acceptance;
    std::uint64_t seed = acc::kDefaultSeed;
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--seed" && i + 1 < argc)
            seed = std::strtoull(argv[++i], nullptr, 10);
        else
            ids.push_back(std::atoi(a.c_str()));
    }
    const auto results = acc::run_suite(ids, seed, [](const acc::CriterionResult& r) {
        std::printf("%s\n", acc::format_line(r).c_str());
        std::fflush(stdout);
    });
    int pass = 0;
    for (const auto& r : results) pass += r.pass;
    std::printf("%d/%zu criteria PASS%s\n", pass, results.size(),
                acc::suite_ok(results) ? "; remaining failures are documented" : "; undocumented FAIL present");
    return acc::suite_ok(results) ? 0 : 1;
}
