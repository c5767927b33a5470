#include <cstdio>
#include <string>

#include "pairdeg/acceptance.hpp"

int main(int argc, char** argv) {
    pairdeg::AcceptanceOptions options;
    for (int i = 1; i < argc; ++i) options.only.push_back(std::stoi(argv[i]));
    const auto results = pairdeg::run_acceptance(options);
    int failed = 0;
    for (const auto& r : results) {
        std::puts(pairdeg::format_result(r).c_str());
        if (!r.passed) ++failed;
    }
    std::printf("%zu criteria, %d failed\n", results.size(), failed);
    return failed == 0 ? 0 : 1;
}
