#include "stochctl/acceptance/criteria.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"stochctl acceptance suite"};
    stochctl::acceptance::AcceptanceOptions options;
    std::vector<std::string> only;
    app.add_option("--workers", options.workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", options.seed, "base seed");
    app.add_option("--only", only, "criteria to run (default all)");
    CLI11_PARSE(app, argc, argv);
    if (only.empty()) {
        only = stochctl::acceptance::criterion_ids();
    }
    int failed = 0;
    for (const auto& id : only) {
        const auto r = stochctl::acceptance::run_criterion(id, options);
        std::cout << stochctl::acceptance::format_result(r) << std::endl;
        failed += !r.pass;
    }
    std::cout << (only.size() - failed) << " of " << only.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
