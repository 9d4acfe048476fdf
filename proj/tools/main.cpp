// noma-coexist: URLLC/eMBB coexistence scheduling for downlink MIMO-NOMA
// Copyright (C) 2026 the noma-coexist authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <iostream>

#include "CLI11.hpp"
#include "noma/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"URLLC/eMBB coexistence simulator for downlink MIMO-NOMA"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string results_dir;
    long seed = -1;
    int workers = 0;
    bool proxy = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "override the base seed");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--workers", workers, "worker threads (0 = hardware)");
        cmd->add_flag("--proxy-oour", proxy,
                      "rank puncture candidates by a cheap closed-form proxy");
    };

    auto* run = app.add_subcommand("run", "simulate one transmission period per seed");
    run->add_option("config", config_path, "scenario configuration file")->required();
    add_common(run);

    auto* sweep = app.add_subcommand("sweep", "run every sweep point in the configuration");
    sweep->add_option("config", config_path, "scenario configuration file")->required();
    add_common(sweep);

    auto* verify = app.add_subcommand("verify", "re-audit a results directory");
    verify->add_option("dir", results_dir, "results directory")->required();

    auto* selftest = app.add_subcommand("selftest", "run the condensed invariant suite");
    (void)selftest;

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("run") || app.got_subcommand("sweep")) {
            auto spec = noma::experiment::parse_config(config_path);
            if (app.got_subcommand("run")) spec.axes.clear();
            if (seed >= 0) spec.base.seed = static_cast<std::uint64_t>(seed);
            if (!out_dir.empty()) spec.out_dir = out_dir;
            if (workers > 0) spec.workers = workers;
            if (proxy) spec.base.proxy_preference = true;
            return noma::experiment::run_experiment(spec);
        }
        if (app.got_subcommand("verify")) {
            const auto violations = noma::experiment::verify_run(results_dir);
            for (const auto& v : violations) std::cout << "violation: " << v << "\n";
            std::cout << (violations.empty() ? "clean" : "violations found") << " ("
                      << violations.size() << ")\n";
            return violations.empty() ? 0 : 1;
        }
        if (app.got_subcommand("selftest")) {
            const int failures = noma::experiment::selftest(std::cout);
            std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED") << "\n";
            return failures == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
