#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sdpsim/sdpsim.hpp"

// sdp-sim: scenario validation, figure sweeps, and the broker demo.
// Exit codes: 0 success, 1 usage, 2 validation, 3 I/O.

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

int exit_code_for(const sdpsim::ScenarioError& e) {
    return e.kind == sdpsim::ScenarioError::Kind::Io ? kExitIo : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-domain SDN service delivery simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string figure = "fig4";
    std::string out_path;
    double theta_ms = -1.0;
    long domains = -1;
    double delay_from_ms = -1.0, delay_to_ms = -1.0, delay_step_ms = -1.0;
    double fig8_delay_ms = -1.0;

    auto* run = app.add_subcommand("run", "Run a figure sweep and write CSV");
    run->add_option("scenario", scenario_path, "Scenario file")->required();
    run->add_option("--figure", figure, "fig4, fig6, fig7, or fig8")->required();
    run->add_option("--theta-ms", theta_ms,
                    "Per-domain latency (fig4/6/7) or total path latency (fig8)");
    run->add_option("--domains", domains, "Number of domains (fig8: n sweep bound)");
    run->add_option("--delay-from-ms", delay_from_ms, "Sweep start");
    run->add_option("--delay-to-ms", delay_to_ms, "Sweep end");
    run->add_option("--delay-step-ms", delay_step_ms, "Sweep step");
    run->add_option("--fig8-delay-ms", fig8_delay_ms, "Fixed delay ceiling for fig8");
    run->add_option("--out", out_path, "Output CSV path (default: stdout)");

    auto* demo = app.add_subcommand("demo", "Run the publish/discover/allocate walk-through");
    demo->add_option("scenario", scenario_path, "Scenario file")->required();

    auto* validate = app.add_subcommand("validate", "Validate a scenario file");
    validate->add_option("scenario", scenario_path, "Scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        sdpsim::Scenario scenario = sdpsim::load_scenario(scenario_path);

        if (validate->parsed()) {
            std::cout << "ok: " << scenario.domains.size() << " domains, "
                      << scenario.flows.size() << " flows, "
                      << scenario.demands.size() << " demands\n";
            return kExitOk;
        }
        if (demo->parsed()) {
            for (const auto& line : sdpsim::run_demo(scenario))
                std::cout << line << "\n";
            return kExitOk;
        }

        sdpsim::FigureOverrides overrides;
        if (theta_ms >= 0.0) overrides.theta = theta_ms * sdpsim::kMs;
        if (domains > 0) overrides.domains = static_cast<std::size_t>(domains);
        if (delay_from_ms >= 0.0) overrides.delay_from = delay_from_ms * sdpsim::kMs;
        if (delay_to_ms >= 0.0) overrides.delay_to = delay_to_ms * sdpsim::kMs;
        if (delay_step_ms > 0.0) overrides.delay_step = delay_step_ms * sdpsim::kMs;
        if (fig8_delay_ms > 0.0) overrides.fig8_delay = fig8_delay_ms * sdpsim::kMs;

        auto table = sdpsim::run_figure(scenario, figure, overrides);
        if (out_path.empty()) {
            std::cout << table.to_csv();
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) {
                std::cerr << "error: cannot write " << out_path << "\n";
                return kExitIo;
            }
            out << table.to_csv();
        }
        return kExitOk;
    } catch (const sdpsim::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
