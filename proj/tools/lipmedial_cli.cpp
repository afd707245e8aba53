#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lipmedial/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Medial-axis structure and Lipschitz implicit-function verifier"};
    app.require_subcommand(1);
    app.set_version_flag("--version", lipmedial::kVersion);

    auto* run = app.add_subcommand("run", "Run a scenario config and write its report and node table");
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> resolution;
    std::optional<std::string> out_dir;
    run->add_option("--config", config_path, "Scenario config (JSON)")->required();
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--resolution", resolution, "Override the grid resolution")->check(CLI::Range(2, 100000));
    run->add_option("--out-dir", out_dir, "Override the output directory");

    auto* pre = app.add_subcommand("preset", "Print or save a built-in scenario config");
    std::string preset_name;
    std::optional<std::string> preset_out;
    bool list = false;
    pre->add_option("name", preset_name, "Preset name");
    pre->add_option("--out", preset_out, "Write the config here instead of stdout");
    pre->add_flag("--list", list, "List the available presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (pre->parsed()) {
            if (list || preset_name.empty()) {
                for (const auto& n : lipmedial::preset_names()) std::cout << n << '\n';
                return list ? 0 : 2;
            }
            const auto text = lipmedial::to_json(lipmedial::preset(preset_name)).dump(2) + "\n";
            if (preset_out) {
                lipmedial::write_atomically(*preset_out, text);
            } else {
                std::cout << text;
            }
            return 0;
        }

        auto cfg = lipmedial::load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (resolution) {
            cfg.resolution = *resolution;
            cfg.lift.resolution = *resolution;
        }
        if (out_dir) cfg.out_dir = *out_dir;
        const auto result = lipmedial::run(cfg);

        std::cout << "scenario " << lipmedial::to_string(cfg.scenario) << '\n';
        for (const auto& c : result.report["certificates"]) {
            std::cout << "  " << c["name"].get<std::string>() << ": " << (c["holds"].get<bool>() ? "holds" : "fails")
                      << " (margin " << c["margin"].dump() << ")\n";
        }
        std::cout << "report " << result.report_path.string() << '\n'
                  << "nodes  " << result.nodes_path.string() << '\n';
        return 0;
    } catch (const lipmedial::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
