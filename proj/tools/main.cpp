#include <iostream>

#include "CLI11.hpp"
#include "blowup/errors.hpp"
#include "blowup/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Measure-driven blow-up constructions and their verification suites"};
    app.require_subcommand(1);

    blowup::RunConfig cfg;
    std::map<std::string, std::string> flags;
    std::string config_path;

    auto* run = app.add_subcommand("run", "build a construction, verify it, write datasets and report.json");
    auto add = [&](const std::string& name, const std::string& key, const std::string& help) {
        run->add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
    };
    run->add_option("--config", config_path, "key = value file; flags override it");
    add("--construction", "construction", "denjoy | qpf | qpf-filled | general | sharkovsky | rees");
    add("--base", "base", "rotation | torus2 | odometer (general only)");
    add("--pinch", "pinch", "one-sided | oscillating");
    add("--N", "N", "truncation order, -1 disables the blow-up");
    add("--out", "out", "output directory");
    add("--seed", "seed", "seed for randomized checks");
    add("--grid", "grid", "dataset resolution");
    add("--depth", "depth", "attractor depth");
    add("--samples", "samples", "minimal-set sample size");
    bool verify_only = false;
    run->add_flag("--verify-only", verify_only, "run the property suite only, no datasets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) blowup::apply_config(cfg, blowup::read_config_file(config_path));
        blowup::apply_config(cfg, flags);
        if (verify_only) cfg.verify_only = true;
        blowup::RunResult r = blowup::run(cfg, std::cerr);
        std::cout << (r.pass ? "all properties pass" : "some properties FAIL") << " (" << cfg.out
                  << "/report.json)\n";
        if (!r.pass) {
            for (const auto& e : r.report["properties"])
                if (!e["pass"].get<bool>()) std::cout << "  FAIL " << e["id"].get<std::string>() << "\n";
        }
        return r.pass ? 0 : 1;
    } catch (const blowup::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const blowup::Error& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 2;
    }
}
