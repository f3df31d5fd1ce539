#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include <slgfm/errors.hpp>

#include "commands.hpp"
#include "config.hpp"

namespace {

struct CliArgs {
    std::string config;
    std::string out = ".";
    std::string law;
    std::string ad;
    bool hz = false;
};

void add_common_options(CLI::App* cmd, CliArgs& args) {
    cmd->add_option("--config", args.config, "scenario file (JSON)")
        ->required();
    cmd->add_option("--out", args.out, "output directory")
        ->capture_default_str();
    cmd->add_option("--law", args.law,
                    "override the control law: droop | droop-i")
        ->check(CLI::IsMember({"droop", "droop-i"}));
    cmd->add_option(
           "--ad", args.ad,
           "override active damping: none | inv-current | grid-current | "
           "cap-voltage (kinds not in the config use the bundled design)")
        ->check(CLI::IsMember(
            {"none", "inv-current", "grid-current", "cap-voltage"}));
    cmd->add_flag("--hz", args.hz, "emit frequency columns in Hz");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "High-frequency stability analysis of single-loop grid-forming "
        "converters: pole tables, Routh and Nyquist classification, margins, "
        "and nonlinear time-domain simulation."};
    app.require_subcommand(1);

    CliArgs args;
    using Handler = void (*)(const slgfm_cli::ScenarioConfig&,
                             const slgfm_cli::OutputOptions&);
    const std::pair<const char*, Handler> commands[] = {
        {"poles", &slgfm_cli::cmd_poles},
        {"routh", &slgfm_cli::cmd_routh},
        {"nyquist", &slgfm_cli::cmd_nyquist},
        {"margins", &slgfm_cli::cmd_margins},
        {"verdict", &slgfm_cli::cmd_verdict},
        {"simulate", &slgfm_cli::cmd_simulate},
        {"sweep", &slgfm_cli::cmd_sweep},
    };
    const char* descriptions[] = {
        "open- and closed-loop pole table of the reactive loop",
        "symbolic-epsilon Routh table of the lossless characteristic factor",
        "Nyquist contour samples and the Z = N + P verdict",
        "classical gain/phase margins with a reliability flag",
        "closed-loop stability verdict only",
        "nonlinear dq time-domain run with spectrum report",
        "one-parameter sweep of poles and verdicts",
    };
    Handler selected = nullptr;
    for (std::size_t i = 0; i < std::size(commands); ++i) {
        CLI::App* sub = app.add_subcommand(commands[i].first, descriptions[i]);
        add_common_options(sub, args);
        const Handler h = commands[i].second;
        sub->callback([&selected, h]() { selected = h; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        slgfm_cli::ScenarioConfig cfg = slgfm_cli::load_config(args.config);
        slgfm_cli::apply_law_override(cfg, args.law);
        slgfm_cli::apply_ad_override(cfg, args.ad);
        slgfm_cli::check_law_params(cfg);

        slgfm_cli::OutputOptions out;
        out.out_dir = args.out;
        out.hz = args.hz;
        std::filesystem::create_directories(out.out_dir);

        selected(cfg, out);
        return 0;
    } catch (const slgfm::PoleOnContour& e) {
        std::cerr << "error: " << e.what()
                  << "\nhint: lossless plants put poles on the imaginary "
                     "axis; add series resistance (plant x_over_r or R_g) to "
                     "move them off the contour.\n";
        return 3;
    } catch (const slgfm::NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
