// avisim: command-line runner for V-system scenarios
//
//   avisim run    --config <file> --out <dir> [--no-cross-coupling]
//   avisim preset <id> [--out <dir>] [--no-cross-coupling]
//   avisim sweep  --config <file> --param <path> --from <x> --to <y> --steps <n> [--out <dir>] [--jobs <n>]
//   avisim rates  (--config <file> | --preset <id>) [--no-cross-coupling]
//
// Exit codes: 0 success, 1 usage or config error, 2 non-unique steady state,
// 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "avisim/config.hpp"
#include "avisim/errors.hpp"
#include "avisim/presets.hpp"
#include "avisim/scenario.hpp"

namespace {

void summarize(const avisim::RunResult& r, const std::filesystem::path& out)
{
    const auto& o = r.trajectory.samples.back();
    std::printf("wrote %s\n", out.string().c_str());
    std::printf("  Gamma_aa = %.6f ueV, Gamma_ab = %.6f ueV, delta_ab = %.6f ueV, F_P = %.4f\n",
                avisim::units::to_ueV(r.model.full_rates.gamma_aa), avisim::units::to_ueV(r.model.full_rates.gamma_ab),
                avisim::units::to_ueV(r.model.full_rates.delta_ab), r.model.purcell);
    std::printf("  t = %.4g ns: n_a = %.6f, n_b = %.6f, F_- = %.6f, purity = %.6f\n", r.trajectory.t_ns.back(), o.n_a,
                o.n_b, o.f_minus, o.purity);
    if (r.spectrum) {
        std::printf("  spectrum: dipole a %s (%zu), dipole b %s (%zu)\n",
                    std::string(to_string(r.peaks_a.classification())).c_str(), r.peaks_a.peaks.size(),
                    std::string(to_string(r.peaks_b.classification())).c_str(), r.peaks_b.peaks.size());
        if (!r.spectrum->warning.empty())
            std::printf("  warning: %s\n", r.spectrum->warning.c_str());
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-dipole quantum-dot simulator for photonic waveguides and cavities"};
    app.require_subcommand(1);

    std::string config_path, out_dir, preset_name, param;
    bool no_cross = false;
    double from = 0.0, to = 0.0;
    int steps = 0, jobs = 0;

    auto* run = app.add_subcommand("run", "run a scenario from a config file");
    run->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_flag("--no-cross-coupling", no_cross, "zero Gamma_ab, Gamma_ba and delta in the dynamics");

    auto* preset = app.add_subcommand("preset", "run a named figure preset");
    preset->add_option("id", preset_name, "fig2a..fig2d, fig3a..fig3d, fig4a..fig4d")->required();
    preset->add_option("--out", out_dir, "output directory (default out/<id>)");
    preset->add_flag("--no-cross-coupling", no_cross, "zero Gamma_ab, Gamma_ba and delta in the dynamics");

    auto* sw = app.add_subcommand("sweep", "scan one numeric config leaf");
    sw->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    sw->add_option("--param", param, "dotted key, e.g. drive.omega_a")->required();
    sw->add_option("--from", from, "first value")->required();
    sw->add_option("--to", to, "last value")->required();
    sw->add_option("--steps", steps, "number of points")->required();
    sw->add_option("--out", out_dir, "output directory")->default_val("sweep_out");
    sw->add_option("--jobs", jobs, "parallel workers (default AVISIM_JOBS or 1)");
    sw->add_flag("--no-cross-coupling", no_cross, "zero Gamma_ab, Gamma_ba and delta in the dynamics");

    auto* rates = app.add_subcommand("rates", "print the rate table and the discrepancy report");
    auto* rc = rates->add_option("--config", config_path, "config file")->check(CLI::ExistingFile);
    auto* rp = rates->add_option("--preset", preset_name, "preset id");
    rc->excludes(rp);
    rates->add_flag("--no-cross-coupling", no_cross, "zero Gamma_ab, Gamma_ba and delta in the dynamics");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            auto cfg = avisim::parse_config(config_path);
            if (no_cross)
                cfg.run.cross_coupling = false;
            summarize(avisim::run_scenario(cfg, out_dir), out_dir);
        } else if (*preset) {
            auto cfg = avisim::preset_config(avisim::parse_preset(preset_name));
            if (no_cross)
                cfg.run.cross_coupling = false;
            if (out_dir.empty())
                out_dir = (std::filesystem::path("out") / preset_name).string();
            summarize(avisim::run_scenario(cfg, out_dir), out_dir);
        } else if (*sw) {
            auto cfg = avisim::parse_config(config_path);
            if (no_cross)
                cfg.run.cross_coupling = false;
            const auto values = avisim::sweep(cfg, param, from, to, steps, out_dir, avisim::resolve_jobs(jobs));
            std::printf("wrote %zu points and %s\n", values.size(),
                        (std::filesystem::path(out_dir) / "sweep.csv").string().c_str());
        } else if (*rates) {
            if (config_path.empty() && preset_name.empty())
                throw avisim::ValidationError("rates needs --config or --preset");
            auto cfg = config_path.empty() ? avisim::preset_config(avisim::parse_preset(preset_name))
                                           : avisim::parse_config(config_path);
            if (no_cross)
                cfg.run.cross_coupling = false;
            std::cout << avisim::rates_report(avisim::build_model(cfg)) << '\n' << avisim::discrepancy_report();
        }
    } catch (const avisim::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const avisim::DegenerateSteadyStateError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 0;
}
