// presets.hpp: named scenarios for the free-field, pumped and spectral figures

#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "avisim/config.hpp"
#include "avisim/errors.hpp"

namespace avisim {

enum class PresetId { fig2a, fig2b, fig2c, fig2d, fig3a, fig3b, fig3c, fig3d, fig4a, fig4b, fig4c, fig4d };

inline constexpr PresetId all_presets[] = {PresetId::fig2a, PresetId::fig2b, PresetId::fig2c, PresetId::fig2d,
                                           PresetId::fig3a, PresetId::fig3b, PresetId::fig3c, PresetId::fig3d,
                                           PresetId::fig4a, PresetId::fig4b, PresetId::fig4c, PresetId::fig4d};

inline std::string_view to_string(PresetId id)
{
    static constexpr std::string_view names[] = {"fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b",
                                                 "fig3c", "fig3d", "fig4a", "fig4b", "fig4c", "fig4d"};
    return names[static_cast<int>(id)];
}

inline PresetId parse_preset(std::string_view name)
{
    for (PresetId id : all_presets)
        if (to_string(id) == name)
            return id;
    throw ValidationError("unknown preset '" + std::string(name) + "' (expected fig2a..fig2d, fig3a..fig3d, fig4a..fig4d)");
}

inline ScenarioConfig preset_config(PresetId id)
{
    ScenarioConfig c;
    auto waveguide = [&] {
        c.reservoir.kind = ReservoirKind::waveguide;
        c.reservoir.alpha = 1.0;
        c.reservoir.beta = 0.0;
    };
    auto cavity = [&](double q) {
        c.reservoir.kind = ReservoirKind::cavity;
        c.reservoir.q = q;
    };
    auto spectrum = [&] {
        c.spectrum.enabled = true;
        c.run.t_max = 5.0;
        c.run.samples = 501;
    };

    switch (id) {
    case PresetId::fig2a:
        waveguide();
        c.reservoir.alpha = c.reservoir.beta = 1.0 / std::sqrt(2.0);
        c.run.initial = InitialState::a;
        c.run.t_max = 5.0;
        break;
    case PresetId::fig2b:
        waveguide();
        c.run.initial = InitialState::a;
        c.run.t_max = 10.0;
        c.run.samples = 2001;
        break;
    case PresetId::fig2c:
        waveguide();
        c.run.initial = InitialState::psi_plus;
        c.run.t_max = 5.0;
        break;
    case PresetId::fig2d:
        waveguide();
        c.run.initial = InitialState::psi_minus;
        c.run.t_max = 5.0;
        break;
    case PresetId::fig3a:
    case PresetId::fig3b:
        waveguide();
        c.drive.omega_a = 10.0;
        c.drive.omega_b = id == PresetId::fig3b ? -10.0 : 0.0;
        c.run.t_max = 6.0;
        c.run.samples = 2001;
        c.run.rtol = 1e-10;
        c.run.atol = 1e-12;
        break;
    case PresetId::fig3c:
    case PresetId::fig3d:
        cavity(3000.0);
        c.drive.omega_a = 20.0;
        c.drive.omega_b = id == PresetId::fig3d ? -20.0 : 0.0;
        c.run.t_max = 3.0;
        c.run.samples = 2001;
        c.run.rtol = 1e-10;
        c.run.atol = 1e-12;
        break;
    case PresetId::fig4a:
        cavity(3000.0);
        c.drive.omega_a = 10.0;
        spectrum();
        break;
    case PresetId::fig4b:
        cavity(3000.0);
        c.drive.omega_a = 10.0;
        c.drive.omega_b = -10.0;
        c.noise.gamma_a = c.noise.gamma_b = 0.2;
        spectrum();
        break;
    case PresetId::fig4c:
        cavity(500.0);
        c.drive.omega_a = 180.0;
        spectrum();
        break;
    case PresetId::fig4d:
        cavity(3000.0);
        c.drive.omega_a = 0.2;
        spectrum();
        c.spectrum.window = 270.0;
        break;
    }
    c.validate();
    return c;
}

} // namespace avisim
