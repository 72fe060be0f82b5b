#pragma once

#include "rsnet/matrixlab.hpp"
#include "rsnet/model.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace rsnet {

/// Outdoor temperature samples (hours, degrees C).
struct TemperatureSeries {
    std::vector<double> hours;
    std::vector<double> deg_c;
    std::vector<double> filled_hours;  // timestamps inserted by gap filling
};

/// District-heating network of n single-state buildings:
///   C_i x_i' = -a_i (x_c + x_i - T_ext) + (B_heat f(u))_i
/// with x_i the deviation from the comfort temperature x_c.
struct HeatingScenario {
    Vector a_kw_per_degc;
    Vector c_kwh_per_degc;
    Matrix b_heat_kw;
    double x_c_degc = 20.0;
    TemperatureSeries t_ext;
    // Controller gains attached to the scenario.
    Vector p_per_degc;
    Vector r_per_degc_h;
    Vector s_degc;
    double beta = 0.0;  // <= 0 selects 1/n

    std::size_t n() const noexcept { return static_cast<std::size_t>(a_kw_per_degc.size()); }
    /// Throws InvalidArgument / DimensionMismatch / NotMMatrix.
    void validate() const;
};

/// Daily sinusoid (amplitude 3 C, coldest at 06:00) around 0 C with a 72 h
/// raised-cosine dip of 17 C centred on hour 100, so the coldest samples are
/// close to -20 C. Sampled every `step_h` over [0, hours].
TemperatureSeries synthetic_cold_snap(double hours = 336.0, double step_h = 1.0);

/// Ten buildings with a = 0.167 kW/C, C = 2.0 kWh/C, B_ii = 12 kW,
/// B_ij = -0.15 min(i, j) kW (1-based), p = 2.5, r = 0.2, s = 2.0, x_c = 20 C,
/// driven by the synthetic cold snap.
HeatingScenario paper_benchmark_scenario();

/// B_ii = diag, B_ij = coupling * min(i, j) (1-based indices).
Matrix benchmark_coupling_matrix(std::size_t n, double diag = 12.0, double coupling = -0.15);

struct StandardForm {
    PlantModel plant;
    DisturbanceSignal w;
    Vector l_diag;  // J2 weights l_i = q_i / C_i with q_i = a_i
};

/// A = diag(a / C) [1/h], B = diag(1 / C) B_heat [C/h], w = (a / C)(T_ext - x_c) [C/h].
StandardForm to_standard_form(const HeatingScenario& s);

/// Controller built from the scenario gains. The static variant uses
/// u = -B_heat^T C^-1 x, i.e. -B^T x on the standard form.
ControllerSpec scenario_controller(const HeatingScenario& s, const PlantModel& plant, ControllerVariant variant);

struct ColumnSpec {
    std::string time = "0";   // header name or 0-based index
    std::string value = "1";  // header name or 0-based index
};

/// Two-column CSV: timestamp (hour offset or ISO-8601, converted to hours
/// after the first sample) and temperature in C. An optional header row is
/// allowed; '#' lines are skipped. Gaps up to 3 h are filled by linear
/// interpolation at the median sample step; longer gaps raise GapTooLarge.
/// Malformed input raises ParseError with the line number.
TemperatureSeries load_temperature_csv(const std::string& path, const ColumnSpec& columns = {});
TemperatureSeries parse_temperature_csv(std::istream& in, const ColumnSpec& columns = {});

}  // namespace rsnet
