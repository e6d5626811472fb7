#pragma once

namespace ringburst::constants {

// CODATA 2018, SI
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double electron_mass = 9.1093837015e-31; // kg
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double epsilon0 = 8.8541878128e-12;     // F/m
inline constexpr double speed_of_light = 299792458.0;    // m/s
inline constexpr double boltzmann = 1.380649e-23;        // J/K
inline constexpr double pi = 3.14159265358979323846;

/// Charge of the ring carriers (conduction electrons).
inline constexpr double carrier_charge = -elementary_charge;

/// Gaussian-unit e^2 expressed in SI: e^2 / (4 pi eps0).
inline constexpr double e2_gaussian =
    elementary_charge * elementary_charge / (4.0 * pi * epsilon0);

} // namespace ringburst::constants
