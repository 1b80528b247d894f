#pragma once

#include <numbers>

namespace oven::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double c0 = 2.99792458e8;        // m/s
inline constexpr double eps0 = 8.8541878128e-12;  // F/m
inline constexpr double mu0 = 1.25663706212e-6;   // H/m
inline constexpr double gas_constant = 8.314462618;  // J/(mol K)

// Reference temperature for linearised material properties and stress.
inline constexpr double t_ref = 293.15;  // K

}  // namespace oven::constants
