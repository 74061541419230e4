#pragma once

namespace sfq {

/// Fixed physical constants (SI). Not user-configurable.
struct PhysicalConstants {
    static constexpr double phi0 = 2.067833848e-15;  // flux quantum, Wb
    static constexpr double kB = 1.380649e-23;       // Boltzmann, J/K
    static constexpr double e = 1.602176634e-19;     // elementary charge, C
};

}  // namespace sfq
