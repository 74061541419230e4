#pragma once

#include <stdexcept>

#include "sfqlab/constants.hpp"

namespace sfq::phys {

/// Superconducting film material: critical temperature and zero-temperature
/// gap. gap0 defaults to the weak-coupling value 1.76*kB*tc.
struct MaterialParams {
    double tc = 8.5;   // K
    double gap0 = 0.0; // J; 0 means "use 1.76*kB*tc"

    double gap_zero() const {
        return gap0 > 0.0 ? gap0 : 1.76 * PhysicalConstants::kB * tc;
    }
    void validate() const;
};

/// One Josephson junction. The critical current is specified at a reference
/// temperature (liquid helium by default) and rescaled elsewhere.
struct JunctionParams {
    double ic_ref = 20e-6;   // A, at t_ref
    double t_ref = 4.2;      // K
    double rn = 140.0;       // normal resistance, ohm
    double r_shunt = 12.0;   // external shunt, ohm
    double cap = 120e-15;    // F
    MaterialParams material{};
    double anneal_factor = 1.0;

    /// Parallel combination of shunt and normal resistance; the damping
    /// resistance of the RCSJ model.
    double r_damp() const { return rn * r_shunt / (rn + r_shunt); }
    void validate() const;
};

/// Delta(T)/Delta(0) via the BCS-type interpolation tanh(1.74*sqrt(Tc/T-1)).
/// Returns 1 at t = 0 and 0 for t >= tc.
double gap_ratio(double t, double tc);

/// Ic(T)/Ic(0): gap_ratio * tanh((1.76*tc/(2t)) * gap_ratio).
double ic_ratio(double t, double tc);

/// Critical current of a junction at temperature t, rescaled from its
/// reference point and including any annealing factor.
double ic_at(double t, const JunctionParams& j);

/// Ambegaokar-Baratoff critical current (pi*Delta(T)/(2eR))*tanh(Delta/2kT).
double ab_critical_current(double t, double rn, const MaterialParams& m);

/// Per-step standard deviation of the Johnson-Nyquist current noise source
/// in parallel with a resistor r at temperature t, for timestep dt.
double johnson_sigma(double r, double t, double dt);

/// Thermal activation barrier of a current-biased junction, in units of kB*t:
/// 2*EJ*(sqrt(1-i^2) - i*acos(i))/(kB*t) with EJ = phi0*ic/(2*pi).
/// Returns 0 when i_norm >= 1 (barrier gone).
double escape_barrier_over_kt(double i_norm, double ic, double t);

/// Copy of j with anneal_factor multiplied by factor in (0, 1].
JunctionParams anneal(const JunctionParams& j, double factor);

}  // namespace sfq::phys
