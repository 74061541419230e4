#include "sfqlab/physics.hpp"

#include <cmath>

namespace sfq::phys {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void MaterialParams::validate() const {
    if (tc <= 0.0) throw std::domain_error("MaterialParams: tc must be > 0");
    if (gap_zero() <= 0.0) throw std::domain_error("MaterialParams: gap0 must be > 0");
}

void JunctionParams::validate() const {
    material.validate();
    if (ic_ref <= 0.0) throw std::domain_error("JunctionParams: ic_ref must be > 0");
    if (rn <= 0.0) throw std::domain_error("JunctionParams: rn must be > 0");
    if (r_shunt <= 0.0) throw std::domain_error("JunctionParams: r_shunt must be > 0");
    if (cap < 0.0) throw std::domain_error("JunctionParams: cap must be >= 0");
    if (anneal_factor <= 0.0 || anneal_factor > 1.0)
        throw std::domain_error("JunctionParams: anneal_factor must be in (0, 1]");
    if (t_ref >= material.tc)
        throw std::domain_error("JunctionParams: t_ref must be below material tc");
}

double gap_ratio(double t, double tc) {
    if (t < 0.0) throw std::domain_error("gap_ratio: temperature must be >= 0");
    if (tc <= 0.0) throw std::domain_error("gap_ratio: tc must be > 0");
    if (t >= tc) return 0.0;
    if (t == 0.0) return 1.0;
    return std::tanh(1.74 * std::sqrt(tc / t - 1.0));
}

double ic_ratio(double t, double tc) {
    double g = gap_ratio(t, tc);  // validates arguments
    if (t >= tc) return 0.0;
    if (t == 0.0) return 1.0;
    return g * std::tanh(1.76 * tc / (2.0 * t) * g);
}

double ic_at(double t, const JunctionParams& j) {
    j.validate();
    double tc = j.material.tc;
    return j.anneal_factor * j.ic_ref * (ic_ratio(t, tc) / ic_ratio(j.t_ref, tc));
}

double ab_critical_current(double t, double rn, const MaterialParams& m) {
    if (rn <= 0.0) throw std::domain_error("ab_critical_current: rn must be > 0");
    m.validate();
    double delta = m.gap_zero() * gap_ratio(t, m.tc);
    if (delta <= 0.0) return 0.0;
    double prefactor = kPi * delta / (2.0 * PhysicalConstants::e * rn);
    if (t <= 0.0) return prefactor;  // tanh saturates
    return prefactor * std::tanh(delta / (2.0 * PhysicalConstants::kB * t));
}

double johnson_sigma(double r, double t, double dt) {
    if (r <= 0.0) throw std::domain_error("johnson_sigma: r must be > 0");
    if (dt <= 0.0) throw std::domain_error("johnson_sigma: dt must be > 0");
    if (t < 0.0) throw std::domain_error("johnson_sigma: t must be >= 0");
    return std::sqrt(4.0 * PhysicalConstants::kB * t / (r * dt));
}

double escape_barrier_over_kt(double i_norm, double ic, double t) {
    if (i_norm < 0.0) throw std::domain_error("escape_barrier_over_kt: i_norm must be >= 0");
    if (ic <= 0.0) throw std::domain_error("escape_barrier_over_kt: ic must be > 0");
    if (t <= 0.0) throw std::domain_error("escape_barrier_over_kt: t must be > 0");
    if (i_norm >= 1.0) return 0.0;
    double ej = PhysicalConstants::phi0 * ic / (2.0 * kPi);
    double barrier = 2.0 * ej * (std::sqrt(1.0 - i_norm * i_norm) - i_norm * std::acos(i_norm));
    return barrier / (PhysicalConstants::kB * t);
}

JunctionParams anneal(const JunctionParams& j, double factor) {
    if (factor <= 0.0 || factor > 1.0)
        throw std::domain_error("anneal: factor must be in (0, 1]");
    JunctionParams out = j;
    out.anneal_factor *= factor;
    return out;
}

}  // namespace sfq::phys
