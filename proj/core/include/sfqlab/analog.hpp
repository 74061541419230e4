#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfqlab/flatten.hpp"
#include "sfqlab/pulse_train.hpp"

namespace sfq::analog {

/// Transient solver configuration. API units are SI; the solver works in
/// scaled units internally (ps, uA, mV).
struct SolverConfig {
    double dt = 0.1e-12;        // s
    double t_stop = 0.0;        // s
    double newton_tol = 1e-9;   // rad
    int max_newton_iters = 50;
    bool noise_enabled = false;
    std::uint64_t seed = 0;
    double temperature = 4.2;   // K
    double bias_scale = 1.0;    // multiplies every bias source

    void validate() const;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Full traces of one transient run. All traces share the time grid.
struct TransientResult {
    std::vector<double> time;                        // s
    std::vector<std::string> junction_names;
    std::vector<std::vector<double>> phase;          // [junction][step], rad
    std::vector<std::string> node_names;
    std::vector<std::vector<double>> node_voltage;   // [node][step], V
    std::vector<std::vector<double>> slip_times;     // [junction], s, sorted
    std::vector<std::pair<int, int>> junction_nodes; // node indices per junction
    std::map<std::string, net::FlatPort> ports;      // echo of the circuit ports
    SolverConfig config;                             // echo, incl. seed

    std::size_t slip_count(std::size_t junction) const { return slip_times[junction].size(); }
    int junction_by_name(const std::string& name) const;
    /// Voltage across a junction (V) at a given step.
    double junction_voltage(std::size_t junction, std::size_t step) const;
};

/// Implicit trapezoidal transient with Newton iteration per step. Junction
/// critical currents are evaluated once at cfg.temperature; when noise is
/// enabled every resistive element gets an independent Gaussian current
/// source redrawn each step from a counter-based stream, so results are a
/// pure function of (fc, cfg).
TransientResult transient(const net::FlatCircuit& fc, const SolverConfig& cfg);

/// One event per 2*pi phase slip of each port's junction, timestamped at the
/// upward crossing of phase = pi (mod 2*pi).
PulseTrain detect_pulses(const TransientResult& tr, const std::vector<std::string>& ports);

/// Integral of junction voltage across one isolated slip; returns flux in Wb
/// (phi0 per slip up to discretization). slip_index selects which slip.
double pulse_area_check(const TransientResult& tr, const std::string& junction,
                        std::size_t slip_index = 0);

/// Integral of junction voltage over [t0, t1] (Wb).
double flux_between(const TransientResult& tr, const std::string& junction, double t0, double t1);

/// Time grid plus selected traces as CSV. Channels name nodes ("v:node") or
/// junction phases ("phi:junction"); empty list dumps everything.
std::string traces_csv(const TransientResult& tr, const std::vector<std::string>& channels = {});

/// Compact binary trace format; see README for the layout.
void write_trace_file(const TransientResult& tr, const std::string& path);
TransientResult read_trace_file(const std::string& path);

/// ERSFQ biasing transform: replaces every bias current source with a
/// feeding-junction + large-inductor branch hung off a common rail node that
/// is driven by a Norton source. The returned circuit exhibits the
/// zero-voltage regime at nominal bias and limiter switching above it.
net::FlatCircuit ersfq_transform(const net::FlatCircuit& fc, double limiter_ratio = 1.25);

}  // namespace sfq::analog
