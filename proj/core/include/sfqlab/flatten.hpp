#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sfqlab/netlist.hpp"

namespace sfq::net {

constexpr int kGroundNode = -1;

struct FlatJunction {
    std::string name;  // hierarchical, e.g. "x1.b2"
    int a = 0, b = 0;  // node indices, kGroundNode for ground
    phys::JunctionParams params;
    std::string model;
};

struct FlatTwoTerminal {
    std::string name;
    int a = 0, b = 0;
    double value = 0.0;  // L (H), R (ohm) or C (F)
};

struct FlatSource {
    std::string name;
    int a = 0, b = 0;   // current flows a -> b through the source
    Waveform waveform;  // A
    bool is_bias = false;
};

/// External port of a flattened circuit: resolves to either a node or a
/// junction (readout monitors are junctions).
struct FlatPort {
    enum class Kind { Node, Junction };
    std::string name;
    Kind kind = Kind::Node;
    int index = 0;  // node index or junction index
};

struct FlatCircuit {
    std::vector<std::string> node_names;  // index -> hierarchical name
    std::map<std::string, int> node_index;
    std::vector<FlatJunction> junctions;
    std::vector<FlatTwoTerminal> inductors;
    std::vector<FlatTwoTerminal> resistors;
    std::vector<FlatTwoTerminal> capacitors;
    std::vector<FlatSource> sources;
    std::map<std::string, FlatPort> ports;
    std::optional<double> temp;
    std::optional<std::pair<double, double>> tran;

    std::size_t num_nodes() const { return node_names.size(); }
    /// Smallest reference critical current over all junctions; 0 if none.
    double min_ic_ref() const;
    const FlatPort& port(const std::string& name) const;
    int junction_by_name(const std::string& name) const;  // -1 if absent
};

struct Diagnostic {
    enum class Severity { Warning, Error };
    Severity severity = Severity::Warning;
    std::string message;
};

/// Expand all subcircuit instances. Instance elements and internal nodes get
/// a "<instance>." prefix; ports bind to the parent's nodes. `library`
/// provides cell definitions not present in the netlist itself.
FlatCircuit flatten(const Netlist& n, const Netlist* library = nullptr);

/// Structural checks: dangling nodes (touched by fewer than two terminals and
/// not a declared port), junctions under the 10 uA process floor, bias
/// sources that drive nothing. Empty result means clean.
std::vector<Diagnostic> validate(const FlatCircuit& fc);

}  // namespace sfq::net
