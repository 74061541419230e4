#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sfqlab/physics.hpp"

namespace sfq::net {

/// Parse failure with 1-based source location.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column = 0)
        : std::runtime_error(format(msg, line, column)), line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    static std::string format(const std::string& msg, int line, int column);
    int line_;
    int column_;
};

enum class ElementKind { Junction, Inductor, Resistor, Capacitor, CurrentSource, SubcktInstance };

/// Source waveform: dc(v), pulse(lo,hi,t0,rise,width,fall,period) or
/// pwl(t1,v1,...). pwl holds its last value after the final breakpoint.
struct Waveform {
    enum class Kind { Dc, Pulse, Pwl };
    Kind kind = Kind::Dc;
    double dc = 0.0;
    double lo = 0.0, hi = 0.0, t0 = 0.0, rise = 0.0, width = 0.0, fall = 0.0, period = 0.0;
    std::vector<std::pair<double, double>> pwl;

    double eval(double t) const;
    /// Same shape with all levels multiplied by s.
    Waveform scaled(double s) const;
    bool operator==(const Waveform&) const = default;
};

struct Element {
    ElementKind kind{};
    std::string name;                 // lowercase, unique per scope
    std::vector<std::string> nodes;   // lowercase; "0" is ground
    double value = 0.0;               // L/R/C value (SI)
    std::string model;                // junction model or subckt name
    double area = 1.0;                // junction area scale
    Waveform waveform;                // current sources
    std::map<std::string, double> params;  // instance overrides (e.g. delay=)
    int line = 0;

    bool operator==(const Element& o) const {
        return kind == o.kind && name == o.name && nodes == o.nodes && value == o.value &&
               model == o.model && area == o.area && waveform == o.waveform && params == o.params;
    }
};

/// .model <name> jj(icrit=, rn=, rsh=, cap=, tc=[, tref=])
struct JunctionModel {
    double icrit = 0.0;
    double rn = 0.0;
    double rsh = 0.0;
    double cap = 0.0;
    double tc = 0.0;
    double tref = 4.2;
    int line = 0;

    phys::JunctionParams junction_params(double area) const;
    bool operator==(const JunctionModel& o) const {
        return icrit == o.icrit && rn == o.rn && rsh == o.rsh && cap == o.cap && tc == o.tc &&
               tref == o.tref;
    }
};

/// Behavioral annotation attached to a subcircuit definition (.behav line):
/// cell kind, nominal delay, operating bias window at the reference
/// temperature, jitter magnitudes and the nominal junction bias fraction.
struct BehavSpec {
    std::string kind;          // dcsfq, sfqdc, jtl, split, merge, tff, dff, ndro
    double delay = 5e-12;      // s
    double win_lo = 0.0;       // bias window lower edge
    double win_hi = 0.0;       // upper edge
    double i_nom = 0.75;       // junction bias fraction at nominal bias
    double win_jitter = 0.02;  // window jitter sigma as fraction of width
    double tc_sigma = 0.0;     // per-instance junction Tc spread, K
    double drive = 60e-6;      // analog input drive amplitude, A (dcsfq only)

    bool operator==(const BehavSpec&) const = default;
};

struct Netlist;

struct Subckt {
    std::vector<std::string> ports;  // lowercase node names
    std::optional<BehavSpec> behav;
    // Body is stored via pointer to keep Netlist copyable without
    // incomplete-type issues; never null for a parsed subckt.
    std::shared_ptr<Netlist> body;

    bool operator==(const Subckt& o) const;
};

/// Declared external port of a top-level netlist: maps a public name to a
/// node or (flattened) junction name.
struct PortDecl {
    std::string name;
    std::string target;
    int line = 0;
    bool operator==(const PortDecl& o) const { return name == o.name && target == o.target; }
};

struct Netlist {
    std::string title;
    std::vector<Element> elements;
    std::map<std::string, Subckt> subckts;
    std::map<std::string, JunctionModel> models;
    std::vector<PortDecl> ports;
    std::optional<double> temp;                       // .temp, K
    std::optional<std::pair<double, double>> tran;    // .tran dt tstop, s

    bool operator==(const Netlist& o) const;
};

/// Parse netlist text. Comments: full-line '*' and rest-of-line ';'.
/// Continuation lines start with '+'. Identifiers are case-insensitive.
/// Model and subckt references must resolve within the netlist itself.
Netlist parse(const std::string& text);

/// As above, but unresolved references may also be satisfied by `library`
/// (e.g. the standard cell library). Pass nullptr for the strict check.
Netlist parse(const std::string& text, const Netlist* library);

/// Emit text that parse() accepts and that round-trips structurally.
std::string serialize(const Netlist& n);

/// Numeric literal with optional SPICE suffix (f p n u m k meg).
double parse_value(const std::string& token, int line = 0);
std::string format_value(double v);

}  // namespace sfq::net
