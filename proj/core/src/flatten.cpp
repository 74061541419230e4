#include "sfqlab/flatten.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace sfq::net {

namespace {

struct Scope {
    const Netlist* netlist;
};

class Flattener {
public:
    Flattener(const Netlist& top, const Netlist* library) : top_(top), library_(library) {}

    FlatCircuit run() {
        std::vector<const Netlist*> chain{&top_};
        expand(top_, chain, "");
        resolve_ports();
        fc_.temp = top_.temp;
        fc_.tran = top_.tran;
        return std::move(fc_);
    }

private:
    int node_id(const std::string& name) {
        if (name == "0") return kGroundNode;
        auto it = fc_.node_index.find(name);
        if (it != fc_.node_index.end()) return it->second;
        int id = static_cast<int>(fc_.node_names.size());
        fc_.node_names.push_back(name);
        fc_.node_index.emplace(name, id);
        return id;
    }

    const JunctionModel* find_model(const std::string& name,
                                    const std::vector<const Netlist*>& chain) const {
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            auto f = (*it)->models.find(name);
            if (f != (*it)->models.end()) return &f->second;
        }
        if (library_) {
            auto f = library_->models.find(name);
            if (f != library_->models.end()) return &f->second;
        }
        return nullptr;
    }

    const Subckt* find_subckt(const std::string& name,
                              const std::vector<const Netlist*>& chain) const {
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            auto f = (*it)->subckts.find(name);
            if (f != (*it)->subckts.end()) return &f->second;
        }
        if (library_) {
            auto f = library_->subckts.find(name);
            if (f != library_->subckts.end()) return &f->second;
        }
        return nullptr;
    }

    // `map` translates local node names to flat names (ports of a subckt);
    // unmapped names get `prefix` prepended.
    std::string flat_node(const std::string& local, const std::map<std::string, std::string>& map,
                          const std::string& prefix) const {
        if (local == "0") return "0";
        auto it = map.find(local);
        if (it != map.end()) return it->second;
        return prefix + local;
    }

    void expand(const Netlist& scope, std::vector<const Netlist*>& chain,
                const std::string& prefix,
                const std::map<std::string, std::string>& node_map = {}) {
        for (const auto& e : scope.elements) {
            std::string fname = prefix + e.name;
            if (e.kind == ElementKind::SubcktInstance) {
                const Subckt* sub = find_subckt(e.model, chain);
                if (!sub)
                    throw std::runtime_error("flatten: undefined subckt '" + e.model +
                                             "' for instance '" + fname + "'");
                if (std::find(instantiating_.begin(), instantiating_.end(), e.model) !=
                    instantiating_.end()) {
                    std::ostringstream os;
                    os << "flatten: recursive subcircuit definition:";
                    for (auto& s : instantiating_) os << " " << s << " ->";
                    os << " " << e.model;
                    throw std::runtime_error(os.str());
                }
                if (sub->ports.size() != e.nodes.size())
                    throw std::runtime_error("flatten: instance '" + fname + "' connects " +
                                             std::to_string(e.nodes.size()) +
                                             " nodes but subckt '" + e.model + "' has " +
                                             std::to_string(sub->ports.size()) + " ports");
                std::map<std::string, std::string> port_map;
                for (size_t i = 0; i < sub->ports.size(); ++i)
                    port_map[sub->ports[i]] = flat_node(e.nodes[i], node_map, prefix);
                instantiating_.push_back(e.model);
                chain.push_back(sub->body.get());
                expand(*sub->body, chain, fname + ".", port_map);
                chain.pop_back();
                instantiating_.pop_back();
                continue;
            }

            int a = node_id(flat_node(e.nodes[0], node_map, prefix));
            int b = node_id(flat_node(e.nodes[1], node_map, prefix));
            switch (e.kind) {
                case ElementKind::Junction: {
                    const JunctionModel* m = find_model(e.model, chain);
                    if (!m)
                        throw std::runtime_error("flatten: undefined model '" + e.model +
                                                 "' for junction '" + fname + "'");
                    FlatJunction j;
                    j.name = fname;
                    j.a = a;
                    j.b = b;
                    j.model = e.model;
                    j.params = m->junction_params(e.area);
                    fc_.junctions.push_back(std::move(j));
                    break;
                }
                case ElementKind::Inductor:
                    fc_.inductors.push_back({fname, a, b, e.value});
                    break;
                case ElementKind::Resistor:
                    fc_.resistors.push_back({fname, a, b, e.value});
                    break;
                case ElementKind::Capacitor:
                    fc_.capacitors.push_back({fname, a, b, e.value});
                    break;
                case ElementKind::CurrentSource: {
                    FlatSource s;
                    s.name = fname;
                    s.a = a;
                    s.b = b;
                    s.waveform = e.waveform;
                    // Leaf name IB* marks a bias source at any depth.
                    s.is_bias = e.name.rfind("ib", 0) == 0;
                    fc_.sources.push_back(std::move(s));
                    break;
                }
                default:
                    break;
            }
        }
    }

    void resolve_ports() {
        for (const auto& p : top_.ports) {
            FlatPort fp;
            fp.name = p.name;
            int ji = -1;
            for (size_t i = 0; i < fc_.junctions.size(); ++i)
                if (fc_.junctions[i].name == p.target) ji = static_cast<int>(i);
            if (ji >= 0) {
                fp.kind = FlatPort::Kind::Junction;
                fp.index = ji;
            } else {
                auto it = fc_.node_index.find(p.target);
                if (it == fc_.node_index.end())
                    throw std::runtime_error("flatten: port '" + p.name +
                                             "' references unknown node or junction '" + p.target +
                                             "'");
                fp.kind = FlatPort::Kind::Node;
                fp.index = it->second;
            }
            fc_.ports.emplace(p.name, fp);
        }
    }

    const Netlist& top_;
    const Netlist* library_;
    FlatCircuit fc_;
    std::vector<std::string> instantiating_;
};

}  // namespace

double FlatCircuit::min_ic_ref() const {
    double m = 0.0;
    for (const auto& j : junctions)
        if (m == 0.0 || j.params.ic_ref < m) m = j.params.ic_ref;
    return m;
}

const FlatPort& FlatCircuit::port(const std::string& name) const {
    auto it = ports.find(name);
    if (it != ports.end()) return it->second;
    throw std::out_of_range("unknown port '" + name + "'");
}

int FlatCircuit::junction_by_name(const std::string& name) const {
    for (size_t i = 0; i < junctions.size(); ++i)
        if (junctions[i].name == name) return static_cast<int>(i);
    return -1;
}

FlatCircuit flatten(const Netlist& n, const Netlist* library) {
    return Flattener(n, library).run();
}

std::vector<Diagnostic> validate(const FlatCircuit& fc) {
    std::vector<Diagnostic> diags;
    constexpr double kIcFloor = 10e-6;

    std::vector<int> touches(fc.num_nodes(), 0);
    auto touch = [&](int n) {
        if (n != kGroundNode) touches[static_cast<size_t>(n)]++;
    };
    for (auto& j : fc.junctions) { touch(j.a); touch(j.b); }
    for (auto& l : fc.inductors) { touch(l.a); touch(l.b); }
    for (auto& r : fc.resistors) { touch(r.a); touch(r.b); }
    for (auto& c : fc.capacitors) { touch(c.a); touch(c.b); }
    for (auto& s : fc.sources) { touch(s.a); touch(s.b); }

    std::set<int> port_nodes;
    for (auto& [name, p] : fc.ports)
        if (p.kind == FlatPort::Kind::Node) port_nodes.insert(p.index);

    for (size_t n = 0; n < fc.num_nodes(); ++n) {
        if (touches[n] < 2 && !port_nodes.count(static_cast<int>(n))) {
            diags.push_back({Diagnostic::Severity::Error,
                             "dangling node '" + fc.node_names[n] + "' (touched by " +
                                 std::to_string(touches[n]) + " terminal)"});
        }
    }
    for (auto& j : fc.junctions) {
        if (j.params.ic_ref < kIcFloor * (1.0 - 1e-9)) {
            std::ostringstream os;
            os << "junction '" << j.name << "' ic_ref " << j.params.ic_ref * 1e6
               << " uA is below the 10 uA process floor";
            diags.push_back({Diagnostic::Severity::Warning, os.str()});
        }
    }
    for (auto& s : fc.sources) {
        if (s.is_bias) {
            int inject = s.b;  // convention: IB 0 node dc(v) feeds `node`
            if (inject == kGroundNode) inject = s.a;
            if (inject == kGroundNode || touches[static_cast<size_t>(inject)] < 2)
                diags.push_back({Diagnostic::Severity::Error,
                                 "bias source '" + s.name + "' drives a floating node"});
        }
    }
    return diags;
}

}  // namespace sfq::net
