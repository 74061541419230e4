#include "sfqlab/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

namespace sfq::net {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$';
}

// Split a physical line into tokens. Parenthesized argument lists such as
// pulse(0, 1u, 5p) are glued into a single token with commas preserved.
std::vector<std::string> tokenize(const std::string& line, int lineno) {
    std::vector<std::string> toks;
    std::string cur;
    int depth = 0;
    for (char c : line) {
        if (c == '(') {
            depth++;
            cur += c;
        } else if (c == ')') {
            depth--;
            if (depth < 0) throw ParseError("unbalanced ')'", lineno);
            cur += c;
        } else if ((std::isspace(static_cast<unsigned char>(c)) || c == ',') && depth == 0) {
            if (!cur.empty()) {
                toks.push_back(cur);
                cur.clear();
            }
        } else if (depth > 0 && std::isspace(static_cast<unsigned char>(c))) {
            // drop whitespace inside argument lists
        } else {
            cur += c;
        }
    }
    if (depth != 0) throw ParseError("unbalanced '('", lineno);
    if (!cur.empty()) toks.push_back(cur);
    return toks;
}

// key=value or key=(...) token -> pair; returns false if no '='.
bool split_kv(const std::string& tok, std::string& key, std::string& val) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) return false;
    key = lower(tok.substr(0, eq));
    val = tok.substr(eq + 1);
    return true;
}

// Parse "name(a,b,c)" -> name + args; returns false if not of that form.
bool split_call(const std::string& tok, std::string& name, std::vector<std::string>& args) {
    auto open = tok.find('(');
    if (open == std::string::npos || tok.back() != ')') return false;
    name = lower(tok.substr(0, open));
    std::string inner = tok.substr(open + 1, tok.size() - open - 2);
    args.clear();
    std::string cur;
    for (char c : inner) {
        if (c == ',') {
            args.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) args.push_back(cur);
    return true;
}

Waveform parse_waveform(const std::string& tok, int lineno) {
    Waveform w;
    std::string name;
    std::vector<std::string> args;
    if (!split_call(tok, name, args)) {
        // bare number means dc
        w.kind = Waveform::Kind::Dc;
        w.dc = parse_value(tok, lineno);
        return w;
    }
    if (name == "dc") {
        if (args.size() != 1) throw ParseError("dc() takes one argument", lineno);
        w.kind = Waveform::Kind::Dc;
        w.dc = parse_value(args[0], lineno);
    } else if (name == "pulse") {
        if (args.size() != 7)
            throw ParseError("pulse() takes 7 arguments (lo,hi,t0,rise,width,fall,period)", lineno);
        w.kind = Waveform::Kind::Pulse;
        w.lo = parse_value(args[0], lineno);
        w.hi = parse_value(args[1], lineno);
        w.t0 = parse_value(args[2], lineno);
        w.rise = parse_value(args[3], lineno);
        w.width = parse_value(args[4], lineno);
        w.fall = parse_value(args[5], lineno);
        w.period = parse_value(args[6], lineno);
    } else if (name == "pwl") {
        if (args.size() < 2 || args.size() % 2 != 0)
            throw ParseError("pwl() takes an even number of arguments", lineno);
        w.kind = Waveform::Kind::Pwl;
        for (size_t i = 0; i < args.size(); i += 2) {
            double t = parse_value(args[i], lineno);
            double v = parse_value(args[i + 1], lineno);
            if (!w.pwl.empty() && t <= w.pwl.back().first)
                throw ParseError("pwl() times must be strictly increasing", lineno);
            w.pwl.emplace_back(t, v);
        }
    } else {
        throw ParseError("unknown waveform '" + name + "'", lineno);
    }
    return w;
}

std::string waveform_text(const Waveform& w) {
    std::ostringstream os;
    switch (w.kind) {
        case Waveform::Kind::Dc:
            os << "dc(" << format_value(w.dc) << ")";
            break;
        case Waveform::Kind::Pulse:
            os << "pulse(" << format_value(w.lo) << "," << format_value(w.hi) << ","
               << format_value(w.t0) << "," << format_value(w.rise) << "," << format_value(w.width)
               << "," << format_value(w.fall) << "," << format_value(w.period) << ")";
            break;
        case Waveform::Kind::Pwl: {
            os << "pwl(";
            bool first = true;
            for (auto& [t, v] : w.pwl) {
                if (!first) os << ",";
                os << format_value(t) << "," << format_value(v);
                first = false;
            }
            os << ")";
            break;
        }
    }
    return os.str();
}

struct ParseCtx {
    Netlist* scope;
    std::string subckt_name;  // empty at top level
};

}  // namespace

std::string ParseError::format(const std::string& msg, int line, int column) {
    std::ostringstream os;
    os << "netlist parse error at line " << line;
    if (column > 0) os << ", column " << column;
    os << ": " << msg;
    return os.str();
}

double Waveform::eval(double t) const {
    switch (kind) {
        case Kind::Dc:
            return dc;
        case Kind::Pulse: {
            if (t < t0) return lo;
            double tt = t - t0;
            if (period > 0.0) tt = std::fmod(tt, period);
            if (tt < rise) return lo + (hi - lo) * (rise > 0 ? tt / rise : 1.0);
            tt -= rise;
            if (tt < width) return hi;
            tt -= width;
            if (tt < fall) return hi + (lo - hi) * (fall > 0 ? tt / fall : 1.0);
            return lo;
        }
        case Kind::Pwl: {
            if (pwl.empty()) return 0.0;
            if (t <= pwl.front().first) return pwl.front().second;
            for (size_t i = 1; i < pwl.size(); ++i) {
                if (t <= pwl[i].first) {
                    auto [t0p, v0] = pwl[i - 1];
                    auto [t1p, v1] = pwl[i];
                    return v0 + (v1 - v0) * (t - t0p) / (t1p - t0p);
                }
            }
            return pwl.back().second;
        }
    }
    return 0.0;
}

Waveform Waveform::scaled(double s) const {
    Waveform w = *this;
    w.dc *= s;
    w.lo *= s;
    w.hi *= s;
    for (auto& [t, v] : w.pwl) v *= s;
    return w;
}

phys::JunctionParams JunctionModel::junction_params(double area) const {
    phys::JunctionParams j;
    j.ic_ref = icrit * area;
    j.rn = rn / area;
    j.r_shunt = rsh / area;
    j.cap = cap * area;
    j.t_ref = tref;
    j.material.tc = tc;
    j.anneal_factor = 1.0;
    j.validate();
    return j;
}

bool Subckt::operator==(const Subckt& o) const {
    if (ports != o.ports || behav != o.behav) return false;
    if (!body || !o.body) return body == o.body;
    return *body == *o.body;
}

bool Netlist::operator==(const Netlist& o) const {
    return title == o.title && elements == o.elements && subckts == o.subckts &&
           models == o.models && ports == o.ports && temp == o.temp && tran == o.tran;
}

double parse_value(const std::string& token, int line) {
    if (token.empty()) throw ParseError("empty numeric literal", line);
    const char* s = token.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s) throw ParseError("bad numeric literal '" + token + "'", line);
    std::string suffix = lower(std::string(end));
    // Strip trailing unit letters after the scale suffix (e.g. 10pH).
    double scale = 1.0;
    if (!suffix.empty()) {
        if (suffix.rfind("meg", 0) == 0) {
            scale = 1e6;
            suffix = suffix.substr(3);
        } else {
            switch (suffix[0]) {
                case 'f': scale = 1e-15; suffix = suffix.substr(1); break;
                case 'p': scale = 1e-12; suffix = suffix.substr(1); break;
                case 'n': scale = 1e-9; suffix = suffix.substr(1); break;
                case 'u': scale = 1e-6; suffix = suffix.substr(1); break;
                case 'm': scale = 1e-3; suffix = suffix.substr(1); break;
                case 'k': scale = 1e3; suffix = suffix.substr(1); break;
                default: break;
            }
        }
        if (!std::all_of(suffix.begin(), suffix.end(), [](unsigned char c) {
                return std::isalpha(c);
            }))
            throw ParseError("bad numeric literal '" + token + "'", line);
    }
    return v * scale;
}

std::string format_value(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

namespace {

Netlist parse_raw(const std::string& text) {
    // Logical lines: join continuations, strip comments.
    struct Line {
        std::string text;
        int number;
    };
    std::vector<Line> lines;
    {
        std::istringstream in(text);
        std::string raw;
        int lineno = 0;
        while (std::getline(in, raw)) {
            lineno++;
            if (!raw.empty() && raw.back() == '\r') raw.pop_back();
            auto semi = raw.find(';');
            if (semi != std::string::npos) raw = raw.substr(0, semi);
            size_t first = raw.find_first_not_of(" \t");
            if (first == std::string::npos) continue;
            if (raw[first] == '*') continue;
            if (raw[first] == '+') {
                if (lines.empty())
                    throw ParseError("continuation line with nothing to continue", lineno);
                lines.back().text += " " + raw.substr(first + 1);
            } else {
                lines.push_back({raw.substr(first), lineno});
            }
        }
    }

    Netlist top;
    std::vector<std::pair<Netlist*, std::string>> stack;  // scope + enclosing subckt name
    stack.emplace_back(&top, "");

    auto check_unique = [](Netlist& scope, const std::string& name, int lineno) {
        for (auto& e : scope.elements)
            if (e.name == name)
                throw ParseError("duplicate element name '" + name + "'", lineno);
    };

    for (auto& [line, lineno] : lines) {
        auto toks = tokenize(line, lineno);
        if (toks.empty()) continue;
        Netlist& scope = *stack.back().first;
        std::string head = lower(toks[0]);

        if (head[0] == '.') {
            if (head == ".title") {
                auto pos = line.find_first_of(" \t");
                scope.title = pos == std::string::npos ? "" : line.substr(pos + 1);
            } else if (head == ".subckt") {
                if (toks.size() < 2) throw ParseError(".subckt needs a name", lineno);
                std::string name = lower(toks[1]);
                if (scope.subckts.count(name))
                    throw ParseError("duplicate subckt '" + name + "'", lineno);
                Subckt sub;
                for (size_t i = 2; i < toks.size(); ++i) sub.ports.push_back(lower(toks[i]));
                sub.body = std::make_shared<Netlist>();
                auto [it, ok] = scope.subckts.emplace(name, std::move(sub));
                (void)ok;
                stack.emplace_back(it->second.body.get(), name);
            } else if (head == ".ends") {
                if (stack.size() == 1) throw ParseError(".ends without .subckt", lineno);
                stack.pop_back();
            } else if (head == ".model") {
                if (toks.size() != 3) throw ParseError(".model needs a name and jj(...)", lineno);
                std::string name = lower(toks[1]);
                if (scope.models.count(name))
                    throw ParseError("duplicate model '" + name + "'", lineno);
                std::string mtype;
                std::vector<std::string> args;
                if (!split_call(toks[2], mtype, args) || mtype != "jj")
                    throw ParseError("only jj(...) models are supported", lineno);
                JunctionModel m;
                m.line = lineno;
                std::set<std::string> seen;
                for (auto& a : args) {
                    std::string k, v;
                    if (!split_kv(a, k, v))
                        throw ParseError("model parameter must be key=value", lineno);
                    double val = parse_value(v, lineno);
                    if (k == "icrit") m.icrit = val;
                    else if (k == "rn") m.rn = val;
                    else if (k == "rsh") m.rsh = val;
                    else if (k == "cap") m.cap = val;
                    else if (k == "tc") m.tc = val;
                    else if (k == "tref") m.tref = val;
                    else throw ParseError("unknown model parameter '" + k + "'", lineno);
                    seen.insert(k);
                }
                for (const char* req : {"icrit", "rn", "rsh", "cap", "tc"})
                    if (!seen.count(req))
                        throw ParseError(std::string("model missing parameter '") + req + "'",
                                         lineno);
                scope.models.emplace(name, m);
            } else if (head == ".temp") {
                if (toks.size() != 2) throw ParseError(".temp needs one value", lineno);
                scope.temp = parse_value(toks[1], lineno);
            } else if (head == ".tran") {
                if (toks.size() != 3) throw ParseError(".tran needs dt and tstop", lineno);
                scope.tran = {parse_value(toks[1], lineno), parse_value(toks[2], lineno)};
            } else if (head == ".port") {
                if (toks.size() != 3) throw ParseError(".port needs a name and a target", lineno);
                scope.ports.push_back({lower(toks[1]), lower(toks[2]), lineno});
            } else if (head == ".behav") {
                if (stack.size() < 2)
                    throw ParseError(".behav is only valid inside .subckt", lineno);
                if (toks.size() < 2) throw ParseError(".behav needs a cell kind", lineno);
                BehavSpec b;
                b.kind = lower(toks[1]);
                for (size_t i = 2; i < toks.size(); ++i) {
                    std::string k, v;
                    if (!split_kv(toks[i], k, v))
                        throw ParseError(".behav parameter must be key=value", lineno);
                    if (k == "delay") b.delay = parse_value(v, lineno);
                    else if (k == "window") {
                        if (v.size() < 5 || v.front() != '(' || v.back() != ')')
                            throw ParseError("window must be (lo,hi)", lineno);
                        std::string inner = v.substr(1, v.size() - 2);
                        auto comma = inner.find(',');
                        if (comma == std::string::npos)
                            throw ParseError("window must be (lo,hi)", lineno);
                        b.win_lo = parse_value(inner.substr(0, comma), lineno);
                        b.win_hi = parse_value(inner.substr(comma + 1), lineno);
                    } else if (k == "inom") b.i_nom = parse_value(v, lineno);
                    else if (k == "jitter") b.win_jitter = parse_value(v, lineno);
                    else if (k == "tcsigma") b.tc_sigma = parse_value(v, lineno);
                    else if (k == "drive") b.drive = parse_value(v, lineno);
                    else throw ParseError("unknown .behav parameter '" + k + "'", lineno);
                }
                // attach to the enclosing subckt definition
                Netlist& parent = *stack[stack.size() - 2].first;
                parent.subckts.at(stack.back().second).behav = b;
            } else {
                throw ParseError("unknown directive '" + head + "'", lineno);
            }
            continue;
        }

        // Element line.
        Element e;
        e.line = lineno;
        e.name = head;
        char k = head[0];
        if (!is_ident_char(k)) throw ParseError("bad element name '" + head + "'", lineno);
        switch (k) {
            case 'b': e.kind = ElementKind::Junction; break;
            case 'l': e.kind = ElementKind::Inductor; break;
            case 'r': e.kind = ElementKind::Resistor; break;
            case 'c': e.kind = ElementKind::Capacitor; break;
            case 'i': e.kind = ElementKind::CurrentSource; break;
            case 'x': e.kind = ElementKind::SubcktInstance; break;
            default:
                throw ParseError("unknown element kind '" + std::string(1, k) + "' in '" + head +
                                     "'",
                                 lineno);
        }
        check_unique(scope, e.name, lineno);

        if (e.kind == ElementKind::Junction) {
            if (toks.size() < 4) throw ParseError("junction needs: B<name> n+ n- model", lineno);
            e.nodes = {lower(toks[1]), lower(toks[2])};
            e.model = lower(toks[3]);
            for (size_t i = 4; i < toks.size(); ++i) {
                std::string key, val;
                if (!split_kv(toks[i], key, val))
                    throw ParseError("junction parameter must be key=value", lineno);
                if (key == "area") {
                    e.area = parse_value(val, lineno);
                    if (e.area <= 0.0) throw ParseError("area must be > 0", lineno);
                } else {
                    throw ParseError("unknown junction parameter '" + key + "'", lineno);
                }
            }
        } else if (e.kind == ElementKind::SubcktInstance) {
            if (toks.size() < 3)
                throw ParseError("instance needs: X<name> <subckt> <nodes...>", lineno);
            e.model = lower(toks[1]);
            for (size_t i = 2; i < toks.size(); ++i) {
                std::string key, val;
                if (split_kv(toks[i], key, val)) {
                    e.params[key] = parse_value(val, lineno);
                } else {
                    if (!e.params.empty())
                        throw ParseError("instance nodes must precede parameters", lineno);
                    e.nodes.push_back(lower(toks[i]));
                }
            }
        } else if (e.kind == ElementKind::CurrentSource) {
            if (toks.size() != 4)
                throw ParseError("source needs: I<name> n+ n- <waveform>", lineno);
            e.nodes = {lower(toks[1]), lower(toks[2])};
            e.waveform = parse_waveform(toks[3], lineno);
        } else {
            if (toks.size() != 4)
                throw ParseError("element needs: <name> n+ n- <value>", lineno);
            e.nodes = {lower(toks[1]), lower(toks[2])};
            e.value = parse_value(toks[3], lineno);
            if (e.value <= 0.0 && e.kind != ElementKind::Capacitor)
                throw ParseError("value must be > 0", lineno);
            if (e.kind == ElementKind::Capacitor && e.value < 0.0)
                throw ParseError("capacitance must be >= 0", lineno);
        }
        scope.elements.push_back(std::move(e));
    }

    if (stack.size() != 1) throw ParseError("missing .ends", lines.empty() ? 0 : lines.back().number);
    return top;
}

// Walk elements of a scope chain and verify every model / subckt reference
// resolves. `chain` is ordered outermost-first; `library` may be null.
void check_refs(const Netlist& scope, std::vector<const Netlist*>& chain, const Netlist* library) {
    chain.push_back(&scope);
    auto find_model = [&](const std::string& name) -> bool {
        for (auto it = chain.rbegin(); it != chain.rend(); ++it)
            if ((*it)->models.count(name)) return true;
        return library && library->models.count(name);
    };
    auto find_subckt = [&](const std::string& name) -> const Subckt* {
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            auto f = (*it)->subckts.find(name);
            if (f != (*it)->subckts.end()) return &f->second;
        }
        if (library) {
            auto f = library->subckts.find(name);
            if (f != library->subckts.end()) return &f->second;
        }
        return nullptr;
    };
    for (const auto& e : scope.elements) {
        if (e.kind == ElementKind::Junction && !find_model(e.model))
            throw ParseError("undefined model '" + e.model + "'", e.line);
        if (e.kind == ElementKind::SubcktInstance) {
            const Subckt* sub = find_subckt(e.model);
            if (!sub) throw ParseError("undefined subckt '" + e.model + "'", e.line);
            if (sub->ports.size() != e.nodes.size())
                throw ParseError("instance '" + e.name + "' connects " +
                                     std::to_string(e.nodes.size()) + " nodes but subckt '" +
                                     e.model + "' has " + std::to_string(sub->ports.size()) +
                                     " ports",
                                 e.line);
        }
    }
    for (const auto& [name, sub] : scope.subckts) check_refs(*sub.body, chain, library);
    chain.pop_back();
}

}  // namespace

Netlist parse(const std::string& text) { return parse(text, nullptr); }

Netlist parse(const std::string& text, const Netlist* library) {
    Netlist top = parse_raw(text);
    std::vector<const Netlist*> chain;
    check_refs(top, chain, library);
    return top;
}

namespace {

void serialize_scope(const Netlist& n, std::ostringstream& os, int depth) {
    std::string ind(static_cast<size_t>(depth) * 2, ' ');
    if (!n.title.empty() && depth == 0) os << ".title " << n.title << "\n";
    for (auto& [name, m] : n.models) {
        os << ind << ".model " << name << " jj(icrit=" << format_value(m.icrit)
           << ", rn=" << format_value(m.rn) << ", rsh=" << format_value(m.rsh)
           << ", cap=" << format_value(m.cap) << ", tc=" << format_value(m.tc)
           << ", tref=" << format_value(m.tref) << ")\n";
    }
    for (auto& [name, sub] : n.subckts) {
        os << ind << ".subckt " << name;
        for (auto& p : sub.ports) os << " " << p;
        os << "\n";
        if (sub.behav) {
            const BehavSpec& b = *sub.behav;
            os << ind << "  .behav " << b.kind << " delay=" << format_value(b.delay)
               << " window=(" << format_value(b.win_lo) << "," << format_value(b.win_hi) << ")"
               << " inom=" << format_value(b.i_nom) << " jitter=" << format_value(b.win_jitter)
               << " tcsigma=" << format_value(b.tc_sigma) << " drive=" << format_value(b.drive)
               << "\n";
        }
        serialize_scope(*sub.body, os, depth + 1);
        os << ind << ".ends\n";
    }
    for (auto& e : n.elements) {
        os << ind;
        switch (e.kind) {
            case ElementKind::Junction:
                os << e.name << " " << e.nodes[0] << " " << e.nodes[1] << " " << e.model;
                if (e.area != 1.0) os << " area=" << format_value(e.area);
                break;
            case ElementKind::Inductor:
            case ElementKind::Resistor:
            case ElementKind::Capacitor:
                os << e.name << " " << e.nodes[0] << " " << e.nodes[1] << " "
                   << format_value(e.value);
                break;
            case ElementKind::CurrentSource:
                os << e.name << " " << e.nodes[0] << " " << e.nodes[1] << " "
                   << waveform_text(e.waveform);
                break;
            case ElementKind::SubcktInstance:
                os << e.name << " " << e.model;
                for (auto& nd : e.nodes) os << " " << nd;
                for (auto& [k, v] : e.params) os << " " << k << "=" << format_value(v);
                break;
        }
        os << "\n";
    }
    if (depth == 0) {
        for (auto& p : n.ports) os << ".port " << p.name << " " << p.target << "\n";
        if (n.temp) os << ".temp " << format_value(*n.temp) << "\n";
        if (n.tran) os << ".tran " << format_value(n.tran->first) << " "
                       << format_value(n.tran->second) << "\n";
    }
}

}  // namespace

std::string serialize(const Netlist& n) {
    std::ostringstream os;
    serialize_scope(n, os, 0);
    return os.str();
}

}  // namespace sfq::net
