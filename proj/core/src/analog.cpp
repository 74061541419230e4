#include "sfqlab/analog.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sfqlab/rng.hpp"

namespace sfq::analog {

namespace {

// Internal unit system: ps / uA / mV (so R is in kOhm, L in nH, C in fF).
// phi0 = 2.0678 mV*ps conditions the Jacobian at O(1).
constexpr double kPhi0Int = PhysicalConstants::phi0 * 1e15;     // mV*ps
constexpr double kK = kPhi0Int / (2.0 * std::numbers::pi);      // mV*ps/rad

struct JJState {
    int a, b;
    double ic;        // uA, at run temperature
    double g_r;       // K/R, uA*ps/rad
    double g_c;       // C*K, uA*ps^2/rad
    double noise_sigma = 0.0;  // uA
    double d = 0.0, v = 0.0, acc = 0.0;
    double noise = 0.0;
};

struct RState {
    int a, b;
    double g_r;  // K/R
    double noise_sigma = 0.0;
    double d = 0.0, v = 0.0;
    double noise = 0.0;
};

struct LState {
    int a, b;
    double g_l;  // K/L, uA/rad
};

struct CState {
    int a, b;
    double g_c;  // C*K
    double d = 0.0, v = 0.0, acc = 0.0;
};

struct SrcState {
    int a, b;
    const net::Waveform* w;
    double scale;  // unit conversion and bias scaling
};

double phase_at(const Eigen::VectorXd& phi, int node) {
    return node == net::kGroundNode ? 0.0 : phi[node];
}

}  // namespace

void SolverConfig::validate() const {
    if (dt <= 0.0) throw std::domain_error("SolverConfig: dt must be > 0");
    if (t_stop <= dt) throw std::domain_error("SolverConfig: t_stop must be > dt");
    if (bias_scale <= 0.0) throw std::domain_error("SolverConfig: bias_scale must be > 0");
    if (newton_tol <= 0.0) throw std::domain_error("SolverConfig: newton_tol must be > 0");
    if (max_newton_iters < 1) throw std::domain_error("SolverConfig: max_newton_iters must be >= 1");
    if (temperature < 0.0) throw std::domain_error("SolverConfig: temperature must be >= 0");
}

int TransientResult::junction_by_name(const std::string& name) const {
    for (size_t i = 0; i < junction_names.size(); ++i)
        if (junction_names[i] == name) return static_cast<int>(i);
    return -1;
}

double TransientResult::junction_voltage(std::size_t junction, std::size_t step) const {
    auto [a, b] = junction_nodes[junction];
    double va = a == net::kGroundNode ? 0.0 : node_voltage[static_cast<size_t>(a)][step];
    double vb = b == net::kGroundNode ? 0.0 : node_voltage[static_cast<size_t>(b)][step];
    return va - vb;
}

TransientResult transient(const net::FlatCircuit& fc, const SolverConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(fc.num_nodes());
    if (n == 0) throw SolverError("transient: circuit has no nodes");

    const double h = cfg.dt * 1e12;  // ps
    const double alpha = 2.0 / h;
    const std::size_t steps = static_cast<std::size_t>(cfg.t_stop / cfg.dt);

    // Element setup in internal units.
    std::vector<JJState> jjs;
    jjs.reserve(fc.junctions.size());
    for (const auto& j : fc.junctions) {
        JJState s;
        s.a = j.a;
        s.b = j.b;
        s.ic = phys::ic_at(cfg.temperature, j.params) * 1e6;
        s.g_r = kK / (j.params.r_damp() * 1e-3);
        s.g_c = j.params.cap * 1e15 * kK;
        if (cfg.noise_enabled && cfg.temperature > 0.0)
            s.noise_sigma = phys::johnson_sigma(j.params.r_damp(), cfg.temperature, cfg.dt) * 1e6;
        jjs.push_back(s);
    }
    std::vector<RState> res;
    res.reserve(fc.resistors.size());
    for (const auto& r : fc.resistors) {
        RState s;
        s.a = r.a;
        s.b = r.b;
        s.g_r = kK / (r.value * 1e-3);
        if (cfg.noise_enabled && cfg.temperature > 0.0)
            s.noise_sigma = phys::johnson_sigma(r.value, cfg.temperature, cfg.dt) * 1e6;
        res.push_back(s);
    }
    std::vector<LState> inds;
    inds.reserve(fc.inductors.size());
    for (const auto& l : fc.inductors) inds.push_back({l.a, l.b, kK / (l.value * 1e9)});
    std::vector<CState> caps;
    caps.reserve(fc.capacitors.size());
    for (const auto& c : fc.capacitors) {
        CState s;
        s.a = c.a;
        s.b = c.b;
        s.g_c = c.value * 1e15 * kK;
        caps.push_back(s);
    }
    std::vector<SrcState> srcs;
    srcs.reserve(fc.sources.size());
    for (const auto& s : fc.sources)
        srcs.push_back({s.a, s.b, &s.waveform, 1e6 * (s.is_bias ? cfg.bias_scale : 1.0)});

    // Constant part of the Jacobian.
    Eigen::MatrixXd g_lin = Eigen::MatrixXd::Zero(n, n);
    auto stamp_g = [&](int a, int b, double g) {
        if (a != net::kGroundNode) g_lin(a, a) += g;
        if (b != net::kGroundNode) g_lin(b, b) += g;
        if (a != net::kGroundNode && b != net::kGroundNode) {
            g_lin(a, b) -= g;
            g_lin(b, a) -= g;
        }
    };
    for (auto& j : jjs) stamp_g(j.a, j.b, j.g_r * alpha + j.g_c * alpha * alpha);
    for (auto& r : res) stamp_g(r.a, r.b, r.g_r * alpha);
    for (auto& l : inds) stamp_g(l.a, l.b, l.g_l);
    for (auto& c : caps) stamp_g(c.a, c.b, c.g_c * alpha * alpha);

    TransientResult tr;
    tr.config = cfg;
    tr.ports = fc.ports;
    tr.time.reserve(steps + 1);
    tr.junction_names.reserve(jjs.size());
    for (const auto& j : fc.junctions) {
        tr.junction_names.push_back(j.name);
        tr.junction_nodes.emplace_back(j.a, j.b);
    }
    tr.node_names = fc.node_names;
    tr.phase.assign(jjs.size(), {});
    for (auto& p : tr.phase) p.reserve(steps + 1);
    tr.node_voltage.assign(static_cast<size_t>(n), {});
    for (auto& v : tr.node_voltage) v.reserve(steps + 1);
    tr.slip_times.assign(jjs.size(), {});

    Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd phi_prev = phi;
    std::vector<double> node_rate(static_cast<size_t>(n), 0.0);  // dphi/dt per node, rad/ps
    std::vector<double> next_thresh(jjs.size(), std::numbers::pi);

    auto record = [&](double t_s) {
        tr.time.push_back(t_s);
        for (size_t k = 0; k < jjs.size(); ++k)
            tr.phase[k].push_back(phase_at(phi, jjs[k].a) - phase_at(phi, jjs[k].b));
        for (int i = 0; i < n; ++i)
            tr.node_voltage[static_cast<size_t>(i)].push_back(
                kK * node_rate[static_cast<size_t>(i)] * 1e-3);  // mV -> V
    };
    record(0.0);

    Eigen::MatrixXd jac(n, n);
    Eigen::VectorXd f(n), delta(n);

    const CounterRng noise_rng(cfg.seed, 0x6e6f697365ULL);  // "noise" stream

    for (std::size_t step = 1; step <= steps; ++step) {
        const double t_ps = static_cast<double>(step) * h;
        const double t_s = t_ps * 1e-12;

        // Per-step noise draws, keyed by (element, step) so they do not
        // depend on evaluation order.
        if (cfg.noise_enabled) {
            std::uint64_t elem = 0;
            for (auto& j : jjs) {
                if (j.noise_sigma > 0.0)
                    j.noise = j.noise_sigma *
                              CounterRng(noise_rng.bits(elem), 1).normal(step);
                elem++;
            }
            for (auto& r : res) {
                if (r.noise_sigma > 0.0)
                    r.noise = r.noise_sigma *
                              CounterRng(noise_rng.bits(elem), 1).normal(step);
                elem++;
            }
        }

        // Newton iteration on node phases.
        bool converged = false;
        for (int iter = 0; iter < cfg.max_newton_iters; ++iter) {
            jac = g_lin;
            f.setZero();
            auto kcl = [&](int a, int b, double i) {
                if (a != net::kGroundNode) f[a] += i;
                if (b != net::kGroundNode) f[b] -= i;
            };
            for (auto& j : jjs) {
                double d = phase_at(phi, j.a) - phase_at(phi, j.b);
                double dv = alpha * (d - j.d) - j.v;        // new d-dot
                double da = alpha * (dv - j.v) - j.acc;     // new d-ddot
                double i = j.ic * std::sin(d) + j.g_r * dv + j.g_c * da + j.noise;
                kcl(j.a, j.b, i);
                double g = j.ic * std::cos(d);
                if (j.a != net::kGroundNode) jac(j.a, j.a) += g;
                if (j.b != net::kGroundNode) jac(j.b, j.b) += g;
                if (j.a != net::kGroundNode && j.b != net::kGroundNode) {
                    jac(j.a, j.b) -= g;
                    jac(j.b, j.a) -= g;
                }
            }
            for (auto& r : res) {
                double d = phase_at(phi, r.a) - phase_at(phi, r.b);
                double dv = alpha * (d - r.d) - r.v;
                kcl(r.a, r.b, r.g_r * dv + r.noise);
            }
            for (auto& l : inds) {
                double d = phase_at(phi, l.a) - phase_at(phi, l.b);
                kcl(l.a, l.b, l.g_l * d);
            }
            for (auto& c : caps) {
                double d = phase_at(phi, c.a) - phase_at(phi, c.b);
                double dv = alpha * (d - c.d) - c.v;
                double da = alpha * (dv - c.v) - c.acc;
                kcl(c.a, c.b, c.g_c * da);
            }
            for (auto& s : srcs) {
                double i = s.w->eval(t_s) * s.scale;
                if (s.a != net::kGroundNode) f[s.a] += i;
                if (s.b != net::kGroundNode) f[s.b] -= i;
            }

            delta = jac.partialPivLu().solve(-f);
            if (!delta.allFinite())
                throw SolverError(
                    "transient: singular system matrix (floating node or degenerate topology)");
            phi += delta;
            if (delta.cwiseAbs().maxCoeff() < cfg.newton_tol) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            int worst = 0;
            f.cwiseAbs().maxCoeff(&worst);
            std::ostringstream os;
            os << "transient: Newton failed to converge at t=" << t_s << " s (worst node '"
               << fc.node_names[static_cast<size_t>(worst)] << "')";
            throw SolverError(os.str());
        }

        // Commit trapezoidal states.
        for (auto& j : jjs) {
            double d = phase_at(phi, j.a) - phase_at(phi, j.b);
            double dv = alpha * (d - j.d) - j.v;
            double da = alpha * (dv - j.v) - j.acc;
            j.d = d;
            j.v = dv;
            j.acc = da;
        }
        for (auto& r : res) {
            double d = phase_at(phi, r.a) - phase_at(phi, r.b);
            double dv = alpha * (d - r.d) - r.v;
            r.d = d;
            r.v = dv;
        }
        for (auto& c : caps) {
            double d = phase_at(phi, c.a) - phase_at(phi, c.b);
            double dv = alpha * (d - c.d) - c.v;
            double da = alpha * (dv - c.v) - c.acc;
            c.d = d;
            c.v = dv;
            c.acc = da;
        }
        for (int i = 0; i < n; ++i) {
            auto u = static_cast<size_t>(i);
            node_rate[u] = alpha * (phi[i] - phi_prev[i]) - node_rate[u];
        }
        phi_prev = phi;

        record(t_s);

        // Slip detection with linear interpolation of the crossing time.
        for (size_t k = 0; k < jjs.size(); ++k) {
            const auto& ph = tr.phase[k];
            double d_prev = ph[ph.size() - 2];
            double d_now = ph.back();
            while (d_now > next_thresh[k]) {
                double frac = (next_thresh[k] - d_prev) / (d_now - d_prev);
                double t_cross = (static_cast<double>(step - 1) + frac) * h * 1e-12;
                tr.slip_times[k].push_back(t_cross);
                next_thresh[k] += 2.0 * std::numbers::pi;
            }
        }
    }
    return tr;
}

PulseTrain detect_pulses(const TransientResult& tr, const std::vector<std::string>& ports) {
    PulseTrain pt;
    for (const auto& p : ports) {
        int ji = -1;
        auto it = tr.ports.find(p);
        if (it != tr.ports.end()) {
            if (it->second.kind != net::FlatPort::Kind::Junction)
                throw std::invalid_argument("detect_pulses: port '" + p +
                                            "' is a node, not a junction");
            ji = it->second.index;
        } else {
            ji = tr.junction_by_name(p);
        }
        if (ji < 0) throw std::invalid_argument("detect_pulses: unknown port '" + p + "'");
        for (double t : tr.slip_times[static_cast<size_t>(ji)]) pt.add(p, t);
        if (tr.slip_times[static_cast<size_t>(ji)].empty()) (void)pt.events(p);
    }
    return pt;
}

double flux_between(const TransientResult& tr, const std::string& junction, double t0, double t1) {
    int ji = tr.junction_by_name(junction);
    if (ji < 0) {
        auto it = tr.ports.find(junction);
        if (it != tr.ports.end() && it->second.kind == net::FlatPort::Kind::Junction)
            ji = it->second.index;
    }
    if (ji < 0) throw std::invalid_argument("flux_between: unknown junction '" + junction + "'");
    if (t1 <= t0) throw std::invalid_argument("flux_between: t1 must exceed t0");
    const auto& time = tr.time;
    double acc = 0.0;
    for (size_t s = 1; s < time.size(); ++s) {
        if (time[s] <= t0 || time[s - 1] >= t1) continue;
        double va = tr.junction_voltage(static_cast<size_t>(ji), s - 1);
        double vb = tr.junction_voltage(static_cast<size_t>(ji), s);
        acc += 0.5 * (va + vb) * (time[s] - time[s - 1]);
    }
    return acc;
}

double pulse_area_check(const TransientResult& tr, const std::string& junction,
                        std::size_t slip_index) {
    int ji = tr.junction_by_name(junction);
    if (ji < 0) {
        auto it = tr.ports.find(junction);
        if (it != tr.ports.end() && it->second.kind == net::FlatPort::Kind::Junction)
            ji = it->second.index;
    }
    if (ji < 0)
        throw std::invalid_argument("pulse_area_check: unknown junction '" + junction + "'");
    const auto& slips = tr.slip_times[static_cast<size_t>(ji)];
    if (slips.empty()) throw std::domain_error("pulse_area_check: junction has no slips");
    if (slip_index >= slips.size())
        throw std::domain_error("pulse_area_check: slip index out of range");

    double t_lo = slip_index == 0 ? tr.time.front()
                                  : 0.5 * (slips[slip_index - 1] + slips[slip_index]);
    double t_hi = slip_index + 1 < slips.size() ? 0.5 * (slips[slip_index] + slips[slip_index + 1])
                                                : tr.time.back();
    return flux_between(tr, junction, t_lo, t_hi);
}

std::string traces_csv(const TransientResult& tr, const std::vector<std::string>& channels) {
    std::vector<std::pair<std::string, const std::vector<double>*>> cols;
    auto add_all = [&]() {
        for (size_t i = 0; i < tr.node_names.size(); ++i)
            cols.emplace_back("v:" + tr.node_names[i], &tr.node_voltage[i]);
        for (size_t i = 0; i < tr.junction_names.size(); ++i)
            cols.emplace_back("phi:" + tr.junction_names[i], &tr.phase[i]);
    };
    if (channels.empty()) {
        add_all();
    } else {
        for (const auto& ch : channels) {
            if (ch.rfind("v:", 0) == 0) {
                std::string node = ch.substr(2);
                bool found = false;
                for (size_t i = 0; i < tr.node_names.size(); ++i)
                    if (tr.node_names[i] == node) {
                        cols.emplace_back(ch, &tr.node_voltage[i]);
                        found = true;
                    }
                if (!found) throw std::invalid_argument("traces_csv: unknown node '" + node + "'");
            } else if (ch.rfind("phi:", 0) == 0) {
                int ji = tr.junction_by_name(ch.substr(4));
                if (ji < 0)
                    throw std::invalid_argument("traces_csv: unknown junction '" + ch.substr(4) +
                                                "'");
                cols.emplace_back(ch, &tr.phase[static_cast<size_t>(ji)]);
            } else {
                throw std::invalid_argument("traces_csv: channel must be v:<node> or phi:<junction>");
            }
        }
    }
    std::ostringstream os;
    os.precision(12);
    os << "time";
    for (auto& [name, v] : cols) os << "," << name;
    os << "\r\n";
    for (size_t s = 0; s < tr.time.size(); ++s) {
        os << tr.time[s];
        for (auto& [name, v] : cols) os << "," << (*v)[s];
        os << "\r\n";
    }
    return os.str();
}

namespace {
constexpr char kTraceMagic[8] = {'S', 'F', 'Q', 'T', 'R', 'A', 'C', 'E'};

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<char*>(&v), 4); }
void put_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<char*>(&v), 8); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<char*>(&v), 8); }
std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
double get_f64(std::istream& is) {
    double v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
}  // namespace

void write_trace_file(const TransientResult& tr, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_trace_file: cannot open '" + path + "'");
    os.write(kTraceMagic, 8);
    put_u32(os, 1);  // version
    put_u32(os, 0);  // flags
    put_f64(os, tr.config.dt);
    put_u64(os, tr.time.size());
    std::uint32_t nchan =
        static_cast<std::uint32_t>(tr.node_voltage.size() + tr.phase.size());
    put_u32(os, nchan);
    auto put_name = [&](std::uint8_t kind, const std::string& name) {
        os.put(static_cast<char>(kind));
        std::uint32_t len = static_cast<std::uint32_t>(name.size());
        put_u32(os, len);
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
    };
    for (size_t i = 0; i < tr.node_names.size(); ++i) put_name(0, tr.node_names[i]);
    for (size_t i = 0; i < tr.junction_names.size(); ++i) put_name(1, tr.junction_names[i]);
    for (const auto& col : tr.node_voltage)
        os.write(reinterpret_cast<const char*>(col.data()),
                 static_cast<std::streamsize>(col.size() * 8));
    for (const auto& col : tr.phase)
        os.write(reinterpret_cast<const char*>(col.data()),
                 static_cast<std::streamsize>(col.size() * 8));
}

TransientResult read_trace_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_trace_file: cannot open '" + path + "'");
    char magic[8];
    is.read(magic, 8);
    if (std::memcmp(magic, kTraceMagic, 8) != 0)
        throw std::runtime_error("read_trace_file: bad magic");
    std::uint32_t version = get_u32(is);
    if (version != 1) throw std::runtime_error("read_trace_file: unsupported version");
    get_u32(is);  // flags
    TransientResult tr;
    tr.config.dt = get_f64(is);
    std::uint64_t nsteps = get_u64(is);
    std::uint32_t nchan = get_u32(is);
    std::vector<std::pair<std::uint8_t, std::string>> chans;
    for (std::uint32_t c = 0; c < nchan; ++c) {
        std::uint8_t kind = static_cast<std::uint8_t>(is.get());
        std::uint32_t len = get_u32(is);
        std::string name(len, '\0');
        is.read(name.data(), len);
        chans.emplace_back(kind, name);
    }
    tr.time.resize(nsteps);
    for (std::uint64_t s = 0; s < nsteps; ++s) tr.time[s] = static_cast<double>(s) * tr.config.dt;
    for (auto& [kind, name] : chans) {
        std::vector<double> col(nsteps);
        is.read(reinterpret_cast<char*>(col.data()), static_cast<std::streamsize>(nsteps * 8));
        if (kind == 0) {
            tr.node_names.push_back(name);
            tr.node_voltage.push_back(std::move(col));
        } else {
            tr.junction_names.push_back(name);
            tr.phase.push_back(std::move(col));
            tr.slip_times.emplace_back();
            tr.junction_nodes.emplace_back(net::kGroundNode, net::kGroundNode);
        }
    }
    if (!is) throw std::runtime_error("read_trace_file: truncated file");
    return tr;
}

net::FlatCircuit ersfq_transform(const net::FlatCircuit& fc, double limiter_ratio) {
    if (limiter_ratio <= 1.0)
        throw std::domain_error("ersfq_transform: limiter_ratio must be > 1");
    net::FlatCircuit out = fc;
    out.sources.clear();

    auto add_node = [&](const std::string& name) {
        int id = static_cast<int>(out.node_names.size());
        out.node_names.push_back(name);
        out.node_index.emplace(name, id);
        return id;
    };
    int rail = add_node("ersfq.rail");

    double total = 0.0;
    int idx = 0;
    for (const auto& s : fc.sources) {
        if (!s.is_bias) {
            out.sources.push_back(s);
            continue;
        }
        double nominal = s.waveform.eval(1.0);  // steady level, A
        if (nominal <= 0.0) {
            out.sources.push_back(s);
            continue;
        }
        total += nominal;
        int inject = s.b == net::kGroundNode ? s.a : s.b;
        int mid = add_node("ersfq.m" + std::to_string(idx));

        net::FlatJunction jf;
        jf.name = "ersfq.jf" + std::to_string(idx);
        jf.a = rail;
        jf.b = mid;
        jf.model = "ersfq_limiter";
        jf.params.ic_ref = limiter_ratio * nominal;
        jf.params.t_ref = 4.2;
        jf.params.material.tc = 8.5;
        jf.params.cap = 120e-15 * (jf.params.ic_ref / 20e-6);
        jf.params.r_shunt = std::sqrt(PhysicalConstants::phi0 /
                                      (2.0 * std::numbers::pi * jf.params.ic_ref * jf.params.cap));
        jf.params.rn = 10.0 * jf.params.r_shunt;
        out.junctions.push_back(jf);

        // Branch inductance scales inversely with the tap's nominal current
        // so the rail current divides in proportion to the original biases.
        double lb = 0.5e-9 * (20e-6 / nominal);
        out.inductors.push_back({"ersfq.lb" + std::to_string(idx), mid, inject, lb});
        idx++;
    }
    if (idx == 0) return out;  // nothing to do

    net::FlatSource rail_src;
    rail_src.name = "ib.ersfq";
    rail_src.a = net::kGroundNode;
    rail_src.b = rail;
    rail_src.waveform.kind = net::Waveform::Kind::Pwl;
    rail_src.waveform.pwl = {{0.0, 0.0}, {100e-12, total}};
    rail_src.is_bias = true;
    out.sources.push_back(rail_src);
    out.resistors.push_back({"ersfq.rn", rail, net::kGroundNode, 1.0});
    return out;
}

}  // namespace sfq::analog
