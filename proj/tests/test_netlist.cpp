#include <random>
#include <sstream>

#include "doctest.h"
#include "sfqlab/flatten.hpp"
#include "sfqlab/netlist.hpp"

using namespace sfq;
using namespace sfq::net;

TEST_CASE("numeric suffixes") {
    CHECK(parse_value("20u") == doctest::Approx(20e-6).epsilon(1e-15));
    CHECK(parse_value("50f") == doctest::Approx(50e-15).epsilon(1e-15));
    CHECK(parse_value("0.1p") == doctest::Approx(0.1e-12).epsilon(1e-15));
    CHECK(parse_value("3n") == doctest::Approx(3e-9).epsilon(1e-15));
    CHECK(parse_value("2m") == doctest::Approx(2e-3).epsilon(1e-15));
    CHECK(parse_value("5k") == doctest::Approx(5e3).epsilon(1e-15));
    CHECK(parse_value("1meg") == doctest::Approx(1e6).epsilon(1e-15));
    CHECK(parse_value("1MEG") == doctest::Approx(1e6).epsilon(1e-15));
    CHECK(parse_value("10pH") == doctest::Approx(10e-12).epsilon(1e-15));
    CHECK(parse_value("-3.5e-12") == doctest::Approx(-3.5e-12).epsilon(1e-15));
    CHECK_THROWS_AS(parse_value("abc"), ParseError);
    CHECK_THROWS_AS(parse_value("1q2"), ParseError);
}

TEST_CASE("single junction netlist parses") {
    auto n = parse("B1 1 0 jmod area=1\n.model jmod jj(icrit=20u, rn=100, rsh=2, cap=50f, tc=8.5)");
    REQUIRE(n.elements.size() == 1);
    CHECK(n.elements[0].kind == ElementKind::Junction);
    CHECK(n.elements[0].name == "b1");
    CHECK(n.elements[0].model == "jmod");
    REQUIRE(n.models.count("jmod") == 1);
    auto j = n.models.at("jmod").junction_params(1.0);
    CHECK(j.ic_ref == doctest::Approx(20e-6).epsilon(1e-12));
    CHECK(j.material.tc == 8.5);
    CHECK(j.rn == 100.0);
}

TEST_CASE("undefined model errors name the model and line") {
    try {
        parse("* comment\nB1 1 0 nomodel");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("nomodel") != std::string::npos);
        CHECK(e.line() == 2);
    }
}

TEST_CASE("undefined subckt and arity errors") {
    CHECK_THROWS_AS(parse("X1 foo 1 2"), ParseError);
    std::string text =
        ".subckt jtl in out\n"
        "L1 in out 10p\n"
        ".ends\n"
        "X1 jtl 1 2 3\n";
    CHECK_THROWS_AS(parse(text), ParseError);
}

TEST_CASE("duplicate names are rejected") {
    CHECK_THROWS_AS(parse("R1 1 0 2\nR1 2 0 2"), ParseError);
    CHECK_THROWS_AS(parse(".model m jj(icrit=20u,rn=1,rsh=1,cap=0,tc=8.5)\n"
                          ".model m jj(icrit=10u,rn=1,rsh=1,cap=0,tc=8.5)"),
                    ParseError);
}

TEST_CASE("comments, continuations and case folding") {
    std::string text =
        "* full line comment\n"
        "I_in 0 N1 pulse(0, 20u, 100p,\n"
        "+ 50p, 200p, 50p, 0) ; inline comment\n"
        "R1 N1 0 2 ; load\n";
    auto n = parse(text);
    REQUIRE(n.elements.size() == 2);
    CHECK(n.elements[0].name == "i_in");
    CHECK(n.elements[0].waveform.kind == Waveform::Kind::Pulse);
    CHECK(n.elements[0].waveform.hi == doctest::Approx(20e-6));
    CHECK(n.elements[0].nodes[1] == "n1");
    CHECK(n.elements[1].nodes[0] == "n1");  // case-insensitive identity
}

TEST_CASE("waveform evaluation") {
    Waveform dc;
    dc.kind = Waveform::Kind::Dc;
    dc.dc = 2.0;
    CHECK(dc.eval(0.0) == 2.0);
    CHECK(dc.eval(1.0) == 2.0);

    auto n = parse("I1 0 1 pulse(0,1,10p,2p,5p,2p,0)\nR1 1 0 1");
    const Waveform& w = n.elements[0].waveform;
    CHECK(w.eval(0.0) == 0.0);
    CHECK(w.eval(11e-12) == doctest::Approx(0.5));
    CHECK(w.eval(14e-12) == 1.0);
    CHECK(w.eval(18e-12) == doctest::Approx(0.5));
    CHECK(w.eval(25e-12) == 0.0);

    auto n2 = parse("I1 0 1 pwl(0,0,100p,5u)\nR1 1 0 1");
    const Waveform& p = n2.elements[0].waveform;
    CHECK(p.eval(0.0) == 0.0);
    CHECK(p.eval(50e-12) == doctest::Approx(2.5e-6));
    CHECK(p.eval(1.0) == doctest::Approx(5e-6));  // holds last value
}

TEST_CASE("serializer round-trips structurally") {
    std::string text =
        ".model jmod jj(icrit=20u, rn=100, rsh=2, cap=50f, tc=8.5)\n"
        ".subckt jtl in out\n"
        ".behav jtl delay=5p window=(0.7,1.3) inom=0.62\n"
        "B1 in 0 jmod\n"
        "L1 in out 20p\n"
        "IB1 0 in dc(14u)\n"
        ".ends\n"
        "X1 jtl a b\n"
        "X2 jtl b c\n"
        "R1 c 0 2\n"
        ".port in a\n"
        ".temp 4.2\n"
        ".tran 0.1p 10n\n";
    Netlist n = parse(text);
    Netlist n2 = parse(serialize(n));
    CHECK(n == n2);
    CHECK(serialize(n) == serialize(n2));
}

namespace {

// Random self-contained netlist generator for the round-trip property.
Netlist random_netlist(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> nelem(1, 12);
    std::uniform_int_distribution<int> nnode(1, 6);
    std::uniform_int_distribution<int> kind(0, 4);
    std::uniform_real_distribution<double> val(0.1, 100.0);
    std::ostringstream os;
    os << ".model m1 jj(icrit=" << val(gen) << "u, rn=" << val(gen) << ", rsh=" << val(gen)
       << ", cap=" << val(gen) << "f, tc=8.5)\n";
    os << ".subckt cell p1 p2\n";
    os << "L1 p1 mid " << val(gen) << "p\n";
    os << "B1 mid 0 m1 area=" << 0.5 + val(gen) / 100.0 << "\n";
    os << "L2 mid p2 " << val(gen) << "p\n";
    os << ".ends\n";
    int n = nelem(gen);
    for (int i = 0; i < n; ++i) {
        std::string a = "n" + std::to_string(nnode(gen));
        std::string b = gen() % 4 == 0 ? "0" : "n" + std::to_string(nnode(gen));
        switch (kind(gen)) {
            case 0: os << "R" << i << " " << a << " " << b << " " << val(gen) << "\n"; break;
            case 1: os << "L" << i << " " << a << " " << b << " " << val(gen) << "p\n"; break;
            case 2: os << "C" << i << " " << a << " " << b << " " << val(gen) << "f\n"; break;
            case 3: os << "B" << i << " " << a << " " << b << " m1\n"; break;
            case 4:
                os << "I" << i << " " << a << " " << b << " pwl(0,0," << val(gen) << "p,"
                   << val(gen) << "u)\n";
                break;
        }
    }
    os << "X0 cell n1 n2\n";
    return parse(os.str());
}

}  // namespace

TEST_CASE("round-trip property over randomized netlists") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Netlist n = random_netlist(seed);
        Netlist n2 = parse(serialize(n));
        CHECK(n == n2);
    }
}

TEST_CASE("flatten expands hierarchy with name mangling") {
    std::string text =
        ".model jmod jj(icrit=20u, rn=100, rsh=2, cap=50f, tc=8.5)\n"
        ".subckt jtl in out\n"
        "B1 in 0 jmod\n"
        "L1 in out 20p\n"
        "B2 out 0 jmod\n"
        ".ends\n"
        "X1 jtl a b\n"
        "X2 jtl b c\n"
        "R1 c 0 2\n";
    auto fc = flatten(parse(text));
    CHECK(fc.junctions.size() == 4);  // 2 instances x 2 junctions
    CHECK(fc.inductors.size() == 2);
    CHECK(fc.resistors.size() == 1);
    CHECK(fc.junction_by_name("x1.b1") >= 0);
    CHECK(fc.junction_by_name("x2.b2") >= 0);
    // shared node "b" is a single flat node
    CHECK(fc.node_index.count("b") == 1);
}

TEST_CASE("flatten of an empty netlist is empty") {
    auto fc = flatten(parse(""));
    CHECK(fc.junctions.empty());
    CHECK(fc.num_nodes() == 0);
}

TEST_CASE("flatten is idempotent on already-flat netlists") {
    std::string text =
        ".model jmod jj(icrit=20u, rn=100, rsh=2, cap=50f, tc=8.5)\n"
        "B1 a 0 jmod\n"
        "L1 a b 20p\n"
        "B2 b 0 jmod\n"
        "IB1 0 a dc(14u)\n";
    auto n = parse(text);
    auto f1 = flatten(n);
    // Re-serializing the flat element list and flattening again changes nothing.
    auto f2 = flatten(parse(serialize(n)));
    CHECK(f1.junctions.size() == f2.junctions.size());
    CHECK(f1.node_names == f2.node_names);
    for (size_t i = 0; i < f1.junctions.size(); ++i) {
        CHECK(f1.junctions[i].name == f2.junctions[i].name);
        CHECK(f1.junctions[i].a == f2.junctions[i].a);
        CHECK(f1.junctions[i].b == f2.junctions[i].b);
    }
}

TEST_CASE("recursive subckts are a cycle error") {
    std::string text =
        ".subckt a p1\n"
        "X1 b p1\n"
        ".ends\n"
        ".subckt b p1\n"
        "X1 a p1\n"
        ".ends\n"
        "X0 a n1\n"
        "R1 n1 0 2\n";
    // reference check passes (names exist); the cycle appears at flatten time
    auto n = parse(text);
    CHECK_THROWS_WITH_AS(flatten(n), doctest::Contains("recursive"), std::runtime_error);
}

TEST_CASE("bias sources are tagged by their IB name at any depth") {
    std::string text =
        ".model jmod jj(icrit=20u, rn=100, rsh=2, cap=50f, tc=8.5)\n"
        ".subckt jtl in out\n"
        "B1 in 0 jmod\n"
        "L1 in out 20p\n"
        "IB1 0 in dc(14u)\n"
        ".ends\n"
        "X1 jtl a b\n"
        "R1 b 0 2\n"
        "Iin 0 a pwl(0,0,10p,1u)\n";
    auto fc = flatten(parse(text));
    REQUIRE(fc.sources.size() == 2);
    int bias = -1, stim = -1;
    for (size_t i = 0; i < fc.sources.size(); ++i)
        (fc.sources[i].is_bias ? bias : stim) = static_cast<int>(i);
    REQUIRE(bias >= 0);
    REQUIRE(stim >= 0);
    CHECK(fc.sources[static_cast<size_t>(bias)].name == "x1.ib1");
}

TEST_CASE("validate flags dangling nodes, low ic and floating bias") {
    std::string clean =
        ".model jmod jj(icrit=20u, rn=100, rsh=2, cap=50f, tc=8.5)\n"
        "B1 a 0 jmod\n"
        "L1 a b 20p\n"
        "B2 b 0 jmod\n";
    CHECK(validate(flatten(parse(clean))).empty());

    std::string dangling =
        ".model jmod jj(icrit=20u, rn=100, rsh=2, cap=50f, tc=8.5)\n"
        "B1 a 0 jmod\n"
        "L1 a b 20p\n";
    auto d1 = validate(flatten(parse(dangling)));
    REQUIRE(d1.size() == 1);
    CHECK(d1[0].message.find("dangling") != std::string::npos);
    CHECK(d1[0].message.find("'b'") != std::string::npos);

    // a declared port suppresses the dangling diagnostic
    auto d1b = validate(flatten(parse(dangling + ".port out b\n")));
    CHECK(d1b.empty());

    std::string low =
        ".model small jj(icrit=5u, rn=100, rsh=2, cap=50f, tc=8.5)\n"
        "B1 a 0 small\n"
        "L1 a 0 20p\n";
    auto d2 = validate(flatten(parse(low)));
    REQUIRE(d2.size() == 1);
    CHECK(d2[0].message.find("10 uA") != std::string::npos);

    std::string floating_bias = "IB1 0 x dc(10u)\nR1 y 0 2\nR2 y 0 3\n";
    auto d3 = validate(flatten(parse(floating_bias)));
    bool found = false;
    for (auto& d : d3)
        if (d.message.find("bias source") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("library-resolved references") {
    Netlist lib = parse(
        ".model jmod jj(icrit=20u, rn=100, rsh=2, cap=50f, tc=8.5)\n"
        ".subckt jtl in out\n"
        "B1 in 0 jmod\n"
        "L1 in out 20p\n"
        "B2 out 0 jmod\n"
        ".ends\n");
    // strict parse rejects, library parse accepts
    CHECK_THROWS_AS(parse("X1 jtl a b\nR1 b 0 2\nR2 a 0 2\n"), ParseError);
    Netlist n = parse("X1 jtl a b\nR1 b 0 2\nR2 a 0 2\n", &lib);
    auto fc = flatten(n, &lib);
    CHECK(fc.junctions.size() == 2);
}
