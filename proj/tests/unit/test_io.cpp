#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ipnn/io.hpp"
#include "ipnn/sampling.hpp"

using namespace ipnn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / "ipnn_io_tests";
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path file(const std::string& name) const { return path / name; }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("matrix files round-trip bit-exactly") {
    TempDir dir;
    Rng rng(61);
    const ComplexMatrix m = random_gaussian_matrix(16, 16, rng);
    const auto path = dir.file("m.mat");
    write_matrix(m, path);
    const ComplexMatrix back = read_matrix(path);
    REQUIRE(back.rows() == 16);
    REQUIRE(back.cols() == 16);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) CHECK(back(i, j) == m(i, j));

    write_matrix(ComplexMatrix::identity(4), path);
    const ComplexMatrix id = read_matrix(path);
    CHECK(frobenius_distance(id, ComplexMatrix::identity(4)) == 0.0);
}

TEST_CASE("matrix writer output is deterministic") {
    TempDir dir;
    Rng rng(62);
    const ComplexMatrix m = random_gaussian_matrix(5, 7, rng);
    write_matrix(m, dir.file("a.mat"));
    write_matrix(m, dir.file("b.mat"));
    CHECK(slurp(dir.file("a.mat")) == slurp(dir.file("b.mat")));
}

TEST_CASE("matrix parse errors carry line numbers") {
    TempDir dir;
    const auto path = dir.file("bad.mat");

    spit(path, "ipnn-matrix v1\nrows 2\ncols 2\n1 0 0 0\n");
    try {
        read_matrix(path);
        FAIL("expected a parse error for the missing row");
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
        CHECK(std::string(e.what()).find("matrix row 1") != std::string::npos);
    }

    spit(path, "ipnn-matrix v1\nrows 2\ncols 2\n1 0 0 0\n0 x 0 1\n");
    try {
        read_matrix(path);
        FAIL("expected a parse error for the bad cell");
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
    }

    spit(path, "ipnn-matrix v2\nrows 1\ncols 1\n1 0\n");
    CHECK_THROWS_WITH_AS(read_matrix(path), doctest::Contains("version"), ParseError);

    spit(path, "something-else v1\n");
    CHECK_THROWS_AS(read_matrix(path), ParseError);

    spit(path, "ipnn-matrix v1\nrows 1\ncols 1\n1 0\nextra line\n");
    CHECK_THROWS_WITH_AS(read_matrix(path), doctest::Contains("trailing"), ParseError);

    spit(path, "ipnn-matrix v1\nrows 1\ncols 1\n1 0 3\n");
    CHECK_THROWS_AS(read_matrix(path), ParseError);

    CHECK_THROWS_AS(read_matrix(dir.file("missing.mat")), ParseError);
}

TEST_CASE("network files preserve the factorized form exactly") {
    TempDir dir;
    Rng rng(63);
    Ipnn net;
    net.activation = Activation::modulus_relu;
    net.layers.push_back(factorize_layer(random_gaussian_matrix(6, 6, rng)));
    net.layers.push_back(factorize_layer(random_gaussian_matrix(4, 6, rng)));
    Reflector r = Reflector::ones(6);
    r.signs[2] = -1;
    net.layers[1] = apply_reflector(net.layers[1], r);

    const auto path = dir.file("net.ipnn");
    write_network(net, path);
    const Ipnn back = read_network(path);

    REQUIRE(back.layers.size() == 2);
    CHECK(back.activation == Activation::modulus_relu);
    CHECK(back.layers[1].applied_reflector.signs == net.layers[1].applied_reflector.signs);
    for (std::size_t l = 0; l < 2; ++l) {
        CHECK(back.layers[l].sigma == net.layers[l].sigma);
        REQUIRE(back.layers[l].u_mesh.mzis.size() == net.layers[l].u_mesh.mzis.size());
        for (std::size_t i = 0; i < net.layers[l].u_mesh.mzis.size(); ++i) {
            CHECK(back.layers[l].u_mesh.mzis[i].theta == net.layers[l].u_mesh.mzis[i].theta);
            CHECK(back.layers[l].u_mesh.mzis[i].phi == net.layers[l].u_mesh.mzis[i].phi);
        }
        CHECK(frobenius_distance(back.layers[l].weight, net.layers[l].weight) < 1e-9);
    }

    write_network(net, dir.file("net2.ipnn"));
    CHECK(slurp(path) == slurp(dir.file("net2.ipnn")));
}

TEST_CASE("raw and factorized forms of a network behave identically") {
    TempDir dir;
    Rng rng(64);
    Ipnn net;
    net.activation = Activation::none;
    net.layers.push_back(factorize_layer(random_gaussian_matrix(5, 5, rng)));
    net.layers.push_back(factorize_layer(random_gaussian_matrix(3, 5, rng)));

    write_network(net, dir.file("fact.ipnn"), NetworkForm::factorized);
    write_network(net, dir.file("raw.ipnn"), NetworkForm::raw);
    const Ipnn fact = read_network(dir.file("fact.ipnn"));
    const Ipnn raw = read_network(dir.file("raw.ipnn"));

    const CompiledIpnn cf = compile(fact);
    const CompiledIpnn cr = compile(raw);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cdouble> x(5);
        for (cdouble& z : x) z = cdouble(rng.normal(), rng.normal());
        const auto yf = forward(cf, x);
        const auto yr = forward(cr, x);
        for (std::size_t i = 0; i < yf.size(); ++i) CHECK(std::abs(yf[i] - yr[i]) < 1e-8);
    }
}

TEST_CASE("network reader rejects a broken dimension chain") {
    TempDir dir;
    const auto path = dir.file("chain.ipnn");
    std::ostringstream text;
    text << "ipnn-network v1\nactivation none\nlayers 2\n";
    text << "layer 0 raw\ndims 2 2\n1 0 0 0\n0 0 1 0\n";
    text << "layer 1 raw\ndims 2 3\n1 0 0 0 0 0\n0 0 1 0 0 0\n";  // expects 3 inputs, gets 2
    spit(path, text.str());
    CHECK_THROWS_AS(read_network(path), ValidationError);
}

TEST_CASE("network reader validates mesh phases and counts") {
    TempDir dir;
    const auto path = dir.file("mesh.ipnn");
    // u-mesh of a 2x2 layer must contain exactly one MZI line
    std::ostringstream text;
    text << "ipnn-network v1\nactivation none\nlayers 1\n";
    text << "layer 0 factorized\ndims 2 2\nsigma 1 1\nreflector 1 1\n";
    text << "u-mesh 2\noutput-phases 0 0\nmzi 0 0 9.0 0\n";  // theta out of range
    text << "v-mesh 2\noutput-phases 0 0\nmzi 0 0 0 0\n";
    spit(path, text.str());
    CHECK_THROWS_WITH_AS(read_network(path), doctest::Contains("2*pi"), ParseError);
}

TEST_CASE("datasets round-trip exactly and validate labels") {
    TempDir dir;
    Rng rng(65);
    Dataset ds;
    for (int i = 0; i < 10; ++i) {
        Sample s;
        s.label = i % 3;
        for (int j = 0; j < 4; ++j) s.input.emplace_back(rng.normal(), rng.normal());
        ds.push_back(std::move(s));
    }
    const auto path = dir.file("d.ds");
    write_dataset(ds, path);
    const Dataset back = read_dataset(path);
    REQUIRE(back.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(back[i].label == ds[i].label);
        CHECK(back[i].input == ds[i].input);
    }

    spit(path, "ipnn-dataset v1\nsamples 1\ndim 1\nclasses 2\n5 1 0\n");
    CHECK_THROWS_WITH_AS(read_dataset(path), doctest::Contains("label"), ParseError);
}

TEST_CASE("results tables are strict about shape and values") {
    TempDir dir;
    ResultsTable t;
    t.columns = {"a", "b"};
    const auto path = dir.file("r.csv");
    write_results(t, path);
    CHECK(slurp(path) == "a,b\n");

    t.rows.push_back({"1", "2"});
    write_results(t, path);
    CHECK(slurp(path) == "a,b\n1,2\n");

    t.rows.push_back({"only-one"});
    CHECK_THROWS_AS(write_results(t, path), InvalidInputError);

    CHECK_THROWS_AS(format_double(std::nan("")), InvalidInputError);
    CHECK(format_double(0.5) == "0.5");
}
