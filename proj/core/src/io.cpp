#include "ipnn/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ipnn {

namespace {

constexpr const char* kMatrixMagic = "ipnn-matrix";
constexpr const char* kNetworkMagic = "ipnn-network";
constexpr const char* kDatasetMagic = "ipnn-dataset";
constexpr const char* kVersion = "v1";

// ---------------------------------------------------------------- reading

/// Line-oriented cursor over a whole file, tracking 1-based line numbers
/// for error reporting.
class LineReader {
public:
    LineReader(const std::filesystem::path& path) : path_(path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
        std::ostringstream buf;
        buf << in.rdbuf();
        text_ = std::move(buf).str();
    }

    std::size_t line_number() const { return line_; }

    bool at_end() const { return pos_ >= text_.size(); }

    /// Next line, without its terminator. Throws if the file is exhausted.
    std::string next_line(const std::string& what) {
        if (at_end()) {
            throw ParseError("unexpected end of file, expected " + what, line_ + 1);
        }
        ++line_;
        const std::size_t start = pos_;
        const std::size_t nl = text_.find('\n', start);
        if (nl == std::string::npos) {
            pos_ = text_.size();
            return text_.substr(start);
        }
        pos_ = nl + 1;
        return text_.substr(start, nl - start);
    }

    void expect_end() {
        if (!at_end()) {
            throw ParseError("trailing content after end of data", line_ + 1);
        }
    }

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::string text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
};

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

double parse_double(const std::string& tok, std::size_t line) {
    double value = 0.0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ParseError("expected a finite number, got '" + tok + "'", line);
    }
    return value;
}

long long parse_int(const std::string& tok, std::size_t line) {
    long long value = 0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw ParseError("expected an integer, got '" + tok + "'", line);
    }
    return value;
}

void expect_magic(LineReader& r, const std::string& magic) {
    const std::string line = r.next_line("header '" + magic + " " + kVersion + "'");
    const auto fields = split_fields(line);
    if (fields.size() != 2 || fields[0] != magic) {
        throw ParseError("not a " + magic + " file", r.line_number());
    }
    if (fields[1] != kVersion) {
        throw ParseError("unsupported " + magic + " version '" + fields[1] + "', expected " +
                             kVersion,
                         r.line_number());
    }
}

/// Reads a keyword line "name v1 v2 ..." with exactly `count` values.
std::vector<std::string> expect_keyword(LineReader& r, const std::string& name,
                                        std::size_t count) {
    const std::string line = r.next_line("'" + name + "' line");
    auto fields = split_fields(line);
    if (fields.empty() || fields[0] != name || fields.size() != count + 1) {
        throw ParseError("expected '" + name + "' with " + std::to_string(count) + " value(s)",
                         r.line_number());
    }
    fields.erase(fields.begin());
    return fields;
}

std::vector<cdouble> parse_entry_row(LineReader& r, int cols, const std::string& what) {
    const std::string line = r.next_line(what);
    const auto fields = split_fields(line);
    if (fields.size() != static_cast<std::size_t>(2 * cols)) {
        throw ParseError(what + " needs " + std::to_string(2 * cols) + " numbers, found " +
                             std::to_string(fields.size()),
                         r.line_number());
    }
    std::vector<cdouble> row(static_cast<std::size_t>(cols));
    for (int j = 0; j < cols; ++j) {
        row[j] = cdouble(parse_double(fields[2 * j], r.line_number()),
                         parse_double(fields[2 * j + 1], r.line_number()));
    }
    return row;
}

ComplexMatrix parse_matrix_body(LineReader& r, int rows, int cols) {
    ComplexMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const auto row = parse_entry_row(r, cols, "matrix row " + std::to_string(i));
        for (int j = 0; j < cols; ++j) m(i, j) = row[j];
    }
    return m;
}

int parse_positive_dim(const std::string& tok, std::size_t line, const std::string& what) {
    const long long v = parse_int(tok, line);
    if (v < 1 || v > 1 << 20) throw ParseError(what + " out of range", line);
    return static_cast<int>(v);
}

MeshDecomposition parse_mesh(LineReader& r, const std::string& keyword) {
    const auto dim_f = expect_keyword(r, keyword, 1);
    const int dim = parse_positive_dim(dim_f[0], r.line_number(), "mesh dimension");

    MeshDecomposition mesh;
    mesh.dim = dim;

    const auto phases = expect_keyword(r, "output-phases", static_cast<std::size_t>(dim));
    mesh.output_phases.reserve(static_cast<std::size_t>(dim));
    for (const auto& tok : phases) {
        mesh.output_phases.push_back(parse_double(tok, r.line_number()));
    }

    const std::size_t count = static_cast<std::size_t>(dim) * (dim - 1) / 2;
    mesh.mzis.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::string line = r.next_line("mzi line " + std::to_string(k));
        const auto fields = split_fields(line);
        if (fields.size() != 5 || fields[0] != "mzi") {
            throw ParseError("expected 'mzi <row> <col> <theta> <phi>'", r.line_number());
        }
        MziPhase p;
        p.row = static_cast<int>(parse_int(fields[1], r.line_number()));
        p.column = static_cast<int>(parse_int(fields[2], r.line_number()));
        p.theta = parse_double(fields[3], r.line_number());
        p.phi = parse_double(fields[4], r.line_number());
        if (p.row < 0 || p.row > dim - 2 || p.column < 0 || p.column >= dim) {
            throw ParseError("mzi position out of range for dimension " + std::to_string(dim),
                             r.line_number());
        }
        if (p.theta < 0.0 || p.theta >= 2.0 * std::numbers::pi || p.phi < 0.0 ||
            p.phi >= 2.0 * std::numbers::pi) {
            throw ParseError("mzi phases must lie in [0, 2*pi)", r.line_number());
        }
        mesh.mzis.push_back(p);
    }
    if (!std::is_sorted(mesh.mzis.begin(), mesh.mzis.end(),
                        [](const MziPhase& a, const MziPhase& b) {
                            return a.column != b.column ? a.column < b.column : a.row < b.row;
                        })) {
        throw ParseError("mzi lines must be column-major, ascending row within a layer",
                         r.line_number());
    }
    return mesh;
}

// ---------------------------------------------------------------- writing

class FileWriter {
public:
    explicit FileWriter(const std::filesystem::path& path) : path_(path) {}

    std::ostringstream& out() { return buf_; }

    void commit() {
        std::ofstream f(path_, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open '" + path_.string() + "' for writing");
        const std::string s = buf_.str();
        f.write(s.data(), static_cast<std::streamsize>(s.size()));
        if (!f) throw Error("failed writing '" + path_.string() + "'");
    }

private:
    std::filesystem::path path_;
    std::ostringstream buf_;
};

void write_entry_row(std::ostringstream& out, const ComplexMatrix& m, int i) {
    for (int j = 0; j < m.cols(); ++j) {
        if (j > 0) out << ' ';
        out << format_double(m(i, j).real()) << ' ' << format_double(m(i, j).imag());
    }
    out << '\n';
}

void write_mesh(std::ostringstream& out, const MeshDecomposition& mesh,
                const std::string& keyword) {
    out << keyword << ' ' << mesh.dim << '\n';
    out << "output-phases";
    for (double p : mesh.output_phases) out << ' ' << format_double(p);
    out << '\n';
    for (const MziPhase& p : mesh.mzis) {
        out << "mzi " << p.row << ' ' << p.column << ' ' << format_double(p.theta) << ' '
            << format_double(p.phi) << '\n';
    }
}

}  // namespace

std::string format_double(double x) {
    if (!std::isfinite(x)) throw InvalidInputError("cannot serialize a non-finite number");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_matrix(const ComplexMatrix& m, const std::filesystem::path& path) {
    FileWriter w(path);
    auto& out = w.out();
    out << kMatrixMagic << ' ' << kVersion << '\n';
    out << "rows " << m.rows() << '\n';
    out << "cols " << m.cols() << '\n';
    for (int i = 0; i < m.rows(); ++i) write_entry_row(out, m, i);
    w.commit();
}

ComplexMatrix read_matrix(const std::filesystem::path& path) {
    LineReader r(path);
    expect_magic(r, kMatrixMagic);
    const int rows =
        parse_positive_dim(expect_keyword(r, "rows", 1)[0], r.line_number(), "rows");
    const int cols =
        parse_positive_dim(expect_keyword(r, "cols", 1)[0], r.line_number(), "cols");
    ComplexMatrix m = parse_matrix_body(r, rows, cols);
    r.expect_end();
    return m;
}

void write_network(const Ipnn& net, const std::filesystem::path& path, NetworkForm form) {
    FileWriter w(path);
    auto& out = w.out();
    out << kNetworkMagic << ' ' << kVersion << '\n';
    out << "activation " << activation_name(net.activation) << '\n';
    out << "layers " << net.layers.size() << '\n';
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const LayerFactorization& layer = net.layers[l];
        out << "layer " << l << ' ' << (form == NetworkForm::raw ? "raw" : "factorized")
            << '\n';
        out << "dims " << layer.weight.rows() << ' ' << layer.weight.cols() << '\n';
        if (form == NetworkForm::raw) {
            for (int i = 0; i < layer.weight.rows(); ++i) write_entry_row(out, layer.weight, i);
            continue;
        }
        out << "sigma";
        for (double s : layer.sigma) out << ' ' << format_double(s);
        out << '\n';
        out << "reflector";
        for (int s : layer.applied_reflector.signs) out << ' ' << s;
        out << '\n';
        write_mesh(out, layer.u_mesh, "u-mesh");
        write_mesh(out, layer.v_mesh, "v-mesh");
    }
    w.commit();
}

Ipnn read_network(const std::filesystem::path& path) {
    LineReader r(path);
    expect_magic(r, kNetworkMagic);

    Ipnn net;
    net.activation = activation_from_name(expect_keyword(r, "activation", 1)[0]);
    const long long layer_count = parse_int(expect_keyword(r, "layers", 1)[0], r.line_number());
    if (layer_count < 1 || layer_count > 1024) {
        throw ParseError("layer count out of range", r.line_number());
    }

    for (long long l = 0; l < layer_count; ++l) {
        const auto head = expect_keyword(r, "layer", 2);
        if (parse_int(head[0], r.line_number()) != l) {
            throw ParseError("expected layer " + std::to_string(l), r.line_number());
        }
        const std::string& form = head[1];
        const auto dims = expect_keyword(r, "dims", 2);
        const int rows = parse_positive_dim(dims[0], r.line_number(), "rows");
        const int cols = parse_positive_dim(dims[1], r.line_number(), "cols");

        if (form == "raw") {
            net.layers.push_back(factorize_layer(parse_matrix_body(r, rows, cols)));
        } else if (form == "factorized") {
            const std::size_t min_dim = static_cast<std::size_t>(std::min(rows, cols));
            const std::size_t max_dim = static_cast<std::size_t>(std::max(rows, cols));

            const auto sigma_f = expect_keyword(r, "sigma", min_dim);
            std::vector<double> sigma;
            sigma.reserve(min_dim);
            for (const auto& tok : sigma_f) {
                const double s = parse_double(tok, r.line_number());
                if (s < 0.0) throw ParseError("singular values must be >= 0", r.line_number());
                sigma.push_back(s);
            }
            if (!std::is_sorted(sigma.rbegin(), sigma.rend())) {
                throw ParseError("singular values must be descending", r.line_number());
            }

            const auto refl_f = expect_keyword(r, "reflector", max_dim);
            Reflector refl;
            refl.signs.reserve(max_dim);
            for (const auto& tok : refl_f) {
                const long long s = parse_int(tok, r.line_number());
                if (s != 1 && s != -1) {
                    throw ParseError("reflector signs must be +1 or -1", r.line_number());
                }
                refl.signs.push_back(static_cast<int>(s));
            }

            MeshDecomposition u_mesh = parse_mesh(r, "u-mesh");
            if (u_mesh.dim != rows) {
                throw ValidationError("u-mesh dimension " + std::to_string(u_mesh.dim) +
                                      " does not match layer rows " + std::to_string(rows));
            }
            MeshDecomposition v_mesh = parse_mesh(r, "v-mesh");
            if (v_mesh.dim != cols) {
                throw ValidationError("v-mesh dimension " + std::to_string(v_mesh.dim) +
                                      " does not match layer cols " + std::to_string(cols));
            }

            LayerFactorization layer{ComplexMatrix(rows, cols), std::move(u_mesh),
                                     std::move(sigma), std::move(v_mesh), std::move(refl)};
            layer.weight = reconstruct_weight(layer);
            net.layers.push_back(std::move(layer));
        } else {
            throw ParseError("unknown layer form '" + form + "'", r.line_number());
        }
    }
    r.expect_end();

    for (std::size_t k = 1; k < net.layers.size(); ++k) {
        if (net.layers[k].weight.cols() != net.layers[k - 1].weight.rows()) {
            throw ValidationError(
                "layer dimension chain broken between layers " + std::to_string(k - 1) +
                " and " + std::to_string(k));
        }
    }
    return net;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    if (dataset.empty()) throw InvalidInputError("refusing to write an empty dataset");
    const std::size_t dim = dataset.front().input.size();
    int classes = 0;
    for (const Sample& s : dataset) classes = std::max(classes, s.label + 1);

    FileWriter w(path);
    auto& out = w.out();
    out << kDatasetMagic << ' ' << kVersion << '\n';
    out << "samples " << dataset.size() << '\n';
    out << "dim " << dim << '\n';
    out << "classes " << classes << '\n';
    for (const Sample& s : dataset) {
        out << s.label;
        for (const cdouble& z : s.input) {
            out << ' ' << format_double(z.real()) << ' ' << format_double(z.imag());
        }
        out << '\n';
    }
    w.commit();
}

Dataset read_dataset(const std::filesystem::path& path) {
    LineReader r(path);
    expect_magic(r, kDatasetMagic);
    const long long samples = parse_int(expect_keyword(r, "samples", 1)[0], r.line_number());
    if (samples < 1) throw ParseError("sample count must be >= 1", r.line_number());
    const int dim = parse_positive_dim(expect_keyword(r, "dim", 1)[0], r.line_number(), "dim");
    const long long classes = parse_int(expect_keyword(r, "classes", 1)[0], r.line_number());
    if (classes < 1) throw ParseError("class count must be >= 1", r.line_number());

    Dataset dataset;
    dataset.reserve(static_cast<std::size_t>(samples));
    for (long long i = 0; i < samples; ++i) {
        const std::string line = r.next_line("sample " + std::to_string(i));
        const auto fields = split_fields(line);
        if (fields.size() != static_cast<std::size_t>(1 + 2 * dim)) {
            throw ParseError("sample needs a label plus " + std::to_string(2 * dim) +
                                 " numbers",
                             r.line_number());
        }
        Sample s;
        const long long label = parse_int(fields[0], r.line_number());
        if (label < 0 || label >= classes) {
            throw ParseError("label out of range [0, " + std::to_string(classes) + ")",
                             r.line_number());
        }
        s.label = static_cast<int>(label);
        s.input.reserve(static_cast<std::size_t>(dim));
        for (int j = 0; j < dim; ++j) {
            s.input.emplace_back(parse_double(fields[1 + 2 * j], r.line_number()),
                                 parse_double(fields[2 + 2 * j], r.line_number()));
        }
        dataset.push_back(std::move(s));
    }
    r.expect_end();
    return dataset;
}

void write_results(const ResultsTable& table, const std::filesystem::path& path) {
    if (table.columns.empty()) throw InvalidInputError("results table needs columns");
    auto check_cell = [](const std::string& cell) {
        if (cell.empty() || cell.find(',') != std::string::npos ||
            cell.find('\n') != std::string::npos) {
            throw InvalidInputError("results cell must be non-empty and delimiter-free");
        }
    };
    FileWriter w(path);
    auto& out = w.out();
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        check_cell(table.columns[i]);
        out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "\n");
    }
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) {
            throw InvalidInputError("results row width does not match header");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            check_cell(row[i]);
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
        }
    }
    w.commit();
}

}  // namespace ipnn
