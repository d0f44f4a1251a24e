#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ipnn/complex_matrix.hpp"
#include "ipnn/network.hpp"

namespace ipnn {

/// Plain-text serialization. All writers are deterministic (identical
/// values yield identical bytes); numbers are written with 17 significant
/// digits so doubles round-trip exactly. Readers are strict: they check the
/// format version, validate every count, and reject trailing content.
/// The formats are documented in docs/FORMATS.md.

void write_matrix(const ComplexMatrix& m, const std::filesystem::path& path);
ComplexMatrix read_matrix(const std::filesystem::path& path);

enum class NetworkForm { factorized, raw };

/// Factorized form stores meshes, singular values and the applied
/// reflector exactly; raw form stores the weight matrices, which are
/// re-factorized on load.
void write_network(const Ipnn& net, const std::filesystem::path& path,
                   NetworkForm form = NetworkForm::factorized);
Ipnn read_network(const std::filesystem::path& path);

void write_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

/// One experiment family per file: a header line plus delimited rows with
/// a fixed column count. Cells must be non-empty and free of the delimiter.
struct ResultsTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

void write_results(const ResultsTable& table, const std::filesystem::path& path);

/// %.17g, rejecting non-finite values.
std::string format_double(double x);

}  // namespace ipnn
