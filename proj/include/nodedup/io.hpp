#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nodedup/graph.hpp"

namespace nodedup {

struct DatasetBundle {
  Graph graph;
  std::string name;
  std::string provenance;
};

// Edge list: one "u<TAB>v" pair per line, 0-based. Blank lines and lines
// starting with '#' are skipped. Any other malformed line throws DataError
// naming the file and line number.
std::vector<Edge> read_edge_list(const std::filesystem::path& path);
// Canonical form: u < v, sorted, no duplicates.
void write_edge_list(const std::filesystem::path& path, std::span<const Edge> edges);

// Text features: header "N F", then N rows of F space-separated decimals.
DenseMatrix read_features_text(const std::filesystem::path& path);
// Shortest round-trip decimal form, so write(read(x)) reproduces x.
void write_features_text(const std::filesystem::path& path, const DenseMatrix& features);

// Binary features: u32 N, u32 F, then N*F little-endian float32, row-major.
DenseMatrix read_features_binary(const std::filesystem::path& path);
void write_features_binary(const std::filesystem::path& path, const DenseMatrix& features);

// ".bin" and ".f32" files are read as binary, anything else as text.
DenseMatrix read_features(const std::filesystem::path& path);

struct LoadOptions {
  bool row_normalize = false;  // scale every nonzero row to unit L1 norm
  std::string name;
};

// N is the feature row count; trailing nodes without edges are allowed.
// Throws DataError when an edge index reaches past the feature rows.
DatasetBundle load_dataset(const std::filesystem::path& edge_path,
                           const std::filesystem::path& feature_path,
                           const LoadOptions& options = {});

struct SynthConfig {
  std::size_t num_nodes = 3000;
  double exponent = 2.5;      // P(k) ~ k^-exponent
  int min_degree = 1;
  int max_degree = 0;         // 0: N - 1
  std::size_t feature_dim = 32;
  std::size_t num_communities = 8;
  double homophily = 0.8;     // probability a stub pairs inside its community
  double feature_signal = 1.0;  // scale of the community mean vectors
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthInfo {
  std::vector<std::int32_t> community;
  std::vector<std::int32_t> target_degrees;
  // Stub pairs lost to self-loops and multi-edges when the configuration
  // model is erased.
  std::size_t erased_pairs = 0;
  // Set when the drawn degree sum was odd and one stub was added.
  bool parity_fixed = false;
};

// Erased configuration model over a discrete power-law degree sequence
// (capped at max_degree). Each stub is marked internal with probability
// `homophily`; internal stubs pair within their community, the rest pair
// globally. Features are community mean + N(0, 1) noise. Deterministic per
// seed.
DatasetBundle generate_synthetic(const SynthConfig& config, SynthInfo* info = nullptr);

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

// One entry of a fixture checksum manifest (JSON).
struct FixtureEntry {
  std::string name;
  std::string edges_file;
  std::string features_file;
  std::optional<std::string> edges_sha256;
  std::optional<std::string> features_sha256;
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
};

std::vector<FixtureEntry> read_manifest(const std::filesystem::path& path);

struct FixtureStatus {
  bool present = false;
  bool verified = false;
  std::string message;
};

// Looks for the fixture's files in `dir` and checks them against the
// manifest: checksums when pinned, node and edge counts always.
FixtureStatus verify_fixture(const FixtureEntry& entry, const std::filesystem::path& dir);

}  // namespace nodedup
