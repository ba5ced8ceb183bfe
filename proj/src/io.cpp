#include "nodedup/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string_view>

#include <openssl/evp.h>

#include "json.hpp"
#include "nodedup/errors.hpp"
#include "nodedup/random.hpp"

namespace nodedup {
namespace {

static_assert(std::endian::native == std::endian::little, "binary formats assume little-endian");

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
  throw DataError(path.string() + ":" + std::to_string(line) + ": " + what);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Splits on runs of spaces/tabs.
std::vector<std::string_view> fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool skip_line(std::string_view s) {
  auto f = fields(s);
  return f.empty() || f.front().front() == '#';
}

}  // namespace

std::vector<Edge> read_edge_list(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    auto f = fields(line);
    if (f.size() != 2) parse_fail(path, lineno, "expected two node indices, got '" + line + "'");
    std::int64_t u = 0, v = 0;
    if (!parse_number(f[0], u) || !parse_number(f[1], v) || u < 0 || v < 0 ||
        u > INT32_MAX || v > INT32_MAX) {
      parse_fail(path, lineno, "invalid node index in '" + line + "'");
    }
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }
  return edges;
}

void write_edge_list(const std::filesystem::path& path, std::span<const Edge> edges) {
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (Edge e : edges) canon.push_back(canonical(e));
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
  auto out = open_out(path);
  for (Edge e : canon) out << e.u << '\t' << e.v << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

DenseMatrix read_features_text(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  std::size_t n = 0, f = 0;
  bool have_header = false;
  while (!have_header && std::getline(in, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    auto h = fields(line);
    if (h.size() != 2 || !parse_number(h[0], n) || !parse_number(h[1], f)) {
      parse_fail(path, lineno, "expected header 'N F'");
    }
    have_header = true;
  }
  if (!have_header) throw DataError(path.string() + ": empty feature file");
  DenseMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    if (row == n) parse_fail(path, lineno, "more than " + std::to_string(n) + " feature rows");
    auto vals = fields(line);
    if (vals.size() != f) {
      parse_fail(path, lineno,
                 "expected " + std::to_string(f) + " values, got " + std::to_string(vals.size()));
    }
    for (std::size_t j = 0; j < f; ++j) {
      double d = 0.0;
      if (!parse_number(vals[j], d) || !std::isfinite(d)) {
        parse_fail(path, lineno, "invalid number '" + std::string(vals[j]) + "'");
      }
      x(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) = d;
    }
    ++row;
  }
  if (row != n) {
    throw DataError(path.string() + ": header declares " + std::to_string(n) + " rows but " +
                    std::to_string(row) + " were found");
  }
  return x;
}

void write_features_text(const std::filesystem::path& path, const DenseMatrix& features) {
  auto out = open_out(path);
  out << features.rows() << ' ' << features.cols() << '\n';
  std::array<char, 64> buf{};
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      if (j) out << ' ';
      auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), features(i, j));
      out.write(buf.data(), p - buf.data());
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing " + path.string());
}

DenseMatrix read_features_binary(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  std::uint32_t header[2] = {0, 0};
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in) throw DataError(path.string() + ": truncated 8-byte header");
  const std::size_t n = header[0], f = header[1];
  std::vector<float> buf(n * f);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
  if (!in) {
    throw DataError(path.string() + ": expected " + std::to_string(n * f) + " float32 values");
  }
  in.peek();
  if (!in.eof()) throw DataError(path.string() + ": trailing bytes after " + std::to_string(n) + "x" +
                                 std::to_string(f) + " matrix");
  DenseMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
  for (std::size_t i = 0; i < n * f; ++i) {
    if (!std::isfinite(buf[i])) throw DataError(path.string() + ": non-finite feature value");
    x.data()[i] = buf[i];
  }
  return x;
}

void write_features_binary(const std::filesystem::path& path, const DenseMatrix& features) {
  auto out = open_out(path, true);
  const std::uint32_t header[2] = {static_cast<std::uint32_t>(features.rows()),
                                   static_cast<std::uint32_t>(features.cols())};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  std::vector<float> buf(static_cast<std::size_t>(features.size()));
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(features.data()[i]);
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
  if (!out) throw DataError("failed writing " + path.string());
}

DenseMatrix read_features(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".bin" || ext == ".f32") return read_features_binary(path);
  return read_features_text(path);
}

DatasetBundle load_dataset(const std::filesystem::path& edge_path,
                           const std::filesystem::path& feature_path, const LoadOptions& options) {
  auto edges = read_edge_list(edge_path);
  DenseMatrix x = read_features(feature_path);
  NodeId max_index = -1;
  for (Edge e : edges) max_index = std::max({max_index, e.u, e.v});
  const auto rows = static_cast<std::size_t>(x.rows());
  if (static_cast<std::int64_t>(max_index) + 1 > static_cast<std::int64_t>(rows)) {
    throw DataError("feature file has " + std::to_string(rows) + " rows but the edge list needs " +
                    std::to_string(static_cast<std::int64_t>(max_index) + 1) +
                    " (max index + 1)");
  }
  if (options.row_normalize) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double s = x.row(i).cwiseAbs().sum();
      if (s > 0.0) x.row(i) /= s;
    }
  }
  DatasetBundle b;
  b.graph = Graph::build(rows, edges, std::move(x));
  b.name = options.name.empty() ? edge_path.stem().string() : options.name;
  b.provenance = edge_path.string() + " + " + feature_path.string();
  return b;
}

void SynthConfig::validate() const {
  if (num_nodes < 2) throw ConfigError("synth.num_nodes must be >= 2");
  if (!(exponent > 1.0)) throw ConfigError("synth.exponent must be > 1");
  if (min_degree < 1) throw ConfigError("synth.min_degree must be >= 1");
  if (max_degree < 0) throw ConfigError("synth.max_degree must be >= 0");
  if (max_degree > 0 && max_degree < min_degree) {
    throw ConfigError("synth.max_degree must be >= synth.min_degree");
  }
  if (feature_dim < 1) throw ConfigError("synth.feature_dim must be >= 1");
  if (num_communities < 1) throw ConfigError("synth.num_communities must be >= 1");
  if (!(homophily >= 0.0 && homophily <= 1.0)) throw ConfigError("synth.homophily must be in [0, 1]");
  if (!(feature_signal >= 0.0)) throw ConfigError("synth.feature_signal must be >= 0");
}

DatasetBundle generate_synthetic(const SynthConfig& config, SynthInfo* info) {
  config.validate();
  const std::size_t n = config.num_nodes;
  const auto cap = static_cast<int>(
      std::min<std::size_t>(config.max_degree > 0 ? static_cast<std::size_t>(config.max_degree) : n - 1,
                            n - 1));
  const int kmin = std::min(config.min_degree, cap);
  SynthInfo local;
  SynthInfo& meta = info ? *info : local;
  meta = SynthInfo{};

  Rng degree_rng(derive_seed(config.seed, 1));
  Rng community_rng(derive_seed(config.seed, 2));
  Rng pair_rng(derive_seed(config.seed, 3));
  Rng feature_rng(derive_seed(config.seed, 4));

  // Discrete power law on [kmin, cap] by inverse CDF.
  std::vector<double> cdf;
  cdf.reserve(static_cast<std::size_t>(cap - kmin + 1));
  double acc = 0.0;
  for (int k = kmin; k <= cap; ++k) {
    acc += std::pow(static_cast<double>(k), -config.exponent);
    cdf.push_back(acc);
  }
  meta.target_degrees.resize(n);
  std::int64_t total = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const double r = uniform_unit(degree_rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
    if (it == cdf.end()) --it;
    meta.target_degrees[v] = kmin + static_cast<int>(it - cdf.begin());
    total += meta.target_degrees[v];
  }
  if (total % 2 != 0) {
    std::vector<std::size_t> room;
    for (std::size_t v = 0; v < n; ++v) {
      if (meta.target_degrees[v] < cap) room.push_back(v);
    }
    if (!room.empty()) {
      ++meta.target_degrees[room[uniform_index(degree_rng, room.size())]];
    } else {
      // Every node is at the cap; drop one stub instead.
      --meta.target_degrees[uniform_index(degree_rng, n)];
    }
    meta.parity_fixed = true;
  }

  const std::size_t c = config.num_communities;
  meta.community.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    meta.community[v] = static_cast<std::int32_t>(uniform_index(community_rng, c));
  }

  std::vector<std::vector<NodeId>> internal(c);
  std::vector<NodeId> external;
  for (std::size_t v = 0; v < n; ++v) {
    for (int s = 0; s < meta.target_degrees[v]; ++s) {
      if (uniform_unit(pair_rng) < config.homophily) {
        internal[static_cast<std::size_t>(meta.community[v])].push_back(static_cast<NodeId>(v));
      } else {
        external.push_back(static_cast<NodeId>(v));
      }
    }
  }
  std::vector<Edge> raw;
  auto pair_up = [&](std::vector<NodeId>& stubs) {
    shuffle(stubs.begin(), stubs.end(), pair_rng);
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) raw.push_back({stubs[i], stubs[i + 1]});
  };
  for (auto& group : internal) {
    if (group.size() % 2 != 0) {
      external.push_back(group.back());
      group.pop_back();
    }
    pair_up(group);
  }
  pair_up(external);

  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (Edge e : raw) {
    if (e.u != e.v) edges.push_back(canonical(e));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  meta.erased_pairs = raw.size() - edges.size();

  const auto f = static_cast<Eigen::Index>(config.feature_dim);
  DenseMatrix means(static_cast<Eigen::Index>(c), f);
  for (Eigen::Index i = 0; i < means.size(); ++i) {
    means.data()[i] = config.feature_signal * standard_normal(feature_rng);
  }
  DenseMatrix x(static_cast<Eigen::Index>(n), f);
  for (std::size_t v = 0; v < n; ++v) {
    const auto cv = static_cast<Eigen::Index>(meta.community[v]);
    for (Eigen::Index j = 0; j < f; ++j) {
      x(static_cast<Eigen::Index>(v), j) = means(cv, j) + standard_normal(feature_rng);
    }
  }

  DatasetBundle b;
  b.graph = Graph::build(n, edges, std::move(x));
  std::ostringstream name;
  name << "synth-n" << n << "-g" << config.exponent << "-h" << config.homophily << "-s"
       << config.seed;
  b.name = name.str();
  b.provenance = "generate_synthetic";
  return b;
}

std::string sha256_file(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 init failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 15];
  }
  return out;
}

std::vector<FixtureEntry> read_manifest(const std::filesystem::path& path) {
  auto in = open_in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  std::vector<FixtureEntry> out;
  try {
    for (const auto& item : j.at("fixtures")) {
      FixtureEntry e;
      e.name = item.at("name").get<std::string>();
      e.edges_file = item.at("edges_file").get<std::string>();
      e.features_file = item.at("features_file").get<std::string>();
      if (item.contains("edges_sha256") && !item["edges_sha256"].is_null()) {
        e.edges_sha256 = item["edges_sha256"].get<std::string>();
      }
      if (item.contains("features_sha256") && !item["features_sha256"].is_null()) {
        e.features_sha256 = item["features_sha256"].get<std::string>();
      }
      e.num_nodes = item.at("num_nodes").get<std::size_t>();
      e.num_edges = item.at("num_edges").get<std::size_t>();
      out.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": malformed manifest: " + e.what());
  }
  return out;
}

FixtureStatus verify_fixture(const FixtureEntry& entry, const std::filesystem::path& dir) {
  FixtureStatus st;
  const auto edges = dir / entry.edges_file;
  const auto feats = dir / entry.features_file;
  if (!std::filesystem::exists(edges) || !std::filesystem::exists(feats)) {
    st.message = "fixture '" + entry.name + "' not found in " + dir.string();
    return st;
  }
  st.present = true;
  if (entry.edges_sha256 && sha256_file(edges) != *entry.edges_sha256) {
    st.message = entry.edges_file + " checksum mismatch";
    return st;
  }
  if (entry.features_sha256 && sha256_file(feats) != *entry.features_sha256) {
    st.message = entry.features_file + " checksum mismatch";
    return st;
  }
  try {
    auto b = load_dataset(edges, feats);
    if (b.graph.num_nodes() != entry.num_nodes || b.graph.num_edges() != entry.num_edges) {
      st.message = "expected N=" + std::to_string(entry.num_nodes) + " M=" +
                   std::to_string(entry.num_edges) + ", found N=" +
                   std::to_string(b.graph.num_nodes()) + " M=" + std::to_string(b.graph.num_edges());
      return st;
    }
  } catch (const Error& e) {
    st.message = e.what();
    return st;
  }
  st.verified = true;
  st.message = "ok";
  return st;
}

}  // namespace nodedup
