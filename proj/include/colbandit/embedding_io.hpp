#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace colbandit {

/// Row-major block of `count` float vectors, each of dimension `dim`.
struct EmbeddingMatrix {
  std::uint32_t dim = 0;
  std::vector<float> values;

  std::size_t count() const noexcept { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const float> row(std::size_t j) const {
    return {values.data() + j * dim, dim};
  }
  std::span<float> row(std::size_t j) { return {values.data() + j * dim, dim}; }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;
};

/// Fully materialised N x T MaxSim matrix (row-major, f32 as stored on disk).
struct DenseMatrix {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<float> values;

  DenseMatrix() = default;
  DenseMatrix(std::uint32_t n, std::uint32_t t, float fill = 0.0f)
      : rows(n), cols(t), values(static_cast<std::size_t>(n) * t, fill) {}

  float at(std::size_t i, std::size_t t) const { return values[i * cols + t]; }
  float& at(std::size_t i, std::size_t t) { return values[i * cols + t]; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;
};

struct ManifestEntry {
  std::string doc_id;
  std::filesystem::path path;
};

// "CBM1" | dim u32 LE | count u32 LE | count*dim f32 LE
inline constexpr char kEmbeddingMagic[4] = {'C', 'B', 'M', '1'};
// "CBH1" | N u32 LE | T u32 LE | N*T f32 LE, row-major
inline constexpr char kMatrixMagic[4] = {'C', 'B', 'H', '1'};

EmbeddingMatrix read_embeddings(const std::filesystem::path& path);
void write_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m);

DenseMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const DenseMatrix& m);

/// JSON-lines manifest, one {"doc_id": ..., "path": ...} object per line.
/// Relative paths are resolved against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries);

}  // namespace colbandit
