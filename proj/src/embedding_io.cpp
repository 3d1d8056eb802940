#include "colbandit/embedding_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include "colbandit/errors.hpp"
#include "json.hpp"

namespace colbandit {
namespace {

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) {
      throw FormatError("cannot open " + path.string());
    }
  }

  void read_bytes(char* out, std::size_t n, const char* what) {
    in_.read(out, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw FormatError("short read in " + path_.string() + " while reading " + what);
    }
  }

  void expect_magic(const char (&magic)[4]) {
    char got[4];
    read_bytes(got, 4, "magic");
    if (std::memcmp(got, magic, 4) != 0) {
      throw FormatError("bad magic in " + path_.string() + ": expected " +
                        std::string(magic, 4));
    }
  }

  std::uint32_t read_u32(const char* what) {
    std::uint32_t v;
    read_bytes(reinterpret_cast<char*>(&v), sizeof v, what);
    return to_le(v);
  }

  void read_floats(std::vector<float>& out, std::size_t n) {
    out.resize(n);
    read_bytes(reinterpret_cast<char*>(out.data()), n * sizeof(float), "payload");
    if constexpr (std::endian::native == std::endian::big) {
      for (auto& f : out) {
        f = std::bit_cast<float>(to_le(std::bit_cast<std::uint32_t>(f)));
      }
    }
  }

  void expect_eof() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw FormatError("trailing bytes in " + path_.string());
    }
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) {
      throw FormatError("cannot open " + path.string() + " for writing");
    }
  }

  void write_magic(const char (&magic)[4]) { out_.write(magic, 4); }

  void write_u32(std::uint32_t v) {
    v = to_le(v);
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
  }

  void write_floats(std::span<const float> values) {
    if constexpr (std::endian::native == std::endian::big) {
      for (float f : values) {
        write_u32(std::bit_cast<std::uint32_t>(f));
      }
    } else {
      out_.write(reinterpret_cast<const char*>(values.data()),
                 static_cast<std::streamsize>(values.size_bytes()));
    }
  }

  void finish() {
    out_.flush();
    if (!out_) {
      throw FormatError("write failed for " + path_.string());
    }
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace

EmbeddingMatrix read_embeddings(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic(kEmbeddingMagic);
  EmbeddingMatrix m;
  m.dim = r.read_u32("dimension");
  const std::uint32_t count = r.read_u32("count");
  if (m.dim == 0) {
    throw FormatError("zero embedding dimension in " + path.string());
  }
  r.read_floats(m.values, static_cast<std::size_t>(count) * m.dim);
  r.expect_eof();
  return m;
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m) {
  Writer w(path);
  w.write_magic(kEmbeddingMagic);
  w.write_u32(m.dim);
  w.write_u32(static_cast<std::uint32_t>(m.count()));
  w.write_floats(m.values);
  w.finish();
}

DenseMatrix read_matrix(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic(kMatrixMagic);
  DenseMatrix m;
  m.rows = r.read_u32("N");
  m.cols = r.read_u32("T");
  r.read_floats(m.values, static_cast<std::size_t>(m.rows) * m.cols);
  r.expect_eof();
  return m;
}

void write_matrix(const std::filesystem::path& path, const DenseMatrix& m) {
  Writer w(path);
  w.write_magic(kMatrixMagic);
  w.write_u32(m.rows);
  w.write_u32(m.cols);
  w.write_floats(m.values);
  w.finish();
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError("cannot open manifest " + path.string());
  }
  const auto base = path.parent_path();
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("doc_id") || !j.contains("path") ||
        !j["doc_id"].is_string() || !j["path"].is_string()) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": expected {\"doc_id\": string, \"path\": string}");
    }
    std::filesystem::path p = j["path"].get<std::string>();
    if (p.is_relative()) {
      p = base / p;
    }
    entries.push_back({j["doc_id"].get<std::string>(), std::move(p)});
  }
  return entries;
}

void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries) {
  std::ofstream out(path);
  if (!out) {
    throw FormatError("cannot open " + path.string() + " for writing");
  }
  for (const auto& e : entries) {
    out << nlohmann::json{{"doc_id", e.doc_id}, {"path", e.path.generic_string()}}.dump() << '\n';
  }
  if (!out) {
    throw FormatError("write failed for " + path.string());
  }
}

}  // namespace colbandit
