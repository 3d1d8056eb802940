#include "colbandit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "colbandit/errors.hpp"
#include "colbandit/rng.hpp"

namespace colbandit {

std::string_view to_string(ScoreProfile p) noexcept {
  switch (p) {
    case ScoreProfile::WellSeparated: return "well-separated";
    case ScoreProfile::ClusteredNearBoundary: return "clustered-near-boundary";
    case ScoreProfile::UniformRandom: return "uniform-random";
  }
  return "unknown";
}

ScoreProfile parse_profile(std::string_view name) {
  if (name == "well-separated") return ScoreProfile::WellSeparated;
  if (name == "clustered-near-boundary") return ScoreProfile::ClusteredNearBoundary;
  if (name == "uniform-random") return ScoreProfile::UniformRandom;
  throw ConfigError("unknown score profile '" + std::string(name) +
                    "' (expected well-separated, clustered-near-boundary or uniform-random)");
}

void SynthSpec::validate() const {
  if (n < 1 || t < 1) throw ConfigError("synth spec needs N >= 1 and T >= 1");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigError("synth value_range needs lo < hi");
  }
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw ConfigError("synth noise_scale must be non-negative");
  }
  if (ladder_gap && !(*ladder_gap > 0.0)) throw ConfigError("synth ladder_gap must be positive");
  if (ladder_gap && profile == ScoreProfile::WellSeparated && *ladder_gap < 3.0 * noise_scale) {
    throw ConfigError("well-separated profile needs ladder_gap >= 3 * noise_scale");
  }
  if (profile == ScoreProfile::ClusteredNearBoundary && k < 1) {
    throw ConfigError("clustered profile needs K >= 1");
  }
}

namespace {

// Offsets of each rank below the top of the ladder (rank 0 has offset 0).
std::vector<double> ladder_offsets(const SynthSpec& spec) {
  double gap = spec.ladder_gap.value_or(3.0 * spec.noise_scale);
  if (gap <= 0.0) gap = (spec.hi - spec.lo) / (2.0 * static_cast<double>(spec.n));
  const double tight = spec.noise_scale / 4.0;
  std::vector<double> off(spec.n, 0.0);
  for (std::size_t r = 1; r < spec.n; ++r) {
    // Clustered: steps into ranks K and K+1 (0-based) stay inside the cluster.
    const bool in_cluster = spec.profile == ScoreProfile::ClusteredNearBoundary &&
                            (r == spec.k || r == spec.k + 1);
    off[r] = off[r - 1] + (in_cluster ? tight : gap);
  }
  return off;
}

float draw_cell(double mean, const SynthSpec& spec, Rng& rng) {
  if (spec.profile == ScoreProfile::UniformRandom) {
    return static_cast<float>(spec.lo + (spec.hi - spec.lo) * rng.uniform01());
  }
  double v = mean;
  if (spec.noise_scale > 0.0) {
    int tries = 0;
    do {
      v = mean + spec.noise_scale * rng.normal();
    } while ((v < spec.lo || v > spec.hi) && ++tries < 64);
    v = std::clamp(v, spec.lo, spec.hi);
  }
  return static_cast<float>(v);
}

std::vector<float> random_unit(std::size_t dim, Rng& rng) {
  std::vector<double> v(dim);
  double norm = 0.0;
  while (norm < 1e-12) {
    norm = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      norm += x * x;
    }
  }
  norm = std::sqrt(norm);
  std::vector<float> out(dim);
  for (std::size_t d = 0; d < dim; ++d) out[d] = static_cast<float>(v[d] / norm);
  return out;
}

// Modified Gram-Schmidt over `count` random gaussian vectors in double
// precision; requires count <= dim.
std::vector<std::vector<double>> orthonormal_basis(std::size_t count, std::size_t dim, Rng& rng) {
  std::vector<std::vector<double>> basis;
  while (basis.size() < count) {
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.normal();
    for (const auto& b : basis) {
      const double p = std::inner_product(v.begin(), v.end(), b.begin(), 0.0);
      for (std::size_t d = 0; d < dim; ++d) v[d] -= p * b[d];
    }
    const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (norm < 1e-6) continue;
    for (auto& x : v) x /= norm;
    basis.push_back(std::move(v));
  }
  return basis;
}

void normalise_into(std::span<float> out, const std::vector<double>& v) {
  const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  for (std::size_t d = 0; d < out.size(); ++d) out[d] = static_cast<float>(v[d] / norm);
}

}  // namespace

SynthMatrix gen_matrix(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SynthMatrix out;
  out.values = DenseMatrix(static_cast<std::uint32_t>(spec.n), static_cast<std::uint32_t>(spec.t));
  out.ladder.resize(spec.n);
  std::iota(out.ladder.begin(), out.ladder.end(), std::size_t{0});
  for (std::size_t r = 0; r + 1 < spec.n; ++r) {
    std::swap(out.ladder[r], out.ladder[r + rng.uniform_index(spec.n - r)]);
  }

  out.row_means.assign(spec.n, 0.5 * (spec.lo + spec.hi));
  if (spec.profile != ScoreProfile::UniformRandom) {
    const auto off = ladder_offsets(spec);
    const double span = off.back();
    if (span >= spec.hi - spec.lo) {
      throw ConfigError("ladder of " + std::to_string(spec.n) + " rows needs span " +
                        std::to_string(span) + ", wider than the value range; lower "
                        "noise_scale or ladder_gap");
    }
    const double top = 0.5 * (spec.lo + spec.hi) + 0.5 * span;
    for (std::size_t r = 0; r < spec.n; ++r) out.row_means[out.ladder[r]] = top - off[r];
  }

  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t t = 0; t < spec.t; ++t) {
      out.values.at(i, t) = draw_cell(out.row_means[i], spec, rng);
    }
  }
  return out;
}

SynthEmbeddings gen_embeddings(const SynthSpec& spec, std::size_t dim, std::size_t doc_len) {
  if (dim < 2) throw ConfigError("embedding dimension must be at least 2");
  if (doc_len < 1) throw ConfigError("documents need at least one token");
  SynthEmbeddings out;
  out.target = gen_matrix(spec);
  Rng rng = Rng(spec.seed).split(0x656d62);
  const std::size_t cols = spec.t;
  const bool exact = dim > cols;

  std::vector<std::vector<double>> q(cols);
  std::vector<double> residual;
  if (exact) {
    auto basis = orthonormal_basis(cols + 1, dim, rng);
    residual = basis.back();
    basis.pop_back();
    q = std::move(basis);
  } else {
    for (auto& v : q) {
      const auto u = random_unit(dim, rng);
      v.assign(u.begin(), u.end());
    }
  }

  out.query.vectors.dim = static_cast<std::uint32_t>(dim);
  out.query.vectors.values.resize(cols * dim);
  for (std::size_t t = 0; t < cols; ++t) normalise_into(out.query.vectors.row(t), q[t]);

  out.docs.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    auto& doc = out.docs[i];
    doc.doc_id = std::to_string(i);
    doc.vectors.dim = static_cast<std::uint32_t>(dim);
    doc.vectors.values.resize(doc_len * dim);
    for (std::size_t j = 0; j < doc_len; ++j) {
      std::vector<double> e(dim, 0.0);
      double mass = 0.0;
      bool assigned = false;
      for (std::size_t t = j; t < cols; t += doc_len) {
        const double v = out.target.values.at(i, t);
        for (std::size_t d = 0; d < dim; ++d) e[d] += v * q[t][d];
        mass += v * v;
        assigned = true;
      }
      std::vector<double> fill;
      if (exact) {
        fill = residual;
      } else {
        const auto u = random_unit(dim, rng);
        fill.assign(u.begin(), u.end());
      }
      // Top up to unit norm along a direction orthogonal to every query token.
      const double rest = assigned ? std::sqrt(std::max(0.0, 1.0 - mass)) : 1.0;
      for (std::size_t d = 0; d < dim; ++d) e[d] += rest * fill[d];
      if (std::inner_product(e.begin(), e.end(), e.begin(), 0.0) < 1e-12) {
        e = fill;
      }
      normalise_into(doc.vectors.row(j), e);
    }
  }
  return out;
}

}  // namespace colbandit
