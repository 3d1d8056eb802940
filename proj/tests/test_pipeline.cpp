#include <algorithm>
#include <set>
#include <tuple>

#include "colbandit/errors.hpp"
#include "colbandit/pipeline.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace colbandit;

namespace {

PipelineConfig with_k(std::size_t k, NegativePolicy neg = NegativePolicy::Clamp) {
  PipelineConfig c;
  c.k_prime = k;
  c.negatives = neg;
  return c;
}

std::set<std::string> ids(const CandidateSet& c) { return {c.doc_ids.begin(), c.doc_ids.end()}; }

void check_sound(std::span<const DocTokens> corpus, const QueryTokens& q, const PipelineConfig& cfg) {
  const auto stage = generate_candidates(corpus, q, cfg);
  const auto bounds = derive_bounds(stage, cfg);
  const auto oracle = candidate_oracle(corpus, q, stage.candidates, cfg);
  REQUIRE(oracle.rows() == stage.candidates.size());
  for (std::size_t i = 0; i < oracle.rows(); ++i) {
    for (std::size_t t = 0; t < oracle.cols(); ++t) {
      const double h = oracle.maxsim(i, t);
      CHECK(bounds.lo_at(i, t) <= h);
      CHECK(h <= bounds.hi_at(i, t));
    }
  }
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("a single-document corpus is always the candidate set") {
    Rng rng(1);
    const auto corpus = test::random_corpus(1, 4, 8, rng);
    const QueryTokens q{test::unit_vectors(3, 8, rng)};
    for (std::size_t k : {1u, 2u, 10u}) {
      const auto s = generate_candidates(corpus, q, with_k(k));
      CHECK(s.candidates.size() == 1);
      CHECK(s.candidates.doc_ids.front() == "doc0");
    }
  }

  TEST_CASE("exhaustive k' recovers every document") {
    Rng rng(2);
    const auto corpus = test::random_corpus(6, 3, 5, rng);
    const QueryTokens q{test::unit_vectors(4, 5, rng)};
    const auto s = generate_candidates(corpus, q, with_k(18));
    CHECK(s.candidates.size() == 6);
    for (const auto& list : s.neighbors.per_token) CHECK(list.size() == 18);
    const auto more = generate_candidates(corpus, q, with_k(100));
    for (const auto& list : more.neighbors.per_token) CHECK(list.size() == 18);
  }

  TEST_CASE("k' = 1 matches an exhaustive similarity table") {
    Rng rng(3);
    const auto corpus = test::random_corpus(3, 2, 4, rng);
    const QueryTokens q{test::unit_vectors(2, 4, rng)};
    const auto s = generate_candidates(corpus, q, with_k(1));
    std::set<std::string> expected;
    for (std::size_t t = 0; t < 2; ++t) {
      double best = -2.0;
      std::size_t best_doc = 0;
      std::size_t best_tok = 0;
      for (std::size_t d = 0; d < 3; ++d) {
        for (std::size_t j = 0; j < 2; ++j) {
          const double v = dot(corpus[d].vectors.row(j), q.vectors.row(t));
          if (v > best) {
            best = v;
            best_doc = d;
            best_tok = j;
          }
        }
      }
      expected.insert(corpus[best_doc].doc_id);
      REQUIRE(s.neighbors.per_token[t].size() == 1);
      CHECK(s.neighbors.per_token[t][0].doc == best_doc);
      CHECK(s.neighbors.per_token[t][0].token == best_tok);
      CHECK(s.neighbors.per_token[t][0].similarity == best);
    }
    CHECK(ids(s.candidates) == expected);
  }

  TEST_CASE("neighbour lists are sorted and record exact MaxSim for retrieved pairs") {
    Rng rng(4);
    const auto corpus = test::random_corpus(20, 6, 8, rng);
    const QueryTokens q{test::unit_vectors(5, 8, rng)};
    const auto cfg = with_k(7);
    const auto s = generate_candidates(corpus, q, cfg);
    const auto oracle = candidate_oracle(corpus, q, s.candidates, cfg);
    for (const auto& list : s.neighbors.per_token) {
      CHECK(list.size() == 7);
      for (std::size_t j = 1; j < list.size(); ++j) CHECK(list[j].similarity <= list[j - 1].similarity);
    }
    std::set<std::size_t> owners;
    for (const auto& list : s.neighbors.per_token) {
      for (const auto& nb : list) owners.insert(nb.doc);
    }
    CHECK(std::set<std::size_t>(s.candidates.corpus_index.begin(), s.candidates.corpus_index.end()) ==
          owners);
    for (std::size_t i = 0; i < s.candidates.size(); ++i) {
      for (std::size_t t = 0; t < 5; ++t) {
        if (s.candidates.was_retrieved(i, t)) {
          CHECK(s.candidates.retrieved_maxsim(i, t) == oracle.maxsim(i, t));
        }
      }
    }
  }

  TEST_CASE("ANN bounds use the retrieved value or the k'-th similarity") {
    StageOne stage;
    stage.candidates.corpus_index = {0};
    stage.candidates.doc_ids = {"d"};
    stage.candidates.cols = 2;
    stage.candidates.retrieved = {1, 0};
    stage.candidates.retrieved_value = {0.82, 0.0};
    stage.neighbors.per_token = {{{0, 0, 0.82}}, {{1, 0, 0.9}, {2, 0, 0.55}}};
    const auto b = derive_bounds(stage, PipelineConfig{});
    CHECK(b.lo_at(0, 0) == 0.0);
    CHECK(b.hi_at(0, 0) == 0.82);
    CHECK(b.lo_at(0, 1) == 0.0);
    CHECK(b.hi_at(0, 1) == 0.55);

    auto widen = PipelineConfig{};
    widen.negatives = NegativePolicy::Widen;
    CHECK(derive_bounds(stage, widen).lo_at(0, 1) == -1.0);

    auto generic = PipelineConfig{};
    generic.bounds = BoundsMode::Generic;
    const auto g = derive_bounds(stage, generic);
    for (std::size_t t = 0; t < 2; ++t) {
      CHECK(g.lo_at(0, t) == -1.0);
      CHECK(g.hi_at(0, t) == 1.0);
    }
  }

  TEST_CASE("ANN bounds are sound against brute-force scoring") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      Rng rng(seed);
      const auto corpus = test::random_corpus(15, 5, 6, rng);
      const QueryTokens q{test::unit_vectors(4, 6, rng)};
      for (std::size_t k : {1u, 3u, 10u}) {
        check_sound(corpus, q, with_k(k));
        check_sound(corpus, q, with_k(k, NegativePolicy::Widen));
      }
    }
  }

  TEST_CASE("clamping keeps oracle values non-negative") {
    Rng rng(9);
    const auto corpus = test::random_corpus(10, 2, 3, rng);
    const QueryTokens q{test::unit_vectors(6, 3, rng)};
    const auto cfg = with_k(30);
    const auto s = generate_candidates(corpus, q, cfg);
    const auto o = candidate_oracle(corpus, q, s.candidates, cfg);
    for (std::size_t i = 0; i < o.rows(); ++i) {
      for (std::size_t t = 0; t < o.cols(); ++t) CHECK(o.maxsim(i, t) >= 0.0);
    }
  }

  TEST_CASE("larger k' never shrinks the candidate set") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(seed + 50);
      const auto corpus = test::random_corpus(25, 4, 6, rng);
      const QueryTokens q{test::unit_vectors(5, 6, rng)};
      std::set<std::string> prev;
      for (std::size_t k = 1; k <= 40; k += 3) {
        const auto s = generate_candidates(corpus, q, with_k(k));
        const auto now = ids(s.candidates);
        CHECK(std::includes(now.begin(), now.end(), prev.begin(), prev.end()));
        prev = now;
      }
    }
  }

  TEST_CASE("candidate artifact carries ids, bounds and s_k'") {
    Rng rng(5);
    const auto corpus = test::random_corpus(8, 3, 4, rng);
    const QueryTokens q{test::unit_vectors(3, 4, rng)};
    const auto cfg = with_k(4);
    const auto s = generate_candidates(corpus, q, cfg);
    const auto b = derive_bounds(s, cfg);
    const auto j = candidate_artifact(s, b, cfg);
    CHECK(j.at("k_prime") == 4);
    CHECK(j.at("bounds") == "ann");
    CHECK(j.at("doc_ids").size() == s.candidates.size());
    CHECK(j.at("s_kprime").size() == 3);
    CHECK(j.at("hi").size() == s.candidates.size());
    CHECK(j.at("hi").at(0).size() == 3);
    CHECK(j.at("hi").at(0).at(2).get<double>() == b.hi_at(0, 2));
  }

  TEST_CASE("invalid Stage-1 inputs") {
    Rng rng(6);
    const QueryTokens q{test::unit_vectors(2, 4, rng)};
    CHECK_THROWS_AS(generate_candidates(std::vector<DocTokens>{}, q, with_k(3)), UsageError);
    const auto corpus = test::random_corpus(2, 2, 4, rng);
    CHECK_THROWS_AS(generate_candidates(corpus, q, with_k(0)), UsageError);
    const auto other = test::random_corpus(2, 2, 5, rng);
    CHECK_THROWS_AS(generate_candidates(other, q, with_k(3)), ConfigError);
  }
}
