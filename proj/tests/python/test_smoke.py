import json
import math
import os
import subprocess

import numpy as np
import pytest

import colbandit


def test_oracle_matches_numpy():
    rng = np.random.default_rng(0)
    h = rng.uniform(-1, 1, size=(6, 4)).astype(np.float32)
    oracle = colbandit.MaxSimOracle.from_matrix(h)
    assert (oracle.rows, oracle.cols) == (6, 4)
    assert oracle.doc_ids == [str(i) for i in range(6)]
    assert oracle.maxsim(2, 3) == pytest.approx(float(h[2, 3]))
    np.testing.assert_allclose(oracle.full_scores(), h.astype(np.float64).sum(axis=1), rtol=1e-12)
    order = np.argsort(-h.astype(np.float64).sum(axis=1), kind="stable")
    assert colbandit.exact_topk(oracle, 3) == list(order[:3])


def test_embedding_oracle():
    q = np.eye(3, 4, dtype=np.float32)
    d = np.array([[1, 0, 0, 0], [0, 0.6, 0.8, 0]], dtype=np.float32)
    oracle = colbandit.MaxSimOracle.from_embeddings(q, [d], ["doc"])
    assert oracle.doc_ids == ["doc"]
    assert oracle.maxsim(0, 0) == pytest.approx(1.0)
    assert oracle.maxsim(0, 2) == pytest.approx(0.8)


def test_run_is_exact_in_hard_only_mode():
    values, _, _ = colbandit.gen_matrix(n=30, t=16, seed=3)
    oracle = colbandit.MaxSimOracle.from_matrix(values)
    bounds = colbandit.CellBounds.generic(oracle)
    cfg = colbandit.BanditConfig(k=4, hard_only=True, seed=1)
    result = colbandit.run(oracle, bounds, cfg)
    assert sorted(result.topk) == sorted(colbandit.exact_topk(oracle, 4))
    assert 0.0 < result.coverage <= 1.0
    assert len(result.reveals) == round(result.coverage * 30 * 16)
    assert result.terminated_by == "separation"
    assert bounds.lo.shape == (30, 16)


def test_baselines_and_metrics():
    values, _, _ = colbandit.gen_matrix(n=10, t=8, seed=5)
    oracle = colbandit.MaxSimOracle.from_matrix(values)
    exact = colbandit.exact_topk(oracle, 3)
    full = colbandit.doc_uniform(oracle, 3, 1.0, seed=2)
    assert full.topk == exact
    assert colbandit.overlap_at_k(full.topk, exact, 3) == 1.0
    margin = colbandit.doc_top_margin(oracle, colbandit.CellBounds.generic(oracle), 3, 0.25)
    assert len(margin.reveals) == 10 * 2
    assert colbandit.ndcg_at_k(["b", "a"], {"a"}, 5) == pytest.approx(1 / math.log2(3), abs=1e-12)
    assert colbandit.mrr_at_k(["b", "a"], {"a"}, 5) == 0.5
    assert colbandit.recall_at_k(["a"], {"a", "b"}, 5) == 0.5
    assert colbandit.fp_correction(8, 32) == 0.78125
    assert math.isinf(colbandit.effective_radius([0.5], 32, 10))
    with pytest.raises(ValueError):
        colbandit.overlap_at_k([1, 2], [1], 2)


def test_pipeline_bounds_are_sound():
    query, docs, ladder = colbandit.gen_embeddings(
        n=40, t=8, profile="well-separated", noise_scale=0.005, seed=2, dim=12, doc_len=8
    )
    oracle, bounds, index = colbandit.generate_candidates(query, docs, k_prime=5)
    assert len(index) == oracle.rows
    assert ladder[0] in index
    h = np.array([[oracle.maxsim(i, t) for t in range(oracle.cols)] for i in range(oracle.rows)])
    assert np.all(bounds.lo <= h) and np.all(h <= bounds.hi)


@pytest.mark.skipif("COLBANDIT_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_gen_verify_run(tmp_path):
    cli = os.environ["COLBANDIT_CLI"]
    gen = tmp_path / "gen.json"
    gen.write_text(json.dumps({"synth": {"n": 12, "t": 8, "seed": 1}, "num_queries": 2}))
    subprocess.run([cli, "gen", "--config", str(gen)], check=True, capture_output=True)
    verify = subprocess.run([cli, "verify", str(tmp_path / "data")], capture_output=True, text=True)
    assert verify.returncode == 0, verify.stdout
    assert verify.stdout.startswith("verify: PASS")
    cfg = tmp_path / "run.json"
    cfg.write_text(
        json.dumps({"mode": "full", "data": {"matrix": "data/queries.jsonl"}, "bandit": {"k": 2}})
    )
    out = subprocess.run([cli, "run", "--config", str(cfg)], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    lines = (tmp_path / "results.jsonl").read_text().splitlines()
    assert len(lines) == 2
    assert all(json.loads(line)["coverage"] == 1.0 for line in lines)
    bad = subprocess.run([cli, "run", "--config", str(tmp_path / "absent.json")], capture_output=True)
    assert bad.returncode == 2
