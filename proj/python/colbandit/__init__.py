"""Adaptive Top-K reranking over MaxSim matrices with per-cell reveals."""

from ._core import (
    BanditConfig,
    CellBounds,
    MaxSimOracle,
    RunResult,
    doc_top_margin,
    doc_uniform,
    effective_radius,
    exact_topk,
    fp_correction,
    full_rerank,
    gen_embeddings,
    gen_matrix,
    generate_candidates,
    mrr_at_k,
    ndcg_at_k,
    overlap_at_k,
    recall_at_k,
    run,
)

__all__ = [
    "BanditConfig",
    "CellBounds",
    "MaxSimOracle",
    "RunResult",
    "doc_top_margin",
    "doc_uniform",
    "effective_radius",
    "exact_topk",
    "fp_correction",
    "full_rerank",
    "gen_embeddings",
    "gen_matrix",
    "generate_candidates",
    "mrr_at_k",
    "ndcg_at_k",
    "overlap_at_k",
    "recall_at_k",
    "run",
]
