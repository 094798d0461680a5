"""Similarity and LLM-judge baselines sharing the classifier predict contract."""

from topicguard.baselines.scorers import (
    PAIR_JOINER,
    CosineScorer,
    ExemplarSet,
    KnnScorer,
    ZeroShotScorer,
    build_judge_prompt,
    cosine_score,
    knn_score,
    zero_shot_llm_score,
)

__all__ = [
    "PAIR_JOINER",
    "CosineScorer",
    "ExemplarSet",
    "KnnScorer",
    "ZeroShotScorer",
    "build_judge_prompt",
    "cosine_score",
    "knn_score",
    "zero_shot_llm_score",
]
