from .ranking import ndcg_at_k, hr_at_k, RankingMetrics, evaluate_model


__all__ = ["ndcg_at_k", "hr_at_k", "RankingMetrics", "evaluate_model"]
