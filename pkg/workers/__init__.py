"""
Workers package for CPU-bound jobs
"""
from workers.base_worker import BaseWorker
from workers.bench_worker import BenchCell, BenchWorker, scorer_config
from workers.prediction_pool import PredictionPool, parallel_classify

__all__ = ["BaseWorker", "BenchCell", "BenchWorker", "PredictionPool", "parallel_classify", "scorer_config"]
