"""
Controllers package

Orchestration between the CLI commands and the services
"""
from controllers.bench import BenchResult, bprime_table, run_bench
from controllers.fuzziness import compare_fuzziness, fuzziness_samples
from controllers.predict import dense_grid, predict_classification, predict_regression
from controllers.validate import DEFAULT_EPSILONS, validate_coverage

__all__ = [
    "BenchResult",
    "run_bench",
    "bprime_table",
    "compare_fuzziness",
    "fuzziness_samples",
    "dense_grid",
    "predict_classification",
    "predict_regression",
    "DEFAULT_EPSILONS",
    "validate_coverage",
]
