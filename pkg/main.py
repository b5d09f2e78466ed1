"""
Main entry point for the conformal prediction CLI
"""
import os

# Single-core timings: BLAS/OpenMP must not spawn threads, and the limits
# only apply when set before numpy is first imported.
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

from utils.app_factory import create_app  # noqa: E402
from utils.logging_config import setup_logging  # noqa: E402

setup_logging()

app = create_app()

if __name__ == "__main__":
    app()
