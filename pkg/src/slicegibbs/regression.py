"""Regression data ingestion for the loss-based kernels.

Accepts a CSV (header row, response column named ``y``, remaining numeric
columns are predictors) or generates a synthetic sparse-regression problem.
Design columns are standardized to mean 0 and unit sample standard deviation
(ddof=1); the response is left untouched.
"""

import csv
from dataclasses import dataclass

import numpy as np

__all__ = ["RegressionData", "load_regression_data", "synthetic_regression"]


@dataclass(frozen=True)
class RegressionData:
    design: np.ndarray  # (n_obs, n_pred), column-standardized
    response: np.ndarray  # (n_obs,)
    n_obs: int
    n_pred: int
    true_coef: np.ndarray | None = None  # synthetic ground truth, else None


def _standardize(raw: np.ndarray) -> np.ndarray:
    mean = raw.mean(axis=0)
    sd = raw.std(axis=0, ddof=1)
    if np.any(sd <= 0) or not np.all(np.isfinite(sd)):
        bad = [int(i) for i in np.flatnonzero(~(sd > 0))]
        raise ValueError(f"cannot standardize constant/degenerate predictor column(s) {bad}")
    return (raw - mean) / sd


def load_regression_data(source) -> RegressionData:
    """Load regression data from a CSV path or a synthetic-spec mapping.

    A mapping must carry ``n_obs``, ``n_pred``, ``sparsity`` and may carry
    ``noise_sd``, ``seed``, ``amplitude``; anything else is treated as a
    CSV path (UTF-8, comma-separated, response column named ``y``).
    """
    if isinstance(source, dict):
        spec = dict(source)
        return synthetic_regression(
            n_obs=spec.pop("n_obs"),
            n_pred=spec.pop("n_pred"),
            sparsity=spec.pop("sparsity"),
            **spec,
        )
    return _load_csv(source)


def _load_csv(path) -> RegressionData:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise ValueError(f"{path}: empty file")
        header = [h.strip() for h in header]
        if "y" not in header:
            raise ValueError(f"{path}: no response column named 'y'")
        y_idx = header.index("y")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric cell") from None
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least 2 data rows")
    arr = np.asarray(rows, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{path}: non-finite values present")
    y = arr[:, y_idx]
    design = np.delete(arr, y_idx, axis=1)
    if design.shape[1] < 1:
        raise ValueError(f"{path}: no predictor columns")
    design = _standardize(design)
    return RegressionData(
        design=design, response=y, n_obs=design.shape[0], n_pred=design.shape[1]
    )


def synthetic_regression(
    n_obs: int,
    n_pred: int,
    sparsity: int,
    noise_sd: float = 1.0,
    seed: int = 0,
    amplitude: float = 1.0,
) -> RegressionData:
    """Sparse linear model with i.i.d. standard-normal design.

    ``sparsity`` coefficients are set to +/-``amplitude`` at random positions
    (signs alternate), the rest are zero; reproducible from ``seed``.
    """
    if not n_obs > n_pred >= 1:
        raise ValueError(f"need n_obs > n_pred >= 1, got N={n_obs}, p={n_pred}")
    if not 0 <= sparsity <= n_pred:
        raise ValueError(f"sparsity must be in [0, {n_pred}]")
    if noise_sd < 0:
        raise ValueError("noise_sd must be >= 0")
    rng = np.random.Generator(np.random.Philox(key=seed))
    design = _standardize(rng.standard_normal((n_obs, n_pred)))
    coef = np.zeros(n_pred)
    pos = rng.permutation(n_pred)[:sparsity]
    coef[pos] = amplitude * np.where(np.arange(sparsity) % 2 == 0, 1.0, -1.0)
    y = design @ coef + noise_sd * rng.standard_normal(n_obs)
    return RegressionData(
        design=design, response=y, n_obs=n_obs, n_pred=n_pred, true_coef=coef
    )
