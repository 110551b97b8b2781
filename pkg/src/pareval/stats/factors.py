"""Exploratory factor structure: factor-count selection (Kaiser criterion and
Horn's parallel analysis) and principal-component extraction with varimax
rotation.

Extraction operates on the variables' correlation matrix; loadings are
eigenvectors scaled by the square roots of their eigenvalues. Varimax uses
Kaiser row normalization and classical pairwise sweeps with the closed-form
per-pair angle, iterated until the rotation criterion stops improving.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import InputError

VARIMAX_TOL = 1e-10
VARIMAX_MAX_SWEEPS = 100


@dataclass(frozen=True, eq=False)
class FactorModel:
    """Rotated factor solution.

    ``loadings`` is variables x k (rotated, signs fixed so each factor's
    largest-magnitude loading is positive); ``rotation`` is the k x k
    orthogonal matrix with rotated = unrotated @ rotation; ``assignments``
    maps each variable to the 1-based factor with its largest |loading|.
    Equality is identity (the matrices make element-wise `==` ambiguous).
    """

    variables: tuple[str, ...]
    k: int
    loadings: np.ndarray
    rotation: np.ndarray
    explained_variance: tuple[float, ...]
    assignments: Mapping[str, int]


def _as_matrix(data, variables: Sequence[str] | None = None) -> tuple[np.ndarray, tuple[str, ...]]:
    mat = np.asarray(data, dtype=float)
    if mat.ndim != 2:
        raise InputError("data must be a 2-dimensional (observations x variables) matrix")
    n, p = mat.shape
    if p < 2:
        raise InputError("need at least 2 variables")
    if n < 3:
        raise InputError("need at least 3 observations")
    if not np.isfinite(mat).all():
        raise InputError("data contains non-finite values")
    names = tuple(variables) if variables is not None else tuple(f"v{i}" for i in range(p))
    if len(names) != p:
        raise InputError(f"got {len(names)} variable names for {p} columns")
    return mat, names


def _correlation(mat: np.ndarray) -> np.ndarray:
    stds = mat.std(axis=0)
    if (stds == 0).any():
        bad = int(np.argmax(stds == 0))
        raise InputError(f"column {bad} is constant; correlations undefined")
    return np.corrcoef(mat, rowvar=False)


def _sorted_eigenvalues(corr: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(corr)[::-1]


def kaiser_count(data, variables: Sequence[str] | None = None) -> int:
    """Number of correlation-matrix eigenvalues strictly greater than 1."""
    mat, _ = _as_matrix(data, variables)
    eigenvalues = _sorted_eigenvalues(_correlation(mat))
    return int((eigenvalues > 1.0).sum())


def parallel_analysis(data, replicates: int = 100, seed: int = 0,
                      variables: Sequence[str] | None = None) -> int:
    """Horn's parallel analysis factor count.

    Retains factors while the sample eigenvalue exceeds the mean eigenvalue at
    the same index across ``replicates`` standard-normal datasets of the same
    shape, stopping at the first failure (retention is contiguous from the
    top). Each replicate draws from its own (seed, replicate) substream, so
    results do not depend on evaluation order.
    """
    if replicates < 1:
        raise InputError("replicates must be >= 1")
    mat, _ = _as_matrix(data, variables)
    sample = _sorted_eigenvalues(_correlation(mat))
    simulated = np.zeros((replicates, mat.shape[1]))
    for rep in range(replicates):
        rng = np.random.default_rng([seed, rep])
        noise = rng.standard_normal(mat.shape)
        simulated[rep] = _sorted_eigenvalues(_correlation(noise))
    reference = simulated.mean(axis=0)
    count = 0
    for sample_ev, reference_ev in zip(sample, reference):
        if sample_ev <= reference_ev:
            break
        count += 1
    return count


def _varimax_criterion(loadings: np.ndarray) -> float:
    # per-factor variance of squared loadings, summed over factors
    squared = loadings ** 2
    p = loadings.shape[0]
    return float((squared ** 2).sum() / p - ((squared.sum(axis=0) / p) ** 2).sum())


def varimax(loadings: np.ndarray, tol: float = VARIMAX_TOL,
            max_sweeps: int = VARIMAX_MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Varimax rotation with Kaiser row normalization.

    Classical pairwise sweeps: each factor pair is rotated by its closed-form
    optimal angle; sweeps repeat until the criterion stops improving. Returns
    (rotated loadings, rotation matrix). Raises when the criterion is still
    improving after ``max_sweeps`` sweeps.
    """
    loadings = np.asarray(loadings, dtype=float)
    p, k = loadings.shape
    if k == 1:
        return loadings.copy(), np.eye(1)
    communalities = np.sqrt((loadings ** 2).sum(axis=1))
    scale = np.where(communalities > 0, communalities, 1.0)
    rotated = loadings / scale[:, None]
    rotation = np.eye(k)
    criterion = _varimax_criterion(rotated)
    converged = False
    for _ in range(max_sweeps):
        for j in range(k - 1):
            for l in range(j + 1, k):
                x = rotated[:, j]
                y = rotated[:, l]
                u = x * x - y * y
                v = 2.0 * x * y
                su, sv = u.sum(), v.sum()
                numerator = 2.0 * (u * v).sum() - 2.0 * su * sv / p
                denominator = (u * u - v * v).sum() - (su * su - sv * sv) / p
                angle = 0.25 * np.arctan2(numerator, denominator)
                if abs(angle) < 1e-15:
                    continue
                c, s = np.cos(angle), np.sin(angle)
                pair = np.array([[c, -s], [s, c]])
                rotated[:, [j, l]] = rotated[:, [j, l]] @ pair
                rotation[:, [j, l]] = rotation[:, [j, l]] @ pair
        new_criterion = _varimax_criterion(rotated)
        if new_criterion <= criterion * (1 + tol):
            converged = True
            break
        criterion = new_criterion
    if not converged:
        raise InputError(f"varimax did not converge within {max_sweeps} sweeps")
    return rotated * scale[:, None], rotation


def extract_and_rotate(data, k: int, variables: Sequence[str] | None = None) -> FactorModel:
    """Extract k principal-component factors and varimax-rotate them.

    Factors are ordered by explained variance (sum of squared rotated
    loadings, descending) and sign-fixed so each factor's largest-magnitude
    loading is positive. Rotation preserves per-variable communalities.
    """
    mat, names = _as_matrix(data, variables)
    p = mat.shape[1]
    if not 1 <= k <= p:
        raise InputError(f"factor count must be in [1, {p}], got {k}")
    corr = _correlation(mat)
    eigenvalues, eigenvectors = np.linalg.eigh(corr)
    order = np.argsort(eigenvalues)[::-1][:k]
    top = np.clip(eigenvalues[order], 0.0, None)
    unrotated = eigenvectors[:, order] * np.sqrt(top)
    rotated, rotation = varimax(unrotated)

    variance = (rotated ** 2).sum(axis=0)
    factor_order = np.argsort(variance)[::-1]
    rotated = rotated[:, factor_order]
    rotation = rotation[:, factor_order]
    signs = np.where(rotated[np.abs(rotated).argmax(axis=0), np.arange(k)] < 0, -1.0, 1.0)
    rotated = rotated * signs
    rotation = rotation * signs

    assignments = {
        name: int(np.abs(rotated[i]).argmax()) + 1 for i, name in enumerate(names)
    }
    return FactorModel(
        variables=names,
        k=k,
        loadings=rotated,
        rotation=rotation,
        explained_variance=tuple((rotated ** 2).sum(axis=0).tolist()),
        assignments=assignments,
    )


def factor_model_to_json(model: FactorModel) -> dict:
    return {
        "k": model.k,
        "variables": list(model.variables),
        "loadings": [[float(x) for x in row] for row in model.loadings],
        "rotation": [[float(x) for x in row] for row in model.rotation],
        "explained_variance": list(model.explained_variance),
        "assignments": dict(model.assignments),
    }


def factor_model_markdown(model: FactorModel, suppress_below: float = 0.3) -> str:
    """Render the loading table, blanking |loadings| below the display threshold."""
    header = "| variable | " + " | ".join(f"F{i}" for i in range(1, model.k + 1)) + " | factor |"
    rule = "|" + "---|" * (model.k + 2)
    lines = [header, rule]
    for i, name in enumerate(model.variables):
        cells = []
        for j in range(model.k):
            value = model.loadings[i, j]
            cells.append(f"{value:.2f}" if abs(value) >= suppress_below else "")
        lines.append(f"| {name} | " + " | ".join(cells) + f" | F{model.assignments[name]} |")
    return "\n".join(lines) + "\n"
