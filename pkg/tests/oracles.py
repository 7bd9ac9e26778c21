"""Independent oracles used to cross-check production code paths.

These deliberately avoid the library calls they are checking:

* ``jacobi_eigenvalues`` is a hand-rolled cyclic Jacobi eigensolver for
  symmetric matrices, used to verify the LAPACK-backed SVD (singular values
  of Z are the square roots of the eigenvalues of Z^T Z).
* ``brute_force_ranking`` sorts entities by the raw pairwise log-ratio
  directly from table values, used to verify biplot projection rankings.
* ``linear_quantile`` re-implements the interpolated quantile definition
  with plain Python.
"""

from __future__ import annotations

import math

import numpy as np


def jacobi_eigenvalues(matrix, max_sweeps: int = 100):
    """Eigenvalues of a symmetric matrix via cyclic Jacobi rotations.

    Returns the eigenvalues sorted in descending order, in the dtype of the
    input. Pure rotations on a copied matrix; no numpy.linalg involved.
    """
    a = np.array(matrix, copy=True)
    n = a.shape[0]
    assert a.shape == (n, n)
    assert np.allclose(
        a.astype(float), a.T.astype(float),
        atol=1e-12 * max(1.0, float(np.abs(a).max())),
    )
    one = a.dtype.type(1.0)
    half = a.dtype.type(0.5)
    eps = np.finfo(a.dtype).eps

    norm = np.sqrt((a * a).sum())
    for _ in range(max_sweeps):
        off = np.sqrt(np.abs((a * a).sum() - (np.diag(a) ** 2).sum()))
        if off <= 64.0 * eps * max(norm, one):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= np.finfo(a.dtype).tiny:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = half / theta
                else:
                    sign = one if theta >= 0.0 else -one
                    t = sign / (abs(theta) + np.sqrt(theta * theta + one))
                c = one / np.sqrt(t * t + one)
                s = t * c
                app, aqq = a[p, p], a[q, q]
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp, akq = a[k, p], a[k, q]
                    a[k, p] = a[p, k] = c * akp - s * akq
                    a[k, q] = a[q, k] = s * akp + c * akq
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
    return np.sort(np.diag(a))[::-1].copy()


def oracle_singular_values(z) -> np.ndarray:
    """Singular values of a matrix from the Jacobi eigenvalues of Z^T Z.

    The Gram matrix squares the condition number, putting the plain-double
    noise floor for zero singular values near sqrt(eps)*s1; forming the Gram
    product and running the rotations in extended precision keeps the oracle
    meaningfully below the 1e-8*s1 comparison tolerance.
    """
    z = np.asarray(z, dtype=float).astype(np.longdouble)
    gram = z.T @ z if z.shape[1] <= z.shape[0] else z @ z.T
    eigenvalues = jacobi_eigenvalues(gram)
    return np.sqrt(np.clip(eigenvalues, 0.0, None)).astype(float)


def brute_force_ranking(values, i: int, j: int, entity_ids) -> tuple[str, ...]:
    """Entity ids sorted by descending ln(x_i / x_j), ties by ascending id.

    Works on raw table values; no CLR, no SVD, no projection.
    """
    values = np.asarray(values, dtype=float)
    ratios = [math.log(values[r, i]) - math.log(values[r, j]) for r in range(values.shape[0])]
    order = sorted(range(len(entity_ids)), key=lambda r: (-ratios[r], entity_ids[r]))
    return tuple(entity_ids[r] for r in order)


def linear_quantile(values, p: float) -> float:
    """Quantile at index (n-1)*p with linear interpolation, from first principles."""
    ordered = sorted(float(v) for v in values)
    pos = (len(ordered) - 1) * p
    lo = math.floor(pos)
    hi = math.ceil(pos)
    if lo == hi:
        return ordered[lo]
    frac = pos - lo
    return ordered[lo] * (1.0 - frac) + ordered[hi] * frac
