"""Agglomerative clustering in Aitchison geometry.

Groups of entities that sit close together in the biplot share a similar
indicator structure; this module makes that reading reproducible by
clustering on the pairwise Aitchison distance matrix (Euclidean distance
between CLR rows) with single, complete or average linkage.

Merging is fully deterministic: among pairs at equal distance, the pair with
the lexicographically smallest (min entity id, max entity id) merges first,
and a merged cluster keeps the smaller of the two ids. The cut is either a
target cluster count, a distance threshold, or (default) a threshold placed
at the largest relative gap between consecutive merge distances.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .composition import (
    ClrMatrix,
    IndicatorTable,
    RatioDefinition,
    clr_matrix,
)
from .errors import (
    DimensionMismatch,
    InfeasibleCut,
    InvalidOptions,
    MismatchedEntities,
    TooFewRows,
    UnknownPart,
)

LINKAGES = ("single", "complete", "average")


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric non-negative matrix with zero diagonal, in table entity order."""

    ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        v = self.values
        n = len(self.ids)
        if v.shape != (n, n):
            raise DimensionMismatch(f"matrix {v.shape} for {n} ids")
        if not np.allclose(v, v.T, rtol=0.0, atol=1e-12):
            raise DimensionMismatch("distance matrix is not symmetric")
        if np.any(np.diag(v) != 0.0):
            raise DimensionMismatch("distance matrix diagonal is not zero")
        if np.any(v < 0.0):
            raise DimensionMismatch("distance matrix has negative entries")

    @property
    def n(self) -> int:
        return len(self.ids)


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    """Result of one clustering run.

    labels maps entity id to a 1-based cluster label (clusters numbered by
    ascending smallest member id). merge_history always covers the full
    dendrogram (n-1 merges) regardless of where the cut fell; each entry is
    (cluster_a, cluster_b, merge_distance) with cluster ids being the
    smallest member id of each side.
    """

    labels: dict[str, int]
    linkage: str
    cut: dict
    merge_history: tuple[tuple[str, str, float], ...]

    @property
    def n_clusters(self) -> int:
        return len(set(self.labels.values()))

    def members(self) -> dict[int, tuple[str, ...]]:
        out: dict[int, list[str]] = {}
        for eid, label in self.labels.items():
            out.setdefault(label, []).append(eid)
        return {k: tuple(sorted(v)) for k, v in sorted(out.items())}


@dataclass(frozen=True, eq=False)
class ClusterProfile:
    """Per-cluster position relative to the sample-average composition.

    mean_clr is the mean centred CLR vector of the members; origin_distance
    its Euclidean norm, i.e. how far the cluster sits from the biplot origin
    (the sample average). ratio_means holds the cluster mean centred
    log-ratio per named ratio.
    """

    label: int
    member_ids: tuple[str, ...]
    mean_clr: np.ndarray
    origin_distance: float
    ratio_means: dict[str, float]


def distance_matrix(clr: ClrMatrix) -> DistanceMatrix:
    """Pairwise Aitchison distances between all entities."""
    if clr.n < 2:
        raise TooFewRows(f"distance matrix needs n >= 2, got {clr.n}")
    c = clr.values
    diff = c[:, None, :] - c[None, :, :]
    d = np.sqrt(np.sum(diff * diff, axis=-1))
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(ids=clr.entity_ids, values=d)


def _merge_sequence(dist: DistanceMatrix, linkage: str):
    """Run all n-1 merges; returns [(id_a, id_b, distance)] in merge order.

    Cluster-pair distances are maintained with the Lance-Williams updates
    for the three supported linkages, keyed by entity ids, so the outcome
    does not depend on the input row order.
    """
    ids = sorted(dist.ids)
    index = {eid: k for k, eid in enumerate(dist.ids)}
    sizes = {eid: 1 for eid in ids}
    d: dict[tuple[str, str], float] = {}
    for a, b in combinations(ids, 2):
        d[(a, b)] = float(dist.values[index[a], index[b]])

    active = list(ids)
    history: list[tuple[str, str, float]] = []
    while len(active) > 1:
        best = None
        for a, b in combinations(active, 2):
            cand = (d[(a, b)], a, b)
            if best is None or cand < best:
                best = cand
        dd, a, b = best
        history.append((a, b, dd))
        for c in active:
            if c in (a, b):
                continue
            dac = d[tuple(sorted((a, c)))]
            dbc = d[tuple(sorted((b, c)))]
            if linkage == "single":
                dn = min(dac, dbc)
            elif linkage == "complete":
                dn = max(dac, dbc)
            else:
                dn = (sizes[a] * dac + sizes[b] * dbc) / (sizes[a] + sizes[b])
            d[tuple(sorted((a, c)))] = dn
        sizes[a] += sizes[b]
        active.remove(b)
    return history


def _gap_threshold(history: Sequence[tuple[str, str, float]]) -> float:
    """Threshold at the largest relative gap between consecutive merge distances.

    Falls back to the last merge distance (a single cluster) when fewer than
    two merges exist or no positive-distance gap is available.
    """
    ds = [h[2] for h in history]
    best_ratio, best_i = 0.0, None
    for i in range(len(ds) - 1):
        if ds[i] > 0.0:
            ratio = ds[i + 1] / ds[i]
            if ratio > best_ratio:
                best_ratio, best_i = ratio, i
    if best_i is None:
        return ds[-1] if ds else 0.0
    return 0.5 * (ds[best_i] + ds[best_i + 1])


def hierarchical_cluster(
    dist: DistanceMatrix,
    linkage: str = "complete",
    n_clusters: int | None = None,
    threshold: float | None = None,
) -> ClusterAssignment:
    """Agglomerative clustering with an explicit or automatic cut.

    Exactly one of n_clusters / threshold may be given; with neither, the
    cut is the threshold at the largest relative gap in the merge distances.
    Merge distances are non-decreasing for all three linkages, so a
    threshold cut is always a prefix of the merge sequence.
    """
    if linkage not in LINKAGES:
        raise InvalidOptions(f"linkage {linkage!r} not in {LINKAGES}")
    n = dist.n
    if n_clusters is not None and threshold is not None:
        raise InfeasibleCut("give either a cluster count or a threshold, not both")
    if n_clusters is not None and not 1 <= n_clusters <= n:
        raise InfeasibleCut(f"cluster count {n_clusters} not in [1, {n}]")
    if threshold is not None and threshold < 0.0:
        raise InfeasibleCut(f"threshold must be non-negative, got {threshold}")

    history = _merge_sequence(dist, linkage)
    if n_clusters is not None:
        cut: dict = {"mode": "count", "value": int(n_clusters)}
        n_merges = n - n_clusters
    elif threshold is not None:
        cut = {"mode": "threshold", "value": float(threshold)}
        n_merges = sum(1 for h in history if h[2] <= threshold)
    else:
        t = _gap_threshold(history)
        cut = {"mode": "gap", "value": float(t)}
        n_merges = sum(1 for h in history if h[2] <= t)

    members: dict[str, list[str]] = {eid: [eid] for eid in dist.ids}
    for a, b, _ in history[:n_merges]:
        members[a].extend(members.pop(b))

    labels: dict[str, int] = {}
    for label, cid in enumerate(sorted(members), start=1):
        for eid in members[cid]:
            labels[eid] = label
    return ClusterAssignment(
        labels=labels, linkage=linkage, cut=cut, merge_history=tuple(history)
    )


def cluster_profile(
    table: IndicatorTable,
    assignment: ClusterAssignment,
    ratios: Sequence[RatioDefinition] | None = None,
) -> list[ClusterProfile]:
    """Profile each cluster against the sample-average composition.

    Uses the column-centred CLR matrix, so a cluster of all entities
    averages to the zero vector and a singleton cluster reproduces that
    entity's centred CLR row. With ratios=None the default ratio catalog is
    used, silently keeping only the definitions that resolve in the table.
    """
    if set(assignment.labels) != set(table.entity_ids):
        raise MismatchedEntities("assignment does not cover exactly the table entities")
    c = clr_matrix(table).values
    z = c - c.mean(axis=0)
    if ratios is None:
        from .ingest import default_ratio_catalog

        resolved = []
        for definition in default_ratio_catalog():
            try:
                definition.resolve(table)
            except UnknownPart:
                continue
            resolved.append(definition)
        ratios = resolved

    row_of = {eid: r for r, eid in enumerate(table.entity_ids)}
    profiles = []
    for label, member_ids in assignment.members().items():
        rows = [row_of[eid] for eid in member_ids]
        mean = z[rows].mean(axis=0)
        ratio_means = {}
        for definition in ratios:
            i, j = definition.resolve(table)
            ratio_means[definition.name] = float(
                np.mean(z[rows, i] - z[rows, j])
            )
        profiles.append(
            ClusterProfile(
                label=label,
                member_ids=member_ids,
                mean_clr=mean,
                origin_distance=float(np.linalg.norm(mean)),
                ratio_means=ratio_means,
            )
        )
    return profiles


def assignment_csv(assignment: ClusterAssignment) -> str:
    """CSV rendering: entity_id,cluster_label (entity ids in sorted order)."""
    lines = ["entity_id,cluster_label"]
    for eid in sorted(assignment.labels):
        lines.append(f"{eid},{assignment.labels[eid]}")
    return "\n".join(lines) + "\n"


def merge_history_json(assignment: ClusterAssignment) -> dict:
    """JSON-ready document for the dendrogram and cut."""
    return {
        "linkage": assignment.linkage,
        "cut": assignment.cut,
        "n_clusters": assignment.n_clusters,
        "merges": [
            {"cluster_a": a, "cluster_b": b, "distance": float(dd)}
            for a, b, dd in assignment.merge_history
        ],
    }


def profiles_json(profiles: Sequence[ClusterProfile], part_names: Sequence[str]) -> dict:
    """JSON-ready document for cluster profiles."""
    return {
        "clusters": [
            {
                "label": p.label,
                "members": list(p.member_ids),
                "mean_clr": {
                    name: float(v) for name, v in zip(part_names, p.mean_clr)
                },
                "origin_distance": p.origin_distance,
                "ratio_means": p.ratio_means,
            }
            for p in profiles
        ]
    }
