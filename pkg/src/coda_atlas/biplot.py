"""Principal-component biplot of the centred CLR matrix.

The model is the thin SVD of the column-centred CLR matrix Z = U S V^T.
Entity points are U_k S_k^alpha and indicator rays V_k S_k^(1-alpha):
alpha=1 is the form biplot (distances between points approximate Aitchison
distances), alpha=0 the covariance biplot (ray geometry approximates the CLR
covariance structure). The segment joining two ray extremes is a link; the
orthogonal projection of the points onto a link ranks the entities by the
pairwise log-ratio of the two parts, and the score formula
sum_m U_rm s_m (V_im - V_jm) is independent of alpha, so rankings agree
across scalings.

Because CLR rows sum to zero and columns are centred, Z has rank at most
min(n-1, D-1); the model keeps exactly that many components.

Output is deterministic: no randomized algorithms, and each right-singular
vector is oriented so that its largest-magnitude coordinate is positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import kendalltau

from .composition import ClrMatrix
from .errors import (
    DegenerateLink,
    DegenerateVariance,
    IndexOutOfRange,
    InvalidOptions,
    RankRequestTooLarge,
    SamePart,
    SvdFailure,
    TooFewRows,
)
from ._fmt import dumps_json, fmt_float

#: Relative spread below which a score/log-ratio series counts as constant.
_CONSTANT_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class BiplotModel:
    """Fitted biplot: entity points, indicator rays and the retained spectrum.

    ``singular_values`` and ``explained`` cover all min(n-1, D-1) components
    regardless of the retained rank k. ``centered`` keeps the full centred
    CLR matrix so exact log-ratios stay available for ranking fidelity; it is
    not part of the serialized document.
    """

    alpha: float
    k: int
    points: np.ndarray
    rays: np.ndarray
    singular_values: np.ndarray
    explained: np.ndarray
    column_means: np.ndarray
    entity_ids: tuple[str, ...]
    part_names: tuple[str, ...]
    centered: np.ndarray

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def D(self) -> int:
        return self.rays.shape[0]


@dataclass(frozen=True)
class Link:
    """Segment joining two ray extremes; its direction encodes ln(x_i/x_j)."""

    part_i: int
    part_j: int
    direction: np.ndarray
    degenerate: bool
    label: str = ""


@dataclass(frozen=True, eq=False)
class RankingResult:
    """Entities ordered by projection score along a link.

    ``scores`` and ``exact_log_ratios`` are in table order; ``ordering``
    holds entity ids sorted by descending score with ties broken by
    ascending entity id. ``fidelity`` is the Pearson correlation between
    scores and the exact centred log-ratios, ``rank_agreement`` their
    Kendall tau.
    """

    link: Link
    ordering: tuple[str, ...]
    scores: np.ndarray
    exact_log_ratios: np.ndarray
    fidelity: float
    rank_agreement: float
    entity_ids: tuple[str, ...]


def center_columns(clr: ClrMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Column-centre a CLR matrix; returns (centered, column_means)."""
    if clr.n < 2:
        raise TooFewRows(f"centering needs n >= 2, got {clr.n}")
    means = clr.values.mean(axis=0)
    return clr.values - means, means


def singular_spectrum(clr: ClrMatrix) -> np.ndarray:
    """All thin-SVD singular values of the centred CLR matrix (length min(n, D)).

    The production decomposition behind :func:`fit_biplot`, exposed for
    diagnostics; the trailing values past min(n-1, D-1) are structural zeros.
    """
    centered, _ = center_columns(clr)
    try:
        return np.linalg.svd(centered, compute_uv=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise SvdFailure(str(exc)) from exc


def fit_biplot(clr: ClrMatrix, alpha: float = 1.0, k: int = 2) -> BiplotModel:
    """Fit the rank-k biplot model of a CLR matrix.

    Parameters
    ----------
    clr : ClrMatrix
        Row-wise CLR of a validated table (n >= 3).
    alpha : float in [0, 1]
        Singular-value split between points and rays; 1 = form biplot
        (default), 0 = covariance biplot. Rankings are alpha-invariant.
    k : int
        Retained rank, at most min(n-1, D-1); 2 for the standard display.

    Raises
    ------
    TooFewRows, RankRequestTooLarge, DegenerateVariance, SvdFailure
    """
    n, D = clr.n, clr.D
    if n < 3:
        raise TooFewRows(f"biplot needs n >= 3, got {n}")
    if not 0.0 <= alpha <= 1.0:
        raise InvalidOptions(f"alpha must be in [0, 1], got {alpha}")
    m = min(n - 1, D - 1)
    if not 1 <= k <= m:
        raise RankRequestTooLarge(f"k={k} not in [1, min(n-1, D-1)={m}]")

    centered, column_means = center_columns(clr)
    try:
        u, s, vt = np.linalg.svd(centered, full_matrices=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise SvdFailure(str(exc)) from exc

    if s[0] <= 1e-12 * max(1.0, float(np.linalg.norm(clr.values))):
        raise DegenerateVariance("all rows carry the same composition")

    # Deterministic orientation: largest-magnitude loading of each component
    # is made positive (the first such coordinate decides on exact ties).
    for comp in range(m):
        lead = int(np.argmax(np.abs(vt[comp])))
        if vt[comp, lead] < 0.0:
            vt[comp] = -vt[comp]
            u[:, comp] = -u[:, comp]

    s_m = s[:m]
    s2 = s_m**2
    explained = s2 / s2.sum()
    points = u[:, :k] * s_m[:k] ** alpha
    rays = vt[:k].T * s_m[:k] ** (1.0 - alpha)

    def frozen(a: np.ndarray) -> np.ndarray:
        a = np.ascontiguousarray(a)
        a.setflags(write=False)
        return a

    return BiplotModel(
        alpha=float(alpha),
        k=int(k),
        points=frozen(points),
        rays=frozen(rays),
        singular_values=frozen(s_m),
        explained=frozen(explained),
        column_means=frozen(column_means),
        entity_ids=clr.entity_ids,
        part_names=clr.part_names,
        centered=frozen(centered),
    )


def make_link(model: BiplotModel, part_i: int, part_j: int, label: str = "") -> Link:
    """Link between the extremes of two rays: direction = rays[i] - rays[j].

    A near-zero direction (coincident rays) is flagged degenerate, not
    rejected; ranking along a degenerate link is refused downstream.
    """
    if part_i == part_j:
        raise SamePart(f"part_i == part_j == {part_i}")
    D = model.D
    if not (0 <= part_i < D and 0 <= part_j < D):
        raise IndexOutOfRange(f"part indices ({part_i}, {part_j}) out of range for D={D}")
    direction = model.rays[part_i] - model.rays[part_j]
    max_norm = float(np.max(np.linalg.norm(model.rays, axis=1)))
    degenerate = float(np.linalg.norm(direction)) < 1e-12 * max(max_norm, 1e-300)
    return Link(
        part_i=part_i,
        part_j=part_j,
        direction=direction,
        degenerate=degenerate,
        label=label,
    )


def _is_constant(v: np.ndarray) -> bool:
    spread = float(v.max() - v.min())
    return spread <= _CONSTANT_RTOL * max(1.0, float(np.max(np.abs(v))))


def rank_along_link(model: BiplotModel, link: Link) -> RankingResult:
    """Order entities by orthogonal projection onto a link.

    The score of entity r is points[r] . direction, the projection parameter
    along the link up to a positive affine map; distance to the link does not
    enter. Exact centred pairwise log-ratios come from the full CLR matrix,
    and fidelity/rank_agreement measure how faithfully the rank-k projection
    reproduces them (exactly 1 at full compositional rank).
    """
    if link.degenerate:
        raise DegenerateLink(f"parts ({link.part_i}, {link.part_j}) have coincident rays")
    scores = model.points @ link.direction
    exact = model.centered[:, link.part_i] - model.centered[:, link.part_j]

    order = sorted(range(model.n), key=lambda r: (-scores[r], model.entity_ids[r]))
    ordering = tuple(model.entity_ids[r] for r in order)

    score_const, exact_const = _is_constant(scores), _is_constant(exact)
    if score_const or exact_const:
        # Degenerate agreement: both flat means the projection is trivially
        # faithful; one-sided flatness means no association.
        fidelity = 1.0 if (score_const and exact_const) else 0.0
        rank_agreement = fidelity
    else:
        fidelity = float(np.corrcoef(scores, exact)[0, 1])
        rank_agreement = float(kendalltau(scores, exact).statistic)

    return RankingResult(
        link=link,
        ordering=ordering,
        scores=scores,
        exact_log_ratios=exact,
        fidelity=fidelity,
        rank_agreement=rank_agreement,
        entity_ids=model.entity_ids,
    )


def reconstruct(model: BiplotModel) -> np.ndarray:
    """points @ rays^T: the rank-k approximation of the centred CLR matrix.

    At k = min(n-1, D-1) this recovers the centred matrix; below that the
    Frobenius residual is sqrt(sum of the squared dropped singular values).
    """
    return model.points @ model.rays.T


def model_to_json(model: BiplotModel) -> str:
    """Serialize the fitted model to its JSON document (17 significant digits)."""
    doc = {
        "alpha": model.alpha,
        "k": model.k,
        "singular_values": [float(s) for s in model.singular_values],
        "explained": [float(e) for e in model.explained],
        "column_means": [float(c) for c in model.column_means],
        "points": [
            {"id": eid, "coords": [float(x) for x in model.points[r]]}
            for r, eid in enumerate(model.entity_ids)
        ],
        "rays": [
            {"part": name, "coords": [float(x) for x in model.rays[d]]}
            for d, name in enumerate(model.part_names)
        ],
    }
    return dumps_json(doc)


def ranking_csv(result: RankingResult) -> str:
    """CSV rendering of a ranking: entity_id,score,exact_log_ratio,rank.

    Rows follow the ranking order, so rank runs 1..n top-down.
    """
    pos = {eid: r for r, eid in enumerate(result.entity_ids)}
    lines = ["entity_id,score,exact_log_ratio,rank"]
    for rank, eid in enumerate(result.ordering, start=1):
        r = pos[eid]
        lines.append(
            ",".join(
                [
                    eid,
                    fmt_float(float(result.scores[r])),
                    fmt_float(float(result.exact_log_ratios[r])),
                    str(rank),
                ]
            )
        )
    return "\n".join(lines) + "\n"
