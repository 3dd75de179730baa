"""Interpretability of an ensemble of weight maps.

Given replicate maps (unit vectors) and a reference direction:

* main map: renormalized sum of the replicate maps;
* reproducibility ``psi``: mean cosine of each map to the main map;
* representativeness ``beta``: |cosine| of the main map to the reference;
* interpretability ``eta``: |mean cosine| of the maps to the reference.

With the true direction as reference the values are exact; with the
class-mean contrast (cERF) they are heuristic estimates, reported as
``beta_tilde`` / ``eta_tilde``. ``delta_beta`` is the |cosine| between
the two references and bounds the gap between exact and heuristic values.
"""

from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np

from .datasets import standardize
from .errors import DimensionMismatch, DomainError, EmptyInput
from .geometry import cosine_similarity, normalize

EXACT = "exact"
HEURISTIC = "heuristic"


def _stack(maps):
    maps = [m for m in maps if m is not None]
    if not maps:
        raise EmptyInput("no non-degenerate maps")
    arr = np.vstack([np.asarray(m, dtype=float) for m in maps])
    return arr


def main_map(maps):
    """Renormalized elementwise sum of the maps; ``None`` entries are skipped."""
    return normalize(_stack(maps).sum(axis=0))


def reproducibility(maps):
    arr = _stack(maps)
    mu = normalize(arr.sum(axis=0))
    return float(np.mean(np.clip(arr @ mu, -1.0, 1.0)))


def representativeness(main, reference):
    return abs(cosine_similarity(main, reference))


def _signed_interpretability(maps, reference):
    arr = _stack(maps)
    reference = np.asarray(reference, dtype=float)
    if arr.shape[1] != reference.shape[0]:
        raise DimensionMismatch(f"maps have p={arr.shape[1]}, reference has p={reference.shape[0]}")
    return float(np.mean(np.clip(arr @ reference, -1.0, 1.0)))


def interpretability(maps, reference):
    """|mean cosine| between the maps and the reference."""
    return abs(_signed_interpretability(maps, reference))


def cerf_brain_map(d, standardize_features=True):
    """Normalized difference of the class means (contrast ERF).

    Computed on standardized features by default so it lives in the same
    space as decoders fitted on standardized data.
    """
    if standardize_features:
        d = standardize(d)[0]
    pos = d.Y == 1
    if pos.all() or not pos.any():
        raise ValueError("both classes must be present")
    return normalize(d.X[pos].mean(axis=0) - d.X[~pos].mean(axis=0))


def haufe_pattern(d, model):
    """Activation pattern ``cov(X) @ theta`` of a linear decoder, normalized.

    ``d`` must be the (already standardized) data the model was fitted on.
    On centered features the least-squares pattern is the class-mean
    difference, i.e. the cERF map.
    """
    theta = getattr(model, "theta", model)
    Xc = d.X - d.X.mean(axis=0)
    cov = Xc.T @ Xc / d.n
    return normalize(cov @ theta)


def _check_unit_interval(name, x):
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"{name}={x!r} is outside [0, 1]")


def beta_envelope(beta_tilde, delta_beta):
    """Range of the exact representativeness given its heuristic estimate."""
    _check_unit_interval("beta_tilde", beta_tilde)
    _check_unit_interval("delta_beta", delta_beta)
    center = delta_beta * beta_tilde
    half = np.sqrt((1.0 - beta_tilde ** 2) * (1.0 - delta_beta ** 2))
    return max(0.0, center - half), min(1.0, center + half)


def eta_envelope(gammas, delta_beta):
    """Range of the exact interpretability given per-map angles to the cERF.

    ``gammas`` are the angles (radians, in [0, pi]) between each replicate
    map and the heuristic reference.
    """
    _check_unit_interval("delta_beta", delta_beta)
    gammas = np.asarray(gammas, dtype=float)
    if gammas.size == 0:
        raise EmptyInput("no angles")
    if np.any(gammas < 0) or np.any(gammas > np.pi):
        raise DomainError("angles must lie in [0, pi]")
    center = delta_beta * np.mean(np.cos(gammas))
    half = np.sqrt(1.0 - delta_beta ** 2) * np.mean(np.sin(gammas))
    return float(np.clip(center - half, 0.0, 1.0)), float(np.clip(center + half, 0.0, 1.0))


@dataclass(frozen=True)
class MetricsReport:
    psi: float
    beta: float
    eta: float
    mode: str
    decomposition_residual: float
    m_effective: int
    beta_exact: Optional[float] = None
    eta_exact: Optional[float] = None
    beta_tilde: Optional[float] = None
    eta_tilde: Optional[float] = None
    delta_beta: Optional[float] = None
    beta_envelope: Optional[Tuple[float, float]] = None
    eta_envelope: Optional[Tuple[float, float]] = None
    signed_eta: float = 0.0
    signed_beta: float = 0.0

    def to_dict(self):
        return asdict(self)


def _oriented(maps, reference):
    """Flip ``reference`` so the mean cosine of the maps to it is >= 0."""
    return reference if _signed_interpretability(maps, reference) >= 0 else -reference


def full_report(ensemble, truth, mode=None):
    """Reproducibility, representativeness and interpretability of an ensemble.

    ``truth.theta_star`` serves as the exact reference and
    ``truth.cerf_reference`` as the heuristic one; both must already be
    expressed in the feature space the maps live in. ``mode`` defaults to
    exact when ``theta_star`` is available. When both references are
    present, ``delta_beta`` and the two envelopes are filled in.
    """
    maps = ensemble.valid_maps if hasattr(ensemble, "valid_maps") else [m for m in ensemble if m is not None]
    star = truth.theta_star
    cerf = truth.cerf_reference
    if mode is None:
        mode = EXACT if star is not None else HEURISTIC
    if mode not in (EXACT, HEURISTIC):
        raise ValueError(f"unknown mode {mode!r}")
    ref = star if mode == EXACT else cerf
    if ref is None:
        raise ValueError(f"{mode} mode needs a {'theta_star' if mode == EXACT else 'cerf_reference'}")

    arr = _stack(maps)
    mu = normalize(arr.sum(axis=0))
    psi = float(np.mean(np.clip(arr @ mu, -1.0, 1.0)))

    def pair(reference):
        signed_b = cosine_similarity(mu, reference)
        signed_e = _signed_interpretability(arr, reference)
        return abs(signed_b), abs(signed_e), signed_b, signed_e

    beta, eta, sb, se = pair(ref)
    extra = {}
    if star is not None:
        extra["beta_exact"], extra["eta_exact"] = pair(star)[:2]
    if cerf is not None:
        extra["beta_tilde"], extra["eta_tilde"] = pair(cerf)[:2]
    if star is not None and cerf is not None:
        cerf_o = _oriented(arr, cerf)
        db = abs(cosine_similarity(star, cerf_o))
        gammas = np.arccos(np.clip(arr @ cerf_o, -1.0, 1.0))
        extra["delta_beta"] = db
        extra["beta_envelope"] = beta_envelope(extra["beta_tilde"], db)
        extra["eta_envelope"] = eta_envelope(gammas, db)

    return MetricsReport(
        psi=psi, beta=beta, eta=eta, mode=mode,
        decomposition_residual=eta - beta * psi,
        m_effective=arr.shape[0],
        signed_eta=se, signed_beta=sb,
        **extra,
    )
