"""Hyper-parameter selection by accuracy and interpretability.

The score combines interpretability ``eta`` and accuracy ``delta``::

    zeta = (w1 * eta + w2 * delta) / (w1 + w2)   if delta >= kappa
    zeta = 0                                      otherwise
"""

from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from .datasets import GroundTruth, standardize
from .decoders import DEFAULT_GRID, LambdaGrid
from .errors import DomainError
from .geometry import normalize
from .metrics import EXACT, HEURISTIC, cerf_brain_map, full_report
from .performance import bias_variance
from .resampling import fit_ensembles, make_plan

CHANCE_DELTA = 0.5


@dataclass(frozen=True)
class SelectionConfig:
    omega1: float = 1.0
    omega2: float = 1.0
    kappa: float = 0.6
    grid: Tuple[float, ...] = DEFAULT_GRID
    m: int = 50
    seed: int = 0
    mode: str = EXACT
    stratify: bool = True
    standardize: bool = True
    threads: Optional[int] = None
    tol: float = 1e-7
    max_iter: int = 100_000

    def __post_init__(self):
        if self.omega1 < 0 or self.omega2 < 0 or self.omega1 + self.omega2 <= 0:
            raise ValueError("omega1, omega2 must be >= 0 with a positive sum")
        if not 0.0 <= self.kappa <= 1.0:
            raise ValueError("kappa must lie in [0, 1]")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.mode not in (EXACT, HEURISTIC):
            raise ValueError(f"mode must be {EXACT!r} or {HEURISTIC!r}")
        object.__setattr__(self, "grid", tuple(LambdaGrid(self.grid)))


def zeta(eta, delta, cfg=None):
    cfg = cfg or SelectionConfig()
    for name, x in (("eta", eta), ("delta", delta)):
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"{name}={x!r} is outside [0, 1]")
    if delta < cfg.kappa:
        return 0.0
    return (cfg.omega1 * eta + cfg.omega2 * delta) / (cfg.omega1 + cfg.omega2)


def pareto_front(points):
    """Indices of points not strictly dominated in both (delta, eta).

    Sorted by ascending delta (index breaks ties).
    """
    pts = [(float(a), float(b)) for a, b in points]
    if not pts:
        raise ValueError("no points")
    keep = [i for i, (d, e) in enumerate(pts)
            if not any(d2 > d and e2 > e for d2, e2 in pts)]
    return sorted(keep, key=lambda i: (pts[i][0], i))


@dataclass(frozen=True)
class LambdaResult:
    lam: float
    delta: float
    eta: float
    zeta: float
    psi: float
    beta: float
    bias: float
    variance_net: float
    variance_unbiased: float
    variance_biased: float
    epe: float
    m_effective: int
    decomposition_residual: float
    beta_exact: Optional[float] = None
    eta_exact: Optional[float] = None
    beta_tilde: Optional[float] = None
    eta_tilde: Optional[float] = None
    delta_beta: Optional[float] = None
    beta_envelope: Optional[Tuple[float, float]] = None
    eta_envelope: Optional[Tuple[float, float]] = None
    mean_oob_loss: float = 0.0
    main_map: Optional[np.ndarray] = None
    flags: Tuple[str, ...] = ()


@dataclass(frozen=True)
class SelectionResult:
    per_lambda: List[LambdaResult]
    best_by_delta: float
    best_by_zeta: float
    pareto_front: List[float]
    mode: str
    config: SelectionConfig
    flags: Tuple[str, ...] = field(default=())

    def row(self, lam):
        for r in self.per_lambda:
            if r.lam == lam:
                return r
        raise KeyError(lam)


def _argmax_smallest(values):
    # np.argmax returns the first maximum; the grid is ascending
    return int(np.argmax(np.asarray(values)))


def decoding_space(d, truth, cfg):
    """Dataset and references expressed in the space the decoders see.

    A raw-space weight vector ``w`` acts on standardized features as
    ``w * std``, so references are rescaled that way and renormalized.
    The heuristic reference is always recomputed from the data.
    """
    if cfg.standardize:
        d_dec, _, std = standardize(d)
        scale = np.where(std > 0, std, 0.0)
    else:
        d_dec, scale = d, np.ones(d.p)
    star = None
    if truth is not None and truth.theta_star is not None:
        star = normalize(np.asarray(truth.theta_star) * scale)
    cerf = cerf_brain_map(d_dec, standardize_features=False)
    return d_dec, GroundTruth(theta_star=star, cerf_reference=cerf,
                              layout=truth.layout if truth is not None else d.layout)


def select(d, truth, cfg=None):
    """Grid search over the Lasso penalty scored by accuracy and interpretability.

    All penalties share one bootstrap plan so their differences are not
    confounded with resampling noise. Penalties where every replicate map
    is zero get ``delta = 0.5`` (chance), ``zeta = 0`` and a flag.
    """
    cfg = cfg or SelectionConfig()
    if cfg.mode == EXACT and (truth is None or truth.theta_star is None):
        raise ValueError("exact mode needs a ground-truth theta_star")
    d_dec, ref = decoding_space(d, truth, cfg)
    plan = make_plan(d.n, cfg.m, cfg.seed, labels=d.Y, stratify=cfg.stratify)
    # per-replicate standardization on top of the global one keeps OOB
    # samples out of the scaling fitted on each training multiset
    ensembles = fit_ensembles(d_dec, plan, cfg.grid, standardize_features=cfg.standardize,
                              tol=cfg.tol, max_iter=cfg.max_iter, threads=cfg.threads)

    rows = []
    for ens in ensembles:
        perf = bias_variance(ens, d.Y)
        flags = []
        if not all(ens.converged):
            flags.append("not_converged")
        if perf.n_uncovered:
            flags.append("uncovered_samples")
        if ens.degenerate:
            flags.append("all_replicates_degenerate")
            rows.append(LambdaResult(
                lam=ens.lam, delta=CHANCE_DELTA, eta=0.0, zeta=0.0, psi=0.0, beta=0.0,
                bias=perf.bias, variance_net=perf.variance_net,
                variance_unbiased=perf.variance_unbiased,
                variance_biased=perf.variance_biased, epe=perf.epe, m_effective=0,
                decomposition_residual=0.0, mean_oob_loss=perf.mean_oob_loss,
                flags=tuple(flags)))
            continue
        if ens.m_effective < cfg.m:
            flags.append("some_replicates_degenerate")
        rep = full_report(ens, ref, mode=cfg.mode)
        delta = min(max(perf.delta, 0.0), 1.0)
        rows.append(LambdaResult(
            lam=ens.lam, delta=delta, eta=rep.eta, zeta=zeta(min(rep.eta, 1.0), delta, cfg),
            psi=rep.psi, beta=rep.beta, bias=perf.bias, variance_net=perf.variance_net,
            variance_unbiased=perf.variance_unbiased, variance_biased=perf.variance_biased,
            epe=perf.epe, m_effective=rep.m_effective,
            decomposition_residual=rep.decomposition_residual,
            beta_exact=rep.beta_exact, eta_exact=rep.eta_exact,
            beta_tilde=rep.beta_tilde, eta_tilde=rep.eta_tilde, delta_beta=rep.delta_beta,
            beta_envelope=rep.beta_envelope, eta_envelope=rep.eta_envelope,
            mean_oob_loss=perf.mean_oob_loss,
            main_map=normalize(np.sum(ens.valid_maps, axis=0)),
            flags=tuple(flags)))

    i_delta = _argmax_smallest([r.delta for r in rows])
    i_zeta = _argmax_smallest([r.zeta for r in rows])
    front = pareto_front([(r.delta, r.eta) for r in rows])
    flags = () if i_zeta in front else ("best_by_zeta_dominated",)
    return SelectionResult(
        per_lambda=rows,
        best_by_delta=rows[i_delta].lam,
        best_by_zeta=rows[i_zeta].lam,
        pareto_front=[rows[i].lam for i in front],
        mode=cfg.mode,
        config=cfg,
        flags=flags,
    )


TABLE1_GRID = (0.0, 0.001, 0.01, 0.1, 1.0, 10.0, 50.0, 100.0, 250.0, 500.0, 1000.0)


def table1_config(**overrides):
    """Settings for the two-dimensional toy experiment (raw features)."""
    base = SelectionConfig(grid=TABLE1_GRID, mode=EXACT, standardize=False)
    return replace(base, **overrides)
