"""Bootstrap perturbation of the training set with out-of-bag test sets."""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .datasets import apply_standardization, standardize
from .decoders import LambdaGrid, _prepare, _solve, predict
from .errors import AllReplicatesDegenerate
from .geometry import normalize
from .parallel import ordered_map


@dataclass(frozen=True)
class Replicate:
    train: np.ndarray   # n indices drawn with replacement
    oob: np.ndarray     # sorted indices absent from ``train``


@dataclass(frozen=True)
class PerturbationPlan:
    n: int
    m: int
    seed: int
    stratified: bool
    replicates: Tuple[Replicate, ...]

    def oob_counts(self):
        """Number of replicates in which each sample is out-of-bag."""
        k = np.zeros(self.n, dtype=int)
        for rep in self.replicates:
            k[rep.oob] += 1
        return k


def replicate_rng(seed, r):
    """Independent generator for replicate ``r``, fixed by ``(seed, r)`` alone."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(r,)))


def make_plan(n, m, seed, labels=None, stratify=True):
    """Draw ``m`` bootstrap training multisets of size ``n``.

    With ``labels`` given and ``stratify`` set, each class is resampled
    separately so every training set keeps the original class counts.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if m < 1:
        raise ValueError("m must be >= 1")
    groups = [np.arange(n)]
    if labels is not None:
        labels = np.asarray(labels)
        if labels.shape != (n,):
            raise ValueError("labels must have length n")
        if stratify:
            groups = [np.flatnonzero(labels == c) for c in (1, -1)]
            groups = [g for g in groups if g.size]
    reps = []
    for r in range(m):
        rng = replicate_rng(seed, r)
        train = np.concatenate([g[rng.integers(0, g.size, g.size)] for g in groups])
        in_bag = np.zeros(n, dtype=bool)
        in_bag[train] = True
        reps.append(Replicate(train, np.flatnonzero(~in_bag)))
    return PerturbationPlan(n, m, seed, bool(labels is not None and stratify), tuple(reps))


@dataclass(frozen=True)
class ReplicateEnsemble:
    """Fitted replicate maps plus their out-of-bag predictions.

    ``maps[j]`` is ``None`` when replicate ``j`` fitted an all-zero weight
    vector; such replicates still vote (+1) in ``oob_predictions``.
    """

    maps: List[Optional[np.ndarray]]
    oob_predictions: List[np.ndarray]
    plan: PerturbationPlan
    lam: float
    converged: Tuple[bool, ...] = ()

    @property
    def valid_maps(self):
        return [v for v in self.maps if v is not None]

    @property
    def m_effective(self):
        return len(self.valid_maps)

    @property
    def degenerate(self):
        return self.m_effective == 0

    def vote_matrix(self):
        """(m, n) int8 array: +1/-1 OOB votes, 0 where a sample was in-bag."""
        votes = np.zeros((self.plan.m, self.plan.n), dtype=np.int8)
        for j, (rep, pred) in enumerate(zip(self.plan.replicates, self.oob_predictions)):
            votes[j, rep.oob] = pred
        return votes


def _fit_replicate(d, rep, lams, standardize_features, tol, max_iter):
    train = d.subset(rep.train)
    X_oob = d.X[rep.oob]
    if standardize_features:
        train, mean, std = standardize(train)
        X_oob = apply_standardization(X_oob, mean, std)
    prepared = _prepare(train.X, train.Y)
    # walk from the largest penalty down; sparse solutions warm-start well
    out = [None] * len(lams)
    theta = None
    for k in sorted(range(len(lams)), key=lambda k: -lams[k]):
        model = _solve(prepared, lams[k], theta, tol, max_iter)
        theta = model.theta
        vec = None if model.is_zero else normalize(model.theta)
        out[k] = (vec, predict(model, X_oob), model.converged)
    return out


def fit_ensembles(d, plan, grid, standardize_features=True, tol=1e-7,
                  max_iter=100_000, threads=None):
    """Fit every replicate of ``plan`` along ``grid``; one ensemble per penalty.

    Replicates run on a thread pool; results are assembled in replicate
    order so the output does not depend on the number of threads.
    """
    if plan.n != d.n:
        raise ValueError(f"plan is for n={plan.n}, dataset has n={d.n}")
    lams = list(LambdaGrid(grid))
    per_rep = ordered_map(
        lambda rep: _fit_replicate(d, rep, lams, standardize_features, tol, max_iter),
        plan.replicates, threads)
    ensembles = []
    for k, lam in enumerate(lams):
        rows = [fits[k] for fits in per_rep]
        ensembles.append(ReplicateEnsemble(
            maps=[r[0] for r in rows],
            oob_predictions=[r[1] for r in rows],
            plan=plan,
            lam=lam,
            converged=tuple(r[2] for r in rows),
        ))
    return ensembles


def fit_ensemble(d, plan, lam, standardize_features=True, tol=1e-7,
                 max_iter=100_000, threads=None):
    """Bootstrap ensemble for a single penalty.

    Raises :class:`AllReplicatesDegenerate` if every replicate map is zero.
    """
    ens = fit_ensembles(d, plan, [lam], standardize_features, tol, max_iter, threads)[0]
    if ens.degenerate:
        raise AllReplicatesDegenerate(f"all {plan.m} replicate maps are zero at lam={lam:g}")
    return ens
