"""Out-of-bag bias/variance decomposition of the 0/1 loss.

For each sample i that is out-of-bag in k_i > 0 replicates:

* main prediction: majority of its k_i OOB votes, ties go to +1;
* bias B_i = 1 if the main prediction is wrong;
* unbiased variance: fraction of votes that disagree with a correct
  main prediction; biased variance: fraction that disagree with a wrong one.

Per-sample terms are averaged over that sample's k_i votes, then over
samples, so that ``mean OOB loss == bias + (V_u - V_b)`` holds exactly.
"""

from dataclasses import asdict, dataclass

import numpy as np

from .errors import NoCoverage


@dataclass(frozen=True)
class PerformanceReport:
    delta: float
    epe: float
    bias: float
    variance_net: float
    variance_unbiased: float
    variance_biased: float
    mean_oob_loss: float
    coverage: np.ndarray
    n_uncovered: int

    def to_dict(self):
        d = asdict(self)
        d["coverage"] = [int(k) for k in self.coverage]
        return d


def _votes(ensemble_or_votes):
    if hasattr(ensemble_or_votes, "vote_matrix"):
        return ensemble_or_votes.vote_matrix()
    return np.asarray(ensemble_or_votes, dtype=np.int8)


def main_prediction(ensemble):
    """Per-sample majority of OOB votes (+1 on ties); 0 where never OOB.

    Accepts a :class:`ReplicateEnsemble` or an (m, n) vote matrix with
    entries +1/-1 and 0 for "not out-of-bag".
    """
    votes = _votes(ensemble)
    k = np.count_nonzero(votes, axis=0)
    if not k.any():
        raise NoCoverage("no sample is out-of-bag in any replicate")
    plus = np.count_nonzero(votes == 1, axis=0)
    main = np.where(2 * plus >= k, 1, -1).astype(np.int8)
    main[k == 0] = 0
    return main


def bias_variance(ensemble, Y):
    """Bias, net variance and expected prediction error from OOB votes."""
    votes = _votes(ensemble)
    Y = np.asarray(Y)
    main = main_prediction(votes)
    k = np.count_nonzero(votes, axis=0)
    covered = k > 0
    v = votes[:, covered]
    y = Y[covered].astype(np.int8)
    mu = main[covered]
    kc = k[covered].astype(float)

    bias_i = (mu != y).astype(float)
    disagree = np.count_nonzero((v != 0) & (v != mu), axis=0) / kc
    vu_i = np.where(bias_i == 0, disagree, 0.0)
    vb_i = np.where(bias_i == 1, disagree, 0.0)
    loss_i = np.count_nonzero((v != 0) & (v != y), axis=0) / kc

    bias = float(bias_i.mean())
    vu = float(vu_i.mean())
    vb = float(vb_i.mean())
    var_net = float((vu_i - vb_i).mean())
    epe = bias + var_net
    return PerformanceReport(
        delta=1.0 - epe, epe=epe, bias=bias, variance_net=var_net,
        variance_unbiased=vu, variance_biased=vb,
        mean_oob_loss=float(loss_i.mean()),
        coverage=k, n_uncovered=int((~covered).sum()),
    )
