"""Static beta-binomial attention prior over token slots.

Each mel frame gets a beta-binomial distribution across the N token slots
whose shape parameters sweep with the frame index, producing a band that
is wide near the utterance center and pinched at the corners.  A width
factor omega controls the band: lower omega, wider band.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import betaln

from .errors import DomainError, NoValidPath, ShapeMismatch


@dataclass(frozen=True)
class PriorConfig:
    n_tokens: int
    n_frames: int
    omega: float = 1.0

    def __post_init__(self):
        if self.n_tokens < 1 or self.n_frames < 1:
            raise DomainError("n_tokens and n_frames must be >= 1")
        if not self.omega > 0:
            raise DomainError(f"omega must be positive, got {self.omega}")


def _log_binom(n, k):
    # log C(n, k) written through betaln so the beta terms cancel exactly
    # in the uniform (alpha = beta = 1) case
    return -np.log(n + 1) - betaln(n - k + 1, k + 1)


def beta_binomial_pmf(k, n, alpha, beta):
    """Beta-binomial pmf C(n,k) B(k+alpha, n-k+beta) / B(alpha, beta).

    Evaluated through log-gamma so large n and extreme shape parameters
    stay stable; sums to 1 over k = 0..n.
    """
    k = np.asarray(k)
    if np.any(k < 0) or np.any(k > n):
        raise DomainError(f"k must lie in [0, {n}]")
    if not (alpha > 0 and beta > 0):
        raise DomainError("alpha and beta must be positive")
    log_pmf = (
        _log_binom(n, k)
        + betaln(k + alpha, n - k + beta)
        - betaln(alpha, beta)
    )
    return np.exp(log_pmf) if k.ndim else float(np.exp(log_pmf))


def build_prior(config):
    """T x N prior matrix; row t is beta-binomial over the N token slots.

    Frame index is 1-based in the shape-parameter sweep: row t uses
    alpha = omega * t and beta = omega * (T - t + 1), with support N - 1 so
    each row has exactly one bin per token.  Rows sum to 1.
    """
    n, t_len, omega = config.n_tokens, config.n_frames, config.omega
    k = np.arange(n)
    frames = np.arange(1, t_len + 1)[:, None]
    alpha = omega * frames
    beta = omega * (t_len - frames + 1)
    log_pmf = (
        _log_binom(n - 1, k)[None, :]
        + betaln(k[None, :] + alpha, (n - 1 - k)[None, :] + beta)
        - betaln(alpha, beta)
    )
    return np.exp(log_pmf)


def apply_prior(log_probs, prior, renormalize=True):
    """Add the log-prior to a log-potential matrix (Hadamard in prob space).

    Cells where the prior is exactly zero become -inf.  With renormalize
    the rows are log-softmaxed back into proper log-distributions, which
    is what downstream forward-sum consumers want.
    """
    lp = np.asarray(log_probs, dtype=np.float64)
    pr = np.asarray(prior, dtype=np.float64)
    if lp.shape != pr.shape:
        raise ShapeMismatch(
            f"log_probs {lp.shape} and prior {pr.shape} shapes differ"
        )
    with np.errstate(divide="ignore"):
        out = lp + np.log(pr)
    if renormalize:
        row_max = np.max(out, axis=1, keepdims=True)
        if np.any(np.isneginf(row_max)):
            raise NoValidPath("a row has zero total mass after the prior")
        out = out - (
            row_max
            + np.log(np.sum(np.exp(out - row_max), axis=1, keepdims=True))
        )
    return out
