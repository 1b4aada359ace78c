"""Monotonic speech-text alignment toolkit.

Numerical machinery for learning and evaluating monotonic alignments
between mel-spectrogram frames and text tokens: forward-sum likelihood
and gradient, Viterbi hard-alignment extraction, a static beta-binomial
attention prior, soft-alignment losses, duration extraction, and
DTW-based mel-cepstral evaluation.
"""

from .align_dp import (
    forward_sum_grad,
    forward_sum_loss,
    hard_to_onehot,
    posteriors,
    viterbi,
)
from .binarize import durations_from_hard, durations_to_path, monotonic_argmax
from .metrics import dtw, duration_l1, mcd, mel_to_cepstrum
from .prior import PriorConfig, apply_prior, beta_binomial_pmf, build_prior
from .soft_align import (
    align_loss_parallel,
    bin_loss,
    pairwise_l2,
    soft_alignment,
)

__all__ = [
    "forward_sum_loss",
    "forward_sum_grad",
    "posteriors",
    "viterbi",
    "hard_to_onehot",
    "beta_binomial_pmf",
    "build_prior",
    "apply_prior",
    "PriorConfig",
    "pairwise_l2",
    "soft_alignment",
    "bin_loss",
    "align_loss_parallel",
    "monotonic_argmax",
    "durations_from_hard",
    "durations_to_path",
    "mel_to_cepstrum",
    "dtw",
    "mcd",
    "duration_l1",
]

__version__ = "0.1.0"
