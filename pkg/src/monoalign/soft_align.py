"""Soft alignment construction and the binarization losses.

The soft alignment is built from pairwise L2 distances between encoded
text and mel feature sequences, softmaxed across the text axis.  The
canonical layout everywhere downstream is frame-major T x N (row t is the
token distribution of frame t); the N x T distance matrix is transposed
exactly once, inside :func:`soft_alignment`.
"""

import numpy as np

from . import align_dp
from .errors import DimensionMismatch, PathUnsupported


def pairwise_l2(text_enc, mel_enc):
    """N x T matrix of Euclidean distances between embedding sequences."""
    phi = np.asarray(text_enc, dtype=np.float64)
    x = np.asarray(mel_enc, dtype=np.float64)
    if phi.ndim != 2 or x.ndim != 2 or phi.shape[1] != x.shape[1]:
        raise DimensionMismatch(
            f"embedding dims differ: {phi.shape} vs {x.shape}"
        )
    diff = phi[:, None, :] - x[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


def soft_alignment(distances):
    """Softmax of -D over the token axis, returned frame-major (T x N)."""
    d = np.asarray(distances, dtype=np.float64)
    neg = -d
    neg = neg - np.max(neg, axis=0, keepdims=True)
    e = np.exp(neg)
    soft = e / np.sum(e, axis=0, keepdims=True)
    return soft.T


def bin_loss(soft, path):
    """Cross-entropy of the hard path under the soft alignment.

    ``-sum_t log soft[t, path[t]]``; zero exactly when the soft alignment
    is one-hot along the path.  Since the one-hot distribution has zero
    entropy this equals the KL divergence from hard to soft, row by row.
    """
    s = np.asarray(soft, dtype=np.float64)
    p = np.asarray(path, dtype=np.int64)
    if p.ndim != 1 or p.size != s.shape[0]:
        raise DimensionMismatch(
            f"path length {p.size} does not match {s.shape[0]} frames"
        )
    if np.any(p < 0) or np.any(p >= s.shape[1]):
        raise DimensionMismatch("path entry outside the token range")
    picked = s[np.arange(p.size), p]
    if np.any(picked <= 0):
        raise PathUnsupported("soft alignment is zero on a path entry")
    return float(-np.sum(np.log(picked))) + 0.0


def align_loss_parallel(soft, bin_weight=1.0):
    """Composite alignment loss for parallel models.

    Runs the forward-sum loss and Viterbi extraction on log(soft), then
    the binarization loss against the Viterbi path.  Returns
    ``(total, forward_sum, bin, path)`` with
    ``total = forward_sum + bin_weight * bin``.
    """
    s = np.asarray(soft, dtype=np.float64)
    with np.errstate(divide="ignore"):
        log_soft = np.log(s)
    forward = align_dp.forward_sum_loss(log_soft)
    path, _ = align_dp.viterbi(log_soft)
    bin_val = bin_loss(s, path)
    total = forward + bin_weight * bin_val
    return total, forward, bin_val, path
