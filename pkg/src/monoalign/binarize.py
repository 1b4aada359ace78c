"""Monotonic-argmax binarization of attention maps and duration extraction."""

import warnings

import numpy as np

from . import align_dp
from .errors import IncompleteCoverage, InvalidPath


def monotonic_argmax(attn):
    """Greedy monotonic binarization of a soft attention matrix.

    Walks frames left to right holding a token cursor; the cursor advances
    by one whenever the next token's attention strictly exceeds the
    current token's.  Ties hold the current token.  If the pass ends
    before the last token an IncompleteCoverage warning is emitted and the
    trailing tokens receive zero duration.
    """
    a = np.asarray(attn, dtype=np.float64)
    t_len, n = a.shape
    path = np.empty(t_len, dtype=np.int64)
    i = 0
    for t in range(t_len):
        if i < n - 1 and a[t, i + 1] > a[t, i]:
            i += 1
        path[t] = i
    if i < n - 1:
        warnings.warn(
            f"monotonic argmax stopped at token {i} of {n}",
            IncompleteCoverage,
            stacklevel=2,
        )
    return path


def durations_from_hard(path, n_tokens):
    """Per-token frame counts of a monotonic path; counts sum to T."""
    p = np.asarray(path)
    if p.ndim != 1 or p.size == 0:
        raise InvalidPath("path must be a nonempty 1-D sequence")
    p = p.astype(np.int64)
    if np.any(p < 0) or np.any(p >= n_tokens):
        raise InvalidPath(f"path entries must lie in [0, {n_tokens - 1}]")
    steps = np.diff(p)
    if np.any(steps < 0):
        raise InvalidPath("path moves backward")
    return np.bincount(p, minlength=n_tokens).astype(np.int64)


def durations_to_path(durations):
    """Expand per-token frame counts back into a monotonic path."""
    d = np.asarray(durations, dtype=np.int64)
    return np.repeat(np.arange(d.size), d)


def viterbi_durations(log_probs):
    """Durations of the Viterbi path; every count >= 1 when T >= N."""
    path, _ = align_dp.viterbi(log_probs)
    return durations_from_hard(path, np.asarray(log_probs).shape[1])
