"""Evaluation metrics: DTW-aligned mel-cepstral distance and duration L1.

MCD conventions (the literature varies, so they are fixed here and must be
held constant across compared models): per-pair distance
``(10 / ln 10) * sqrt(2 * sum_k (dc_k)^2)`` with the energy coefficient c0
excluded, 13 coefficients by default, averaged over DTW path pairs rather
than reference frames.
"""

import numpy as np
from scipy.fft import dct

from .errors import DimensionMismatch, LengthMismatch

MCD_SCALE = 10.0 / np.log(10.0)

# backtracking preference on cost ties: diagonal, then vertical (advance
# ref), then horizontal (advance hyp)
_STEPS = ((1, 1), (1, 0), (0, 1))


def mel_to_cepstrum(mel, n_coeffs=13):
    """Orthonormal DCT-II cepstrum of log-mel frames, coefficients 1..K.

    Coefficient 0 (overall frame energy) is dropped, so a constant frame
    maps to the zero vector.
    """
    m = np.asarray(mel, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionMismatch("mel must be a T x M matrix")
    if n_coeffs >= m.shape[1]:
        raise DimensionMismatch(
            f"need n_coeffs < n_channels, got {n_coeffs} >= {m.shape[1]}"
        )
    ceps = dct(m, type=2, norm="ortho", axis=1)
    return ceps[:, 1 : n_coeffs + 1]


def dtw(ref, hyp):
    """Minimal-cost monotonic correspondence under Euclidean local cost.

    Steps are (1,0), (0,1) and (1,1) over (ref, hyp) indices from (0,0) to
    the final pair; returns ``(pairs, total_cost)`` where cost is the sum
    of local costs along the path.
    """
    r = np.asarray(ref, dtype=np.float64)
    h = np.asarray(hyp, dtype=np.float64)
    if r.ndim != 2 or h.ndim != 2 or r.shape[1] != h.shape[1]:
        raise DimensionMismatch(
            f"coefficient dims differ: {r.shape} vs {h.shape}"
        )
    if r.shape[0] == 0 or h.shape[0] == 0:
        raise DimensionMismatch("sequences must be nonempty")
    diff = r[:, None, :] - h[None, :, :]
    local = np.sqrt(np.sum(diff * diff, axis=2))
    tr, th = local.shape
    acc = np.full((tr, th), np.inf)
    acc[0, 0] = local[0, 0]
    for i in range(tr):
        for j in range(th):
            if i == 0 and j == 0:
                continue
            best = np.inf
            if i > 0 and j > 0:
                best = acc[i - 1, j - 1]
            if i > 0:
                best = min(best, acc[i - 1, j])
            if j > 0:
                best = min(best, acc[i, j - 1])
            acc[i, j] = local[i, j] + best
    pairs = [(tr - 1, th - 1)]
    i, j = tr - 1, th - 1
    while (i, j) != (0, 0):
        for di, dj in _STEPS:
            pi, pj = i - di, j - dj
            if pi < 0 or pj < 0:
                continue
            if acc[i, j] == local[i, j] + acc[pi, pj]:
                i, j = pi, pj
                break
        pairs.append((i, j))
    pairs.reverse()
    return pairs, float(acc[tr - 1, th - 1])


def mcd(ref, hyp):
    """Mean mel-cepstral distance in dB along the DTW path."""
    r = np.asarray(ref, dtype=np.float64)
    h = np.asarray(hyp, dtype=np.float64)
    pairs, _ = dtw(r, h)
    idx_r = np.fromiter((p[0] for p in pairs), dtype=np.int64)
    idx_h = np.fromiter((p[1] for p in pairs), dtype=np.int64)
    d = r[idx_r] - h[idx_h]
    per_pair = MCD_SCALE * np.sqrt(2.0 * np.sum(d * d, axis=1))
    return float(np.mean(per_pair))


def duration_l1(pred, truth):
    """Mean absolute difference between duration vectors, in frames."""
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(truth, dtype=np.float64)
    if p.shape != t.shape or p.ndim != 1:
        raise LengthMismatch(
            f"duration vectors differ in length: {p.shape} vs {t.shape}"
        )
    return float(np.mean(np.abs(p - t)))
