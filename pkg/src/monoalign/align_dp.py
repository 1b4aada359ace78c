"""Exact dynamic programming over monotonic frame-to-token alignments.

A valid alignment of T mel frames to N text tokens is a path ``s`` of
length T with ``s[0] = 0``, ``s[T-1] = N-1`` and steps in {0, 1}: the path
covers every token, never moves backward and never skips.  All operations
here work on a T x N matrix of log-potentials (natural log; ``-inf``
encodes a forbidden cell, rows need not be normalized) and are pure
functions, safe to call concurrently.

All arithmetic is in log-space with max-shifted log-sum-exp, accumulated
in float64 regardless of the input dtype.
"""

import numpy as np

from .errors import InvalidPath, InvalidShape, NonFinite, NoValidPath

NEG_INF = -np.inf


def _check_log_probs(log_probs):
    """Validate and convert a log-potential matrix to float64.

    Raises InvalidShape when no monotonic path can exist and NonFinite on
    NaN/+inf entries.
    """
    lp = np.asarray(log_probs, dtype=np.float64)
    if lp.ndim != 2:
        raise InvalidShape(f"expected a 2-D matrix, got ndim={lp.ndim}")
    t, n = lp.shape
    if n == 0 or t == 0:
        raise InvalidShape("empty log-prob matrix")
    if t < n:
        raise InvalidShape(f"no valid monotonic alignment: T < N ({t} < {n})")
    if np.isnan(lp).any():
        raise NonFinite("log-prob matrix contains NaN")
    if np.isposinf(lp).any():
        raise NonFinite("log-prob matrix contains +inf")
    return lp


def _shift_right(row):
    # value at i becomes previous value at i-1; slot 0 gets -inf
    out = np.empty_like(row)
    out[0] = NEG_INF
    out[1:] = row[:-1]
    return out


def _forward(lp):
    """alpha[t, i] = log sum of path weights over frames 0..t ending at i."""
    t_len, n = lp.shape
    alpha = np.full((t_len, n), NEG_INF)
    alpha[0, 0] = lp[0, 0]
    for t in range(1, t_len):
        prev = alpha[t - 1]
        alpha[t] = lp[t] + np.logaddexp(prev, _shift_right(prev))
    return alpha


def _backward(lp):
    """beta[t, i] = log sum of weights of frames t+1..T-1 given token i at t."""
    t_len, n = lp.shape
    beta = np.full((t_len, n), NEG_INF)
    beta[t_len - 1, n - 1] = 0.0
    for t in range(t_len - 2, -1, -1):
        nxt = beta[t + 1] + lp[t + 1]
        stay = nxt
        advance = np.empty_like(nxt)
        advance[:-1] = nxt[1:]
        advance[-1] = NEG_INF
        beta[t] = np.logaddexp(stay, advance)
    return beta


def forward_sum_loss(log_probs):
    """Negative log of the summed likelihood of all monotonic alignments.

    Returns ``-log sum_{s} prod_t exp(log_probs[t, s[t]])`` over every
    valid path, via the HMM forward recursion.

    Raises NoValidPath when every path has zero probability.
    """
    lp = _check_log_probs(log_probs)
    alpha = _forward(lp)
    total = alpha[-1, -1]
    if total == NEG_INF:
        raise NoValidPath("all monotonic alignments have zero probability")
    return float(-total) + 0.0  # avoid -0.0 for probability-one inputs


def posteriors(log_probs):
    """Per-frame token marginals gamma[t, i] given a complete alignment.

    Computed by forward-backward; each row sums to 1 and is zero at cells
    no valid path can visit.
    """
    lp = _check_log_probs(log_probs)
    alpha = _forward(lp)
    total = alpha[-1, -1]
    if total == NEG_INF:
        raise NoValidPath("all monotonic alignments have zero probability")
    beta = _backward(lp)
    gamma = np.exp(alpha + beta - total)
    # guard against tiny drift; rows are exact up to fp accumulation
    return gamma


def forward_sum_grad(log_probs):
    """Gradient of forward_sum_loss w.r.t. each log-potential entry.

    Each entry is treated as an independent parameter (any softmax
    Jacobian upstream is the caller's concern), so the gradient is exactly
    the negated posterior matrix.
    """
    return -posteriors(log_probs)


def viterbi(log_probs):
    """Most likely monotonic alignment and its log-likelihood.

    Returns ``(path, score)`` where ``path`` is an int64 array of length T
    and ``score = sum_t log_probs[t, path[t]]`` is maximal over all valid
    paths.  Ties are broken toward advancing as late as possible: when the
    stay and advance predecessors score equally during backtracking, the
    advance transition is taken, so earlier frames hold the earlier token.
    """
    lp = _check_log_probs(log_probs)
    t_len, n = lp.shape
    delta = np.full((t_len, n), NEG_INF)
    delta[0, 0] = lp[0, 0]
    # came_from_prev[t, i] is True when the best predecessor of (t, i) is
    # token i-1 (ties included, which realizes the late-advance rule)
    came_from_prev = np.zeros((t_len, n), dtype=bool)
    for t in range(1, t_len):
        prev = delta[t - 1]
        shifted = _shift_right(prev)
        came_from_prev[t] = shifted >= prev
        delta[t] = lp[t] + np.maximum(prev, shifted)
    score = delta[-1, -1]
    if score == NEG_INF:
        raise NoValidPath("all monotonic alignments have zero probability")
    path = np.empty(t_len, dtype=np.int64)
    i = n - 1
    path[t_len - 1] = i
    for t in range(t_len - 1, 0, -1):
        if i > 0 and came_from_prev[t, i]:
            i -= 1
        path[t - 1] = i
    return path, float(score)


def check_path(path, n_tokens):
    """Validate HardAlignment invariants; returns the path as int64."""
    p = np.asarray(path)
    if p.ndim != 1 or p.size == 0:
        raise InvalidPath("path must be a nonempty 1-D sequence")
    if not np.issubdtype(p.dtype, np.integer):
        pf = np.asarray(path, dtype=np.float64)
        if np.any(pf != np.floor(pf)) or np.isnan(pf).any():
            raise InvalidPath("path entries must be integers")
        p = pf.astype(np.int64)
    else:
        p = p.astype(np.int64)
    if p[0] != 0:
        raise InvalidPath("path must start at token 0")
    if p[-1] != n_tokens - 1:
        raise InvalidPath(f"path must end at token {n_tokens - 1}")
    steps = np.diff(p)
    if p.size > 1 and not np.all((steps == 0) | (steps == 1)):
        raise InvalidPath("path steps must be 0 or 1")
    return p


def hard_to_onehot(path, n_tokens):
    """One-hot T x N matrix of a hard alignment (one 1 per row)."""
    p = check_path(path, n_tokens)
    onehot = np.zeros((p.size, n_tokens))
    onehot[np.arange(p.size), p] = 1.0
    return onehot
