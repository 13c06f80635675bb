"""Weight matrices and almost-orthogonality diagnostics.

The trigonometric pair u_{k,j} = sqrt(2/n) cos(2 pi j k / n),
v_{k,j} = sqrt(2/n) sin(2 pi j k / n) is the workhorse.  Entries are
always computed from the residue (j*k) mod n in exact integer arithmetic
before the floating-point cosine, so the classical orthogonality
identities hold to near machine precision even at large j*k.

Condition residuals (max entry, row-orthogonality defect, cross defect)
are reported raw; whether they are "small enough" is a statement across a
schedule of n and is left to the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .accum import kahan_gram
from .sources import SourceSpec, _uniform01

TRIG, HAAR, CUSTOM = "trig", "haar", "custom"

# full materialization guard: r*n entries
_MATERIALIZE_LIMIT = 1 << 23
# direct (non-FFT) column sums up to this n; exact pair enumeration in
# verify_trig_identities up to _EXACT_PAIR_LIMIT
_DIRECT_SUM_LIMIT = 4096
_EXACT_PAIR_LIMIT = 8192


def trig_rows_u(n: int, ks: np.ndarray) -> np.ndarray:
    """Rows sqrt(2/n) cos(2 pi j k / n), j = 1..n, for the given k values."""
    j = np.arange(1, n + 1, dtype=np.int64)
    idx = (np.asarray(ks, dtype=np.int64)[:, None] * j) % n
    return math.sqrt(2.0 / n) * np.cos(2.0 * np.pi * idx / n)


def trig_rows_v(n: int, ks: np.ndarray) -> np.ndarray:
    j = np.arange(1, n + 1, dtype=np.int64)
    idx = (np.asarray(ks, dtype=np.int64)[:, None] * j) % n
    return math.sqrt(2.0 / n) * np.sin(2.0 * np.pi * idx / n)


@dataclass(frozen=True)
class WeightMatrixPair:
    """An r x n weight matrix U with optional companion V.

    For kind "trig" the arrays may be None, meaning the entries are
    implicit in (n, r) and generated on demand; this keeps n = 2**16 with
    r = (n-1)//2 representable without the 17 GB dense matrix.
    """

    kind: str
    n: int
    r: int
    u: np.ndarray | None = None
    v: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in (TRIG, HAAR, CUSTOM):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.n < 1 or self.r < 1:
            raise ValueError("need r >= 1 and n >= 1")
        if self.kind == TRIG and self.r > (self.n - 1) // 2:
            raise ValueError(
                f"trig pair requires r <= floor((n-1)/2) = {(self.n - 1) // 2}, got r={self.r}"
            )
        for name, a in (("u", self.u), ("v", self.v)):
            if a is not None:
                if a.shape != (self.r, self.n):
                    raise ValueError(f"{name} must be {self.r}x{self.n}, got {a.shape}")
                if not np.all(np.isfinite(a)):
                    raise ValueError(f"{name} has non-finite entries")
        if self.u is None and self.kind != TRIG:
            raise ValueError("only trig pairs may be implicit")

    @property
    def has_v(self) -> bool:
        return self.v is not None or self.kind == TRIG

    def rows_u(self, ks: np.ndarray) -> np.ndarray:
        """Rows for 1-based indices ks."""
        ks = np.asarray(ks, dtype=np.int64)
        if np.any((ks < 1) | (ks > self.r)):
            raise IndexError("row index out of range")
        if self.u is not None:
            return self.u[ks - 1]
        return trig_rows_u(self.n, ks)

    def rows_v(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks, dtype=np.int64)
        if np.any((ks < 1) | (ks > self.r)):
            raise IndexError("row index out of range")
        if self.v is not None:
            return self.v[ks - 1]
        if self.kind != TRIG:
            raise ValueError("no companion matrix V")
        return trig_rows_v(self.n, ks)

    def entry_u(self, k: int, j: int) -> float:
        """u_{k,j} with 1-based (k, j)."""
        if not (1 <= j <= self.n):
            raise IndexError("column index out of range")
        return float(self.rows_u(np.array([k]))[0, j - 1])

    def entry_v(self, k: int, j: int) -> float:
        if not (1 <= j <= self.n):
            raise IndexError("column index out of range")
        return float(self.rows_v(np.array([k]))[0, j - 1])

    def materialize(self) -> "WeightMatrixPair":
        if self.u is not None:
            return self
        if self.r * self.n > _MATERIALIZE_LIMIT:
            raise MemoryError(
                f"refusing to materialize {self.r}x{self.n} trig pair; use the implicit API"
            )
        ks = np.arange(1, self.r + 1)
        return WeightMatrixPair(
            kind=self.kind,
            n=self.n,
            r=self.r,
            u=trig_rows_u(self.n, ks),
            v=trig_rows_v(self.n, ks),
        )


def make_trig_pair(n: int, r: int, materialize: bool | None = None) -> WeightMatrixPair:
    """The trigonometric pair of u/v weight rows for k = 1..r.

    The construction needs 2r < n, so r > floor((n-1)/2) is rejected.
    By default small pairs are materialized and large ones stay implicit.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    if not (1 <= r <= (n - 1) // 2):
        raise ValueError(f"need 1 <= r <= floor((n-1)/2) = {(n - 1) // 2}")
    pair = WeightMatrixPair(kind=TRIG, n=n, r=r)
    if materialize is None:
        materialize = r * n <= _MATERIALIZE_LIMIT
    return pair.materialize() if materialize else pair


def custom_pair(u: np.ndarray, v: np.ndarray | None = None) -> WeightMatrixPair:
    u = np.atleast_2d(np.asarray(u, dtype=float))
    if v is not None:
        v = np.atleast_2d(np.asarray(v, dtype=float))
    return WeightMatrixPair(kind=CUSTOM, n=u.shape[1], r=u.shape[0], u=u, v=v)


def load_custom_csv(path, v_path=None) -> WeightMatrixPair:
    """Custom matrix from CSV, one matrix row per line, decimal floats."""
    u = np.loadtxt(path, delimiter=",", ndmin=2)
    v = np.loadtxt(v_path, delimiter=",", ndmin=2) if v_path else None
    return custom_pair(u, v)


def sample_haar_orthogonal(n: int, spec: SourceSpec) -> WeightMatrixPair:
    """Haar-distributed orthogonal n x n matrix (r = n, no companion).

    A matrix of i.i.d. standard normals (drawn from the spec's
    counter-based stream) is orthonormalized by QR; rescaling each column
    so the triangular factor's diagonal is positive makes the law exactly
    Haar rather than merely orthogonal.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    j = np.arange(1, n * n + 1, dtype=np.uint64)
    g = ndtri(_uniform01(spec, j)).reshape(n, n)
    q, rr = np.linalg.qr(g)
    d = np.diagonal(rr)
    if not np.all(np.isfinite(q)) or np.any(d == 0.0):
        raise ArithmeticError("degenerate normal draw: QR produced a zero pivot")
    q = q * np.sign(d)[None, :]
    return WeightMatrixPair(kind=HAAR, n=n, r=n, u=q.T.copy())


# --- trigonometric column sums ---------------------------------------------

def trig_column_sums(n: int, direct: bool | None = None):
    """(S_m, T_m) with S_m = sum_{j=1..n} cos(2 pi m j / n), T_m the sine sum.

    Exact values are S_m = n for m = 0 mod n and 0 otherwise, T_m = 0;
    the computed arrays carry the actual floating-point residuals.  Small
    n uses direct summation on exactly reduced angles; large n evaluates
    the same sums as the DFT of the all-ones vector (the term j = n equals
    the term j = 0, so the two index ranges agree).
    """
    if direct is None:
        direct = n <= _DIRECT_SUM_LIMIT
    if direct:
        j = np.arange(1, n + 1, dtype=np.int64)
        m = np.arange(n, dtype=np.int64)[:, None]
        ang = 2.0 * np.pi * ((m * j) % n) / n
        return np.cos(ang).sum(axis=1), np.sin(ang).sum(axis=1)
    f = np.fft.fft(np.ones(n))
    return f.real.copy(), (-f.imag).copy()


@dataclass(frozen=True)
class ConditionReport:
    """Raw left-hand sides of the three almost-orthogonality conditions."""

    eps_entry_u: float
    eps_entry_v: float | None
    eps_orth_u: float
    eps_orth_v: float | None
    eps_cross: float | None
    log_scale: float
    n: int
    r: int
    delta: float

    def to_dict(self) -> dict:
        return {
            "eps_entry_u": self.eps_entry_u,
            "eps_entry_v": self.eps_entry_v,
            "eps_orth_u": self.eps_orth_u,
            "eps_orth_v": self.eps_orth_v,
            "eps_cross": self.eps_cross,
            "log_scale": self.log_scale,
            "n": self.n,
            "r": self.r,
            "delta": self.delta,
        }


def _offdiag_pair_max(arr: np.ndarray, r: int, sign: float) -> float:
    """Exact max over 1 <= k1 < k2 <= r of |arr[k2-k1] + sign*arr[k1+k2]|.

    A pair (d, s) = (k2-k1, k1+k2) is realized iff d and s share parity
    and 1 <= d <= min(s-2, 2r-s); scanning s with per-parity prefix
    extrema of arr[d] makes this O(r) instead of O(r^2).
    """
    if r < 2:
        return 0.0
    s_vals = np.arange(2, 2 * r + 1, dtype=np.int64)
    limits = np.minimum(s_vals - 2, 2 * r - s_vals)
    best = 0.0
    for p in (0, 1):
        d0 = 1 if p == 1 else 2
        d = np.arange(d0, r, 2, dtype=np.int64)
        if d.size == 0:
            continue
        cmax = np.maximum.accumulate(arr[d])
        cmin = np.minimum.accumulate(arr[d])
        sel = (s_vals % 2) == p
        ls = limits[sel]
        ok = ls >= d0
        if not ok.any():
            continue
        i = (ls[ok] - d0) // 2
        a = sign * arr[s_vals[sel][ok]]
        vals = np.maximum(np.abs(a + cmax[i]), np.abs(a + cmin[i]))
        best = max(best, float(vals.max()))
    return best


def _cross_pair_max(t: np.ndarray, r: int) -> float:
    """Exact max over k1,k2 in 1..r of |t[k1+k2] - sgn(k1-k2)*t[|k1-k2|]|.

    Both orders of an unordered pair occur, and max(|a-b|, |a+b|) is
    |a| + |b|, so the off-diagonal part is the max of |t[s]| + |t[d]|
    over realized (d, s); the diagonal contributes |t[2k]|.
    """
    best = float(np.max(np.abs(t[2 * np.arange(1, r + 1)])))
    if r < 2:
        return best
    a = np.abs(t)
    s_vals = np.arange(2, 2 * r + 1, dtype=np.int64)
    limits = np.minimum(s_vals - 2, 2 * r - s_vals)
    for p in (0, 1):
        d0 = 1 if p == 1 else 2
        d = np.arange(d0, r, 2, dtype=np.int64)
        if d.size == 0:
            continue
        cmax = np.maximum.accumulate(a[d])
        sel = (s_vals % 2) == p
        ls = limits[sel]
        ok = ls >= d0
        if not ok.any():
            continue
        i = (ls[ok] - d0) // 2
        vals = a[s_vals[sel][ok]] + cmax[i]
        best = max(best, float(vals.max()))
    return best


def _check_conditions_trig(n: int, r: int, delta: float) -> ConditionReport:
    # Product-to-sum reduction: every Gram entry of the trig pair is an
    # exact half-sum of two column sums S_m / T_m, so the full r x r
    # residual scan costs O(r^2) index arithmetic instead of O(r^2 n).
    s, t = trig_column_sums(n)
    scale = math.sqrt(2.0 / n)
    # residue 0 is hit at j = n for every k, where |cos| = 1
    eps_entry_u = scale
    eps_entry_v = scale * float(np.max(np.abs(np.sin(2.0 * np.pi * np.arange(n) / n))))

    e0 = s[0] - n  # exact value of S_0 is n
    diag_dev = float(np.max(np.abs(e0 + s[2 * np.arange(1, r + 1)]))) / n
    off_u = _offdiag_pair_max(s, r, +1.0) / n
    off_v = _offdiag_pair_max(s, r, -1.0) / n
    eps_cross = _cross_pair_max(t, r) / n
    return ConditionReport(
        eps_entry_u=eps_entry_u,
        eps_entry_v=eps_entry_v,
        eps_orth_u=max(diag_dev, off_u),
        eps_orth_v=max(diag_dev, off_v),
        eps_cross=eps_cross,
        log_scale=math.log1p(r) ** (1.0 + delta),
        n=n,
        r=r,
        delta=delta,
    )


def _check_conditions_dense(w: WeightMatrixPair, delta: float) -> ConditionReport:
    u = w.u
    gram_u = kahan_gram(u, u)
    eye = np.eye(w.r)
    eps_orth_u = float(np.max(np.abs(gram_u - eye)))
    eps_entry_u = float(np.max(np.abs(u)))
    eps_entry_v = eps_orth_v = eps_cross = None
    if w.v is not None:
        eps_entry_v = float(np.max(np.abs(w.v)))
        eps_orth_v = float(np.max(np.abs(kahan_gram(w.v, w.v) - eye)))
        eps_cross = float(np.max(np.abs(kahan_gram(u, w.v))))
    return ConditionReport(
        eps_entry_u=eps_entry_u,
        eps_entry_v=eps_entry_v,
        eps_orth_u=eps_orth_u,
        eps_orth_v=eps_orth_v,
        eps_cross=eps_cross,
        log_scale=math.log1p(w.r) ** (1.0 + delta),
        n=w.n,
        r=w.r,
        delta=delta,
    )


def check_conditions(w: WeightMatrixPair, delta: float) -> ConditionReport:
    """Raw maxima for conditions (max entry / orthogonality / cross).

    Trig pairs go through the structured O(r^2) scan; anything dense goes
    through the compensated Gram computation.  The two paths agree to
    ~1e-12 on small trig pairs (asserted in the test suite).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if w.kind == TRIG:
        return _check_conditions_trig(w.n, w.r, delta)
    return _check_conditions_dense(w, delta)


@dataclass(frozen=True)
class TrigIdentityReport:
    ok: bool
    worst_residual: float
    exact: bool  # False when the residual is a certified upper bound
    n: int
    tol: float


def verify_trig_identities(n: int, tol: float = 1e-9) -> TrigIdentityReport:
    """Check the four cos/sin orthogonality identities over 1 <= k1 <= k2 <= n.

    Includes the exceptional cases k1 + k2 = n (values +-n/2) and 2k = n.
    Every pairwise sum reduces exactly to a half-sum of the column sums
    S_m, T_m, so the residual of a pair is |E_a +- E_b| / 2 (E = S minus
    its exact value) or |T_a + T_b| / 2.  Up to n = 8192 all pairs are
    enumerated; beyond that the reported value max(|E|, |T|) is a
    certified upper bound on the worst pair residual.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    s, t = trig_column_sums(n)
    e = s.copy()
    e[0] -= n  # exact value of S_0 is n; elsewhere 0

    if n <= _EXACT_PAIR_LIMIT:
        worst = 0.0
        k = np.arange(1, n + 1, dtype=np.int64)
        for k1 in range(1, n + 1):
            k2 = k[k1 - 1 :]  # k2 >= k1
            d = (k2 - k1) % n
            sm = (k1 + k2) % n
            cc = np.abs(e[d] + e[sm]) / 2.0  # cos*cos, all cases folded
            ss = np.abs(e[d] - e[sm]) / 2.0  # sin*sin
            cs = np.abs(t[sm] + t[d]) / 2.0  # cos(k1 j) * sin(k2 j), k1 <= k2
            worst = max(worst, float(cc.max()), float(ss.max()), float(cs.max()))
        # trug 4 diagonal is the d = 0 slice above (k1 = k2)
        return TrigIdentityReport(worst <= tol, worst, True, n, tol)

    bound = max(float(np.max(np.abs(e))), float(np.max(np.abs(t))))
    return TrigIdentityReport(bound <= tol, bound, False, n, tol)
