"""Hot numerical kernels, each in two interchangeable implementations.

Every kernel has a vectorized numpy form and a loop form compiled with
numba. The compiled path is used when numba imports cleanly and the
environment variable EACOMP_DISABLE_NUMBA is unset (or "0"/"false");
force_backend() overrides both for benchmarks and cross-checks. The two
implementations of a kernel agree to 1e-12 on valid inputs and the test
suite pins that down; neither path is ever allowed to shadow the other.

Kernels:
  block_fidelity     expected decoding fidelity of a projective code,
                     enumerated exactly over classical sequences
  unitary_objective  mutual information and average fidelity of the
                     channel induced by exp(iH) restricted to the input
                     block (W-major output ordering, environment first)
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap if not (args and callable(args[0])) else args[0]


_ENV_DISABLED = os.environ.get("EACOMP_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false")
FORCED_BACKEND: str | None = None


def force_backend(name: str | None):
    """Pin the backend to "numpy" or "numba"; None restores the default."""
    global FORCED_BACKEND
    if name not in (None, "numpy", "numba"):
        raise ValueError(f"backend must be 'numpy' or 'numba', got {name!r}")
    if name == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba is not importable in this environment")
    FORCED_BACKEND = name


def active_backend() -> str:
    if FORCED_BACKEND is not None:
        return FORCED_BACKEND
    return "numba" if (NUMBA_AVAILABLE and not _ENV_DISABLED) else "numpy"


# ---------------------------------------------------------------------------
# block_fidelity: probs (ns,), g[x, k] = |<e_k|psi_x>|^2 single-copy overlap
# table, sel (rank, n) per-copy eigenvector indices of the retained product
# basis. Row 0 of sel is the single largest-weight product vector, onto which
# every failed measurement collapses. No n-copy vectors are ever formed.


def _block_fidelity_numpy(probs: np.ndarray, g: np.ndarray, sel: np.ndarray) -> float:
    ns = probs.shape[0]
    rank, n = sel.shape
    seqs = np.indices((ns,) * n).reshape(n, -1).T
    pseq = probs[seqs].prod(axis=1)

    ppass = np.zeros(seqs.shape[0])
    comp = np.zeros(seqs.shape[0])
    fail = np.ones(seqs.shape[0])
    for k in range(rank):
        term = g[seqs, sel[k][None, :]].prod(axis=1)
        if k == 0:
            fail = term
        y = term - comp
        t = ppass + y
        comp = (t - ppass) - y
        ppass = t
    np.clip(ppass, 0.0, 1.0, out=ppass)
    fv = np.sqrt(ppass * ppass + (1.0 - ppass) * fail)
    np.clip(fv, 0.0, 1.0, out=fv)
    total = math.fsum((pseq * fv).tolist())
    return min(max(total, 0.0), 1.0)


@njit(cache=True)
def _block_fidelity_numba(probs, g, sel):  # pragma: no cover - covered via dispatcher
    ns = probs.shape[0]
    rank, n = sel.shape
    total_seqs = 1
    for _ in range(n):
        total_seqs *= ns
    digits = np.zeros(n, np.int64)
    acc = 0.0
    comp = 0.0
    for _s in range(total_seqs):
        pseq = 1.0
        for i in range(n):
            pseq *= probs[digits[i]]
        if pseq > 0.0:
            ppass = 0.0
            pcomp = 0.0
            fail = 1.0
            for k in range(rank):
                term = 1.0
                for i in range(n):
                    term *= g[digits[i], sel[k, i]]
                if k == 0:
                    fail = term
                y = term - pcomp
                t = ppass + y
                pcomp = (t - ppass) - y
                ppass = t
            if ppass > 1.0:
                ppass = 1.0
            elif ppass < 0.0:
                ppass = 0.0
            fv = math.sqrt(ppass * ppass + (1.0 - ppass) * fail)
            if fv > 1.0:
                fv = 1.0
            contrib = pseq * fv
            y = contrib - comp
            t = acc + y
            comp = (t - acc) - y
            acc = t
        i = n - 1
        while i >= 0:
            digits[i] += 1
            if digits[i] < ns:
                break
            digits[i] = 0
            i -= 1
    if acc > 1.0:
        acc = 1.0
    elif acc < 0.0:
        acc = 0.0
    return acc


def block_fidelity(probs: np.ndarray, g: np.ndarray, sel: np.ndarray) -> float:
    probs = np.ascontiguousarray(probs, dtype=np.float64)
    g = np.ascontiguousarray(g, dtype=np.float64)
    sel = np.ascontiguousarray(sel, dtype=np.int64)
    if active_backend() == "numba":
        return float(_block_fidelity_numba(probs, g, sel))
    return _block_fidelity_numpy(probs, g, sel)


# ---------------------------------------------------------------------------
# unitary_objective: h is a (dim, dim) Hermitian generator with
# dim = dw * da * dc; the candidate isometry is the first da*dc columns of
# exp(iH), mapping the joint input onto environment-major output indices
# w * (da * dc) + a * dc + c. phis holds the joint input vectors padded
# with zeros to length dim, one row per positive-probability signal.
# Returns (I(X : C W') in bits, average fidelity on A C).


def _entropy_rows(evs: np.ndarray) -> np.ndarray:
    safe = np.where(evs > 1e-15, evs, 1.0)
    return -(np.where(evs > 1e-15, evs * np.log2(safe), 0.0)).sum(axis=-1)


def _unitary_objective_numpy(h, phis, probs, da, dc, dw):
    d_in = da * dc
    nx = phis.shape[0]
    evs, vecs = np.linalg.eigh(h)
    u = (vecs * np.exp(1j * evs)) @ vecs.conj().T
    xis = phis @ u.T
    dcw = dw * dc

    b = xis.reshape(nx, dw, da, dc).transpose(0, 1, 3, 2).reshape(nx, dcw, da)
    ms = b @ b.conj().transpose(0, 2, 1)
    mix = np.tensordot(probs, ms, axes=1)
    cond = float(probs @ _entropy_rows(np.linalg.eigvalsh(ms)))
    mi = float(_entropy_rows(np.linalg.eigvalsh(mix))) - cond

    ov = np.einsum("xk,xwk->xw", phis[:, :d_in].conj(), xis.reshape(nx, dw, d_in))
    f = np.clip((np.abs(ov) ** 2).sum(axis=1), 0.0, 1.0)
    fid = float(probs @ np.sqrt(f))
    return mi, fid


@njit(cache=True)
def _unitary_objective_numba(h, phis, probs, da, dc, dw):  # pragma: no cover
    d_in = da * dc
    dim = dw * d_in
    nx = phis.shape[0]
    dcw = dw * dc

    evs, vecs = np.linalg.eigh(h)
    scaled = vecs * np.exp(1j * evs)
    u = np.dot(scaled, np.conj(vecs).T)

    mix = np.zeros((dcw, dcw), np.complex128)
    cond = 0.0
    fid = 0.0
    for x in range(nx):
        xi = np.dot(u, phis[x])
        b = np.empty((dcw, da), np.complex128)
        for w in range(dw):
            for c in range(dc):
                for a in range(da):
                    b[w * dc + c, a] = xi[w * d_in + a * dc + c]
        m = np.dot(b, np.conj(b).T)
        mix += probs[x] * m
        mev = np.linalg.eigvalsh(m)
        s = 0.0
        for v in mev:
            if v > 1e-15:
                s -= v * np.log2(v)
        cond += probs[x] * s

        f = 0.0
        for w in range(dw):
            acc = 0.0 + 0.0j
            for k in range(d_in):
                acc += np.conj(phis[x, k]) * xi[w * d_in + k]
            f += acc.real * acc.real + acc.imag * acc.imag
        if f > 1.0:
            f = 1.0
        elif f < 0.0:
            f = 0.0
        fid += probs[x] * math.sqrt(f)

    mev = np.linalg.eigvalsh(mix)
    s = 0.0
    for v in mev:
        if v > 1e-15:
            s -= v * np.log2(v)
    return s - cond, fid


def unitary_objective(h, phis, probs, da: int, dc: int, dw: int) -> tuple[float, float]:
    h = np.ascontiguousarray(h, dtype=np.complex128)
    phis = np.ascontiguousarray(phis, dtype=np.complex128)
    probs = np.ascontiguousarray(probs, dtype=np.float64)
    if active_backend() == "numba":
        mi, fid = _unitary_objective_numba(h, phis, probs, da, dc, dw)
        return float(mi), float(fid)
    return _unitary_objective_numpy(h, phis, probs, da, dc, dw)


def warm_up():
    """Trigger jit compilation on tiny inputs so timings stay honest."""
    if active_backend() != "numba":
        return
    block_fidelity(np.array([1.0]), np.array([[1.0]]), np.zeros((1, 1), np.int64))
    unitary_objective(np.zeros((4, 4), np.complex128), np.eye(1, 4, dtype=np.complex128),
                      np.array([1.0]), 2, 1, 2)
