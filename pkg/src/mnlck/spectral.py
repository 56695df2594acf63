"""Fourier-truncated twisted de Rham, Dolbeault and Bott-Chern theory on flat tori.

The torus is R^{2n} / Z^{2n} with real coordinates (x_1, y_1, ..., x_n, y_n)
and complex coordinates z_j = x_j + i y_j.  Forms are expanded in Fourier
modes exp(2 pi i k.x) against the basis dz_I ^ dzbar_J.  Generators are
numbered 0..2n-1: g < n is dz_g, g >= n is dzbar_{g-n}; a basis element is a
sorted tuple of generators.

With a constant Lee form theta = sum c_m dx_m every operator maps a mode to
itself: on mode k, d_theta is wedging with (2 pi i k.dx - theta), and
del_theta / delbar_theta wedge with its (1,0) / (0,1) parts.  All cohomology
computations are therefore per-mode ranks of small matrices, done in batches.

Conventions: d^c = i (del - delbar), so d d^c = -2i del delbar and on
functions d^c f = I(df) with (I eta)(X) = eta(IX).  The twisted version is
d^c_theta = i (del_theta - delbar_theta) = d^c - (I theta) ^.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from math import comb

import numpy as np

from .linalg import EPS_RANK, GAP_CONFIDENT

TWO_PI = 2.0 * np.pi
OPERATORS = (
    "d", "dc", "del", "delbar",
    "d_theta", "dc_theta", "del_theta", "delbar_theta", "del_delbar_theta",
)
_CHUNK = 16384


class CutoffInstabilityError(RuntimeError):
    pass


@dataclass(frozen=True)
class FlatTorus:
    n: int
    cutoff: int = 8

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("complex dimension must be >= 1")
        if self.cutoff < 2:
            raise ValueError("mode cutoff must be >= 2")

    def modes(self, cutoff: int | None = None) -> np.ndarray:
        N = self.cutoff if cutoff is None else cutoff
        axes = [np.arange(-N, N + 1)] * (2 * self.n)
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 2 * self.n)


@dataclass(frozen=True)
class ConstantLeeForm:
    c: tuple

    @classmethod
    def of(cls, values, n: int) -> "ConstantLeeForm":
        c = tuple(float(v) for v in values)
        if len(c) != 2 * n:
            raise ValueError(f"theta needs {2 * n} real components for n={n}, got {len(c)}")
        return cls(c)

    @classmethod
    def zero(cls, n: int) -> "ConstantLeeForm":
        return cls((0.0,) * (2 * n))

    @property
    def n(self) -> int:
        return len(self.c) // 2


def to_generators(a: np.ndarray) -> np.ndarray:
    """Covector(s) sum a_m dx_m (complex a allowed) -> coefficients on dz, dzbar."""
    a = np.asarray(a, dtype=complex)
    x, y = a[..., 0::2], a[..., 1::2]
    return np.concatenate([0.5 * (x - 1j * y), 0.5 * (x + 1j * y)], axis=-1)


@lru_cache(maxsize=None)
def basis(n: int, degree: int) -> tuple:
    if not 0 <= degree <= 2 * n:
        return ()
    return tuple(combinations(range(2 * n), degree))


def bidegree(n: int, element: tuple) -> tuple:
    p = sum(1 for g in element if g < n)
    return p, len(element) - p


@lru_cache(maxsize=None)
def bidegree_index(n: int, p: int, q: int) -> np.ndarray:
    return np.array([i for i, b in enumerate(basis(n, p + q)) if bidegree(n, b) == (p, q)], dtype=int)


@lru_cache(maxsize=None)
def wedge_tensor(n: int, degree: int) -> np.ndarray:
    """E[g, i, j] = sign with which dgen_g ^ basis_j = sign * basis'_i."""
    src, dst = basis(n, degree), basis(n, degree + 1)
    where = {b: i for i, b in enumerate(dst)}
    E = np.zeros((2 * n, len(dst), len(src)))
    for j, b in enumerate(src):
        for g in range(2 * n):
            if g in b:
                continue
            sign = -1.0 if sum(1 for x in b if x < g) % 2 else 1.0
            E[g, where[tuple(sorted(b + (g,)))], j] = sign
    return E


def _covectors(op: str, modes: np.ndarray, theta: ConstantLeeForm) -> np.ndarray:
    twisted = op.endswith("_theta")
    a = TWO_PI * 1j * modes.astype(float)
    if twisted:
        a = a - np.asarray(theta.c)[None, :]
    G = to_generators(a)
    n = modes.shape[1] // 2
    g10 = G.copy()
    g10[:, n:] = 0
    g01 = G.copy()
    g01[:, :n] = 0
    base = op[: -len("_theta")] if twisted else op
    if base == "d":
        return G
    if base == "del":
        return g10
    if base == "delbar":
        return g01
    if base == "dc":
        return 1j * (g10 - g01)
    raise ValueError(f"unknown operator {op!r}")


def operator_blocks(op: str, modes: np.ndarray, theta: ConstantLeeForm, degree: int) -> np.ndarray:
    """Per-mode matrices of a first-order operator from total degree ``degree``, shape (M, out, in)."""
    n = modes.shape[1] // 2
    X = _covectors(op, modes, theta)
    return np.einsum("mg,gij->mij", X, wedge_tensor(n, degree))


@dataclass(frozen=True)
class SpectralForm:
    """Finitely many Fourier modes of a complex differential form of fixed total degree.

    ``coeffs[m, i]`` multiplies ``exp(2 pi i modes[m].x) dgen_{basis[i]}``.
    """

    n: int
    degree: int
    modes: np.ndarray
    coeffs: np.ndarray
    real: bool = False

    def __post_init__(self):
        if self.coeffs.shape != (len(self.modes), len(basis(self.n, self.degree))):
            raise ValueError("coefficient table does not match modes x basis")

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def mode_zero(self) -> np.ndarray:
        idx = np.flatnonzero(~self.modes.any(axis=1))
        return self.coeffs[idx[0]] if idx.size else np.zeros(len(basis(self.n, self.degree)), complex)

    def component(self, p: int, q: int) -> "SpectralForm":
        keep = np.zeros(self.coeffs.shape[1], bool)
        keep[bidegree_index(self.n, p, q)] = True
        return SpectralForm(self.n, self.degree, self.modes, np.where(keep[None, :], self.coeffs, 0))

    def __sub__(self, other: "SpectralForm") -> "SpectralForm":
        return self._combine(other, -1.0)

    def __add__(self, other: "SpectralForm") -> "SpectralForm":
        return self._combine(other, 1.0)

    def _combine(self, other, s):
        if (self.n, self.degree) != (other.n, other.degree):
            raise ValueError("forms of different degree")
        allm = np.unique(np.concatenate([self.modes, other.modes]), axis=0)
        out = np.zeros((len(allm), self.coeffs.shape[1]), complex)
        pos = {tuple(k): i for i, k in enumerate(allm)}
        for k, c in zip(self.modes, self.coeffs):
            out[pos[tuple(k)]] += c
        for k, c in zip(other.modes, other.coeffs):
            out[pos[tuple(k)]] += s * c
        return SpectralForm(self.n, self.degree, allm, out)

    def scale(self, s: complex) -> "SpectralForm":
        return SpectralForm(self.n, self.degree, self.modes, s * self.coeffs)


def random_form(n: int, degree: int, cutoff: int, rng: np.random.Generator, n_modes: int = 12) -> SpectralForm:
    """Random complex form supported on ``n_modes`` distinct modes inside the cutoff."""
    all_modes = FlatTorus(n, max(cutoff, 2)).modes(cutoff)
    pick = rng.choice(len(all_modes), size=min(n_modes, len(all_modes)), replace=False)
    modes = all_modes[np.sort(pick)]
    nb = len(basis(n, degree))
    coeffs = rng.normal(size=(len(modes), nb)) + 1j * rng.normal(size=(len(modes), nb))
    return SpectralForm(n, degree, modes, coeffs)


def apply_operator(op: str, form: SpectralForm, theta: ConstantLeeForm | None = None) -> SpectralForm:
    """Apply one of ``OPERATORS`` mode by mode; the mode set never changes.

    ``del_delbar_theta`` is the composite del_theta o delbar_theta.  Applying
    any operator in top degree yields the (empty-basis) zero form.
    """
    theta = ConstantLeeForm.zero(form.n) if theta is None else theta
    if len(theta.c) != 2 * form.n:
        raise ValueError("theta has the wrong number of components")
    if op == "del_delbar_theta":
        return apply_operator("del_theta", apply_operator("delbar_theta", form, theta), theta)
    if op not in OPERATORS:
        raise ValueError(f"unknown operator {op!r}; choose from {OPERATORS}")
    if form.degree >= 2 * form.n:
        return SpectralForm(form.n, form.degree + 1, form.modes, np.zeros((len(form.modes), 0), complex))
    X = _covectors(op, form.modes, theta)
    out = np.einsum("mg,gij,mj->mi", X, wedge_tensor(form.n, form.degree), form.coeffs)
    return SpectralForm(form.n, form.degree + 1, form.modes, out)


def circle_average(form: SpectralForm, axis: int) -> SpectralForm:
    """Average over translations along the real coordinate ``axis`` (0-based): kills modes with k[axis] != 0."""
    if not 0 <= axis < 2 * form.n:
        raise ValueError(f"axis must be in 0..{2 * form.n - 1}")
    keep = form.modes[:, axis] == 0
    return SpectralForm(form.n, form.degree, form.modes, np.where(keep[:, None], form.coeffs, 0), form.real)


# ----------------------------------------------------------------------------
# batched per-mode ranks


def batch_rank(mats: np.ndarray, eps: float = EPS_RANK):
    """Ranks of a stack of matrices (M, r, c) and the smallest singular-value gap seen."""
    M = mats.shape[0]
    if mats.shape[1] == 0 or mats.shape[2] == 0:
        return np.zeros(M, int), float("inf")
    s = np.linalg.svd(mats, compute_uv=False)
    smax = s[:, :1]
    keep = s > eps * np.where(smax > 0, smax, np.inf)
    r = keep.sum(axis=1)
    gap = float("inf")
    mixed = (r > 0) & (r < s.shape[1])
    if mixed.any():
        rows = np.flatnonzero(mixed)
        kept = s[rows, r[rows] - 1]
        dropped = s[rows, r[rows]]
        with np.errstate(divide="ignore"):
            gap = float(np.min(np.where(dropped > 0, kept / dropped, np.inf)))
    return r.astype(int), gap


def kernel_projector(mats: np.ndarray, eps: float = EPS_RANK) -> np.ndarray:
    """Orthogonal projector onto ker A for each A in a stack."""
    cols = mats.shape[2]
    eye = np.eye(cols)[None]
    if mats.shape[1] == 0:
        return np.broadcast_to(eye, (mats.shape[0], cols, cols)).astype(complex)
    return eye - np.linalg.pinv(mats, rcond=eps) @ mats


@dataclass
class SpectralModel:
    """Per-mode rank tables for one (torus, theta); dims at cutoff N and N+2.

    Ranks are computed once on the N+2 box; the N box is a sub-box, so the
    cutoff-stability comparison is free.
    """

    torus: FlatTorus
    theta: ConstantLeeForm
    eps: float = EPS_RANK
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(self.theta.c) != 2 * self.torus.n:
            raise ValueError("theta dimension does not match the torus")
        N = self.torus.cutoff
        self.modes = self.torus.modes(N + 2)
        self.inner = np.all(np.abs(self.modes) <= N, axis=1)
        self.min_gap = float("inf")

    @property
    def n(self) -> int:
        return self.torus.n

    def _blocks(self, op, src, dst, modes):
        """Rows restricted to bidegree ``dst``, columns to ``src``."""
        B = operator_blocks(op, modes, self.theta, sum(src))
        return B[:, bidegree_index(self.n, *dst)][:, :, bidegree_index(self.n, *src)]

    def _per_mode(self, key, build):
        if key not in self._cache:
            out = np.zeros(len(self.modes), int)
            for lo in range(0, len(self.modes), _CHUNK):
                r, gap = batch_rank(build(self.modes[lo:lo + _CHUNK]), self.eps)
                out[lo:lo + _CHUNK] = r
                self.min_gap = min(self.min_gap, gap)
            self._cache[key] = out
        return self._cache[key]

    def _full_rank_d(self, degree):
        n = self.n
        if not 0 <= degree < 2 * n:
            return np.zeros(len(self.modes), int)
        return self._per_mode(("d", degree), lambda m: operator_blocks("d_theta", m, self.theta, degree))

    def _rank_op(self, op, p, q, dp, dq):
        n = self.n
        if min(p, q, p + dp, q + dq) < 0 or max(p, q, p + dp, q + dq) > n:
            return np.zeros(len(self.modes), int)
        return self._per_mode((op, p, q), lambda m: self._blocks(op, (p, q), (p + dp, q + dq), m))

    def _dims(self, per_mode):
        return int(per_mode[self.inner].sum()), int(per_mode.sum())

    # contributions per mode -------------------------------------------------
    def derham_per_mode(self, degree):
        nb = comb(2 * self.n, degree) if 0 <= degree <= 2 * self.n else 0
        return nb - self._full_rank_d(degree) - self._full_rank_d(degree - 1)

    def dolbeault_per_mode(self, p, q):
        nb = len(bidegree_index(self.n, p, q)) if 0 <= p <= self.n and 0 <= q <= self.n else 0
        return nb - self._rank_op("delbar_theta", p, q, 0, 1) - self._rank_op("delbar_theta", p, q - 1, 0, 1)

    def dolbeault_conj_per_mode(self, p, q):
        nb = len(bidegree_index(self.n, p, q)) if 0 <= p <= self.n and 0 <= q <= self.n else 0
        return nb - self._rank_op("del_theta", p, q, 1, 0) - self._rank_op("del_theta", p - 1, q, 1, 0)

    def _rank_bc_closed(self, p, q):
        def build(m):
            a = self._blocks("del_theta", (p, q), (p + 1, q), m) if p < self.n else np.zeros((len(m), 0, len(bidegree_index(self.n, p, q))))
            b = self._blocks("delbar_theta", (p, q), (p, q + 1), m) if q < self.n else np.zeros((len(m), 0, len(bidegree_index(self.n, p, q))))
            return np.concatenate([a, b], axis=1)
        return self._per_mode(("bc_closed", p, q), build)

    def _rank_ddbar(self, p, q):
        """Rank of del_theta delbar_theta: (p-1, q-1) -> (p, q)."""
        if p < 1 or q < 1:
            return np.zeros(len(self.modes), int)

        def build(m):
            inner = self._blocks("delbar_theta", (p - 1, q - 1), (p - 1, q), m)
            outer = self._blocks("del_theta", (p - 1, q), (p, q), m)
            return outer @ inner
        return self._per_mode(("ddbar", p, q), build)

    def bott_chern_per_mode(self, p, q):
        nb = len(bidegree_index(self.n, p, q))
        return nb - self._rank_bc_closed(p, q) - self._rank_ddbar(p, q)

    # public dims --------------------------------------------------------------
    def dims(self, kind: str, *deg) -> tuple:
        per_mode = {
            "derham": self.derham_per_mode,
            "dolbeault": self.dolbeault_per_mode,
            "dolbeault_conj": self.dolbeault_conj_per_mode,
            "bott_chern": self.bott_chern_per_mode,
        }[kind](*deg)
        return self._dims(per_mode)


def harmonic_dims(torus: FlatTorus, theta, complex: str = "derham", degree=0, *, model: SpectralModel | None = None) -> int:
    """Dimension of a twisted cohomology group on the flat torus.

    ``complex`` is ``derham`` (``degree`` an int), or ``dolbeault``,
    ``dolbeault_conj`` (the del_theta complex) or ``bott_chern`` (``degree``
    a ``(p, q)`` pair).  Raises ``CutoffInstabilityError`` if the value
    changes between cutoff N and N+2.
    """
    if not isinstance(theta, ConstantLeeForm):
        theta = ConstantLeeForm.of(theta, torus.n)
    model = model or SpectralModel(torus, theta)
    deg = (degree,) if complex == "derham" else tuple(degree)
    at_n, at_n2 = model.dims(complex, *deg)
    if at_n != at_n2:
        raise CutoffInstabilityError(f"{complex}{deg}: {at_n} at cutoff {torus.cutoff}, {at_n2} at {torus.cutoff + 2}")
    return at_n


def all_dims(torus: FlatTorus, theta: ConstantLeeForm, model: SpectralModel | None = None) -> dict:
    """Every de Rham, Dolbeault and Bott-Chern dimension with its cutoff-stability flag."""
    model = model or SpectralModel(torus, theta)
    n = torus.n
    out = {"derham": [], "dolbeault": {}, "bott_chern": {}, "stable": True}
    for k in range(2 * n + 1):
        a, b = model.dims("derham", k)
        out["derham"].append(a)
        out["stable"] &= a == b
    for p, q in product(range(n + 1), repeat=2):
        for kind in ("dolbeault", "bott_chern"):
            a, b = model.dims(kind, p, q)
            out[kind][f"{p},{q}"] = a
            out["stable"] &= a == b
    out["rank_gap"] = model.min_gap
    out["confident"] = model.min_gap >= GAP_CONFIDENT
    return out


def bc_exact_sequence_report(torus: FlatTorus, theta, eps: float = EPS_RANK) -> dict:
    """Check exactness of H^1(L) + conj H^1(L) -> H^{1,1}_BC(L) -> H^2_theta at the middle term.

    Per mode: the first arrow sends del_theta(ker delbar_theta on (0,1)) and
    delbar_theta(ker del_theta on (1,0)) into (1,1)-forms; nu is the
    inclusion of Bott-Chern classes into twisted de Rham cohomology, so
    ker nu = (im d_theta intersected with (1,1)-forms) / im del_theta delbar_theta.
    """
    if not isinstance(theta, ConstantLeeForm):
        theta = ConstantLeeForm.of(theta, torus.n)
    model = SpectralModel(torus, theta, eps)
    n = torus.n
    i11 = bidegree_index(n, 1, 1)
    i2 = np.arange(len(basis(n, 2)))
    off11 = np.setdiff1d(i2, i11)

    def first_arrow(m):
        d01 = model._blocks("delbar_theta", (0, 1), (0, 2), m) if n > 1 else np.zeros((len(m), 0, n))
        d10 = model._blocks("del_theta", (1, 0), (2, 0), m) if n > 1 else np.zeros((len(m), 0, n))
        a = model._blocks("del_theta", (0, 1), (1, 1), m) @ kernel_projector(d01, eps)
        b = model._blocks("delbar_theta", (1, 0), (1, 1), m) @ kernel_projector(d10, eps)
        ddbar = model._blocks("del_theta", (0, 1), (1, 1), m) @ model._blocks("delbar_theta", (0, 0), (0, 1), m)
        return np.concatenate([a, b, ddbar], axis=2)

    def d_off11(m):
        return operator_blocks("d_theta", m, theta, 1)[:, off11, :]

    r_first = model._per_mode(("first_arrow",), first_arrow)
    r_ddbar = model._rank_ddbar(1, 1)
    r_d1 = model._full_rank_d(1)
    r_off = model._per_mode(("d_off11",), d_off11) if off11.size else np.zeros(len(model.modes), int)

    image_first = r_first - r_ddbar
    ker_nu = (r_d1 - r_off) - r_ddbar
    bc11 = model.bott_chern_per_mode(1, 1)
    rank_nu = bc11 - ker_nu

    def pair(x):
        return model._dims(x)

    dims = {
        "H1_L": pair(model.dolbeault_per_mode(0, 1)),
        "H1_L_conj": pair(model.dolbeault_conj_per_mode(1, 0)),
        "H11_BC": pair(bc11),
        "H2_theta": pair(model.derham_per_mode(2)),
        "rank_first_arrow": pair(image_first),
        "dim_ker_nu": pair(ker_nu),
        "rank_nu": pair(rank_nu),
    }
    stable = all(a == b for a, b in dims.values())
    per_mode_exact = bool(np.all(image_first == ker_nu))
    report = {k: v[0] for k, v in dims.items()}
    report.update(
        n=n,
        theta=list(theta.c),
        cutoff=torus.cutoff,
        stable=stable,
        per_mode_exact=per_mode_exact,
        rank_gap=model.min_gap,
        confident=model.min_gap >= GAP_CONFIDENT,
        exact=per_mode_exact and report["rank_first_arrow"] == report["dim_ker_nu"],
    )
    report["pass"] = report["exact"] and stable
    return report
