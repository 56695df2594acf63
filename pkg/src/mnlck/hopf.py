"""Pointwise checks of the LCK structure on diagonal Hopf manifolds.

For A = diag(alpha_i) with 0 < |alpha_i| < 1 and C > 1 the potential
phi(z) = sum_i |z_i|^beta_i, beta_i = log C / log(1/|alpha_i|), satisfies
phi(Az) = phi(z) / C.  With theta = d log phi the Hermitian form
omega = -d^c theta + theta ^ I theta equals dd^c phi / phi.

Real coordinates are (x_1, y_1, ..., x_n, y_n).  Covectors and 2-forms are
arrays in that basis: a 2-form is an antisymmetric matrix W with
W[a, b] = omega(e_a, e_b).  I maps e_x -> e_y, e_y -> -e_x, acts on
covectors by (I eta)(X) = eta(IX), i.e. by I^T, and d^c f = I df.  Under
these conventions dd^c = -2i del delbar, and the metric is
g(X, Y) = omega(IX, Y), with matrix I^T W.

Two derivative routes are kept apart on purpose: closed-form derivatives of
sum |z_i|^beta_i, and central finite differences used only as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

BETA_TOL = 1e-14


class SingularPointError(ValueError):
    """Derivatives of |z_i|^beta_i blow up on {z_i = 0} when beta_i < 2."""


class DeformationError(ValueError):
    pass


def complex_structure(n: int) -> np.ndarray:
    J = np.zeros((2 * n, 2 * n))
    for j in range(n):
        J[2 * j + 1, 2 * j] = 1.0
        J[2 * j, 2 * j + 1] = -1.0
    return J


def to_real(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def to_complex(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[..., 0::2] + 1j * x[..., 1::2]


def wedge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(a ^ b)[..., i, j] = a_i b_j - a_j b_i for stacks of covectors."""
    return a[..., :, None] * b[..., None, :] - a[..., None, :] * b[..., :, None]


def ddc_matrix(hess: np.ndarray, J: np.ndarray) -> np.ndarray:
    """dd^c f from the real Hessian of f: H J - (H J)^T."""
    hj = hess @ J
    return hj - np.swapaxes(hj, -1, -2)


# ----------------------------------------------------------------------------
# closed-form derivatives of sum |z_i|^beta_i, vectorized over points


def _as_points(x, n):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[-1] != 2 * n:
        raise ValueError(f"expected {2 * n} real coordinates, got {x.shape[-1]}")
    return x


def potential_derivatives(betas, x):
    """phi, gradient and Hessian of sum r_i^beta_i at real points x (P, 2n).

    Raises ``SingularPointError`` at the origin, and on a hyperplane
    r_i = 0 whose exponent is below 2.
    """
    betas = np.asarray(betas, dtype=float)
    n = len(betas)
    x = _as_points(x, n)
    P = x.shape[0]
    xr, yr = x[:, 0::2], x[:, 1::2]
    r2 = xr**2 + yr**2
    if np.any(np.all(r2 == 0, axis=1)):
        raise SingularPointError("the potential is not defined at z = 0")
    on_plane = r2 == 0
    if np.any(on_plane & (betas[None, :] < 2)):
        raise SingularPointError("point lies on a coordinate hyperplane with exponent < 2")
    safe = np.where(on_plane, 1.0, r2)
    phi = np.sum(np.where(on_plane, 0.0, safe ** (betas / 2)), axis=1)
    # d(r^b) = b r^(b-2) (x dx + y dy)
    c1 = np.where(on_plane, np.where(betas == 2, 2.0, 0.0), betas * safe ** (betas / 2 - 1))
    c2 = np.where(on_plane, 0.0, betas * (betas - 2) * safe ** (betas / 2 - 2))
    grad = np.zeros((P, 2 * n))
    grad[:, 0::2] = c1 * xr
    grad[:, 1::2] = c1 * yr
    hess = np.zeros((P, 2 * n, 2 * n))
    for i in range(n):
        a, b = 2 * i, 2 * i + 1
        hess[:, a, a] = c1[:, i] + c2[:, i] * xr[:, i] ** 2
        hess[:, b, b] = c1[:, i] + c2[:, i] * yr[:, i] ** 2
        hess[:, a, b] = hess[:, b, a] = c2[:, i] * xr[:, i] * yr[:, i]
    return phi, grad, hess


def log_potential_derivatives(betas, x):
    """Gradient theta = d log phi and Hessian of log phi."""
    phi, grad, hess = potential_derivatives(betas, x)
    theta = grad / phi[:, None]
    return theta, hess / phi[:, None, None] - theta[:, :, None] * theta[:, None, :]


def lck_matrices(betas, x):
    """omega = -d^c theta + theta ^ I theta with theta = d log phi, as (P, 2n, 2n)."""
    n = len(betas)
    J = complex_structure(n)
    theta, hlog = log_potential_derivatives(betas, x)
    # d^c theta = d^c d log phi = -dd^c log phi
    return ddc_matrix(hlog, J) + wedge(theta, theta @ J)


def conformal_kahler_matrices(betas, x):
    """dd^c phi / phi, the second route to the same form."""
    J = complex_structure(len(betas))
    phi, _, hess = potential_derivatives(betas, x)
    return ddc_matrix(hess, J) / phi[:, None, None]


def metric_matrices(omega: np.ndarray) -> np.ndarray:
    J = complex_structure(omega.shape[-1] // 2)
    return J.T @ omega


def min_metric_eigenvalues(betas, x) -> np.ndarray:
    g = metric_matrices(lck_matrices(betas, x))
    return np.linalg.eigvalsh(0.5 * (g + np.swapaxes(g, -1, -2)))[:, 0]


# ----------------------------------------------------------------------------
# Hopf data


@dataclass(frozen=True)
class HopfData:
    alpha: tuple
    C: float

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=complex)
        if a.ndim != 1 or a.size < 1:
            raise ValueError("need at least one eigenvalue")
        if np.any(np.abs(a) <= 0) or np.any(np.abs(a) >= 1):
            raise ValueError("eigenvalues must satisfy 0 < |alpha_i| < 1")
        if not self.C > 1:
            raise ValueError("C must exceed 1")
        err = np.max(np.abs(np.abs(a) ** self.beta * self.C - 1))
        if err > BETA_TOL:
            raise ValueError(f"|alpha|^beta * C deviates from 1 by {err:.2e}")

    @classmethod
    def from_exponents(cls, betas, C: float, phases=None) -> "HopfData":
        """Eigenvalues with the given exponents: |alpha_i| = C^(-1/beta_i)."""
        betas = np.asarray(betas, dtype=float)
        phases = np.zeros_like(betas) if phases is None else np.asarray(phases, dtype=float)
        alpha = C ** (-1.0 / betas) * np.exp(1j * phases)
        return cls(tuple(complex(v) for v in alpha), float(C))

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def beta(self) -> np.ndarray:
        return np.log(self.C) / -np.log(np.abs(np.asarray(self.alpha, dtype=complex)))

    def act(self, z) -> np.ndarray:
        return np.asarray(self.alpha, dtype=complex) * np.asarray(z, dtype=complex)

    def as_dict(self) -> dict:
        a = np.asarray(self.alpha, dtype=complex)
        return {"alpha_re": a.real.tolist(), "alpha_im": a.imag.tolist(), "C": self.C, "beta": self.beta.tolist()}


def _point(H: HopfData, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.size != H.n:
        raise ValueError(f"point needs {H.n} complex coordinates")
    if not np.any(z):
        raise SingularPointError("z must be nonzero")
    return z


def potential(H: HopfData, z) -> float:
    z = _point(H, z)
    return float(np.sum(np.abs(z) ** H.beta))


def lee_form(H: HopfData, z) -> np.ndarray:
    """theta = d log phi at z, a real covector."""
    z = _point(H, z)
    r = np.abs(z)
    if np.any((r == 0) & (H.beta < 1)):
        raise SingularPointError("d log phi is singular on a hyperplane with exponent < 1")
    safe = np.where(r == 0, 1.0, r)
    c = np.where(r == 0, 0.0, H.beta * safe ** (H.beta - 2))
    g = np.empty(2 * H.n)
    g[0::2] = c * z.real
    g[1::2] = c * z.imag
    return g / potential(H, z)


def lee_field(H: HopfData, z) -> np.ndarray:
    """Holomorphic vector field -sum z_i log|alpha_i| d/dz_i."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    return -z * np.log(np.abs(np.asarray(H.alpha, dtype=complex)))


def lee_field_delbar_residual(H: HopfData, z, h: float = 1e-6) -> float:
    """max |d field / d zbar_j| by central differences (0 for a holomorphic field)."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    worst = 0.0
    for j in range(H.n):
        e = np.zeros(H.n, complex)
        e[j] = h
        dx = (lee_field(H, z + e) - lee_field(H, z - e)) / (2 * h)
        dy = (lee_field(H, z + 1j * e) - lee_field(H, z - 1j * e)) / (2 * h)
        worst = max(worst, float(np.max(np.abs(0.5 * (dx + 1j * dy)))))
    return worst


@dataclass(frozen=True)
class PointFrame:
    z: np.ndarray
    phi: float
    theta: np.ndarray
    i_theta: np.ndarray
    omega: np.ndarray
    metric: np.ndarray

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.metric + self.metric.T))[0])

    @property
    def antisymmetry_residual(self) -> float:
        return float(np.max(np.abs(self.omega + self.omega.T)))

    @property
    def invariance_residual(self) -> float:
        """max |omega(IX, IY) - omega(X, Y)|."""
        J = complex_structure(len(self.theta) // 2)
        return float(np.max(np.abs(J.T @ self.omega @ J - self.omega)))

    @property
    def metric_symmetry_residual(self) -> float:
        return float(np.max(np.abs(self.metric - self.metric.T)))


def lck_form(H: HopfData, z) -> PointFrame:
    z = _point(H, z)
    x = to_real(z)[None]
    J = complex_structure(H.n)
    theta, _ = log_potential_derivatives(H.beta, x)
    omega = lck_matrices(H.beta, x)[0]
    return PointFrame(z, potential(H, z), theta[0], theta[0] @ J, omega, J.T @ omega)


# ----------------------------------------------------------------------------
# finite-difference residuals


def _fd_derivative(field, x: np.ndarray, step: float) -> np.ndarray:
    """Central differences: out[a] = d field / d x_a at x."""
    out = []
    for a in range(len(x)):
        e = np.zeros_like(x)
        e[a] = step
        out.append((field(x + e) - field(x - e)) / (2 * step))
    return np.array(out)


def _exterior_derivative_2form(dW: np.ndarray) -> np.ndarray:
    """(d omega)_{abc} from dW[a, b, c] = d_a omega_bc, for a < b < c."""
    m = dW.shape[0]
    return np.array([dW[a, b, c] - dW[b, a, c] + dW[c, a, b] for a, b, c in combinations(range(m), 3)])


def _wedge_1_2(t: np.ndarray, W: np.ndarray) -> np.ndarray:
    m = len(t)
    return np.array([t[a] * W[b, c] - t[b] * W[a, c] + t[c] * W[a, b] for a, b, c in combinations(range(m), 3)])


def structure_equation_residual(H: HopfData, z, h: float, *, closed_form: bool = False) -> float:
    """Relative residual of d omega = lee ^ omega by central differences with step h|z|.

    The Lee form of omega = dd^c phi / phi is -d log phi.  The residual is
    max over triples of |FD(d omega) - lee ^ omega| divided by
    max|omega| * max|lee|.  With ``closed_form`` the form is dd^c phi and the
    Lee form is 0, so d omega itself is measured (relative to max|omega| / |z|).
    In complex dimension 1 there are no 3-forms and the residual is 0.
    """
    z = _point(H, z)
    if H.n == 1:
        return 0.0
    x0 = to_real(z)
    step = h * float(np.linalg.norm(z))
    J = complex_structure(H.n)
    if closed_form:
        def field(x):
            return ddc_matrix(potential_derivatives(H.beta, x[None])[2], J)[0]
        d_omega = _exterior_derivative_2form(_fd_derivative(field, x0, step))
        scale = float(np.max(np.abs(field(x0)))) / float(np.linalg.norm(z))
        return float(np.max(np.abs(d_omega))) / scale

    def field(x):
        return lck_matrices(H.beta, x[None])[0]

    omega = field(x0)
    lee = -log_potential_derivatives(H.beta, x0[None])[0][0]
    d_omega = _exterior_derivative_2form(_fd_derivative(field, x0, step))
    scale = float(np.max(np.abs(omega)) * np.max(np.abs(lee)))
    return float(np.max(np.abs(d_omega - _wedge_1_2(lee, omega)))) / scale


@dataclass(frozen=True)
class QuadraticPotential:
    """f(x) = c + b.x + x^T Q x / 2 on R^{2n}."""

    c: float
    b: np.ndarray
    Q: np.ndarray

    @classmethod
    def constant(cls, c: float, n: int) -> "QuadraticPotential":
        return cls(float(c), np.zeros(2 * n), np.zeros((2 * n, 2 * n)))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "QuadraticPotential":
        Q = rng.normal(size=(2 * n, 2 * n))
        return cls(float(rng.normal()), rng.normal(size=2 * n), Q + Q.T)

    def value(self, x):
        return self.c + x @ self.b + 0.5 * x @ self.Q @ x

    def grad(self, x):
        return self.b + self.Q @ x

    def hess(self, x):
        return self.Q


def expansion_terms(f: QuadraticPotential, theta, hess_log, x) -> list:
    """The terms f (theta ^ I theta + d^c theta), -theta ^ d^c f, I theta ^ df, dd^c f, analytic."""
    J = complex_structure(len(x) // 2)
    df = f.grad(x)
    i_theta = theta @ J
    dc_theta = -ddc_matrix(hess_log, J)
    return [
        f.value(x) * (wedge(theta, i_theta) + dc_theta),
        -wedge(theta, df @ J),
        wedge(i_theta, df),
        ddc_matrix(f.hess(x), J),
    ]


def twisted_ddc_expansion(f: QuadraticPotential, theta, hess_log, x) -> np.ndarray:
    return sum(expansion_terms(f, theta, hess_log, x))


def potential_identity_residual(H: HopfData | None, f: QuadraticPotential, z, h: float) -> float:
    """Compare d_theta d^c_theta f by nested central differences against its expansion.

    theta = d log phi for the Hopf potential of ``H``, or 0 when ``H`` is
    None.  The inner step builds d^c_theta f = I df - f I theta from a
    finite-difference df; the outer step takes a finite-difference d (same
    absolute step h) and subtracts theta ^ .  Returns max|difference|
    divided by the largest entry of any single term of the expansion (or 1).
    """
    z = np.asarray(z, dtype=complex).reshape(-1)
    n = z.size
    x0 = to_real(z)
    J = complex_structure(n)

    def theta_at(x):
        if H is None:
            return np.zeros(2 * n)
        return log_potential_derivatives(H.beta, x[None])[0][0]

    def dc_theta_f(x):
        df = _fd_derivative(f.value, x, h)
        return df @ J - f.value(x) * (theta_at(x) @ J)

    D = _fd_derivative(dc_theta_f, x0, h)
    theta = theta_at(x0)
    lhs = (D - D.T) - wedge(theta, dc_theta_f(x0))
    hess_log = np.zeros((2 * n, 2 * n)) if H is None else log_potential_derivatives(H.beta, x0[None])[1][0]
    terms = expansion_terms(f, theta, hess_log, x0)
    rhs = sum(terms)
    scale = max([1.0] + [float(np.max(np.abs(t))) for t in terms])
    return float(np.max(np.abs(lhs - rhs))) / scale


def lee_form_fd_error(H: HopfData, z, h: float) -> float:
    """max |central-difference d log phi - closed-form theta|."""
    z = _point(H, z)
    x0 = to_real(z)
    g = _fd_derivative(lambda x: np.log(potential(H, to_complex(x))), x0, h)
    return float(np.max(np.abs(g - lee_form(H, z))))


def richardson_ratio(residual, h: float) -> float:
    """residual(h) / residual(h/2); about 4 for a second-order scheme."""
    coarse, fine = residual(h), residual(h / 2)
    return float(coarse / fine) if fine > 0 else float("inf")


# ----------------------------------------------------------------------------
# sampling and the rational deformation of the Lee class


def sample_annulus(n: int, count: int, rng: np.random.Generator, r_min: float = 0.1, r_max: float = 10.0) -> np.ndarray:
    """Points of C^n with log-uniform |z| in [r_min, r_max] and uniform direction."""
    direction = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = np.exp(rng.uniform(np.log(r_min), np.log(r_max), size=count))
    return direction * radius[:, None]


def automorphy_errors(H: HopfData, points) -> np.ndarray:
    """|phi(Az) - phi(z)/C| / phi(z) per point."""
    pts = np.asarray(points, dtype=complex)
    phi = np.sum(np.abs(pts) ** H.beta, axis=1)
    phi_a = np.sum(np.abs(H.act(pts)) ** H.beta, axis=1)
    return np.abs(phi_a - phi / H.C) / phi


@dataclass(frozen=True)
class RationalDeformation:
    periods: tuple
    scale: float
    ratios: tuple
    error: float
    tol: float
    max_denominator: int

    def as_dict(self) -> dict:
        return {
            "periods": list(self.periods),
            "scale": self.scale,
            "ratios": [str(r) for r in self.ratios],
            "error": self.error,
            "tol": self.tol,
            "max_denominator": self.max_denominator,
        }


def convergents(x: float):
    """Continued-fraction convergents of x (exact expansion of the float)."""
    q = Fraction(x)
    h0, h1, k0, k1 = 0, 1, 1, 0
    while True:
        a = q.numerator // q.denominator
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield Fraction(h1, k1)
        frac = q - a
        if frac == 0:
            return
        q = 1 / frac


def last_convergent(x: float, max_denominator: int) -> Fraction:
    """Last convergent of x whose denominator is at most ``max_denominator``."""
    best = None
    for c in convergents(x):
        if c.denominator > max_denominator:
            break
        best = c
    return best


def rational_lee_deformation(periods, tol: float, max_denominator: int = 100) -> RationalDeformation:
    """Nearby periods with rational ratios: p' = s * r with r_i of denominator <= max_denominator.

    s is the first nonzero period and r_i the last continued-fraction
    convergent of p_i / s within the denominator bound, so the period map of
    p' has infinite cyclic image.
    """
    p = [float(v) for v in periods]
    if not tol > 0:
        raise DeformationError("tol must be positive")
    if not any(p):
        raise DeformationError("all periods vanish; the character is trivial")
    s = next(v for v in p if v != 0)
    ratios = tuple(last_convergent(v / s, max_denominator) for v in p)
    new = tuple(s * float(r) for r in ratios)
    err = max(abs(a - b) for a, b in zip(p, new))
    if err > tol:
        raise DeformationError(
            f"last convergent with denominator <= {max_denominator} misses by {err:.3e} > tol={tol}; raise max_denominator"
        )
    return RationalDeformation(new, s, ratios, err, tol, max_denominator)


def _perturbations(n: int, rng: np.random.Generator, count: int) -> np.ndarray:
    """Unit sup-norm directions: all sign corners (n small) plus random ones."""
    corners = np.array(np.meshgrid(*[[-1.0, 1.0]] * n, indexing="ij")).reshape(n, -1).T
    rand = rng.uniform(-1, 1, size=(count, n))
    rand /= np.max(np.abs(rand), axis=1, keepdims=True)
    return np.vstack([corners, rand])


def deformed_min_eigenvalue(betas, delta: float, directions: np.ndarray, points) -> float:
    """Smallest metric eigenvalue over points and exponent perturbations of sup-size delta (-inf if some exponent <= 0)."""
    x = to_real(points)
    worst = float("inf")
    for u in directions:
        b = np.asarray(betas, dtype=float) + delta * u
        if np.any(b <= 0):
            return float("-inf")
        worst = min(worst, float(np.min(min_metric_eigenvalues(b, x))))
    return worst


def positivity_threshold(betas, points, rng: np.random.Generator, n_directions: int = 8, iterations: int = 20) -> float:
    """Empirical sup-norm size of exponent perturbations that keeps omega' positive at ``points``.

    Bisection on delta in [0, 2 max beta]; each trial checks sign corners and
    ``n_directions`` random directions.
    """
    betas = np.asarray(betas, dtype=float)
    dirs = _perturbations(len(betas), rng, n_directions)
    lo, hi = 0.0, 2.0 * float(np.max(betas))
    if deformed_min_eigenvalue(betas, hi, dirs, points) > 0:
        return hi
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if deformed_min_eigenvalue(betas, mid, dirs, points) > 0:
            lo = mid
        else:
            hi = mid
    return lo
