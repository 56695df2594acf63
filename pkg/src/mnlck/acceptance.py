"""The acceptance suite: ten property checks, each returning a structured result.

Used by ``mnlck selftest`` and by ``tests/test_acceptance.py``.  Every
randomized check draws from ``numpy.random.SeedSequence(seed)`` children so
results are reproducible and independent of execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import lcm

import numpy as np

from . import hopf, spectral
from .complex import Character, SimplicialComplex, build_complex, holonomy
from .library import circle, named, rotation
from .linalg import nullspace_exact
from .mapping_torus import kunneth_with_circle, mapping_torus, vanishing_check
from .twisted import assemble_twisted, conjugate, gauge_transform, twisted_betti, twisted_coboundary

DEFAULT_SEED = 20240611


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d}. {self.name}"

    def as_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "pass": self.passed, "details": self.details}


def _rng(seed: int, key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed).spawn(key + 1)[key])


# ----------------------------------------------------------------------------
# random complexes with closed characters


def random_subcomplex(rng: np.random.Generator, vertices: int = 7, max_dim: int = 3) -> SimplicialComplex:
    """Face closure of a random set of simplices from the ``max_dim``-skeleton of a simplex."""
    tops = []
    for d in range(1, max_dim + 1):
        cand = list(combinations(range(vertices), d + 1))
        p = rng.uniform(0.05, 0.35)
        tops += [s for s in cand if rng.random() < p]
    return build_complex(vertices, tops)


def integer_cocycle_basis(K: SimplicialComplex) -> list:
    """Integer 1-cocycles spanning ker(delta^1) over Q."""
    D1 = twisted_coboundary(K, (Fraction(1),) * K.count(1), 1, Fraction(1))
    if D1.shape[0] == 0:
        vecs = [[Fraction(int(i == j)) for j in range(K.count(1))] for i in range(K.count(1))]
    else:
        vecs = nullspace_exact(D1)
    out = []
    for v in vecs:
        scale = lcm(*(x.denominator for x in v))
        out.append([int(x * scale) for x in v])
    return out


_SMALL_RATIONALS = [Fraction(p, q) for p in range(1, 6) for q in range(1, 6)]


def random_character(K: SimplicialComplex, rng: np.random.Generator) -> Character:
    """Exact closed character: product of q_j^{z_j(e)} over an integer cocycle basis, times a random gauge."""
    basis = integer_cocycle_basis(K)
    weights = [Fraction(1)] * K.count(1)
    for z in basis:
        q = _SMALL_RATIONALS[rng.integers(len(_SMALL_RATIONALS))]
        weights = [w * q ** zi for w, zi in zip(weights, z)]
    g = [_SMALL_RATIONALS[rng.integers(len(_SMALL_RATIONALS))] for _ in range(K.vertex_count)]
    weights = [w * g[v] / g[u] for (u, v), w in zip(K.edges, weights)]
    return Character(K, tuple(weights))


def random_instances(seed: int, count: int = 100):
    rng = _rng(seed, 3)
    out = []
    while len(out) < count:
        K = random_subcomplex(rng)
        if K.count(1) == 0:
            continue
        out.append((K, random_character(K, rng)))
    return out


# ----------------------------------------------------------------------------
# criteria


def criterion_1(seed: int = DEFAULT_SEED) -> CriterionResult:
    rows = {}
    ok = True
    for n in (3, 4, 12):
        K = circle(n)
        for t, expect in ((Fraction(1), (1, 1)), (Fraction(2), (0, 0))):
            w = tuple(t if e == (0, 1) else Fraction(1) for e in K.edges)
            chi = Character(K, w)
            b = twisted_betti(assemble_twisted(K, chi, "rational"))
            hol = holonomy(K, chi, list(range(n)) + [0])
            rows[f"circle{n} t={t}"] = {"betti": list(b), "holonomy": str(hol)}
            ok &= b == expect and hol == t
    return CriterionResult(1, "twisted circle Betti (1,1) at t=1, (0,0) at t=2", ok, rows)


FIBERS = ("point", "circle3", "tetra", "torus9", "rp2_6")


def criterion_2(seed: int = DEFAULT_SEED) -> CriterionResult:
    rows = {}
    ok = True
    for name in FIBERS:
        W = named(name)
        autos = [("id", None)]
        rot = rotation(name)
        if rot is not None:
            autos.append(("rot", rot))
        for label, phi in autos:
            kun = kunneth_with_circle(W)
            untw = twisted_betti(assemble_twisted(mapping_torus(W, phi).complex, None, "rational"))
            entry = {"kunneth": list(kun), "t=1": list(untw)}
            ok &= untw == kun
            for t in ("2", "3", "1/2"):
                rep = vanishing_check(W, phi, t)
                entry[f"t={t}"] = rep["betti"]
                ok &= rep["pass"] and rep["base_holonomy"] == str(Fraction(t)) and rep["fiber_holonomies"] in ([], ["1"])
            rows[f"{name}/{label}"] = entry
    return CriterionResult(2, "mapping-torus vanishing for t in {2,3,1/2}; Kunneth at t=1", ok, rows)


def criterion_3(seed: int = DEFAULT_SEED, instances: int = 100, gauges: int = 50) -> CriterionResult:
    rng = _rng(seed, 30)
    square_ok = gauge_ok = euler_ok = conj_ok = True
    for K, chi in random_instances(seed, instances):
        tc = assemble_twisted(K, chi, "rational")
        square_ok &= tc.square_residual() == 0
        b = twisted_betti(tc)
        euler_ok &= sum((-1) ** k * x for k, x in enumerate(b)) == K.euler_characteristic
        for _ in range(gauges):
            g = [_SMALL_RATIONALS[rng.integers(len(_SMALL_RATIONALS))] for _ in range(K.vertex_count)]
            new, diag = gauge_transform(tc, g=g)
            gauge_ok &= twisted_betti(new) == b
            for k, D in enumerate(tc.matrices):
                conj_ok &= conjugate(D, diag[k + 1], diag[k]).rows == new.matrices[k].rows
    ok = square_ok and gauge_ok and euler_ok and conj_ok
    return CriterionResult(3, "D^2 = 0, gauge invariance, Euler identity on random instances", ok, {
        "instances": instances, "gauges_per_instance": gauges, "seed": seed,
        "square_zero": square_ok, "gauge_invariant": gauge_ok, "euler": euler_ok, "conjugation": conj_ok,
    })


def criterion_4(seed: int = DEFAULT_SEED) -> CriterionResult:
    rows = {}
    ok = True
    for N in (6, 8):
        T = spectral.FlatTorus(1, N)
        d0 = spectral.all_dims(T, spectral.ConstantLeeForm.zero(1))
        d1 = spectral.all_dims(T, spectral.ConstantLeeForm.of((1, 0), 1))
        rows[f"N={N}"] = {"theta=0": d0, "theta=(1,0)": d1}
        ok &= d0["derham"] == [1, 2, 1] and d0["dolbeault"]["0,1"] == 1 and d0["bott_chern"]["1,1"] == 1
        ok &= not any(d1["derham"]) and not any(d1["dolbeault"].values()) and not any(d1["bott_chern"].values())
        ok &= d0["stable"] and d1["stable"]
    return CriterionResult(4, "flat torus n=1 dims and cutoff stability", bool(ok), rows)


def criterion_5(seed: int = DEFAULT_SEED, cutoff: int = 6) -> CriterionResult:
    rows = {}
    ok = True
    for n in (1, 2):
        for label, theta in (("0", (0.0,) * (2 * n)), ("(1,0)", (1.0,) + (0.0,) * (2 * n - 1))):
            rep = spectral.bc_exact_sequence_report(spectral.FlatTorus(n, cutoff), theta)
            rows[f"n={n} theta={label}"] = rep
            ok &= rep["pass"]
    return CriterionResult(5, "Bott-Chern exact sequence: rank im(del+delbar) = dim ker nu", bool(ok), rows)


HOPF_CONFIGS = {
    "n1_beta2": dict(betas=[2.0], C=math.e ** 2),
    "n2_beta2_3": dict(betas=[2.0, 3.0], C=math.e ** 2),
    "n2_mixed_rotating": dict(betas=[2.6, 3.7], C=5.0, phases=[0.7, -1.1]),
    "n2_cli_example": dict(betas=[math.log(7.389) / -math.log(0.3678), math.log(7.389) / -math.log(0.5)], C=7.389),
    "n3_mixed": dict(betas=[2.0, 2.5, 3.9], C=4.0, phases=[0.3, 1.9, -2.2]),
}


def hopf_config(name: str) -> hopf.HopfData:
    cfg = HOPF_CONFIGS[name]
    return hopf.HopfData.from_exponents(cfg["betas"], cfg["C"], cfg.get("phases"))


def criterion_6(seed: int = DEFAULT_SEED, points: int = 1000) -> CriterionResult:
    rows = {}
    ok = True
    for i, name in enumerate(HOPF_CONFIGS):
        H = hopf_config(name)
        z = hopf.sample_annulus(H.n, points, _rng(seed, 60 + i))
        err = float(np.max(hopf.automorphy_errors(H, z)))
        rows[name] = {"max_relative_error": err, "beta": H.beta.tolist()}
        ok &= err <= 1e-12
    return CriterionResult(6, "Hopf automorphy phi(Az) = phi(z)/C", bool(ok), rows)


def criterion_7(seed: int = DEFAULT_SEED, points: int = 1000, structure_points: int = 20) -> CriterionResult:
    rows = {}
    ok = True
    for i, name in enumerate(HOPF_CONFIGS):
        H = hopf_config(name)
        rng = _rng(seed, 70 + i)
        z = hopf.sample_annulus(H.n, points, rng)
        lam = hopf.min_metric_eigenvalues(H.beta, hopf.to_real(z))
        entry = {"min_eigenvalue": float(lam.min())}
        ok &= bool(lam.min() > 0)
        if H.n >= 2:
            res, ratios = [], []
            for zz in hopf.sample_annulus(H.n, structure_points, rng):
                res.append(hopf.structure_equation_residual(H, zz, 1e-3))
                ratios.append(res[-1] / hopf.structure_equation_residual(H, zz, 5e-4))
            entry.update(max_residual=max(res), ratio_min=min(ratios), ratio_max=max(ratios))
            ok &= max(res) <= 1e-5 and 3.5 <= min(ratios) and max(ratios) <= 4.5
        else:
            entry["structure"] = "vacuous: no 3-forms in complex dimension 1"
        rows[name] = entry
    return CriterionResult(7, "LCK positivity on the annulus and d omega = lee ^ omega at O(h^2)", bool(ok), rows)


def criterion_8(seed: int = DEFAULT_SEED, potentials: int = 20) -> CriterionResult:
    rng = _rng(seed, 80)
    H = hopf_config("n2_beta2_3")
    twisted, untwisted = [], []
    for _ in range(potentials):
        f = hopf.QuadraticPotential.random(H.n, rng)
        z = hopf.sample_annulus(H.n, 1, rng, 3.0, 6.0)[0]
        twisted.append(hopf.potential_identity_residual(H, f, z, 1e-3))
        untwisted.append(hopf.potential_identity_residual(None, f, z, 1e-3))
    rel = []
    srng = _rng(seed, 81)
    for n in (1, 2):
        theta = spectral.ConstantLeeForm.of(srng.normal(size=2 * n), n)
        for _ in range(10):
            f = spectral.random_form(n, 0, 6, srng)
            lhs = spectral.apply_operator("d_theta", spectral.apply_operator("dc_theta", f, theta), theta)
            rhs = spectral.apply_operator("del_delbar_theta", f, theta).scale(-2j)
            rel.append((lhs - rhs).max_abs() / max(1.0, rhs.max_abs()))
    ok = max(twisted) <= 1e-6 and max(untwisted) <= 1e-8 and max(rel) <= 1e-12
    return CriterionResult(8, "potential expansion identity and d_theta d^c_theta = -2i del_theta delbar_theta", bool(ok), {
        "max_residual_hopf_theta": max(twisted), "max_residual_theta_zero": max(untwisted),
        "max_spectral_identity_residual": max(rel), "sample_radius": [3.0, 6.0], "h": 1e-3,
    })


def criterion_9(seed: int = DEFAULT_SEED, points: int = 1000) -> CriterionResult:
    dec = hopf.rational_lee_deformation([1.0, math.sqrt(2.0)], 1e-2, 100)
    ok = dec.ratios == (Fraction(1), Fraction(99, 70)) and dec.error <= 1e-4
    H = hopf_config("n2_beta2_3")
    rng = _rng(seed, 90)
    z = hopf.sample_annulus(H.n, points, rng)
    threshold = hopf.positivity_threshold(H.beta, z, rng)
    check_dirs = hopf._perturbations(H.n, rng, 32)
    at_half = hopf.deformed_min_eigenvalue(H.beta, threshold / 2, check_dirs, z)
    beta_dec = hopf.rational_lee_deformation(H.beta * math.sqrt(2.0), 1e-2, 100)
    lam_rational = float(np.min(hopf.min_metric_eigenvalues(np.asarray(beta_dec.periods), hopf.to_real(z))))
    ok = ok and at_half > 0 and lam_rational > 0
    return CriterionResult(9, "rational Lee deformation and positivity under small perturbation", bool(ok), {
        "sqrt2": dec.as_dict(), "empirical_threshold": threshold, "min_eigenvalue_at_half_threshold": at_half,
        "rationalized_exponents": beta_dec.as_dict(), "min_eigenvalue_rationalized": lam_rational,
    })


def criterion_10(seed: int = DEFAULT_SEED, forms: int = 50) -> CriterionResult:
    rng = _rng(seed, 100)
    idem = killed = closed = mode0 = commute = True
    for i in range(forms):
        n = 1 + i % 2
        p = int(rng.integers(1, 2 * n + 1))
        exact = spectral.apply_operator("d", spectral.random_form(n, p - 1, 4, rng))
        const = spectral.random_form(n, p, 0, rng, n_modes=1)
        form = exact + const
        axis = int(rng.integers(2 * n))
        avg = spectral.circle_average(form, axis)
        scale = max(1.0, form.max_abs())
        idem &= np.array_equal(spectral.circle_average(avg, axis).coeffs, avg.coeffs)
        killed &= not np.any(avg.coeffs[avg.modes[:, axis] != 0])
        closed &= spectral.apply_operator("d", avg).max_abs() <= 1e-12 * scale
        mode0 &= np.array_equal(avg.mode_zero(), form.mode_zero())
        theta = spectral.ConstantLeeForm.of(rng.normal(size=2 * n), n)
        lhs = spectral.apply_operator("d_theta", avg, theta)
        rhs = spectral.circle_average(spectral.apply_operator("d_theta", form, theta), axis)
        commute &= (lhs - rhs).max_abs() <= 1e-12 * scale
    ok = idem and killed and closed and mode0 and commute
    return CriterionResult(10, "circle averaging: idempotent, invariant, closed, class-preserving", bool(ok), {
        "forms": forms, "idempotent": idem, "kills_modes": killed, "closed": closed,
        "mode0_preserved": mode0, "commutes_with_d_theta": commute,
    })


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10)


def run_all(seed: int = DEFAULT_SEED) -> list:
    return [c(seed) for c in CRITERIA]
