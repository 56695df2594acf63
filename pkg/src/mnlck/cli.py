"""Command-line entry point: ``mnlck <subcommand>``.

Every run writes one JSON report (stdout, or ``--output``) with sorted keys:
``config`` echoes the inputs, ``results`` holds values and pass flags,
``versions`` and ``timings`` are kept apart so reports of identical runs
differ only in ``timings``.  A short human-readable summary goes to stderr
unless ``--quiet``.

Exit codes: 0 all checks pass, 1 a check failed, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import platform
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__, acceptance, hopf, spectral
from .complex import Character, Cochain, ComplexError, LeeCocycle, NotClosedError, holonomy
from .io import InputError, cochain_to_json, complex_to_json, load_cochain, load_complex
from .library import rotation
from .linalg import KERNEL
from .mapping_torus import base_character, fiber_loops, kunneth_with_circle, mapping_torus
from .twisted import AssemblyError, assemble_twisted, betti_report, twisted_betti

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def _floats(text: str, what: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _complexes(text: str, what: str) -> list:
    try:
        return [complex(v.strip().replace(" ", "")) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"{what}: expected comma-separated (complex) numbers, got {text!r}") from None


def _fraction(text: str, what: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"{what}: cannot parse {text!r} as a rational") from None


# ----------------------------------------------------------------------------
# subcommands: each returns (results dict, passed bool, summary lines)


def cmd_betti(args):
    K = load_complex(args.complex)
    tc = assemble_twisted(K, None, args.backend)
    rep = betti_report(tc)
    rep["f_vector"] = list(K.f_vector)
    ok = rep["euler"] == K.euler_characteristic and rep["confidence"] == "high"
    return rep, ok, [f"f-vector {list(K.f_vector)}", f"betti {rep['betti']}"]


def cmd_mn_betti(args):
    K = load_complex(args.complex)
    if (args.weights is None) == (args.theta is None):
        raise InputError("pass exactly one of --weights (edge weights) or --theta (additive Lee cocycle)")
    if args.weights is not None:
        theta = Character(K, load_cochain(args.weights, K, 1).values)
    else:
        theta = LeeCocycle(load_cochain(args.theta, K, 1))
    tc = assemble_twisted(K, theta, args.backend)
    rep = betti_report(tc)
    residual = tc.square_residual()
    rep["f_vector"] = list(K.f_vector)
    rep["square_residual"] = float(residual)
    ok = (residual == 0 if args.backend == "rational" else residual <= 1e-12)
    ok = ok and rep["euler"] == K.euler_characteristic
    if args.expect is not None:
        expect = [int(v) for v in args.expect.split(",")]
        rep["expected"] = expect
        ok = ok and rep["betti"] == expect
    return rep, ok, [f"betti {rep['betti']} ({args.backend}, confidence {rep['confidence']})"]


def _automorphism(name_or_perm: str, fiber_ref: str, W):
    if name_or_perm == "id":
        return None
    if name_or_perm == "rot":
        stem = fiber_ref[:-5] if fiber_ref.endswith(".json") else fiber_ref
        try:
            rot = rotation(stem)
        except ComplexError:
            raise InputError("--auto rot needs a built-in fiber; pass an explicit permutation instead") from None
        if rot is None:
            raise InputError(f"{stem} has no nontrivial automorphism")
        return rot
    try:
        return tuple(int(v) for v in name_or_perm.split(","))
    except ValueError:
        raise InputError(f"--auto must be id, rot, or a comma-separated permutation; got {name_or_perm!r}") from None


def cmd_suspend(args):
    W = load_complex(args.fiber)
    phi = _automorphism(args.auto, args.fiber, W)
    t = _fraction(args.t, "--t")
    if t <= 0:
        raise InputError("--t must be positive")
    if args.check_vanishing and t == 1:
        raise InputError("--check-vanishing needs t != 1")
    M = mapping_torus(W, phi, args.layers)
    chi = base_character(M, t, "rational")
    betti = twisted_betti(assemble_twisted(M.complex, chi, "rational"))
    rep = {
        "f_vector": list(M.complex.f_vector),
        "euler": M.complex.euler_characteristic,
        "phi": list(M.phi),
        "base_loop": list(M.base_loop),
        "base_holonomy": holonomy(M.complex, chi, M.base_loop),
        "fiber_holonomies": sorted({str(holonomy(M.complex, chi, loop)) for loop in fiber_loops(M)}),
        "betti": list(betti),
        "kunneth_untwisted": list(kunneth_with_circle(W)),
    }
    ok = rep["euler"] == 0 and rep["base_holonomy"] == t
    if args.check_vanishing:
        rep["vanishing"] = all(b == 0 for b in betti)
        ok = ok and rep["vanishing"]
    if args.emit_complex:
        with open(args.emit_complex, "w") as fh:
            json.dump(complex_to_json(M.complex), fh)
        with open(args.emit_complex + ".weights.json", "w") as fh:
            json.dump(cochain_to_json(Cochain(chi.complex, 1, chi.weights)), fh)
    return rep, ok, [f"f-vector {rep['f_vector']}", f"twisted betti {rep['betti']} at t={t}"]


def cmd_torus_spectral(args):
    theta_vals = _floats(args.theta, "--theta")
    if len(theta_vals) != 2 * args.n:
        raise InputError(f"--theta needs {2 * args.n} components for n={args.n}")
    if args.n < 1 or args.cutoff < 2:
        raise InputError("need n >= 1 and cutoff >= 2")
    T = spectral.FlatTorus(args.n, args.cutoff)
    theta = spectral.ConstantLeeForm.of(theta_vals, args.n)
    if args.report == "bc-sequence":
        rep = spectral.bc_exact_sequence_report(T, theta)
        ok = rep["pass"]
        lines = [f"H1={rep['H1_L']} H1bar={rep['H1_L_conj']} BC11={rep['H11_BC']} H2={rep['H2_theta']}",
                 f"rank first arrow {rep['rank_first_arrow']}, dim ker nu {rep['dim_ker_nu']}, exact {rep['exact']}"]
    else:
        rep = spectral.all_dims(T, theta)
        ok = rep["stable"]
        lines = [f"de Rham {rep['derham']}", f"Dolbeault {rep['dolbeault']}", f"Bott-Chern {rep['bott_chern']}"]
    return rep, ok, lines


HOPF_CHECKS = ("automorphy", "positivity", "structure", "identity")


def _histogram(values) -> dict:
    v = np.log10(np.maximum(np.asarray(values, dtype=float), 1e-300))
    counts, edges = np.histogram(v, bins=np.arange(-18, 1))
    return {"log10_bin_edges": edges.tolist(), "counts": counts.tolist()}


def cmd_hopf_verify(args):
    alpha = _complexes(args.alpha, "--alpha")
    H = hopf.HopfData(tuple(alpha), args.C)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    unknown = sorted(set(checks) - set(HOPF_CHECKS))
    if unknown:
        raise InputError(f"unknown checks {unknown}; choose from {HOPF_CHECKS}")
    streams = np.random.SeedSequence(args.seed).spawn(len(HOPF_CHECKS))
    rng = {name: np.random.default_rng(s) for name, s in zip(HOPF_CHECKS, streams)}
    rep = {"hopf": H.as_dict()}
    ok = True
    lines = [f"beta = {np.round(H.beta, 6).tolist()}"]
    if "automorphy" in checks:
        err = hopf.automorphy_errors(H, hopf.sample_annulus(H.n, args.points, rng["automorphy"]))
        passed = bool(err.max() <= 1e-12)
        rep["automorphy"] = {"max_relative_error": float(err.max()), "histogram": _histogram(err), "pass": passed}
        ok &= passed
        lines.append(f"automorphy max rel error {err.max():.2e}")
    if "positivity" in checks:
        z = hopf.sample_annulus(H.n, args.points, rng["positivity"])
        try:
            lam = hopf.min_metric_eigenvalues(H.beta, hopf.to_real(z))
        except hopf.SingularPointError as e:
            raise InputError(str(e)) from None
        passed = bool(lam.min() > 0)
        rep["positivity"] = {
            "min": float(lam.min()), "median": float(np.median(lam)), "max": float(lam.max()),
            "quantiles_1_10_50": np.quantile(lam, [0.01, 0.1, 0.5]).tolist(), "pass": passed,
        }
        ok &= passed
        lines.append(f"min metric eigenvalue {lam.min():.3e}")
    if "structure" in checks:
        if H.n == 1:
            rep["structure"] = {"vacuous": True, "reason": "no 3-forms in complex dimension 1", "pass": True}
        else:
            res, ratios = [], []
            for zz in hopf.sample_annulus(H.n, args.structure_points, rng["structure"]):
                res.append(hopf.structure_equation_residual(H, zz, args.h))
                ratios.append(res[-1] / hopf.structure_equation_residual(H, zz, args.h / 2))
            passed = max(res) <= 1e-5 and 3.5 <= min(ratios) and max(ratios) <= 4.5
            rep["structure"] = {"h": args.h, "max_residual": max(res), "histogram": _histogram(res),
                                "richardson_min": min(ratios), "richardson_max": max(ratios), "pass": passed}
            ok &= passed
            lines.append(f"structure residual max {max(res):.2e}, Richardson {min(ratios):.3f}..{max(ratios):.3f}")
    if "identity" in checks:
        res, flat = [], []
        for _ in range(args.structure_points):
            f = hopf.QuadraticPotential.random(H.n, rng["identity"])
            zz = hopf.sample_annulus(H.n, 1, rng["identity"], 3.0, 6.0)[0]
            res.append(hopf.potential_identity_residual(H, f, zz, args.h))
            flat.append(hopf.potential_identity_residual(None, f, zz, args.h))
        passed = max(res) <= 1e-6 and max(flat) <= 1e-8
        rep["identity"] = {"h": args.h, "max_residual": max(res), "max_residual_theta_zero": max(flat),
                           "histogram": _histogram(res), "sample_radius": [3.0, 6.0], "pass": passed}
        ok &= passed
        lines.append(f"potential identity residual max {max(res):.2e}")
    return rep, ok, lines


def cmd_deform_lee(args):
    periods = _floats(args.periods, "--periods")
    try:
        dec = hopf.rational_lee_deformation(periods, args.tol, args.dmax)
    except hopf.DeformationError as e:
        return {"error": str(e), "pass": False}, False, [str(e)]
    rep = {"deformation": dec.as_dict()}
    ok = True
    lines = [f"ratios {[str(r) for r in dec.ratios]}, error {dec.error:.3e}"]
    if args.alpha is not None:
        if args.C is None:
            raise InputError("--alpha needs --C")
        H = hopf.HopfData(tuple(_complexes(args.alpha, "--alpha")), args.C)
        rng = np.random.default_rng(np.random.SeedSequence(args.seed))
        z = hopf.sample_annulus(H.n, args.points, rng)
        threshold = hopf.positivity_threshold(H.beta, z, rng)
        at_half = hopf.deformed_min_eigenvalue(H.beta, threshold / 2, hopf._perturbations(H.n, rng, 32), z)
        beta_dec = hopf.rational_lee_deformation(H.beta, args.tol, args.dmax)
        lam = float(np.min(hopf.min_metric_eigenvalues(np.asarray(beta_dec.periods), hopf.to_real(z))))
        rep["hopf"] = {
            "config": H.as_dict(), "empirical_threshold": threshold,
            "min_eigenvalue_at_half_threshold": at_half,
            "rationalized_exponents": beta_dec.as_dict(), "min_eigenvalue_rationalized": lam,
        }
        ok = at_half > 0 and lam > 0
        lines.append(f"empirical threshold {threshold:.4f}; min eigenvalue after rationalizing {lam:.3e}")
    return rep, ok, lines


def cmd_selftest(args):
    results = []
    lines = []
    for crit in acceptance.CRITERIA:
        r = crit(args.seed)
        results.append(r.as_dict())
        lines.append(r.line())
    return {"criteria": results}, all(r["pass"] for r in results), lines


# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mnlck", description="Twisted cohomology and LCK structure checks.")
    p.add_argument("--version", action="version", version=f"mnlck {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
        s.add_argument("--quiet", "-q", action="store_true", help="no human-readable summary on stderr")
        s.set_defaults(func=fn)
        return s

    s = add("betti", cmd_betti, "untwisted Betti numbers of a complex")
    s.add_argument("--complex", required=True, help="complex JSON file or built-in name")
    s.add_argument("--backend", choices=("rational", "float"), default="rational")

    s = add("mn-betti", cmd_mn_betti, "twisted (Morse-Novikov) Betti numbers")
    s.add_argument("--complex", required=True)
    s.add_argument("--weights", help="1-cochain JSON of positive edge weights t(e)")
    s.add_argument("--theta", help="additive closed 1-cochain JSON (float backend)")
    s.add_argument("--backend", choices=("rational", "float"), default="rational")
    s.add_argument("--expect", help="expected Betti vector, comma-separated")

    s = add("suspend", cmd_suspend, "mapping torus of a fiber automorphism")
    s.add_argument("--fiber", required=True)
    s.add_argument("--auto", default="id", help="id, rot, or a vertex permutation like 1,2,0")
    s.add_argument("--layers", type=int, default=3)
    s.add_argument("--t", default="2", help="base holonomy, a positive rational like 2/1")
    s.add_argument("--check-vanishing", action="store_true")
    s.add_argument("--emit-complex", help="also write the suspension (and its weights) as JSON")

    s = add("torus-spectral", cmd_torus_spectral, "Fourier model on a flat torus")
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--theta", default=None, help="2n comma-separated real components")
    s.add_argument("--cutoff", type=int, default=8)
    s.add_argument("--report", choices=("dims", "bc-sequence"), default="dims")

    s = add("hopf-verify", cmd_hopf_verify, "pointwise LCK checks on a diagonal Hopf manifold")
    s.add_argument("--alpha", required=True, help="eigenvalues, e.g. 0.3678,0.5 or 0.3+0.1j,0.5")
    s.add_argument("--C", type=float, required=True)
    s.add_argument("--points", type=int, default=1000)
    s.add_argument("--structure-points", type=int, default=20)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--h", type=float, default=1e-3)
    s.add_argument("--checks", default=",".join(HOPF_CHECKS))

    s = add("deform-lee", cmd_deform_lee, "rational approximation of Lee periods")
    s.add_argument("--periods", required=True)
    s.add_argument("--tol", type=float, default=1e-2)
    s.add_argument("--dmax", type=int, default=100)
    s.add_argument("--alpha", help="optional Hopf eigenvalues for the positivity check")
    s.add_argument("--C", type=float)
    s.add_argument("--points", type=int, default=1000)
    s.add_argument("--seed", type=int, default=acceptance.DEFAULT_SEED)

    s = add("selftest", cmd_selftest, "run the acceptance suite")
    s.add_argument("--seed", type=int, default=acceptance.DEFAULT_SEED)
    return p


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "output", "quiet")}
    cfg["threads"] = os.environ.get("MNLCK_THREADS")
    if args.command == "torus-spectral" and cfg.get("theta") is None:
        cfg["theta"] = ",".join(["0"] * (2 * args.n))
        args.theta = cfg["theta"]
    return cfg


def _versions() -> dict:
    return {"mnlck": __version__, "numpy": np.__version__, "python": platform.python_version(), "rank_kernel": KERNEL}


def run(argv=None) -> tuple:
    """Parse ``argv``, run the subcommand, write the report; returns (exit code, report)."""
    args = build_parser().parse_args(argv)
    config = _config(args)
    start = time.perf_counter()
    try:
        results, passed, lines = args.func(args)
        code = EXIT_PASS if passed else EXIT_FAIL
    except (InputError, ComplexError, NotClosedError, AssemblyError, ValueError) as e:
        results, passed, lines, code = {"error": f"{type(e).__name__}: {e}"}, False, [f"input error: {e}"], EXIT_INPUT
    except spectral.CutoffInstabilityError as e:
        results, passed, lines, code = {"error": str(e)}, False, [str(e)], EXIT_FAIL
    report = {
        "command": args.command,
        "config": config,
        "results": results,
        "pass": passed,
        "exit_code": code,
        "versions": _versions(),
        "timings": {"wall_seconds": time.perf_counter() - start},
    }
    report = _jsonable(report)
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if not args.quiet:
        for line in lines:
            print(line, file=sys.stderr)
        print(f"{args.command}: {'PASS' if passed else 'FAIL'} (exit {code})", file=sys.stderr)
    return code, report


def main(argv=None) -> int:
    return run(argv)[0]


def _alias(command):
    def entry() -> int:
        return main([command, *sys.argv[1:]])
    return entry


mn_betti_main = _alias("mn-betti")
torus_spectral_main = _alias("torus-spectral")
hopf_verify_main = _alias("hopf-verify")
deform_lee_main = _alias("deform-lee")


if __name__ == "__main__":
    sys.exit(main())
