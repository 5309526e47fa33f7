"""Command-line front end: ``python -m w2lab <subcommand> ...``.

Every JSON document written to stdout carries ``"schema": "w2lab/1"``.
Exit status is 0 on success, 1 on a domain error (reported as
``{"error": {"code", "message"}}``) and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from . import io as wio
from .convex_order import convex_order_test
from .coupling import make_coupling
from .decomposition import decompose, in_I
from .differentiability import (
    diff_certificate,
    fd_derivative_check,
    prime_perturbation_demo,
    split_direction,
)
from .errors import W2LabError
from .eta import minimize_phi_over_face, objective_from_spec, tie_break_eta_phi
from .measure import convert
from .quantile import (
    barycentric_map_1d,
    comonotone_coupling,
    map_exists_1d,
    martingale_coupling_1d,
    w2_squared_1d,
)
from .suite import run_suite
from .transport import certify_structure, solve_w2

J = wio.array_to_json
S = wio.scalar_to_json


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _measures(args, *names):
    out = []
    for name in names:
        value = getattr(args, name)
        if value is None:
            raise UsageError(f"--{name} is required")
        out.append(wio.load_measure(value, args.mode))
    return out


def _coupling_doc(pi):
    return J(pi.matrix)


def cmd_w2(args):
    mu, nu = _measures(args, "mu", "nu")
    sol = solve_w2(mu, nu)
    cert = certify_structure(mu, nu, sol)
    return {
        "w2_squared": S(sol.w2_squared),
        "coupling": _coupling_doc(sol.coupling),
        "dual": {"u": J(sol.dual.u), "v": J(sol.dual.v)},
        "certificate": {
            "unique": cert.unique,
            "is_map": cert.is_map,
            "map": None if cert.map is None else J(cert.map),
            "conditional_variance": S(cert.conditional_variance),
            "witness_coupling": _coupling_doc(cert.witness_coupling),
        },
    }


def cmd_oned(args):
    mu, nu = _measures(args, "mu", "nu")
    ex = map_exists_1d(mu, nu)
    doc = {
        "w2_squared": S(w2_squared_1d(mu, nu)),
        "comonotone_coupling": _coupling_doc(comonotone_coupling(mu, nu)),
        "map_exists": ex.exists,
    }
    if ex.exists:
        doc["map"] = J(np.array(ex.map, dtype=object))
    else:
        doc["violating_atom"] = S(ex.violating_atom)
    doc["barycentric_map"] = J(barycentric_map_1d(mu, nu))
    doc["martingale_coupling"] = _coupling_doc(martingale_coupling_1d(mu, nu))
    return doc


def cmd_cx(args):
    eta, nu = _measures(args, "eta", "nu")
    res = convex_order_test(eta, nu)
    doc = {"ordered": res.ordered}
    if res.kernel is not None:
        doc["kernel"] = J(res.kernel.rows)
    if res.witness is not None:
        doc["witness"] = {
            "slopes": J(res.witness.slopes),
            "intercepts": J(res.witness.intercepts),
            "gap": S(res.witness.gap(eta, nu)),
        }
    return doc


def cmd_decompose(args):
    mu, nu = _measures(args, "mu", "nu")
    if args.coupling is not None:
        pi = make_coupling(wio.matrix_from_json(wio.load_json(args.coupling), mu.mode), mu, nu)
    else:
        pi = solve_w2(mu, nu).coupling
    dec = decompose(pi)
    doc = {
        "eta": wio.measure_to_json(dec.eta),
        "map": J(dec.map),
        "conditional_variance": S(dec.conditional_variance),
        "residual": S(dec.residual),
    }
    if args.eta is not None:
        eta = wio.load_measure(args.eta, args.mode or mu.mode)
        doc["in_I"] = in_I(mu, nu, eta, args.tol)
    return doc


def cmd_eta(args):
    mu, nu = _measures(args, "mu", "nu")
    spec = {"builtin": "norm_sq"} if args.phi is None else wio.load_json(args.phi)
    phi = objective_from_spec(spec, mu.dim)
    run = tie_break_eta_phi if args.tie_break else minimize_phi_over_face
    res = run(mu, nu, phi)
    return {
        "eta": wio.measure_to_json(res.eta),
        "pi": _coupling_doc(res.coupling),
        "map": J(res.map),
        "fw_gap": res.fw_gap,
    }


def cmd_diff(args):
    mu, nu = _measures(args, "mu", "nu")
    cert = diff_certificate(mu, nu)
    doc = {"differentiable": cert.differentiable}
    if cert.differentiable:
        doc["derivative"] = J(cert.derivative)
    else:
        doc["witness"] = {"coupling": _coupling_doc(cert.witness), "xi_norm_sq": S(cert.xi_norm_sq)}
    return doc


def _t_list(args, mode):
    raw = args.t_list or "1/10,1/100,1/1000,1/10000"
    try:
        return [convert(t, mode) for t in raw.split(",")]
    except W2LabError as exc:
        raise UsageError(f"bad --t-list: {exc}") from exc


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_fdcheck(args):
    mu, nu = _measures(args, "mu", "nu")
    ts = _t_list(args, mu.mode)
    cert = diff_certificate(mu, nu)
    if args.directions is not None:
        D = wio.load_json(args.directions)
        rep = fd_derivative_check(mu, nu, D, ts)
    elif cert.differentiable:
        rng = np.random.default_rng(args.seed)
        D = rng.integers(-4, 5, size=(mu.n, mu.dim)).tolist()
        rep = fd_derivative_check(mu, nu, D, ts)
    else:
        # no derivative: probe along the splitting direction of the witness
        pi = cert.witness
        rep = fd_derivative_check(mu, nu, split_direction(pi), ts, coupling=pi, require_differentiable=False)
    rows = [(S(t), S(r)) for t, r in zip(rep.t, rep.residuals)]
    sys.stderr.write(f"fitted_order={rep.fitted_order:.4f} differentiable={rep.differentiable}\n")
    return _csv(["t", "residual"], rows)


def cmd_primedemo(args):
    (nu,) = _measures(args, "nu")
    if args.primes:
        try:
            primes = [int(p) for p in args.primes.split(",")]
        except ValueError as exc:
            raise UsageError(f"bad --primes: {args.primes}") from exc
    else:
        primes = [2, 3, 5, 7]
    if args.mu is not None:
        samples = wio.load_measure(args.mu, "float").points
    else:
        samples = np.zeros((max(primes), nu.dim))
        samples[:, 0] = np.arange(max(primes))
    rep = prime_perturbation_demo(samples, nu, primes, seed=args.seed)
    return _csv(["p", "mass_feasible", "optimal_is_map"], [(p, int(f), int(m)) for p, f, m in rep.rows])


def cmd_example_suite(args):
    checks = run_suite()
    doc = {
        "passed": all(c.passed for c in checks),
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
    }
    return doc


COMMANDS = {
    "w2": (cmd_w2, "squared W2 distance with coupling, dual and structure certificate"),
    "oned": (cmd_oned, "closed-form one-dimensional transport"),
    "cx": (cmd_cx, "convex order test (--eta against --nu)"),
    "decompose": (cmd_decompose, "barycentric decomposition of an optimal coupling"),
    "eta": (cmd_eta, "minimize int phi d eta over barycentric images of optimal couplings"),
    "diff": (cmd_diff, "differentiability certificate of W2^2(., nu) at mu"),
    "fdcheck": (cmd_fdcheck, "finite-difference table (CSV) of the derivative remainder"),
    "primedemo": (cmd_primedemo, "prime-size empirical measures (CSV)"),
    "paper-suite": (cmd_example_suite, "rerun the worked examples"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="w2lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--mu", help="measure JSON (file or inline)")
        p.add_argument("--nu", help="measure JSON (file or inline)")
        p.add_argument("--eta", help="measure JSON (file or inline)")
        p.add_argument("--phi", help='objective JSON: {"A": [[...]], "b": [...]} or {"builtin": "norm_sq"}')
        p.add_argument("--coupling", help="coupling matrix JSON")
        p.add_argument("--directions", help="per-atom direction vectors JSON")
        p.add_argument("--mode", choices=["rational", "float"], help="override the measures' numeric mode")
        p.add_argument("--tol", type=_positive, help="tolerance override")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--t-list", help="comma-separated step sizes, e.g. 1/10,1/100")
        p.add_argument("--primes", help="comma-separated primes")
        p.add_argument("--tie-break", action="store_true", help="add the 1e-6 |x|^2 tie-break")
        p.add_argument("--out", help="write output here instead of stdout")
    return parser


def _positive(text):
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text}") from None
    if not val > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return val


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(code, message):
    return wio.dumps({"error": {"code": code, "message": message}}) + "\n"


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        result = COMMANDS[args.command][0](args)
    except UsageError as exc:
        sys.stdout.write(_error("usage", str(exc)))
        return 2
    except W2LabError as exc:
        sys.stdout.write(_error(exc.code, str(exc)))
        return 1
    status = 0
    if isinstance(result, dict):
        # the suite reports mismatches through its exit status
        status = 0 if result.get("passed", True) else 1
        result = wio.dumps(result) + "\n"
    _emit(result, args.out)
    return status


def main() -> None:
    sys.exit(run())

