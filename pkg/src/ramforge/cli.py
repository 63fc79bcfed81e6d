"""Command-line front end.

Machine output is JSON (sorted keys, written atomically); human output is
tab-separated tables on stdout.  Exit codes follow the error classes:
2 validation, 3 precision, 4 hypothesis violated, 5 residual nonzero.
"""

from __future__ import annotations

import argparse
import ast
import os
import random
import sys
from dataclasses import asdict, dataclass, field

from . import serialize as ser
from .criterion import (CHAR_ZERO_CONSISTENT, closed_form_predict, criterion_check,
                        predict_in)
from .errors import PrecisionError, RamforgeError, ResidualError, ValidationError, is_limit
from .herbrand import (criterion_window, phi_from_filtration, psi_from_filtration,
                       synthetic_filtration, upper_breaks)
from .lifting import ConjugatedLubinTateOracle, case1_reduce, level_space, rectify
from .lubintate import FrobeniusSeries, group_reduce, lt_group, reduce_endo
from .nottingham import NottElem, finite_quotient_filtration, ram_sequence
from .ring import FiniteField, RingSpec, make_ring
from .series import Series

DEFAULT_SEED = 20240617
THREADS_ENV = "RAMFORGE_THREADS"


@dataclass(frozen=True)
class JobConfig:
    """One CLI invocation; equal configs produce identical bytes."""

    command: str
    ring: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED

    def to_json(self) -> str:
        return ser.dumps({"format": ser.FORMAT, "kind": "job", **asdict(self)})


def threads_from_env(env=None) -> int:
    """Validated cap on worker threads (1 when unset)."""
    raw = (os.environ if env is None else env).get(THREADS_ENV)
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"{THREADS_ENV}={raw!r} is not an integer") from None
    if n < 1:
        raise ValidationError(f"{THREADS_ENV} must be >= 1")
    return n


# ----------------------------------------------------------------------------
# input parsing

_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Pow)


def parse_alpha(text: str, ring: RingSpec):
    """Evaluate an integer expression in ``pi`` and ``w`` inside O_K.

    Only integer literals, + - * and nonnegative integer powers (``**``
    or ``^``) are accepted.
    """
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError:
        raise ValidationError(f"cannot parse element {text!r}") from None

    def ev(node):
        if isinstance(node, ast.Constant) and type(node.value) is int:
            return node.value
        if isinstance(node, ast.Name) and node.id in ("pi", "w"):
            return ring.pi() if node.id == "pi" else ring.omega()
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Pow):
                if not isinstance(b, int) or b < 0:
                    raise ValidationError("exponents must be nonnegative integers")
                return a ** b
            a = ring(a) if isinstance(a, int) and not isinstance(b, int) else a
            b = ring(b) if isinstance(b, int) and not isinstance(a, int) else b
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            return a * b
        raise ValidationError(f"unsupported syntax in {text!r}")

    val = ev(tree.body)
    return ring(val) if isinstance(val, int) else val


def _fq_entry(tok: str, fld: FiniteField):
    parts = tok.split(":")
    if len(parts) > fld.f or not all(p.strip().lstrip("-").isdigit() for p in parts):
        raise ValidationError(f"bad F_q coefficient {tok!r}")
    return [int(p) for p in parts]


def load_series(spec: str, p: int | None = None, f: int = 1) -> Series:
    """A series JSON file, or inline comma-separated F_q coefficients c_1, c_2, ...

    Inline entries are prime-field integers or ``a:b:...`` coordinate vectors.
    """
    if spec.endswith(".json"):
        return ser.series_from_json(ser.load_file(spec))
    if p is None:
        raise ValidationError("inline series need --p")
    fld = FiniteField(p, f)
    coeffs = [_fq_entry(t.strip(), fld) for t in spec.split(",") if t.strip()]
    if not coeffs:
        raise ValidationError("empty series")
    return Series.from_coeffs(fld, coeffs)


def _ring(cfg: JobConfig, prec: int | None = None) -> RingSpec:
    r = cfg.ring
    return make_ring(r["p"], r["f"], r["e"], prec=r["N"] if prec is None else prec)


# ----------------------------------------------------------------------------
# output helpers

def _table(out, header, rows) -> None:
    out.write("\t".join(header) + "\n")
    for row in rows:
        out.write("\t".join(str(c) for c in row) + "\n")


def _emit(doc, path: str | None, out) -> None:
    text = ser.dumps(doc)
    if path:
        ser.write_atomic(path, text)
    else:
        out.write(text)


def _fmt(v) -> str:
    return v.name if is_limit(v) else str(v)


# ----------------------------------------------------------------------------
# commands

def cmd_ring_info(cfg, out):
    R = _ring(cfg)
    _table(out, ["field", "value"], [
        ("p", R.p), ("f", R.f), ("e", R.e), ("q", R.q), ("d", R.d), ("prec", R.prec),
        ("inertial_poly", list(R.inertial_poly)),
        ("eisenstein_poly", [list(c) if isinstance(c, tuple) else c for c in R.eisenstein_poly]),
    ])
    return 0


def cmd_lt_build(cfg, out):
    o = cfg.options
    R = _ring(cfg)
    T = o["T"] if o.get("T") is not None else R.q + 3
    G = lt_group(FrobeniusSeries.canonical(R), T, R.prec)
    _emit(ser.group_to_json(G), cfg.outputs.get("out"), out)
    return 0


def _load_group(path):
    return ser.group_from_json(ser.load_file(path))


def cmd_lt_endo(cfg, out):
    o = cfg.options
    G = _load_group(o["group"])
    s = G.endo(parse_alpha(o["alpha"], G.ring), o["deg"])
    _emit(ser.series_to_json(s), cfg.outputs.get("out"), out)
    return 0


def cmd_lt_reduce(cfg, out):
    o = cfg.options
    G = _load_group(o["group"])
    if o.get("alpha") is None:
        _emit(ser.biseries_to_json(group_reduce(G).F), cfg.outputs.get("out"), out)
    else:
        s = reduce_endo(G, parse_alpha(o["alpha"], G.ring), o["deg"])
        _emit(ser.series_to_json(s), cfg.outputs.get("out"), out)
    return 0


def cmd_lt_check(cfg, out):
    G = _load_group(cfg.options["group"])
    results = G.check_axioms()
    _table(out, ["axiom", "holds"], sorted(results.items()))
    failed = [k for k, ok in results.items() if not ok]
    if failed:
        raise ResidualError(f"axioms failed: {', '.join(sorted(failed))}")
    return 0


def cmd_ram_profile(cfg, out):
    o = cfg.options
    s = load_series(o["series"])
    prof = ram_sequence(NottElem(s), o["nmax"])
    _table(out, ["n", "i_n"], [(n, _fmt(v)) for n, v in enumerate(prof.values)])
    if cfg.outputs.get("out"):
        _emit(ser.profile_to_json(prof), cfg.outputs["out"], out)
    if not prof.complete:
        raise PrecisionError(f"some i_n lie beyond the truncation {prof.trunc}")
    return 0


def cmd_ram_filtration(cfg, out):
    o = cfg.options
    gens = [NottElem(load_series(path)) for path in o["series"]]
    filt = finite_quotient_filtration(gens, o["n"], o["budget"])
    _emit(ser.filtration_to_json(filt), cfg.outputs.get("out"), out)
    return 0


def _filtrations(o) -> list:
    if o.get("filtration"):
        return [ser.filtration_from_json(ser.load_file(p)) for p in o["filtration"]]
    if o.get("q") is None or o.get("r") is None:
        raise ValidationError("give --filtration files or --q and --r")
    return [synthetic_filtration(o["q"], o["r"], o["levels"])]


def cmd_herbrand_phi(cfg, out):
    o = cfg.options
    filt = _filtrations(o)[0]
    fn = psi_from_filtration(filt) if o.get("psi") else phi_from_filtration(filt)
    _table(out, ["from", "slope"], zip(fn.breakpoints, fn.slopes))
    if cfg.outputs.get("out"):
        _emit(ser.pl_to_json(fn), cfg.outputs["out"], out)
    return 0


def cmd_herbrand_breaks(cfg, out):
    filt = _filtrations(cfg.options)[0]
    _table(out, ["lower", "upper"], zip(filt.breaks, upper_breaks(filt)))
    return 0


def cmd_herbrand_window(cfg, out):
    w = criterion_window(_filtrations(cfg.options))
    _table(out, ["stat", "value"], [("min_ratio", w["min_ratio"]), ("max_ratio", w["max_ratio"]),
                                    ("samples", len(w["samples"]))])
    return 0


def cmd_criterion_check(cfg, out):
    o = cfg.options
    R = _ring(cfg)
    T = o["T"] if o.get("T") is not None else R.q + 3
    G = lt_group(FrobeniusSeries.canonical(R), T, R.prec)
    rep = criterion_check(G, parse_alpha(o["alpha"], R), o["nmax"], o.get("D"))
    _table(out, ["n", "i_n"], [(n, _fmt(v)) for n, v in enumerate(rep.profile)])
    out.write("\n")
    _table(out, ["k", "ratio"], enumerate(rep.ratio_values))
    out.write("\n")
    _table(out, ["field", "value"], [("d", rep.d_expected), ("kappa", rep.kappa_found),
                                     ("verdict", rep.verdict)])
    if rep.verdict != CHAR_ZERO_CONSISTENT or rep.d_expected != R.d:
        return 4
    return 0


def cmd_criterion_predict(cfg, out):
    o = cfg.options
    if o.get("i0") is not None:
        if o.get("i1") is None or o.get("d") is None:
            raise ValidationError("the closed form needs --i0, --i1 and --d")
        val = closed_form_predict(o["i0"], o["i1"], o["d"], cfg.ring["p"], o["n"], o["kappa"])
    else:
        if o.get("ell") is None:
            raise ValidationError("give --ell, or --i0/--i1/--d")
        val = predict_in(o["ell"], o["n"], _ring(cfg))
    _table(out, ["n", "i_n"], [(o["n"], val)])
    return 0


def cmd_lift_zspace(cfg, out):
    o = cfg.options
    p, f = cfg.ring.get("p"), cfg.ring.get("f", 1)
    zeta = load_series(o["zeta"], p, f)
    mu = load_series(o["mu"], p, f)
    D = o["deg"]
    zeta, mu = (s if s.trunc >= D else _pad(s, D) for s in (zeta, mu))
    ls = level_space(zeta, mu, D, o["r"], o["theta_min"])
    _table(out, ["space", "dim"], sorted(ls.dims.items()))
    return 0


def _pad(s: Series, D: int) -> Series:
    """Zero-extend an exact polynomial to truncation D."""
    return Series(s.base, list(s._c) + [s.base.zero.v] * (D - s.trunc))


def cmd_lift_rectify(cfg, out):
    o = cfg.options
    g = ser.series_from_json(ser.load_file(o["input"]), "$")
    frob, T, n_group, psi0 = ser.oracle_params_from_json(ser.load_file(o["oracle"]))
    F = lt_group(frob, T, n_group)
    oracle = ConjugatedLubinTateOracle(F, psi0)
    res = rectify(g, oracle, F, o["target"], o.get("deg"))
    outdir = cfg.outputs.get("outdir") or "."
    ser.write_atomic(os.path.join(outdir, "psi.json"), ser.dumps(ser.series_to_json(res.psi)))
    ser.write_atomic(os.path.join(outdir, "transcript.json"), ser.dumps(ser.rectify_to_json(res)))
    _table(out, ["field", "value"], [("case", res.case), ("achieved_level", res.achieved_level),
                                     ("beta", ser.elem_to_json(res.beta))])
    return 0


def cmd_lift_case1(cfg, out):
    o = cfg.options
    g = ser.series_from_json(ser.load_file(o["input"]))
    u = ser.series_from_json(ser.load_file(o["u"]))
    h = case1_reduce(g, u)
    _emit(ser.series_to_json(h), cfg.outputs.get("out"), out)
    return 0


def cmd_lift_conjugate(cfg, out):
    """Make a test pair: g = psi0 [beta]_F psi0^(-1) and the family it belongs to."""
    o = cfg.options
    N, D = o["target"], o["deg"]
    W = o["window"] if o.get("window") is not None else 2 * D
    prec = N + D + 4
    R = _ring(cfg, prec)
    F = lt_group(FrobeniusSeries.canonical(R), o["T"], prec)
    if o.get("psi0"):
        coeffs = [parse_alpha(t, R) for t in o["psi0"].split(",")]
    else:
        rng = random.Random(cfg.seed)
        coeffs = [1] + [rng.randrange(R.p ** 2) for _ in range(3)]
    psi0 = Series.from_coeffs(R, coeffs, W)
    oracle = ConjugatedLubinTateOracle(F, psi0)
    g = oracle.conjugate(parse_alpha(o["beta"], R), W, N + D + 2)
    outdir = cfg.outputs.get("outdir") or "."
    ser.write_atomic(os.path.join(outdir, "g.json"), ser.dumps(ser.series_to_json(g)))
    ser.write_atomic(os.path.join(outdir, "family.json"),
                     ser.dumps(ser.oracle_to_json(F.frob, o["T"], prec, psi0)))
    return 0


COMMANDS = {
    "ring info": cmd_ring_info,
    "lt build": cmd_lt_build, "lt endo": cmd_lt_endo,
    "lt reduce": cmd_lt_reduce, "lt check": cmd_lt_check,
    "ram profile": cmd_ram_profile, "ram filtration": cmd_ram_filtration,
    "herbrand phi": cmd_herbrand_phi, "herbrand breaks": cmd_herbrand_breaks,
    "herbrand window": cmd_herbrand_window,
    "criterion check": cmd_criterion_check, "criterion predict": cmd_criterion_predict,
    "lift zspace": cmd_lift_zspace, "lift rectify": cmd_lift_rectify,
    "lift case1": cmd_lift_case1, "lift conjugate": cmd_lift_conjugate,
}


def run(config: JobConfig, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        threads_from_env()
        handler = COMMANDS.get(config.command)
        if handler is None:
            raise ValidationError(f"unknown command {config.command!r}")
        return handler(config, out)
    except RamforgeError as exc:
        err.write(f"error [{exc.code}]: {exc}\n")
        return exc.exit_code


# ----------------------------------------------------------------------------
# argument parsing

_RING_KEYS = ("p", "f", "e", "N")
_OUTPUT_KEYS = ("out", "outdir")


def _ring_args(ap, required=True, N=16):
    ap.add_argument("--p", type=int, required=required)
    ap.add_argument("--f", type=int, default=1)
    ap.add_argument("--e", type=int, default=1)
    ap.add_argument("--N", type=int, default=N, help="pi-adic precision")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ramforge", description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    groups = ap.add_subparsers(dest="_group", required=True)

    def sub(group, name):
        sp = subs[group].add_parser(name)
        sp.set_defaults(command=f"{group} {name}")
        return sp

    subs = {g: groups.add_parser(g).add_subparsers(dest="action", required=True)
            for g in ("ring", "lt", "ram", "herbrand", "criterion", "lift")}

    _ring_args(sub("ring", "info"))

    sp = sub("lt", "build")
    _ring_args(sp)
    sp.add_argument("--T", type=int, help="total degree (default q + 3)")
    sp.add_argument("--out", default="F.json")
    for name in ("endo", "reduce"):
        sp = sub("lt", name)
        sp.add_argument("--group", default="F.json")
        sp.add_argument("--alpha", required=name == "endo")
        sp.add_argument("--deg", type=int, default=16)
        sp.add_argument("--out")
    sp = sub("lt", "check")
    sp.add_argument("--group", default="F.json")

    sp = sub("ram", "profile")
    sp.add_argument("--series", required=True)
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--out")
    sp = sub("ram", "filtration")
    sp.add_argument("--series", nargs="+", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--budget", type=int, default=10 ** 4)
    sp.add_argument("--out")

    for name in ("phi", "breaks", "window"):
        sp = sub("herbrand", name)
        sp.add_argument("--filtration", nargs="+")
        sp.add_argument("--q", type=int)
        sp.add_argument("--r", type=int)
        sp.add_argument("--levels", type=int, default=3)
        if name == "phi":
            sp.add_argument("--psi", action="store_true", help="emit the inverse function")
            sp.add_argument("--out")

    sp = sub("criterion", "check")
    _ring_args(sp)
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--T", type=int)
    sp.add_argument("--D", type=int, help="fixed truncation (default adaptive)")
    sp = sub("criterion", "predict")
    _ring_args(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--ell", type=int)
    sp.add_argument("--i0", type=int)
    sp.add_argument("--i1", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--kappa", type=int, default=0)

    sp = sub("lift", "zspace")
    _ring_args(sp, required=False)
    sp.add_argument("--zeta", required=True)
    sp.add_argument("--mu", required=True)
    sp.add_argument("--deg", type=int, required=True)
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("--theta-min", dest="theta_min", type=int, default=2)
    sp = sub("lift", "rectify")
    sp.add_argument("--input", required=True)
    sp.add_argument("--oracle", required=True)
    sp.add_argument("--target", type=int, required=True)
    sp.add_argument("--deg", type=int)
    sp.add_argument("--outdir")
    sp = sub("lift", "case1")
    sp.add_argument("--input", required=True)
    sp.add_argument("--u", required=True)
    sp.add_argument("--out")
    sp = sub("lift", "conjugate")
    _ring_args(sp)
    sp.add_argument("--beta", required=True)
    sp.add_argument("--psi0", help="comma-separated coefficients c_1, c_2, ...")
    sp.add_argument("--target", type=int, default=8)
    sp.add_argument("--deg", type=int, default=64)
    sp.add_argument("--window", type=int)
    sp.add_argument("--T", type=int, default=6)
    sp.add_argument("--outdir")
    return ap


def config_from_args(ns: argparse.Namespace) -> JobConfig:
    raw = {k: v for k, v in vars(ns).items() if k not in ("_group", "action", "command", "seed")}
    ring = {k: raw.pop(k) for k in _RING_KEYS if k in raw}
    outputs = {k: raw.pop(k) for k in _OUTPUT_KEYS if k in raw}
    return JobConfig(ns.command, ring, raw, outputs, ns.seed)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
