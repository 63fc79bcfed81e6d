"""Versioned JSON encodings for rings, elements, series and results.

Every top-level document carries ``"format": 1`` and a ``"kind"`` tag.
Decoding validates structure and reports the offending field as a path
such as ``$.coeffs[3]``.  Encoding is canonical, so decode followed by
encode reproduces the input bytes.
"""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction

from .errors import INFINITE_AT_PRECISION, IDENTITY_AT_PRECISION, SchemaError, ValidationError, is_limit
from .herbrand import PiecewiseLinear
from .lubintate import FormalGroupLaw, FrobeniusSeries
from .nottingham import FiniteFiltration
from .ring import FiniteField, FqElem, OKElem, RingSpec
from .series import BiSeries, Series

FORMAT = 1
_LIMITS = {"INFINITE_AT_PRECISION": INFINITE_AT_PRECISION,
           "IDENTITY_AT_PRECISION": IDENTITY_AT_PRECISION}


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory and rename."""
    folder = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(folder, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=".json")
    except OSError as exc:
        raise ValidationError(f"{path}: cannot write ({exc.strerror})") from exc
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_file(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise SchemaError(f"{path}: no such file") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


# ----------------------------------------------------------------------------
# field access with path diagnostics

def _get(obj, key, path, kind=None):
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: expected an object")
    if key not in obj:
        raise SchemaError(f"{path}.{key}: missing")
    val = obj[key]
    if kind is not None and not _is(val, kind):
        raise SchemaError(f"{path}.{key}: expected {kind.__name__ if isinstance(kind, type) else kind}")
    return val


def _is(val, kind) -> bool:
    if kind is int:
        return isinstance(val, int) and not isinstance(val, bool)
    if kind == "intlist":
        return isinstance(val, list) and all(_is(v, int) for v in val)
    return isinstance(val, kind)


def _header(doc, kind: str, path="$"):
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected an object")
    fmt = doc.get("format")
    if fmt != FORMAT:
        raise SchemaError(f"{path}.format: expected {FORMAT}, got {fmt!r}")
    got = doc.get("kind")
    if got != kind:
        raise SchemaError(f"{path}.kind: expected {kind!r}, got {got!r}")


def _doc(kind: str, **body) -> dict:
    return {"format": FORMAT, "kind": kind, **body}


def _limit_or_int(v):
    return v.name if is_limit(v) else v


def _parse_value(v, path):
    if isinstance(v, str):
        if v not in _LIMITS:
            raise SchemaError(f"{path}: unknown marker {v!r}")
        return _LIMITS[v]
    if not _is(v, int):
        raise SchemaError(f"{path}: expected an integer or a precision marker")
    return v


def _frac(x: Fraction) -> list:
    x = Fraction(x)
    return [x.numerator, x.denominator]


def _parse_frac(v, path) -> Fraction:
    if _is(v, int):
        return Fraction(v)
    if not (isinstance(v, list) and len(v) == 2 and all(_is(c, int) for c in v)) or v[1] == 0:
        raise SchemaError(f"{path}: expected [numerator, denominator]")
    return Fraction(v[0], v[1])


# ----------------------------------------------------------------------------
# rings and fields

def ring_to_json(ring: RingSpec) -> dict:
    eis = [list(c) if isinstance(c, tuple) else c for c in ring.eisenstein_poly]
    return {"p": ring.p, "f": ring.f, "e": ring.e, "inertial_poly": list(ring.inertial_poly),
            "eisenstein_poly": eis, "prec": ring.prec}


def ring_from_json(obj, path="$") -> RingSpec:
    p = _get(obj, "p", path, int)
    f = _get(obj, "f", path, int)
    e = _get(obj, "e", path, int)
    prec = _get(obj, "prec", path, int)
    inert = obj.get("inertial_poly")
    if inert is not None and not _is(inert, "intlist"):
        raise SchemaError(f"{path}.inertial_poly: expected a list of integers")
    eis = obj.get("eisenstein_poly")
    if eis is not None:
        if not isinstance(eis, list):
            raise SchemaError(f"{path}.eisenstein_poly: expected a list")
        for i, c in enumerate(eis):
            if not (_is(c, int) or _is(c, "intlist")):
                raise SchemaError(f"{path}.eisenstein_poly[{i}]: expected an integer or list")
        eis = tuple(tuple(c) if isinstance(c, list) else c for c in eis)
    return RingSpec(p, f, e, None if inert is None else tuple(inert), eis, prec)


def field_to_json(fld: FiniteField) -> dict:
    return {"Fq": {"p": fld.p, "f": fld.f, "modulus": list(fld.modulus)}}


def field_from_json(obj, path="$") -> FiniteField:
    inner = _get(obj, "Fq", path, dict)
    p = _get(inner, "p", path + ".Fq", int)
    f = _get(inner, "f", path + ".Fq", int)
    mod = _get(inner, "modulus", path + ".Fq", "intlist")
    return FiniteField(p, f, tuple(mod))


def base_to_json(base):
    return field_to_json(base) if isinstance(base, FiniteField) else ring_to_json(base)


def base_from_json(obj, path="$"):
    if isinstance(obj, dict) and "Fq" in obj:
        return field_from_json(obj, path)
    return ring_from_json(obj, path)


# ----------------------------------------------------------------------------
# elements

def elem_to_json(x) -> list:
    """O_K: rows indexed by the power of pi, each an f-vector; F_q: an f-vector."""
    if isinstance(x, FqElem):
        return list(x.v)
    return [list(r) for r in x.coeffs]


def _raw_to_json(base, raw) -> list:
    if isinstance(base, FiniteField):
        return list(raw)
    f = base.f
    return [list(raw[i * f:(i + 1) * f]) for i in range(base.e)]


def _raw_from_json(base, val, prec, path):
    if isinstance(base, FiniteField):
        if not _is(val, "intlist") or len(val) != base.f:
            raise SchemaError(f"{path}: expected a list of {base.f} integers")
        return tuple(c % base.p for c in val)
    if not (isinstance(val, list) and len(val) == base.e
            and all(_is(r, "intlist") and len(r) == base.f for r in val)):
        raise SchemaError(f"{path}: expected {base.e} rows of {base.f} integers")
    flat = [c for r in val for c in r]
    return base._canon(flat, prec)


def okelem_to_json(x: OKElem) -> dict:
    return {"coeffs": elem_to_json(x), "prec": x.known_prec}


def okelem_from_json(ring: RingSpec, obj, path="$") -> OKElem:
    prec = _get(obj, "prec", path, int)
    raw = _raw_from_json(ring, _get(obj, "coeffs", path), prec, path + ".coeffs")
    return OKElem(ring, raw, prec)


# ----------------------------------------------------------------------------
# series

def series_to_json(s: Series) -> dict:
    body = {"ring": base_to_json(s.base), "var": "x", "trunc": s.trunc,
            "coeffs": [_raw_to_json(s.base, c) for c in s._c[1:]]}
    if s.prec is not None:
        body["precs"] = list(s.prec[1:])
    return _doc("series", **body)


def series_from_json(doc, path="$") -> Series:
    _header(doc, "series", path)
    base = base_from_json(_get(doc, "ring", path), path + ".ring")
    trunc = _get(doc, "trunc", path, int)
    coeffs = _get(doc, "coeffs", path, list)
    if trunc < 1 or len(coeffs) != trunc:
        raise SchemaError(f"{path}.coeffs: expected {trunc} coefficients, got {len(coeffs)}")
    if isinstance(base, RingSpec):
        precs = doc.get("precs", [base.prec] * trunc)
        if not _is(precs, "intlist") or len(precs) != trunc:
            raise SchemaError(f"{path}.precs: expected {trunc} integers")
        raw = [base._canon([0] * (base.e * base.f), precs[0])]
        raw += [_raw_from_json(base, c, kp, f"{path}.coeffs[{i}]")
                for i, (c, kp) in enumerate(zip(coeffs, precs))]
        return Series(base, raw, [precs[0]] + list(precs))
    raw = [base.zero.v] + [_raw_from_json(base, c, None, f"{path}.coeffs[{i}]")
                           for i, c in enumerate(coeffs)]
    return Series(base, raw)


def biseries_to_json(F: BiSeries) -> dict:
    body = {"ring": base_to_json(F.base), "trunc": F.trunc,
            "coeffs": [[_raw_to_json(F.base, c) for c in row] for row in F.rows()]}
    if F.prec is not None:
        body["prec"] = F.prec
    return _doc("biseries", **body)


def biseries_from_json(doc, path="$") -> BiSeries:
    _header(doc, "biseries", path)
    base = base_from_json(_get(doc, "ring", path), path + ".ring")
    T = _get(doc, "trunc", path, int)
    rows = _get(doc, "coeffs", path, list)
    prec = doc.get("prec") if isinstance(base, RingSpec) else None
    if isinstance(base, RingSpec) and not _is(prec, int):
        raise SchemaError(f"{path}.prec: expected int")
    if len(rows) != T + 1:
        raise SchemaError(f"{path}.coeffs: expected {T + 1} rows")
    terms = {}
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != T - i + 1:
            raise SchemaError(f"{path}.coeffs[{i}]: expected {T - i + 1} entries")
        for j, c in enumerate(row):
            terms[(i, j)] = _raw_from_json(base, c, prec, f"{path}.coeffs[{i}][{j}]")
    if (0, 0) in terms and any(terms[(0, 0)]):
        raise SchemaError(f"{path}.coeffs[0][0]: constant term must be zero")
    terms.pop((0, 0), None)
    return BiSeries(base, T, terms, prec)


# ----------------------------------------------------------------------------
# formal groups

def _frob_to_json(frob: FrobeniusSeries) -> list:
    return [[k, elem_to_json(c), c.known_prec] for k, c in sorted(frob.terms.items())]


def _frob_from_json(ring: RingSpec, items, path) -> FrobeniusSeries:
    if not isinstance(items, list):
        raise SchemaError(f"{path}: expected a list")
    terms = {}
    for i, item in enumerate(items):
        p = f"{path}[{i}]"
        if not (isinstance(item, list) and len(item) == 3 and _is(item[0], int) and _is(item[2], int)):
            raise SchemaError(f"{p}: expected [degree, coefficient, prec]")
        terms[item[0]] = OKElem(ring, _raw_from_json(ring, item[1], item[2], p + "[1]"), item[2])
    return FrobeniusSeries(ring, terms)


def group_to_json(G: FormalGroupLaw) -> dict:
    return _doc("formal_group", ring=ring_to_json(G.ring), n_target=G.n_target,
                frobenius=_frob_to_json(G.frob), F=biseries_to_json(G.F))


def group_from_json(doc, path="$") -> FormalGroupLaw:
    _header(doc, "formal_group", path)
    ring = ring_from_json(_get(doc, "ring", path), path + ".ring")
    n_target = _get(doc, "n_target", path, int)
    frob = _frob_from_json(ring, _get(doc, "frobenius", path), path + ".frobenius")
    F = biseries_from_json(_get(doc, "F", path), path + ".F")
    if not ring.compatible(F.base):
        raise SchemaError(f"{path}.F.ring: differs from {path}.ring")
    return FormalGroupLaw(frob, F, n_target)


# ----------------------------------------------------------------------------
# filtrations, Herbrand functions, profiles

def filtration_to_json(filt: FiniteFiltration) -> dict:
    return _doc("filtration", level=filt.level, order=filt.order,
                breaks=[_limit_or_int(b) for b in filt.breaks], indices=list(filt.indices))


def filtration_from_json(doc, path="$") -> FiniteFiltration:
    _header(doc, "filtration", path)
    level = _get(doc, "level", path, int)
    order = _get(doc, "order", path, int)
    breaks = tuple(_parse_value(b, f"{path}.breaks[{i}]")
                   for i, b in enumerate(_get(doc, "breaks", path, list)))
    indices = _get(doc, "indices", path, "intlist")
    return FiniteFiltration(level, breaks, tuple(indices), order)


def pl_to_json(f: PiecewiseLinear) -> dict:
    return _doc("piecewise_linear", breakpoints=[_frac(b) for b in f.breakpoints],
                slopes=[_frac(s) for s in f.slopes])


def pl_from_json(doc, path="$") -> PiecewiseLinear:
    _header(doc, "piecewise_linear", path)
    bps = [_parse_frac(b, f"{path}.breakpoints[{i}]")
           for i, b in enumerate(_get(doc, "breakpoints", path, list))]
    sls = [_parse_frac(s, f"{path}.slopes[{i}]") for i, s in enumerate(_get(doc, "slopes", path, list))]
    return PiecewiseLinear(tuple(bps), tuple(sls))


def profile_to_json(profile) -> dict:
    return _doc("ram_profile", trunc=profile.trunc,
                values=[_limit_or_int(v) for v in profile.values],
                element=series_to_json(profile.element.series))


def profile_values_from_json(doc, path="$") -> tuple:
    _header(doc, "ram_profile", path)
    return tuple(_parse_value(v, f"{path}.values[{i}]")
                 for i, v in enumerate(_get(doc, "values", path, list)))


def rectify_to_json(res) -> dict:
    levels = [{"level": r.level, "theta": [list(t) for t in r.theta], "g_level": r.g_level,
               "u_level": r.u_level, "psi_step_level": r.psi_step_level} for r in res.transcript]
    return _doc("rectify_transcript", ring=ring_to_json(res.beta.ring), case=res.case,
                beta=okelem_to_json(res.beta), achieved_level=res.achieved_level,
                window=res.window, levels=levels)


def oracle_to_json(frob: FrobeniusSeries, T: int, n_group: int, psi0: Series) -> dict:
    """Parameters of psi0 [alpha]_F psi0^(-1); the group is rebuilt on load."""
    return _doc("conjugated_lt_oracle", ring=ring_to_json(frob.ring), frobenius=_frob_to_json(frob),
                T=T, n_target=n_group, psi0=series_to_json(psi0))


def oracle_params_from_json(doc, path="$") -> tuple:
    """(frobenius, T, n_target, psi0)."""
    _header(doc, "conjugated_lt_oracle", path)
    ring = ring_from_json(_get(doc, "ring", path), path + ".ring")
    frob = _frob_from_json(ring, _get(doc, "frobenius", path), path + ".frobenius")
    T = _get(doc, "T", path, int)
    n_group = _get(doc, "n_target", path, int)
    psi0 = series_from_json(_get(doc, "psi0", path), path + ".psi0")
    if not ring.compatible(psi0.base):
        raise SchemaError(f"{path}.psi0.ring: differs from {path}.ring")
    return frob, T, n_group, psi0
