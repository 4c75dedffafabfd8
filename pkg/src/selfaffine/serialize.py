"""JSON codecs for systems, targets, certificates and reports.

Rationals are ``[num, den]`` pairs, complex numbers ``{"re", "im"}`` decimal
strings with 17 significant digits, words and labels plain integer arrays.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .density import TargetTuple
from .errors import ParseError, ValidationError
from .fourier import CharacterSum, FailingPower, ProductValue, SingularityCertificate
from .intlinalg import ExpandingMatrix, certify_expanding
from .overlap import ClassificationReport, NoOverlapProof, OSCCertificate, OverlapCertificate
from .system import AffineMap, AffineSystem, Conjugacy, ScaledVector, build_system


def rational(x: Fraction) -> list[int]:
    x = Fraction(x)
    return [x.numerator, x.denominator]


def from_rational(pair) -> Fraction:
    return Fraction(int(pair[0]), int(pair[1]))


def complex_json(z: complex) -> dict:
    return {"re": format(z.real, ".17g"), "im": format(z.imag, ".17g")}


def system_to_json(sys: AffineSystem) -> dict:
    return {
        "matrix": [list(row) for row in sys.matrix.entries],
        "digits": [{"scale": u.scale, "vec": list(u.vec)} for u in sys.digits],
    }


def _field(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing field '{key}'")
    return obj[key]


def _int_list(value, where) -> list[int]:
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise ParseError(f"{where}: expected a list of integers")
    return value


def _matrix(data, max_iter: int = 64) -> ExpandingMatrix:
    rows = _field(data, "matrix", "$")
    if not isinstance(rows, list) or not rows:
        raise ParseError("$.matrix: expected a nonempty list of rows")
    rows = [_int_list(r, f"$.matrix[{i}]") for i, r in enumerate(rows)]
    if any(len(r) != len(rows) for r in rows):
        raise ValidationError("$.matrix: matrix must be square")
    return certify_expanding(rows, max_iter)


def system_from_json(data: dict) -> AffineSystem:
    m = _matrix(data)
    digits = _field(data, "digits", "$")
    if not isinstance(digits, list):
        raise ParseError("$.digits: expected a list")
    out = []
    for i, d in enumerate(digits):
        scale = _field(d, "scale", f"$.digits[{i}]")
        vec = _int_list(_field(d, "vec", f"$.digits[{i}]"), f"$.digits[{i}].vec")
        if not isinstance(scale, int) or scale < 0:
            raise ParseError(f"$.digits[{i}].scale: expected a nonnegative integer")
        if len(vec) != m.dim:
            raise ValidationError(f"$.digits[{i}].vec: expected length {m.dim}")
        out.append(ScaledVector(scale, tuple(vec)))
    return build_system(m, out)


def targets_from_json(data: dict) -> tuple[ExpandingMatrix, TargetTuple]:
    m = _matrix(data)
    vecs = _field(data, "targets", "$")
    eps = _field(data, "epsilon", "$")
    try:
        vectors = tuple(tuple(float(x) for x in v) for v in vecs)
        target = TargetTuple(vectors, float(eps))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ParseError(f"$.targets: {exc}") from exc
    target.check(m)
    return m, target


def parse_input(path: str | Path) -> AffineSystem | tuple[ExpandingMatrix, TargetTuple]:
    """Read a system file, or a target file (one with a ``targets`` field)."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    if "targets" in data:
        return targets_from_json(data)
    return system_from_json(data)


def map_to_json(f: AffineMap) -> dict:
    return {
        "linear": [[rational(x) for x in row] for row in f.linear],
        "translation": [rational(x) for x in f.translation],
    }


def conjugacy_to_json(c: Conjugacy) -> dict:
    return {"power": c.power, "shift": [rational(x) for x in c.shift]}


def character_sum_to_json(s: CharacterSum) -> dict:
    return {
        "n": s.n,
        "phases": [rational(p) for p in s.phases],
        "denominator": s.q,
        "is_zero": s.is_zero,
        "value": complex_json(s.value),
    }


def certificate_to_json(cert) -> dict:
    if isinstance(cert, OverlapCertificate):
        return {
            "kind": "overlap",
            "depth": cert.depth,
            "word_a": list(cert.word_a.letters),
            "word_b": list(cert.word_b.letters),
            "map": map_to_json(cert.map),
        }
    if isinstance(cert, OSCCertificate):
        return {"kind": "osc", "m0": cert.m0, "labels": [list(lab.residues) for lab in cert.labels]}
    if isinstance(cert, NoOverlapProof):
        return {
            "kind": "no_overlap",
            "state_bound": rational(cert.state_bound),
            "explored_states": cert.explored_states,
            "reached_zero": cert.reached_zero,
        }
    if isinstance(cert, SingularityCertificate):
        return {
            "kind": "singularity",
            "w": list(cert.w),
            "window": list(cert.window),
            "outside_window_reason": cert.outside_window_reason,
            "product_lower_bound": rational(cert.product_lower_bound),
            "truncation_error": rational(cert.truncation_error),
            "sums": [character_sum_to_json(s) for s in cert.sums],
        }
    raise TypeError(f"unknown certificate {cert!r}")


def failing_power_to_json(f: FailingPower) -> dict:
    return {"failing_power": f.n, "sum": character_sum_to_json(f.sum)}


def product_to_json(p: ProductValue) -> dict:
    return {"value": complex_json(p.value), "error": format(p.error, ".17g"), "powers": list(p.powers)}


def classification_to_json(rep: ClassificationReport) -> dict[str, Any]:
    return {
        "branch": rep.branch,
        "status": rep.status,
        "certificates": [certificate_to_json(c) for c in rep.certificates],
        "estimates": rep.estimates,
        "system": system_to_json(rep.system),
        "normalized": system_to_json(rep.normalized),
        "conjugacy": conjugacy_to_json(rep.conjugacy),
        "error": rep.error,
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
