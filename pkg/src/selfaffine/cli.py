"""Command-line front end.

Each run writes ``report.json`` (deterministic for a fixed config and input)
and ``manifest.json`` (resolved config plus a timestamp) into ``--out``.
Exit status: 0 definitive, 2 inconclusive, 1 error.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import logging
import sys as _sys
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from .density import TargetTuple, osc_near, singular_near
from .errors import Inconclusive, SelfAffineError, ValidationError
from .fourier import (
    FailingPower,
    find_singularity_certificate,
    fourier_product_limit,
    v_w_membership,
)
from .geometry import (
    chaos_game_histogram,
    histogram_image,
    measure_estimate,
    occupancy_image,
    rasterize_attractor,
    write_pgm,
    write_png,
)
from .intlinalg import ExpandingMatrix
from .overlap import DEFAULT_STATE_BUDGET, classify
from .serialize import (
    certificate_to_json,
    classification_to_json,
    complex_json,
    dumps,
    failing_power_to_json,
    parse_input,
    product_to_json,
    rational,
    system_to_json,
)
from .system import AffineSystem, normalize

log = logging.getLogger(__name__)

COMMANDS = ("classify", "render", "fourier", "search-osc", "search-singular")
EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    input: str
    out: str = "out"
    depth: int | None = None
    resolution: int = 256
    samples: int = 100_000
    seed: int = 0
    budget: int | None = None
    w: tuple[int, ...] | None = None
    epsilon: float | None = None
    wmax: int = 5
    png: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        for name in ("depth", "resolution", "samples", "budget", "epsilon", "wmax"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValidationError(f"--{name} must be positive")
        if self.seed < 0:
            raise ValidationError("--seed must be nonnegative")


def _default_depth(sys: AffineSystem, cap: int = 200_000) -> int:
    n = 1
    while sys.n_maps ** (n + 1) <= cap:
        n += 1
    return n


def _need_system(obj) -> AffineSystem:
    if not isinstance(obj, AffineSystem):
        raise ValidationError("this command needs a system file, not a target file")
    return obj


def _need_targets(obj) -> tuple[ExpandingMatrix, TargetTuple]:
    if isinstance(obj, AffineSystem):
        raise ValidationError("this command needs a target file, not a system file")
    return obj


def _classify(cfg: RunConfig, obj, out: Path) -> tuple[dict, bool]:
    sys = _need_system(obj)
    rep = classify(sys, cfg.budget or DEFAULT_STATE_BUDGET)
    norm = rep.normalized
    depth = cfg.depth or _default_depth(norm)
    rep.estimates["measure"] = {
        "depth": depth,
        "resolution": cfg.resolution,
        "value": measure_estimate(norm, depth, cfg.resolution),
    }
    if rep.branch == "overlap":
        rep.estimates["dimension_bound"] = f"upper box dimension < d = {sys.dim}"
        try:
            cert = find_singularity_certificate(norm, cfg.wmax)
        except Inconclusive as exc:
            cert, note = None, str(exc)
        else:
            note = None if cert else f"no certificate with |w| <= {cfg.wmax} (not a proof of absence)"
        if cert is not None:
            prod = fourier_product_limit(norm, cert.w)
            rep.estimates["fourier"] = {
                "certificate": certificate_to_json(cert),
                "product": product_to_json(prod),
            }
        else:
            rep.estimates["fourier"] = {"certificate": None, "note": note}
    report = classification_to_json(rep)
    return report, rep.branch is not None


def _render(cfg: RunConfig, obj, out: Path) -> tuple[dict, bool]:
    sys = _need_system(obj)
    norm, conj = normalize(sys)
    depth = cfg.depth or _default_depth(norm)
    raster = rasterize_attractor(norm, depth, cfg.resolution, cfg.budget or 10**7)
    img = occupancy_image(raster)
    write_pgm(out / "attractor.pgm", img)
    hist = chaos_game_histogram(norm, max(cfg.samples, 10**4), cfg.resolution, cfg.seed, raster.view)
    himg = histogram_image(hist)
    write_pgm(out / "histogram.pgm", himg)
    if cfg.png:
        write_png(out / "attractor.png", img)
        write_png(out / "histogram.png", himg)
    sidecar = {
        "depth": depth,
        "resolution": cfg.resolution,
        "seed": cfg.seed,
        "samples": hist.samples,
        "viewport": {
            "origin": [rational(o) for o in raster.view.origin],
            "cell": rational(raster.view.cell),
        },
        "coordinates": "normalized",
        "conjugacy": {"power": conj.power, "shift": [rational(x) for x in conj.shift]},
    }
    (out / "render.json").write_text(dumps(sidecar))
    report = {
        "branch": None,
        "status": "definitive",
        "certificates": [],
        "estimates": {
            "occupied_cells": raster.occupied,
            "measure": raster.occupied * raster.cell_measure(),
        },
        "images": ["attractor.pgm", "histogram.pgm"],
    }
    return report, True


def _fourier(cfg: RunConfig, obj, out: Path) -> tuple[dict, bool]:
    sys = _need_system(obj)
    norm, _ = normalize(sys)
    if cfg.w is not None:
        res = v_w_membership(norm, cfg.w)
    else:
        res = find_singularity_certificate(norm, cfg.wmax)
    report = {"branch": None, "status": "definitive", "certificates": [], "estimates": {}}
    if res is None:
        report.update(membership=None, failing_power=None, status="inconclusive",
                      note=f"no certificate with |w| <= {cfg.wmax} (not a proof of absence)")
        return report, False
    if isinstance(res, FailingPower):
        report.update(membership=False, w=list(cfg.w), **failing_power_to_json(res))
        report["estimates"]["product"] = product_to_json(fourier_product_limit(norm, cfg.w))
        return report, True
    report.update(membership=True, w=list(res.w), failing_power=None)
    report["certificates"].append(certificate_to_json(res))
    report["estimates"]["product"] = product_to_json(fourier_product_limit(norm, res.w))
    return report, True


def _search(cfg: RunConfig, obj, out: Path) -> tuple[dict, bool]:
    m, target = _need_targets(obj)
    if cfg.epsilon is not None:
        target = TargetTuple(target.vectors, cfg.epsilon)
    if cfg.command == "search-osc":
        found, cert, dist = osc_near(m, target)
    else:
        w = cfg.w or (1,) + (0,) * (m.dim - 1)
        found, cert, dist = singular_near(m, target, w, cfg.budget or 5000)
    report = {
        "branch": "osc" if cfg.command == "search-osc" else None,
        "status": "definitive",
        "certificates": [certificate_to_json(cert)],
        "estimates": {"achieved_distance": dist, "epsilon": target.epsilon},
        "system": system_to_json(found),
    }
    return report, True


HANDLERS = {
    "classify": _classify,
    "render": _render,
    "fourier": _fourier,
    "search-osc": _search,
    "search-singular": _search,
}


def run(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"version": __version__, "config": asdict(cfg)}
    manifest["config"]["w"] = list(cfg.w) if cfg.w else None
    try:
        obj = parse_input(cfg.input)
        report, definitive = HANDLERS[cfg.command](cfg, obj, out)
        code = EXIT_OK if definitive else EXIT_INCONCLUSIVE
    except Inconclusive as exc:
        report = {"branch": None, "status": "inconclusive", "certificates": [], "estimates": {},
                  "error": {"code": exc.code, "message": str(exc)}}
        code = EXIT_INCONCLUSIVE
    except (SelfAffineError, OSError) as exc:
        report = {"branch": None, "status": "error", "certificates": [], "estimates": {},
                  "error": {"code": getattr(exc, "code", "io_error"), "message": str(exc)}}
        code = EXIT_ERROR
    # the output location is not part of the result, so keep it out of the report
    echoed = dict(manifest, config={k: v for k, v in manifest["config"].items() if k != "out"})
    report["manifest"] = echoed
    (out / "report.json").write_text(dumps(report))
    stamped = dict(manifest, created=_dt.datetime.now(_dt.timezone.utc).isoformat(), exit_status=code)
    (out / "manifest.json").write_text(dumps(stamped))
    log.info("%s: status %s, exit %d", cfg.command, report["status"], code)
    return code


def _parse_w(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--w expects comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="selfaffine", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", required=True, help="system or target JSON file")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--depth", type=int)
    p.add_argument("--resolution", type=int, default=256)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int)
    p.add_argument("--w", type=_parse_w, help='frequency vector, e.g. "1,0"')
    p.add_argument("--epsilon", type=float)
    p.add_argument("--wmax", type=int, default=5)
    p.add_argument("--png", action="store_true", help="also write PNG images")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    logging.basicConfig(level=logging.INFO if args.pop("verbose") else logging.WARNING)
    try:
        cfg = RunConfig(**args)
    except ValidationError as exc:
        print(f"selfaffine: {exc}", file=_sys.stderr)
        return EXIT_ERROR
    return run(cfg)


if __name__ == "__main__":
    raise SystemExit(main())
