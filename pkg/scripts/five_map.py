"""Classify and render the two five-map systems (tile and overlapping variant).

    python3 scripts/five_map.py --out figures --depth 8 --resolution 512
"""
import argparse
from pathlib import Path

from selfaffine import fixtures
from selfaffine.geometry import (
    chaos_game_histogram,
    histogram_image,
    occupancy_image,
    rasterize_attractor,
    write_pgm,
)
from selfaffine.overlap import classify


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="figures")
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--resolution", type=int, default=512)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--png", action="store_true")
    args = p.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in ("fig1_osc", "fig1_overlap"):
        rep = classify(fixtures.NAMED[name]())
        norm = rep.normalized
        raster = rasterize_attractor(norm, args.depth, args.resolution)
        hist = chaos_game_histogram(norm, args.samples, args.resolution, view=raster.view)
        images = {"attractor": occupancy_image(raster), "histogram": histogram_image(hist)}
        for kind, img in images.items():
            write_pgm(out / f"{name}_{kind}.pgm", img)
            if args.png:
                from selfaffine.geometry import write_png

                write_png(out / f"{name}_{kind}.png", img)
        cert = rep.certificates[0]
        print(f"{name}: branch {rep.branch}, certificate {cert.kind}, "
              f"{raster.occupied} cells, measure estimate {raster.occupied * raster.cell_measure():.3f}")


if __name__ == "__main__":
    main()
