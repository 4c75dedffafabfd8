"""Find systems of both branches near random targets and report distances.

    python3 scripts/density_demo.py --matrix "1,-2;2,1" --epsilon 0.01 --count 20
"""
import argparse
import random
import time

from selfaffine.density import TargetTuple, osc_near, singular_near
from selfaffine.intlinalg import certify_expanding


def parse_matrix(text):
    return [[int(x) for x in row.split(",")] for row in text.split(";")]


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--matrix", default="3")
    p.add_argument("--epsilon", type=float, default=1e-2)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    m = certify_expanding(parse_matrix(args.matrix))
    w = (1,) + (0,) * (m.dim - 1)
    t0 = time.perf_counter()
    for i in range(args.count):
        rng = random.Random(args.seed + i)
        vecs = tuple(tuple(rng.uniform(-2, 2) for _ in range(m.dim)) for _ in range(m.det_abs))
        target = TargetTuple(vecs, args.epsilon)
        tile, _, d_tile = osc_near(m, target)
        sing, cert, d_sing = singular_near(m, target, w)
        print(f"target {i:3d}: tile at scale {tile.max_scale} (distance {d_tile:.4g}), "
              f"singular at scale {sing.max_scale} (distance {d_sing:.4g}, window {cert.window})")
    print(f"{2 * args.count} certified systems in {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
