"""Times the compiled and pure-Python coverability kernels on random instances.

    python benchmarks/bench_coverability.py --instances 40 --states 30 --counters 4
"""

import argparse
import random
import time

from regsep import _basis_py, basis


def random_instance(rng, states, counters, edges, target_height):
    es = []
    for _ in range(edges):
        # bias towards inc/dec so the basis actually grows
        code = rng.choices([_basis_py.NOP, _basis_py.INC, _basis_py.DEC, _basis_py.RESET], [1, 4, 4, 1])[0]
        es.append((rng.randrange(states), rng.randrange(states), rng.randrange(counters), code))
    targets = [(rng.randrange(states), tuple(rng.randint(0, target_height) for _ in range(counters))) for _ in range(3)]
    return states, counters, es, targets, (0, (0,) * counters)


def time_kernel(fn, instances, repeat):
    best = None
    for _ in range(repeat):
        start = time.perf_counter()
        results = [fn(*inst, False) for inst in instances]
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return best, results


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=40)
    ap.add_argument("--states", type=int, default=30)
    ap.add_argument("--counters", type=int, default=4)
    ap.add_argument("--edges", type=int, default=120)
    ap.add_argument("--height", type=int, default=6, help="max target counter value")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = random.Random(args.seed)
    instances = [
        random_instance(rng, args.states, args.counters, args.edges, args.height) for _ in range(args.instances)
    ]
    py_time, py_res = time_kernel(_basis_py.coverability_fixpoint, instances, args.repeat)
    steps = sum(r[1] for r in py_res)
    print(f"python  {py_time * 1000:9.1f} ms  ({steps} steps)")
    if basis.BACKEND != "cython":
        print("cython  not built; install with a C compiler to compare")
        return 0
    cy_time, cy_res = time_kernel(basis.coverability_fixpoint, instances, args.repeat)
    same = all(a[0] == b[0] and a[1] == b[1] for a, b in zip(py_res, cy_res))
    print(f"cython  {cy_time * 1000:9.1f} ms  ({sum(r[1] for r in cy_res)} steps)")
    print(f"speedup {py_time / cy_time:9.1f}x  results agree: {same}")
    return 0 if same else 1


if __name__ == "__main__":
    raise SystemExit(main())
