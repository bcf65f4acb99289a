"""Compare the compiled and pure-Python reduction kernels.

    python3 benchmarks/bench_kernels.py [--repeat N] [--full]

``--full`` adds the (x34, y34) elimination on the eleven-vector frame, which
takes tens of seconds per backend.
"""
import argparse
import time

from framecert import kernels
from framecert.certifier import reduce_system
from framecert.frame_model import eleven_vector_frame, hermitian_system, linear_presolve
from framecert.groebner import buchberger, elimination_ideal
from framecert.multipoly import TermOrder


def _reduced():
    system = hermitian_system(eleven_vector_frame())
    presolve, _ = linear_presolve(system, protect=("x34", "y34"))
    return reduce_system(system, presolve)


def workloads(full: bool):
    rs = _reduced()
    gens = rs.generators
    zero = rs.table.var("y34")
    out = {
        "grevlex basis, y34 = 0 slice": lambda: buchberger(gens + [zero], TermOrder.grevlex()),
        "tracked grevlex basis, y34 = 0 slice": lambda: buchberger(gens + [zero], TermOrder.grevlex(),
                                                                    track=True),
        "grevlex basis, y34 = 1 slice": lambda: buchberger(gens + [zero - 1], TermOrder.grevlex()),
    }
    if full:
        out["elimination onto (x34, y34)"] = lambda: elimination_ideal(gens, ("x34", "y34"))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--full", action="store_true")
    args = ap.parse_args()
    backends = ["python"]
    try:
        kernels.use_backend("cython")
        backends.append("cython")
    except ImportError:
        print("compiled kernels not built; timing the pure-Python backend only")
    jobs = workloads(args.full)
    print(f"{'workload':42s} " + " ".join(f"{b:>10s}" for b in backends) + "   speedup")
    for name, job in jobs.items():
        times = []
        for b in backends:
            kernels.use_backend(b)
            best = float("inf")
            for _ in range(args.repeat):
                t = time.perf_counter()
                job()
                best = min(best, time.perf_counter() - t)
            times.append(best)
        speed = f"{times[0] / times[1]:8.2f}x" if len(times) == 2 else ""
        print(f"{name:42s} " + " ".join(f"{t:9.3f}s" for t in times) + "  " + speed)


if __name__ == "__main__":
    main()
