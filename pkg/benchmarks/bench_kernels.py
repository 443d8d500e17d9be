"""Compare the compiled and numpy decoder-statistics kernels.

    python3 benchmarks/bench_kernels.py [--samples 100000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from qutritcodec import kernels
from qutritcodec.codec import JOINT_DECODER, sample_pairs
from qutritcodec.statekit import design_pairs


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=100_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(0)
    cases = {
        f"Monte Carlo, {args.samples} pairs, 1 element": (JOINT_DECODER.elements, sample_pairs(rng, args.samples)),
        "design quadrature, 36 pairs, 4 elements": (rng.normal(size=(4, 4, 3)) + 1j * rng.normal(size=(4, 4, 3)),
                                                   design_pairs()),
    }
    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; timing the numpy fallback only")
    print(f"{'case':<48}" + "".join(f"{b:>14}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, (ks, q) in cases.items():
        # single-call cost is tiny for the design case, so batch it
        number = 1 if len(q) > 1000 else 2000
        times = {}
        for b in backends:
            t = min(timeit.repeat(lambda: kernels.decoder_stats(ks, q, backend=b), number=number, repeat=args.repeat))
            times[b] = t / number
        line = f"{name:<48}" + "".join(f"{times[b] * 1e3:>11.4f} ms" for b in backends)
        if len(backends) > 1:
            line += f"{times['python'] / times['compiled']:>11.1f}x"
        print(line)
        if len(backends) > 1:
            a = kernels.decoder_stats(ks, q, backend="compiled")
            b = kernels.decoder_stats(ks, q, backend="python")
            diff = max(float(np.max(np.abs(x - y))) for x, y in zip(a, b))
            print(f"{'':<48}max |compiled - python| = {diff:.1e}")


if __name__ == "__main__":
    main()
