"""Regenerate the committed WAV fixtures and their expected eval document.

Run from the repository root:

    python3 scripts/make_fixtures.py
"""

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from fastsdr.cli import main  # noqa: E402
from fastsdr.oracle import MixtureSpec, generate_mixture  # noqa: E402
from fastsdr.wavio import write_wav  # noqa: E402

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures"
RATE = 8000


def build():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20240817)
    refs = rng.standard_normal((2, 4000))
    spec = MixtureSpec(num_estimates=2, filter_taps=8, noise_scale=0.1)
    ests = generate_mixture(refs, spec, seed=7).samples

    write_wav(FIXTURES / "refs.wav", RATE, refs)
    write_wav(FIXTURES / "ests.wav", RATE, ests)

    rc = main([
        "eval",
        "--refs", str(FIXTURES / "refs.wav"),
        "--ests", str(FIXTURES / "ests.wav"),
        "--filter-length", "32",
        "--solver", "direct",
        "--output-path", str(FIXTURES / "expected.json"),
    ])
    if rc != 0:
        raise SystemExit(f"eval failed with exit code {rc}")
    print(f"wrote fixtures to {FIXTURES}")


if __name__ == "__main__":
    build()
