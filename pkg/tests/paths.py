import os

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
BENCH = os.path.join(ROOT, "benchmarks")
MANIFEST = os.path.join(BENCH, "manifest.tsv")


def bench(*parts) -> str:
    return os.path.join(BENCH, *parts)
