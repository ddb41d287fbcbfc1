#!/usr/bin/env python3
"""Smoke test for the osd_py extension module.

Prefers an installed `osd_py`; otherwise loads the cdylib straight from
the cargo target directory, so `cargo build -p osd-py` is enough:

    cargo build -p osd-py && python3 python/smoke_test.py
"""

import importlib.util
import math
import pathlib
import sys


def load_module():
    try:
        import osd_py  # noqa: F401

        return osd_py
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libosd_py.so", "osd_py.so", "libosd_py.dylib")
    ]
    for path in candidates:
        if path.exists():
            spec = importlib.util.spec_from_file_location("osd_py", path)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("osd_py not installed and no built cdylib found; run `cargo build -p osd-py`")


osd_py = load_module()

checks = 0


def check(label, ok):
    global checks
    checks += 1
    if not ok:
        sys.exit(f"FAIL {label}")
    print(f"ok {label}")


# Rule parsing and echo.
fib = osd_py.Rule("a -> ab; b -> a")
check("letters", fib.letters == ["a", "b"])
check("images", fib.images == ["ab", "a"])
check("matrix", fib.inflation_matrix() == [[1, 1], [1, 0]])
check("round trip", osd_py.Rule(fib.text()) == fib)

# Full analysis: the golden-ratio rule realizes the minimal dimension.
a = osd_py.analyze(fib)
check("pure point", a.pure_point is True)
check("inflation factor", abs(a.inflation_factor - (1 + math.sqrt(5)) / 2) < 1e-9)
check("osd", a.osd == 1.0 and a.osd_exact)
check("bounds", a.osd_bounds == (1.0, 1.0))
check("boundary dim", a.boundary_dim == 0.0)

report = a.as_dict()
check("dict report", report["pure_point"] is True and report["osd"]["value"] == 1.0)
check("closure nodes", a.closure_nodes == 3 and report["pair_graph_size"] == 3)

# A rule without pure point spectrum reports an infinite dimension.
tm = osd_py.analyze("a -> ab; b -> ba")
check("not pure point", tm.pure_point is False)
check("infinite osd", math.isinf(tm.osd))

# Text input, a nontrivial rate, and the product identity.
silver = osd_py.analyze("a -> aab; b -> ba")
check("silver mean rate", abs(silver.lambda_dc - (1 + math.sqrt(2))) < 1e-9)
check("product", abs(osd_py.product_dimension([a, silver]) - (1.0 + silver.osd)) < 1e-9)

# Formula-level dimension from stored polynomial data.
d = osd_py.dimension_from_polys([1, -3, 1], [-1, -2, 1])
check("from polys", abs(d - silver.osd) < 1e-9)

# Corpus access.
names = osd_py.corpus_entries()
check("corpus entries", "fibonacci" in names and len(names) == 13)
rows = osd_py.run_corpus("fibonacci")
check("corpus rows", rows and all(r["pass"] for r in rows))

# Empirical decay agrees with the exact silver-mean rate.
est = osd_py.decay_estimate("a -> aab; b -> ba", iterations=25, burn_in=5)
check(
    "decay estimate",
    abs(est["estimated_log_lambda_dc"] - math.log(1 + math.sqrt(2))) < 0.05,
)
check("trajectory shape", len(est["steps"]) == 26 and est["steps"][0]["n"] == 0)

# Errors surface as ValueError.
for bad in ("a -> ab; b -> b", "a => b"):
    try:
        osd_py.analyze(bad)
    except ValueError:
        pass
    else:
        sys.exit(f"FAIL expected ValueError for {bad!r}")
    checks += 1
print("ok errors raise ValueError")

print(f"smoke test passed ({checks} checks)")
