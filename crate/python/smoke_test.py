#!/usr/bin/env python3
"""Smoke test of the Python bindings.

Build the extension first:

    cargo build -p cartanpts-py

then run this script with any Python >= 3.8.
"""

import json
import math
import shutil
import sys
import tempfile
from pathlib import Path


def load_module():
    root = Path(__file__).resolve().parent.parent
    names = ["libcartanpts_py.so", "cartanpts_py.so", "libcartanpts_py.dylib"]
    for profile in ("release", "debug"):
        for name in names:
            built = root / "target" / profile / name
            if built.exists():
                tmp = Path(tempfile.mkdtemp(prefix="cartanpts-"))
                shutil.copy2(built, tmp / "cartanpts_py.so")
                sys.path.insert(0, str(tmp))
                import cartanpts_py

                return cartanpts_py
    raise SystemExit("extension not built; run: cargo build -p cartanpts-py")


def main():
    m = load_module()
    print(f"cartanpts_py {m.__version__}")

    info = m.context_info(7)
    assert info["d"] == 3 and info["m"] == 6 and info["cusps"] == 3, info
    info11 = m.context_info(11)
    assert info11["d"] == 5 and info11["m"] == 2, info11
    print("context_info ok:", info)

    # j(q) at q = e^(-2 pi) is 1728
    v, err = m.evaluate_j(math.exp(-2 * math.pi))
    assert abs(v - 1728.0) < 1e-6 and err < 1e-6, (v, err)
    print(f"evaluate_j ok: {v:.9f} (+-{err:.1e})")

    assert "CmMatch" in m.classify_j(-32768, 128)
    assert "IntegerJUnverified" in m.classify_j(1729, 128)
    print("classify_j ok")

    cm = dict(m.cm_points())
    assert cm[-163] == -262537412640768000
    assert m.cm_on_curve(11, -3) and not m.cm_on_curve(11, -7)
    print("cm tables ok")

    r = m.small_j(11, 1000)
    assert r.startswith("excluded:"), r
    print("small_j ok:", r)

    report = json.loads(m.run(7, validate_only=True))
    assert report["validation"]["product_sign_positive"]
    assert report["validation"]["product_identity_residual"] < 1e-20
    print("validate-only pipeline ok; residual",
          report["validation"]["product_identity_residual"])

    print("smoke test passed")


if __name__ == "__main__":
    main()
