#!/usr/bin/env python3
"""Smoke test for the spoofsim_py extension module.

Locates the cdylib built by `cargo build -p spoofsim-py` (debug or release),
imports it, and exercises the bound surface end to end. Exits non-zero on the
first failing check.
"""

import json
import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        REPO_ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libspoofsim_py.so", "libspoofsim_py.dylib", "spoofsim_py.dll")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(
            "extension library not found; run `cargo build -p spoofsim-py` first"
        )
    staging = Path(tempfile.mkdtemp(prefix="spoofsim_py_"))
    suffix = ".pyd" if built.suffix == ".dll" else ".so"
    shutil.copy2(built, staging / f"spoofsim_py{suffix}")
    sys.path.insert(0, str(staging))
    import spoofsim_py

    return spoofsim_py


checks = 0


def check(label, condition):
    global checks
    if not condition:
        sys.exit(f"FAIL: {label}")
    checks += 1
    print(f"ok: {label}")


def close(a, b, tol):
    if isinstance(a, (list, tuple)):
        return all(close(x, y, tol) for x, y in zip(a, b)) and len(a) == len(b)
    return abs(a - b) <= tol


def main():
    sp = load_module()

    g2 = sp.LieGroup.se2()
    check("se2 dimensions", g2.dim_algebra == 3 and g2.dim_matrix == 3)

    # exp/log roundtrip
    xi = [1.0, 2.0, 0.5]
    check("exp/log roundtrip", close(g2.exp(xi).log(), xi, 1e-9))

    # hat/vee roundtrip
    check("hat/vee roundtrip", close(g2.vee(g2.hat(xi)), xi, 1e-12))

    # planar bracket: [v e_f + w e_th, a e_f + b e_l + c e_th]
    v, w = 13.96, -1.02
    a, b, c = 0.0, 1.0, 0.0
    check(
        "bracket formula",
        close(g2.bracket([v, 0.0, w], [a, b, c]), [-w * b, w * a - v * c, 0.0], 1e-12),
    )

    # adjoint of the reference flow pose
    flow = g2.from_pose(3.316, -0.408, -0.245)
    check("adjoint norm", close(flow.adjoint_norm(), 3.618, 1e-3))
    warped = flow.adjoint_apply([0.0, 0.44, 0.0])
    check("warped residual", close(warped, [0.107, 0.427, 0.0], 1e-3))
    check(
        "warped residual norm preserved",
        close(math.hypot(*warped), 0.44, 1e-12),
    )

    # deviation bound
    deviation, bound = sp.impact_bound(g2, [0.0, 0.44, 0.0], flow)
    check("deviation bound", close(bound, 1.59, 5e-3))
    check("deviation within bound", math.hypot(*deviation) <= bound + 1e-9)

    # commuting subspaces: straight keeps translations, turning collapses
    straight = sp.commuting_subspace(g2, [10.0, 0.0, 0.0])
    curved = sp.commuting_subspace(g2, [10.0, 0.0, 0.5])
    check("straight subspace dim", straight.dim == 2)
    check("curved subspace dim", curved.dim == 1)
    check("subspaces bracket-closed", straight.jacobi_closed() and curved.jacobi_closed())
    ideal, residual = straight.decompose([1.0, 2.0, 0.3])
    check("orthogonal split", close(ideal, [1.0, 2.0, 0.0], 1e-12) and close(residual, [0.0, 0.0, 0.3], 1e-12))

    transferable, _ = sp.is_transferable(g2, [v / w, 0.0, 1.0], [v, 0.0, w])
    blocked, bracket_norm = sp.is_transferable(g2, [0.0, 1.0, 0.0], [v, 0.0, w])
    check("along-trajectory transfers", transferable)
    check("lateral blocked under turning", not blocked and close(bracket_norm, 1.02, 1e-12))

    # unicycle rollout stays on its circle
    rows = sp.simulate_unicycle(g2.identity(), [(3.0, 0.8)] * 40, 0.25)
    radius = 3.0 / 0.8
    drift = max(abs(math.hypot(x, y - radius) - radius) for _, x, y, _ in rows)
    check("rollout stays on the turning circle", drift < 1e-6)

    # sensor model and spoof coordination
    z = sp.observe_se2_mixed(g2.from_pose(3.0, 0.0, 0.0))
    check("mixed sensor tuple", close(z, [3.0, 0.0, 3.0, 0.0], 1e-12))
    spoofed = sp.spoof_measurement(g2, [0.0, 0.0, 0.0, 0.0], [0.0, 10.0, 0.0], 0.0)
    check("lateral spoof tuple", close(spoofed, [0.0, 10.0, 0.0, 10.0], 1e-12))

    # commuting displacement: impact is the bare exponential
    along = [0.3 * v / w, 0.0, 0.3]
    impact = sp.dynamical_impact(g2, along, g2.exp([v * 0.24, 0.0, w * 0.24]))
    check("commuting impact unchanged", close(impact.log(), along, 1e-9))

    # reference table recomputes
    rows = sp.reproduce_paper()
    check("reference table passes", all(r["pass"] for r in rows))

    # full scenario through the pipeline
    config = REPO_ROOT / "configs" / "curved_victim.json"
    out_dir = Path(tempfile.mkdtemp(prefix="spoofsim_out_"))
    verdict = sp.run_transfer_scenario(config, out_dir)
    check("scenario stealthy", verdict["stealthy"])
    check("scenario learned epsilon", close(verdict["learned_epsilon"], 0.44, 1e-6))
    check("scenario bound peak", close(verdict["max_bound"], 5.0, 0.1))
    check("scenario dataset rich", verdict["dataset_rich"])
    with open(out_dir / "verdict.json") as fh:
        check("verdict artifact written", json.load(fh)["stealthy"] is True)
    check("impact trace written", (out_dir / "impact.csv").exists())

    print(f"\nall {checks} smoke checks passed")


if __name__ == "__main__":
    main()
