#!/usr/bin/env python3
"""Import the compiled atomcavity module and poke the main entry points.

Build the module first:

    cargo build -p atom-cavity-py            # or --release

then run this script from anywhere inside the repository.
"""

import math
import pathlib
import shutil
import sys
import tempfile


def locate_library() -> pathlib.Path:
    root = pathlib.Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libatomcavity.so", "libatomcavity.dylib", "atomcavity.dll")
    ]
    for path in candidates:
        if path.exists():
            return path
    sys.exit("atomcavity library not found; run `cargo build -p atom-cavity-py` first")


def import_module():
    lib = locate_library()
    staging = pathlib.Path(tempfile.mkdtemp(prefix="atomcavity-"))
    suffix = ".pyd" if lib.suffix == ".dll" else ".so"
    shutil.copy2(lib, staging / f"atomcavity{suffix}")
    sys.path.insert(0, str(staging))
    import atomcavity

    return atomcavity


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    ac = import_module()

    # resonant single-atom response at eta_c = 10
    approx(ac.transmission(0.0, 0.0, 10.0), 1.0 / 121.0, 1e-15)
    approx(ac.fs_emission(0.0, 0.0, 10.0), 20.0 / 121.0, 1e-15)
    approx(ac.cavity_emission(0.0, 0.0, 10.0), 10.0 / 121.0, 1e-15)
    approx(ac.fs_emission_driven_atom(0.0, 0.0, 10.0), 1.0 / 121.0, 1e-15)
    assert ac.cavity_to_fs_ratio(0.0, 10.0) == 10.0

    # coupling obeys the optical theorem on resonance
    eta_fs = 6.0 / 400.0
    beta = ac.beta_rwa(0.0, eta_fs)
    approx(beta.real, 0.0, 1e-18)
    approx(abs(beta) ** 2, eta_fs * beta.imag, 1e-18)

    # geometric route agrees with the dimensionless one
    atom = ac.AtomTransition(780e-9, 2 * math.pi * 6.07e6)
    mode = ac.GaussianMode(780e-9, 20.0 / atom.k0)
    cavity = ac.CavitySpec(4.0 * mode.eta_fs / 10.0, 0.1)
    approx(cavity.eta_c(mode), 10.0, 1e-9)
    g = ac.g_quantum(atom, mode, cavity.length)
    approx(2 * g, ac.vacuum_rabi(cavity.eta_c(mode), cavity.kappa, atom.gamma), 1e-6 * g)

    # transparency window and normal-mode splitting
    approx(ac.sidebeam_transmission(0.0, 0.0, 1.0, 1.0, 0.1, 0.1), 0.95, 1e-12)
    split = ac.transmission_splitting(10.0)
    assert split is not None
    assert abs(split - math.sqrt(10)) / math.sqrt(10) < 0.05, split

    # ordered layouts: perfect phase matching, then destructive spacing
    lam = 780e-9
    k = 2 * math.pi / lam
    bragg = [(j * lam / 2, 0.0, -j * lam / 2) for j in range(8)]
    f = ac.collective_f(bragg, (k, 0.0, 0.0), (0.0, 0.0, k))
    approx(abs(f), 1.0, 1e-12)
    anti = [(j * lam / (2 * 2), 0.0, -j * lam / (2 * 2)) for j in range(8)]
    assert abs(ac.collective_f(anti, (k, 0.0, 0.0), (0.0, 0.0, k))) < 1e-12
    approx(ac.collective_h([(0.0, 0.0, 0.0)], k), 1.0, 1e-15)

    # attenuation bookkeeping
    approx(ac.beer_transmission(10, 0.015j), math.exp(-0.3), 1e-15)

    # seeded sampling is reproducible
    a = ac.monte_carlo("uniform", 50, "F2", 500, 20240816)
    b = ac.monte_carlo("uniform", 50, "F2", 500, 20240816)
    assert a == b
    assert abs(a["mean"].real - 1.0 / 50.0) < 5 * a["std_error"]

    # preset scan comes back column-major with gaps as None
    scan = ac.scan_preset("fig3")
    rows = scan["rows"]
    i0 = rows["delta_over_gamma"].index(0.0)
    approx(rows["transmission"][i0], 1.0 / 121.0, 1e-15)
    assert rows["sidebeam_T"][i0] is None
    assert scan["scenario"]["eta_c"] == 10.0

    print("smoke test OK")


if __name__ == "__main__":
    main()
