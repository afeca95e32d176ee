"""Smoke test for the pystrata extension.

Run after `cargo build -p strata-py` (or with pystrata installed):
    python3 crates/py/python/smoke_test.py
"""

import importlib.machinery
import importlib.util
import pathlib
import sys


def load():
    try:
        import pystrata

        return pystrata
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parents[3]
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libpystrata.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("pystrata", str(lib))
            spec = importlib.util.spec_from_loader("pystrata", loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("pystrata not found; build it with `cargo build -p strata-py`")


def main():
    ps = load()

    ids = [e["id"] for e in ps.corpus()]
    assert "susp_rp3_punctured" in ids, ids

    r = ps.compute("s2", "ih")
    assert [d["computed"] for d in r["degrees"]] == ["Z", "0", "Z"], r

    r = ps.compute("suspension(rp3)", "blowup", perversity="0", ring="Z")
    assert [d["computed"] for d in r["degrees"]] == ["Z", "0", "0", "Z/2", "Z"], r

    r = ps.compute("susp_rp3_punctured", "bm", perversity="1")
    assert [d["computed"] for d in r["degrees"]] == ["0", "Z/2", "0", "0", "Z"], r
    assert r["pass"], r

    reports = ps.check("cone", rings=["Z/2"], spaces=["rp2"], scan=(0, 2))
    assert len(reports) == 3 and all(x["pass"] for x in reports), reports

    try:
        ps.compute("s2", "nonsense")
    except ValueError:
        pass
    else:
        raise AssertionError("bad theory accepted")

    print("pystrata smoke test passed")


if __name__ == "__main__":
    main()
