import os
from pathlib import Path

import pytest

import nfold

ROOT = Path(os.environ.get("NFOLD_SOURCE_DIR", Path(__file__).resolve().parents[2]))
MODELS = ROOT / "models"


@pytest.mark.parametrize("name", ["harmonic", "periodic", "sextic", "twofold"])
def test_verify_bundled(name):
    r = nfold.run("verify", MODELS / f"{name}.model")
    assert r.exit_code == 0
    assert r.report["status"] == "pass"
    assert r.report["schema_version"] == nfold.report_schema_version


def test_harmonic_roots_and_index():
    m = nfold.Model.load(str(MODELS / "harmonic.model"))
    assert (m.kind, m.N) == ("typeA", 3)
    roots = m.s_matrix("minus")["roots"]
    assert [round(z.real, 12) for z in roots] == [-1.0, 0.0, 1.0]
    assert m.index() == 3


def test_spectrum_matches_grid():
    r = nfold.run("spectrum", MODELS / "periodic.model", grid=2048)
    assert r.exit_code == 0
    assert r.csv.startswith("branch,level,eigenvalue")
    (branch,) = r.report["branches"]
    assert all(e["level"] >= 0 for e in branch["matching"])


def test_grid_levels_oscillator():
    m = nfold.Model.load(str(MODELS / "harmonic.model"))
    levels, rich = m.grid_levels("minus", levels=4, n=2048)
    assert len(levels) == 4
    # V- of the N=3 oscillator is q^2/2 - 3/2: levels k - 1.
    for k, e in enumerate(rich):
        assert abs(e - (k - 1.0)) < 1e-6


def test_input_errors():
    r = nfold.run_text("verify", "W = sin(q +\n")
    assert r.exit_code == 2
    assert r.report["status"] == "input_error"
    with pytest.raises(nfold.NfoldError):
        nfold.Model.parse("kind = twofold\nW = q\n")


def test_certify_corrupted_family_fails():
    r = nfold.run("certify-g", ROOT / "tests" / "data" / "sextic_corrupted.model")
    assert r.exit_code == 1
    assert r.report["certificate"]["pass"] is False
