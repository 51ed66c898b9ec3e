import numpy as np
import pytest

from multitile import config as C
from multitile import scenarios as S
from multitile.errors import BadParams, OverlappingComponents, PipelineError, UnknownScenario


@pytest.fixture(scope="module")
def reports():
    return {name: S.scenario(name) for name in S.BUILTINS}


def test_builtin_verdicts(reports):
    assert reports["square_boundary"].verdict == "necessary-condition-fails"
    assert reports["separated_square"].verdict == "structured-basis-certified"
    assert reports["plus_space"].verdict == "necessary-condition-fails"
    assert reports["helix3d"].verdict == "sufficiency-search-failed"
    assert reports["cantor_multitile"].verdict == "structured-basis-certified"
    assert reports["cube_multitile"].verdict == "structured-basis-certified"
    for r in reports.values():
        assert r.verdict in S.VERDICTS


def test_separated_square_details(reports):
    r = reports["separated_square"]
    assert np.allclose(r.t, [[0, 0], [0, 1 / 3]])
    assert r.det_floor == pytest.approx(2 / 3)
    assert r.profile.ess_inf == pytest.approx(1.0, abs=1e-6)
    assert r.case.kind == "c"


def test_helix_details(reports):
    r = reports["helix3d"]
    assert r.separation.passes and r.separation.global_min == pytest.approx(1.0, abs=1e-15)
    assert r.certificate is None and r.failure


def test_certified_reports_clear_the_floor(reports):
    for r in reports.values():
        if r.verdict == "structured-basis-certified":
            assert r.profile.ess_inf >= r.det_floor - 1e-9


def test_short_circuit_and_force_all(reports):
    assert reports["square_boundary"].case is None
    assert "skipped: necessary condition fails" in reports["square_boundary"].body
    forced = S.scenario("square_boundary", nodes=200, force_all=True)
    assert forced.case is not None
    assert forced.verdict == "necessary-condition-fails"


def test_report_sections(reports):
    body = reports["separated_square"].body
    heads = [line for line in body.splitlines() if line.startswith("== ")]
    assert [h.split(" [")[0].strip("= ") for h in heads] == [
        "scenario", "separation", "sufficiency", "determinant profile", "bound scan", "verdict"]
    assert body.rstrip().endswith("structured-basis-certified")


def test_scenario_params():
    r = S.scenario("separated_square", {"delta": "0.25"}, nodes=200)
    # v = e_2 / (2 (1 + delta)), so eps1 = delta / (2 (1 + delta))
    assert r.certificate.eps1 == pytest.approx(0.25 / 2.5, rel=1e-9)
    r = S.scenario("cantor_multitile", {"shifts": "0,2", "depth": "3"})
    assert r.measure.N == 2 and r.verdict == "structured-basis-certified"
    r = S.scenario("cube_multitile", {"level": "2", "nodes": "4"})
    assert r.measure.N == 2


def test_scenario_errors():
    with pytest.raises(UnknownScenario):
        S.scenario("torus")
    with pytest.raises(BadParams):
        S.scenario("separated_square", {"delta": "0"})
    with pytest.raises(BadParams):
        S.scenario("separated_square", {"delta": "-1"})
    with pytest.raises(BadParams):
        S.scenario("square_boundary", {"colour": "red"})
    with pytest.raises(BadParams):
        S.scenario("cantor_multitile", {"shifts": "1,1"})


@pytest.mark.parametrize("name", sorted(S.BUILTINS))
def test_shipped_config_matches_builtin(name, tmp_path, reports):
    path = tmp_path / f"{name}.cfg"
    path.write_text(S.shipped_config_text(name))
    assert S.run_config(path).body == reports[name].body


def test_builtin_runs_are_deterministic(tmp_path):
    for name in ("separated_square", "helix3d", "cube_multitile"):
        a, b = S.scenario(name), S.scenario(name)
        assert a.body == b.body
        a.write(tmp_path / "a", timestamp="t0")
        b.write(tmp_path / "b", timestamp="t1")
        for f in ("points.csv", "profile.csv", "scan.csv", "spectrum.csv"):
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
        ra = (tmp_path / "a" / "report.txt").read_text().splitlines()
        rb = (tmp_path / "b" / "report.txt").read_text().splitlines()
        assert ra[0] != rb[0] and ra[1:] == rb[1:]


def test_overlapping_config_fails_at_assemble(tmp_path):
    text = S.shipped_config_text("square_boundary").replace(
        "field = square_lower", "field = square_upper")
    path = tmp_path / "bad.cfg"
    path.write_text(text)
    with pytest.raises(PipelineError) as info:
        S.run_config(path)
    assert info.value.stage == "assemble"
    assert isinstance(info.value.cause, OverlappingComponents)


def test_seeded_rerun_same_certificate(tmp_path):
    text = S.shipped_config_text("cube_multitile")
    path = tmp_path / "c.cfg"
    path.write_text(text)
    a, b = S.run_config(path, seed=9), S.run_config(path, seed=9)
    assert np.array_equal(a.certificate.v, b.certificate.v)
    assert a.certificate.eps1 == b.certificate.eps1


def test_run_config_writes_outputs(tmp_path):
    cfg = S.builtin_config("separated_square", {"nodes": 100})
    cfg.output["dir"] = str(tmp_path / "out")
    path = tmp_path / "s.cfg"
    path.write_text(C.dump_config(cfg))
    S.run_config(path)
    names = sorted(p.name for p in (tmp_path / "out").iterdir())
    assert names == ["points.csv", "profile.csv", "report.txt", "scan.csv", "spectrum.csv"]


def test_emit_profile_square_n4(tmp_path):
    cfg = S.builtin_config("square_boundary", {"nodes": 4})
    _, m = S.build_measure(cfg)
    path = tmp_path / "p.csv"
    S.emit_profile(m, [[0, 0], [0, 0.5]], path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x_1,x_2,min_sep,abs_det,sigma_min" and len(lines) == 5
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert np.allclose(rows[:, 0], [1 / 8, 3 / 8, 5 / 8, 7 / 8])
    assert np.allclose(rows[:, 3], 2 * np.abs(np.sin(2 * np.pi * rows[:, 0] * 0.5)), atol=1e-11)


def test_emit_profile_single_component(tmp_path):
    cfg = S.builtin_config("cantor_multitile", {"shifts": "0", "depth": "2"})
    _, m = S.build_measure(cfg)
    path = tmp_path / "p.csv"
    S.emit_profile(m, [[0.3]], path)
    rows = path.read_text().splitlines()[1:]
    assert [r.split(",")[2] for r in rows] == ["1"] * 4
