"""Exit-code contract, report shape and fixture round trips for the CLI."""

import json
import types

import pytest

from cpk import cli
from cpk.fixtures import (
    abstract_document,
    fixture_document,
    fixture_ids,
    graph_document,
    two_graph_document,
    unitary_document,
    write_fixtures,
)

from test_ktheory import disjoint_flip_pair


@pytest.fixture(scope="module")
def fixdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("fixtures")
    write_fixtures(str(d))
    return d


def run(capsys, argv, expect=None):
    rc = cli.main(argv)
    out = capsys.readouterr().out
    if expect is not None:
        assert rc == expect, out
    return rc, json.loads(out)


def write_doc(tmp_path, doc, name="doc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def final_groups(report):
    f = report["results"]["final"]
    return f["K0"].get("group"), f["K1"].get("group")


class TestValidate:
    def test_every_bundled_fixture_validates(self, fixdir, capsys):
        for fid in fixture_ids():
            rc, rep = run(capsys, ["validate", str(fixdir / f"{fid}.json")], expect=0)
            assert rep["results"]["valid"], fid

    def test_sink_graph_strict_exit_1_names_vertex(self, tmp_path, capsys):
        doc = {
            "kind": "graph",
            "vertices": ["a", "b"],
            "edges": [{"id": "e", "src": "a", "rng": "b"}],
        }
        path = write_doc(tmp_path, doc)
        rc, rep = run(capsys, ["validate", path, "--strict"], expect=1)
        assert any("'b'" in p for p in rep["results"]["problems"])
        run(capsys, ["validate", path], expect=0)

    def test_noncommuting_permutations_exit_1(self, tmp_path, capsys):
        doc = {
            "kind": "permutation",
            "vertices": ["0", "1", "2"],
            "perm1": {"0": "1", "1": "0", "2": "2"},
            "perm2": {"0": "0", "1": "2", "2": "1"},
        }
        rc, rep = run(capsys, ["validate", write_doc(tmp_path, doc)], expect=1)
        assert any("commute" in p for p in rep["results"]["problems"])

    def test_nonunitary_matrix_exit_1(self, tmp_path, capsys):
        doc = fixture_document("ex3.5-unitary-chi")
        doc["matrix"][0][0] = [2.0, 0.0]
        rc, rep = run(capsys, ["validate", write_doc(tmp_path, doc)], expect=1)
        assert any("unitary" in p for p in rep["results"]["problems"])

    def test_bad_invariant_chain_exit_1(self, tmp_path, capsys):
        doc = fixture_document("ex4.7-abstract-p2")
        doc["K0"] = {"rank": 0, "torsion": [4, 2]}
        rc, rep = run(capsys, ["validate", write_doc(tmp_path, doc)], expect=1)
        assert any("chain" in p for p in rep["results"]["problems"])


class TestMalformed:
    def test_truncated_json_exit_2(self, tmp_path, capsys):
        path = tmp_path / "trunc.json"
        path.write_text('{"kind": "graph", "vertices": ["v"')
        run(capsys, ["validate", str(path)], expect=2)

    def test_unknown_kind_exit_2(self, tmp_path, capsys):
        run(capsys, ["validate", write_doc(tmp_path, {"kind": "nope"})], expect=2)

    def test_missing_key_exit_2(self, tmp_path, capsys):
        doc = {"kind": "graph", "vertices": ["v"]}
        rc, rep = run(capsys, ["ktheory", write_doc(tmp_path, doc)], expect=2)
        assert "edges" in rep["error"]

    def test_missing_file_exit_2(self, tmp_path, capsys):
        run(capsys, ["validate", str(tmp_path / "absent.json")], expect=2)

    def test_bad_chi_entry_shape_exit_2(self, tmp_path, capsys):
        doc = fixture_document("ex3.5-flip-2-2")
        doc["chi"][0] = ["e0", "f0"]
        run(capsys, ["validate", write_doc(tmp_path, doc)], expect=2)

    def test_fock_check_rejects_abstract_kind_exit_2(self, fixdir, capsys):
        run(capsys, ["fock-check", str(fixdir / "ex4.7-abstract-p2.json")], expect=2)

    def test_ktheory_rejects_cover_kind_exit_2(self, fixdir, capsys):
        run(capsys, ["ktheory", str(fixdir / "ex2.2-double-cover.json")], expect=2)


class TestKtheory:
    def test_both_routes_exit_0_on_all_two_layer_fixtures(self, fixdir, capsys):
        for fid in fixture_ids():
            doc = fixture_document(fid)
            if doc["kind"] not in ("two_graph", "permutation"):
                continue
            rc, rep = run(
                capsys,
                ["ktheory", str(fixdir / f"{fid}.json"), "--route", "both"],
                expect=0,
            )
            assert rep["results"]["diagram"]["consistent"], fid
            assert not rep["results"]["diagram"]["problems"], fid

    def test_flip_3_3(self, fixdir, capsys):
        rc, rep = run(
            capsys, ["ktheory", str(fixdir / "ex4.6-flip-3-3.json")], expect=0
        )
        assert final_groups(rep) == ("Z/2", "Z/2")
        assert rep["results"]["ideal_sum"]["K0"]["group"] == "Z + Z/2"

    def test_single_stage_graph(self, fixdir, capsys):
        rc, rep = run(
            capsys, ["ktheory", str(fixdir / "ex1.2.1-circle.json")], expect=0
        )
        assert final_groups(rep) == ("Z", "Z")
        assert rep["results"]["toeplitz_corner"]["K0"]["group"] == "Z"

    def test_abstract_runs_iterated_route_only(self, fixdir, capsys):
        rc, rep = run(
            capsys, ["ktheory", str(fixdir / "ex4.7-abstract-p2.json")], expect=0
        )
        assert "ideal_sum" not in rep["results"]
        assert any("two-stage route" in n for n in rep["results"]["notes"])
        assert rep["results"]["stage1"]["layer1"]["K0"]["group"] == "Z"
        assert rep["results"]["stage1"]["layer2"]["K0"]["group"] == "Z + Z/2"

    def test_ambiguity_exits_0_with_candidates(self, tmp_path, capsys):
        path = write_doc(tmp_path, two_graph_document(disjoint_flip_pair()))
        rc, rep = run(capsys, ["ktheory", path, "--route", "iterated"], expect=0)
        k1 = rep["results"]["final"]["K1"]
        assert k1["status"] == "AmbiguousExtension"
        assert sorted(k1["candidates"]) == ["Z/2 + Z/2", "Z/4"]
        assert "group" not in k1

    def test_assume_split_watermark(self, tmp_path, capsys):
        path = write_doc(tmp_path, two_graph_document(disjoint_flip_pair()))
        rc, rep = run(
            capsys, ["ktheory", path, "--route", "iterated", "--assume-split"],
            expect=0,
        )
        assert rep["assumptions"] == ["split-extension"]
        assert rep["results"]["final"]["K1"]["group"] == "Z/2 + Z/2"
        assert rep["results"]["final"]["K1"]["assumption"] == "split-extension"

    def test_extension_bound_exit_4(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("CPK_EXT_BOUND", "1")
        path = write_doc(tmp_path, two_graph_document(disjoint_flip_pair()))
        rc, rep = run(capsys, ["ktheory", path, "--route", "iterated"], expect=4)
        assert rep["status"] == "resource-limit"

    def test_iterated_route_still_reports_ideal_sum(self, fixdir, capsys):
        rc, rep = run(
            capsys,
            ["ktheory", str(fixdir / "ex4.5-torus.json"), "--route", "iterated"],
            expect=0,
        )
        assert "diagram" not in rep["results"]
        assert rep["results"]["ideal_sum"]["K0"]["group"] == "Z^2"
        assert rep["results"]["ideal_sum"]["K1"]["group"] == "Z"

    def test_route_inconsistency_exits_3(self, fixdir, capsys, monkeypatch):
        real = cli.diagram_report

        def tampered(spec, assume_split=False, bound=None):
            diag = real(spec, assume_split=assume_split, bound=bound)
            return types.SimpleNamespace(
                **{**diag.__dict__, "problems": ("injected mismatch",)}
            )

        monkeypatch.setattr(cli, "diagram_report", tampered)
        rc, rep = run(
            capsys, ["ktheory", str(fixdir / "ex4.5-torus.json")], expect=3
        )
        assert rep["status"] == "route-inconsistency"
        assert "injected mismatch" in rep["results"]["diagram"]["problems"]


class TestFockCheck:
    def test_flip_fixture_passes(self, fixdir, capsys):
        rc, rep = run(
            capsys,
            ["fock-check", str(fixdir / "ex3.5-flip-2-2.json"), "--degree", "3"],
            expect=0,
        )
        assert rep["results"]["all_passed"]
        assert rep["results"]["dimension"] == 49

    def test_unitary_fixture_passes(self, fixdir, capsys):
        rc, rep = run(
            capsys, ["fock-check", str(fixdir / "ex3.5-unitary-chi.json")], expect=0
        )
        assert all(c["passed"] for c in rep["results"]["checks"])

    def test_rounding_noise_below_absurd_tolerance_exit_1(self, tmp_path, capsys):
        import math

        from cpk.model import rotation_unitary_chi

        doc = unitary_document(rotation_unitary_chi(math.pi / 6, math.pi / 6))
        rc, rep = run(
            capsys,
            ["fock-check", write_doc(tmp_path, doc), "--tol", "1e-18"],
            expect=1,
        )
        assert rep["status"] == "defect"
        assert not rep["results"]["all_passed"]

    def test_corrupted_document_exit_1(self, tmp_path, capsys):
        doc = fixture_document("ex3.5-unitary-chi")
        doc["matrix"][2][2] = [0.5, 0.0]
        rc, rep = run(
            capsys, ["fock-check", write_doc(tmp_path, doc)], expect=1
        )
        assert rep["status"] == "invalid"

    def test_basis_cap_exit_4(self, tmp_path, capsys):
        doc = {
            "kind": "graph",
            "vertices": ["v"],
            "edges": [{"id": f"e{i}", "src": "v", "rng": "v"} for i in range(10)],
        }
        rc, rep = run(
            capsys,
            ["fock-check", write_doc(tmp_path, doc), "--degree", "6"],
            expect=4,
        )
        assert rep["status"] == "resource-limit"


class TestPullback:
    def test_double_cover_roundtrip(self, fixdir, tmp_path, capsys):
        out = str(tmp_path / "pulled.json")
        rc, rep = run(
            capsys,
            [
                "pullback",
                str(fixdir / "ex2.2-two-cycle.json"),
                str(fixdir / "ex2.2-double-cover.json"),
                out,
            ],
            expect=0,
        )
        assert rep["results"] == {"written": out, "vertices": 4, "edges": 8}
        run(capsys, ["validate", out, "--strict"], expect=0)

    def test_non_surjective_cover_exit_1(self, fixdir, tmp_path, capsys):
        bad = write_doc(
            tmp_path, {"kind": "cover", "vertices": ["x"], "map": {"x": "a"}}
        )
        rc, rep = run(
            capsys,
            [
                "pullback",
                str(fixdir / "ex2.2-two-cycle.json"),
                bad,
                str(tmp_path / "out.json"),
            ],
            expect=1,
        )
        assert "surjective" in rep["error"]

    def test_wrong_document_kinds_exit_2(self, fixdir, tmp_path, capsys):
        out = str(tmp_path / "out.json")
        run(
            capsys,
            [
                "pullback",
                str(fixdir / "ex3.5-flip-2-2.json"),
                str(fixdir / "ex2.2-double-cover.json"),
                out,
            ],
            expect=2,
        )


class TestExamples:
    def test_required_ids_present(self, capsys):
        rc, rep = run(capsys, ["examples"], expect=0)
        ids = [f["id"] for f in rep["results"]["fixtures"]]
        assert "ex4.6-flip-3-3" in ids
        assert "ex3.5-unitary-chi" in ids
        assert ids == fixture_ids()
        assert all(f["description"] for f in rep["results"]["fixtures"])

    def test_listing_is_stable_across_runs(self, capsys):
        cli.main(["examples"])
        first = capsys.readouterr().out
        cli.main(["examples"])
        second = capsys.readouterr().out
        assert first == second

    def test_write_materializes_all_fixtures(self, tmp_path, capsys):
        rc, rep = run(capsys, ["examples", "--write", str(tmp_path)], expect=0)
        assert len(rep["results"]["written"]) == len(fixture_ids())
        for path in rep["results"]["written"]:
            assert json.loads(open(path).read())["kind"]


class TestReports:
    def test_report_json_round_trips_losslessly(self, fixdir, capsys):
        rc = cli.main(["ktheory", str(fixdir / "ex4.6-flip-3-3.json")])
        out = capsys.readouterr().out
        rep = json.loads(out)
        assert json.loads(json.dumps(rep, sort_keys=True)) == rep
        assert rep["tool"] == "cpk"
        assert rep["command"] == "ktheory"
        assert rep["version"]

    def test_identical_input_gives_identical_report(self, fixdir, capsys):
        argv = ["ktheory", str(fixdir / "ex3.4-z2xz3.json"), "--route", "both"]
        cli.main(argv)
        first = capsys.readouterr().out
        cli.main(argv)
        second = capsys.readouterr().out
        assert first == second

    def test_text_format_mirrors_json(self, fixdir, capsys):
        path = str(fixdir / "ex1.2.1-circle.json")
        rc = cli.main(["validate", path])
        rep = json.loads(capsys.readouterr().out)
        rc = cli.main(["validate", path, "--format", "text"])
        text = capsys.readouterr().out
        lines = [l for l in text.splitlines() if l]
        leaves = []
        cli._flatten("", cli._jsonable(rep), leaves)
        assert lines == leaves
        assert 'status: "ok"' in lines

    def test_document_serializers_round_trip(self, fixdir):
        for fid in fixture_ids():
            doc = fixture_document(fid)
            kind, model = cli.parse_document(doc)
            if kind == "graph":
                assert graph_document(model) == doc
            elif kind == "two_graph":
                assert two_graph_document(model) == doc
            elif kind == "abstract_kdata":
                assert abstract_document(model) == doc
            elif kind == "unitary_chi":
                assert unitary_document(model) == doc
            # permutation and cover documents materialize as other types

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["--version"])
        assert exc.value.code == 0
