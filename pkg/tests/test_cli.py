import json
from pathlib import Path

import pytest

from itruth.cli import main

UNIVERSE = """\
0=0
Tr(#"0=0")
~(0=0)
~Tr(#"0=0")
"""

CHAIN = """\
numeral_bound 2
world w0
world w1
le w0 w1
holds w1 0=0
"""


@pytest.fixture()
def files(tmp_path):
    u = tmp_path / "u.txt"
    u.write_text(UNIVERSE)
    m = tmp_path / "m.struct"
    m.write_text(CHAIN)
    return tmp_path, str(u), str(m)


def run(argv, capsys):
    rc = main(argv)
    out = capsys.readouterr()
    return rc, out.out, out.err


class TestExitCodes:
    def test_query_answered_is_zero(self, files, capsys):
        _, _, m = files
        rc, out, _ = run(["force", "--mode", "standard", "--structure", m,
                          "--world", "w0", "--formula", "bot"], capsys)
        assert rc == 0
        assert "fails" in out

    def test_property_failure_is_one(self, files, capsys, tmp_path):
        bad = tmp_path / "bad.struct"
        bad.write_text("world a\nworld b\nle a b\nholds a 0=0\n")
        rc, out, _ = run(["validate", "--structure", str(bad)], capsys)
        assert rc == 1
        assert "heredity" in out

    def test_input_error_is_two(self, files, capsys, tmp_path):
        _, u, m = files
        rc, _, err = run(["force", "--mode", "standard", "--structure",
                          str(tmp_path / "missing.struct"), "--world", "w0",
                          "--formula", "bot"], capsys)
        assert rc == 2
        rc, _, err = run(["force", "--mode", "standard", "--structure", m,
                          "--world", "w0", "--formula", "0=0 ->"], capsys)
        assert rc == 2

    def test_validate_ok(self, files, capsys):
        _, _, m = files
        rc, out, _ = run(["validate", "--structure", m], capsys)
        assert rc == 0 and "persistent" in out


class TestSubcommands:
    def test_jump_writes_reports_and_witnesses(self, files, capsys):
        tmp, u, m = files
        out_dir = tmp / "rep"
        rc, out, _ = run(["jump", "--scheme", "svi", "--universe-file", u,
                          "--max-worlds", "2", "--out", str(out_dir)], capsys)
        assert rc == 0
        assert (out_dir / "jump.txt").exists()
        assert (out_dir / "jump.jsonl").exists()
        assert (out_dir / "jump_membership.png").exists()
        assert list(out_dir.glob("witness_*.struct"))

    def test_witness_replays_through_force(self, files, capsys):
        tmp, u, m = files
        out_dir = tmp / "rep"
        run(["jump", "--scheme", "svi", "--universe-file", u,
             "--max-worlds", "2", "--out", str(out_dir)], capsys)
        rows = [json.loads(line) for line in
                (out_dir / "jump.jsonl").read_text().splitlines()]
        excluded = [r for r in rows if r.get("member") is False]
        assert excluded
        for row in excluded:
            wit = out_dir / f"witness_{row['code']}.struct"
            rc, out, _ = run(["force", "--mode", "standard", "--structure",
                              str(wit), "--world", row["witness_world"],
                              "--formula", row["formula"]], capsys)
            assert rc == 0
            assert "fails" in out

    def test_lfp_scheme_and_csv(self, files, capsys):
        tmp, u, _ = files
        for scheme in ("svi", "csv"):
            rc, out, _ = run(["lfp", "--scheme", scheme, "--universe-file", u,
                              "--max-worlds", "2"], capsys)
            assert rc == 0
            assert "stabilised" in out

    def test_lfp_report_replays_library_call(self, files, capsys):
        tmp, u, _ = files
        out_dir = tmp / "lfprep"
        run(["lfp", "--scheme", "svi", "--universe-file", u, "--max-worlds", "2",
             "--no-figures", "--out", str(out_dir)], capsys)
        config = json.loads((out_dir / "lfp.jsonl").read_text().splitlines()[0])
        from itruth import ClassSpec, Universe, lfp, parse

        universe = Universe.from_texts(
            [l for l in Path(u).read_text().splitlines() if l.strip()]
        )
        res = lfp("svi", ClassSpec(2, universe, 4))
        assert config["fixed_point_codes"] == sorted(res.fixed)
        assert config["steps"] == res.steps

    def test_audit_ivf(self, files, capsys):
        _, u, _ = files
        rc, out, _ = run(["audit", "--theory", "IVF", "--universe-file", u,
                          "--max-worlds", "2"], capsys)
        assert rc == 0
        assert "IVB8" in out

    def test_embed(self, files, capsys):
        _, _, m = files
        rc, out, _ = run(["embed", "--source", m, "--target", m], capsys)
        assert rc == 0
        assert "w0->w0 w1->w1" in out

    def test_audit_isv(self, files, capsys):
        _, u, _ = files
        rc, out, _ = run(["audit", "--theory", "ISV", "--universe-file", u,
                          "--max-worlds", "2"], capsys)
        assert rc == 0
        assert "ISV7" in out

    def test_audit_csv(self, files, capsys):
        _, u, _ = files
        rc, out, _ = run(["audit", "--theory", "CSV", "--universe-file", u,
                          "--max-worlds", "2"], capsys)
        assert rc == 0
        assert "truth-transparency" in out

    def test_audit_ff(self, files, capsys):
        _, u, m = files
        rc, out, _ = run(["audit", "--theory", "FF", "--structure", m,
                          "--universe-file", u, "--max-worlds", "2"], capsys)
        assert rc == 0
        assert "intersection-theorem" in out

    def test_force_scheme_mode(self, files, capsys):
        _, u, m = files
        rc, out, _ = run(["force", "--mode", "scheme", "--scheme", "svi",
                          "--structure", m, "--world", "w1",
                          "--formula", 'Tr(#"0=0")', "--universe-file", u,
                          "--max-worlds", "2"], capsys)
        assert rc == 0 and "holds" in out

    def test_transform_and_back(self, files, capsys, tmp_path):
        g = tmp_path / "g.model"
        g.write_text("world w0\nworld w1\nle w0 w1\ndom w0 0\ndom w1 0\nval w1 p\n")
        rc, out, _ = run(["transform", "--to", "s4", "--model", str(g)], capsys)
        assert rc == 0 and "val w1 p" in out

    def test_search_discrepancy_modes(self, files, capsys):
        _, u, _ = files
        rc, out, _ = run(["search-discrepancy", "--domain", "constant",
                          "--universe-file", u, "--max-worlds", "2"], capsys)
        assert rc == 0 and "0 disagreement" in out
        rc, out, _ = run(["search-discrepancy", "--domain", "expanding",
                          "--max-worlds", "2", "--max-domain", "2"], capsys)
        assert rc == 0 and "0 disagreement" in out

    def test_enumerate(self, files, capsys):
        _, u, _ = files
        rc, out, _ = run(["enumerate", "--universe-file", u, "--max-worlds", "1"],
                         capsys)
        assert rc == 0
        assert "16 structure(s)" in out


class TestDeterminism:
    def test_identical_runs_identical_bytes(self, files, capsys):
        tmp, u, _ = files
        out_dir = tmp / "rep"
        argv = ["lfp", "--scheme", "svi", "--universe-file", u,
                "--max-worlds", "2", "--no-figures", "--out", str(out_dir)]
        run(argv, capsys)
        first = {p.name: p.read_bytes() for p in out_dir.iterdir()}
        run(argv, capsys)
        second = {p.name: p.read_bytes() for p in out_dir.iterdir()}
        assert first == second

    def test_worker_count_invariance(self, files, capsys):
        tmp, u, _ = files
        outs = []
        for i, workers in enumerate(("1", "3")):
            out_dir = tmp / f"w{i}"
            run(["jump", "--scheme", "vci", "--universe-file", u,
                 "--max-worlds", "2", "--workers", workers, "--no-figures",
                 "--out", str(out_dir)], capsys)
            outs.append((out_dir / "jump.jsonl").read_bytes())
        assert outs[0] == outs[1]
