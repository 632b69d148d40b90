"""End-to-end runs of the command-line driver (no subprocesses)."""

import json
from pathlib import Path

import pytest

import pimod.corpus
from pimod.cli import main
from pimod.errors import InternalSoundnessError
from test_syntax import JUDGMENTS_SRC, SORTS_SRC

CORPUS_DIR = Path(pimod.corpus.__file__).parent
SYSTEMF_SORTS = str(CORPUS_DIR / "systemf.sorts")
SYSTEMF_EPTS = str(CORPUS_DIR / "systemf.epts")
BAD_DK = str(CORPUS_DIR / "bad_traditional.dk")


@pytest.fixture
def sandbox(tmp_path):
    sorts = tmp_path / "sf.sorts"
    sorts.write_text(SORTS_SRC)
    epts = tmp_path / "sf.epts"
    epts.write_text(JUDGMENTS_SRC)
    return tmp_path, str(sorts), str(epts)


class TestCheckDk:
    def test_good_theory(self, tmp_path, capsys):
        f = tmp_path / "nat.dk"
        f.write_text("constant N : TYPE.\nconstant z : N.\n"
                     "assume k : N.\ncheck z : N.\ncheck k : N.\n")
        assert main(["check-dk", str(f)]) == 0
        out = capsys.readouterr().out
        assert out.count("ok  ") == 3 and "FAIL" not in out

    def test_failed_check(self, tmp_path, capsys):
        f = tmp_path / "nat.dk"
        f.write_text("constant N : TYPE.\nconstant z : N.\ncheck z : N -> N.\n")
        assert main(["check-dk", str(f)]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_parse_error_is_reported_not_raised(self, tmp_path, capsys):
        f = tmp_path / "broken.dk"
        f.write_text("constant : TYPE.")
        assert main(["check-dk", str(f)]) == 1
        assert "expected a constant name" in capsys.readouterr().out

    def test_missing_file(self, capsys):
        assert main(["check-dk", "no/such/file.dk"]) == 1
        assert "cannot read" in capsys.readouterr().out

    def test_trace_goes_to_stderr(self, tmp_path, capsys):
        f = tmp_path / "nat.dk"
        f.write_text("constant N : TYPE.\nconstant z : N.\ncheck z : N.\n")
        assert main(["check-dk", "--trace", str(f)]) == 0
        assert "z : N" in capsys.readouterr().err


class TestCheckEpts:
    def test_corpus_both_modes(self, capsys):
        for mode in ("finite", "internalized"):
            assert main(["check-epts", SYSTEMF_SORTS, SYSTEMF_EPTS,
                         "--mode", mode]) == 0
            out = capsys.readouterr().out
            assert f"[{mode}]" in out and "FAIL" not in out

    def test_fuel_env_and_flag(self, monkeypatch, capsys):
        monkeypatch.setenv("PIMOD_FUEL", "1")
        assert main(["decode", SYSTEMF_SORTS, SYSTEMF_EPTS]) == 1
        assert "FuelExhausted" in capsys.readouterr().out
        assert main(["decode", SYSTEMF_SORTS, SYSTEMF_EPTS,
                     "--fuel", "100000"]) == 0


class TestEncodeDecode:
    def test_encode_emits_checkable_theories(self, sandbox, capsys):
        tmp, sorts, epts = sandbox
        out = tmp / "gen"
        assert main(["encode", sorts, epts, "--out", str(out)]) == 0
        theory = out / "sf_finite_theory.dk"
        judgments = out / "sf_finite_judgments.dk"
        assert theory.exists() and judgments.exists()
        capsys.readouterr()
        # the emitted files stand on their own under the kernel
        assert main(["check-dk", str(theory), str(judgments)]) == 0
        assert "FAIL" not in capsys.readouterr().out

    def test_encode_internalized_names_files_by_mode(self, sandbox, capsys):
        tmp, sorts, epts = sandbox
        out = tmp / "gen"
        assert main(["encode", sorts, epts, "--mode", "internalized",
                     "--out", str(out)]) == 0
        assert (out / "sf_internalized_theory.dk").exists()

    def test_decode_judgments_round_trip(self, capsys):
        assert main(["decode", SYSTEMF_SORTS, SYSTEMF_EPTS]) == 0
        out = capsys.readouterr().out
        assert "round-trips" in out and "FAIL" not in out

    def test_decode_single_term(self, sandbox, capsys):
        _, sorts, epts = sandbox
        assert main(["decode", sorts, epts, "--term", "c", "--type", "C"]) == 0
        out = capsys.readouterr().out.strip()
        assert out.endswith("c")

    def test_decode_term_needs_type(self, sandbox, capsys):
        _, sorts, epts = sandbox
        assert main(["decode", sorts, epts, "--term", "c"]) == 1
        assert "--type" in capsys.readouterr().out

    def test_internal_violation_exits_2(self, sandbox, monkeypatch, capsys):
        _, sorts, epts = sandbox

        def boom(*a, **k):
            raise InternalSoundnessError("fabricated for the exit-code test")

        monkeypatch.setattr("pimod.cli.conservative_invert", boom)
        assert main(["decode", sorts, epts, "--term", "c", "--type", "C"]) == 2
        err = capsys.readouterr().err
        assert "internal soundness violation" in err
        assert "fabricated" in err


class TestRoundtrip:
    def test_corpus_adequacy(self, capsys):
        for mode in ("finite", "internalized"):
            assert main(["roundtrip", SYSTEMF_SORTS, SYSTEMF_EPTS,
                         "--mode", mode]) == 0
            assert "FAIL" not in capsys.readouterr().out

    def test_machine_readable_is_deterministic_json(self, capsys):
        argv = ["roundtrip", SYSTEMF_SORTS, SYSTEMF_EPTS,
                "--format", "machine-readable"]
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        assert capsys.readouterr().out == first
        for line in first.splitlines():
            rec = json.loads(line)
            assert rec["ok"] is True
            assert {"kind", "subject"} <= rec.keys()

    def test_trace_narrates_the_simulation(self, capsys):
        assert main(["roundtrip", SYSTEMF_SORTS, SYSTEMF_EPTS, "--trace"]) == 0
        err = capsys.readouterr().err
        assert "--beta@" in err and "--β-->" in err


class TestAnalyze:
    def test_traditional_encoding_is_rejected_with_witness(self, capsys):
        assert main(["analyze", BAD_DK]) == 1
        out = capsys.readouterr().out
        assert "arity-violation" in out
        assert "head erasure changes from * to * -> *" in out

    def test_generated_theories_pass(self, sandbox, capsys):
        tmp, sorts, epts = sandbox
        out = tmp / "gen"
        main(["encode", sorts, epts, "--out", str(out)])
        main(["encode", sorts, epts, "--mode", "internalized", "--out", str(out)])
        capsys.readouterr()
        assert main(["analyze", str(out / "sf_finite_theory.dk")]) == 0
        assert "arity-preserving" in capsys.readouterr().out
        assert main(["analyze", str(out / "sf_internalized_theory.dk")]) == 0

    def test_trivial_overlaps_are_noted_not_fatal(self, tmp_path, capsys):
        mltt = CORPUS_DIR / "mltt.sorts"
        epts = CORPUS_DIR / "mltt.epts"
        out = tmp_path / "gen"
        main(["encode", str(mltt), str(epts), "--mode", "internalized",
              "--out", str(out)])
        capsys.readouterr()
        assert main(["analyze", str(out / "mltt_internalized_theory.dk")]) == 0
        assert "trivial overlaps noted" in capsys.readouterr().out


class TestMorphism:
    def test_phi_verify_and_apply(self, tmp_path, capsys):
        gen = tmp_path / "gen"
        phi_path = tmp_path / "phi.map"
        assert main(["encode", SYSTEMF_SORTS, SYSTEMF_EPTS,
                     "--out", str(gen)]) == 0
        assert main(["encode", SYSTEMF_SORTS, SYSTEMF_EPTS,
                     "--mode", "internalized", "--out", str(gen)]) == 0
        capsys.readouterr()

        assert main(["morphism", "phi", SYSTEMF_SORTS,
                     "--out", str(phi_path)]) == 0
        out = capsys.readouterr().out
        assert "morphism" in out and "FAIL" not in out
        assert phi_path.exists()

        src = str(gen / "systemf_finite_theory.dk")
        dst = str(gen / "systemf_internalized_theory.dk")
        assert main(["morphism", "verify", src, dst, str(phi_path)]) == 0
        assert "FAIL" not in capsys.readouterr().out

        assert main(["morphism", "apply", src, dst, str(phi_path),
                     "--term", "u@Type"]) == 0
        assert "u(type)" in capsys.readouterr().out

    def test_phi_needs_both_halves(self, tmp_path, capsys):
        coc = CORPUS_DIR / "coc.sorts"
        assert main(["morphism", "phi", str(coc)]) == 1
        assert "internalized" in capsys.readouterr().out

    def test_unwritable_out_is_a_clean_error(self, tmp_path, capsys):
        # --out names a file; handing it a directory must not traceback
        assert main(["morphism", "phi", SYSTEMF_SORTS,
                     "--out", str(tmp_path)]) == 1
        assert "cannot write" in capsys.readouterr().out


class TestCorpusListing:
    def test_lists_every_system_with_modes(self, capsys):
        assert main(["corpus"]) == 0
        out = capsys.readouterr().out
        for name in ("systemf", "coc", "typetype", "mltt"):
            assert name in out
        assert out.count("finite, internalized") == 2
