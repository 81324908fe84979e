import json

import numpy as np
import pytest

from voxkit import cli, corpus, dsp, wavio
from conftest import build_corpus, sine

SR = 22050


@pytest.fixture(scope="module")
def small_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("small")
    return build_corpus(root, 6, seed=3)


class TestParsing:
    def test_help_exits_zero(self):
        with pytest.raises(SystemExit) as info:
            cli.main(["--help"])
        assert info.value.code == 0

    def test_unknown_command_exits_two(self, capsys):
        with pytest.raises(SystemExit) as info:
            cli.main(["frobnicate"])
        assert info.value.code == cli.EXIT_USAGE
        capsys.readouterr()

    def test_unknown_stage_is_usage_error(self, small_corpus, tmp_path, capsys):
        code = cli.main([
            "preprocess", "--manifest", str(small_corpus),
            "--out-dir", str(tmp_path / "out"), "--stages", "DN,XYZ",
        ])
        assert code == cli.EXIT_USAGE
        assert "usage error" in capsys.readouterr().err

    def test_dry_out_of_range_is_usage_error(self, small_corpus, tmp_path, capsys):
        code = cli.main([
            "preprocess", "--manifest", str(small_corpus),
            "--out-dir", str(tmp_path / "out"), "--dry", "1.5",
        ])
        assert code == cli.EXIT_USAGE
        assert "--dry" in capsys.readouterr().err

    def test_missing_manifest_is_runtime_error(self, tmp_path, capsys):
        code = cli.main([
            "report", "--manifest", str(tmp_path / "nope.tsv"),
        ])
        assert code == cli.EXIT_RUNTIME
        assert "error:" in capsys.readouterr().err

    def test_derive_seed_stable_and_distinct(self):
        a = cli.derive_seed(0, "utt000")
        assert a == cli.derive_seed(0, "utt000")
        assert isinstance(a, int) and 0 <= a < 2**32
        assert a != cli.derive_seed(0, "utt001")
        assert a != cli.derive_seed(1, "utt000")


def parse_stage_table(stdout):
    """Rows of (label, hours, utterances) from the printed table."""
    rows = []
    for line in stdout.splitlines():
        parts = line.split()
        if len(parts) == 3 and parts[0] != "stage":
            try:
                rows.append((parts[0], float(parts[1]), int(parts[2])))
            except ValueError:
                continue
    return rows


class TestPreprocess:
    def test_full_chain(self, small_corpus, tmp_path, capsys):
        out_dir = tmp_path / "out"
        code = cli.main([
            "preprocess", "--manifest", str(small_corpus),
            "--out-dir", str(out_dir),
            "--stages", "DN,VAD-2,FLT,VN",
            "--enhanced-dir", str(small_corpus.parent / "enh"),
        ])
        assert code == cli.EXIT_OK
        stdout = capsys.readouterr().out

        produced = corpus.load_manifest(out_dir / "manifest.tsv")
        assert produced.source_tag == "DN+VAD-2+FLT+VN"
        assert len(produced) >= 1
        for record in produced:
            assert record.audio_path == f"{record.utterance_id}.wav"
            assert record.snr_db is not None
            assert record.cer is not None
            w = wavio.read_wav(out_dir / record.audio_path)
            assert record.duration_s == pytest.approx(w.duration_s)
            # VN ran last: peak sits at the normalization target
            assert np.abs(w.samples).max() == pytest.approx(0.95, abs=1e-3)

        rows = parse_stage_table(stdout)
        assert [label for label, _, _ in rows] == [
            "Raw", "DN", "DN+VAD-2", "DN+VAD-2+FLT", "DN+VAD-2+FLT+VN",
        ]
        hours = [h for _, h, _ in rows]
        assert all(hours[i] >= hours[i + 1] - 1e-9 for i in range(len(hours) - 1))
        assert (out_dir / "dropped.tsv").exists()
        assert (out_dir / "errors.tsv").exists()

    def test_failed_utterance_is_reported_and_skipped(self, tmp_path, capsys):
        root = tmp_path / "corpus"
        manifest = build_corpus(root, 3, seed=11, with_enhanced=False)
        wavio.write_wav(root / "raw" / "utt001.wav", dsp.Waveform(np.zeros(SR), SR))
        out_dir = tmp_path / "out"
        code = cli.main([
            "preprocess", "--manifest", str(manifest),
            "--out-dir", str(out_dir), "--stages", "VAD-1",
        ])
        assert code == cli.EXIT_OK
        capsys.readouterr()

        produced = corpus.load_manifest(out_dir / "manifest.tsv")
        assert produced.ids() == ["utt000", "utt002"]
        assert not (out_dir / "utt001.wav").exists()
        lines = (out_dir / "errors.tsv").read_text().splitlines()
        assert lines[0] == "id\tstage\terror"
        assert len(lines) == 2
        assert lines[1].startswith("utt001\tVAD-1\t")

    def test_dropped_report_points_at_input_audio(self, tmp_path, capsys):
        root = tmp_path / "corpus"
        manifest = build_corpus(root, 4, seed=7)
        out_dir = tmp_path / "out"
        code = cli.main([
            "preprocess", "--manifest", str(manifest),
            "--out-dir", str(out_dir),
            "--stages", "DN,FLT",
            "--enhanced-dir", str(root / "enh"),
            "--min-snr", "1000",  # force every record through the drop path
        ])
        assert code == cli.EXIT_OK
        capsys.readouterr()
        assert len(corpus.load_manifest(out_dir / "manifest.tsv")) == 0
        lines = (out_dir / "dropped.tsv").read_text().splitlines()
        assert lines[1].split("\t")[-1] == "reason"
        for line in lines[2:]:
            cells = line.split("\t")
            assert cells[1].startswith("../corpus/raw/")
            assert "low-snr" in cells[-1]
        # processed wavs for dropped records are cleaned up
        assert not list(out_dir.glob("utt*.wav"))

    def test_identity_enhancer_when_no_enhanced_dir(self, tmp_path, capsys):
        root = tmp_path / "corpus"
        manifest = build_corpus(root, 2, seed=5, with_enhanced=False)
        out_dir = tmp_path / "out"
        code = cli.main([
            "preprocess", "--manifest", str(manifest),
            "--out-dir", str(out_dir), "--stages", "DN",
        ])
        assert code == cli.EXIT_OK
        capsys.readouterr()
        produced = corpus.load_manifest(out_dir / "manifest.tsv")
        # zero residual against itself reads as infinite SNR
        assert all(r.snr_db == float("inf") for r in produced)


@pytest.fixture(scope="module")
def metric_run(tmp_path_factory):
    root = tmp_path_factory.mktemp("eval")
    ref_manifest = build_corpus(root, 4, seed=21)
    loaded = corpus.load_manifest(ref_manifest)
    hyp_records = tuple(
        corpus.with_updates(r, audio_path=f"enh/{r.utterance_id}.enhanced.wav")
        for r in loaded
    )
    hyp_manifest = root / "hyp.tsv"
    corpus.save_manifest(corpus.Manifest(hyp_records, "hyp"), hyp_manifest)
    out_dir = root / "report"
    code = cli.main([
        "metrics", "--ref-manifest", str(ref_manifest),
        "--hyp-manifest", str(hyp_manifest), "--out-dir", str(out_dir),
    ])
    return code, out_dir


class TestMetrics:
    def test_exit_ok(self, metric_run, capsys):
        code, _ = metric_run
        capsys.readouterr()
        assert code == cli.EXIT_OK

    def test_report_tsv_shape(self, metric_run, capsys):
        _, out_dir = metric_run
        capsys.readouterr()
        lines = (out_dir / "report.tsv").read_text().splitlines()
        header = lines[0].split("\t")
        assert header[0] == "id"
        for name in ("mcd", "msd", "gpe", "vde", "ffe", "cer"):
            assert name in header
        # one row per utterance plus the trailing means row
        assert len(lines) == 6
        assert lines[-1].startswith("mean\t")

    def test_report_json_matches_tsv_ids(self, metric_run, capsys):
        _, out_dir = metric_run
        capsys.readouterr()
        payload = json.loads((out_dir / "report.json").read_text())
        rows = payload["utterances"]
        assert [row["id"] for row in rows] == ["utt000", "utt001", "utt002", "utt003"]
        for row in rows:
            assert row["mcd"] > 0
            assert 0 <= row["vde"] <= 1
        assert payload["mean"]["mcd"] == pytest.approx(
            sum(row["mcd"] for row in rows) / len(rows)
        )

    def test_no_errors_on_clean_corpus(self, metric_run, capsys):
        _, out_dir = metric_run
        capsys.readouterr()
        assert (out_dir / "errors.tsv").read_text() == "id\tstage\terror\n"

    def test_id_mismatch_is_usage_error(self, tmp_path, capsys):
        root = tmp_path / "corpus"
        ref_manifest = build_corpus(root, 3, seed=9)
        loaded = corpus.load_manifest(ref_manifest)
        hyp_manifest = root / "hyp.tsv"
        corpus.save_manifest(corpus.Manifest(loaded.records[:2], "hyp"), hyp_manifest)
        code = cli.main([
            "metrics", "--ref-manifest", str(ref_manifest),
            "--hyp-manifest", str(hyp_manifest), "--out-dir", str(tmp_path / "r"),
        ])
        assert code == cli.EXIT_USAGE
        assert "utt002" in capsys.readouterr().err

    def test_summary_lines(self, tmp_path, capsys):
        root = tmp_path / "corpus"
        ref_manifest = build_corpus(root, 2, seed=31)
        loaded = corpus.load_manifest(ref_manifest)
        hyp_records = tuple(
            corpus.with_updates(r, audio_path=f"enh/{r.utterance_id}.enhanced.wav")
            for r in loaded
        )
        hyp_manifest = root / "hyp.tsv"
        corpus.save_manifest(corpus.Manifest(hyp_records, "hyp"), hyp_manifest)
        code = cli.main([
            "metrics", "--ref-manifest", str(ref_manifest),
            "--hyp-manifest", str(hyp_manifest),
            "--out-dir", str(root / "report"), "--which", "mcd,cer",
        ])
        assert code == cli.EXIT_OK
        out = capsys.readouterr().out
        assert "MCD: " in out
        assert "MSD" not in out
        assert "CER (S/D/I): " in out


class TestVad:
    def test_trims_silence(self, tmp_path, capsys):
        root = tmp_path / "corpus"
        (root / "raw").mkdir(parents=True)
        records = []
        for k, freq in enumerate((220.0, 330.0)):
            padded = np.concatenate([
                np.zeros(SR // 2), sine(freq, 1.0, amp=0.3), np.zeros(SR // 2)
            ])
            utterance_id = f"utt{k:03d}"
            wavio.write_wav(root / "raw" / f"{utterance_id}.wav", dsp.Waveform(padded, SR))
            records.append(corpus.UtteranceRecord(
                utterance_id, f"raw/{utterance_id}.wav", len(padded) / SR
            ))
        manifest = root / "manifest.tsv"
        corpus.save_manifest(corpus.Manifest(tuple(records)), manifest)

        out_dir = tmp_path / "trimmed"
        code = cli.main([
            "vad", "--manifest", str(manifest),
            "--out-dir", str(out_dir), "--aggressiveness", "2",
        ])
        assert code == cli.EXIT_OK
        capsys.readouterr()
        produced = corpus.load_manifest(out_dir / "manifest.tsv")
        assert produced.source_tag == "VAD-2"
        assert produced.ids() == ["utt000", "utt001"]
        # the half-second pads are gone, up to frame rounding at the edges
        for record in produced:
            assert 0.9 <= record.duration_s <= 1.1


class TestSnr:
    def test_fills_snr_column(self, small_corpus, tmp_path, capsys):
        out = tmp_path / "scored" / "manifest.tsv"
        code = cli.main([
            "snr", "--manifest", str(small_corpus),
            "--enhanced-dir", str(small_corpus.parent / "enh"),
            "--out", str(out),
        ])
        assert code == cli.EXIT_OK
        capsys.readouterr()
        produced = corpus.load_manifest(out)
        assert len(produced) == 6
        for record in produced:
            assert record.snr_db is not None and record.snr_db > 0
            assert record.audio_path.startswith("../")
            assert corpus.resolve_audio_path(record, out).exists()


class TestVocode:
    def test_requires_exactly_one_source(self, small_corpus, tmp_path, capsys):
        code = cli.main(["vocode", "--out-dir", str(tmp_path / "v")])
        assert code == cli.EXIT_USAGE
        code = cli.main([
            "vocode", "--manifest", str(small_corpus),
            "--spec-dir", str(tmp_path), "--out-dir", str(tmp_path / "v"),
        ])
        assert code == cli.EXIT_USAGE
        capsys.readouterr()

    def test_round_trip_from_manifest(self, tmp_path, capsys):
        root = tmp_path / "corpus"
        manifest = build_corpus(root, 2, seed=13)
        out_dir = tmp_path / "rebuilt"
        code = cli.main([
            "vocode", "--manifest", str(manifest), "--out-dir", str(out_dir),
        ])
        assert code == cli.EXIT_OK
        out = capsys.readouterr().out
        assert "mean spectral convergence: " in out
        lines = (out_dir / "roundtrip.tsv").read_text().splitlines()
        assert lines[0] == "id\tspectral_convergence"
        assert len(lines) == 3
        for line in lines[1:]:
            name, gap = line.split("\t")
            assert float(gap) < 0.5
            assert (out_dir / f"{name}.wav").exists()

    def test_reconstruct_from_spectrograms(self, tmp_path, capsys):
        spec_dir = tmp_path / "specs"
        spec_dir.mkdir()
        cfg = dsp.StftConfig()
        w = dsp.Waveform(sine(440.0, 1.0), SR)
        np.save(spec_dir / "tone.npy", dsp.stft(w, cfg).frames)
        out_dir = tmp_path / "rebuilt"
        code = cli.main([
            "vocode", "--spec-dir", str(spec_dir), "--out-dir", str(out_dir),
        ])
        assert code == cli.EXIT_OK
        capsys.readouterr()
        rebuilt = wavio.read_wav(out_dir / "tone.wav")
        assert rebuilt.sample_rate == SR
        lines = (out_dir / "roundtrip.tsv").read_text().splitlines()
        assert lines[1].split("\t")[0] == "tone"
        assert float(lines[1].split("\t")[1]) < 0.1


class TestFilterCommand:
    def test_splits_and_reports(self, tmp_path, capsys):
        records = (
            corpus.UtteranceRecord("keepme", "a.wav", 3600.0, snr_db=20.0, cer=0.01),
            corpus.UtteranceRecord("lowsnr", "b.wav", 3600.0, snr_db=10.0, cer=0.01),
            corpus.UtteranceRecord("nocer", "c.wav", 3600.0, snr_db=20.0),
        )
        manifest = tmp_path / "m.tsv"
        corpus.save_manifest(corpus.Manifest(records), manifest)
        out_dir = tmp_path / "split"
        code = cli.main([
            "filter", "--manifest", str(manifest), "--out-dir", str(out_dir),
        ])
        assert code == cli.EXIT_OK
        out = capsys.readouterr().out
        assert "kept 1 utterances (1.00 h)" in out
        assert "dropped 2 utterances (2.00 h)" in out
        kept = corpus.load_manifest(out_dir / "kept.tsv")
        assert kept.ids() == ["keepme"]
        dropped_lines = (out_dir / "dropped.tsv").read_text().splitlines()
        reasons = {l.split("\t")[0]: l.split("\t")[-1] for l in dropped_lines[2:]}
        assert reasons == {"lowsnr": "low-snr", "nocer": "missing-field"}

    def test_cer_only_mode(self, tmp_path, capsys):
        records = (
            corpus.UtteranceRecord("a", "a.wav", 1.0, cer=0.01),
            corpus.UtteranceRecord("b", "b.wav", 1.0, cer=0.5),
        )
        manifest = tmp_path / "m.tsv"
        corpus.save_manifest(corpus.Manifest(records), manifest)
        out_dir = tmp_path / "split"
        code = cli.main([
            "filter", "--manifest", str(manifest),
            "--out-dir", str(out_dir), "--flt", "cer",
        ])
        assert code == cli.EXIT_OK
        capsys.readouterr()
        assert corpus.load_manifest(out_dir / "kept.tsv").ids() == ["a"]


class TestReport:
    def test_prints_summary(self, tmp_path, capsys):
        records = (
            corpus.UtteranceRecord("a", "a.wav", 1800.0, speaker="alice", snr_db=12.0, cer=0.03),
            corpus.UtteranceRecord("b", "b.wav", 1800.0, speaker="alice", snr_db=float("inf")),
        )
        manifest = tmp_path / "m.tsv"
        corpus.save_manifest(corpus.Manifest(records, "DN"), manifest)
        json_path = tmp_path / "summary.json"
        code = cli.main([
            "report", "--manifest", str(manifest), "--json", str(json_path),
        ])
        assert code == cli.EXIT_OK
        out = capsys.readouterr().out
        assert "source: DN" in out
        assert "utterances: 2" in out
        assert "hours: 1.00" in out
        assert "speaker alice: 2" in out
        assert "inf: 1" in out

        payload = json.loads(json_path.read_text())
        assert payload["utterances"] == 2
        assert payload["hours"] == pytest.approx(1.0)
        assert payload["per_speaker"] == {"alice": 2}
        assert payload["snr_db"]["pos_inf"] == 1
        assert payload["cer"]["absent"] == 1
