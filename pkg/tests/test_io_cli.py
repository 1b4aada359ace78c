import json
import math
import struct

import numpy as np
import pytest

from monoalign import matio
from monoalign.cli import cli_dispatch
from monoalign.errors import (
    FortranOrderUnsupported,
    ParseError,
    UnsupportedDtype,
)


class TestNpy:
    def test_handwritten_header_reads(self, tmp_path):
        header = "{'descr': '<f4', 'fortran_order': False, 'shape': (2, 3), }"
        payload = struct.pack("<6f", 1, 2, 3, 4, 5, 6)
        raw = b"\x93NUMPY\x01\x00" + struct.pack("<H", len(header))
        raw += header.encode() + payload
        p = tmp_path / "a.npy"
        p.write_bytes(raw)
        m = matio.read_matrix(p)
        assert m.dtype == np.float32
        np.testing.assert_array_equal(m, [[1, 2, 3], [4, 5, 6]])

    @pytest.mark.parametrize("dtype", [np.float32, np.float64])
    def test_round_trip_bit_exact(self, tmp_path, dtype):
        rng = np.random.default_rng(0)
        for i in range(20):
            m = rng.standard_normal(
                (int(rng.integers(1, 6)), int(rng.integers(1, 6)))
            ).astype(dtype)
            p = tmp_path / f"m{i}.npy"
            matio.write_matrix(m, p, "npy")
            back = matio.read_matrix(p)
            assert back.dtype == m.dtype
            assert back.tobytes() == m.tobytes()

    def test_numpy_interop(self, tmp_path):
        # files we write are loadable by numpy and vice versa
        m = np.arange(6, dtype=np.float64).reshape(2, 3)
        ours = tmp_path / "ours.npy"
        theirs = tmp_path / "theirs.npy"
        matio.write_matrix(m, ours, "npy")
        np.testing.assert_array_equal(np.load(ours), m)
        np.save(theirs, m)
        np.testing.assert_array_equal(matio.read_matrix(theirs), m)

    def test_fortran_order_rejected(self, tmp_path):
        p = tmp_path / "f.npy"
        np.save(p, np.asfortranarray(np.ones((2, 3))))
        with pytest.raises(FortranOrderUnsupported):
            matio.read_matrix(p)

    def test_unsupported_dtype(self, tmp_path):
        p = tmp_path / "i.npy"
        np.save(p, np.ones((2, 2), dtype=np.int32))
        with pytest.raises(UnsupportedDtype):
            matio.read_matrix(p)

    def test_truncated_payload(self, tmp_path):
        p = tmp_path / "t.npy"
        matio.write_matrix(np.ones((2, 2)), p, "npy")
        p.write_bytes(p.read_bytes()[:-8])
        with pytest.raises(ParseError):
            matio.read_matrix(p)


class TestTsv:
    def test_parse(self, tmp_path):
        p = tmp_path / "a.tsv"
        p.write_text("1.0\t2.0\n3.0\t4.0\n")
        np.testing.assert_array_equal(matio.read_matrix(p), [[1, 2], [3, 4]])

    def test_round_trip_full_precision(self, tmp_path):
        rng = np.random.default_rng(1)
        m = rng.standard_normal((3, 4))
        p = tmp_path / "b.tsv"
        matio.write_matrix(m, p, "tsv")
        np.testing.assert_array_equal(matio.read_matrix(p), m)

    def test_single_value(self, tmp_path):
        p = tmp_path / "c.tsv"
        matio.write_matrix(np.array([[0.5]]), p, "tsv")
        assert p.read_text() == "0.5\n"

    def test_ragged_rejected(self, tmp_path):
        p = tmp_path / "d.tsv"
        p.write_text("1.0\t2.0\n3.0\n")
        with pytest.raises(ParseError):
            matio.read_matrix(p)

    def test_empty_matrix_rejected(self, tmp_path):
        with pytest.raises(ParseError):
            matio.write_matrix(np.zeros((0, 2)), tmp_path / "e.tsv", "tsv")


class TestHeatmap:
    def test_identity(self, tmp_path):
        p = tmp_path / "i.pgm"
        matio.heatmap(np.eye(2), p)
        assert p.read_bytes() == b"P5\n2 2\n255\n" + bytes([255, 0, 0, 255])

    def test_constant_is_midgray(self, tmp_path):
        p = tmp_path / "c.pgm"
        matio.heatmap(np.full((3, 2), 7.0), p)
        assert p.read_bytes() == b"P5\n2 3\n255\n" + bytes([128] * 6)

    def test_dimensions(self, tmp_path):
        p = tmp_path / "d.pgm"
        matio.heatmap(np.random.default_rng(2).random((5, 3)), p)
        assert p.read_bytes().startswith(b"P5\n3 5\n255\n")


class TestCli:
    def run(self, capsys, *argv):
        code = cli_dispatch(list(argv))
        out = capsys.readouterr()
        return code, out.out, out.err

    def test_loss_bin_weight_zero(self, tmp_path, capsys):
        soft = np.full((3, 2), 0.5)
        p = tmp_path / "soft.npy"
        matio.write_matrix(soft, p, "npy")
        code, out, _ = self.run(
            capsys, "loss", "--soft", str(p), "--bin-weight", "0"
        )
        assert code == 0
        result = json.loads(out)
        assert result["total"] == result["forward_sum"]
        assert result["forward_sum"] == pytest.approx(math.log(4), abs=1e-9)

    def test_prior_subcommand(self, tmp_path, capsys):
        out_path = tmp_path / "p.npy"
        code, _, _ = self.run(
            capsys, "prior", "--tokens", "4", "--frames", "1",
            "--omega", "1", "-o", str(out_path),
        )
        assert code == 0
        np.testing.assert_array_equal(
            matio.read_matrix(out_path), [[0.25] * 4]
        )

    def test_viterbi_shape_error_exit_2(self, tmp_path, capsys):
        p = tmp_path / "bad.npy"
        matio.write_matrix(np.zeros((2, 3)), p, "npy")
        code, _, err = self.run(capsys, "viterbi", "--logprobs", str(p))
        assert code == 2
        assert "no valid monotonic alignment" in err

    def test_numeric_error_exit_3(self, tmp_path, capsys):
        lp = np.zeros((3, 2))
        lp[0, 0] = -np.inf
        p = tmp_path / "blocked.npy"
        matio.write_matrix(lp, p, "npy")
        code, _, _ = self.run(capsys, "viterbi", "--logprobs", str(p))
        assert code == 3

    def test_usage_error_exit_1(self, capsys):
        code, _, _ = self.run(capsys, "nonsense")
        assert code == 1
        code, _, _ = self.run(capsys, "prior", "--tokens", "4")
        assert code == 1

    def test_grad_writes_matrix(self, tmp_path, capsys):
        lp = np.log(np.full((3, 2), 0.5))
        p = tmp_path / "lp.npy"
        out = tmp_path / "grad.npy"
        matio.write_matrix(lp, p, "npy")
        code, stdout, _ = self.run(
            capsys, "grad", "--logprobs", str(p), "-o", str(out)
        )
        assert code == 0
        assert json.loads(stdout)["forward_sum"] == pytest.approx(
            math.log(4), abs=1e-9
        )
        np.testing.assert_allclose(
            matio.read_matrix(out), [[-1, 0], [-0.5, -0.5], [0, -1]],
            atol=1e-12,
        )

    def test_viterbi_and_durations(self, tmp_path, capsys):
        lp = np.array([[-0.1, -3.0], [-0.2, -1.6], [-2.3, -0.1]])
        p = tmp_path / "lp.npy"
        matio.write_matrix(lp, p, "npy")
        code, out, _ = self.run(capsys, "viterbi", "--logprobs", str(p))
        assert code == 0
        result = json.loads(out)
        assert result["path"] == [0, 0, 1]
        assert result["score"] == pytest.approx(-0.4)

        code, out, _ = self.run(
            capsys, "durations", "--attn", str(p), "--method", "argmax"
        )
        # log-prob file doubles as an attention matrix for the argmax rule
        assert code == 0
        assert sum(json.loads(out)["durations"]) == 3

    def test_durations_from_path_file(self, tmp_path, capsys):
        p = tmp_path / "path.npy"
        matio.write_matrix(np.array([0.0, 0.0, 1.0, 1.0]), p, "npy")
        code, out, _ = self.run(
            capsys, "durations", "--path", str(p), "--tokens", "2"
        )
        assert code == 0
        assert json.loads(out)["durations"] == [2, 2]

    def test_binarize_reports_coverage(self, tmp_path, capsys):
        attn = np.array([[0.9, 0.1], [0.6, 0.4], [0.3, 0.7], [0.2, 0.8]])
        p = tmp_path / "attn.npy"
        matio.write_matrix(attn, p, "npy")
        code, out, _ = self.run(capsys, "binarize", "--attn", str(p))
        assert code == 0
        result = json.loads(out)
        assert result["path"] == [0, 0, 1, 1]
        assert result["incomplete_coverage"] is False

    def test_posterior_subcommand(self, tmp_path, capsys):
        lp = np.full((2, 2), math.log(0.5))
        p = tmp_path / "lp.npy"
        out = tmp_path / "post.npy"
        matio.write_matrix(lp, p, "npy")
        code, _, _ = self.run(
            capsys, "posterior", "--logprobs", str(p), "--omega", "1",
            "-o", str(out),
        )
        assert code == 0
        np.testing.assert_allclose(
            np.exp(matio.read_matrix(out)),
            [[2 / 3, 1 / 3], [1 / 3, 2 / 3]],
            atol=1e-12,
        )

    def test_mcd_and_durdist(self, tmp_path, capsys):
        ref = tmp_path / "ref.npy"
        hyp = tmp_path / "hyp.npy"
        matio.write_matrix(np.array([[1.0, 0.0]]), ref, "npy")
        matio.write_matrix(np.array([[0.0, 0.0]]), hyp, "npy")
        code, out, _ = self.run(
            capsys, "mcd", "--ref", str(ref), "--hyp", str(hyp)
        )
        assert code == 0
        assert json.loads(out)["mcd"] == pytest.approx(
            (10 / math.log(10)) * math.sqrt(2), abs=1e-9
        )

        pred = tmp_path / "pred.tsv"
        truth = tmp_path / "truth.tsv"
        matio.write_matrix(np.array([[2.0, 2.0]]), pred, "tsv")
        matio.write_matrix(np.array([[1.0, 3.0]]), truth, "tsv")
        code, out, _ = self.run(
            capsys, "durdist", "--pred", str(pred), "--truth", str(truth)
        )
        assert code == 0
        assert json.loads(out)["duration_l1"] == 1.0

    def test_heatmap_subcommand(self, tmp_path, capsys):
        src = tmp_path / "m.npy"
        dst = tmp_path / "m.pgm"
        matio.write_matrix(np.eye(2), src, "npy")
        code, _, _ = self.run(
            capsys, "heatmap", "--input", str(src), "-o", str(dst)
        )
        assert code == 0
        assert dst.read_bytes() == b"P5\n2 2\n255\n" + bytes([255, 0, 0, 255])

    def test_missing_file_exit_2(self, capsys, tmp_path):
        code, _, _ = self.run(
            capsys, "viterbi", "--logprobs", str(tmp_path / "absent.npy")
        )
        assert code == 2

    def test_batch_list(self, tmp_path, capsys):
        paths = []
        rng = np.random.default_rng(3)
        for i in range(3):
            lp = np.log(
                rng.dirichlet(np.ones(2), size=4)
            )
            p = tmp_path / f"lp{i}.npy"
            matio.write_matrix(lp, p, "npy")
            paths.append(str(p))
        manifest = tmp_path / "list.txt"
        manifest.write_text("\n".join(paths) + "\n")
        code, out, _ = self.run(
            capsys, "viterbi", "--list", str(manifest)
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert len(lines) == 3
        for line in lines:
            assert "path" in json.loads(line)

    def test_no_partial_output_on_failure(self, tmp_path, capsys):
        bad = tmp_path / "bad.npy"
        matio.write_matrix(np.zeros((2, 3)), bad, "npy")  # T < N
        out = tmp_path / "grad.npy"
        code, _, _ = self.run(
            capsys, "grad", "--logprobs", str(bad), "-o", str(out)
        )
        assert code == 2
        assert not out.exists()
        leftovers = [f for f in tmp_path.iterdir() if f.name.startswith(".tmp")]
        assert leftovers == []
