import numpy as np
import pytest

from triequiv.fileio import (
    StateFormatError,
    load_state,
    matrix_from_pairs,
    matrix_pairs,
    parse_matrix,
    parse_state,
    report_from_json,
    report_to_json,
    serialize_matrix,
    serialize_state,
)
from triequiv.states import TripartiteState, random_state, random_unitary
from util import RT2, golden_pair_222


class TestStateRoundTrip:
    @pytest.mark.parametrize("dims", [(2, 2, 2), (2, 3, 4), (3, 3, 3)])
    def test_exact_round_trip(self, dims):
        state = random_state(dims, seed=sum(dims))
        parsed = parse_state(serialize_state(state))
        assert np.array_equal(parsed.amplitudes, state.amplitudes)

    def test_zero_entries_omitted_and_restored(self):
        state, _ = golden_pair_222()
        text = serialize_state(state, label="sparse")
        assert len([l for l in text.splitlines() if l and not l.startswith(("label", "dims"))]) == 2
        parsed = parse_state(text)
        assert np.array_equal(parsed.amplitudes, state.amplitudes)

    def test_label_preserved_in_text(self):
        state, _ = golden_pair_222()
        assert "label: golden" in serialize_state(state, label="golden")

    def test_load_state(self, tmp_path):
        state = random_state((2, 2, 3), seed=5)
        path = tmp_path / "s.state"
        path.write_text(serialize_state(state))
        assert np.array_equal(load_state(path).amplitudes, state.amplitudes)


class TestStateParsing:
    def test_golden_document(self):
        text = "\n".join(
            [
                "# two amplitudes",
                "dims: 2 2 2",
                "1 1 2  0.70710678118654746 0",
                "2 1 1  0.70710678118654746 0",
            ]
        )
        parsed = parse_state(text)
        assert abs(parsed.amplitudes[0, 0, 1] - 1 / RT2) < 1e-15
        assert abs(parsed.amplitudes[1, 0, 0] - 1 / RT2) < 1e-15

    def test_missing_dims(self):
        with pytest.raises(StateFormatError, match="missing dims"):
            parse_state("# nothing but a comment\n")

    def test_record_before_dims(self):
        with pytest.raises(StateFormatError, match="before the dims"):
            parse_state("1 1 1 1 0\ndims: 2 2 2\n")

    def test_bad_field_count(self):
        with pytest.raises(StateFormatError, match="fields"):
            parse_state("dims: 2 2 2\n1 1 1 0.5\n")

    def test_out_of_range_index_names_record(self):
        with pytest.raises(StateFormatError, match=r"\(3, 1, 1\)"):
            parse_state("dims: 2 2 2\n3 1 1 1 0\n")

    def test_duplicate_index(self):
        with pytest.raises(StateFormatError, match="duplicate"):
            parse_state("dims: 2 2 2\n1 1 1 0.5 0\n1 1 1 0.5 0\n")

    def test_zero_state(self):
        with pytest.raises(StateFormatError, match="zero state"):
            parse_state("dims: 2 2 2\n")

    def test_strict_rejects_off_norm(self):
        with pytest.raises(StateFormatError, match="strict"):
            parse_state("dims: 2 2 2\n1 1 1 0.5 0\n", strict=True)

    def test_lenient_normalizes_with_warning(self):
        with pytest.warns(RuntimeWarning, match="renormalizing"):
            parsed = parse_state("dims: 2 2 2\n1 1 1 0.5 0\n")
        assert abs(np.linalg.norm(parsed.amplitudes) - 1.0) < 1e-15

    def test_error_carries_source_and_line(self):
        with pytest.raises(StateFormatError, match=r"input\.state:2"):
            parse_state("dims: 2 2 2\n1 1 nope 1 0\n", source="input.state")


class TestMatrixFiles:
    def test_round_trip(self):
        mat = random_unitary(4, seed=3)
        parsed = parse_matrix(serialize_matrix(mat, label="u"))
        assert np.array_equal(parsed, mat)

    def test_rectangular(self):
        mat = np.arange(6, dtype=complex).reshape(2, 3)
        assert np.array_equal(parse_matrix(serialize_matrix(mat)), mat)

    def test_serialize_rejects_vector(self):
        with pytest.raises(ValueError):
            serialize_matrix(np.zeros(4))


class TestSeventeenDigits:
    def test_awkward_floats_round_trip(self):
        values = [0.1, 1 / 3, np.pi, 1e-300, 2**-52, 1 + 2**-52]
        amps = np.zeros((2, 2, 2), dtype=complex)
        amps[0, 0, 0] = values[0] + 1j * values[1]
        amps[0, 1, 1] = values[2]
        amps[1, 0, 1] = values[3] + 1j * values[4]
        amps[1, 1, 0] = values[5]
        amps /= np.linalg.norm(amps)
        state = parse_state(serialize_state(TripartiteState(amps)))
        assert np.array_equal(state.amplitudes, amps)


class TestReports:
    def test_json_round_trip(self):
        report = {
            "schema": "triequiv.decision/1",
            "verdict": "equivalent-d1",
            "residual": 1.25e-12,
            "power_sums": {"first": {"A": [1.0, 0.5]}},
        }
        assert report_from_json(report_to_json(report)) == report

    def test_missing_schema_rejected(self):
        with pytest.raises(StateFormatError, match="schema"):
            report_from_json("{}")

    def test_matrix_pairs_round_trip(self):
        mat = random_unitary(3, seed=9)
        assert np.array_equal(matrix_from_pairs(matrix_pairs(mat)), mat)
