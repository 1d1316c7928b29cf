import json

import numpy as np
import pytest

from qmrand import jsonio
from qmrand.decompositions import sqrt_decomposition_qudit
from qmrand.linalg import ValidationError
from qmrand.povm import NoiseModel, PureState, noisy_projective, unbiased_state

from conftest import random_state_vector


class TestMatrixRoundtrip:
    def test_roundtrip(self, rng):
        M = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        data = jsonio.matrix_to_json(M)
        back = jsonio.matrix_from_json(json.loads(json.dumps(data)))
        assert np.allclose(back, M)

    def test_malformed(self):
        with pytest.raises(ValidationError):
            jsonio.matrix_from_json({"dim": 2, "entries": [[1, 2]]})


class TestPovmRoundtrip:
    def test_roundtrip(self):
        pv = noisy_projective(3, 0.27)
        back = jsonio.povm_from_json(json.loads(json.dumps(jsonio.povm_to_json(pv))))
        for a, b in zip(back.elements, pv.elements):
            assert np.max(np.abs(a - b)) < 1e-12

    def test_rejects_invalid_povm(self):
        data = {"dim": 2, "elements": [jsonio.matrix_to_json(np.eye(2))]}
        with pytest.raises(ValidationError):
            jsonio.povm_from_json(data)


class TestStateRoundtrip:
    def test_roundtrip(self, rng):
        st = PureState(random_state_vector(rng, 4))
        back = jsonio.state_from_json(json.loads(json.dumps(jsonio.state_to_json(st))))
        assert np.allclose(back.amplitudes, st.amplitudes)

    def test_dim_mismatch(self):
        data = {"dim": 3, "amplitudes": [[1.0, 0.0], [0.0, 0.0]]}
        with pytest.raises(ValidationError):
            jsonio.state_from_json(data)


class TestDecompositionRoundtrip:
    def test_roundtrip(self):
        noise = NoiseModel(3, 0.2)
        dec = sqrt_decomposition_qudit(noise, unbiased_state(3))
        data = json.loads(json.dumps(jsonio.decomposition_to_json(dec)))
        back = jsonio.decomposition_from_json(data)
        assert np.max(np.abs(back.K - dec.K)) < 1e-12
        assert data["outcomes"] == 3 and data["subpovms"] == 3 and data["dim"] == 3


def test_round_floats_significant_digits():
    out = jsonio.round_floats({"x": 0.12345678901234567, "y": [1e-300, 2]})
    assert out["x"] == 0.123456789012
    assert out["y"][1] == 2


def test_dumps_parses_back():
    text = jsonio.dumps({"a": np.float64(1.5), "b": np.int64(3)})
    assert json.loads(text) == {"a": 1.5, "b": 3}
