import json
import math

import numpy as np
import pytest

from nclp import serialize
from nclp.cpmaps import KrausMap, apply, build_counterexample_maps
from nclp.errors import InvalidInputError
from nclp.vecnorm import Side, VecElem, alpha_certify, beta_certify
from nclp.yeadon import YeadonSpec

from conftest import random_complex


class TestMatrixPayload:
    def test_round_trip(self, rng):
        m = random_complex(rng, 2, 3)
        back = serialize.matrix_from_json(serialize.matrix_to_json(m))
        assert np.array_equal(back, m)

    def test_text_round_trip_preserves_bits(self, rng):
        m = random_complex(rng, 3, 3)
        text = serialize.dumps_canonical(serialize.matrix_to_json(m))
        back = serialize.matrix_from_json(json.loads(text))
        assert np.array_equal(back, m)  # 17 significant digits are lossless

    def test_length_mismatch_rejected(self):
        bad = {"rows": 2, "cols": 2, "re": [1.0, 2.0, 3.0], "im": [0.0] * 4}
        with pytest.raises(InvalidInputError):
            serialize.matrix_from_json(bad)

    def test_missing_field_rejected(self):
        with pytest.raises(InvalidInputError):
            serialize.matrix_from_json({"rows": 1, "cols": 1, "re": [1.0]})

    def test_nonfinite_rejected(self):
        bad = {"rows": 1, "cols": 1, "re": [math.inf], "im": [0.0]}
        with pytest.raises(InvalidInputError):
            serialize.matrix_from_json(bad)


class TestVecElemPayload:
    def test_round_trip(self, rng):
        y = VecElem(random_complex(rng, 3, 2, 2))
        back = serialize.vecelem_from_json(serialize.vecelem_to_json(y))
        assert np.array_equal(back.coords, y.coords)

    def test_coordinate_count_checked(self, rng):
        doc = serialize.vecelem_to_json(VecElem(random_complex(rng, 3, 2, 2)))
        doc["n"] = 2
        with pytest.raises(InvalidInputError):
            serialize.vecelem_from_json(doc)

    def test_coordinate_shape_checked(self, rng):
        doc = serialize.vecelem_to_json(VecElem(random_complex(rng, 2, 2, 2)))
        doc["k"] = 3
        with pytest.raises(InvalidInputError):
            serialize.vecelem_from_json(doc)


class TestKrausPayload:
    def test_round_trip(self, rng):
        m = KrausMap.from_terms([(random_complex(rng, 2, 2),
                                  random_complex(rng, 2, 2))
                                 for _ in range(3)])
        back = serialize.kraus_from_json(serialize.kraus_to_json(m))
        x = random_complex(rng, 2, 2)
        assert np.allclose(apply(back, x), apply(m, x))

    def test_size_consistency(self):
        *_, u = build_counterexample_maps(3, 3.0)
        doc = serialize.kraus_to_json(u)
        doc["k"] = 5
        with pytest.raises(InvalidInputError):
            serialize.kraus_from_json(doc)


class TestYeadonPayload:
    def test_round_trip(self, rng):
        q, _ = np.linalg.qr(random_complex(rng, 4, 4))
        spec = YeadonSpec(n=2, rep_weights=(0.8,), antirep_weights=(0.3,), w=q)
        doc = serialize.yeadon_to_json(spec, 3.0)
        back, p = serialize.yeadon_from_json(doc)
        assert p == 3.0
        assert back.rep_weights == spec.rep_weights
        assert back.antirep_weights == spec.antirep_weights
        assert np.array_equal(back.w, q)

    def test_missing_p_rejected(self):
        with pytest.raises(InvalidInputError):
            serialize.yeadon_from_json({"n": 2, "rep_weights": [1.0]})


class TestCertificatePayload:
    def test_alpha_certificate_fields(self, rng):
        y = VecElem(random_complex(rng, 2, 2, 2))
        cert = alpha_certify(y, 3.0, Side.ELL_ROW)
        doc = serialize.certificate_to_json(cert)
        assert set(doc) >= {"upper", "lower", "converged", "iterations",
                            "factor_witness", "dual_witness"}
        assert doc["factor_witness"]["kind"] == "one_sided"
        text = serialize.dumps_canonical(doc)
        json.loads(text)  # stays valid JSON

    def test_beta_certificate_split_witness(self, rng):
        y = VecElem(random_complex(rng, 2, 2, 2))
        cert = beta_certify(y, 3.0)
        doc = serialize.certificate_to_json(cert)
        assert doc["factor_witness"]["kind"] == "split"


class TestCanonicalDumps:
    def test_float_formatting(self):
        assert serialize.dumps_canonical(0.1) == "0.10000000000000001"
        assert serialize.dumps_canonical(1.0) == "1"
        assert serialize.dumps_canonical([True, None, 3]) == "[true,null,3]"

    def test_deterministic(self, rng):
        doc = {"a": [1.5, 2.25], "b": {"c": 0.3333333333333333}}
        assert serialize.dumps_canonical(doc) == serialize.dumps_canonical(doc)

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidInputError):
            serialize.dumps_canonical(float("nan"))
