"""Smoke test for the pyqtrain extension module.

Build and run:

    cargo build -p qtrain-py --features extension-module --release
    cp target/release/libpyqtrain.so python/pyqtrain.so
    python3 python/smoke_test.py
"""

import json
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pyqtrain as q


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol


def main():
    p = q.ProtocolParams(7, 1.0)
    assert (p.k_sites, p.range) == (128, 128.0)
    assert close(p.scale_m, 12.8)

    d = q.outcome_distribution(5.0, q.ProtocolParams(4))
    assert len(d) == 16 and d.mode() == 5
    assert close(d.probs[5], 1.0, 1e-12)

    two = q.outcome_distribution(1.5, q.ProtocolParams(1)).probs
    assert close(two[0], 0.5, 1e-12) and close(two[1], 0.5, 1e-12)

    amps = q.final_state(3.3, p)
    assert close(sum(abs(a) ** 2 for a in amps), 1.0, 1e-12)

    d = q.outcome_distribution(9.37, p)
    v = q.vm_outcome_distribution(9.37, p)
    assert max(abs(a - b) for a, b in zip(d.probs, v.probs)) < 1e-10
    for delta, prob in zip(d.deltas, d.probs):
        assert close(prob, q.closed_form_error_prob(delta, p))
        assert close(prob, q.product_form_error_prob(delta, p))
    assert close(sum(d.probs), 1.0)

    draws = q.sample_outcomes(d, 1000, 11)
    assert draws == q.sample_outcomes(d, 1000, 11)
    assert all(0 <= m < 128 for m in draws)

    delta, mean_abs = q.asymptotic_quantum_uncertainty(p)
    assert close(delta, math.sqrt(128 / 2) / math.pi)
    assert mean_abs > 0

    assert q.ripple_count(5, 3) == [True, False, True]
    assert q.ripple_count(8, 3) == [False, False, False]

    strings = q.special_strings(4)
    assert strings[1] == "0000000011111111"
    assert q.decode_bits(4, strings[2]) == 3
    try:
        q.decode_bits(3, "10000000")
    except ValueError:
        pass
    else:
        raise AssertionError("non-member string decoded")

    assert close(q.integrate_field_spec("constant:0.1:0:128"), 12.8, 1e-12)

    report = json.loads(q.compare(307.2, q.ProtocolParams(10), 5000, 3))
    assert report["quantum"]["empirical"]["mean_abs"] < report["counter"]["empirical"]["mean_abs"]

    try:
        q.ProtocolParams(3, -1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative alpha accepted")

    print("pyqtrain smoke test ok")


if __name__ == "__main__":
    main()
