"""Smoke test for the prfauth Python module.

Run after building the extension (e.g. `maturin develop -m crates/py/Cargo.toml`):

    python python/smoke_test.py
"""

import math

import prfauth


def main():
    radio = prfauth.RadioModel.galileo_e6c()
    channel = prfauth.ChannelModel.from_radio(radio)
    assert radio.chips == 5115
    assert abs(radio.noise_ratio() - 5115.0) < 1e-9

    assert abs(prfauth.pfa(radio, channel, prfauth.DetectorConfig(100)) + 40.3) < 0.1

    r = prfauth.pmd_exact(radio, channel, prfauth.DetectorConfig(342))
    assert r.method == "exact" and r.log2 <= -128.0, r
    clt = prfauth.pmd_clt(radio, channel, prfauth.DetectorConfig(341))
    assert abs(clt.log2 + 128.0) < 1.0, clt

    w = prfauth.min_w_for_security(radio, channel, 32.0)
    assert abs(w - 77) <= 2, w

    snr = prfauth.breaking_adversary_snr(0.5)
    assert abs(snr + 3.42) < 0.01
    assert abs(prfauth.chip_success_probability(10 ** (snr / 10)) - 0.75) < 1e-3
    assert abs(prfauth.adversary_link_budget(-153.0, 300.0, 10.23e6) + 19.0) < 0.5

    assert abs(prfauth.log_normal_sf(0.0) + 1.0) < 1e-15
    assert prfauth.log_normal_sf(50.0) < -1800.0

    chips = prfauth.gen_prf_code(bytes(32), 0, 64)
    assert len(chips) == 64 and set(chips) <= {-1, 1}
    assert chips == prfauth.gen_prf_code(bytes(32), 0, 64)

    tiny = prfauth.RadioModel(4, 1.0, 4.0, 30.0)
    clean = prfauth.ChannelModel(1.0, 0.0)
    exact = prfauth.pmd_exact(tiny, clean, prfauth.DetectorConfig(1)).linear
    assert abs(exact - 5 / 16) < 1e-15
    s = prfauth.run_experiment(tiny, clean, prfauth.DetectorConfig(1), "non_scer", 20000, "7", workers=2)
    assert s.contains(5 / 16), s
    again = prfauth.run_experiment(tiny, clean, prfauth.DetectorConfig(1), "non_scer", 20000, "7", workers=1)
    assert again.missed_detections == s.missed_detections

    try:
        prfauth.DetectorConfig(0)
    except ValueError:
        pass
    else:
        raise AssertionError("W = 0 accepted")
    try:
        prfauth.min_cn0(radio, 30, 40000.0)
    except prfauth.InfeasibleError:
        pass
    else:
        raise AssertionError("infeasible search returned")

    assert math.isfinite(prfauth.min_cn0(radio, 341, 128.0))
    print("prfauth smoke test ok")


if __name__ == "__main__":
    main()
